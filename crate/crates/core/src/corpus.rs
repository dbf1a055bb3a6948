//! Exhaustive enumeration of small finite categories up to isomorphism.
//!
//! Categories are produced in order of morphism count, then object count.
//! Composition tables are filled by backtracking with incremental
//! associativity checks; isomorphic copies are removed through a canonical
//! labeling refined by composition invariants.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use crate::error::Result;
use crate::fincat::{CatBuilder, FinCat};

const UNDEF: u8 = u8::MAX;
const NONE: u8 = u8::MAX - 1;

/// Bounds of an enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusSpec {
    pub max_objects: usize,
    pub max_morphisms: usize,
    /// Keep only categories with a zero object.
    pub pointed: bool,
}

impl CorpusSpec {
    pub fn new(max_objects: usize, max_morphisms: usize) -> Self {
        CorpusSpec {
            max_objects,
            max_morphisms,
            pointed: false,
        }
    }

    /// The same bounds restricted to pointed categories.
    pub fn pointed(self) -> Self {
        CorpusSpec {
            pointed: true,
            ..self
        }
    }
}

/// Whether some object has exactly one morphism to and from every object; then it is a zero object.
fn has_zero_row(h: &[Vec<usize>]) -> bool {
    (0..h.len()).any(|z| (0..h.len()).all(|y| h[z][y] == 1 && h[y][z] == 1))
}

/// Counts per `(morphisms, objects)` and whether the enumeration ran to the end.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub counts: Vec<(usize, usize, usize)>,
    pub labeled_tables: u64,
    pub complete: bool,
    /// Size reached when the run stopped early.
    pub stopped_at: Option<(usize, usize)>,
}

impl CorpusStats {
    pub fn total(&self) -> usize {
        self.counts.iter().map(|c| c.2).sum()
    }

    /// Number of isomorphism classes with exactly `n` morphisms.
    pub fn with_morphisms(&self, n: usize) -> usize {
        self.counts.iter().filter(|c| c.0 == n).map(|c| c.2).sum()
    }
}

/// Why a visit loop stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stop {
    Visitor,
    Deadline,
}

/// Calls `visit` once per isomorphism class; it returns `false` to stop. A deadline stops the run early.
pub fn for_each_category(
    spec: CorpusSpec,
    deadline: Option<Instant>,
    mut visit: impl FnMut(&FinCat) -> bool,
) -> Result<CorpusStats> {
    let mut stats = CorpusStats::default();
    for n in 1..=spec.max_morphisms {
        for k in 1..=spec.max_objects.min(n) {
            let mut seen = HashSet::new();
            let mut count = 0usize;
            let mut stop = None;
            for h in hom_matrices(k, n) {
                if spec.pointed && !has_zero_row(&h) {
                    continue;
                }
                let mut s = Search::new(k, &h);
                let r = s.run(&mut |enc: Vec<u8>, cat: &dyn Fn() -> FinCat| {
                    if let Some(d) = deadline {
                        if Instant::now() > d {
                            return Err(Stop::Deadline);
                        }
                    }
                    if seen.insert(enc) {
                        count += 1;
                        if !visit(&cat()) {
                            return Err(Stop::Visitor);
                        }
                    }
                    Ok(())
                });
                stats.labeled_tables += s.leaves;
                if let Err(e) = r {
                    stop = Some(e);
                    break;
                }
            }
            stats.counts.push((n, k, count));
            if stop.is_some() {
                stats.stopped_at = Some((n, k));
                return Ok(stats);
            }
        }
    }
    stats.complete = true;
    Ok(stats)
}

/// All isomorphism classes within the bounds.
pub fn corpus(spec: CorpusSpec) -> Result<Vec<FinCat>> {
    let mut out = Vec::new();
    for_each_category(spec, None, |c| {
        out.push(c.clone());
        true
    })?;
    Ok(out)
}

/// Hom-size matrices with `k` objects and `n` morphisms, one per object permutation orbit,
/// that admit composition (nonempty `x → y` and `y → z` force nonempty `x → z`).
pub fn hom_matrices(k: usize, n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let cells: Vec<(usize, usize)> = (0..k).flat_map(|x| (0..k).map(move |y| (x, y))).collect();
    let mut m = vec![vec![0usize; k]; k];
    fn rec(
        i: usize,
        left: usize,
        cells: &[(usize, usize)],
        m: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if i == cells.len() {
            if left == 0 {
                out.push(m.clone());
            }
            return;
        }
        let (x, y) = cells[i];
        let lo = usize::from(x == y);
        let rest_min = cells[i + 1..].iter().filter(|(a, b)| a == b).count();
        if left < lo + rest_min {
            return;
        }
        for v in lo..=left - rest_min {
            m[x][y] = v;
            rec(i + 1, left - v, cells, m, out);
        }
        m[x][y] = 0;
    }
    rec(0, n, &cells, &mut m, &mut out);
    let perms = permutations(k);
    out.into_iter()
        .filter(|m| {
            let closed = (0..k).all(|x| {
                (0..k).all(|y| (0..k).all(|z| m[x][y] == 0 || m[y][z] == 0 || m[x][z] > 0))
            });
            closed && perms.iter().all(|p| permuted(m, p) >= *m)
        })
        .collect()
}

fn permuted(m: &[Vec<usize>], p: &[usize]) -> Vec<Vec<usize>> {
    let k = m.len();
    let mut r = vec![vec![0; k]; k];
    for x in 0..k {
        for y in 0..k {
            r[p[x]][p[y]] = m[x][y];
        }
    }
    r
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !cur.contains(&i) {
                cur.push(i);
                rec(k, cur, out);
                cur.pop();
            }
        }
    }
    rec(k, &mut cur, &mut out);
    out
}

struct Search {
    k: usize,
    n: usize,
    src: Vec<u8>,
    tgt: Vec<u8>,
    is_id: Vec<bool>,
    hom: Vec<Vec<Vec<u8>>>,
    /// `comp[g * n + f] = g ∘ f`.
    comp: Vec<u8>,
    cells: Vec<(u8, u8)>,
    leaves: u64,
}

impl Search {
    fn new(k: usize, h: &[Vec<usize>]) -> Search {
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut is_id = Vec::new();
        for x in 0..k {
            src.push(x as u8);
            tgt.push(x as u8);
            is_id.push(true);
        }
        let mut hom = vec![vec![Vec::new(); k]; k];
        for (x, row) in hom.iter_mut().enumerate() {
            row[x].push(x as u8);
        }
        for x in 0..k {
            for y in 0..k {
                let extra = h[x][y] - usize::from(x == y);
                for _ in 0..extra {
                    hom[x][y].push(src.len() as u8);
                    src.push(x as u8);
                    tgt.push(y as u8);
                    is_id.push(false);
                }
            }
        }
        let n = src.len();
        let mut comp = vec![NONE; n * n];
        let mut cells = Vec::new();
        for g in 0..n {
            for f in 0..n {
                if tgt[f] != src[g] {
                    continue;
                }
                comp[g * n + f] = if is_id[g] {
                    f as u8
                } else if is_id[f] {
                    g as u8
                } else {
                    cells.push((g as u8, f as u8));
                    UNDEF
                };
            }
        }
        Search {
            k,
            n,
            src,
            tgt,
            is_id,
            hom,
            comp,
            cells,
            leaves: 0,
        }
    }

    #[inline]
    fn c(&self, g: u8, f: u8) -> u8 {
        self.comp[g as usize * self.n + f as usize]
    }

    /// Every associativity triple whose last cell is `a ∘ b = v`.
    fn consistent(&self, a: u8, b: u8, v: u8) -> bool {
        let n = self.n as u8;
        let ok = |l: u8, r: u8| l >= NONE || r >= NONE || l == r;
        for f in 0..n {
            if self.tgt[f as usize] != self.src[b as usize] {
                continue;
            }
            let u = self.c(b, f);
            if u < NONE && !ok(self.c(v, f), self.c(a, u)) {
                return false;
            }
        }
        for h in 0..n {
            if self.src[h as usize] != self.tgt[a as usize] {
                continue;
            }
            let u = self.c(h, a);
            if u < NONE && !ok(self.c(u, b), self.c(h, v)) {
                return false;
            }
        }
        // x ∘ y = a forces src y = tgt b; y ∘ z = b forces tgt y = src a
        for x in 0..n {
            for y in 0..n {
                let xy = self.c(x, y);
                if xy == a {
                    let u = self.c(y, b);
                    if u < NONE && !ok(v, self.c(x, u)) {
                        return false;
                    }
                }
                if xy == b {
                    let u = self.c(a, x);
                    if u < NONE && !ok(self.c(u, y), v) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(
        &mut self,
        leaf: &mut dyn FnMut(Vec<u8>, &dyn Fn() -> FinCat) -> std::result::Result<(), Stop>,
    ) -> std::result::Result<(), Stop> {
        self.rec(0, leaf)
    }

    fn rec(
        &mut self,
        i: usize,
        leaf: &mut dyn FnMut(Vec<u8>, &dyn Fn() -> FinCat) -> std::result::Result<(), Stop>,
    ) -> std::result::Result<(), Stop> {
        if i == self.cells.len() {
            self.leaves += 1;
            let lab = self.canonical_labeling();
            let enc = self.encode(&lab.0, &lab.1);
            return leaf(enc, &|| self.build(&lab.0, &lab.1));
        }
        let (g, f) = self.cells[i];
        let (x, z) = (self.src[f as usize] as usize, self.tgt[g as usize] as usize);
        let values = self.hom[x][z].clone();
        for v in values {
            self.comp[g as usize * self.n + f as usize] = v;
            if self.consistent(g, f, v) {
                self.rec(i + 1, leaf)?;
            }
        }
        self.comp[g as usize * self.n + f as usize] = UNDEF;
        Ok(())
    }

    fn colors(&self) -> Vec<u64> {
        let n = self.n;
        let h = |x: u8, y: u8| self.hom[x as usize][y as usize].len();
        let mut col: Vec<u64> = (0..n)
            .map(|m| {
                let (s, t) = (self.src[m], self.tgt[m]);
                hash(&(self.is_id[m], h(s, s), h(t, t), h(s, t), h(t, s), s == t))
            })
            .collect();
        let classes = |c: &[u64]| c.iter().collect::<HashSet<_>>().len();
        let mut nc = classes(&col);
        for _ in 0..n {
            let next: Vec<u64> = (0..n)
                .map(|m| {
                    let mut after: Vec<(u64, u64)> = (0..n)
                        .filter(|&g| self.src[g] == self.tgt[m])
                        .map(|g| (col[g], col[self.c(g as u8, m as u8) as usize]))
                        .collect();
                    let mut before: Vec<(u64, u64)> = (0..n)
                        .filter(|&f| self.tgt[f] == self.src[m])
                        .map(|f| (col[f], col[self.c(m as u8, f as u8) as usize]))
                        .collect();
                    after.sort_unstable();
                    before.sort_unstable();
                    hash(&(col[m], after, before))
                })
                .collect();
            let nn = classes(&next);
            col = next;
            if nn == nc {
                break;
            }
            nc = nn;
        }
        col
    }

    /// `(object order, morphism order)` giving the least encoding among color-consistent labelings.
    fn canonical_labeling(&self) -> (Vec<usize>, Vec<usize>) {
        let col = self.colors();
        let k = self.k;
        let mut objs: Vec<usize> = (0..k).collect();
        objs.sort_by_key(|&x| col[x]);
        let mut best: Option<(Vec<u8>, Vec<usize>, Vec<usize>)> = None;
        for oo in tie_orders(&objs, |&x| col[x]) {
            let mut pos = vec![0usize; k];
            for (i, &x) in oo.iter().enumerate() {
                pos[x] = i;
            }
            let mut ms: Vec<usize> = (0..self.n).collect();
            ms.sort_by_key(|&m| {
                (
                    !self.is_id[m],
                    pos[self.src[m] as usize],
                    pos[self.tgt[m] as usize],
                    col[m],
                )
            });
            let key = |m: &usize| {
                (
                    !self.is_id[*m],
                    pos[self.src[*m] as usize],
                    pos[self.tgt[*m] as usize],
                    col[*m],
                )
            };
            for mo in tie_orders(&ms, key) {
                let enc = self.encode(&oo, &mo);
                if best.as_ref().is_none_or(|b| enc < b.0) {
                    best = Some((enc, oo.clone(), mo));
                }
            }
        }
        let (_, o, m) = best.expect("at least one labeling");
        (o, m)
    }

    fn encode(&self, objs: &[usize], mors: &[usize]) -> Vec<u8> {
        let n = self.n;
        let mut opos = vec![0u8; self.k];
        for (i, &x) in objs.iter().enumerate() {
            opos[x] = i as u8;
        }
        let mut mpos = vec![0u8; n];
        for (i, &m) in mors.iter().enumerate() {
            mpos[m] = i as u8;
        }
        let mut e = Vec::with_capacity(2 * n + n * n);
        for &m in mors {
            e.push(opos[self.src[m] as usize]);
            e.push(opos[self.tgt[m] as usize]);
        }
        for &g in mors {
            for &f in mors {
                let v = self.c(g as u8, f as u8);
                e.push(if v == NONE { NONE } else { mpos[v as usize] });
            }
        }
        e
    }

    fn build(&self, objs: &[usize], mors: &[usize]) -> FinCat {
        const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
        let mut b = CatBuilder::new();
        let mut opos = vec![0usize; self.k];
        for (i, &x) in objs.iter().enumerate() {
            opos[x] = i;
        }
        let mut new_id = vec![0usize; self.n];
        for (i, _) in objs.iter().enumerate() {
            b.object(
                NAMES
                    .get(i)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("o{i}")),
            );
        }
        for &x in objs {
            new_id[x] = b.identity(opos[x]);
        }
        let mut next = 1;
        for &m in mors {
            if self.is_id[m] {
                continue;
            }
            new_id[m] = b.morphism(
                format!("m{next}"),
                opos[self.src[m] as usize],
                opos[self.tgt[m] as usize],
            );
            next += 1;
        }
        for g in 0..self.n {
            for f in 0..self.n {
                let v = self.c(g as u8, f as u8);
                if v < NONE && !self.is_id[g] && !self.is_id[f] {
                    b.compose(new_id[g], new_id[f], new_id[v as usize]);
                }
            }
        }
        b.build_unchecked()
    }
}

fn hash<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Every reordering of `items` (already sorted by `key`) that permutes only within equal-key runs.
fn tie_orders<T: Clone, K: PartialEq>(items: &[T], key: impl Fn(&T) -> K) -> Vec<Vec<T>> {
    let mut runs: Vec<Vec<T>> = Vec::new();
    for it in items {
        match runs.last_mut() {
            Some(r) if key(&r[0]) == key(it) => r.push(it.clone()),
            _ => runs.push(vec![it.clone()]),
        }
    }
    let mut out = vec![Vec::with_capacity(items.len())];
    for r in runs {
        let perms = permutations(r.len());
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for o in &out {
            for p in &perms {
                let mut o2 = o.clone();
                o2.extend(p.iter().map(|&i| r[i].clone()));
                next.push(o2);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monoid_counts() {
        let st = for_each_category(CorpusSpec::new(1, 5), None, |_| true).unwrap();
        let c: Vec<usize> = (1..=5).map(|n| st.with_morphisms(n)).collect();
        assert_eq!(c, vec![1, 2, 7, 35, 228]);
    }

    #[test]
    fn two_morphisms() {
        // one-object monoids of order 2, the discrete pair
        let st = for_each_category(CorpusSpec::new(3, 2), None, |_| true).unwrap();
        assert_eq!(st.with_morphisms(2), 3);
    }

    #[test]
    fn visited_categories_are_valid() {
        let cats = corpus(CorpusSpec::new(3, 4)).unwrap();
        for c in &cats {
            assert!(crate::fincat::validate_category(c).violations.is_empty());
        }
    }
}
