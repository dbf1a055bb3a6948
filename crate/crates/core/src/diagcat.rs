//! Categories of chains `x₀ → x₁ → … → x_m` with links in a class, their
//! ladders, and restriction along monotone maps of ordinals.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{is_mono, size_limit, FinCat, Functor, Mor, Obj};
use crate::morclass::{compose_classes, has_property, MorClass, Property};
use crate::verdict::{Instance, Verdict};

/// The category `C(m, S)` realized as a [`FinCat`].
#[derive(Clone, Debug)]
pub struct ChainCat {
    pub base: Arc<FinCat>,
    pub m: usize,
    pub class: MorClass,
    pub cat: Arc<FinCat>,
    /// Links `i_0, …, i_{m-1}` of each object.
    pub links: Vec<Vec<Mor>>,
    /// Levels `x_0, …, x_m` of each object.
    pub levels: Vec<Vec<Obj>>,
    /// Components `f_0, …, f_m` of each ladder.
    pub ladders: Vec<Vec<Mor>>,
    index: HashMap<Vec<Obj>, Vec<usize>>,
}

impl ChainCat {
    /// Object index of a chain given by its links (or, for `m = 0`, by its single level).
    pub fn find_chain(&self, x0: Obj, links: &[Mor]) -> Option<usize> {
        let mut lv = vec![x0];
        for &l in links {
            lv.push(self.base.tgt(l));
        }
        self.index
            .get(&lv)?
            .iter()
            .copied()
            .find(|&o| self.links[o] == links)
    }

    /// Ladder index between two chains with the given components.
    pub fn find_ladder(&self, src: usize, tgt: usize, comps: &[Mor]) -> Option<usize> {
        self.cat
            .hom(src, tgt)
            .iter()
            .copied()
            .find(|&k| self.ladders[k] == comps)
    }

    /// Composite `x(i ≤ j)` of the links of chain `o`.
    pub fn link_composite(&self, o: usize, i: usize, j: usize) -> Mor {
        let mut acc = self.base.id(self.levels[o][i]);
        for k in i..j {
            acc = self.base.compose(self.links[o][k], acc);
        }
        acc
    }
}

fn chain_name(c: &FinCat, x0: Obj, links: &[Mor]) -> String {
    if links.is_empty() {
        c.obj_name(x0).to_string()
    } else {
        let ls: Vec<&str> = links.iter().map(|&l| c.mor_name(l)).collect();
        format!("[{}]", ls.join(";"))
    }
}

/// All ladders between two chains, lexicographic in components.
fn ladders_between(c: &FinCat, lx: &[Obj], ix: &[Mor], ly: &[Obj], iy: &[Mor]) -> Vec<Vec<Mor>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(lx.len());
    fn rec(
        k: usize,
        c: &FinCat,
        lx: &[Obj],
        ix: &[Mor],
        ly: &[Obj],
        iy: &[Mor],
        cur: &mut Vec<Mor>,
        out: &mut Vec<Vec<Mor>>,
    ) {
        if k == lx.len() {
            out.push(cur.clone());
            return;
        }
        for &f in c.hom(lx[k], ly[k]) {
            if k > 0 && c.compose(f, ix[k - 1]) != c.compose(iy[k - 1], cur[k - 1]) {
                continue;
            }
            cur.push(f);
            rec(k + 1, c, lx, ix, ly, iy, cur, out);
            cur.pop();
        }
    }
    rec(0, c, lx, ix, ly, iy, &mut cur, &mut out);
    out
}

/// Builds `C(m, S)`; `S` must be multiplicative so that chains determine all `x(i ≤ j)`.
pub fn chain_category(c: &Arc<FinCat>, m: usize, s: &MorClass) -> Result<ChainCat> {
    s.check_owner(c)?;
    if !has_property(c, Property::Multiplicative, s, None)? {
        return Err(Error::RequiresMultiplicative("chain links".into()));
    }
    let limit = size_limit();
    // chains as (levels, links)
    let mut chains: Vec<(Vec<Obj>, Vec<Mor>)> = c.objects().map(|x| (vec![x], vec![])).collect();
    for _ in 0..m {
        let mut next = Vec::new();
        for (lv, ls) in &chains {
            let last = *lv.last().unwrap();
            for &l in c.out_of(last) {
                if s.contains(l) {
                    let mut lv2 = lv.clone();
                    lv2.push(c.tgt(l));
                    let mut ls2 = ls.clone();
                    ls2.push(l);
                    next.push((lv2, ls2));
                }
            }
            if next.len() > limit {
                return Err(Error::SizeLimitExceeded {
                    what: "chain category objects".into(),
                    requested: next.len(),
                    limit,
                });
            }
        }
        chains = next;
    }
    chains.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut ladders: Vec<Vec<Mor>> = Vec::new();
    let mut ident = vec![0; chains.len()];
    let mut key: HashMap<(usize, usize, Vec<Mor>), usize> = HashMap::new();
    for (a, (la, ia)) in chains.iter().enumerate() {
        for (b, (lb, ib)) in chains.iter().enumerate() {
            for lad in ladders_between(c, la, ia, lb, ib) {
                let k = ladders.len();
                if k >= limit {
                    return Err(Error::SizeLimitExceeded {
                        what: "chain category".into(),
                        requested: k + 1,
                        limit,
                    });
                }
                if a == b && lad.iter().zip(la).all(|(&f, &x)| f == c.id(x)) {
                    ident[a] = k;
                }
                key.insert((a, b, lad.clone()), k);
                ladders.push(lad);
                src.push(a);
                tgt.push(b);
            }
        }
    }
    let obj_names: Vec<String> = chains
        .iter()
        .map(|(lv, ls)| chain_name(c, lv[0], ls))
        .collect();
    let mor_names: Vec<String> = (0..ladders.len())
        .map(|k| {
            if ident[src[k]] == k {
                format!("id({})", obj_names[src[k]])
            } else {
                let ns: Vec<&str> = ladders[k].iter().map(|&f| c.mor_name(f)).collect();
                if m == 0 {
                    ns[0].to_string()
                } else {
                    format!("({})", ns.join(","))
                }
            }
        })
        .collect();
    let cat = FinCat::from_fn(
        obj_names,
        mor_names,
        src.clone(),
        tgt.clone(),
        ident,
        |g, f| {
            let comp: Vec<Mor> = ladders[g]
                .iter()
                .zip(&ladders[f])
                .map(|(&a, &b)| c.compose(a, b))
                .collect();
            key.get(&(src[f], tgt[g], comp)).copied()
        },
    );
    let mut index: HashMap<Vec<Obj>, Vec<usize>> = HashMap::new();
    for (o, (lv, _)) in chains.iter().enumerate() {
        index.entry(lv.clone()).or_default().push(o);
    }
    Ok(ChainCat {
        base: c.clone(),
        m,
        class: s.clone(),
        cat: Arc::new(cat),
        links: chains.iter().map(|x| x.1.clone()).collect(),
        levels: chains.into_iter().map(|x| x.0).collect(),
        ladders,
        index,
    })
}

/// Ladders all of whose components lie in `T`.
pub fn lift_class(t: &MorClass, d: &ChainCat) -> Result<MorClass> {
    t.check_owner(&d.base)?;
    Ok(MorClass::from_fn(&d.cat, |k| {
        d.ladders[k].iter().all(|&f| t.contains(f))
    }))
}

fn check_monotone(a: &[usize], m: usize) -> Result<()> {
    if a.is_empty() || a.windows(2).any(|w| w[0] > w[1]) || a.iter().any(|&v| v > m) {
        return Err(Error::NotMonotone);
    }
    Ok(())
}

/// Reindexing functor `C(m, S) → C(m', S)` along `a: [m'] → [m]` (given as its values).
pub fn restrict_along_into(a: &[usize], from: &ChainCat, to: &ChainCat) -> Result<Functor> {
    check_monotone(a, from.m)?;
    if to.m + 1 != a.len() || to.base.tag() != from.base.tag() || to.class != from.class {
        return Err(Error::ShapeMismatch(
            "target chain category does not match the map".into(),
        ));
    }
    let mut obj_map = Vec::with_capacity(from.cat.num_objects());
    for o in from.cat.objects() {
        let links: Vec<Mor> = a
            .windows(2)
            .map(|w| from.link_composite(o, w[0], w[1]))
            .collect();
        let x0 = from.levels[o][a[0]];
        let t = to
            .find_chain(x0, &links)
            .ok_or_else(|| Error::Internal("restricted chain missing".into()))?;
        obj_map.push(t);
    }
    let mut mor_map = Vec::with_capacity(from.cat.num_morphisms());
    for k in from.cat.morphisms() {
        let comps: Vec<Mor> = a.iter().map(|&i| from.ladders[k][i]).collect();
        let (s, t) = (obj_map[from.cat.src(k)], obj_map[from.cat.tgt(k)]);
        let l = to
            .find_ladder(s, t, &comps)
            .ok_or_else(|| Error::Internal("restricted ladder missing".into()))?;
        mor_map.push(l);
    }
    Functor::new(from.cat.clone(), to.cat.clone(), obj_map, mor_map)
}

/// Builds `C(m', S)` and the reindexing functor into it.
pub fn restrict_along(a: &[usize], d: &ChainCat) -> Result<(ChainCat, Functor)> {
    check_monotone(a, d.m)?;
    let to = chain_category(&d.base, a.len() - 1, &d.class)?;
    let f = restrict_along_into(a, d, &to)?;
    Ok((to, f))
}

/// The three statements about lifted classes on chain categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ChainHeritability {
    /// `TC(n,U)` right cofinal in `SC(n,U)`.
    Cofinal,
    /// `SC(n,U)` right permutative wrt `TC(n,U)`.
    Permutative,
    /// `SC(n,U)` right reversible wrt `TC(n,U)`.
    Reversible,
}

impl ChainHeritability {
    pub const ALL: [ChainHeritability; 3] = [
        ChainHeritability::Cofinal,
        ChainHeritability::Permutative,
        ChainHeritability::Reversible,
    ];

    /// Command-line identifier.
    pub fn id(self) -> &'static str {
        match self {
            ChainHeritability::Cofinal => "1.8.1",
            ChainHeritability::Permutative => "1.8.2",
            ChainHeritability::Reversible => "1.8.3",
        }
    }

    pub fn from_id(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|h| h.id() == s)
    }

    fn name(self) -> &'static str {
        match self {
            ChainHeritability::Cofinal => "chain-cofinal",
            ChainHeritability::Permutative => "chain-permutative",
            ChainHeritability::Reversible => "chain-reversible",
        }
    }
}

/// Classes for [`chain_heritability_check`]; `v` is used by the reversibility statement only.
#[derive(Clone, Debug)]
pub struct ChainInputs {
    pub cat: Arc<FinCat>,
    pub s: MorClass,
    pub t: MorClass,
    pub u: MorClass,
    pub v: Option<MorClass>,
    pub n: usize,
}

/// Named hypotheses of a chain statement with their truth values.
pub fn chain_hypotheses(
    part: ChainHeritability,
    inp: &ChainInputs,
) -> Result<Vec<(&'static str, bool)>> {
    let c = &*inp.cat;
    let (s, t, u) = (&inp.s, &inp.t, &inp.u);
    for k in [s, t, u] {
        k.check_owner(c)?;
    }
    let nonempty = !s.is_empty() && !t.is_empty() && !u.is_empty();
    let mut h = vec![
        ("classes non-empty", nonempty),
        (
            "U multiplicative",
            has_property(c, Property::Multiplicative, u, None)?,
        ),
    ];
    match part {
        ChainHeritability::Cofinal => {
            h.push((
                "T multiplicative",
                has_property(c, Property::Multiplicative, t, None)?,
            ));
            h.push((
                "T right cofinal in S",
                has_property(c, Property::RightCofinal, s, Some(t))?,
            ));
            h.push((
                "S right permutative wrt U",
                has_property(c, Property::RightPermutative, s, Some(u))?,
            ));
            h.push((
                "U∘T ⊆ T∘U",
                compose_classes(c, u, t)?.is_subset(&compose_classes(c, t, u)?),
            ));
        }
        ChainHeritability::Permutative => {
            h.push(("T∘S ⊆ T", compose_classes(c, t, s)?.is_subset(t)));
            h.push((
                "U∘S ⊆ S∘U",
                compose_classes(c, u, s)?.is_subset(&compose_classes(c, s, u)?),
            ));
            h.push((
                "S right permutative wrt T",
                has_property(c, Property::RightPermutative, s, Some(t))?,
            ));
            h.push((
                "S right permutative wrt U",
                has_property(c, Property::RightPermutative, s, Some(u))?,
            ));
            h.push((
                "S consists of monomorphisms",
                s.members().into_iter().all(|m| is_mono(c, m)),
            ));
        }
        ChainHeritability::Reversible => {
            let v = inp
                .v
                .as_ref()
                .ok_or_else(|| Error::Invalid("reversibility statement needs V".into()))?;
            v.check_owner(c)?;
            h[0].1 = nonempty && !v.is_empty();
            h.push((
                "V multiplicative",
                has_property(c, Property::Multiplicative, v, None)?,
            ));
            h.push((
                "V right cofinal in S",
                has_property(c, Property::RightCofinal, s, Some(v))?,
            ));
            h.push((
                "U∘V ⊆ V∘U",
                compose_classes(c, u, v)?.is_subset(&compose_classes(c, v, u)?),
            ));
            h.push((
                "S multiplicative",
                has_property(c, Property::Multiplicative, s, None)?,
            ));
            h.push((
                "S right permutative wrt U",
                has_property(c, Property::RightPermutative, s, Some(u))?,
            ));
            h.push((
                "S right reversible wrt T",
                has_property(c, Property::RightReversible, s, Some(t))?,
            ));
        }
    }
    Ok(h)
}

/// Vacuous when a hypothesis fails; otherwise the conclusion decided on `C(n, U)`.
pub fn chain_heritability_check(part: ChainHeritability, inp: &ChainInputs) -> Result<Verdict> {
    let name = part.name();
    let hyps = chain_hypotheses(part, inp)?;
    if let Some((why, _)) = hyps.iter().find(|(_, ok)| !ok) {
        return Ok(Verdict::vacuous(name, format!("hypothesis failed: {why}")));
    }
    let d = chain_category(&inp.cat, inp.n, &inp.u)?;
    let ls = lift_class(&inp.s, &d)?;
    let lt = lift_class(&inp.t, &d)?;
    let (p, a, b) = match part {
        ChainHeritability::Cofinal => (Property::RightCofinal, &ls, &lt),
        ChainHeritability::Permutative => (Property::RightPermutative, &ls, &lt),
        ChainHeritability::Reversible => (Property::RightReversible, &ls, &lt),
    };
    let mut v = crate::morclass::class_property(&d.cat, p, a, Some(b))?;
    v.property = name.to_string();
    v.witness.clear();
    if let Some(cex) = v.counterexample.take() {
        // rename ladder indices for readability
        let mut inst = Instance::new().int("n", inp.n as i64);
        for bnd in cex.0 {
            match bnd.item {
                crate::verdict::Item::Mor(k) => inst = inst.text(&bnd.role, d.cat.mor_name(k)),
                other => inst.0.push(crate::verdict::Binding {
                    role: bnd.role,
                    item: other,
                }),
            }
        }
        v.counterexample = Some(inst);
    }
    Ok(v.with_note(format!(
        "chain category has {} objects and {} ladders",
        d.cat.num_objects(),
        d.cat.num_morphisms()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::examples::walking_iso;
    use crate::fincat::{max_groupoid, ordinal, validate_category};

    #[test]
    fn chains_in_ordinal_one() {
        let c = Arc::new(ordinal(1));
        let all = MorClass::all(&c);
        let d = chain_category(&c, 1, &all).unwrap();
        assert_eq!((d.cat.num_objects(), d.cat.num_morphisms()), (3, 6));
        assert!(validate_category(&d.cat).is_valid());
        let d0 = chain_category(&c, 0, &all).unwrap();
        assert_eq!((d0.cat.num_objects(), d0.cat.num_morphisms()), (2, 3));
    }

    #[test]
    fn restriction_drops_last_link() {
        let c = Arc::new(ordinal(1));
        let all = MorClass::all(&c);
        let d = chain_category(&c, 1, &all).unwrap();
        let f = c.find_morphism("f01").unwrap();
        let (to, r) = restrict_along(&[0], &d).unwrap();
        let o = d.find_chain(0, &[f]).unwrap();
        assert_eq!(to.levels[r.obj(o)], vec![0]);
        let (_, deg) = restrict_along(&[0, 0], &chain_category(&c, 0, &all).unwrap()).unwrap();
        assert_eq!(deg.cod.num_objects(), 3);
    }

    #[test]
    fn non_monotone_rejected() {
        let c = Arc::new(ordinal(1));
        let all = MorClass::all(&c);
        let d = chain_category(&c, 1, &all).unwrap();
        assert_eq!(restrict_along(&[1, 0], &d).unwrap_err(), Error::NotMonotone);
    }

    #[test]
    fn groupoid_chain_checks() {
        let c = Arc::new(walking_iso());
        let all = MorClass::all(&c);
        let inp = ChainInputs {
            cat: c.clone(),
            s: all.clone(),
            t: all.clone(),
            u: all.clone(),
            v: Some(all.clone()),
            n: 1,
        };
        for p in ChainHeritability::ALL {
            assert!(
                chain_heritability_check(p, &inp).unwrap().is_holds(),
                "{p:?}"
            );
        }
        let o = Arc::new(ordinal(1));
        let so = MorClass::all(&o);
        let inp = ChainInputs {
            cat: o.clone(),
            s: so.clone(),
            t: so.clone(),
            u: max_groupoid(&o),
            v: None,
            n: 1,
        };
        assert!(chain_heritability_check(ChainHeritability::Cofinal, &inp)
            .unwrap()
            .is_holds());
    }
}
