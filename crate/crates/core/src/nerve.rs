//! Truncated nerves of finite categories and their integral homology.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fincat::{FinCat, Functor, Mor};
use crate::linalg::{
    cokernel_of_map, kernel_basis, kernel_of_map, AbInvariants, IntMat, Subquotient,
};
use crate::verdict::{Instance, Verdict};

/// Largest number of nondegenerate simplices assembled.
pub const SIMPLEX_LIMIT: usize = 200_000;

/// Nondegenerate simplices up to dimension `dim`: level 0 holds objects, level `k`
/// holds composable chains of `k` non-identity morphisms (first morphism first).
#[derive(Clone, Debug)]
pub struct TruncatedSimplicialSet {
    pub dim: usize,
    pub levels: Vec<Vec<Vec<Mor>>>,
    /// `faces[k][j][i]`: index of `d_i` of simplex `j` at level `k - 1`, `None` if degenerate.
    pub faces: Vec<Vec<Vec<Option<usize>>>>,
    /// Whether level `dim + 1` is empty, so the nerve is captured completely.
    pub complete: bool,
}

impl TruncatedSimplicialSet {
    pub fn count(&self, k: usize) -> usize {
        self.levels.get(k).map_or(0, Vec::len)
    }

    /// Alternating sum of simplex counts.
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim)
            .map(|k| {
                if k % 2 == 0 {
                    self.count(k) as i64
                } else {
                    -(self.count(k) as i64)
                }
            })
            .sum()
    }

    /// Plain-text face list: one line per simplex with its label and face ids (`-` for degenerate faces).
    pub fn to_face_list(&self, c: &FinCat) -> String {
        let mut out = format!("nerve v1\ndim {}\ncomplete {}\n", self.dim, self.complete);
        for (k, lvl) in self.levels.iter().enumerate() {
            for (j, s) in lvl.iter().enumerate() {
                let label = if k == 0 {
                    c.obj_name(s[0]).to_string()
                } else {
                    s.iter()
                        .map(|&m| c.mor_name(m).to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                let _ = write!(out, "{k} {j} {label}");
                if k > 0 {
                    out.push_str(" :");
                    for f in &self.faces[k][j] {
                        match f {
                            Some(i) => {
                                let _ = write!(out, " {i}");
                            }
                            None => out.push_str(" -"),
                        }
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Builds the nerve truncated at dimension `d`.
pub fn nerve(c: &FinCat, d: usize) -> Result<TruncatedSimplicialSet> {
    let nonid: Vec<Mor> = (0..c.num_morphisms())
        .filter(|&m| !c.is_identity(m))
        .collect();
    let mut levels: Vec<Vec<Vec<Mor>>> = vec![(0..c.num_objects()).map(|x| vec![x]).collect()];
    let mut total = levels[0].len();
    let mut complete = true;
    for k in 1..=d + 1 {
        let mut next = Vec::new();
        if k == 1 {
            next = nonid.iter().map(|&m| vec![m]).collect();
        } else {
            for s in &levels[k - 1] {
                let last = *s.last().unwrap();
                for &m in &nonid {
                    if c.src(m) == c.tgt(last) {
                        let mut t = s.clone();
                        t.push(m);
                        next.push(t);
                    }
                }
            }
        }
        if k == d + 1 {
            complete = next.is_empty();
            break;
        }
        total += next.len();
        if total > SIMPLEX_LIMIT {
            return Err(Error::SizeLimitExceeded {
                what: "nerve simplices".into(),
                requested: total,
                limit: SIMPLEX_LIMIT,
            });
        }
        levels.push(next);
    }
    let mut faces = vec![vec![]];
    for k in 1..levels.len() {
        let index: HashMap<&Vec<Mor>, usize> = levels[k - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let fk = levels[k]
            .iter()
            .map(|s| {
                (0..=k)
                    .map(|i| face(c, s, i).and_then(|f| index.get(&f).copied()))
                    .collect()
            })
            .collect();
        faces.push(fk);
        // level 0 faces of 1-simplices are objects
        if k == 1 {
            let f1: Vec<Vec<Option<usize>>> = levels[1]
                .iter()
                .map(|s| vec![Some(c.tgt(s[0])), Some(c.src(s[0]))])
                .collect();
            faces[1] = f1;
        }
    }
    Ok(TruncatedSimplicialSet {
        dim: d,
        levels,
        faces,
        complete,
    })
}

/// The `i`-th face of a chain of length `≥ 2`; `None` when it is degenerate.
fn face(c: &FinCat, s: &[Mor], i: usize) -> Option<Vec<Mor>> {
    let k = s.len();
    if k < 2 {
        return None;
    }
    let mut t = Vec::with_capacity(k - 1);
    if i == 0 {
        t.extend_from_slice(&s[1..]);
    } else if i == k {
        t.extend_from_slice(&s[..k - 1]);
    } else {
        t.extend_from_slice(&s[..i - 1]);
        let comp = c.compose(s[i], s[i - 1]);
        if c.is_identity(comp) {
            return None;
        }
        t.push(comp);
        t.extend_from_slice(&s[i + 1..]);
    }
    Some(t)
}

/// `∂_k: C_k → C_{k-1}` of the normalized chain complex.
pub fn boundary(n: &TruncatedSimplicialSet, k: usize) -> IntMat {
    let (rows, cols) = (n.count(k - 1), n.count(k));
    let mut m = IntMat::zeros(rows, cols);
    for j in 0..cols {
        for (i, f) in n.faces[k][j].iter().enumerate() {
            if let Some(r) = f {
                let sign = if i % 2 == 0 {
                    BigInt::one()
                } else {
                    -BigInt::one()
                };
                m[(*r, j)] += sign;
            }
        }
    }
    m
}

/// `H_0 … H_{d-1}`; higher degrees are unknown at this truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology {
    pub groups: Vec<AbInvariants>,
    /// First degree not determined by the truncation.
    pub unknown_from: usize,
}

impl std::fmt::Display for Homology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, g) in self.groups.iter().enumerate() {
            writeln!(f, "H{k} = {g}")?;
        }
        write!(f, "H{}+ unknown", self.unknown_from)
    }
}

fn homology_subquotient(n: &TruncatedSimplicialSet, k: usize) -> Subquotient {
    let ck = n.count(k);
    let z = if k == 0 {
        IntMat::identity(ck)
    } else {
        kernel_basis(&boundary(n, k))
    };
    let b = if k < n.dim {
        boundary(n, k + 1)
    } else {
        IntMat::zeros(ck, 0)
    };
    Subquotient::new(z, &b)
}

pub fn homology_of(n: &TruncatedSimplicialSet) -> Homology {
    let groups = (0..n.dim)
        .map(|k| homology_subquotient(n, k).invariants().clone())
        .collect();
    Homology {
        groups,
        unknown_from: n.dim,
    }
}

pub fn homology(c: &FinCat, d: usize) -> Result<Homology> {
    if d == 0 {
        return Err(Error::Invalid("homology needs d ≥ 1".into()));
    }
    Ok(homology_of(&nerve(c, d)?))
}

/// `H_0 = Z` and `H_k = 0` for `1 ≤ k ≤ d - 1`. Evidence only.
pub fn contractibility_evidence(c: &FinCat, d: usize) -> Result<Verdict> {
    let h = homology(c, d)?;
    let label = "nerve homology of a point";
    let bad = h.groups.iter().enumerate().find(|(k, g)| {
        if *k == 0 {
            **g != AbInvariants::free(1)
        } else {
            !g.is_zero()
        }
    });
    Ok(match bad {
        None => {
            Verdict::holds(label).with_note(format!("degrees ≥ {} not examined", h.unknown_from))
        }
        Some((k, g)) => Verdict::fails(
            label,
            Instance::new()
                .int("degree", k as i64)
                .text("group", g.to_string()),
        ),
    })
}

/// Whether `f` induces isomorphisms `H_k(dom) → H_k(cod)` for `k ≤ deg_max`.
pub fn induced_homology_iso(f: &Functor, deg_max: usize) -> Result<Verdict> {
    let d = deg_max + 1;
    let na = nerve(&f.dom, d)?;
    let nb = nerve(&f.cod, d)?;
    let index: Vec<HashMap<&Vec<Mor>, usize>> = nb
        .levels
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, s)| (s, i)).collect())
        .collect();
    let mut parts = Vec::new();
    for k in 0..=deg_max {
        let (ha, hb) = (homology_subquotient(&na, k), homology_subquotient(&nb, k));
        let mut cols = Vec::new();
        for g in 0..ha.invariants().num_generators() {
            let v = ha.generator(g);
            let mut img = vec![BigInt::zero(); nb.count(k)];
            for (j, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let s = &na.levels[k][j];
                let t: Vec<Mor> = if k == 0 {
                    vec![f.obj_map[s[0]]]
                } else {
                    s.iter().map(|&m| f.mor_map[m]).collect()
                };
                if k > 0 && t.iter().any(|&m| f.cod.is_identity(m)) {
                    continue;
                }
                img[index[k][&t]] += c;
            }
            cols.push(
                hb.coords(&img)
                    .ok_or_else(|| Error::Internal("image of a cycle is not a cycle".into()))?,
            );
        }
        let oa = ha.invariants().orders();
        let ob = hb.invariants().orders();
        let m = IntMat::from_columns(ob.len(), &cols);
        let ker = kernel_of_map(&m, &IntMat::diagonal(&oa), &IntMat::diagonal(&ob))
            .invariants()
            .clone();
        let cok = cokernel_of_map(&m, &IntMat::diagonal(&ob)).invariants;
        parts.push(Verdict::from_bool(
            format!("H{k} iso"),
            ker.is_zero() && cok.is_zero(),
            Instance::new()
                .text("kernel", ker.to_string())
                .text("cokernel", cok.to_string()),
        ));
    }
    Ok(Verdict::all("induced homology isomorphism", parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{examples as fx, ordinal};

    #[test]
    fn walking_iso_counts() {
        let n = nerve(&fx::walking_iso(), 2).unwrap();
        assert_eq!((n.count(0), n.count(1), n.count(2)), (2, 2, 2));
        assert!(!n.complete);
    }

    #[test]
    fn ordinal_one() {
        let n = nerve(&ordinal(1), 2).unwrap();
        assert_eq!((n.count(0), n.count(1), n.count(2)), (2, 1, 0));
        let h = homology(&ordinal(1), 2).unwrap();
        assert_eq!(h.groups, vec![AbInvariants::free(1), AbInvariants::zero()]);
    }

    #[test]
    fn circle_has_h1() {
        let h = homology(&fx::circle_poset(), 3).unwrap();
        assert_eq!(h.groups[1], AbInvariants::free(1));
        assert!(contractibility_evidence(&fx::circle_poset(), 3)
            .unwrap()
            .is_fails());
    }

    #[test]
    fn boundary_squares_to_zero() {
        let n = nerve(&fx::walking_iso(), 4).unwrap();
        for k in 2..=4 {
            assert!(boundary(&n, k - 1).mul(&boundary(&n, k)).is_zero());
        }
    }

    #[test]
    fn discrete_fails() {
        assert!(contractibility_evidence(&fx::discrete(2), 2)
            .unwrap()
            .is_fails());
        assert!(contractibility_evidence(&fx::walking_iso(), 4)
            .unwrap()
            .is_holds());
    }
}
