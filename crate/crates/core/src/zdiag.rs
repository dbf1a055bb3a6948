//! Finitely generated abelian groups in invariant-factor form, grid diagrams
//! of them over products of ordinals, Hom groups as kernels of integer
//! linear systems, and localization at multiplicative sets of integers.
//!
//! `Z[1/n]`-modules are represented by integer models: the free part stays
//! `Z^r` and torsion coprime to `n` is kept. Hom groups between localized
//! diagrams are computed on the models and tagged with the localized ring.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    cokernel_of_map, column_span_basis, kernel_of_map, preimage_lattice, solve, AbInvariants,
    IntMat, Subquotient,
};
use crate::verdict::{Instance, Verdict};

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// The multiplicative set generated by finitely many nonzero integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultSetZ {
    pub generators: Vec<BigInt>,
    /// Product of the absolute values of the generators.
    pub n: BigInt,
}

impl MultSetZ {
    pub fn new(gens: &[i64]) -> Result<MultSetZ> {
        MultSetZ::from_big(gens.iter().map(|&g| big(g)).collect())
    }

    pub fn from_big(generators: Vec<BigInt>) -> Result<MultSetZ> {
        if generators.iter().any(|g| g.is_zero()) {
            return Err(Error::Invalid("0 cannot be inverted".into()));
        }
        let n = generators.iter().fold(BigInt::one(), |a, g| a * g.abs());
        Ok(MultSetZ { generators, n })
    }

    pub fn trivial() -> MultSetZ {
        MultSetZ {
            generators: vec![],
            n: BigInt::one(),
        }
    }

    /// `s ∈ S` up to sign: `s ≠ 0` and `s` divides a power of `n`.
    pub fn contains(&self, s: &BigInt) -> bool {
        !s.is_zero() && self.strip(s).is_one()
    }

    /// `d` with every prime dividing `n` removed (absolute value).
    pub fn strip(&self, d: &BigInt) -> BigInt {
        let mut a = d.abs();
        if a.is_zero() {
            return a;
        }
        loop {
            let g = a.gcd(&self.n);
            if g.is_one() {
                return a;
            }
            while (&a % &g).is_zero() {
                a /= &g;
            }
        }
    }

    pub fn ring(&self) -> Ring {
        if self.n.is_one() {
            Ring::Z
        } else {
            Ring::Inverted(self.n.clone())
        }
    }

    /// Divisors of `n^b`, ascending.
    pub fn divisors_of_power(&self, b: u32) -> Vec<BigInt> {
        let mut primes = Vec::new();
        let mut m = self.n.clone();
        let mut p = big(2);
        while &p * &p <= m {
            if (&m % &p).is_zero() {
                primes.push(p.clone());
                while (&m % &p).is_zero() {
                    m /= &p;
                }
            }
            p += 1;
        }
        if m > BigInt::one() {
            primes.push(m);
        }
        let mut out = vec![BigInt::one()];
        for p in &primes {
            let e = b * valuation(&self.n, p);
            let mut next = Vec::new();
            for d in &out {
                let mut q = d.clone();
                for _ in 0..=e {
                    next.push(q.clone());
                    q *= p;
                }
            }
            out = next;
        }
        out.sort();
        out
    }
}

fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    let mut k = 0;
    let mut m = n.clone();
    while (&m % p).is_zero() {
        m /= p;
        k += 1;
    }
    k
}

impl fmt::Display for MultSetZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gs: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "<{}>", gs.join(","))
    }
}

/// The base ring: `Z`, or `Z` with `n` inverted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Ring {
    Z,
    Inverted(BigInt),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::Inverted(n) => write!(f, "Z[1/{n}]"),
        }
    }
}

/// `R^rank ⊕ ⨁ R/dᵢ` with generators in that order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FgAb {
    pub ring: Ring,
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FgAb {
    pub fn new(ring: Ring, rank: usize, torsion: Vec<BigInt>) -> Result<FgAb> {
        if torsion.iter().any(|d| d <= &BigInt::one()) {
            return Err(Error::Invalid("invariant factors must exceed 1".into()));
        }
        if torsion.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return Err(Error::Invalid(
                "invariant factors must form a divisibility chain".into(),
            ));
        }
        if let Ring::Inverted(n) = &ring {
            if torsion.iter().any(|d| !d.gcd(n).is_one()) {
                return Err(Error::Invalid(format!(
                    "torsion must be coprime to {n} over {ring}"
                )));
            }
        }
        Ok(FgAb {
            ring,
            rank,
            torsion,
        })
    }

    pub fn zero() -> FgAb {
        FgAb {
            ring: Ring::Z,
            rank: 0,
            torsion: vec![],
        }
    }

    pub fn free(rank: usize) -> FgAb {
        FgAb {
            ring: Ring::Z,
            rank,
            torsion: vec![],
        }
    }

    /// `Z^rank ⊕ Z/d₁ ⊕ …` over the integers.
    pub fn of(rank: usize, torsion: &[i64]) -> Result<FgAb> {
        FgAb::new(Ring::Z, rank, torsion.iter().map(|&d| big(d)).collect())
    }

    pub fn from_invariants(ring: Ring, inv: &AbInvariants) -> FgAb {
        FgAb {
            ring,
            rank: inv.rank,
            torsion: inv.torsion.clone(),
        }
    }

    pub fn invariants(&self) -> AbInvariants {
        AbInvariants {
            rank: self.rank,
            torsion: self.torsion.clone(),
        }
    }

    pub fn num_gens(&self) -> usize {
        self.rank + self.torsion.len()
    }

    /// Generator orders, `0` for free generators.
    pub fn orders(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.rank];
        v.extend(self.torsion.iter().cloned());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.num_gens() == 0
    }

    pub fn relations(&self) -> IntMat {
        IntMat::diagonal(&self.orders())
    }

    /// Parses `0`, `Z`, `Z^2 + Z/2 + Z/4` (ring given separately).
    pub fn parse(s: &str, ring: Ring) -> Result<FgAb> {
        let s = s.trim();
        let mut rank = 0;
        let mut torsion = Vec::new();
        if s != "0" {
            for part in s.split('+').map(str::trim) {
                if let Some(d) = part.strip_prefix("Z/") {
                    let d: BigInt = d
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad cyclic factor `{part}`")))?;
                    torsion.push(d);
                } else if part == "Z" {
                    rank += 1;
                } else if let Some(r) = part.strip_prefix("Z^") {
                    rank += r
                        .parse::<usize>()
                        .map_err(|_| Error::Invalid(format!("bad rank `{part}`")))?;
                } else {
                    return Err(Error::Invalid(format!("bad group summand `{part}`")));
                }
            }
        }
        FgAb::new(ring, rank, torsion)
    }
}

impl fmt::Display for FgAb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let base = match &self.ring {
            Ring::Z => "Z".to_string(),
            r => r.to_string(),
        };
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push(base.clone()),
            r => parts.push(format!("{base}^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A homomorphism given by its matrix on chosen generators (columns = source generators).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbMor {
    pub src: FgAb,
    pub tgt: FgAb,
    pub mat: IntMat,
}

fn reduce_rows(mat: &mut IntMat, orders: &[BigInt]) {
    for (i, e) in orders.iter().enumerate() {
        if !e.is_zero() {
            for j in 0..mat.cols() {
                let v = mat[(i, j)].mod_floor(e);
                mat[(i, j)] = v;
            }
        }
    }
}

impl AbMor {
    pub fn new(src: FgAb, tgt: FgAb, mut mat: IntMat) -> Result<AbMor> {
        if mat.rows() != tgt.num_gens() || mat.cols() != src.num_gens() {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, groups need {}x{}",
                mat.rows(),
                mat.cols(),
                tgt.num_gens(),
                src.num_gens()
            )));
        }
        let (eo, dord) = (tgt.orders(), src.orders());
        for (j, d) in dord.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            for (i, e) in eo.iter().enumerate() {
                let v = &mat[(i, j)] * d;
                let ok = if e.is_zero() {
                    v.is_zero()
                } else {
                    (v % e).is_zero()
                };
                if !ok {
                    return Err(Error::Invalid(format!(
                        "column {j} does not respect the order {d}"
                    )));
                }
            }
        }
        reduce_rows(&mut mat, &eo);
        Ok(AbMor { src, tgt, mat })
    }

    pub fn from_rows(src: &FgAb, tgt: &FgAb, rows: &[Vec<i64>]) -> Result<AbMor> {
        let mat = if rows.is_empty() {
            IntMat::zeros(tgt.num_gens(), src.num_gens())
        } else {
            IntMat::from_rows(rows)
        };
        AbMor::new(src.clone(), tgt.clone(), mat)
    }

    pub fn identity(x: &FgAb) -> AbMor {
        AbMor::scalar(x, &BigInt::one())
    }

    pub fn zero(x: &FgAb, y: &FgAb) -> AbMor {
        AbMor {
            src: x.clone(),
            tgt: y.clone(),
            mat: IntMat::zeros(y.num_gens(), x.num_gens()),
        }
    }

    pub fn scalar(x: &FgAb, s: &BigInt) -> AbMor {
        let mut mat = IntMat::identity(x.num_gens()).scale(s);
        reduce_rows(&mut mat, &x.orders());
        AbMor {
            src: x.clone(),
            tgt: x.clone(),
            mat,
        }
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &AbMor) -> Result<AbMor> {
        if f.tgt != self.src {
            return Err(Error::EndpointMismatch(
                "composable homomorphisms needed".into(),
            ));
        }
        let mut mat = self.mat.mul(&f.mat);
        reduce_rows(&mut mat, &self.tgt.orders());
        Ok(AbMor {
            src: f.src.clone(),
            tgt: self.tgt.clone(),
            mat,
        })
    }

    fn combine(&self, other: &AbMor, sign: i64) -> Result<AbMor> {
        if self.src != other.src || self.tgt != other.tgt {
            return Err(Error::EndpointMismatch(
                "parallel homomorphisms needed".into(),
            ));
        }
        let mut mat = self.mat.add(&other.mat.scale(&big(sign)));
        reduce_rows(&mut mat, &self.tgt.orders());
        Ok(AbMor {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            mat,
        })
    }

    pub fn add(&self, other: &AbMor) -> Result<AbMor> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &AbMor) -> Result<AbMor> {
        self.combine(other, -1)
    }

    pub fn scale(&self, s: &BigInt) -> AbMor {
        let mut mat = self.mat.scale(s);
        reduce_rows(&mut mat, &self.tgt.orders());
        AbMor {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            mat,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    pub fn kernel(&self) -> AbInvariants {
        kernel_of_map(&self.mat, &self.src.relations(), &self.tgt.relations())
            .invariants()
            .clone()
    }

    pub fn cokernel(&self) -> AbInvariants {
        cokernel_of_map(&self.mat, &self.tgt.relations()).invariants
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_zero()
    }

    pub fn is_iso(&self) -> bool {
        self.kernel().is_zero() && self.cokernel().is_zero()
    }
}

/// Whether every invariant factor lies in `S` and the group is finite.
pub fn is_s_torsion(inv: &AbInvariants, s: &MultSetZ) -> bool {
    inv.rank == 0 && inv.torsion.iter().all(|d| s.contains(d))
}

/// Invariants of `S⁻¹G`.
pub fn localize_invariants(inv: &AbInvariants, s: &MultSetZ) -> AbInvariants {
    let torsion: Vec<BigInt> = inv
        .torsion
        .iter()
        .map(|d| s.strip(d))
        .filter(|d| !d.is_one())
        .collect();
    AbInvariants {
        rank: inv.rank,
        torsion,
    }
}

/// A diagram over the grid `[n₁] × … × [n_r]` (each `[n]` has `n + 1` points).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagObj {
    pub ring: Ring,
    pub shape: Vec<usize>,
    pub points: Vec<FgAb>,
    /// Transition along `axis` out of point `p`, at index `p * shape.len() + axis`.
    edges: Vec<Option<AbMor>>,
}

/// Mixed-radix indexing of grid points, first axis fastest.
fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = Vec::with_capacity(shape.len());
    let mut acc = 1;
    for &n in shape {
        s.push(acc);
        acc *= n + 1;
    }
    s
}

impl DiagObj {
    pub fn num_points_of(shape: &[usize]) -> usize {
        shape.iter().map(|n| n + 1).product()
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn coords(&self, p: usize) -> Vec<usize> {
        let mut c = Vec::with_capacity(self.shape.len());
        let mut q = p;
        for &n in &self.shape {
            c.push(q % (n + 1));
            q /= n + 1;
        }
        c
    }

    pub fn index(&self, c: &[usize]) -> usize {
        strides(&self.shape).iter().zip(c).map(|(s, x)| s * x).sum()
    }

    /// The point one step along `axis`, if inside the grid.
    pub fn succ(&self, p: usize, axis: usize) -> Option<usize> {
        let c = self.coords(p);
        (c[axis] < self.shape[axis]).then(|| p + strides(&self.shape)[axis])
    }

    /// Builds and validates a diagram; `edges` lists `((point, axis), map)`.
    pub fn new(
        ring: Ring,
        shape: Vec<usize>,
        points: Vec<FgAb>,
        edges: Vec<((usize, usize), AbMor)>,
    ) -> Result<DiagObj> {
        let np = DiagObj::num_points_of(&shape);
        if points.len() != np {
            return Err(Error::ShapeMismatch(format!(
                "{} points given, grid has {np}",
                points.len()
            )));
        }
        if points.iter().any(|g| g.ring != ring) {
            return Err(Error::Invalid(
                "point groups must live over the diagram's ring".into(),
            ));
        }
        let r = shape.len();
        let mut d = DiagObj {
            ring,
            shape,
            points,
            edges: vec![None; np * r],
        };
        for ((p, a), m) in edges {
            if p >= np || a >= r {
                return Err(Error::ShapeMismatch(format!(
                    "edge ({p}, axis {a}) outside the grid"
                )));
            }
            let q = d.succ(p, a).ok_or_else(|| {
                Error::ShapeMismatch(format!("edge ({p}, axis {a}) leaves the grid"))
            })?;
            if m.src != d.points[p] || m.tgt != d.points[q] {
                return Err(Error::EndpointMismatch(format!(
                    "edge ({p}, axis {a}) has wrong endpoints"
                )));
            }
            d.edges[p * r + a] = Some(m);
        }
        for p in 0..np {
            for a in 0..r {
                if d.succ(p, a).is_some() && d.edges[p * r + a].is_none() {
                    return Err(Error::Invalid(format!("missing edge ({p}, axis {a})")));
                }
            }
        }
        for p in 0..np {
            for a in 0..r {
                for b in a + 1..r {
                    let (Some(pa), Some(pb)) = (d.succ(p, a), d.succ(p, b)) else {
                        continue;
                    };
                    let l = d.edge(pa, b).after(d.edge(p, a))?;
                    let rr = d.edge(pb, a).after(d.edge(p, b))?;
                    if l != rr {
                        return Err(Error::Invalid(format!(
                            "square at point {p} (axes {a}, {b}) does not commute"
                        )));
                    }
                }
            }
        }
        Ok(d)
    }

    /// A one-point diagram.
    pub fn point(g: FgAb) -> DiagObj {
        DiagObj {
            ring: g.ring.clone(),
            shape: vec![],
            points: vec![g],
            edges: vec![],
        }
    }

    pub fn edge(&self, p: usize, axis: usize) -> &AbMor {
        self.edges[p * self.shape.len() + axis]
            .as_ref()
            .expect("edge inside the grid")
    }

    pub fn edge_list(&self) -> Vec<((usize, usize), AbMor)> {
        let r = self.shape.len();
        (0..self.edges.len())
            .filter_map(|k| self.edges[k].clone().map(|m| ((k / r, k % r), m)))
            .collect()
    }

    /// The sub-diagram with the last coordinate fixed to `i`.
    pub fn slice_last(&self, i: usize) -> DiagObj {
        let r = self.shape.len();
        let shape = self.shape[..r - 1].to_vec();
        let stride = strides(&self.shape)[r - 1];
        let np = DiagObj::num_points_of(&shape);
        let points = (0..np)
            .map(|p| self.points[p + i * stride].clone())
            .collect();
        let mut edges = vec![None; np * (r - 1)];
        for p in 0..np {
            for a in 0..r - 1 {
                edges[p * (r - 1) + a] = self.edges[(p + i * stride) * r + a].clone();
            }
        }
        DiagObj {
            ring: self.ring.clone(),
            shape,
            points,
            edges,
        }
    }
}

/// A natural transformation between diagrams of the same shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagMor {
    pub src: DiagObj,
    pub tgt: DiagObj,
    pub comps: Vec<AbMor>,
}

impl DiagMor {
    pub fn new(src: DiagObj, tgt: DiagObj, comps: Vec<AbMor>) -> Result<DiagMor> {
        if src.shape != tgt.shape || src.ring != tgt.ring {
            return Err(Error::ShapeMismatch(
                "diagrams of different shapes or rings".into(),
            ));
        }
        if comps.len() != src.num_points() {
            return Err(Error::ShapeMismatch(
                "one component per point needed".into(),
            ));
        }
        for (p, c) in comps.iter().enumerate() {
            if c.src != src.points[p] || c.tgt != tgt.points[p] {
                return Err(Error::EndpointMismatch(format!(
                    "component {p} has wrong endpoints"
                )));
            }
        }
        let f = DiagMor { src, tgt, comps };
        if let Some((p, a)) = f.naturality_failure()? {
            return Err(Error::Invalid(format!(
                "naturality fails at point {p}, axis {a}"
            )));
        }
        Ok(f)
    }

    fn naturality_failure(&self) -> Result<Option<(usize, usize)>> {
        let (x, y) = (&self.src, &self.tgt);
        for p in 0..x.num_points() {
            for a in 0..x.shape.len() {
                if let Some(q) = x.succ(p, a) {
                    let l = y.edge(p, a).after(&self.comps[p])?;
                    let r = self.comps[q].after(x.edge(p, a))?;
                    if l != r {
                        return Ok(Some((p, a)));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn point(f: AbMor) -> DiagMor {
        DiagMor {
            src: DiagObj::point(f.src.clone()),
            tgt: DiagObj::point(f.tgt.clone()),
            comps: vec![f],
        }
    }

    pub fn identity(x: &DiagObj) -> DiagMor {
        DiagMor::scalar(x, &BigInt::one())
    }

    pub fn scalar(x: &DiagObj, s: &BigInt) -> DiagMor {
        DiagMor {
            src: x.clone(),
            tgt: x.clone(),
            comps: x.points.iter().map(|g| AbMor::scalar(g, s)).collect(),
        }
    }

    pub fn zero(x: &DiagObj, y: &DiagObj) -> DiagMor {
        DiagMor {
            src: x.clone(),
            tgt: y.clone(),
            comps: x
                .points
                .iter()
                .zip(&y.points)
                .map(|(a, b)| AbMor::zero(a, b))
                .collect(),
        }
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &DiagMor) -> Result<DiagMor> {
        if f.tgt != self.src {
            return Err(Error::EndpointMismatch(
                "composable diagram morphisms needed".into(),
            ));
        }
        let comps = self
            .comps
            .iter()
            .zip(&f.comps)
            .map(|(g, h)| g.after(h))
            .collect::<Result<_>>()?;
        Ok(DiagMor {
            src: f.src.clone(),
            tgt: self.tgt.clone(),
            comps,
        })
    }

    pub fn add(&self, o: &DiagMor) -> Result<DiagMor> {
        self.zip(o, AbMor::add)
    }

    pub fn sub(&self, o: &DiagMor) -> Result<DiagMor> {
        self.zip(o, AbMor::sub)
    }

    fn zip(&self, o: &DiagMor, op: fn(&AbMor, &AbMor) -> Result<AbMor>) -> Result<DiagMor> {
        if self.src != o.src || self.tgt != o.tgt {
            return Err(Error::EndpointMismatch(
                "parallel diagram morphisms needed".into(),
            ));
        }
        let comps = self
            .comps
            .iter()
            .zip(&o.comps)
            .map(|(a, b)| op(a, b))
            .collect::<Result<_>>()?;
        Ok(DiagMor {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            comps,
        })
    }

    pub fn scale(&self, s: &BigInt) -> DiagMor {
        DiagMor {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            comps: self.comps.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(AbMor::is_zero)
    }

    pub fn is_iso(&self) -> bool {
        self.comps.iter().all(AbMor::is_iso)
    }

    pub fn is_injective(&self) -> bool {
        self.comps.iter().all(AbMor::is_injective)
    }
}

/// Coordinates of all component matrices, point by point, row-major.
#[derive(Clone, Debug)]
struct Layout {
    offs: Vec<usize>,
    /// `(target orders, source orders)` per point.
    orders: Vec<(Vec<BigInt>, Vec<BigInt>)>,
    total: usize,
}

impl Layout {
    fn new(x: &DiagObj, y: &DiagObj) -> Layout {
        let mut offs = Vec::new();
        let mut orders = Vec::new();
        let mut total = 0;
        for p in 0..x.num_points() {
            offs.push(total);
            let (e, d) = (y.points[p].orders(), x.points[p].orders());
            total += e.len() * d.len();
            orders.push((e, d));
        }
        Layout {
            offs,
            orders,
            total,
        }
    }

    fn idx(&self, p: usize, i: usize, j: usize) -> usize {
        self.offs[p] + i * self.orders[p].1.len() + j
    }

    /// Columns generating all valid component matrices, and the relation columns.
    fn entry_lattice(&self) -> (IntMat, IntMat) {
        let mut basis = Vec::new();
        let mut rels = Vec::new();
        for (p, (e, d)) in self.orders.iter().enumerate() {
            for (i, ei) in e.iter().enumerate() {
                for (j, dj) in d.iter().enumerate() {
                    let k = self.idx(p, i, j);
                    let mult = match (ei.is_zero(), dj.is_zero()) {
                        (true, true) | (false, true) => BigInt::one(),
                        (true, false) => continue,
                        (false, false) => ei / ei.gcd(dj),
                    };
                    let mut v = vec![BigInt::zero(); self.total];
                    v[k] = mult;
                    basis.push(v);
                    if !ei.is_zero() {
                        let mut r = vec![BigInt::zero(); self.total];
                        r[k] = ei.clone();
                        rels.push(r);
                    }
                }
            }
        }
        (
            IntMat::from_columns(self.total, &basis),
            IntMat::from_columns(self.total, &rels),
        )
    }

    fn raw(&self, f: &DiagMor) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.total];
        for (p, c) in f.comps.iter().enumerate() {
            for i in 0..c.mat.rows() {
                for j in 0..c.mat.cols() {
                    v[self.idx(p, i, j)] = c.mat[(i, j)].clone();
                }
            }
        }
        v
    }

    fn mor(&self, x: &DiagObj, y: &DiagObj, v: &[BigInt]) -> Result<DiagMor> {
        let mut comps = Vec::with_capacity(x.num_points());
        for p in 0..x.num_points() {
            let (e, d) = (&self.orders[p].0, &self.orders[p].1);
            let mut m = IntMat::zeros(e.len(), d.len());
            for i in 0..e.len() {
                for j in 0..d.len() {
                    m[(i, j)] = v[self.idx(p, i, j)].clone();
                }
            }
            comps.push(AbMor::new(x.points[p].clone(), y.points[p].clone(), m)?);
        }
        DiagMor::new(x.clone(), y.clone(), comps)
    }
}

/// One naturality equation block: rows of `E = Y·a_p − a_q·X` with their moduli.
fn naturality_rows(
    lay: &Layout,
    p: usize,
    q: usize,
    xm: &IntMat,
    ym: &IntMat,
    tgt_orders: &[BigInt],
    rows: &mut Vec<Vec<BigInt>>,
    moduli: &mut Vec<BigInt>,
) {
    let (na_rows, na_cols) = (lay.orders[p].0.len(), lay.orders[p].1.len());
    let nq_cols = lay.orders[q].1.len();
    debug_assert_eq!(ym.cols(), na_rows);
    debug_assert_eq!(xm.cols(), na_cols);
    debug_assert_eq!(xm.rows(), nq_cols);
    for (i, ei) in tgt_orders.iter().enumerate() {
        for j in 0..na_cols {
            let mut row = vec![BigInt::zero(); lay.total];
            for k in 0..na_rows {
                row[lay.idx(p, k, j)] += &ym[(i, k)];
            }
            for l in 0..nq_cols {
                row[lay.idx(q, i, l)] -= &xm[(l, j)];
            }
            rows.push(row);
            moduli.push(ei.clone());
        }
    }
}

fn rows_to_mat(rows: &[Vec<BigInt>], cols: usize) -> IntMat {
    let mut m = IntMat::zeros(rows.len(), cols);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            m[(i, j)] = v.clone();
        }
    }
    m
}

/// `{v : A v ∈ im R}` restricted to the column span of `basis`, as raw columns.
fn solve_lattice(
    a_rows: &[Vec<BigInt>],
    moduli: &[BigInt],
    basis: &IntMat,
    total: usize,
) -> IntMat {
    if basis.cols() == 0 {
        return IntMat::zeros(total, 0);
    }
    if a_rows.is_empty() {
        return basis.clone();
    }
    let a = rows_to_mat(a_rows, total).mul(basis);
    let r = IntMat::diagonal(moduli);
    let k = preimage_lattice(&a, &r);
    if k.cols() == 0 {
        return IntMat::zeros(total, 0);
    }
    let l = basis.mul(&k);
    column_span_basis(&l)
}

/// `Hom(x, y)` as a group with realizing basis morphisms.
#[derive(Clone, Debug)]
pub struct HomGroup {
    pub src: DiagObj,
    pub tgt: DiagObj,
    pub group: FgAb,
    pub basis: Vec<DiagMor>,
    layout: Layout,
    sq: Subquotient,
}

impl HomGroup {
    /// Coordinates of `f` (free coordinates first, torsion reduced).
    pub fn coords(&self, f: &DiagMor) -> Option<Vec<BigInt>> {
        self.sq.coords(&self.layout.raw(f))
    }

    /// The morphism `∑ cₖ·basisₖ`.
    pub fn element(&self, coeffs: &[BigInt]) -> Result<DiagMor> {
        let mut v = vec![BigInt::zero(); self.layout.total];
        for (k, c) in coeffs.iter().enumerate() {
            for (i, g) in self.sq.generator(k).iter().enumerate() {
                v[i] += c * g;
            }
        }
        self.layout.mor(&self.src, &self.tgt, &v)
    }

    /// Deterministic sample: free coordinates in `[-range, range]`, torsion coordinates all values,
    /// truncated to the first `cap` tuples in lexicographic order.
    pub fn sample(&self, range: i64, cap: usize) -> Result<Vec<DiagMor>> {
        let orders = self.group.orders();
        let mut out = Vec::new();
        let mut cur: Vec<BigInt> = Vec::with_capacity(orders.len());
        fn rec(
            h: &HomGroup,
            orders: &[BigInt],
            range: i64,
            cap: usize,
            cur: &mut Vec<BigInt>,
            out: &mut Vec<DiagMor>,
        ) -> Result<()> {
            if out.len() >= cap {
                return Ok(());
            }
            let k = cur.len();
            if k == orders.len() {
                out.push(h.element(cur)?);
                return Ok(());
            }
            let vals: Vec<BigInt> = if orders[k].is_zero() {
                let mut v: Vec<i64> = (-range..=range).collect();
                v.sort_by_key(|x| (x.abs(), *x < 0));
                v.into_iter().map(big).collect()
            } else {
                num_iter(&orders[k])
            };
            for c in vals {
                cur.push(c);
                rec(h, orders, range, cap, cur, out)?;
                cur.pop();
            }
            Ok(())
        }
        rec(self, &orders, range, cap, &mut cur, &mut out)?;
        Ok(out)
    }

    fn raw_basis(&self) -> &IntMat {
        &self.sq.lattice
    }
}

fn num_iter(d: &BigInt) -> Vec<BigInt> {
    let mut v = Vec::new();
    let mut k = BigInt::zero();
    while &k < d {
        v.push(k.clone());
        k += 1;
    }
    v
}

fn check_pair(x: &DiagObj, y: &DiagObj) -> Result<()> {
    if x.shape != y.shape {
        return Err(Error::ShapeMismatch(format!(
            "shapes {:?} and {:?} differ",
            x.shape, y.shape
        )));
    }
    if x.ring != y.ring {
        return Err(Error::ShapeMismatch(format!(
            "rings {} and {} differ",
            x.ring, y.ring
        )));
    }
    Ok(())
}

/// `Hom(x, y)` from the flat system: unknowns are all component entries, one
/// equation block per covering edge.
pub fn hom_group(x: &DiagObj, y: &DiagObj) -> Result<HomGroup> {
    check_pair(x, y)?;
    let lay = Layout::new(x, y);
    let (basis, rels) = lay.entry_lattice();
    let mut rows = Vec::new();
    let mut moduli = Vec::new();
    for p in 0..x.num_points() {
        for a in 0..x.shape.len() {
            if let Some(q) = x.succ(p, a) {
                naturality_rows(
                    &lay,
                    p,
                    q,
                    &x.edge(p, a).mat,
                    &y.edge(p, a).mat,
                    &y.points[q].orders(),
                    &mut rows,
                    &mut moduli,
                );
            }
        }
    }
    let lattice = solve_lattice(&rows, &moduli, &basis, lay.total);
    let sq = Subquotient::new(lattice, &rels);
    let group = FgAb::from_invariants(x.ring.clone(), sq.invariants());
    let mut h = HomGroup {
        src: x.clone(),
        tgt: y.clone(),
        group,
        basis: vec![],
        layout: lay,
        sq,
    };
    let n = h.group.num_gens();
    h.basis = (0..n)
        .map(|k| {
            let mut c = vec![BigInt::zero(); n];
            c[k] = BigInt::one();
            h.element(&c)
        })
        .collect::<Result<_>>()?;
    Ok(h)
}

/// The lattice of natural component families computed by recursion on the last
/// grid factor: `Hom_{C^{[n]}}(x, y) = Ker(⊕ Hom_C(x_i, y_i) → ⊕ Hom_C(x_i, y_{i+1}))`.
/// Columns are raw coordinates in the same layout as [`hom_group`].
pub fn hom_lattice_recursive(x: &DiagObj, y: &DiagObj) -> Result<IntMat> {
    check_pair(x, y)?;
    Ok(rec_lattice(x, y))
}

fn rec_lattice(x: &DiagObj, y: &DiagObj) -> IntMat {
    let lay = Layout::new(x, y);
    let r = x.shape.len();
    if r == 0 {
        return lay.entry_lattice().0;
    }
    let n = x.shape[r - 1];
    let stride = strides(&x.shape)[r - 1];
    let slice_points = DiagObj::num_points_of(&x.shape[..r - 1]);
    // embed each slice lattice into the global layout
    let mut cols: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..=n {
        let (xi, yi) = (x.slice_last(i), y.slice_last(i));
        let li = Layout::new(&xi, &yi);
        let k = rec_lattice(&xi, &yi);
        for c in 0..k.cols() {
            let mut v = vec![BigInt::zero(); lay.total];
            for p in 0..slice_points {
                let g = p + i * stride;
                let (e, d) = (&li.orders[p].0, &li.orders[p].1);
                for a in 0..e.len() {
                    for b in 0..d.len() {
                        v[lay.idx(g, a, b)] = k[(li.idx(p, a, b), c)].clone();
                    }
                }
            }
            cols.push(v);
        }
    }
    let block = IntMat::from_columns(lay.total, &cols);
    if n == 0 {
        return block;
    }
    let mut rows = Vec::new();
    let mut moduli = Vec::new();
    for i in 0..n {
        for p in 0..slice_points {
            let g = p + i * stride;
            let h = g + stride;
            naturality_rows(
                &lay,
                g,
                h,
                &x.edge(g, r - 1).mat,
                &y.edge(g, r - 1).mat,
                &y.points[h].orders(),
                &mut rows,
                &mut moduli,
            );
        }
    }
    solve_lattice(&rows, &moduli, &block, lay.total)
}

/// Both formulations span the same lattice.
pub fn recursive_matches_flat(x: &DiagObj, y: &DiagObj) -> Result<bool> {
    let flat = hom_group(x, y)?;
    let rec = hom_lattice_recursive(x, y)?;
    let a = flat.raw_basis();
    if a.cols() != rec.cols() {
        return Ok(false);
    }
    let inside = |m: &IntMat, basis: &IntMat| {
        (0..m.cols()).all(|j| basis.cols() > 0 && solve(basis, &m.col(j)).is_some())
    };
    Ok(a.cols() == 0 || (inside(&rec, a) && inside(a, &rec)))
}

/// Localization of a single group: kept generator indices and new orders.
fn localize_group(g: &FgAb, s: &MultSetZ) -> (FgAb, Vec<usize>) {
    let mut kept: Vec<usize> = (0..g.rank).collect();
    let mut torsion = Vec::new();
    for (k, d) in g.torsion.iter().enumerate() {
        let d2 = s.strip(d);
        if !d2.is_one() {
            kept.push(g.rank + k);
            torsion.push(d2);
        }
    }
    (
        FgAb {
            ring: s.ring(),
            rank: g.rank,
            torsion,
        },
        kept,
    )
}

pub fn localize_ab(f: &AbMor, s: &MultSetZ) -> AbMor {
    let (src, kc) = localize_group(&f.src, s);
    let (tgt, kr) = localize_group(&f.tgt, s);
    let mut m = IntMat::zeros(kr.len(), kc.len());
    for (i, &r) in kr.iter().enumerate() {
        for (j, &c) in kc.iter().enumerate() {
            m[(i, j)] = f.mat[(r, c)].clone();
        }
    }
    reduce_rows(&mut m, &tgt.orders());
    AbMor { src, tgt, mat: m }
}

/// `L(x)`: each point loses its `S`-torsion; transitions restricted to surviving generators.
pub fn localize_diagram(x: &DiagObj, s: &MultSetZ) -> Result<DiagObj> {
    if x.ring != Ring::Z {
        return Err(Error::Invalid(
            "only integral diagrams are localized".into(),
        ));
    }
    let points = x.points.iter().map(|g| localize_group(g, s).0).collect();
    let edges = x
        .edge_list()
        .into_iter()
        .map(|(k, m)| (k, localize_ab(&m, s)))
        .collect();
    DiagObj::new(s.ring(), x.shape.clone(), points, edges)
}

pub fn localize_mor(f: &DiagMor, s: &MultSetZ) -> Result<DiagMor> {
    let comps = f.comps.iter().map(|c| localize_ab(c, s)).collect();
    DiagMor::new(
        localize_diagram(&f.src, s)?,
        localize_diagram(&f.tgt, s)?,
        comps,
    )
}

/// Whether the map `φ` between presented groups becomes an isomorphism after inverting `S`.
fn localizes_to_iso(
    a: &IntMat,
    src: &FgAb,
    tgt: &FgAb,
    s: &MultSetZ,
) -> (AbInvariants, AbInvariants, bool) {
    let k = kernel_of_map(a, &src.relations(), &tgt.relations())
        .invariants()
        .clone();
    let c = cokernel_of_map(a, &tgt.relations()).invariants;
    let ok = is_s_torsion(&k, s) && is_s_torsion(&c, s);
    (k, c, ok)
}

/// Compares `S⁻¹ Hom(x, y)` with `Hom(L x, L y)` and checks that `f ↦ L(f)` localizes to an isomorphism.
pub fn localized_hom_check(x: &DiagObj, y: &DiagObj, s: &MultSetZ) -> Result<Verdict> {
    let h = hom_group(x, y)?;
    let (lx, ly) = (localize_diagram(x, s)?, localize_diagram(y, s)?);
    let hl = hom_group(&lx, &ly)?;
    let lhs = localize_invariants(&h.group.invariants(), s);
    let rhs = hl.group.invariants();
    let inv = Verdict::from_bool(
        "invariants agree",
        lhs == rhs,
        Instance::new()
            .text("localized Hom", lhs.to_string())
            .text("Hom of localized", rhs.to_string()),
    );
    let mut cols = Vec::with_capacity(h.basis.len());
    for b in &h.basis {
        let lb = localize_mor(b, s)?;
        cols.push(
            hl.coords(&lb)
                .ok_or_else(|| Error::Internal("localized basis element is not natural".into()))?,
        );
    }
    let a = IntMat::from_columns(hl.group.num_gens(), &cols);
    let (k, c, ok) = localizes_to_iso(&a, &h.group, &hl.group, s);
    let cmp = Verdict::from_bool(
        "comparison map",
        ok,
        Instance::new()
            .text("kernel", k.to_string())
            .text("cokernel", c.to_string()),
    );
    Ok(Verdict::all("localized hom", vec![inv, cmp])
        .with_note(format!("Hom(x, y) = {}", h.group))
        .with_note(format!("Hom(Lx, Ly) = {}", hl.group)))
}

/// The equations `f g t = s t · id_y` and `g f u = s u · id_x`.
#[derive(Clone, Debug)]
pub struct WeqWitness {
    pub g: DiagMor,
    pub s: BigInt,
    pub t: BigInt,
    pub u: BigInt,
}

/// Replays a witness by direct matrix arithmetic.
pub fn witness_replay(f: &DiagMor, w: &WeqWitness) -> Result<bool> {
    let (x, y) = (&f.src, &f.tgt);
    let fg = f.after(&w.g)?.scale(&w.t);
    let gf = w.g.after(f)?.scale(&w.u);
    Ok(fg == DiagMor::scalar(y, &(&w.s * &w.t)) && gf == DiagMor::scalar(x, &(&w.s * &w.u)))
}

/// Default exponent bound `B` for witness scalars (divisors of `n^B`).
pub const WITNESS_BOUND: u32 = 4;

/// Searches `g` with `f g = s·id_y` and then the least `u` with `u(g f − s·id_x) = 0`, scalars among divisors of `n^B`.
pub fn weq_witness(f: &DiagMor, s: &MultSetZ, bound: u32) -> Result<Option<WeqWitness>> {
    let (x, y) = (&f.src, &f.tgt);
    let hyx = hom_group(y, x)?;
    let lay_yy = Layout::new(y, y);
    let (_, rels_yy) = lay_yy.entry_lattice();
    let mut cols = Vec::with_capacity(hyx.basis.len() + rels_yy.cols());
    for b in &hyx.basis {
        cols.push(lay_yy.raw(&f.after(b)?));
    }
    for j in 0..rels_yy.cols() {
        cols.push(rels_yy.col(j));
    }
    let phi = IntMat::from_columns(lay_yy.total, &cols);
    let id_raw = lay_yy.raw(&DiagMor::identity(y));
    let divs = s.divisors_of_power(bound);
    for sc in &divs {
        let rhs: Vec<BigInt> = id_raw.iter().map(|v| v * sc).collect();
        let sol = if phi.cols() == 0 {
            rhs.iter().all(Zero::is_zero).then(Vec::new)
        } else {
            solve(&phi, &rhs)
        };
        let Some(c) = sol else { continue };
        let g = hyx.element(&c[..hyx.basis.len()])?;
        let defect = g.after(f)?.sub(&DiagMor::scalar(x, sc))?;
        let Some(u) = divs.iter().find(|u| defect.scale(u).is_zero()) else {
            continue;
        };
        return Ok(Some(WeqWitness {
            g,
            s: sc.clone(),
            t: BigInt::one(),
            u: u.clone(),
        }));
    }
    Ok(None)
}

/// The torsion criterion: every component has `S`-torsion kernel and cokernel.
pub fn is_weq(f: &DiagMor, s: &MultSetZ) -> bool {
    f.comps
        .iter()
        .all(|c| is_s_torsion(&c.kernel(), s) && is_s_torsion(&c.cokernel(), s))
}

/// Decides `f ∈ Isom_S` by the torsion criterion and, when it holds, attaches a witness.
pub fn is_weak_equivalence(f: &DiagMor, s: &MultSetZ) -> Result<Verdict> {
    if !is_weq(f, s) {
        let bad = f
            .comps
            .iter()
            .position(|c| !(is_s_torsion(&c.kernel(), s) && is_s_torsion(&c.cokernel(), s)))
            .unwrap();
        let c = &f.comps[bad];
        return Ok(Verdict::fails(
            "weak equivalence",
            Instance::new()
                .int("point", bad as i64)
                .text("kernel", c.kernel().to_string())
                .text("cokernel", c.cokernel().to_string()),
        ));
    }
    let mut v = Verdict::holds("weak equivalence");
    match weq_witness(f, s, WITNESS_BOUND)? {
        Some(w) => {
            v.witness.push(
                Instance::new()
                    .text("g", render_mor(&w.g))
                    .text("s", w.s.to_string())
                    .text("t", w.t.to_string())
                    .text("u", w.u.to_string()),
            );
        }
        None => v.notes.push(format!(
            "no witness with scalars dividing n^{WITNESS_BOUND}"
        )),
    }
    Ok(v)
}

/// Compact text form of a morphism: component matrices separated by `|`.
pub fn render_mor(f: &DiagMor) -> String {
    f.comps
        .iter()
        .map(|c| {
            if c.mat.rows() == 0 || c.mat.cols() == 0 {
                "0".to_string()
            } else {
                (0..c.mat.rows())
                    .map(|i| {
                        c.mat
                            .row(i)
                            .iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect::<Vec<_>>()
                    .join("; ")
            }
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Least `s > 0` with `s·d = 0`, if any.
fn annihilator(d: &DiagMor) -> Option<BigInt> {
    let mut s = BigInt::one();
    for c in &d.comps {
        let e = c.tgt.orders();
        for i in 0..c.mat.rows() {
            for j in 0..c.mat.cols() {
                let v = &c.mat[(i, j)];
                if v.is_zero() {
                    continue;
                }
                if e[i].is_zero() {
                    return None;
                }
                let need = &e[i] / e[i].gcd(v);
                s = s.lcm(&need);
            }
        }
    }
    Some(s)
}

/// Decides `L(f) = L(g)` by the annihilator witness and by the order of `f − g` in `Hom(x, y)`.
pub fn l_equal(f: &DiagMor, g: &DiagMor, s: &MultSetZ) -> Result<Verdict> {
    if f.src != g.src || f.tgt != g.tgt {
        return Err(Error::EndpointMismatch(
            "l_equal needs parallel morphisms".into(),
        ));
    }
    let d = f.sub(g)?;
    let ann = annihilator(&d);
    let witness_ok = ann.as_ref().is_some_and(|a| s.contains(a));
    let mut wv = Verdict::from_bool("annihilated by S", witness_ok, Instance::new());
    if let Some(a) = ann.as_ref().filter(|_| witness_ok) {
        wv.witness.push(Instance::new().text("s", a.to_string()));
    }
    let h = hom_group(&f.src, &f.tgt)?;
    let c = h
        .coords(&d)
        .ok_or_else(|| Error::Internal("difference is not natural".into()))?;
    let orders = h.group.orders();
    let mut order = Some(BigInt::one());
    for (ck, dk) in c.iter().zip(&orders) {
        if ck.is_zero() {
            continue;
        }
        if dk.is_zero() {
            order = None;
            break;
        }
        let o = dk / dk.gcd(ck);
        order = order.map(|x| x.lcm(&o));
    }
    let inv_ok = order.as_ref().is_some_and(|o| s.contains(o));
    let iv = Verdict::from_bool("localized difference vanishes", inv_ok, Instance::new());
    let mut v = Verdict::all("l-equal", vec![wv, iv]);
    if witness_ok != inv_ok {
        v.notes
            .push("witness and invariant computations disagree".into());
    }
    if let Some(a) = ann.filter(|_| witness_ok) {
        v.witness.push(Instance::new().text("s", a.to_string()));
    }
    Ok(v)
}

/// For `f: x → y` in `w` and `g: z → y`: `h: z → x` and `s ∈ S` with `s·g = f∘h`.
pub fn ore_fill(f: &DiagMor, g: &DiagMor, s: &MultSetZ) -> Result<(DiagMor, BigInt)> {
    if f.tgt != g.tgt {
        return Err(Error::EndpointMismatch(
            "ore_fill needs a common target".into(),
        ));
    }
    if !is_weq(f, s) {
        return Err(Error::NotWeakEquivalence);
    }
    let w = weq_witness(f, s, WITNESS_BOUND)?.ok_or_else(|| {
        Error::Missing(format!("witness with scalars dividing n^{WITNESS_BOUND}"))
    })?;
    let h = w.g.after(g)?.scale(&w.t);
    let sc = &w.s * &w.t;
    if g.scale(&sc) != f.after(&h)? {
        return Err(Error::Internal("Ore filler equation fails".into()));
    }
    Ok((h, sc))
}

/// A span `x ← z → y` with denominator `t ∈ w`, rewritten as `f / (s·id_x)`.
pub fn fraction_normalize(t: &DiagMor, f: &DiagMor, s: &MultSetZ) -> Result<(DiagMor, BigInt)> {
    if t.src != f.src {
        return Err(Error::EndpointMismatch(
            "span legs need a common source".into(),
        ));
    }
    if !is_weq(t, s) {
        return Err(Error::NotWeakEquivalence);
    }
    let w = weq_witness(t, s, WITNESS_BOUND)?.ok_or_else(|| {
        Error::Missing(format!("witness with scalars dividing n^{WITNESS_BOUND}"))
    })?;
    // t∘g = s·id, so (t, f) refines along g to (s·id, f∘g)
    if t.after(&w.g)? != DiagMor::scalar(&t.tgt, &w.s) {
        return Err(Error::Internal(
            "normalizing witness is not a right inverse up to s".into(),
        ));
    }
    Ok((f.after(&w.g)?, w.s))
}

/// Equality of two fractions `f₁/t₁` and `f₂/t₂` (same endpoints) in `w⁻¹C`.
pub fn fractions_equal(
    sp1: (&DiagMor, &DiagMor),
    sp2: (&DiagMor, &DiagMor),
    s: &MultSetZ,
) -> Result<bool> {
    let (a, s1) = fraction_normalize(sp1.0, sp1.1, s)?;
    let (b, s2) = fraction_normalize(sp2.0, sp2.1, s)?;
    Ok(l_equal(&a.scale(&s2), &b.scale(&s1), s)?.is_holds())
}

/// A chain `x_0 → … → x_n` of `J`-diagrams as a diagram over `[n] × J` (chain axis first).
pub fn stack_chain(objs: &[DiagObj], links: &[DiagMor]) -> Result<DiagObj> {
    if objs.is_empty() || links.len() + 1 != objs.len() {
        return Err(Error::ShapeMismatch(
            "a chain needs one more object than links".into(),
        ));
    }
    for (k, l) in links.iter().enumerate() {
        if l.src != objs[k] || l.tgt != objs[k + 1] {
            return Err(Error::EndpointMismatch(format!(
                "link {k} has wrong endpoints"
            )));
        }
    }
    let n = links.len();
    let inner = &objs[0].shape;
    let mut shape = vec![n];
    shape.extend(inner.iter().copied());
    let np_in = objs[0].num_points();
    let mut points = Vec::with_capacity((n + 1) * np_in);
    for pj in 0..np_in {
        for o in objs {
            points.push(o.points[pj].clone());
        }
    }
    let idx = |k: usize, pj: usize| k + (n + 1) * pj;
    let r = inner.len();
    let mut edges = Vec::new();
    for pj in 0..np_in {
        for k in 0..=n {
            if k < n {
                edges.push(((idx(k, pj), 0), links[k].comps[pj].clone()));
            }
            for a in 0..r {
                if objs[k].succ(pj, a).is_some() {
                    edges.push(((idx(k, pj), a + 1), objs[k].edge(pj, a).clone()));
                }
            }
        }
    }
    DiagObj::new(objs[0].ring.clone(), shape, points, edges)
}

/// A ladder between stacked chains.
pub fn stack_ladder(src: &DiagObj, tgt: &DiagObj, comps: &[DiagMor]) -> Result<DiagMor> {
    let n1 = comps.len();
    if src.shape.first() != Some(&(n1 - 1)) {
        return Err(Error::ShapeMismatch(
            "ladder length does not match the chain".into(),
        ));
    }
    let np_in = comps[0].comps.len();
    let mut out = Vec::with_capacity(n1 * np_in);
    for pj in 0..np_in {
        for c in comps {
            out.push(c.comps[pj].clone());
        }
    }
    DiagMor::new(src.clone(), tgt.clone(), out)
}

fn random_entry(rng: &mut impl Rng, e: &BigInt, d: &BigInt, range: i64) -> BigInt {
    match (e.is_zero(), d.is_zero()) {
        (true, true) => big(rng.random_range(-range..=range)),
        (true, false) => BigInt::zero(),
        (false, true) => big(rng.random_range(0..e.to_string().parse::<i64>().unwrap_or(2))),
        (false, false) => {
            let m = e / e.gcd(d);
            let k = (e / &m).to_string().parse::<i64>().unwrap_or(1);
            &m * big(rng.random_range(0..k))
        }
    }
}

/// A random homomorphism; roughly one in four is zero.
pub fn random_ab(rng: &mut impl Rng, x: &FgAb, y: &FgAb, range: i64) -> AbMor {
    let (e, d) = (y.orders(), x.orders());
    let mut m = IntMat::zeros(e.len(), d.len());
    if rng.random_range(0..4) != 0 {
        for i in 0..e.len() {
            for j in 0..d.len() {
                m[(i, j)] = random_entry(rng, &e[i], &d[j], range);
            }
        }
    }
    AbMor::new(x.clone(), y.clone(), m).expect("entries respect orders")
}

/// The groups `Z^a ⊕ Z/d` with `a ≤ 2` and `d ∈ {2, 3, 4, 6}`.
pub fn random_small_group(rng: &mut impl Rng) -> FgAb {
    let d = [2i64, 3, 4, 6][rng.random_range(0..4)];
    FgAb::of(rng.random_range(0..=2), &[d]).expect("valid group")
}

/// Solves `b ∘ a = c` for `b: y → z` (given `a: x → y`, `c: x → z`), adding a random kernel element.
fn solve_left_factor(
    rng: &mut impl Rng,
    a: &AbMor,
    c: &AbMor,
    z: &FgAb,
    range: i64,
) -> Option<AbMor> {
    let y = &a.tgt;
    let (e, d) = (z.orders(), y.orders());
    // unknown b entries (i, k), parametrized by multipliers
    let mut unknowns: Vec<(usize, usize, BigInt)> = Vec::new();
    for (i, ei) in e.iter().enumerate() {
        for (k, dk) in d.iter().enumerate() {
            let mult = match (ei.is_zero(), dk.is_zero()) {
                (true, false) => continue,
                (false, false) => ei / ei.gcd(dk),
                _ => BigInt::one(),
            };
            unknowns.push((i, k, mult));
        }
    }
    let nx = a.src.num_gens();
    let neq = e.len() * nx;
    let mut cols: Vec<Vec<BigInt>> = Vec::new();
    for (i, k, mult) in &unknowns {
        let mut v = vec![BigInt::zero(); neq];
        for j in 0..nx {
            v[i * nx + j] = &a.mat[(*k, j)] * mult;
        }
        cols.push(v);
    }
    for (i, ei) in e.iter().enumerate() {
        if ei.is_zero() {
            continue;
        }
        for j in 0..nx {
            let mut v = vec![BigInt::zero(); neq];
            v[i * nx + j] = ei.clone();
            cols.push(v);
        }
    }
    let rhs: Vec<BigInt> = (0..neq).map(|q| c.mat[(q / nx, q % nx)].clone()).collect();
    let mut b = IntMat::zeros(e.len(), d.len());
    if !cols.is_empty() {
        let m = IntMat::from_columns(neq, &cols);
        let sol = solve(&m, &rhs)?;
        for (u, (i, k, mult)) in unknowns.iter().enumerate() {
            b[(*i, *k)] = &sol[u] * mult;
        }
    } else if rhs.iter().any(|v| !v.is_zero()) {
        return None;
    }
    let base = AbMor::new(y.clone(), z.clone(), b).ok()?;
    // perturb by a random element of {b' : b'∘a = 0} found by rejection
    for _ in 0..4 {
        let p = random_ab(rng, y, z, range);
        if p.after(a).ok()?.is_zero() {
            return base.add(&p).ok();
        }
    }
    Some(base)
}

/// A random diagram over `[1]` or `[1] × [1]` with points `Z^a ⊕ Z/d`.
pub fn random_diagram(rng: &mut impl Rng, shape: &[usize]) -> Result<DiagObj> {
    let np = DiagObj::num_points_of(shape);
    let points: Vec<FgAb> = (0..np).map(|_| random_small_group(rng)).collect();
    match shape {
        [] => Ok(DiagObj::point(points[0].clone())),
        [1] => {
            let m = random_ab(rng, &points[0], &points[1], 2);
            DiagObj::new(Ring::Z, shape.to_vec(), points, vec![((0, 0), m)])
        }
        [1, 1] => {
            // points 0=(0,0) 1=(1,0) 2=(0,1) 3=(1,1)
            for _ in 0..16 {
                let a0 = random_ab(rng, &points[0], &points[1], 2);
                let b0 = random_ab(rng, &points[0], &points[2], 2);
                let a1 = random_ab(rng, &points[2], &points[3], 2);
                let target = a1.after(&b0)?;
                if let Some(b1) = solve_left_factor(rng, &a0, &target, &points[3], 2) {
                    return DiagObj::new(
                        Ring::Z,
                        shape.to_vec(),
                        points.clone(),
                        vec![((0, 0), a0), ((2, 0), a1), ((0, 1), b0), ((1, 1), b1)],
                    );
                }
            }
            let z = |i: usize, j: usize| AbMor::zero(&points[i], &points[j]);
            DiagObj::new(
                Ring::Z,
                shape.to_vec(),
                points.clone(),
                vec![
                    ((0, 0), z(0, 1)),
                    ((2, 0), z(2, 3)),
                    ((0, 1), z(0, 2)),
                    ((1, 1), z(1, 3)),
                ],
            )
        }
        _ => Err(Error::ShapeMismatch(
            "random diagrams cover [1] and [1]x[1]".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> FgAb {
        FgAb::free(1)
    }

    fn chain(g0: FgAb, g1: FgAb, m: &[Vec<i64>]) -> DiagObj {
        let e = AbMor::from_rows(&g0, &g1, m).unwrap();
        DiagObj::new(Ring::Z, vec![1], vec![g0, g1], vec![((0, 0), e)]).unwrap()
    }

    #[test]
    fn multset_membership() {
        let s = MultSetZ::new(&[2]).unwrap();
        assert!(s.contains(&big(8)));
        assert!(s.contains(&big(-4)));
        assert!(!s.contains(&big(6)));
        assert_eq!(s.strip(&big(12)), big(3));
        assert_eq!(
            MultSetZ::new(&[6]).unwrap().divisors_of_power(1),
            vec![big(1), big(2), big(3), big(6)]
        );
    }

    #[test]
    fn hom_of_doubling_chain_is_z() {
        let x = chain(z(), z(), &[vec![2]]);
        let h = hom_group(&x, &x).unwrap();
        assert_eq!(h.group.invariants(), AbInvariants::free(1));
        assert!(recursive_matches_flat(&x, &x).unwrap());
    }

    #[test]
    fn hom_z2_into_z4_chain_is_z2() {
        let z2 = FgAb::of(0, &[2]).unwrap();
        let z4 = FgAb::of(0, &[4]).unwrap();
        let x = chain(z2.clone(), z2, &[vec![1]]);
        let y = chain(z4.clone(), z4, &[vec![1]]);
        let h = hom_group(&x, &y).unwrap();
        assert_eq!(h.group.to_string(), "Z/2");
        assert!(recursive_matches_flat(&x, &y).unwrap());
    }

    #[test]
    fn localization_drops_torsion() {
        let s = MultSetZ::new(&[2]).unwrap();
        let x = DiagObj::point(FgAb::of(0, &[6]).unwrap());
        let l = localize_diagram(&x, &s).unwrap();
        assert_eq!(l.points[0].torsion, vec![big(3)]);
        let y = DiagObj::point(FgAb::of(0, &[2]).unwrap());
        assert!(localize_diagram(&y, &s).unwrap().points[0].is_zero());
    }

    #[test]
    fn times_three_witness() {
        let s = MultSetZ::new(&[3]).unwrap();
        let f = DiagMor::point(AbMor::from_rows(&z(), &z(), &[vec![3]]).unwrap());
        let w = weq_witness(&f, &s, WITNESS_BOUND).unwrap().unwrap();
        assert_eq!(w.s, big(3));
        assert_eq!(w.u, big(1));
        assert!(witness_replay(&f, &w).unwrap());
        let s2 = MultSetZ::new(&[2]).unwrap();
        assert!(!is_weq(&f, &s2));
    }

    #[test]
    fn l_equal_torsion_difference() {
        let s = MultSetZ::new(&[2]).unwrap();
        let z2 = FgAb::of(0, &[2]).unwrap();
        let f = DiagMor::point(AbMor::from_rows(&z(), &z2, &[vec![1]]).unwrap());
        let g = DiagMor::point(AbMor::zero(&z(), &z2));
        let v = l_equal(&f, &g, &s).unwrap();
        assert!(v.is_holds());
        let one = DiagMor::point(AbMor::identity(&z()));
        let zero = DiagMor::point(AbMor::zero(&z(), &z()));
        assert!(l_equal(&one, &zero, &s).unwrap().is_fails());
    }

    #[test]
    fn ore_fill_and_normalize() {
        let s = MultSetZ::new(&[3]).unwrap();
        let f9 = DiagMor::point(AbMor::from_rows(&z(), &z(), &[vec![9]]).unwrap());
        let g3 = DiagMor::point(AbMor::from_rows(&z(), &z(), &[vec![3]]).unwrap());
        let (h, sc) = ore_fill(&f9, &g3, &s).unwrap();
        assert_eq!(g3.scale(&sc), f9.after(&h).unwrap());
        let t = DiagMor::point(AbMor::from_rows(&z(), &z(), &[vec![3]]).unwrap());
        let id = DiagMor::identity(&t.src);
        let (f, sc) = fraction_normalize(&t, &id, &s).unwrap();
        assert_eq!(sc, big(3));
        assert_eq!(f, id);
    }

    #[test]
    fn localized_hom_doubling_chain() {
        let x = chain(z(), z(), &[vec![2]]);
        let s = MultSetZ::new(&[3]).unwrap();
        let v = localized_hom_check(&x, &x, &s).unwrap();
        assert!(v.is_holds(), "{v:?}");
    }
}
