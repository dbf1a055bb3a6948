//! Exact integer linear algebra.
//!
//! Dense matrices over arbitrary precision integers, Smith normal form with
//! unimodular transforms, integer kernels and solving, and finitely generated
//! abelian groups given by generators and relations.
//!
//! Elimination first runs in checked `i64`; on overflow the whole computation
//! is redone over `BigInt`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers; all rows must share a length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
            }
        }
        m
    }

    pub fn from_big_rows(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols);
        IntMat { rows, cols, data }
    }

    /// Column matrix from a vector.
    pub fn column(v: &[BigInt]) -> Self {
        IntMat {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(d: &[BigInt]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = BigInt::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        s += &self[(i, j)] * x;
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &BigInt) -> IntMat {
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows);
        let mut m = IntMat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// `[self ; other]`.
    pub fn vcat(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block diagonal sum.
    pub fn block_diag(&self, other: &IntMat) -> IntMat {
        let mut m = IntMat::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMat {
        let mut m = IntMat::zeros(idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m[(r, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMat {
        let mut m = IntMat::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (c, &j) in idx.iter().enumerate() {
                m[(i, c)] = self[(i, j)].clone();
            }
        }
        m
    }

    fn to_small(&self) -> Option<Mat<i64>> {
        let mut data = Vec::with_capacity(self.data.len());
        for x in &self.data {
            data.push(x.to_i64()?);
        }
        Some(Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    fn to_generic(&self) -> Mat<BigInt> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
    }
}

trait Scalar: Clone + PartialEq + fmt::Debug {
    fn s_zero() -> Self;
    fn s_one() -> Self;
    fn s_is_zero(&self) -> bool;
    fn s_is_negative(&self) -> bool;
    fn s_abs_lt(&self, other: &Self) -> bool;
    fn s_neg(&self) -> Option<Self>;
    fn s_sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn s_quot(&self, b: &Self) -> Self;
    fn s_divides(&self, b: &Self) -> bool;
    fn s_to_big(&self) -> BigInt;
}

impl Scalar for i64 {
    fn s_zero() -> Self {
        0
    }
    fn s_one() -> Self {
        1
    }
    fn s_is_zero(&self) -> bool {
        *self == 0
    }
    fn s_is_negative(&self) -> bool {
        *self < 0
    }
    fn s_abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn s_neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn s_sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn s_quot(&self, b: &Self) -> Self {
        self / b
    }
    fn s_divides(&self, b: &Self) -> bool {
        b % self == 0
    }
    fn s_to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn s_zero() -> Self {
        Zero::zero()
    }
    fn s_one() -> Self {
        One::one()
    }
    fn s_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn s_is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn s_abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn s_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn s_sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn s_quot(&self, b: &Self) -> Self {
        self / b
    }
    fn s_divides(&self, b: &Self) -> bool {
        (b % self).s_is_zero()
    }
    fn s_to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Clone, Debug)]
struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    fn identity(n: usize) -> Self {
        let mut data = vec![T::s_zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::s_one();
        }
        Mat {
            rows: n,
            cols: n,
            data,
        }
    }
    fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
    /// row_i -= q * row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &T) -> Option<()> {
        for j in 0..self.cols {
            let b = self.data[t * self.cols + j].clone();
            if !b.s_is_zero() {
                let a = &self.data[i * self.cols + j];
                self.data[i * self.cols + j] = a.s_sub_mul(q, &b)?;
            }
        }
        Some(())
    }
    /// col_j -= q * col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &T) -> Option<()> {
        for i in 0..self.rows {
            let b = self.data[i * self.cols + t].clone();
            if !b.s_is_zero() {
                let a = &self.data[i * self.cols + j];
                self.data[i * self.cols + j] = a.s_sub_mul(q, &b)?;
            }
        }
        Some(())
    }
    fn neg_row(&mut self, i: usize) -> Option<()> {
        for j in 0..self.cols {
            let v = self.data[i * self.cols + j].s_neg()?;
            self.data[i * self.cols + j] = v;
        }
        Some(())
    }
    fn neg_col(&mut self, j: usize) -> Option<()> {
        for i in 0..self.rows {
            let v = self.data[i * self.cols + j].s_neg()?;
            self.data[i * self.cols + j] = v;
        }
        Some(())
    }
    fn s_to_big(&self) -> IntMat {
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.s_to_big()).collect(),
        }
    }
}

struct Transforms<T> {
    u: Mat<T>,
    u_inv: Mat<T>,
    v: Mat<T>,
    v_inv: Mat<T>,
}

struct Elim<T> {
    a: Mat<T>,
    tr: Option<Transforms<T>>,
}

impl<T: Scalar> Elim<T> {
    fn swap_rows(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        if let Some(t) = &mut self.tr {
            t.u.swap_rows(x, y);
            t.u_inv.swap_cols(x, y);
        }
    }
    fn swap_cols(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        if let Some(t) = &mut self.tr {
            t.v.swap_cols(x, y);
            t.v_inv.swap_rows(x, y);
        }
    }
    fn row_sub(&mut self, i: usize, p: usize, q: &T) -> Option<()> {
        self.a.row_sub(i, p, q)?;
        if let Some(t) = &mut self.tr {
            t.u.row_sub(i, p, q)?;
            let mq = q.s_neg()?;
            t.u_inv.col_sub(p, i, &mq)?;
        }
        Some(())
    }
    fn col_sub(&mut self, j: usize, p: usize, q: &T) -> Option<()> {
        self.a.col_sub(j, p, q)?;
        if let Some(t) = &mut self.tr {
            t.v.col_sub(j, p, q)?;
            let mq = q.s_neg()?;
            t.v_inv.row_sub(p, j, &mq)?;
        }
        Some(())
    }
    fn neg_row(&mut self, i: usize) -> Option<()> {
        self.a.neg_row(i)?;
        if let Some(t) = &mut self.tr {
            t.u.neg_row(i)?;
            t.u_inv.neg_col(i)?;
        }
        Some(())
    }
}

struct SnfRaw<T> {
    d: Mat<T>,
    rank: usize,
    tr: Option<Transforms<T>>,
}

fn snf_generic<T: Scalar>(a: Mat<T>, transforms: bool) -> Option<SnfRaw<T>> {
    let (m, n) = (a.rows, a.cols);
    let tr = transforms.then(|| Transforms {
        u: Mat::identity(m),
        u_inv: Mat::identity(m),
        v: Mat::identity(n),
        v_inv: Mat::identity(n),
    });
    let mut e = Elim { a, tr };
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = min_abs_in(&e.a, t, t..m, t..n) else {
            break;
        };
        e.swap_rows(t, pi);
        e.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !e.a.at(i, t).s_is_zero() {
                    let q = e.a.at(i, t).s_quot(e.a.at(t, t));
                    e.row_sub(i, t, &q)?;
                    if !e.a.at(i, t).s_is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !e.a.at(t, j).s_is_zero() {
                    let q = e.a.at(t, j).s_quot(e.a.at(t, t));
                    e.col_sub(j, t, &q)?;
                    if !e.a.at(t, j).s_is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                let mut best = (t, t);
                for i in t + 1..m {
                    let x = e.a.at(i, t);
                    if !x.s_is_zero() && x.s_abs_lt(e.a.at(best.0, best.1)) {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    let x = e.a.at(t, j);
                    if !x.s_is_zero() && x.s_abs_lt(e.a.at(best.0, best.1)) {
                        best = (t, j);
                    }
                }
                e.swap_rows(t, best.0);
                e.swap_cols(t, best.1);
                continue;
            }
            let mut bad = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !e.a.at(t, t).s_divides(e.a.at(i, j)) {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    // row_t += row_i
                    let minus_one = T::s_one().s_neg()?;
                    e.row_sub(t, i, &minus_one)?;
                }
                None => break,
            }
        }
        if e.a.at(t, t).s_is_negative() {
            e.neg_row(t)?;
        }
        t += 1;
    }
    Some(SnfRaw {
        d: e.a,
        rank: t,
        tr: e.tr,
    })
}

fn min_abs_in<T: Scalar>(
    a: &Mat<T>,
    _t: usize,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = a.at(i, j);
            if x.s_is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if !x.s_abs_lt(a.at(bi, bj)) => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form `D = U·A·V` with `A = U⁻¹·D·V⁻¹`.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Nonzero diagonal entries `d₁ | d₂ | …`, all positive.
    pub diag: Vec<BigInt>,
    pub rank: usize,
    pub u: IntMat,
    pub u_inv: IntMat,
    pub v: IntMat,
    pub v_inv: IntMat,
}

impl Snf {
    pub fn rows(&self) -> usize {
        self.u.rows()
    }

    pub fn cols(&self) -> usize {
        self.v.rows()
    }

    /// The diagonal matrix `D` with the shape of the input.
    pub fn d_matrix(&self) -> IntMat {
        let mut d = IntMat::zeros(self.rows(), self.cols());
        for (i, x) in self.diag.iter().enumerate() {
            d[(i, i)] = x.clone();
        }
        d
    }

    /// Checks `A = U⁻¹·D·V⁻¹`, `U·U⁻¹ = 1`, `V·V⁻¹ = 1` and the divisibility chain.
    pub fn verify(&self, a: &IntMat) -> bool {
        let chain = self.diag.windows(2).all(|w| (&w[1] % &w[0]).s_is_zero())
            && self.diag.iter().all(|x| x.is_positive());
        chain
            && self.u_inv.mul(&self.d_matrix()).mul(&self.v_inv) == *a
            && self.u.mul(&self.u_inv) == IntMat::identity(self.rows())
            && self.v.mul(&self.v_inv) == IntMat::identity(self.cols())
    }
}

/// Smith normal form with unimodular transforms.
pub fn snf(a: &IntMat) -> Snf {
    let raw = match a.to_small().and_then(|s| snf_generic(s, true)) {
        Some(r) => convert(r),
        None => {
            convert(snf_generic(a.to_generic(), true).expect("bigint elimination cannot overflow"))
        }
    };
    raw
}

fn convert<T: Scalar>(r: SnfRaw<T>) -> Snf {
    let tr = r.tr.expect("transforms requested");
    Snf {
        diag: (0..r.rank).map(|i| r.d.at(i, i).s_to_big()).collect(),
        rank: r.rank,
        u: tr.u.s_to_big(),
        u_inv: tr.u_inv.s_to_big(),
        v: tr.v.s_to_big(),
        v_inv: tr.v_inv.s_to_big(),
    }
}

/// Invariant factors (nonzero diagonal of the Smith form) without transforms.
pub fn invariant_factors(a: &IntMat) -> Vec<BigInt> {
    if let Some(r) = a.to_small().and_then(|s| snf_generic(s, false)) {
        return (0..r.rank).map(|i| BigInt::from(*r.d.at(i, i))).collect();
    }
    let r = snf_generic(a.to_generic(), false).expect("bigint elimination cannot overflow");
    (0..r.rank).map(|i| r.d.at(i, i).clone()).collect()
}

/// Rank over the rationals.
pub fn rank(a: &IntMat) -> usize {
    invariant_factors(a).len()
}

/// Basis of the integer kernel `{x : A x = 0}` as matrix columns.
pub fn kernel_basis(a: &IntMat) -> IntMat {
    let s = snf(a);
    let idx: Vec<usize> = (s.rank..a.cols()).collect();
    s.v.select_cols(&idx)
}

/// An integer solution of `A x = b`, if one exists.
pub fn solve(a: &IntMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = snf(a);
    solve_with(&s, b)
}

/// Solves `A x = b` given the Smith form of `A`.
pub fn solve_with(s: &Snf, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let c = s.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); s.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < s.rank {
            let (q, r) = ci.div_rem(&s.diag[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// A basis (as columns) of the lattice spanned by the columns of `a`.
pub fn column_span_basis(a: &IntMat) -> IntMat {
    let s = snf(a);
    let mut cols = Vec::with_capacity(s.rank);
    for i in 0..s.rank {
        let c: Vec<BigInt> = s.u_inv.col(i).iter().map(|x| x * &s.diag[i]).collect();
        cols.push(c);
    }
    IntMat::from_columns(a.rows(), &cols)
}

/// Isomorphism type of a finitely generated abelian group: `Z^rank ⊕ ⨁ Z/dᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AbInvariants {
    pub rank: usize,
    /// Invariant factors, each `> 1`, with `dᵢ | dᵢ₊₁`.
    pub torsion: Vec<BigInt>,
}

impl AbInvariants {
    pub fn zero() -> Self {
        AbInvariants {
            rank: 0,
            torsion: vec![],
        }
    }

    pub fn free(rank: usize) -> Self {
        AbInvariants {
            rank,
            torsion: vec![],
        }
    }

    /// Normalizes an arbitrary list of cyclic orders (0 meaning infinite cyclic).
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let d: Vec<BigInt> = orders.to_vec();
        let m = IntMat::diagonal(&d);
        quotient_invariants(d.len(), &m)
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn num_generators(&self) -> usize {
        self.rank + self.torsion.len()
    }

    /// Orders of the generators in coordinate order: free ones first (0 = infinite).
    pub fn orders(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.rank];
        v.extend(self.torsion.iter().cloned());
        v
    }
}

impl fmt::Display for AbInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Invariants of `Z^gens / im(rels)`.
pub fn quotient_invariants(gens: usize, rels: &IntMat) -> AbInvariants {
    assert_eq!(rels.rows(), gens);
    let d = invariant_factors(rels);
    let rank = gens - d.len();
    AbInvariants {
        rank,
        torsion: d.into_iter().filter(|x| !x.is_one()).collect(),
    }
}

/// The group `Z^gens / im(rels)` with a coordinate map in invariant-factor form.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub invariants: AbInvariants,
    snf: Snf,
    /// Positions in `U·v` that carry torsion or free coordinates, in output order.
    slots: Vec<(usize, BigInt)>,
}

impl Quotient {
    pub fn new(gens: usize, rels: &IntMat) -> Self {
        assert_eq!(rels.rows(), gens);
        let s = snf(rels);
        let mut free = Vec::new();
        let mut tors = Vec::new();
        for i in 0..gens {
            if i < s.rank {
                if !s.diag[i].is_one() {
                    tors.push((i, s.diag[i].clone()));
                }
            } else {
                free.push((i, BigInt::zero()));
            }
        }
        let invariants = AbInvariants {
            rank: free.len(),
            torsion: tors.iter().map(|(_, d)| d.clone()).collect(),
        };
        free.extend(tors);
        Quotient {
            invariants,
            snf: s,
            slots: free,
        }
    }

    pub fn gens(&self) -> usize {
        self.snf.rows()
    }

    /// Coordinates of the class of `v` (free coordinates first, torsion reduced to `[0, d)`).
    pub fn coords(&self, v: &[BigInt]) -> Vec<BigInt> {
        let c = self.snf.u.mul_vec(v);
        self.slots
            .iter()
            .map(|(i, d)| {
                if d.is_zero() {
                    c[*i].clone()
                } else {
                    c[*i].mod_floor(d)
                }
            })
            .collect()
    }

    /// A representative in `Z^gens` of the `k`-th generator.
    pub fn generator(&self, k: usize) -> Vec<BigInt> {
        self.snf.u_inv.col(self.slots[k].0)
    }

    pub fn is_zero_class(&self, v: &[BigInt]) -> bool {
        self.coords(v).iter().all(|x| x.is_zero())
    }
}

/// A subquotient `L / R` where `L` has the given basis columns and `R ⊆ L`.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub lattice: IntMat,
    lattice_snf: Snf,
    pub quotient: Quotient,
}

impl Subquotient {
    /// `lattice` columns must be linearly independent; every column of `rels` must lie in their span.
    pub fn new(lattice: IntMat, rels: &IntMat) -> Self {
        assert_eq!(lattice.rows(), rels.rows());
        let ls = snf(&lattice);
        assert_eq!(ls.rank, lattice.cols(), "lattice basis must be independent");
        let k = lattice.cols();
        let mut cols = Vec::with_capacity(rels.cols());
        for j in 0..rels.cols() {
            let c = solve_with(&ls, &rels.col(j)).expect("relations must lie in the lattice");
            cols.push(c);
        }
        let cmat = IntMat::from_columns(k, &cols);
        let quotient = Quotient::new(k, &cmat);
        Subquotient {
            lattice,
            lattice_snf: ls,
            quotient,
        }
    }

    pub fn invariants(&self) -> &AbInvariants {
        &self.quotient.invariants
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        solve_with(&self.lattice_snf, v).is_some()
    }

    /// Coordinates of `v ∈ L`; `None` when `v ∉ L`.
    pub fn coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = solve_with(&self.lattice_snf, v)?;
        Some(self.quotient.coords(&c))
    }

    /// Representative in the ambient lattice of the `k`-th generator.
    pub fn generator(&self, k: usize) -> Vec<BigInt> {
        self.lattice.mul_vec(&self.quotient.generator(k))
    }
}

/// Lattice `{x ∈ Z^n : A x ∈ im R}` as a basis, where `A` is `m×n` and `R` is `m×r`.
pub fn preimage_lattice(a: &IntMat, r: &IntMat) -> IntMat {
    let n = a.cols();
    let big = a.hcat(&r.scale(&BigInt::from(-1)));
    let k = kernel_basis(&big);
    let top: Vec<usize> = (0..n).collect();
    let proj = k.select_rows(&top);
    if proj.cols() == 0 {
        return IntMat::zeros(n, 0);
    }
    column_span_basis(&proj)
}

/// Kernel of the map `Z^n/R_s → Z^m/R_t` induced by `A` (`A R_s ⊆ im R_t` assumed).
pub fn kernel_of_map(a: &IntMat, src_rels: &IntMat, tgt_rels: &IntMat) -> Subquotient {
    let l = preimage_lattice(a, tgt_rels);
    Subquotient::new(l, src_rels)
}

/// Cokernel of the map `Z^n → Z^m/R_t` induced by `A`.
pub fn cokernel_of_map(a: &IntMat, tgt_rels: &IntMat) -> Quotient {
    Quotient::new(a.rows(), &a.hcat(tgt_rels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_of_diag_two_three() {
        let a = IntMat::from_rows(&[vec![2, 0], vec![0, 3]]);
        let s = snf(&a);
        assert_eq!(s.diag, big(&[1, 6]));
        assert!(s.verify(&a));
    }

    #[test]
    fn snf_single_entry_and_zero() {
        let a = IntMat::from_rows(&[vec![2]]);
        assert_eq!(snf(&a).diag, big(&[2]));
        let z = IntMat::zeros(2, 3);
        let s = snf(&z);
        assert!(s.diag.is_empty());
        assert_eq!(kernel_basis(&z).cols(), 3);
        assert!(s.verify(&z));
    }

    #[test]
    fn snf_falls_back_to_bigint() {
        let huge = i64::MAX / 2;
        let a = IntMat::from_rows(&[vec![huge, 3], vec![7, huge]]);
        let s = snf(&a);
        assert!(s.verify(&a));
    }

    #[test]
    fn kernel_and_solve() {
        let a = IntMat::from_rows(&[vec![2, 4, 6], vec![1, 2, 3]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        assert!(solve(&a, &big(&[2, 1])).is_some());
        assert!(solve(&a, &big(&[1, 1])).is_none());
    }

    #[test]
    fn quotient_coordinates() {
        // Z^2 / <(2, 0), (0, 3)> = Z/6
        let q = Quotient::new(2, &IntMat::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(q.invariants.to_string(), "Z/6");
        assert!(q.is_zero_class(&big(&[2, 3])));
        assert!(!q.is_zero_class(&big(&[1, 0])));
        let g = q.generator(0);
        assert_eq!(q.coords(&g), big(&[1]));
    }

    #[test]
    fn subquotient_of_even_lattice() {
        // L = 2Z ⊕ Z, R = <(4,0)> : L/R = Z/2 ⊕ Z
        let l = IntMat::from_rows(&[vec![2, 0], vec![0, 1]]);
        let r = IntMat::from_rows(&[vec![4], vec![0]]);
        let sq = Subquotient::new(l, &r);
        assert_eq!(sq.invariants().to_string(), "Z + Z/2");
        assert!(sq.coords(&big(&[1, 0])).is_none());
        assert_eq!(sq.coords(&big(&[4, 0])).unwrap(), big(&[0, 0]));
    }

    #[test]
    fn display_invariants() {
        assert_eq!(AbInvariants::zero().to_string(), "0");
        assert_eq!(AbInvariants::free(1).to_string(), "Z");
        let x = AbInvariants::from_cyclic_orders(&big(&[2, 3, 0, 0]));
        assert_eq!(x.to_string(), "Z^2 + Z/6");
    }
}
