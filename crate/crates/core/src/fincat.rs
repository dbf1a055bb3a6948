//! Finite categories stored as explicit composition tables.
//!
//! Objects and morphisms are addressed by index. Composition for the pairs
//! meeting at an object `y` lives in one block of size `|in(y)| × |out(y)|`,
//! so storage is proportional to the number of composable pairs.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::morclass::MorClass;
use crate::verdict::{Instance, Verdict};

pub type Obj = usize;
pub type Mor = usize;

const NONE: u32 = u32::MAX;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);
static SIZE_LIMIT: AtomicUsize = AtomicUsize::new(10_000);

/// Default cap on the number of morphisms any constructor may produce.
pub const DEFAULT_SIZE_LIMIT: usize = 10_000;

/// Current global morphism cap.
pub fn size_limit() -> usize {
    SIZE_LIMIT.load(Ordering::Relaxed)
}

/// Sets the global morphism cap; returns the previous value.
pub fn set_size_limit(n: usize) -> usize {
    SIZE_LIMIT.swap(n, Ordering::Relaxed)
}

pub fn check_size(what: &str, requested: usize) -> Result<()> {
    let limit = size_limit();
    if requested > limit {
        Err(Error::SizeLimitExceeded {
            what: what.to_string(),
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}

/// A finite category.
#[derive(Clone)]
pub struct FinCat {
    tag: u64,
    obj_names: Vec<String>,
    mor_names: Vec<String>,
    src: Vec<Obj>,
    tgt: Vec<Obj>,
    ident: Vec<Mor>,
    incoming: Vec<Vec<Mor>>,
    outgoing: Vec<Vec<Mor>>,
    in_pos: Vec<u32>,
    out_pos: Vec<u32>,
    table: Vec<Vec<u32>>,
    hom: Vec<Vec<Mor>>,
}

impl fmt::Debug for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinCat({} objects, {} morphisms)",
            self.num_objects(),
            self.num_morphisms()
        )
    }
}

/// One failed law in a composition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    IdentityEndpoints { obj: Obj },
    MissingComposite { g: Mor, f: Mor },
    CompositeSourceMismatch { g: Mor, f: Mor, h: Mor },
    CompositeTargetMismatch { g: Mor, f: Mor, h: Mor },
    LeftIdentity { f: Mor },
    RightIdentity { f: Mor },
    Associativity { h: Mor, g: Mor, f: Mor },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IdentityEndpoints { obj } => {
                write!(f, "identity of object {obj} has wrong endpoints")
            }
            Violation::MissingComposite { g, f: ff } => write!(f, "missing composite {g}∘{ff}"),
            Violation::CompositeSourceMismatch { g, f: ff, h } => {
                write!(f, "composite source mismatch: {g}∘{ff} = {h}")
            }
            Violation::CompositeTargetMismatch { g, f: ff, h } => {
                write!(f, "composite target mismatch: {g}∘{ff} = {h}")
            }
            Violation::LeftIdentity { f: ff } => write!(f, "left identity law fails at {ff}"),
            Violation::RightIdentity { f: ff } => write!(f, "right identity law fails at {ff}"),
            Violation::Associativity { h, g, f: ff } => {
                write!(f, "associativity fails at ({h},{g},{ff})")
            }
        }
    }
}

/// Violations found by [`validate_category`]; empty means lawful.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn associativity_count(&self) -> usize {
        self.violations
            .iter()
            .filter(|v| matches!(v, Violation::Associativity { .. }))
            .count()
    }
}

/// Incremental construction of a [`FinCat`].
#[derive(Clone, Debug, Default)]
pub struct CatBuilder {
    obj_names: Vec<String>,
    mor_names: Vec<String>,
    src: Vec<Obj>,
    tgt: Vec<Obj>,
    ident: Vec<Mor>,
    comps: HashMap<(Mor, Mor), Mor>,
}

impl CatBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an object together with its identity `id(name)`.
    pub fn object(&mut self, name: impl Into<String>) -> Obj {
        let name = name.into();
        let x = self.obj_names.len();
        let id = self.mor_names.len();
        self.mor_names.push(format!("id({name})"));
        self.src.push(x);
        self.tgt.push(x);
        self.obj_names.push(name);
        self.ident.push(id);
        x
    }

    pub fn morphism(&mut self, name: impl Into<String>, src: Obj, tgt: Obj) -> Mor {
        let m = self.mor_names.len();
        self.mor_names.push(name.into());
        self.src.push(src);
        self.tgt.push(tgt);
        m
    }

    /// Records `g ∘ f = h`.
    pub fn compose(&mut self, g: Mor, f: Mor, h: Mor) {
        self.comps.insert((g, f), h);
    }

    pub fn identity(&self, x: Obj) -> Mor {
        self.ident[x]
    }

    pub fn num_morphisms(&self) -> usize {
        self.mor_names.len()
    }

    pub fn src_of(&self, m: Mor) -> Obj {
        self.src[m]
    }

    pub fn tgt_of(&self, m: Mor) -> Obj {
        self.tgt[m]
    }

    /// Builds without checking the laws; identity composites are filled in when absent.
    pub fn build_unchecked(self) -> FinCat {
        let ident = self.ident.clone();
        let is_id: Vec<Option<Obj>> = {
            let mut v = vec![None; self.mor_names.len()];
            for (x, &i) in ident.iter().enumerate() {
                v[i] = Some(x);
            }
            v
        };
        let comps = self.comps;
        FinCat::from_fn(
            self.obj_names,
            self.mor_names,
            self.src,
            self.tgt,
            ident,
            |g, f| {
                if let Some(&h) = comps.get(&(g, f)) {
                    return Some(h);
                }
                if is_id[g].is_some() {
                    return Some(f);
                }
                if is_id[f].is_some() {
                    return Some(g);
                }
                None
            },
        )
    }

    /// Builds and validates.
    pub fn build(self) -> Result<FinCat> {
        check_size("category", self.mor_names.len())?;
        let c = self.build_unchecked();
        let r = validate_category(&c);
        match r.violations.first() {
            None => Ok(c),
            Some(v) => Err(Error::Invalid(name_violation(&c, v))),
        }
    }
}

fn name_violation(c: &FinCat, v: &Violation) -> String {
    let n = |m: Mor| c.mor_name(m).to_string();
    match v {
        Violation::IdentityEndpoints { obj } => {
            format!("identity of {} has wrong endpoints", c.obj_name(*obj))
        }
        Violation::MissingComposite { g, f } => format!("missing composite {} {}", n(*g), n(*f)),
        Violation::CompositeSourceMismatch { g, f, h } => {
            format!("composite source mismatch: {} {} = {}", n(*g), n(*f), n(*h))
        }
        Violation::CompositeTargetMismatch { g, f, h } => {
            format!("composite target mismatch: {} {} = {}", n(*g), n(*f), n(*h))
        }
        Violation::LeftIdentity { f } => format!("left identity law fails at {}", n(*f)),
        Violation::RightIdentity { f } => format!("right identity law fails at {}", n(*f)),
        Violation::Associativity { h, g, f } => {
            format!("associativity fails at ({}, {}, {})", n(*h), n(*g), n(*f))
        }
    }
}

impl FinCat {
    /// Assembles a category from raw data; `comp(g, f)` is queried for every pair meeting at an object.
    pub fn from_fn(
        obj_names: Vec<String>,
        mor_names: Vec<String>,
        src: Vec<Obj>,
        tgt: Vec<Obj>,
        ident: Vec<Mor>,
        mut comp: impl FnMut(Mor, Mor) -> Option<Mor>,
    ) -> FinCat {
        let no = obj_names.len();
        let nm = mor_names.len();
        let mut incoming = vec![Vec::new(); no];
        let mut outgoing = vec![Vec::new(); no];
        let mut in_pos = vec![0u32; nm];
        let mut out_pos = vec![0u32; nm];
        let mut hom = vec![Vec::new(); no * no];
        for m in 0..nm {
            in_pos[m] = incoming[tgt[m]].len() as u32;
            incoming[tgt[m]].push(m);
            out_pos[m] = outgoing[src[m]].len() as u32;
            outgoing[src[m]].push(m);
            hom[src[m] * no + tgt[m]].push(m);
        }
        let mut table = Vec::with_capacity(no);
        for y in 0..no {
            let w = outgoing[y].len();
            let mut block = vec![NONE; incoming[y].len() * w];
            for (i, &f) in incoming[y].iter().enumerate() {
                for (j, &g) in outgoing[y].iter().enumerate() {
                    if let Some(h) = comp(g, f) {
                        block[i * w + j] = h as u32;
                    }
                }
            }
            table.push(block);
        }
        FinCat {
            tag: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            obj_names,
            mor_names,
            src,
            tgt,
            ident,
            incoming,
            outgoing,
            in_pos,
            out_pos,
            table,
            hom,
        }
    }

    /// Identity of this value for class ownership checks; clones share it.
    pub fn tag(&self) -> u64 {
        self.tag
    }

    pub fn num_objects(&self) -> usize {
        self.obj_names.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.mor_names.len()
    }

    pub fn objects(&self) -> std::ops::Range<Obj> {
        0..self.num_objects()
    }

    pub fn morphisms(&self) -> std::ops::Range<Mor> {
        0..self.num_morphisms()
    }

    pub fn obj_name(&self, x: Obj) -> &str {
        &self.obj_names[x]
    }

    pub fn mor_name(&self, m: Mor) -> &str {
        &self.mor_names[m]
    }

    pub fn obj_names(&self) -> &[String] {
        &self.obj_names
    }

    pub fn mor_names(&self) -> &[String] {
        &self.mor_names
    }

    pub fn find_object(&self, name: &str) -> Option<Obj> {
        self.obj_names.iter().position(|n| n == name)
    }

    pub fn find_morphism(&self, name: &str) -> Option<Mor> {
        self.mor_names.iter().position(|n| n == name)
    }

    pub fn src(&self, m: Mor) -> Obj {
        self.src[m]
    }

    pub fn tgt(&self, m: Mor) -> Obj {
        self.tgt[m]
    }

    pub fn id(&self, x: Obj) -> Mor {
        self.ident[x]
    }

    pub fn is_identity(&self, m: Mor) -> bool {
        self.src[m] == self.tgt[m] && self.ident[self.src[m]] == m
    }

    /// Morphisms `x → y` in index order.
    pub fn hom(&self, x: Obj, y: Obj) -> &[Mor] {
        &self.hom[x * self.num_objects() + y]
    }

    /// Morphisms with target `y`.
    pub fn arrows_into(&self, y: Obj) -> &[Mor] {
        &self.incoming[y]
    }

    /// Morphisms with source `x`.
    pub fn out_of(&self, x: Obj) -> &[Mor] {
        &self.outgoing[x]
    }

    /// `g ∘ f` when the table defines it.
    pub fn try_compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        let y = self.tgt[f];
        if self.src[g] != y {
            return None;
        }
        let w = self.outgoing[y].len();
        let v = self.table[y][self.in_pos[f] as usize * w + self.out_pos[g] as usize];
        (v != NONE).then_some(v as Mor)
    }

    /// `g ∘ f`; panics on non-composable pairs.
    #[inline]
    pub fn compose(&self, g: Mor, f: Mor) -> Mor {
        let y = self.tgt[f];
        debug_assert_eq!(self.src[g], y, "non-composable pair");
        let w = self.outgoing[y].len();
        let v = self.table[y][self.in_pos[f] as usize * w + self.out_pos[g] as usize];
        debug_assert_ne!(v, NONE, "composite undefined");
        v as Mor
    }

    /// Composite of a path given in application order `[f₁, f₂, …]` ↦ `… ∘ f₂ ∘ f₁`.
    pub fn compose_path(&self, path: &[Mor]) -> Mor {
        let mut acc = path[0];
        for &m in &path[1..] {
            acc = self.compose(m, acc);
        }
        acc
    }

    /// Two-sided inverse of `m`, if any.
    pub fn inverse(&self, m: Mor) -> Option<Mor> {
        let (x, y) = (self.src[m], self.tgt[m]);
        self.hom(y, x)
            .iter()
            .copied()
            .find(|&g| self.compose(g, m) == self.ident[x] && self.compose(m, g) == self.ident[y])
    }

    pub fn is_iso(&self, m: Mor) -> bool {
        self.inverse(m).is_some()
    }

    /// First isomorphism `x → y`, if any.
    pub fn iso_between(&self, x: Obj, y: Obj) -> Option<Mor> {
        self.hom(x, y).iter().copied().find(|&m| self.is_iso(m))
    }

    /// Full subcategory on the given objects (in the given order) with its inclusion.
    pub fn full_subcategory(self: &Arc<Self>, objs: &[Obj]) -> Result<Functor> {
        let mut b = CatBuilder::new();
        let mut omap = vec![usize::MAX; self.num_objects()];
        for &x in objs {
            omap[x] = b.object(self.obj_name(x));
        }
        let mut mmap = vec![usize::MAX; self.num_morphisms()];
        let mut back = Vec::new();
        for x in 0..objs.len() {
            back.push(self.id(objs[x]));
            mmap[self.id(objs[x])] = b.identity(x);
        }
        for &x in objs {
            for &y in objs {
                for &m in self.hom(x, y) {
                    if self.is_identity(m) {
                        continue;
                    }
                    let k = b.morphism(self.mor_name(m), omap[x], omap[y]);
                    mmap[m] = k;
                }
            }
        }
        let mut mor_back = vec![0; b.num_morphisms()];
        for m in self.morphisms() {
            if mmap[m] != usize::MAX {
                mor_back[mmap[m]] = m;
            }
        }
        for (k, &m) in mor_back.iter().enumerate() {
            for (k2, &m2) in mor_back.iter().enumerate() {
                if self.tgt(m) == self.src(m2) {
                    let h = self.compose(m2, m);
                    b.compose(k2, k, mmap[h]);
                }
            }
        }
        check_size("full subcategory", b.num_morphisms())?;
        let sub = Arc::new(b.build_unchecked());
        Functor::new(sub, self.clone(), objs.to_vec(), mor_back)
    }
}

/// Checks every law of a composition table.
pub fn validate_category(c: &FinCat) -> ValidationReport {
    let mut v = Vec::new();
    for x in c.objects() {
        let i = c.id(x);
        if c.src(i) != x || c.tgt(i) != x {
            v.push(Violation::IdentityEndpoints { obj: x });
        }
    }
    if !v.is_empty() {
        return ValidationReport { violations: v };
    }
    let mut defined = true;
    for f in c.morphisms() {
        for &g in c.out_of(c.tgt(f)) {
            match c.try_compose(g, f) {
                None => {
                    v.push(Violation::MissingComposite { g, f });
                    defined = false;
                }
                Some(h) => {
                    if c.src(h) != c.src(f) {
                        v.push(Violation::CompositeSourceMismatch { g, f, h });
                        defined = false;
                    } else if c.tgt(h) != c.tgt(g) {
                        v.push(Violation::CompositeTargetMismatch { g, f, h });
                        defined = false;
                    }
                }
            }
        }
    }
    for f in c.morphisms() {
        if c.try_compose(c.id(c.tgt(f)), f) != Some(f) {
            v.push(Violation::LeftIdentity { f });
        }
        if c.try_compose(f, c.id(c.src(f))) != Some(f) {
            v.push(Violation::RightIdentity { f });
        }
    }
    if !defined {
        return ValidationReport { violations: v };
    }
    for f in c.morphisms() {
        for &g in c.out_of(c.tgt(f)) {
            let gf = c.compose(g, f);
            for &h in c.out_of(c.tgt(g)) {
                if c.compose(h, gf) != c.compose(c.compose(h, g), f) {
                    v.push(Violation::Associativity { h, g, f });
                }
            }
        }
    }
    ValidationReport { violations: v }
}

/// A functor between finite categories.
#[derive(Clone, Debug)]
pub struct Functor {
    pub dom: Arc<FinCat>,
    pub cod: Arc<FinCat>,
    pub obj_map: Vec<Obj>,
    pub mor_map: Vec<Mor>,
}

impl Functor {
    /// Validates endpoints, identities and composites.
    pub fn new(
        dom: Arc<FinCat>,
        cod: Arc<FinCat>,
        obj_map: Vec<Obj>,
        mor_map: Vec<Mor>,
    ) -> Result<Functor> {
        let f = Functor {
            dom,
            cod,
            obj_map,
            mor_map,
        };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<()> {
        let (d, c) = (&self.dom, &self.cod);
        if self.obj_map.len() != d.num_objects() || self.mor_map.len() != d.num_morphisms() {
            return Err(Error::Invalid("functor maps have wrong length".into()));
        }
        if self.obj_map.iter().any(|&y| y >= c.num_objects())
            || self.mor_map.iter().any(|&m| m >= c.num_morphisms())
        {
            return Err(Error::Invalid("functor image out of range".into()));
        }
        for m in d.morphisms() {
            let fm = self.mor_map[m];
            if c.src(fm) != self.obj_map[d.src(m)] || c.tgt(fm) != self.obj_map[d.tgt(m)] {
                return Err(Error::Invalid(format!(
                    "functor breaks endpoints of {}",
                    d.mor_name(m)
                )));
            }
        }
        for x in d.objects() {
            if self.mor_map[d.id(x)] != c.id(self.obj_map[x]) {
                return Err(Error::Invalid(format!(
                    "functor breaks identity of {}",
                    d.obj_name(x)
                )));
            }
        }
        for f in d.morphisms() {
            for &g in d.out_of(d.tgt(f)) {
                if self.mor_map[d.compose(g, f)] != c.compose(self.mor_map[g], self.mor_map[f]) {
                    return Err(Error::Invalid(format!(
                        "functor breaks composite {} {}",
                        d.mor_name(g),
                        d.mor_name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(c: &Arc<FinCat>) -> Functor {
        Functor {
            dom: c.clone(),
            cod: c.clone(),
            obj_map: c.objects().collect(),
            mor_map: c.morphisms().collect(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Functor) -> Result<Functor> {
        if self.cod.tag() != other.dom.tag() {
            return Err(Error::OwnerMismatch);
        }
        Ok(Functor {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            obj_map: self.obj_map.iter().map(|&x| other.obj_map[x]).collect(),
            mor_map: self.mor_map.iter().map(|&m| other.mor_map[m]).collect(),
        })
    }

    pub fn obj(&self, x: Obj) -> Obj {
        self.obj_map[x]
    }

    pub fn mor(&self, m: Mor) -> Mor {
        self.mor_map[m]
    }
}

/// Result of [`functor_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorProperties {
    pub full: bool,
    pub faithful: bool,
    pub essentially_surjective: bool,
    pub equivalence: bool,
    /// A morphism `F(x) → F(y)` not in the image (target category index) with `(x, y)`.
    pub not_full: Option<(Obj, Obj, Mor)>,
    /// Two distinct morphisms with the same image.
    pub not_faithful: Option<(Mor, Mor)>,
    /// An object of the target not isomorphic to any image.
    pub unhit: Option<Obj>,
}

/// Decides fullness, faithfulness and essential surjectivity by enumeration.
pub fn functor_check(f: &Functor) -> FunctorProperties {
    let (d, c) = (&f.dom, &f.cod);
    let mut not_full = None;
    let mut not_faithful = None;
    'outer: for x in d.objects() {
        for y in d.objects() {
            let mut seen: HashMap<Mor, Mor> = HashMap::new();
            for &m in d.hom(x, y) {
                let fm = f.mor(m);
                if let Some(&prev) = seen.get(&fm) {
                    if not_faithful.is_none() {
                        not_faithful = Some((prev, m));
                    }
                } else {
                    seen.insert(fm, m);
                }
            }
            if not_full.is_none() {
                for &t in c.hom(f.obj(x), f.obj(y)) {
                    if !seen.contains_key(&t) {
                        not_full = Some((x, y, t));
                        break;
                    }
                }
            }
            if not_full.is_some() && not_faithful.is_some() {
                break 'outer;
            }
        }
    }
    let mut unhit = None;
    for z in c.objects() {
        let hit = d.objects().any(|x| c.iso_between(f.obj(x), z).is_some());
        if !hit {
            unhit = Some(z);
            break;
        }
    }
    let full = not_full.is_none();
    let faithful = not_faithful.is_none();
    let es = unhit.is_none();
    FunctorProperties {
        full,
        faithful,
        essentially_surjective: es,
        equivalence: full && faithful && es,
        not_full,
        not_faithful,
        unhit,
    }
}

/// The class of isomorphisms.
pub fn max_groupoid(c: &FinCat) -> MorClass {
    MorClass::from_fn(c, |m| c.is_iso(m))
}

/// Whether `f` is a monomorphism.
pub fn is_mono(c: &FinCat, f: Mor) -> bool {
    let x = c.src(f);
    for w in c.objects() {
        let hs = c.hom(w, x);
        for (i, &g) in hs.iter().enumerate() {
            for &h in &hs[i + 1..] {
                if c.compose(f, g) == c.compose(f, h) {
                    return false;
                }
            }
        }
    }
    true
}

/// Decides cofilteredness: non-empty, pairs bounded from the left, parallel pairs equalized from the left.
pub fn is_cofiltered(c: &FinCat) -> Verdict {
    const P: &str = "cofiltered";
    if c.num_objects() == 0 {
        return Verdict::fails(P, Instance::new().text("reason", "empty"));
    }
    let mut witness = Vec::new();
    for y in c.objects() {
        for z in c.objects() {
            let cone = c.objects().find_map(|w| {
                let a = *c.hom(w, y).first()?;
                let b = *c.hom(w, z).first()?;
                Some((a, b))
            });
            match cone {
                Some((a, b)) => witness.push(
                    Instance::new()
                        .obj("y", y)
                        .obj("z", z)
                        .mor("p", a)
                        .mor("q", b),
                ),
                None => {
                    return Verdict::fails(
                        P,
                        Instance::new()
                            .text("condition", "pairs")
                            .obj("y", y)
                            .obj("z", z),
                    );
                }
            }
        }
    }
    for y in c.objects() {
        for z in c.objects() {
            let hs = c.hom(y, z);
            for &u in hs {
                for &v in hs {
                    if u >= v {
                        continue;
                    }
                    let eq = c
                        .arrows_into(y)
                        .iter()
                        .copied()
                        .find(|&j| c.compose(u, j) == c.compose(v, j));
                    match eq {
                        Some(j) => {
                            witness.push(Instance::new().mor("u", u).mor("v", v).mor("j", j))
                        }
                        None => {
                            return Verdict::fails(
                                P,
                                Instance::new()
                                    .text("condition", "parallel")
                                    .mor("u", u)
                                    .mor("v", v),
                            );
                        }
                    }
                }
            }
        }
    }
    Verdict::holds(P).with_witness(witness)
}

/// The category `[n] = {0 < 1 < … < n}`.
pub fn ordinal(n: usize) -> FinCat {
    let mut b = CatBuilder::new();
    for i in 0..=n {
        b.object(i.to_string());
    }
    let mut m = vec![vec![0; n + 1]; n + 1];
    for i in 0..=n {
        m[i][i] = b.identity(i);
    }
    for i in 0..=n {
        for j in i + 1..=n {
            m[i][j] = b.morphism(format!("f{i}{j}"), i, j);
        }
    }
    for i in 0..=n {
        for j in i..=n {
            for k in j..=n {
                b.compose(m[j][k], m[i][j], m[i][k]);
            }
        }
    }
    b.build_unchecked()
}

/// Cartesian product with lexicographic tuple order (first factor most significant).
pub fn product(cs: &[&FinCat]) -> Result<FinCat> {
    if cs.is_empty() {
        return Err(Error::Invalid("product of an empty list".into()));
    }
    let total = cs
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.num_morphisms()));
    check_size("product", total.unwrap_or(usize::MAX))?;
    if cs.len() == 1 {
        return Ok(relabel_copy(cs[0]));
    }
    let obj_tuples = tuples(&cs.iter().map(|c| c.num_objects()).collect::<Vec<_>>());
    let mor_tuples = tuples(&cs.iter().map(|c| c.num_morphisms()).collect::<Vec<_>>());
    let obj_index: HashMap<Vec<usize>, usize> = obj_tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let mor_index: HashMap<Vec<usize>, usize> = mor_tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let obj_names = obj_tuples
        .iter()
        .map(|t| {
            format!(
                "({})",
                t.iter()
                    .zip(cs)
                    .map(|(&x, c)| c.obj_name(x))
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    let mor_names: Vec<String> = mor_tuples
        .iter()
        .map(|t| {
            if t.iter().zip(cs).all(|(&m, c)| c.is_identity(m)) {
                let os: Vec<&str> = t
                    .iter()
                    .zip(cs)
                    .map(|(&m, c)| c.obj_name(c.src(m)))
                    .collect();
                format!("id(({}))", os.join(","))
            } else {
                format!(
                    "({})",
                    t.iter()
                        .zip(cs)
                        .map(|(&m, c)| c.mor_name(m))
                        .collect::<Vec<_>>()
                        .join(",")
                )
            }
        })
        .collect();
    let src: Vec<Obj> = mor_tuples
        .iter()
        .map(|t| obj_index[&t.iter().zip(cs).map(|(&m, c)| c.src(m)).collect::<Vec<_>>()])
        .collect();
    let tgt: Vec<Obj> = mor_tuples
        .iter()
        .map(|t| obj_index[&t.iter().zip(cs).map(|(&m, c)| c.tgt(m)).collect::<Vec<_>>()])
        .collect();
    let ident = obj_tuples
        .iter()
        .map(|t| mor_index[&t.iter().zip(cs).map(|(&x, c)| c.id(x)).collect::<Vec<_>>()])
        .collect();
    Ok(FinCat::from_fn(
        obj_names,
        mor_names,
        src,
        tgt,
        ident,
        |g, f| {
            let tg = &mor_tuples[g];
            let tf = &mor_tuples[f];
            let mut h = Vec::with_capacity(cs.len());
            for (k, c) in cs.iter().enumerate() {
                h.push(c.try_compose(tg[k], tf[k])?);
            }
            Some(mor_index[&h])
        },
    ))
}

fn relabel_copy(c: &FinCat) -> FinCat {
    FinCat::from_fn(
        c.obj_names.clone(),
        c.mor_names.clone(),
        c.src.clone(),
        c.tgt.clone(),
        c.ident.clone(),
        |g, f| c.try_compose(g, f),
    )
}

fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &s in sizes {
        let mut next = Vec::with_capacity(out.len() * s);
        for t in &out {
            for i in 0..s {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// All functors `I → C` as object and morphism maps, in lexicographic order.
pub fn enumerate_functors(i: &FinCat, c: &FinCat) -> Vec<(Vec<Obj>, Vec<Mor>)> {
    let mut out = Vec::new();
    enumerate_functors_with(i, c, &mut |o, m| {
        out.push((o.to_vec(), m.to_vec()));
        true
    });
    out
}

/// Calls `visit` for each functor `I → C`; stops when it returns `false`.
pub fn enumerate_functors_with(
    i: &FinCat,
    c: &FinCat,
    visit: &mut dyn FnMut(&[Obj], &[Mor]) -> bool,
) {
    let nonid: Vec<Mor> = i.morphisms().filter(|&m| !i.is_identity(m)).collect();
    let mut pos = vec![usize::MAX; i.num_morphisms()];
    for (k, &m) in nonid.iter().enumerate() {
        pos[m] = k;
    }
    // checks[k]: composable pairs (g, f) of non-identities whose last assigned member is nonid[k]
    let mut checks: Vec<Vec<(Mor, Mor, Mor)>> = vec![Vec::new(); nonid.len()];
    for &f in &nonid {
        for &g in i.out_of(i.tgt(f)) {
            if i.is_identity(g) {
                continue;
            }
            let h = i.compose(g, f);
            let last = if i.is_identity(h) {
                pos[g].max(pos[f])
            } else {
                pos[g].max(pos[f]).max(pos[h])
            };
            checks[last].push((g, f, h));
        }
    }
    let mut omap = vec![0; i.num_objects()];
    let mut mmap = vec![0; i.num_morphisms()];
    fn objs(
        k: usize,
        i: &FinCat,
        c: &FinCat,
        omap: &mut Vec<Obj>,
        mmap: &mut Vec<Mor>,
        nonid: &[Mor],
        checks: &[Vec<(Mor, Mor, Mor)>],
        visit: &mut dyn FnMut(&[Obj], &[Mor]) -> bool,
    ) -> bool {
        if k == i.num_objects() {
            for x in i.objects() {
                mmap[i.id(x)] = c.id(omap[x]);
            }
            return mors(0, i, c, omap, mmap, nonid, checks, visit);
        }
        for y in c.objects() {
            omap[k] = y;
            if !objs(k + 1, i, c, omap, mmap, nonid, checks, visit) {
                return false;
            }
        }
        true
    }
    fn mors(
        k: usize,
        i: &FinCat,
        c: &FinCat,
        omap: &mut Vec<Obj>,
        mmap: &mut Vec<Mor>,
        nonid: &[Mor],
        checks: &[Vec<(Mor, Mor, Mor)>],
        visit: &mut dyn FnMut(&[Obj], &[Mor]) -> bool,
    ) -> bool {
        if k == nonid.len() {
            return visit(omap, mmap);
        }
        let m = nonid[k];
        let cands: Vec<Mor> = c.hom(omap[i.src(m)], omap[i.tgt(m)]).to_vec();
        for t in cands {
            mmap[m] = t;
            let ok = checks[k]
                .iter()
                .all(|&(g, f, h)| c.compose(mmap[g], mmap[f]) == mmap[h]);
            if ok && !mors(k + 1, i, c, omap, mmap, nonid, checks, visit) {
                return false;
            }
        }
        true
    }
    objs(0, i, c, &mut omap, &mut mmap, &nonid, &checks, visit);
}

/// All natural transformations between two functors `I → C`, as component lists.
pub fn natural_transformations(
    i: &FinCat,
    c: &FinCat,
    f: (&[Obj], &[Mor]),
    g: (&[Obj], &[Mor]),
) -> Vec<Vec<Mor>> {
    let mut out = Vec::new();
    let mut comp = vec![0; i.num_objects()];
    fn rec(
        k: usize,
        i: &FinCat,
        c: &FinCat,
        f: (&[Obj], &[Mor]),
        g: (&[Obj], &[Mor]),
        comp: &mut Vec<Mor>,
        out: &mut Vec<Vec<Mor>>,
    ) {
        if k == i.num_objects() {
            out.push(comp.clone());
            return;
        }
        for &a in c.hom(f.0[k], g.0[k]) {
            comp[k] = a;
            let ok = i.morphisms().all(|m| {
                let (s, t) = (i.src(m), i.tgt(m));
                if s > k || t > k {
                    return true;
                }
                c.compose(g.1[m], comp[s]) == c.compose(comp[t], f.1[m])
            });
            if ok {
                rec(k + 1, i, c, f, g, comp, out);
            }
        }
    }
    rec(0, i, c, f, g, &mut comp, &mut out);
    out
}

/// The category `C^I` of functors `I → C` and natural transformations.
pub fn functor_category(i: &FinCat, c: &FinCat) -> Result<FinCat> {
    let functors = enumerate_functors(i, c);
    let limit = size_limit();
    let mut b_src = Vec::new();
    let mut b_tgt = Vec::new();
    let mut comps: Vec<Vec<Mor>> = Vec::new();
    let mut index: HashMap<(usize, usize, Vec<Mor>), Mor> = HashMap::new();
    let mut ident = vec![0; functors.len()];
    for (a, fa) in functors.iter().enumerate() {
        for (bb, fb) in functors.iter().enumerate() {
            for nt in natural_transformations(i, c, (&fa.0, &fa.1), (&fb.0, &fb.1)) {
                let k = comps.len();
                if k >= limit {
                    return Err(Error::SizeLimitExceeded {
                        what: "functor category".into(),
                        requested: k + 1,
                        limit,
                    });
                }
                if a == bb && nt.iter().enumerate().all(|(x, &m)| m == c.id(fa.0[x])) {
                    ident[a] = k;
                }
                index.insert((a, bb, nt.clone()), k);
                comps.push(nt);
                b_src.push(a);
                b_tgt.push(bb);
            }
        }
    }
    let obj_names: Vec<String> = functors
        .iter()
        .map(|(o, m)| {
            let os: Vec<&str> = o.iter().map(|&x| c.obj_name(x)).collect();
            let ms: Vec<&str> = i
                .morphisms()
                .filter(|&k| !i.is_identity(k))
                .map(|k| c.mor_name(m[k]))
                .collect();
            if ms.is_empty() {
                format!("F[{}]", os.join(","))
            } else {
                format!("F[{};{}]", os.join(","), ms.join(","))
            }
        })
        .collect();
    let mor_names: Vec<String> = (0..comps.len())
        .map(|k| {
            if ident[b_src[k]] == k {
                format!("id({})", obj_names[b_src[k]])
            } else {
                format!("n{k}")
            }
        })
        .collect();
    Ok(FinCat::from_fn(
        obj_names,
        mor_names,
        b_src.clone(),
        b_tgt.clone(),
        ident,
        |g, f| {
            let h: Vec<Mor> = comps[g]
                .iter()
                .zip(&comps[f])
                .map(|(&a, &b)| c.compose(a, b))
                .collect();
            index.get(&(b_src[f], b_tgt[g], h)).copied()
        },
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Objects `(y, a: F(y) → x)`.
    Over,
    /// Objects `(y, a: x → F(y))`.
    Under,
}

/// A comma category with its projection data.
#[derive(Clone, Debug)]
pub struct CommaCat {
    pub cat: Arc<FinCat>,
    pub direction: Direction,
    pub base: Obj,
    /// For each object: the domain object and its anchoring morphism in the codomain.
    pub objects: Vec<(Obj, Mor)>,
    /// For each morphism: the underlying domain morphism.
    pub arrows: Vec<Mor>,
    pub functor: Functor,
}

impl CommaCat {
    /// Projection to the domain of the functor.
    pub fn projection(&self) -> Functor {
        Functor {
            dom: self.cat.clone(),
            cod: self.functor.dom.clone(),
            obj_map: self.objects.iter().map(|o| o.0).collect(),
            mor_map: self.arrows.clone(),
        }
    }
}

/// The comma category `F/x` (over) or `x/F` (under), anchors optionally restricted to a class.
pub fn comma_category(
    f: &Functor,
    x: Obj,
    direction: Direction,
    anchors: Option<&MorClass>,
) -> Result<CommaCat> {
    let (d, c) = (&f.dom, &f.cod);
    if x >= c.num_objects() {
        return Err(Error::Invalid("object out of range".into()));
    }
    if let Some(a) = anchors {
        a.check_owner(c)?;
    }
    let allowed = |m: Mor| anchors.is_none_or(|a| a.contains(m));
    let mut objects = Vec::new();
    for y in d.objects() {
        let hs = match direction {
            Direction::Over => c.hom(f.obj(y), x),
            Direction::Under => c.hom(x, f.obj(y)),
        };
        for &a in hs {
            if allowed(a) {
                objects.push((y, a));
            }
        }
    }
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut arrows = Vec::new();
    let mut ident = vec![0; objects.len()];
    let mut index: HashMap<(usize, usize, Mor), Mor> = HashMap::new();
    let limit = size_limit();
    for (i, &(y, a)) in objects.iter().enumerate() {
        for (j, &(z, b)) in objects.iter().enumerate() {
            for &al in d.hom(y, z) {
                let ok = match direction {
                    Direction::Over => c.compose(b, f.mor(al)) == a,
                    Direction::Under => c.compose(f.mor(al), a) == b,
                };
                if ok {
                    let k = arrows.len();
                    if k >= limit {
                        return Err(Error::SizeLimitExceeded {
                            what: "comma category".into(),
                            requested: k + 1,
                            limit,
                        });
                    }
                    if i == j && al == d.id(y) {
                        ident[i] = k;
                    }
                    index.insert((i, j, al), k);
                    arrows.push(al);
                    src.push(i);
                    tgt.push(j);
                }
            }
        }
    }
    let obj_names = objects
        .iter()
        .map(|&(y, a)| format!("({},{})", d.obj_name(y), c.mor_name(a)))
        .collect::<Vec<_>>();
    let mor_names = (0..arrows.len())
        .map(|k| {
            if ident[src[k]] == k {
                format!("id({})", obj_names[src[k]])
            } else {
                format!("{}:{}>{}", d.mor_name(arrows[k]), src[k], tgt[k])
            }
        })
        .collect::<Vec<_>>();
    let cat = FinCat::from_fn(
        obj_names,
        mor_names,
        src.clone(),
        tgt.clone(),
        ident,
        |g, h| {
            index
                .get(&(src[h], tgt[g], d.compose(arrows[g], arrows[h])))
                .copied()
        },
    );
    Ok(CommaCat {
        cat: Arc::new(cat),
        direction,
        base: x,
        objects,
        arrows,
        functor: f.clone(),
    })
}

/// Small named categories used throughout tests and examples.
pub mod examples {
    use super::*;

    /// One object, one morphism.
    pub fn terminal() -> FinCat {
        ordinal(0)
    }

    /// `n` objects and only identities.
    pub fn discrete(n: usize) -> FinCat {
        let mut b = CatBuilder::new();
        for i in 0..n {
            b.object(format!("d{i}"));
        }
        b.build_unchecked()
    }

    /// Two objects `a, b` with inverse isomorphisms `u: a → b`, `v: b → a`.
    pub fn walking_iso() -> FinCat {
        let mut b = CatBuilder::new();
        let a = b.object("a");
        let bb = b.object("b");
        let u = b.morphism("u", a, bb);
        let v = b.morphism("v", bb, a);
        b.compose(v, u, b.identity(a));
        b.compose(u, v, b.identity(bb));
        b.build_unchecked()
    }

    /// One object with `id` and an idempotent `p`.
    pub fn idempotent() -> FinCat {
        let mut b = CatBuilder::new();
        let x = b.object("x");
        let p = b.morphism("p", x, x);
        b.compose(p, p, p);
        b.build_unchecked()
    }

    /// Two parallel arrows `g, h: a → b`.
    pub fn parallel_pair() -> FinCat {
        let mut b = CatBuilder::new();
        let a = b.object("a");
        let bb = b.object("b");
        b.morphism("g", a, bb);
        b.morphism("h", a, bb);
        b.build_unchecked()
    }

    /// A finite poset given by its strict order relation on `names`.
    pub fn poset(names: &[&str], less: &[(usize, usize)]) -> FinCat {
        let n = names.len();
        let mut le = vec![vec![false; n]; n];
        for i in 0..n {
            le[i][i] = true;
        }
        for &(i, j) in less {
            le[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        let mut b = CatBuilder::new();
        for nm in names {
            b.object(*nm);
        }
        let mut m = vec![vec![None; n]; n];
        for i in 0..n {
            m[i][i] = Some(b.identity(i));
            for j in 0..n {
                if i != j && le[i][j] {
                    m[i][j] = Some(b.morphism(format!("{}<{}", names[i], names[j]), i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if let (Some(a), Some(bb), Some(c)) = (m[i][j], m[j][k], m[i][k]) {
                        b.compose(bb, a, c);
                    }
                }
            }
        }
        b.build_unchecked()
    }

    /// `⊥ < a, b < ⊤`.
    pub fn diamond() -> FinCat {
        poset(&["bot", "a", "b", "top"], &[(0, 1), (0, 2), (1, 3), (2, 3)])
    }

    /// The crown `a, b < c, d`: its nerve is a circle.
    pub fn circle_poset() -> FinCat {
        poset(&["a", "b", "c", "d"], &[(0, 2), (0, 3), (1, 2), (1, 3)])
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn ordinal_counts() {
        for n in 0..5 {
            let c = ordinal(n);
            assert_eq!(c.num_objects(), n + 1);
            assert_eq!(c.num_morphisms(), (n + 1) * (n + 2) / 2);
            assert!(validate_category(&c).is_valid());
        }
        let c = ordinal(2);
        let f01 = c.find_morphism("f01").unwrap();
        let f12 = c.find_morphism("f12").unwrap();
        assert_eq!(c.mor_name(c.compose(f12, f01)), "f02");
    }

    #[test]
    fn composite_source_mismatch_is_reported() {
        let mut b = CatBuilder::new();
        let x = b.object("x");
        let y = b.object("y");
        let f = b.morphism("f", x, y);
        let g = b.morphism("g", y, y);
        b.compose(g, f, g);
        let c = b.build_unchecked();
        let r = validate_category(&c);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CompositeSourceMismatch { .. })));
        assert!(r.violations[0]
            .to_string()
            .contains("composite source mismatch"));
    }

    #[test]
    fn products_and_functor_categories_have_expected_sizes() {
        let o1 = ordinal(1);
        let o2 = ordinal(2);
        let p = product(&[&o1, &o1]).unwrap();
        assert_eq!((p.num_objects(), p.num_morphisms()), (4, 9));
        assert!(validate_category(&p).is_valid());
        let q = product(&[&o1, &o2]).unwrap();
        assert_eq!((q.num_objects(), q.num_morphisms()), (6, 18));
        let fc = functor_category(&o1, &o1).unwrap();
        assert_eq!((fc.num_objects(), fc.num_morphisms()), (3, 6));
        assert!(validate_category(&fc).is_valid());
        let d2 = discrete(2);
        let fd = functor_category(&d2, &o1).unwrap();
        assert_eq!((fd.num_objects(), fd.num_morphisms()), (4, 9));
    }

    #[test]
    fn size_cap_is_enforced() {
        let o2 = ordinal(2);
        let err = product(&[&o2, &o2, &o2, &o2, &o2, &o2]).unwrap_err();
        assert!(matches!(err, Error::SizeLimitExceeded { .. }));
    }

    #[test]
    fn comma_over_terminal_object() {
        let c = Arc::new(ordinal(1));
        let id = Functor::identity(&c);
        let cc = comma_category(&id, 1, Direction::Over, None).unwrap();
        assert_eq!((cc.cat.num_objects(), cc.cat.num_morphisms()), (2, 3));
        assert!(validate_category(&cc.cat).is_valid());
        let p = cc.projection();
        assert!(Functor::new(p.dom, p.cod, p.obj_map, p.mor_map).is_ok());
        let under = comma_category(&id, 0, Direction::Under, None).unwrap();
        assert_eq!(under.cat.num_morphisms(), c.num_morphisms());
    }

    #[test]
    fn cofiltered_examples() {
        assert!(is_cofiltered(&diamond()).is_holds());
        let v = is_cofiltered(&discrete(2));
        assert!(v.is_fails());
        let pp = parallel_pair();
        let v = is_cofiltered(&pp);
        let cex = v.counterexample.unwrap();
        assert_eq!(cex.mor_of("u"), pp.find_morphism("g"));
        assert_eq!(cex.mor_of("v"), pp.find_morphism("h"));
    }

    #[test]
    fn monos_and_isos() {
        let e = idempotent();
        let p = e.find_morphism("p").unwrap();
        assert!(!is_mono(&e, p));
        assert!(is_mono(&e, e.id(0)));
        assert_eq!(max_groupoid(&e).len(), 1);
        assert_eq!(max_groupoid(&walking_iso()).len(), 4);
        assert_eq!(max_groupoid(&ordinal(1)).len(), 2);
    }

    #[test]
    fn functor_properties() {
        let o1 = Arc::new(ordinal(1));
        let wi = Arc::new(walking_iso());
        let u = wi.find_morphism("u").unwrap();
        let f = Functor::new(
            o1.clone(),
            wi.clone(),
            vec![0, 1],
            vec![wi.id(0), wi.id(1), u],
        )
        .unwrap();
        let p = functor_check(&f);
        assert!(p.faithful && p.essentially_surjective && !p.full);
        let t = Arc::new(terminal());
        let g = Functor::new(o1.clone(), t, vec![0, 0], vec![0, 0, 0]).unwrap();
        let p = functor_check(&g);
        // thin source: the collapse is injective on every hom-set but misses Hom(1, 0)
        assert!(p.faithful && p.essentially_surjective && !p.full);
        assert_eq!(p.not_full, Some((1, 0, 0)));
        let two = Arc::new(idempotent());
        let h = Functor::new(two, Arc::new(terminal()), vec![0], vec![0, 0]).unwrap();
        let p = functor_check(&h);
        assert!(p.full && p.essentially_surjective && !p.faithful);
        assert!(functor_check(&Functor::identity(&o1)).equivalence);
    }
}
