//! Classes of morphisms: closure and Ore-type predicates, class algebra,
//! pullbacks along functors and the heritability checks built on them.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{
    comma_category, functor_check, is_cofiltered, CatBuilder, Direction, FinCat, Functor, Mor,
};
use crate::verdict::{Instance, Verdict};

/// A subset of the morphisms of one category.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MorClass {
    owner: u64,
    n: usize,
    words: Vec<u64>,
}

impl fmt::Debug for MorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MorClass{:?}", self.members())
    }
}

impl MorClass {
    pub fn empty(c: &FinCat) -> Self {
        MorClass {
            owner: c.tag(),
            n: c.num_morphisms(),
            words: vec![0; c.num_morphisms().div_ceil(64)],
        }
    }

    pub fn all(c: &FinCat) -> Self {
        Self::from_fn(c, |_| true)
    }

    pub fn identities(c: &FinCat) -> Self {
        Self::from_fn(c, |m| c.is_identity(m))
    }

    pub fn from_fn(c: &FinCat, mut f: impl FnMut(Mor) -> bool) -> Self {
        let mut s = Self::empty(c);
        for m in c.morphisms() {
            if f(m) {
                s.insert(m);
            }
        }
        s
    }

    pub fn from_list(c: &FinCat, ms: &[Mor]) -> Result<Self> {
        let mut s = Self::empty(c);
        for &m in ms {
            if m >= c.num_morphisms() {
                return Err(Error::Invalid(format!("morphism index {m} out of range")));
            }
            s.insert(m);
        }
        Ok(s)
    }

    /// Class from a bitmask over the first 64 morphisms.
    pub fn from_mask(c: &FinCat, mask: u64) -> Self {
        let mut s = Self::empty(c);
        if !s.words.is_empty() {
            let keep = if s.n >= 64 {
                u64::MAX
            } else {
                (1u64 << s.n) - 1
            };
            s.words[0] = mask & keep;
        }
        s
    }

    /// Named members, with identity names accepted as given by the category.
    pub fn from_names(c: &FinCat, names: &[&str]) -> Result<Self> {
        let mut s = Self::empty(c);
        for n in names {
            let m = c
                .find_morphism(n)
                .ok_or_else(|| Error::Invalid(format!("unknown morphism `{n}`")))?;
            s.insert(m);
        }
        Ok(s)
    }

    pub fn owner(&self) -> u64 {
        self.owner
    }

    pub fn check_owner(&self, c: &FinCat) -> Result<()> {
        if self.owner == c.tag() && self.n == c.num_morphisms() {
            Ok(())
        } else {
            Err(Error::OwnerMismatch)
        }
    }

    fn same_owner(&self, other: &MorClass) -> Result<()> {
        if self.owner == other.owner {
            Ok(())
        } else {
            Err(Error::OwnerMismatch)
        }
    }

    pub fn insert(&mut self, m: Mor) {
        self.words[m >> 6] |= 1 << (m & 63);
    }

    pub fn remove(&mut self, m: Mor) {
        self.words[m >> 6] &= !(1 << (m & 63));
    }

    #[inline]
    pub fn contains(&self, m: Mor) -> bool {
        (self.words[m >> 6] >> (m & 63)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn members(&self) -> Vec<Mor> {
        (0..self.n).filter(|&m| self.contains(m)).collect()
    }

    pub fn is_subset(&self, other: &MorClass) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// First member of `self` missing from `other`.
    pub fn first_outside(&self, other: &MorClass) -> Option<Mor> {
        (0..self.n).find(|&m| self.contains(m) && !other.contains(m))
    }

    pub fn union(&self, other: &MorClass) -> Result<MorClass> {
        self.same_owner(other)?;
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(s)
    }

    pub fn intersection(&self, other: &MorClass) -> Result<MorClass> {
        self.same_owner(other)?;
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        Ok(s)
    }

    /// Names of the members, in index order.
    pub fn names(&self, c: &FinCat) -> Vec<String> {
        self.members()
            .into_iter()
            .map(|m| c.mor_name(m).to_string())
            .collect()
    }
}

/// The predicates decidable on classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Property {
    Multiplicative,
    StrictlyMultiplicative,
    Saturated,
    RightPermutative,
    RightReversible,
    RightOre,
    RightLocalizing,
    RightCofinal,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::Multiplicative,
        Property::StrictlyMultiplicative,
        Property::Saturated,
        Property::RightPermutative,
        Property::RightReversible,
        Property::RightOre,
        Property::RightLocalizing,
        Property::RightCofinal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Multiplicative => "multiplicative",
            Property::StrictlyMultiplicative => "strictly-multiplicative",
            Property::Saturated => "saturated",
            Property::RightPermutative => "right-permutative",
            Property::RightReversible => "right-reversible",
            Property::RightOre => "right-ore",
            Property::RightLocalizing => "right-localizing",
            Property::RightCofinal => "right-cofinal",
        }
    }

    pub fn from_name(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.name() == s)
    }

    /// Whether a second class is part of the statement.
    pub fn is_binary(self) -> bool {
        matches!(
            self,
            Property::RightPermutative
                | Property::RightReversible
                | Property::RightOre
                | Property::RightCofinal
        )
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `T ∘ S = {f∘g : g ∈ S, f ∈ T}`.
pub fn compose_classes(c: &FinCat, t: &MorClass, s: &MorClass) -> Result<MorClass> {
    t.check_owner(c)?;
    s.check_owner(c)?;
    let mut out = MorClass::empty(c);
    for g in s.members() {
        for &f in c.out_of(c.tgt(g)) {
            if t.contains(f) {
                out.insert(c.compose(f, g));
            }
        }
    }
    Ok(out)
}

/// `{f : F(f) ∈ S}` on the domain of `F`.
pub fn pullback_class(f: &Functor, s: &MorClass) -> Result<MorClass> {
    s.check_owner(&f.cod)?;
    if s.is_empty() {
        return Err(Error::EmptyClass);
    }
    Ok(MorClass::from_fn(&f.dom, |m| s.contains(f.mor(m))))
}

/// Decides `S` has `P` (with respect to `T` for the binary properties; for
/// cofinality, whether `T` is right cofinal in `S`). Holds-verdicts carry one
/// filler per universally quantified instance.
pub fn class_property(
    c: &FinCat,
    p: Property,
    s: &MorClass,
    t: Option<&MorClass>,
) -> Result<Verdict> {
    decide(c, p, s, t, true)
}

/// Same decision without collecting witnesses.
pub fn has_property(c: &FinCat, p: Property, s: &MorClass, t: Option<&MorClass>) -> Result<bool> {
    Ok(decide(c, p, s, t, false)?.is_holds())
}

fn decide(
    c: &FinCat,
    p: Property,
    s: &MorClass,
    t: Option<&MorClass>,
    collect: bool,
) -> Result<Verdict> {
    s.check_owner(c)?;
    if let Some(t) = t {
        t.check_owner(c)?;
    }
    let need_t = || t.ok_or_else(|| Error::MissingSecondClass(p.name().to_string()));
    let v = match p {
        Property::Multiplicative => multiplicative(c, s),
        Property::StrictlyMultiplicative => strictly_multiplicative(c, s),
        Property::Saturated => saturated(c, s),
        Property::RightPermutative => permutative(c, s, need_t()?, collect),
        Property::RightReversible => reversible(c, s, need_t()?, collect),
        Property::RightOre => {
            let t = need_t()?;
            ore(c, s, t, collect, p.name())
        }
        Property::RightLocalizing => {
            let m = multiplicative(c, s);
            if m.is_fails() {
                relabel(m, p.name())
            } else {
                let all = MorClass::all(c);
                let o = ore(c, s, &all, collect, p.name());
                relabel(o, p.name())
            }
        }
        Property::RightCofinal => cofinal(c, s, need_t()?, collect),
    };
    Ok(v)
}

fn relabel(mut v: Verdict, name: &str) -> Verdict {
    v.property = name.to_string();
    v
}

fn multiplicative(c: &FinCat, s: &MorClass) -> Verdict {
    const P: &str = "multiplicative";
    for x in c.objects() {
        if !s.contains(c.id(x)) {
            return Verdict::fails(
                P,
                Instance::new()
                    .text("condition", "identity")
                    .mor("missing", c.id(x)),
            );
        }
    }
    for f in s.members() {
        for &g in c.out_of(c.tgt(f)) {
            if s.contains(g) && !s.contains(c.compose(g, f)) {
                return Verdict::fails(
                    P,
                    Instance::new()
                        .text("condition", "composite")
                        .mor("f", f)
                        .mor("g", g),
                );
            }
        }
    }
    Verdict::holds(P)
}

fn strictly_multiplicative(c: &FinCat, s: &MorClass) -> Verdict {
    const P: &str = "strictly-multiplicative";
    if let Some(m) = c.morphisms().find(|&m| !s.contains(m) && c.is_iso(m)) {
        return Verdict::fails(
            P,
            Instance::new()
                .text("condition", "isomorphism")
                .mor("missing", m),
        );
    }
    relabel(multiplicative(c, s), P)
}

fn saturated(c: &FinCat, s: &MorClass) -> Verdict {
    const P: &str = "saturated";
    for f in c.morphisms() {
        for &g in c.out_of(c.tgt(f)) {
            let gf = c.compose(g, f);
            let k = s.contains(f) as u8 + s.contains(g) as u8 + s.contains(gf) as u8;
            if k == 2 {
                return Verdict::fails(P, Instance::new().mor("f", f).mor("g", g).mor("gf", gf));
            }
        }
    }
    Verdict::holds(P)
}

/// Filler `(a', b')` with `a ∘ b' = b ∘ a'`, `a' ∈ S`, `b' ∈ T`.
pub fn permutative_filler(
    c: &FinCat,
    s: &MorClass,
    t: &MorClass,
    a: Mor,
    b: Mor,
) -> Option<(Mor, Mor)> {
    let (x, y) = (c.src(a), c.src(b));
    for &a2 in c.arrows_into(y) {
        if !s.contains(a2) {
            continue;
        }
        let ba2 = c.compose(b, a2);
        for &b2 in c.hom(c.src(a2), x) {
            if t.contains(b2) && c.compose(a, b2) == ba2 {
                return Some((a2, b2));
            }
        }
    }
    None
}

fn permutative(c: &FinCat, s: &MorClass, t: &MorClass, collect: bool) -> Verdict {
    const P: &str = "right-permutative";
    let mut w = Vec::new();
    for a in s.members() {
        for &b in c.arrows_into(c.tgt(a)) {
            if !t.contains(b) {
                continue;
            }
            match permutative_filler(c, s, t, a, b) {
                Some((a2, b2)) => {
                    if collect {
                        w.push(
                            Instance::new()
                                .mor("a", a)
                                .mor("b", b)
                                .obj("u", c.src(a2))
                                .mor("a'", a2)
                                .mor("b'", b2),
                        );
                    }
                }
                None => return Verdict::fails(P, Instance::new().mor("a", a).mor("b", b)),
            }
        }
    }
    Verdict::holds(P).with_witness(w)
}

/// An `S`-morphism `c` equalizing the parallel pair from the right.
pub fn equalizer_in(c: &FinCat, s: &MorClass, a: Mor, a2: Mor) -> Option<Mor> {
    c.arrows_into(c.src(a))
        .iter()
        .copied()
        .find(|&k| s.contains(k) && c.compose(a, k) == c.compose(a2, k))
}

fn reversible(c: &FinCat, s: &MorClass, t: &MorClass, collect: bool) -> Verdict {
    const P: &str = "right-reversible";
    let mut w = Vec::new();
    for x in c.objects() {
        for y in c.objects() {
            let hs: Vec<Mor> = c
                .hom(x, y)
                .iter()
                .copied()
                .filter(|&m| t.contains(m))
                .collect();
            for &a in &hs {
                for &a2 in &hs {
                    let b = c
                        .out_of(y)
                        .iter()
                        .copied()
                        .find(|&b| s.contains(b) && c.compose(b, a) == c.compose(b, a2));
                    let Some(b) = b else { continue };
                    match equalizer_in(c, s, a, a2) {
                        Some(k) => {
                            if collect {
                                w.push(
                                    Instance::new()
                                        .mor("a", a)
                                        .mor("a'", a2)
                                        .mor("b", b)
                                        .mor("c", k),
                                );
                            }
                        }
                        None => {
                            return Verdict::fails(
                                P,
                                Instance::new().mor("a", a).mor("a'", a2).mor("b", b),
                            )
                        }
                    }
                }
            }
        }
    }
    Verdict::holds(P).with_witness(w)
}

fn ore(c: &FinCat, s: &MorClass, t: &MorClass, collect: bool, name: &str) -> Verdict {
    let p = permutative(c, s, t, collect);
    if p.is_fails() {
        return relabel(p, name);
    }
    let r = reversible(c, s, t, collect);
    Verdict::all(name, vec![p, r])
}

/// `T` right cofinal in `S`.
fn cofinal(c: &FinCat, s: &MorClass, t: &MorClass, collect: bool) -> Verdict {
    const P: &str = "right-cofinal";
    if let Some(m) = t.first_outside(s) {
        return Verdict::fails(
            P,
            Instance::new()
                .text("condition", "subset")
                .mor("outside", m),
        );
    }
    let mut w = Vec::new();
    for m in s.members() {
        let found = c
            .arrows_into(c.src(m))
            .iter()
            .copied()
            .find(|&k| t.contains(k) && t.contains(c.compose(m, k)));
        match found {
            Some(k) => {
                if collect {
                    w.push(Instance::new().mor("s", m).mor("t", k));
                }
            }
            None => return Verdict::fails(P, Instance::new().mor("s", m)),
        }
    }
    Verdict::holds(P).with_witness(w)
}

/// The wide subcategory spanned by a multiplicative class, with its inclusion.
pub fn wide_subcategory(c: &Arc<FinCat>, s: &MorClass) -> Result<Functor> {
    s.check_owner(c)?;
    let m = multiplicative(c, s);
    if m.is_fails() {
        return Err(Error::RequiresMultiplicative(
            m.counterexample
                .map(|i| {
                    i.render(&|x| c.obj_name(x).to_string(), &|k| {
                        c.mor_name(k).to_string()
                    })
                })
                .unwrap_or_default(),
        ));
    }
    let mut b = CatBuilder::new();
    for x in c.objects() {
        b.object(c.obj_name(x));
    }
    let mut idx = vec![usize::MAX; c.num_morphisms()];
    let mut back = vec![0; c.num_objects()];
    for x in c.objects() {
        idx[c.id(x)] = b.identity(x);
        back[b.identity(x)] = c.id(x);
    }
    for m in s.members() {
        if !c.is_identity(m) {
            idx[m] = b.morphism(c.mor_name(m), c.src(m), c.tgt(m));
            back.push(m);
        }
    }
    for f in s.members() {
        for &g in c.out_of(c.tgt(f)) {
            if s.contains(g) {
                b.compose(idx[g], idx[f], idx[c.compose(g, f)]);
            }
        }
    }
    let sub = Arc::new(b.build_unchecked());
    Functor::new(sub, c.clone(), c.objects().collect(), back)
}

/// The heritability statements that can be checked concretely.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Heritability {
    /// `S` permutative wrt `U`, `U∘T ⊆ U` ⇒ `T` permutative wrt `U`.
    PermutativeToCofinalSubclass,
    /// `S` reversible wrt `U` ⇒ `T` reversible wrt `U`.
    ReversibleToCofinalSubclass,
    /// `T` permutative wrt `U`, `T∘U ⊆ U` ⇒ `S` permutative wrt `U`.
    PermutativeFromCofinalSubclass,
    /// Multiplicative, strictly multiplicative and saturated pull back.
    PullbackClosure,
    /// Cofinality pulls back along full essentially surjective functors when `T` is strictly multiplicative.
    PullbackCofinal,
    /// The same without requiring `T` strictly multiplicative. This version is false.
    PullbackCofinalUnguarded,
    /// Permutativity pulls back along equivalences.
    PullbackPermutative,
    /// Reversibility pulls back along equivalences.
    PullbackReversible,
}

impl Heritability {
    pub const ALL: [Heritability; 8] = [
        Heritability::PermutativeToCofinalSubclass,
        Heritability::ReversibleToCofinalSubclass,
        Heritability::PermutativeFromCofinalSubclass,
        Heritability::PullbackClosure,
        Heritability::PullbackCofinal,
        Heritability::PullbackCofinalUnguarded,
        Heritability::PullbackPermutative,
        Heritability::PullbackReversible,
    ];

    /// Command-line identifier.
    pub fn id(self) -> &'static str {
        match self {
            Heritability::PermutativeToCofinalSubclass => "1.4.1",
            Heritability::ReversibleToCofinalSubclass => "1.4.2",
            Heritability::PermutativeFromCofinalSubclass => "1.4.3",
            Heritability::PullbackClosure => "1.6.1",
            Heritability::PullbackCofinal => "1.6.2",
            Heritability::PullbackCofinalUnguarded => "1.6.2-literal",
            Heritability::PullbackPermutative => "1.6.3",
            Heritability::PullbackReversible => "1.6.4",
        }
    }

    pub fn from_id(s: &str) -> Option<Heritability> {
        Heritability::ALL.into_iter().find(|h| h.id() == s)
    }

    pub fn needs_functor(self) -> bool {
        !matches!(
            self,
            Heritability::PermutativeToCofinalSubclass
                | Heritability::ReversibleToCofinalSubclass
                | Heritability::PermutativeFromCofinalSubclass
        )
    }

    fn name(self) -> &'static str {
        match self {
            Heritability::PermutativeToCofinalSubclass => "permutative-to-cofinal-subclass",
            Heritability::ReversibleToCofinalSubclass => "reversible-to-cofinal-subclass",
            Heritability::PermutativeFromCofinalSubclass => "permutative-from-cofinal-subclass",
            Heritability::PullbackClosure => "pullback-closure",
            Heritability::PullbackCofinal => "pullback-cofinal",
            Heritability::PullbackCofinalUnguarded => "pullback-cofinal-unguarded",
            Heritability::PullbackPermutative => "pullback-permutative",
            Heritability::PullbackReversible => "pullback-reversible",
        }
    }
}

/// Inputs to [`heritability_check`]. Classes live on `cat`; for the pullback
/// statements `cat` is the codomain of `functor`.
#[derive(Clone, Debug)]
pub struct HeritabilityInputs {
    pub cat: Arc<FinCat>,
    pub s: MorClass,
    pub t: MorClass,
    pub u: Option<MorClass>,
    pub functor: Option<Functor>,
}

/// Evaluates "hypotheses ⇒ conclusion": vacuous when a hypothesis fails,
/// otherwise the verdict of the conclusion.
pub fn heritability_check(h: Heritability, inp: &HeritabilityInputs) -> Result<Verdict> {
    let c = &*inp.cat;
    inp.s.check_owner(c)?;
    inp.t.check_owner(c)?;
    let name = h.name();
    if !h.needs_functor() {
        let u = inp
            .u
            .as_ref()
            .ok_or_else(|| Error::Invalid(format!("{} needs a class U", h.id())))?;
        u.check_owner(c)?;
        let (s, t) = (&inp.s, &inp.t);
        let mut hyps: Vec<(&str, bool)> = vec![(
            "T right cofinal in S",
            has_property(c, Property::RightCofinal, s, Some(t))?,
        )];
        let conclusion = match h {
            Heritability::PermutativeToCofinalSubclass => {
                hyps.push((
                    "S right permutative wrt U",
                    has_property(c, Property::RightPermutative, s, Some(u))?,
                ));
                hyps.push(("U∘T ⊆ U", compose_classes(c, u, t)?.is_subset(u)));
                (Property::RightPermutative, t)
            }
            Heritability::ReversibleToCofinalSubclass => {
                hyps.push((
                    "S right reversible wrt U",
                    has_property(c, Property::RightReversible, s, Some(u))?,
                ));
                (Property::RightReversible, t)
            }
            _ => {
                hyps.push((
                    "T right permutative wrt U",
                    has_property(c, Property::RightPermutative, t, Some(u))?,
                ));
                hyps.push(("T∘U ⊆ U", compose_classes(c, t, u)?.is_subset(u)));
                (Property::RightPermutative, s)
            }
        };
        if let Some((why, _)) = hyps.iter().find(|(_, ok)| !ok) {
            return Ok(Verdict::vacuous(name, format!("hypothesis failed: {why}")));
        }
        let v = class_property(c, conclusion.0, conclusion.1, Some(u))?;
        return Ok(relabel(v, name));
    }

    let phi = inp
        .functor
        .as_ref()
        .ok_or_else(|| Error::Invalid(format!("{} needs a functor", h.id())))?;
    if phi.cod.tag() != c.tag() {
        return Err(Error::OwnerMismatch);
    }
    if inp.s.is_empty() {
        return Err(Error::EmptyClass);
    }
    let d = &*phi.dom;
    let ps = pullback_class(phi, &inp.s)?;
    let (s, t) = (&inp.s, &inp.t);
    match h {
        Heritability::PullbackClosure => {
            let mut parts = Vec::new();
            for p in [
                Property::Multiplicative,
                Property::StrictlyMultiplicative,
                Property::Saturated,
            ] {
                if has_property(c, p, s, None)? {
                    parts.push(class_property(d, p, &ps, None)?);
                } else {
                    parts.push(Verdict::vacuous(
                        p.name(),
                        format!("hypothesis failed: S {}", p.name()),
                    ));
                }
            }
            if parts.iter().all(|v| v.is_vacuous()) {
                return Ok(
                    Verdict::vacuous(name, "S has none of the closure properties")
                        .with_parts(parts),
                );
            }
            Ok(Verdict::all(name, parts))
        }
        _ => {
            let props = functor_check(phi);
            let mut hyps: Vec<(&str, bool)> = Vec::new();
            match h {
                Heritability::PullbackCofinal | Heritability::PullbackCofinalUnguarded => {
                    hyps.push(("functor full", props.full));
                    hyps.push((
                        "functor essentially surjective",
                        props.essentially_surjective,
                    ));
                    hyps.push((
                        "T right cofinal in S",
                        has_property(c, Property::RightCofinal, s, Some(t))?,
                    ));
                    if h == Heritability::PullbackCofinal {
                        hyps.push((
                            "T strictly multiplicative",
                            has_property(c, Property::StrictlyMultiplicative, t, None)?,
                        ));
                    }
                }
                Heritability::PullbackPermutative => {
                    hyps.push(("functor an equivalence", props.equivalence));
                    hyps.push((
                        "S strictly multiplicative",
                        has_property(c, Property::StrictlyMultiplicative, s, None)?,
                    ));
                    hyps.push((
                        "T strictly multiplicative",
                        has_property(c, Property::StrictlyMultiplicative, t, None)?,
                    ));
                    hyps.push((
                        "S right permutative wrt T",
                        has_property(c, Property::RightPermutative, s, Some(t))?,
                    ));
                }
                _ => {
                    hyps.push(("functor an equivalence", props.equivalence));
                    hyps.push((
                        "S strictly multiplicative",
                        has_property(c, Property::StrictlyMultiplicative, s, None)?,
                    ));
                    hyps.push((
                        "S right reversible wrt T",
                        has_property(c, Property::RightReversible, s, Some(t))?,
                    ));
                }
            }
            if let Some((why, _)) = hyps.iter().find(|(_, ok)| !ok) {
                return Ok(Verdict::vacuous(name, format!("hypothesis failed: {why}")));
            }
            let pt = MorClass::from_fn(d, |m| t.contains(phi.mor(m)));
            let p = match h {
                Heritability::PullbackPermutative => Property::RightPermutative,
                Heritability::PullbackReversible => Property::RightReversible,
                _ => Property::RightCofinal,
            };
            Ok(relabel(class_property(d, p, &ps, Some(&pt))?, name))
        }
    }
}

/// For every object `x`, the comma category `j/x` of the inclusion `j` of `T`
/// (anchors in `S`) is non-empty and cofiltered.
pub fn cofinal_homotopy_certificate(
    c: &Arc<FinCat>,
    t: &MorClass,
    s: &MorClass,
) -> Result<Verdict> {
    const P: &str = "cofinal-homotopy-certificate";
    t.check_owner(c)?;
    s.check_owner(c)?;
    let hyps = [
        (
            "T multiplicative",
            has_property(c, Property::Multiplicative, t, None)?,
        ),
        ("T ⊆ S", t.is_subset(s)),
        (
            "T right cofinal in S",
            has_property(c, Property::RightCofinal, s, Some(t))?,
        ),
        (
            "S saturated",
            has_property(c, Property::Saturated, s, None)?,
        ),
        (
            "S right localizing",
            has_property(c, Property::RightLocalizing, s, None)?,
        ),
    ];
    if let Some((why, _)) = hyps.iter().find(|(_, ok)| !ok) {
        return Ok(Verdict::vacuous(P, format!("hypothesis failed: {why}")));
    }
    let j = wide_subcategory(c, t)?;
    let mut parts = Vec::new();
    for x in c.objects() {
        let comma = comma_category(&j, x, Direction::Over, Some(s))?;
        let mut v = is_cofiltered(&comma.cat);
        v.property = format!("j/{} cofiltered", c.obj_name(x));
        if v.is_fails() {
            let cex = Instance::new().obj("x", x);
            return Ok(Verdict::fails(P, cex).with_parts(vec![v]));
        }
        v.witness.clear();
        parts.push(v);
    }
    Ok(Verdict::all(P, parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::examples::*;
    use crate::fincat::{max_groupoid, ordinal};

    #[test]
    fn localizing_in_ordinal_one() {
        let c = ordinal(1);
        let s = MorClass::all(&c);
        let v = class_property(&c, Property::RightLocalizing, &s, None).unwrap();
        assert!(v.is_holds());
        let f = c.find_morphism("f01").unwrap();
        let has = v.parts[0]
            .witness
            .iter()
            .any(|w| w.mor_of("a") == Some(f) && w.mor_of("b") == Some(c.id(1)));
        assert!(has);
    }

    #[test]
    fn cofinal_counterexample() {
        let c = ordinal(1);
        let s = MorClass::all(&c);
        let t = MorClass::identities(&c);
        let v = class_property(&c, Property::RightCofinal, &s, Some(&t)).unwrap();
        assert!(v.is_fails());
        assert_eq!(
            v.counterexample.unwrap().mor_of("s"),
            c.find_morphism("f01")
        );
    }

    #[test]
    fn missing_second_class() {
        let c = ordinal(1);
        let s = MorClass::all(&c);
        assert!(matches!(
            class_property(&c, Property::RightOre, &s, None),
            Err(Error::MissingSecondClass(_))
        ));
    }

    #[test]
    fn owner_mismatch() {
        let a = ordinal(1);
        let b = ordinal(1);
        let s = MorClass::all(&a);
        assert_eq!(
            class_property(&b, Property::Saturated, &s, None).unwrap_err(),
            Error::OwnerMismatch
        );
    }

    #[test]
    fn groupoid_class() {
        let c = walking_iso();
        let i = max_groupoid(&c);
        for p in [
            Property::Multiplicative,
            Property::StrictlyMultiplicative,
            Property::Saturated,
            Property::RightLocalizing,
        ] {
            assert!(has_property(&c, p, &i, None).unwrap(), "{p}");
        }
    }

    #[test]
    fn unguarded_pullback_cofinality_fails() {
        let ct = Arc::new(terminal());
        let d = Arc::new(walking_iso());
        let v = d.find_morphism("v").unwrap();
        let phi = Functor::new(ct, d.clone(), vec![0], vec![d.id(0)]).unwrap();
        let s = MorClass::from_list(&d, &[d.id(0), d.id(1), v]).unwrap();
        let t = MorClass::from_list(&d, &[d.id(1), v]).unwrap();
        let inp = HeritabilityInputs {
            cat: d,
            s,
            t,
            u: None,
            functor: Some(phi),
        };
        assert!(
            heritability_check(Heritability::PullbackCofinalUnguarded, &inp)
                .unwrap()
                .is_fails()
        );
        assert!(heritability_check(Heritability::PullbackCofinal, &inp)
            .unwrap()
            .is_vacuous());
    }

    #[test]
    fn certificate_examples() {
        let c = Arc::new(ordinal(1));
        let all = MorClass::all(&c);
        assert!(cofinal_homotopy_certificate(&c, &all, &all)
            .unwrap()
            .is_holds());
        let ids = MorClass::identities(&c);
        assert!(cofinal_homotopy_certificate(&c, &ids, &all)
            .unwrap()
            .is_vacuous());
        let w = Arc::new(walking_iso());
        let i = max_groupoid(&w);
        assert!(cofinal_homotopy_certificate(&w, &i, &i).unwrap().is_holds());
    }
}
