//! Categories of right fractions `S⁻¹C` for right localizing classes.
//!
//! A morphism `x → y` is a class of spans `x ←s z →f y` with `s ∈ S`, under
//! the equivalence generated by `(s, f) ~ (s∘u, f∘u)` whenever `s∘u ∈ S`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{
    check_size, comma_category, enumerate_functors_with, functor_check, is_cofiltered,
    validate_category, Direction, FinCat, Functor, Mor, Obj,
};
use crate::morclass::{
    class_property, has_property, permutative_filler, wide_subcategory, MorClass, Property,
};
use crate::verdict::{Instance, Verdict};

/// A span `x ←denom apex →num y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub apex: Obj,
    pub denom: Mor,
    pub num: Mor,
}

impl Span {
    pub fn new(c: &FinCat, denom: Mor, num: Mor) -> Result<Span> {
        if c.src(denom) != c.src(num) {
            return Err(Error::EndpointMismatch(
                "span legs have different sources".into(),
            ));
        }
        Ok(Span {
            apex: c.src(denom),
            denom,
            num,
        })
    }

    pub fn source(&self, c: &FinCat) -> Obj {
        c.tgt(self.denom)
    }

    pub fn target(&self, c: &FinCat) -> Obj {
        c.tgt(self.num)
    }
}

/// `S⁻¹C` with its canonical functor.
#[derive(Clone, Debug)]
pub struct FractionsCat {
    pub base: Arc<FinCat>,
    pub class: MorClass,
    pub cat: Arc<FinCat>,
    /// Canonical functor `Q_S: C → S⁻¹C`.
    pub q: Functor,
    /// Least span of each morphism class.
    pub reps: Vec<Span>,
    span_class: HashMap<(Mor, Mor), Mor>,
}

fn find(p: &mut [usize], mut i: usize) -> usize {
    while p[i] != i {
        p[i] = p[p[i]];
        i = p[i];
    }
    i
}

/// All spans `x ← z → y` with denominator in `S`, ordered by (apex, denom, num).
pub fn spans_between(c: &FinCat, s: &MorClass, x: Obj, y: Obj) -> Vec<Span> {
    let mut out = Vec::new();
    for &d in c.arrows_into(x) {
        if s.contains(d) {
            for &n in c.hom(c.src(d), y) {
                out.push(Span {
                    apex: c.src(d),
                    denom: d,
                    num: n,
                });
            }
        }
    }
    out.sort();
    out
}

/// Builds `S⁻¹C`; refuses classes that are not right localizing.
pub fn localize(c: &Arc<FinCat>, s: &MorClass) -> Result<FractionsCat> {
    s.check_owner(c)?;
    let v = class_property(c, Property::RightLocalizing, s, None)?;
    if !v.is_holds() {
        let why = v
            .counterexample
            .map(|i| {
                i.render(&|x| c.obj_name(x).to_string(), &|m| {
                    c.mor_name(m).to_string()
                })
            })
            .unwrap_or_default();
        return Err(Error::RequiresRightLocalizing(why));
    }
    let no = c.num_objects();
    // global span table
    let mut spans: Vec<Span> = Vec::new();
    let mut span_id: HashMap<(Mor, Mor), usize> = HashMap::new();
    let mut block: Vec<Vec<usize>> = vec![Vec::new(); no * no];
    for x in c.objects() {
        for y in c.objects() {
            for sp in spans_between(c, s, x, y) {
                span_id.insert((sp.denom, sp.num), spans.len());
                block[x * no + y].push(spans.len());
                spans.push(sp);
            }
        }
    }
    check_size("fraction spans", spans.len())?;
    let mut parent: Vec<usize> = (0..spans.len()).collect();
    for (i, sp) in spans.iter().enumerate() {
        for &u in c.arrows_into(sp.apex) {
            let su = c.compose(sp.denom, u);
            if s.contains(su) {
                let j = span_id[&(su, c.compose(sp.num, u))];
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    // classes in (x, y, least representative) order; spans are sorted within a block,
    // so the root chosen as the minimum index is the least span
    let mut reps = Vec::new();
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut class_of_span = vec![usize::MAX; spans.len()];
    for x in c.objects() {
        for y in c.objects() {
            let mut root_class: HashMap<usize, usize> = HashMap::new();
            for &i in &block[x * no + y] {
                let r = find(&mut parent, i);
                let k = *root_class.entry(r).or_insert_with(|| {
                    reps.push(spans[r]);
                    src.push(x);
                    tgt.push(y);
                    reps.len() - 1
                });
                class_of_span[i] = k;
            }
        }
    }
    check_size("category of fractions", reps.len())?;
    let span_class: HashMap<(Mor, Mor), Mor> = spans
        .iter()
        .enumerate()
        .map(|(i, sp)| ((sp.denom, sp.num), class_of_span[i]))
        .collect();
    let ident: Vec<Mor> = c
        .objects()
        .map(|x| span_class[&(c.id(x), c.id(x))])
        .collect();
    let obj_names = c.obj_names().to_vec();
    let mor_names: Vec<String> = reps
        .iter()
        .enumerate()
        .map(|(k, sp)| {
            if ident[src[k]] == k {
                format!("id({})", c.obj_name(src[k]))
            } else {
                format!("frac({},{})", c.mor_name(sp.num), c.mor_name(sp.denom))
            }
        })
        .collect();
    let all = MorClass::all(c);
    let mut missing = None;
    let cat = FinCat::from_fn(obj_names, mor_names, src, tgt, ident, |g, f| {
        let (a, b) = (reps[f], reps[g]);
        match compose_reps(c, s, &all, a, b) {
            Some(sp) => span_class.get(&(sp.denom, sp.num)).copied(),
            None => {
                missing = Some((f, g));
                None
            }
        }
    });
    if let Some((f, g)) = missing {
        return Err(Error::Internal(format!(
            "no Ore filler for classes {f}, {g}"
        )));
    }
    let report = validate_category(&cat);
    if let Some(v) = report.violations.first() {
        return Err(Error::Internal(format!(
            "category of fractions is not lawful: {v}"
        )));
    }
    let cat = Arc::new(cat);
    let mor_map = c
        .morphisms()
        .map(|m| span_class[&(c.id(c.src(m)), m)])
        .collect();
    let q = Functor::new(c.clone(), cat.clone(), c.objects().collect(), mor_map)?;
    Ok(FractionsCat {
        base: c.clone(),
        class: s.clone(),
        cat,
        q,
        reps,
        span_class,
    })
}

fn compose_reps(c: &FinCat, s: &MorClass, all: &MorClass, a: Span, b: Span) -> Option<Span> {
    let (t2, f2) = permutative_filler(c, s, all, b.denom, a.num)?;
    Some(Span {
        apex: c.src(t2),
        denom: c.compose(a.denom, t2),
        num: c.compose(b.num, f2),
    })
}

impl FractionsCat {
    /// Morphism of `S⁻¹C` represented by a span.
    pub fn class_of(&self, sp: &Span) -> Option<Mor> {
        self.span_class.get(&(sp.denom, sp.num)).copied()
    }

    /// All spans `x → y`.
    pub fn spans(&self, x: Obj, y: Obj) -> Vec<Span> {
        spans_between(&self.base, &self.class, x, y)
    }

    /// Inverse class `frac(id, s)` of `Q(s)` for `s ∈ S`.
    pub fn inverse_of_denominator(&self, s: Mor) -> Option<Mor> {
        if !self.class.contains(s) {
            return None;
        }
        self.class_of(&Span {
            apex: self.base.src(s),
            denom: s,
            num: self.base.id(self.base.src(s)),
        })
    }
}

/// Whether two spans with the same endpoints are identified.
pub fn span_equal(fr: &FractionsCat, a: &Span, b: &Span) -> Result<bool> {
    let c = &fr.base;
    if a.source(c) != b.source(c) || a.target(c) != b.target(c) {
        return Err(Error::EndpointMismatch(
            "spans have different endpoints".into(),
        ));
    }
    let ka = fr
        .class_of(a)
        .ok_or_else(|| Error::Invalid("first span has denominator outside S".into()))?;
    let kb = fr
        .class_of(b)
        .ok_or_else(|| Error::Invalid("second span has denominator outside S".into()))?;
    Ok(ka == kb)
}

/// `b ∘ a` computed with the first filler found.
pub fn compose_spans(fr: &FractionsCat, a: &Span, b: &Span) -> Result<Span> {
    let c = &fr.base;
    if a.target(c) != b.source(c) {
        return Err(Error::EndpointMismatch("spans do not chain".into()));
    }
    compose_reps(c, &fr.class, &MorClass::all(c), *a, *b)
        .ok_or_else(|| Error::Internal("no Ore filler for a right localizing class".into()))
}

/// All fillers `(t', f')` with `t' ∈ S` and `denom(b) ∘ f' = num(a) ∘ t'`.
pub fn all_fillers(c: &FinCat, s: &MorClass, a: &Span, b: &Span) -> Vec<(Mor, Mor)> {
    let mut out = Vec::new();
    for &t2 in c.arrows_into(a.apex) {
        if !s.contains(t2) {
            continue;
        }
        let lhs = c.compose(a.num, t2);
        for &f2 in c.hom(c.src(t2), b.apex) {
            if c.compose(b.denom, f2) == lhs {
                out.push((t2, f2));
            }
        }
    }
    out
}

/// Every filler of every chaining pair of spans lands in the same class.
pub fn filler_independence_check(fr: &FractionsCat) -> Verdict {
    const P: &str = "filler-independence";
    let c = &fr.base;
    for x in c.objects() {
        for y in c.objects() {
            for a in fr.spans(x, y) {
                for z in c.objects() {
                    for b in fr.spans(y, z) {
                        let mut class = None;
                        for (t2, f2) in all_fillers(c, &fr.class, &a, &b) {
                            let sp = Span {
                                apex: c.src(t2),
                                denom: c.compose(a.denom, t2),
                                num: c.compose(b.num, f2),
                            };
                            let k = fr.class_of(&sp);
                            match (class, k) {
                                (None, Some(k)) => class = Some(k),
                                (Some(k0), Some(k)) if k0 == k => {}
                                _ => {
                                    return Verdict::fails(
                                        P,
                                        Instance::new()
                                            .mor("a.denom", a.denom)
                                            .mor("a.num", a.num)
                                            .mor("b.denom", b.denom)
                                            .mor("b.num", b.num)
                                            .mor("t'", t2)
                                            .mor("f'", f2),
                                    )
                                }
                            }
                        }
                        if class.is_none() {
                            return Verdict::fails(
                                P,
                                Instance::new()
                                    .text("condition", "no filler")
                                    .mor("a.num", a.num)
                                    .mor("b.denom", b.denom),
                            );
                        }
                    }
                }
            }
        }
    }
    Verdict::holds(P)
}

/// `Q(s)` is invertible with inverse `frac(id, s)` for every `s ∈ S`.
pub fn q_inverts_check(fr: &FractionsCat) -> Verdict {
    const P: &str = "q-inverts-class";
    let (c, d) = (&fr.base, &fr.cat);
    for s in fr.class.members() {
        let qs = fr.q.mor(s);
        let ok = fr.inverse_of_denominator(s).is_some_and(|inv| {
            d.compose(inv, qs) == d.id(c.src(s)) && d.compose(qs, inv) == d.id(c.tgt(s))
        });
        if !ok {
            return Verdict::fails(P, Instance::new().mor("s", s));
        }
    }
    Verdict::holds(P)
}

/// The factorization `G` with `G ∘ Q_S = F`.
pub fn universal_factorization(f: &Functor, fr: &FractionsCat) -> Result<Functor> {
    if f.dom.tag() != fr.base.tag() {
        return Err(Error::OwnerMismatch);
    }
    let x = &f.cod;
    let mut inv = HashMap::new();
    for s in fr.class.members() {
        match x.inverse(f.mor(s)) {
            Some(i) => {
                inv.insert(s, i);
            }
            None => return Err(Error::DoesNotInvert(fr.base.mor_name(s).to_string())),
        }
    }
    let mor_map = fr
        .reps
        .iter()
        .map(|sp| x.compose(f.mor(sp.num), inv[&sp.denom]))
        .collect();
    let g = Functor::new(fr.cat.clone(), x.clone(), f.obj_map.clone(), mor_map)?;
    let back = fr.q.then(&g)?;
    if back.mor_map != f.mor_map || back.obj_map != f.obj_map {
        return Err(Error::Internal(
            "factorization does not restrict to F".into(),
        ));
    }
    Ok(g)
}

/// Composition with `Q_S` is a bijection from functors `S⁻¹C → X` onto the
/// `S`-inverting functors `C → X`.
pub fn universal_property_check(fr: &FractionsCat, x: &FinCat) -> Verdict {
    const P: &str = "universal-property";
    let c = &fr.base;
    let mut inverting: HashMap<(Vec<Obj>, Vec<Mor>), bool> = HashMap::new();
    enumerate_functors_with(c, x, &mut |o, m| {
        if fr.class.members().iter().all(|&s| x.is_iso(m[s])) {
            inverting.insert((o.to_vec(), m.to_vec()), false);
        }
        true
    });
    let mut failure = None;
    let q = &fr.q;
    enumerate_functors_with(&fr.cat, x, &mut |o, m| {
        let key = (
            q.obj_map.iter().map(|&y| o[y]).collect::<Vec<_>>(),
            q.mor_map.iter().map(|&k| m[k]).collect::<Vec<_>>(),
        );
        match inverting.get_mut(&key) {
            Some(seen) if !*seen => {
                *seen = true;
                true
            }
            Some(_) => {
                failure = Some("two functors restrict to the same functor");
                false
            }
            None => {
                failure = Some("restriction does not invert S");
                false
            }
        }
    });
    if let Some(why) = failure {
        return Verdict::fails(P, Instance::new().text("reason", why));
    }
    if inverting.values().any(|seen| !seen) {
        return Verdict::fails(
            P,
            Instance::new().text("reason", "an S-inverting functor does not factor"),
        );
    }
    Verdict::holds(P).with_note(format!("{} S-inverting functors", inverting.len()))
}

/// Every comma category `x/Q_S` is non-empty and cofiltered.
pub fn q_homotopy_certificate(fr: &FractionsCat) -> Result<Verdict> {
    const P: &str = "q-homotopy-certificate";
    let mut parts = Vec::new();
    for x in fr.cat.objects() {
        let comma = comma_category(&fr.q, x, Direction::Under, None)?;
        let mut v = is_cofiltered(&comma.cat);
        v.property = format!("{}/Q cofiltered", fr.cat.obj_name(x));
        v.witness.clear();
        if v.is_fails() {
            return Ok(Verdict::fails(P, Instance::new().obj("x", x)).with_parts(vec![v]));
        }
        parts.push(v);
    }
    Ok(Verdict::all(P, parts))
}

/// Decides the isomorphism characterization and the groupoid comparison.
pub fn fraction_iso_check(c: &Arc<FinCat>, s: &MorClass) -> Result<Verdict> {
    const P: &str = "fraction-iso-check";
    s.check_owner(c)?;
    if !has_property(c, Property::Saturated, s, None)? {
        return Ok(Verdict::vacuous(P, "hypothesis failed: S saturated"));
    }
    if !has_property(c, Property::RightLocalizing, s, None)? {
        return Ok(Verdict::vacuous(P, "hypothesis failed: S right localizing"));
    }
    let fr = localize(c, s)?;
    let d = &fr.cat;
    // (i) a span is invertible exactly when its numerator is in S
    for x in c.objects() {
        for y in c.objects() {
            for sp in fr.spans(x, y) {
                let k = fr.class_of(&sp).expect("span class");
                if d.is_iso(k) != s.contains(sp.num) {
                    return Ok(Verdict::fails(
                        P,
                        Instance::new()
                            .text("condition", "iso characterization")
                            .mor("denom", sp.denom)
                            .mor("num", sp.num),
                    ));
                }
            }
        }
    }
    // (ii) comparison of the groupoid localization with the maximal groupoid
    let cmp = groupoid_comparison(&fr)?;
    let props = functor_check(&cmp);
    if !props.equivalence {
        return Ok(Verdict::fails(
            P,
            Instance::new().text("condition", "comparison not an equivalence"),
        ));
    }
    Ok(Verdict::holds(P).with_note("comparison functor is an equivalence"))
}

/// The functor `S⁻¹S → (S⁻¹C)^×` induced by `Q_S`.
pub fn groupoid_comparison(fr: &FractionsCat) -> Result<Functor> {
    let c = &fr.base;
    let j = wide_subcategory(c, &fr.class)?;
    let w = j.dom.clone();
    let all_w = MorClass::all(&w);
    let frw = localize(&w, &all_w)?;
    let iso = crate::fincat::max_groupoid(&fr.cat);
    let g = wide_subcategory(&fr.cat, &iso)?;
    let mut pos = vec![usize::MAX; fr.cat.num_morphisms()];
    for (k, &m) in g.mor_map.iter().enumerate() {
        pos[m] = k;
    }
    let mut mor_map = Vec::with_capacity(frw.cat.num_morphisms());
    for sp in &frw.reps {
        let cs = Span {
            apex: sp.apex,
            denom: j.mor(sp.denom),
            num: j.mor(sp.num),
        };
        let k = fr
            .class_of(&cs)
            .ok_or_else(|| Error::Internal("comparison span missing".into()))?;
        if pos[k] == usize::MAX {
            return Err(Error::Internal(format!(
                "class {} is not invertible",
                fr.cat.mor_name(k)
            )));
        }
        mor_map.push(pos[k]);
    }
    Functor::new(
        frw.cat.clone(),
        g.dom.clone(),
        c.objects().collect(),
        mor_map,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::examples::*;
    use crate::fincat::{max_groupoid, ordinal};

    #[test]
    fn ordinal_one_localized() {
        let c = Arc::new(ordinal(1));
        let s = MorClass::all(&c);
        let fr = localize(&c, &s).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(fr.cat.hom(x, y).len(), 1);
            }
        }
        let f = c.find_morphism("f01").unwrap();
        let a = Span::new(&c, f, c.id(0)).unwrap();
        let b = Span::new(&c, c.id(0), f).unwrap();
        let ab = compose_spans(&fr, &a, &b).unwrap();
        assert_eq!(fr.class_of(&ab), Some(fr.cat.id(1)));
        assert!(filler_independence_check(&fr).is_holds());
        assert!(q_inverts_check(&fr).is_holds());
        assert!(q_homotopy_certificate(&fr).unwrap().is_holds());
    }

    #[test]
    fn idempotent_collapses() {
        let c = Arc::new(idempotent());
        let s = MorClass::all(&c);
        let fr = localize(&c, &s).unwrap();
        assert_eq!(fr.cat.num_morphisms(), 1);
        let p = c.find_morphism("p").unwrap();
        let a = Span::new(&c, c.id(0), c.id(0)).unwrap();
        let b = Span::new(&c, p, p).unwrap();
        assert!(span_equal(&fr, &a, &b).unwrap());
    }

    #[test]
    fn isomorphisms_localize_trivially() {
        let c = Arc::new(walking_iso());
        let fr = localize(&c, &max_groupoid(&c)).unwrap();
        assert_eq!(fr.cat.num_morphisms(), c.num_morphisms());
        assert!(fraction_iso_check(&c, &MorClass::all(&c))
            .unwrap()
            .is_holds());
    }

    #[test]
    fn refuses_non_localizing() {
        let c = Arc::new(parallel_pair());
        let s = MorClass::all(&c);
        assert!(matches!(
            localize(&c, &s),
            Err(Error::RequiresRightLocalizing(_))
        ));
    }

    #[test]
    fn factorization_through_walking_iso() {
        let c = Arc::new(ordinal(1));
        let s = MorClass::all(&c);
        let fr = localize(&c, &s).unwrap();
        let x = Arc::new(walking_iso());
        let u = x.find_morphism("u").unwrap();
        let v = x.find_morphism("v").unwrap();
        let f = Functor::new(c.clone(), x.clone(), vec![0, 1], vec![x.id(0), x.id(1), u]).unwrap();
        let g = universal_factorization(&f, &fr).unwrap();
        let fm = c.find_morphism("f01").unwrap();
        let inv = fr.inverse_of_denominator(fm).unwrap();
        assert_eq!(g.mor(inv), v);
        assert!(universal_property_check(&fr, &x).is_holds());
        let ids = MorClass::identities(&c);
        assert!(fraction_iso_check(&c, &ids).unwrap().is_holds());
        assert!(fraction_iso_check(&c, &s).unwrap().is_holds());
    }
}
