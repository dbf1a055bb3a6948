//! Verification harnesses: one per registered id, each a sweep over the
//! category corpus or a seeded random family, with minimized reproducers for
//! any falsified instance.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use catfrac::corpus::{for_each_category, CorpusSpec};
use catfrac::diagcat::{chain_heritability_check, ChainHeritability, ChainInputs};
use catfrac::fincat::{
    enumerate_functors, functor_check, is_cofiltered, is_mono, max_groupoid, CatBuilder, FinCat,
    Functor, Mor, Obj,
};
use catfrac::fractions::{
    filler_independence_check, fraction_iso_check, groupoid_comparison, localize,
    q_homotopy_certificate, q_inverts_check, universal_property_check,
};
use catfrac::morclass::{has_property, heritability_check, Heritability, HeritabilityInputs};
use catfrac::nerve::{boundary, homology_of, nerve};
use catfrac::waldhausen::{
    claim_verifier, fibration_hypotheses_report, validate_cofcat, validate_waldcat, CofCat,
    CofPolicy, Mode, WaldCat,
};
use catfrac::zdiag::{
    localized_hom_check, random_diagram, recursive_matches_flat, DiagObj, MultSetZ,
};
use catfrac::zsuite::{defcor_suite, examples as zx, SuiteConfig};
use catfrac::{Error, MorClass, Property, Result, Status, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fcat::{self, FcatDocument};
use crate::zdformat::{self, ZdDocument};

/// Every id accepted by `verify`.
pub const IDS: [&str; 18] = [
    "1.4.1",
    "1.4.2",
    "1.4.3",
    "1.6.1",
    "1.6.2",
    "1.6.2-literal",
    "1.6.3",
    "1.6.4",
    "1.8.1",
    "1.8.2",
    "1.8.3",
    "2.3",
    "3.1",
    "3.3",
    "3.3-strong",
    "4.3",
    "4.4",
    "nerve",
];

pub fn is_registered(id: &str) -> bool {
    IDS.contains(&id)
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub max_objects: usize,
    pub max_morphisms: usize,
    /// Combinations examined per category; all are taken when there are fewer.
    pub samples: usize,
    pub seed: u64,
    pub deadline: Option<Instant>,
    /// Chain lengths for the chain statements.
    pub n_values: Vec<usize>,
    /// Diagram shapes for the localization oracle.
    pub shapes: Vec<Vec<usize>>,
    /// Largest morphism count of the target categories in the universal-property check.
    pub target_max_morphisms: usize,
    /// Largest `n` and `m` for the claim verifier.
    pub claim_max: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            max_objects: 3,
            max_morphisms: 8,
            samples: 10_000,
            seed: 0,
            deadline: None,
            n_values: vec![1, 2],
            shapes: vec![vec![1], vec![1, 1]],
            target_max_morphisms: 6,
            claim_max: 2,
        }
    }
}

/// A falsified instance, replayable through [`run_repro`].
#[derive(Clone, Debug)]
pub struct Failure {
    pub verdict: Verdict,
    pub repro: Repro,
}

#[derive(Clone, Debug, Default)]
pub struct SweepSummary {
    pub id: String,
    pub seed: u64,
    pub holds: usize,
    pub vacuous: usize,
    pub fails: usize,
    pub errors: usize,
    /// Errors that were size-limit refusals.
    pub size_errors: usize,
    pub categories: usize,
    /// Whether every instance within the bounds was examined.
    pub complete: bool,
    /// Holding instances per part label.
    pub nonvacuous: BTreeMap<String, usize>,
    pub first_error: Option<String>,
    pub failure: Option<Failure>,
    pub notes: Vec<String>,
}

impl SweepSummary {
    fn new(id: &str, seed: u64) -> Self {
        SweepSummary {
            id: id.to_string(),
            seed,
            ..Default::default()
        }
    }

    fn record(&mut self, part: &str, v: &Verdict, repro: impl FnOnce() -> Repro) {
        match v.status {
            Status::Holds => {
                self.holds += 1;
                *self.nonvacuous.entry(part.to_string()).or_default() += 1;
            }
            Status::Vacuous => self.vacuous += 1,
            Status::Fails => {
                self.fails += 1;
                *self.nonvacuous.entry(part.to_string()).or_default() += 1;
                if self.failure.is_none() {
                    let r = minimize(repro());
                    let verdict = run_repro(&r).unwrap_or_else(|_| v.clone());
                    self.failure = Some(Failure { verdict, repro: r });
                }
            }
        }
    }

    fn error(&mut self, e: Error) {
        self.errors += 1;
        if matches!(e, Error::SizeLimitExceeded { .. }) {
            self.size_errors += 1;
        }
        if self.first_error.is_none() {
            self.first_error = Some(e.to_string());
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "verify {}: {} holds, {} vacuous, {} fails, {} errors over {} categories (seed {}, {})\n",
            self.id,
            self.holds,
            self.vacuous,
            self.fails,
            self.errors,
            self.categories,
            self.seed,
            if self.complete { "complete" } else { "stopped early" }
        );
        for (k, v) in &self.nonvacuous {
            let _ = writeln!(s, "  non-vacuous {k}: {v}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        if let Some(e) = &self.first_error {
            let _ = writeln!(s, "  first error: {e}");
        }
        s
    }
}

// ---------------------------------------------------------------- reproducers

/// A self-contained failing instance: `repro v1` text with embedded documents.
#[derive(Clone, Debug)]
pub struct Repro {
    pub harness: String,
    pub params: Vec<(String, String)>,
    pub cod: Option<FcatDocument>,
    pub dom: Option<FcatDocument>,
    pub functor: Option<(Vec<Obj>, Vec<Mor>)>,
    pub zdiag: Option<ZdDocument>,
}

impl Repro {
    fn new(harness: &str) -> Repro {
        Repro {
            harness: harness.to_string(),
            params: vec![],
            cod: None,
            dom: None,
            functor: None,
            zdiag: None,
        }
    }

    fn param(&self, k: &str) -> Option<&str> {
        self.params.iter().find(|p| p.0 == k).map(|p| p.1.as_str())
    }

    fn param_usize(&self, k: &str, default: usize) -> Result<usize> {
        match self.param(k) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Invalid(format!("bad parameter {k} = {v}"))),
        }
    }

    fn cod(&self) -> Result<&FcatDocument> {
        self.cod
            .as_ref()
            .ok_or_else(|| Error::Invalid("reproducer lacks a category".into()))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("repro v1\nharness {}\n", self.harness);
        for (k, v) in &self.params {
            let _ = writeln!(s, "param {k} {v}");
        }
        for (tag, doc) in [("cod", &self.cod), ("dom", &self.dom)] {
            if let Some(d) = doc {
                let _ = write!(s, "begin fcat {tag}\n{}end\n", fcat::serialize(d));
            }
        }
        if let (Some((om, mm)), Some(d), Some(c)) = (&self.functor, &self.dom, &self.cod) {
            let names: Vec<&str> = om.iter().map(|&x| c.cat.obj_name(x)).collect();
            let _ = writeln!(s, "functor obj {}", names.join(" "));
            let names: Vec<&str> = mm.iter().map(|&m| c.cat.mor_name(m)).collect();
            let _ = writeln!(s, "functor mor {}", names.join(" "));
            debug_assert_eq!(mm.len(), d.cat.num_morphisms());
        }
        if let Some(z) = &self.zdiag {
            let _ = write!(s, "begin zdiag\n{}end\n", zdformat::serialize(z));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Repro> {
        let lines: Vec<&str> = text.lines().collect();
        let perr = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        if lines.first().map(|l| l.trim()) != Some("repro v1") {
            return Err(perr(1, "expected header `repro v1`"));
        }
        let mut r = Repro::new("");
        let mut fobj: Option<(usize, Vec<String>)> = None;
        let mut fmor: Option<(usize, Vec<String>)> = None;
        let mut i = 1;
        while i < lines.len() {
            let ln = i + 1;
            let tok: Vec<&str> = lines[i].split_whitespace().collect();
            i += 1;
            match tok.as_slice() {
                [] => {}
                ["harness", id] => r.harness = id.to_string(),
                ["param", k, v] => r.params.push((k.to_string(), v.to_string())),
                ["begin", kind, rest @ ..] => {
                    let start = i;
                    while i < lines.len() && lines[i].trim() != "end" {
                        i += 1;
                    }
                    if i == lines.len() {
                        return Err(perr(ln, "unterminated block"));
                    }
                    let body = lines[start..i].join("\n");
                    i += 1;
                    let shift = |e: Error| match e {
                        Error::Parse { line, msg } => Error::Parse {
                            line: line + start,
                            msg,
                        },
                        other => other,
                    };
                    match (*kind, rest) {
                        ("fcat", ["cod"]) => r.cod = Some(fcat::parse(&body).map_err(shift)?),
                        ("fcat", ["dom"]) => r.dom = Some(fcat::parse(&body).map_err(shift)?),
                        ("zdiag", []) => r.zdiag = Some(zdformat::parse(&body).map_err(shift)?),
                        _ => return Err(perr(ln, "unknown block")),
                    }
                }
                ["functor", "obj", names @ ..] => {
                    fobj = Some((ln, names.iter().map(|s| s.to_string()).collect()))
                }
                ["functor", "mor", names @ ..] => {
                    fmor = Some((ln, names.iter().map(|s| s.to_string()).collect()))
                }
                _ => return Err(perr(ln, "unknown line")),
            }
        }
        if !is_registered(&r.harness) {
            return Err(perr(2, "unknown or missing harness id"));
        }
        if let (Some((l1, o)), Some((l2, m))) = (fobj, fmor) {
            let c = r
                .cod
                .as_ref()
                .ok_or_else(|| perr(l1, "functor without a codomain"))?;
            let om = o
                .iter()
                .map(|n| {
                    c.cat
                        .find_object(n)
                        .ok_or_else(|| perr(l1, "unknown object"))
                })
                .collect::<Result<Vec<_>>>()?;
            let mm = m
                .iter()
                .map(|n| {
                    c.cat
                        .find_morphism(n)
                        .ok_or_else(|| perr(l2, "unknown morphism"))
                })
                .collect::<Result<Vec<_>>>()?;
            r.functor = Some((om, mm));
        }
        Ok(r)
    }
}

fn class_doc(c: &Arc<FinCat>, classes: &[(&str, &MorClass)]) -> FcatDocument {
    let mut d = FcatDocument::new(c.clone());
    for (n, k) in classes {
        d.set_class(n, (*k).clone());
    }
    d
}

/// Re-runs the harness on the embedded instance.
pub fn run_repro(r: &Repro) -> Result<Verdict> {
    let id = r.harness.as_str();
    if let Some(h) = Heritability::from_id(id) {
        let cod = r.cod()?;
        let cl = |n: &str| cod.class(n).cloned();
        if h.needs_functor() {
            let dom = r
                .dom
                .as_ref()
                .ok_or_else(|| Error::Invalid("reproducer lacks a domain".into()))?;
            let (om, mm) = r
                .functor
                .clone()
                .ok_or_else(|| Error::Invalid("reproducer lacks a functor".into()))?;
            let f = Functor::new(dom.cat.clone(), cod.cat.clone(), om, mm)?;
            let t = cl("T").unwrap_or_else(|_| MorClass::empty(&cod.cat));
            return pullback_instance(h, &f, &cl("S")?, &t);
        }
        return subclass_instance(h, &cod.cat, &cl("S")?, &cl("T")?, &cl("U")?);
    }
    if let Some(p) = ChainHeritability::from_id(id) {
        let cod = r.cod()?;
        let v = cod.class("V").ok().cloned();
        return chain_heritability_check(
            p,
            &ChainInputs {
                cat: cod.cat.clone(),
                s: cod.class("S")?.clone(),
                t: cod.class("T")?.clone(),
                u: cod.class("U")?.clone(),
                v,
                n: r.param_usize("n", 1)?,
            },
        );
    }
    match id {
        "2.3" => {
            let cod = r.cod()?;
            let w = waldcat_of(cod)?;
            claim_instance(&w, r.param_usize("claim-max", 2)?)
        }
        "3.1" => {
            let cod = r.cod()?;
            let targets = targets_up_to(r.param_usize("target-max-mor", 6)?)?;
            fractions_instance(&cod.cat, cod.class("S")?, &targets)
        }
        "3.3" | "3.3-strong" => {
            let cod = r.cod()?;
            lemma33_instance(&cod.cat, cod.class("S")?, id == "3.3-strong")
        }
        "nerve" => nerve_instance(&r.cod()?.cat),
        "4.3" => {
            let z = r
                .zdiag
                .as_ref()
                .ok_or_else(|| Error::Invalid("reproducer lacks diagrams".into()))?;
            let s = parse_invert(r.param("invert").unwrap_or("2"))?;
            diagram_instance(&z.objects[0].1, &z.objects[1].1, &s)
        }
        "4.4" => suite_instance(r.param("instance").unwrap_or("mixed-torsion")),
        _ => Err(Error::Invalid(format!("unknown harness {id}"))),
    }
}

/// Shrinks the classes of a failing reproducer one member at a time while it keeps failing.
pub fn minimize(mut r: Repro) -> Repro {
    let fails = |r: &Repro| run_repro(r).map(|v| v.is_fails()).unwrap_or(false);
    if !fails(&r) {
        return r;
    }
    let Some(cod) = r.cod.clone() else { return r };
    for ci in 0..cod.classes.len() {
        let members = r.cod.as_ref().unwrap().classes[ci].1.members();
        for m in members {
            let mut trial = r.clone();
            trial.cod.as_mut().unwrap().classes[ci].1.remove(m);
            if fails(&trial) {
                r = trial;
            }
        }
    }
    r
}

// ---------------------------------------------------------------- instances

fn subclass_instance(
    h: Heritability,
    c: &Arc<FinCat>,
    s: &MorClass,
    t: &MorClass,
    u: &MorClass,
) -> Result<Verdict> {
    heritability_check(
        h,
        &HeritabilityInputs {
            cat: c.clone(),
            s: s.clone(),
            t: t.clone(),
            u: Some(u.clone()),
            functor: None,
        },
    )
}

fn pullback_instance(h: Heritability, f: &Functor, s: &MorClass, t: &MorClass) -> Result<Verdict> {
    heritability_check(
        h,
        &HeritabilityInputs {
            cat: f.cod.clone(),
            s: s.clone(),
            t: t.clone(),
            u: None,
            functor: Some(f.clone()),
        },
    )
}

/// All eleven claim items for every `1 ≤ n, m ≤ max`; vacuous when a hypothesis fails.
pub fn claim_instance(w: &WaldCat, max: usize) -> Result<Verdict> {
    let hyps = fibration_hypotheses_report(w)?;
    if let Some(h) = hyps.iter().find(|h| !h.is_holds()) {
        return Ok(Verdict::vacuous(
            "claim",
            format!("hypothesis failed: {}", h.property),
        ));
    }
    let mut parts = Vec::new();
    for n in 1..=max {
        for m in 1..=max {
            let items = claim_verifier(w, n, m, CofPolicy::default())?;
            parts.push(Verdict::all(format!("claim n={n} m={m}"), items));
        }
    }
    Ok(Verdict::all("claim", parts))
}

/// Filler independence, `Q_S` inverting `S`, the universal property against each target,
/// and hom-set preservation for the groupoid class.
pub fn fractions_instance(c: &Arc<FinCat>, s: &MorClass, targets: &[FinCat]) -> Result<Verdict> {
    if !has_property(c, Property::RightLocalizing, s, None)? {
        return Ok(Verdict::vacuous(
            "fractions",
            "hypothesis failed: S right localizing",
        ));
    }
    let fr = localize(c, s)?;
    let mut parts = vec![filler_independence_check(&fr), q_inverts_check(&fr)];
    for (k, x) in targets.iter().enumerate() {
        let mut v = universal_property_check(&fr, x);
        if v.is_fails() {
            v.property = format!("universal property against target {k}");
            parts.push(v);
            break;
        }
    }
    if !parts.iter().any(|p| p.is_fails()) {
        parts.push(Verdict::holds(format!(
            "universal property against {} targets",
            targets.len()
        )));
    }
    if *s == max_groupoid(c) {
        let same = c.objects().all(|x| {
            c.objects()
                .all(|y| fr.cat.hom(x, y).len() == c.hom(x, y).len())
        });
        parts.push(Verdict::from_bool(
            "groupoid localization keeps hom sizes",
            same,
            catfrac::Instance::new().text("reason", "hom-set sizes differ"),
        ));
    }
    Ok(Verdict::all("fractions", parts))
}

/// With `strong`, `S` must also contain every morphism that `Q_S` inverts. Without it the
/// groupoid comparison can fail, already for `S = {id}` on a nontrivial group.
pub fn lemma33_instance(c: &Arc<FinCat>, s: &MorClass, strong: bool) -> Result<Verdict> {
    if !has_property(c, Property::Saturated, s, None)?
        || !has_property(c, Property::RightLocalizing, s, None)?
    {
        return Ok(Verdict::vacuous(
            "fraction homotopy",
            "hypothesis failed: S saturated and right localizing",
        ));
    }
    let fr = localize(c, s)?;
    if strong
        && c.morphisms()
            .any(|m| !s.contains(m) && fr.cat.is_iso(fr.q.mor(m)))
    {
        return Ok(Verdict::vacuous(
            "fraction homotopy",
            "hypothesis failed: S contains every morphism Q_S inverts",
        ));
    }
    let cert = q_homotopy_certificate(&fr)?;
    let iso = fraction_iso_check(c, s)?;
    let cmp = groupoid_comparison(&fr)?;
    let eq = functor_check(&cmp).equivalence;
    Ok(Verdict::all(
        "fraction homotopy",
        vec![
            cert,
            iso,
            Verdict::from_bool(
                "groupoid comparison is an equivalence",
                eq,
                catfrac::Instance::new().text("reason", "not an equivalence"),
            ),
        ],
    ))
}

/// `∂∘∂ = 0` always; for cofiltered categories also `H_0 = Z` and `H_1 = H_2 = 0`.
pub fn nerve_instance(c: &FinCat) -> Result<Verdict> {
    let n = nerve(c, 3)?;
    let mut parts = Vec::new();
    let dd = (2..=3).all(|k| boundary(&n, k - 1).mul(&boundary(&n, k)).is_zero());
    parts.push(Verdict::from_bool(
        "boundary squares to zero",
        dd,
        catfrac::Instance::new(),
    ));
    if is_cofiltered(c).is_holds() {
        let h = homology_of(&n);
        let ok = h.groups[0] == catfrac::linalg::AbInvariants::free(1)
            && h.groups[1].is_zero()
            && h.groups[2].is_zero();
        parts.push(Verdict::from_bool(
            "cofiltered nerve acyclic",
            ok,
            catfrac::Instance::new().text("homology", h.to_string().replace('\n', ", ")),
        ));
    }
    Ok(Verdict::all("nerve", parts))
}

pub fn diagram_instance(x: &DiagObj, y: &DiagObj, s: &MultSetZ) -> Result<Verdict> {
    let loc = localized_hom_check(x, y, s)?;
    let rec = recursive_matches_flat(x, y)?;
    Ok(Verdict::all(
        "localized hom",
        vec![
            loc,
            Verdict::from_bool("recursive hom matches flat", rec, catfrac::Instance::new()),
        ],
    ))
}

pub fn suite_instance(name: &str) -> Result<Verdict> {
    let cfg = SuiteConfig::default();
    let inst = match name {
        "mixed-torsion" => zx::mixed_torsion(cfg),
        "finite-mixed" => zx::finite_mixed(cfg),
        "finite-2groups" => zx::finite_2groups(cfg),
        other => return Err(Error::Invalid(format!("unknown suite instance {other}"))),
    };
    Ok(Verdict::all("suite", defcor_suite(&inst)?))
}

pub fn parse_invert(s: &str) -> Result<MultSetZ> {
    let gens = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Invalid(format!("bad integer `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    MultSetZ::new(&gens)
}

pub fn waldcat_of(d: &FcatDocument) -> Result<WaldCat> {
    let c = &d.cat;
    let z = d
        .zero
        .as_ref()
        .ok_or_else(|| Error::Invalid("missing zero declaration".into()))?;
    let z = c
        .find_object(z)
        .ok_or_else(|| Error::Invalid(format!("unknown object {z}")))?;
    let cof = d
        .cof
        .as_ref()
        .ok_or_else(|| Error::Invalid("missing cof declaration".into()))?;
    let cc = CofCat::new(c.clone(), z, d.class(cof)?.clone(), Mode::Partial)?;
    let w = match &d.weq {
        Some(n) => d.class(n)?.clone(),
        None => max_groupoid(c),
    };
    let v = match d.class("V") {
        Ok(v) => v.clone(),
        Err(_) => max_groupoid(c),
    };
    WaldCat::new(cc, w, Some(v))
}

// ---------------------------------------------------------------- helpers

/// Corpus categories with at most `n` morphisms, any object count up to `n`.
pub fn targets_up_to(n: usize) -> Result<Vec<FinCat>> {
    catfrac::corpus::corpus(CorpusSpec::new(n, n))
}

fn all_classes(c: &FinCat) -> Vec<MorClass> {
    let n = c.num_morphisms();
    (0u64..1 << n).map(|m| MorClass::from_mask(c, m)).collect()
}

fn multiplicative_classes(c: &FinCat) -> Vec<MorClass> {
    all_classes(c)
        .into_iter()
        .filter(|k| has_property(c, Property::Multiplicative, k, None).unwrap_or(false))
        .collect()
}

/// Indices into a product of pools: all of them, or `samples` drawn uniformly.
fn combos(sizes: &[usize], samples: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let total: u128 = sizes.iter().map(|&s| s as u128).product();
    let decode = |mut k: u128| {
        sizes
            .iter()
            .map(|&s| {
                let d = (k % s as u128) as usize;
                k /= s as u128;
                d
            })
            .collect::<Vec<_>>()
    };
    if total <= samples as u128 {
        (0..total).map(decode).collect()
    } else {
        (0..samples)
            .map(|_| decode(rng.random_range(0..total)))
            .collect()
    }
}

fn rng_for(seed: u64, k: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// `C` with objects listed by `objs` (repetitions allowed) and every hom set copied,
/// together with the evident fully faithful functor to `C`.
pub fn inflate(c: &Arc<FinCat>, objs: &[Obj]) -> Result<Functor> {
    let mut b = CatBuilder::new();
    let names: Vec<String> = objs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if objs[..i].contains(&x) {
                format!("{}'{i}", c.obj_name(x))
            } else {
                c.obj_name(x).to_string()
            }
        })
        .collect();
    for n in &names {
        b.object(n.clone());
    }
    let k = objs.len();
    let mut cell: BTreeMap<(usize, usize, Mor), Mor> = BTreeMap::new();
    let mut mor_map = vec![0; k];
    for (i, &x) in objs.iter().enumerate() {
        cell.insert((i, i, c.id(x)), b.identity(i));
        mor_map[b.identity(i)] = c.id(x);
    }
    for i in 0..k {
        for j in 0..k {
            for &m in c.hom(objs[i], objs[j]) {
                if i == j && c.is_identity(m) {
                    continue;
                }
                let name = if names[i] == c.obj_name(objs[i]) && names[j] == c.obj_name(objs[j]) {
                    c.mor_name(m).to_string()
                } else {
                    format!("{}@{i}{j}", c.mor_name(m).replace(['(', ')'], ""))
                };
                let nm = b.morphism(name, i, j);
                cell.insert((i, j, m), nm);
                mor_map.push(m);
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                for &f in c.hom(objs[i], objs[j]) {
                    for &g in c.hom(objs[j], objs[l]) {
                        let gf = c.compose(g, f);
                        b.compose(cell[&(j, l, g)], cell[&(i, j, f)], cell[&(i, l, gf)]);
                    }
                }
            }
        }
    }
    let d = Arc::new(b.build()?);
    Functor::new(d, c.clone(), objs.to_vec(), mor_map)
}

/// Functors into `c` used by the pullback statements: the identity, one equivalence
/// doubling each object, full inclusions of proper object subsets, and every functor
/// from each of the small categories `sources`.
pub fn functor_pool(c: &Arc<FinCat>, sources: &[Arc<FinCat>]) -> Result<Vec<Functor>> {
    let mut out = vec![Functor::identity(c)];
    let objs: Vec<Obj> = c.objects().collect();
    for &x in &objs {
        let mut o = objs.clone();
        o.push(x);
        out.push(inflate(c, &o)?);
    }
    let k = objs.len();
    for mask in 1..(1usize << k) - 1 {
        let sub: Vec<Obj> = objs
            .iter()
            .copied()
            .filter(|&x| mask >> x & 1 == 1)
            .collect();
        out.push(inflate(c, &sub)?);
    }
    for d in sources {
        for (om, mm) in enumerate_functors(d, c) {
            out.push(Functor::new(d.clone(), c.clone(), om, mm)?);
        }
    }
    Ok(out)
}

fn zero_object(c: &FinCat) -> Option<Obj> {
    c.objects().find(|&z| {
        c.objects()
            .all(|x| c.hom(z, x).len() == 1 && c.hom(x, z).len() == 1)
    })
}

/// Valid categories with cofibrations on a pointed `c` with `v = w = i_C`, for the
/// cofibration classes: minimal, all monomorphisms, all morphisms.
pub fn pointed_instances(c: &Arc<FinCat>) -> Vec<WaldCat> {
    let Some(z) = zero_object(c) else {
        return vec![];
    };
    let minimal = MorClass::from_fn(c, |m| c.is_iso(m) || c.src(m) == z);
    let monos = MorClass::from_fn(c, |m| c.is_iso(m) || c.src(m) == z || is_mono(c, m));
    let all = MorClass::all(c);
    let mut classes = vec![minimal];
    for k in [monos, all] {
        if !classes.contains(&k) {
            classes.push(k);
        }
    }
    let iso = max_groupoid(c);
    classes
        .into_iter()
        .filter_map(|cof| {
            let cc = CofCat::new(c.clone(), z, cof, Mode::Partial).ok()?;
            if !validate_cofcat(&cc).is_valid() {
                return None;
            }
            let w = WaldCat::new(cc, iso.clone(), Some(iso.clone())).ok()?;
            validate_waldcat(&w).is_valid().then_some(w)
        })
        .collect()
}

fn wald_doc(w: &WaldCat) -> FcatDocument {
    let c = w.base();
    let mut d = class_doc(c, &[("C", &w.cofcat.cof), ("W", &w.w)]);
    if let Some(v) = &w.v {
        d.set_class("V", v.clone());
    }
    d.zero = Some(c.obj_name(w.cofcat.zero).to_string());
    d.cof = Some("C".into());
    d.weq = Some("W".into());
    d
}

// ---------------------------------------------------------------- sweeps

fn deadline_passed(o: &SweepOptions) -> bool {
    o.deadline.is_some_and(|d| Instant::now() > d)
}

/// Runs the harness `id` within the options.
pub fn sweep(id: &str, o: &SweepOptions) -> Result<SweepSummary> {
    if !is_registered(id) {
        return Err(Error::Invalid(format!("unknown harness id {id}")));
    }
    let mut sum = SweepSummary::new(id, o.seed);
    match id {
        "4.3" => {
            diagram_sweep(o, &mut sum);
            return Ok(sum);
        }
        "4.4" => {
            let v = suite_instance("mixed-torsion")?;
            for p in &v.parts {
                sum.record(&p.property, p, || {
                    let mut r = Repro::new("4.4");
                    r.params.push(("instance".into(), "mixed-torsion".into()));
                    r
                });
            }
            sum.complete = true;
            return Ok(sum);
        }
        _ => {}
    }
    let mut spec = CorpusSpec::new(o.max_objects, o.max_morphisms);
    if id == "2.3" {
        // only pointed categories carry instances
        spec = spec.pointed();
    }
    let sources: Vec<Arc<FinCat>> = if id.starts_with("1.6") {
        catfrac::corpus::corpus(CorpusSpec::new(3, 3))?
            .into_iter()
            .map(Arc::new)
            .collect()
    } else {
        vec![]
    };
    let targets = if id == "3.1" {
        targets_up_to(o.target_max_morphisms)?
    } else {
        vec![]
    };
    let mut index = 0usize;
    let mut timed_out = false;
    let stats = for_each_category(spec, o.deadline, |c| {
        if deadline_passed(o) {
            timed_out = true;
            return false;
        }
        let c = Arc::new(c.clone());
        let mut rng = rng_for(o.seed, index);
        index += 1;
        sum.categories += 1;
        if let Err(e) = sweep_category(id, &c, o, &sources, &targets, &mut rng, &mut sum) {
            sum.error(e);
        }
        true
    })?;
    sum.complete = stats.complete && !timed_out;
    let covered: Vec<String> = stats
        .counts
        .iter()
        .map(|(n, k, c)| format!("{n}m/{k}o:{c}"))
        .collect();
    sum.notes.push(format!(
        "corpus classes visited by size: {}",
        covered.join(" ")
    ));
    if !sum.complete {
        if let Some((n, k)) = stats.stopped_at {
            sum.notes.push(format!(
                "budget ran out while enumerating {n} morphisms on {k} objects"
            ));
        } else {
            sum.notes.push("budget ran out".into());
        }
    }
    Ok(sum)
}

fn sweep_category(
    id: &str,
    c: &Arc<FinCat>,
    o: &SweepOptions,
    sources: &[Arc<FinCat>],
    targets: &[FinCat],
    rng: &mut ChaCha8Rng,
    sum: &mut SweepSummary,
) -> Result<()> {
    if let Some(h) = Heritability::from_id(id) {
        let classes = all_classes(c);
        let nc = classes.len();
        if !h.needs_functor() {
            for ix in combos(&[nc, nc, nc], o.samples, rng) {
                if deadline_passed(o) {
                    break;
                }
                let (s, t, u) = (&classes[ix[0]], &classes[ix[1]], &classes[ix[2]]);
                let v = subclass_instance(h, c, s, t, u)?;
                sum.record(id, &v, || {
                    let mut r = Repro::new(id);
                    r.cod = Some(class_doc(c, &[("S", s), ("T", t), ("U", u)]));
                    r
                });
            }
            return Ok(());
        }
        let pool = functor_pool(c, sources)?;
        let sizes: Vec<usize> = if h == Heritability::PullbackClosure {
            vec![pool.len(), nc]
        } else {
            vec![pool.len(), nc, nc]
        };
        for ix in combos(&sizes, o.samples, rng) {
            if deadline_passed(o) {
                break;
            }
            let f = &pool[ix[0]];
            let s = &classes[ix[1]];
            if s.is_empty() {
                sum.vacuous += 1;
                continue;
            }
            let empty = MorClass::empty(c);
            let t = ix.get(2).map_or(&empty, |&k| &classes[k]);
            let v = pullback_instance(h, f, s, t)?;
            sum.record(id, &v, || {
                let mut r = Repro::new(id);
                r.cod = Some(class_doc(c, &[("S", s), ("T", t)]));
                r.dom = Some(FcatDocument::new(f.dom.clone()));
                r.functor = Some((f.obj_map.clone(), f.mor_map.clone()));
                r
            });
        }
        return Ok(());
    }
    if let Some(p) = ChainHeritability::from_id(id) {
        let all = all_classes(c);
        let mult = multiplicative_classes(c);
        // roles that a hypothesis requires multiplicative draw from the multiplicative pool
        let pools: Vec<&Vec<MorClass>> = match p {
            ChainHeritability::Cofinal => vec![&all, &mult, &mult],
            ChainHeritability::Permutative => vec![&all, &all, &mult],
            ChainHeritability::Reversible => vec![&mult, &all, &mult, &mult],
        };
        let sizes: Vec<usize> = pools.iter().map(|p| p.len()).collect();
        for ix in combos(&sizes, o.samples, rng) {
            for &n in &o.n_values {
                if deadline_passed(o) {
                    return Ok(());
                }
                let pick = |k: usize| pools[k][ix[k]].clone();
                let inp = ChainInputs {
                    cat: c.clone(),
                    s: pick(0),
                    t: pick(1),
                    u: pick(2),
                    v: (pools.len() == 4).then(|| pick(3)),
                    n,
                };
                let v = match chain_heritability_check(p, &inp) {
                    Ok(v) => v,
                    Err(e @ Error::SizeLimitExceeded { .. }) => {
                        sum.error(e);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                sum.record(&format!("{id} n={n}"), &v, || {
                    let mut classes = vec![("S", &inp.s), ("T", &inp.t), ("U", &inp.u)];
                    if let Some(vv) = &inp.v {
                        classes.push(("V", vv));
                    }
                    let mut r = Repro::new(id);
                    r.params.push(("n".into(), n.to_string()));
                    r.cod = Some(class_doc(c, &classes));
                    r
                });
            }
        }
        return Ok(());
    }
    match id {
        "2.3" => {
            for w in pointed_instances(c) {
                if deadline_passed(o) {
                    break;
                }
                let v = match claim_instance(&w, o.claim_max) {
                    Ok(v) => v,
                    Err(e @ Error::SizeLimitExceeded { .. }) => {
                        sum.error(e);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                sum.record("claim", &v, || {
                    let mut r = Repro::new(id);
                    r.params.push(("claim-max".into(), o.claim_max.to_string()));
                    r.cod = Some(wald_doc(&w));
                    r
                });
            }
        }
        "3.1" | "3.3" | "3.3-strong" => {
            for s in all_classes(c) {
                if deadline_passed(o) {
                    break;
                }
                if !has_property(c, Property::RightLocalizing, &s, None)? {
                    continue;
                }
                let v = if id == "3.1" {
                    fractions_instance(c, &s, targets)?
                } else {
                    lemma33_instance(c, &s, id == "3.3-strong")?
                };
                sum.record(id, &v, || {
                    let mut r = Repro::new(id);
                    if id == "3.1" {
                        r.params
                            .push(("target-max-mor".into(), o.target_max_morphisms.to_string()));
                    }
                    r.cod = Some(class_doc(c, &[("S", &s)]));
                    r
                });
            }
        }
        "nerve" => {
            let v = nerve_instance(c)?;
            let part = if v.parts.len() > 1 {
                "cofiltered"
            } else {
                "boundary"
            };
            sum.record(part, &v, || {
                let mut r = Repro::new(id);
                r.cod = Some(FcatDocument::new(c.clone()));
                r
            });
        }
        _ => {
            return Err(Error::Invalid(format!(
                "harness {id} is not a corpus sweep"
            )))
        }
    }
    Ok(())
}

/// Seeded random pairs of diagrams per shape; `samples` pairs in total.
fn diagram_sweep(o: &SweepOptions, sum: &mut SweepSummary) {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let invert_choices: [&[i64]; 3] = [&[2], &[3], &[2, 3]];
    let mut done = 0;
    'outer: while done < o.samples {
        for shape in &o.shapes {
            if done == o.samples {
                break;
            }
            if deadline_passed(o) {
                break 'outer;
            }
            done += 1;
            let pair = random_diagram(&mut rng, shape)
                .and_then(|x| Ok((x, random_diagram(&mut rng, shape)?)));
            let gens = invert_choices[rng.random_range(0..invert_choices.len())];
            let s = match MultSetZ::new(gens) {
                Ok(s) => s,
                Err(e) => {
                    sum.error(e);
                    continue;
                }
            };
            let (x, y) = match pair {
                Ok(p) => p,
                Err(e) => {
                    sum.error(e);
                    continue;
                }
            };
            match diagram_instance(&x, &y, &s) {
                Ok(v) => {
                    let shape_name = format!("{shape:?}");
                    sum.record(&shape_name, &v, || {
                        let mut r = Repro::new("4.3");
                        let inv: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
                        r.params.push(("invert".into(), inv.join(",")));
                        r.zdiag = Some(ZdDocument {
                            ring: x.ring.clone(),
                            shape: shape.clone(),
                            objects: vec![("x".into(), x.clone()), ("y".into(), y.clone())],
                            morphisms: vec![],
                        });
                        r
                    });
                }
                Err(e) => sum.error(e),
            }
        }
    }
    sum.complete = done == o.samples;
    sum.notes.push(format!("{done} diagram pairs"));
}

#[cfg(test)]
mod tests {
    use super::*;
    use catfrac::fincat::examples as fx;

    #[test]
    fn inflate_doubles_an_object() {
        let c = Arc::new(fx::terminal());
        let f = inflate(&c, &[0, 0]).unwrap();
        assert_eq!(f.dom.num_morphisms(), 4);
        assert!(functor_check(&f).equivalence);
    }

    #[test]
    fn literal_pullback_sweep_finds_the_counterexample() {
        let o = SweepOptions {
            max_objects: 2,
            max_morphisms: 4,
            samples: 2000,
            ..Default::default()
        };
        let s = sweep("1.6.2-literal", &o).unwrap();
        assert!(s.fails > 0);
        let r = s.failure.unwrap().repro;
        let text = r.to_text();
        let back = Repro::parse(&text).unwrap();
        assert!(run_repro(&back).unwrap().is_fails());
        assert_eq!(sweep("1.6.2", &o).unwrap().fails, 0);
    }

    #[test]
    fn groupoid_comparison_needs_strong_saturation() {
        let o = SweepOptions {
            max_objects: 1,
            max_morphisms: 2,
            ..Default::default()
        };
        let s = sweep("3.3", &o).unwrap();
        let f = s.failure.expect("the unguarded statement fails on Z/2");
        assert_eq!(f.repro.cod.as_ref().unwrap().class("S").unwrap().len(), 1);
        assert_eq!(sweep("3.3-strong", &o).unwrap().fails, 0);
    }

    #[test]
    fn small_sweeps_hold() {
        let o = SweepOptions {
            max_objects: 2,
            max_morphisms: 3,
            samples: 300,
            ..Default::default()
        };
        for id in [
            "1.4.1",
            "1.4.2",
            "1.4.3",
            "1.6.1",
            "1.6.3",
            "1.6.4",
            "3.3-strong",
            "nerve",
        ] {
            let s = sweep(id, &o).unwrap();
            let repro = s
                .failure
                .as_ref()
                .map(|f| f.repro.to_text())
                .unwrap_or_default();
            assert_eq!(
                (s.fails, s.errors),
                (0, 0),
                "{}{repro}{:?}",
                s.render(),
                s.failure.map(|f| f.verdict)
            );
            assert!(s.complete);
        }
    }
}
