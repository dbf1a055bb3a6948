//! Acceptance run: one PASS/FAIL line per criterion, details indented below.
//!
//! Budgets are seconds per criterion and can be overridden through
//! `CATFRAC_BUDGET_C1` … `CATFRAC_BUDGET_C9`. The process exits 0 whenever the
//! run itself completed, whatever the verdicts.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use catfrac::corpus::{for_each_category, CorpusSpec};
use catfrac::fincat::examples as fx;
use catfrac::linalg::AbInvariants;
use catfrac::nerve::{boundary, homology, nerve};
use catfrac::waldhausen::{
    examples as wx, fibration_hypotheses_report, k0_presentation, validate_waldcat,
};
use catfrac::zdiag::{is_weq, weq_witness, DiagMor, WITNESS_BOUND};
use catfrac::zsuite::{defcor_suite, examples as zx, instance_k0_report, SuiteConfig};
use catfrac::{FinCat, MorClass};
use catfrac_cli::fcat::{self, FcatDocument};
use catfrac_cli::harness::{claim_instance, sweep, Repro, SweepOptions, SweepSummary};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Corpus bounds of the lemma sweeps.
const MAX_OBJECTS: usize = 3;
const MAX_MORPHISMS: usize = 8;
/// Class combinations per category before sampling kicks in.
const SAMPLES: usize = 10_000;
const SEED: u64 = 0;
/// Total wall-clock allowance for the whole run.
const SUITE_LIMIT: Duration = Duration::from_secs(30 * 60);

fn budget(criterion: u32, default_secs: u64) -> Duration {
    let secs = std::env::var(format!("CATFRAC_BUDGET_C{criterion}"))
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(default_secs);
    Duration::from_secs(secs)
}

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            details: vec![],
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.pass = false;
        }
        self.details
            .push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, what: impl Into<String>) {
        self.details.push(format!("     {}", what.into()));
    }
}

fn corpus_options(deadline: Duration) -> SweepOptions {
    SweepOptions {
        max_objects: MAX_OBJECTS,
        max_morphisms: MAX_MORPHISMS,
        samples: SAMPLES,
        seed: SEED,
        deadline: Some(Instant::now() + deadline),
        ..SweepOptions::default()
    }
}

fn summary_line(s: &SweepSummary) -> String {
    format!(
        "{}: {} holds, {} vacuous, {} fails, {} errors, {} categories, {}",
        s.id,
        s.holds,
        s.vacuous,
        s.fails,
        s.errors,
        s.categories,
        if s.complete { "complete" } else { "incomplete" }
    )
}

fn sweep_notes(o: &mut Outcome, s: &SweepSummary) {
    for n in &s.notes {
        o.note(format!("  {n}"));
    }
    if let Some(e) = &s.first_error {
        o.note(format!("  first error: {e}"));
    }
    if let Some(f) = &s.failure {
        o.note(format!("  counterexample: {}", f.verdict.property));
    }
}

/// Runs a sweep and records "no falsified instance" and "covered the whole corpus".
fn corpus_sweep(o: &mut Outcome, id: &str, opts: &SweepOptions) -> SweepSummary {
    match sweep(id, opts) {
        Ok(s) => {
            o.require(s.fails == 0 && s.errors == 0, summary_line(&s));
            o.require(
                s.complete,
                format!("{id}: whole corpus covered within the budget"),
            );
            sweep_notes(o, &s);
            s
        }
        Err(e) => {
            o.require(false, format!("{id}: harness error {e}"));
            SweepSummary::default()
        }
    }
}

// ---------------------------------------------------------------- criteria

fn criterion1(failures: &mut Vec<(String, Repro)>) -> Outcome {
    let mut o = Outcome::new();
    let ids = [
        "1.4.1",
        "1.4.2",
        "1.4.3",
        "1.6.1",
        "1.6.2-literal",
        "1.6.3",
        "1.6.4",
    ];
    let per = budget(1, 560) / (ids.len() as u32 + 1);
    o.note(format!("corpus ≤ {MAX_OBJECTS} objects, ≤ {MAX_MORPHISMS} morphisms; {SAMPLES} samples per category; seed {SEED}; {}s per harness", per.as_secs()));
    for id in ids {
        let s = corpus_sweep(&mut o, id, &corpus_options(per));
        if let Some(f) = s.failure {
            failures.push((id.to_string(), f.repro));
        }
    }
    // the guarded variant, reported alongside the literal statement
    match sweep("1.6.2", &corpus_options(per)) {
        Ok(s) => o.note(format!("guarded {}", summary_line(&s))),
        Err(e) => o.note(format!("guarded 1.6.2: harness error {e}")),
    }
    o
}

fn criterion2() -> Outcome {
    let mut o = Outcome::new();
    let per = budget(2, 300) / 3;
    let opts = |d: Duration| SweepOptions {
        max_objects: 6,
        max_morphisms: 6,
        samples: 10,
        seed: SEED,
        deadline: Some(Instant::now() + d),
        n_values: vec![1, 2],
        ..SweepOptions::default()
    };
    o.note(format!(
        "categories with ≤ 6 morphisms; 10 class tuples per category; n ∈ {{1, 2}}; seed {SEED}"
    ));
    for id in ["1.8.1", "1.8.2", "1.8.3"] {
        let s = corpus_sweep(&mut o, id, &opts(per));
        for n in [1, 2] {
            let part = format!("{id} n={n}");
            let k = s.nonvacuous.get(&part).copied().unwrap_or(0);
            o.require(
                k >= 100,
                format!("{part}: {k} non-vacuous instances (need ≥ 100)"),
            );
        }
    }
    o
}

fn criterion3() -> Outcome {
    let mut o = Outcome::new();
    let mut opts = corpus_options(budget(3, 240));
    opts.target_max_morphisms = 6;
    o.note("every right localizing class; targets: all categories with ≤ 6 morphisms");
    corpus_sweep(&mut o, "3.1", &opts);
    o
}

fn criterion4(failures: &mut Vec<(String, Repro)>) -> Outcome {
    let mut o = Outcome::new();
    let b = budget(4, 180) / 2;
    let s = corpus_sweep(&mut o, "3.3", &corpus_options(b));
    if let Some(f) = s.failure {
        o.note("  reproducer:");
        for l in f.repro.to_text().lines() {
            o.note(format!("    {l}"));
        }
        failures.push(("3.3".into(), f.repro));
    }
    match sweep("3.3-strong", &corpus_options(b)) {
        Ok(s) => o.note(format!("with strong saturation {}", summary_line(&s))),
        Err(e) => o.note(format!("3.3-strong: harness error {e}")),
    }
    o
}

fn criterion5() -> Outcome {
    let mut o = Outcome::new();
    let mut opts = corpus_options(budget(5, 300));
    opts.claim_max = 2;
    o.note("pointed corpus categories, v = w = isomorphisms, cofibrations: minimal, monomorphisms, all");
    let s = corpus_sweep(&mut o, "2.3", &opts);
    o.require(
        s.holds >= 20,
        format!(
            "{} instances with all hypotheses and all claim items holding for n, m ≤ 2 (need ≥ 20)",
            s.holds
        ),
    );
    if s.size_errors > 0 {
        o.note(format!(
            "  {} instances exceeded the morphism cap while building the chain categories",
            s.size_errors
        ));
    }
    let t2 = wx::t2(false);
    o.require(validate_waldcat(&t2).is_valid(), "T2 is a valid instance");
    match fibration_hypotheses_report(&t2) {
        Ok(h) => o.require(h.iter().all(|v| v.is_holds()), "T2 hypotheses (A)-(I) hold"),
        Err(e) => o.require(false, format!("T2 hypotheses: {e}")),
    }
    match claim_instance(&t2, 1) {
        Ok(v) => o.note(format!("T2 claim items at n = m = 1: {}", v.status)),
        Err(e) => o.note(format!("T2 claim at n = m = 1: {e}")),
    }
    o.note("T2 at n or m = 2 exceeds the morphism cap; it is not counted above");
    o
}

fn criterion6() -> Outcome {
    let mut o = Outcome::new();
    let opts = SweepOptions {
        samples: 200,
        seed: 7,
        shapes: vec![vec![1], vec![1, 1]],
        deadline: Some(Instant::now() + budget(6, 300)),
        ..SweepOptions::default()
    };
    o.note(
        "200 pairs, seed 7, shapes [1] and [1]x[1], groups Z^a + Z/d with a ≤ 2, d ∈ {2, 3, 4, 6}",
    );
    match sweep("4.3", &opts) {
        Ok(s) => {
            o.require(s.fails == 0 && s.errors == 0, summary_line(&s));
            o.require(
                s.holds == 200,
                format!("{} of 200 pairs decided and holding", s.holds),
            );
        }
        Err(e) => o.require(false, format!("4.3: {e}")),
    }
    o
}

/// Checks `f g t = s t` and `g f u = s u` entry by entry, reducing each row by its generator order.
fn replay_by_hand(f: &DiagMor, g: &DiagMor, s: &BigInt, t: &BigInt, u: &BigInt) -> bool {
    let side = |a: &DiagMor, b: &DiagMor, k: &BigInt| {
        a.comps.iter().zip(&b.comps).all(|(ap, bp)| {
            let orders = ap.tgt.orders();
            let (n, m, r) = (ap.mat.rows(), bp.mat.cols(), ap.mat.cols());
            (0..n).all(|i| {
                (0..m).all(|j| {
                    let mut v = BigInt::zero();
                    for l in 0..r {
                        v += &ap.mat[(i, l)] * &bp.mat[(l, j)];
                    }
                    v *= k;
                    if i == j {
                        v -= s * k;
                    }
                    if orders[i].is_zero() {
                        v.is_zero()
                    } else {
                        (v % &orders[i]).is_zero()
                    }
                })
            })
        })
    };
    side(f, g, t) && side(g, f, u)
}

fn criterion7() -> Outcome {
    let mut o = Outcome::new();
    let inst = zx::mixed_torsion(SuiteConfig::default());
    o.note(format!("instance {{{}}}, S = <2>", inst.names.join(", ")));
    match defcor_suite(&inst) {
        Ok(items) => {
            for v in &items {
                o.require(v.is_holds(), v.property.clone());
            }
        }
        Err(e) => o.require(false, format!("suite error: {e}")),
    }
    let (mut found, mut replayed, mut disagree) = (0, 0, 0);
    for a in inst.arrows(true) {
        match weq_witness(&a.mor, &inst.s, WITNESS_BOUND) {
            Ok(Some(w)) => {
                found += 1;
                if replay_by_hand(&a.mor, &w.g, &w.s, &w.t, &w.u) {
                    replayed += 1;
                }
                if !is_weq(&a.mor, &inst.s) {
                    disagree += 1;
                }
            }
            Ok(None) => {}
            Err(_) => disagree += 1,
        }
    }
    o.require(
        found > 0 && replayed == found,
        format!("{replayed} of {found} witnesses satisfy their equations by direct matrix replay"),
    );
    o.require(
        disagree == 0,
        format!("torsion criterion and witness search disagree on {disagree} instances"),
    );
    o
}

/// Determinantal divisors of a small integer matrix by brute force over all minors.
fn determinantal_invariants(m: &[Vec<i64>], rows: usize) -> (usize, Vec<i128>) {
    fn det(a: &[Vec<i128>]) -> i128 {
        let n = a.len();
        if n == 1 {
            return a[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = a[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * a[0][j] * det(&minor)
            })
            .sum()
    }
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    // columns are relations
    let cols = m.len();
    let mut divisors = vec![1i128];
    for k in 1..=rows.min(cols) {
        let mut g = 0;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let a: Vec<Vec<i128>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| m[c][r] as i128).collect())
                    .collect();
                g = gcd(g, det(&a));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    let rank = divisors.len() - 1;
    let factors = (1..divisors.len())
        .map(|k| divisors[k] / divisors[k - 1])
        .filter(|&d| d != 1)
        .collect();
    (rows - rank, factors)
}

/// A primitive functional vanishing on every relation, found by search over small coefficients.
fn vanishing_functional(rels: &[Vec<i64>], n: usize) -> Option<Vec<i64>> {
    let range: Vec<i64> = (-4..=4).collect();
    let mut v = vec![0i64; n];
    fn rec(k: usize, v: &mut Vec<i64>, range: &[i64], rels: &[Vec<i64>]) -> bool {
        if k == v.len() {
            let g = v.iter().fold(0i64, |a, &b| num_integer::gcd(a, b));
            return g == 1
                && rels
                    .iter()
                    .all(|r| r.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<i64>() == 0);
        }
        for &c in range {
            v[k] = c;
            if rec(k + 1, v, range, rels) {
                return true;
            }
        }
        false
    }
    rec(0, &mut v, &range, rels).then_some(v)
}

fn criterion8() -> Outcome {
    let mut o = Outcome::new();
    let t2 = wx::t2(false);
    match k0_presentation(&t2) {
        Ok(p) => {
            o.note(format!(
                "T2 presentation: {} generators, {} relations",
                p.generators.len(),
                p.relations.len()
            ));
            o.require(
                p.invariants == AbInvariants::free(1),
                format!("K0(T2) = {} (library)", p.invariants),
            );
            let (rank, torsion) = determinantal_invariants(&p.relations, p.generators.len());
            o.require(
                rank == 1 && torsion.is_empty(),
                format!("minor oracle: free rank {rank}, torsion {torsion:?}"),
            );
            let z2 = p.generators.iter().position(|g| g == "Z/2");
            let phi = vanishing_functional(&p.relations, p.generators.len());
            let generated = match (z2, &phi) {
                (Some(i), Some(f)) => f[i].abs() == 1,
                _ => false,
            };
            o.require(
                generated,
                format!("functional oracle: [Z/2] maps to ±1 under {phi:?}"),
            );
            let gens: Vec<&str> = p
                .cyclic_generators()
                .iter()
                .map(|&g| p.generators[g].as_str())
                .collect();
            o.require(gens == ["Z/2"], format!("library generators: {gens:?}"));
        }
        Err(e) => o.require(false, format!("T2 presentation: {e}")),
    }
    let inst = zx::mixed_torsion(SuiteConfig::default());
    match instance_k0_report(&inst) {
        Ok(v) => {
            for part in ["composite-zero", "surjective", "kernel-inclusion"] {
                let ok = v.parts.iter().any(|p| p.property == part && p.is_holds());
                o.require(ok, format!("mixed-torsion {part}"));
            }
            for n in &v.notes {
                o.note(n.clone());
            }
        }
        Err(e) => o.require(false, format!("mixed-torsion K0 report: {e}")),
    }
    o
}

fn criterion9() -> Outcome {
    let mut o = Outcome::new();
    o.note(
        "every corpus category: ∂∘∂ = 0 up to dimension 3; cofiltered ones: H0 = Z, H1 = H2 = 0",
    );
    corpus_sweep(&mut o, "nerve", &corpus_options(budget(9, 120)));
    match homology(&fx::circle_poset(), 3) {
        Ok(h) => o.require(
            h.groups[1] == AbInvariants::free(1),
            format!("circle poset H1 = {}", h.groups[1]),
        ),
        Err(e) => o.require(false, format!("circle poset: {e}")),
    }
    let n = nerve(&fx::circle_poset(), 4).expect("small nerve");
    let dd = (2..=4).all(|k| boundary(&n, k - 1).mul(&boundary(&n, k)).is_zero());
    o.require(dd, "circle poset ∂∘∂ = 0");
    o
}

fn same_category(a: &FinCat, b: &FinCat) -> bool {
    a.obj_names() == b.obj_names()
        && a.mor_names() == b.mor_names()
        && a.morphisms()
            .all(|m| a.src(m) == b.src(m) && a.tgt(m) == b.tgt(m))
        && a.morphisms().all(|g| {
            a.morphisms()
                .all(|f| a.try_compose(g, f) == b.try_compose(g, f))
        })
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_catfrac"));
    c.env_remove("CATFRAC_MAX_MORPHISMS");
    c
}

fn exit_of(c: &mut Command) -> i32 {
    c.output()
        .map(|o| o.status.code().unwrap_or(-1))
        .unwrap_or(-1)
}

fn criterion10(failures: &[(String, Repro)], started: Instant) -> Outcome {
    let mut o = Outcome::new();
    // round trip on 100 documents spread over the corpus
    let mut cats = Vec::new();
    for_each_category(CorpusSpec::new(3, 6), None, |c| {
        cats.push(Arc::new(c.clone()));
        true
    })
    .expect("small corpus");
    let stride = (cats.len() / 100).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut good = 0;
    let picked: Vec<&Arc<FinCat>> = cats.iter().step_by(stride).take(100).collect();
    for c in &picked {
        let mut doc = FcatDocument::new((*c).clone());
        let mask: u64 = rng.random_range(0..1u64 << c.num_morphisms());
        doc.set_class("S", MorClass::from_mask(c, mask));
        let text = fcat::serialize(&doc);
        let ok = match fcat::parse(&text) {
            Ok(back) => {
                same_category(c, &back.cat)
                    && back.class("S").map(|s| s.members()) == Ok(doc.class("S").unwrap().members())
                    && fcat::serialize(&back) == text
            }
            Err(_) => false,
        };
        good += ok as usize;
    }
    o.require(
        picked.len() == 100 && good == 100,
        format!("round trip: {good} of {} corpus documents", picked.len()),
    );

    // exit codes through the binary
    let data = |n: &str| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("data")
            .join(n)
    };
    let cases: Vec<(&str, i32, Command)> = vec![
        ("holding check", 0, {
            let mut c = bin();
            c.args(["check"]).arg(data("ord1.fcat")).args([
                "--class",
                "S",
                "--property",
                "right-localizing",
            ]);
            c
        }),
        ("failing check", 3, {
            let mut c = bin();
            c.args(["check"]).arg(data("ord1.fcat")).args([
                "--class",
                "T",
                "--property",
                "right-cofinal",
                "--wrt",
                "S",
            ]);
            c
        }),
        ("malformed file", 2, {
            let mut c = bin();
            c.args(["check"]).arg(data("malformed.fcat")).args([
                "--class",
                "S",
                "--property",
                "saturated",
            ]);
            c
        }),
        ("unknown harness id", 2, {
            let mut c = bin();
            c.args(["verify", "0.0"]);
            c
        }),
        ("non-Ore localization", 3, {
            let mut c = bin();
            c.args(["localize"])
                .arg(data("cospan.fcat"))
                .args(["--class", "S"]);
            c
        }),
        ("missing zero declaration", 2, {
            let mut c = bin();
            c.args(["wald"]).arg(data("ord1.fcat"));
            c
        }),
        ("size cap", 4, {
            let mut c = bin();
            c.args(["nerve"])
                .arg(data("t2.fcat"))
                .env("CATFRAC_MAX_MORPHISMS", "20");
            c
        }),
    ];
    for (what, want, mut cmd) in cases {
        let got = exit_of(&mut cmd);
        o.require(
            got == want,
            format!("exit code for {what}: {got} (want {want})"),
        );
    }
    o.note("exit code 1 is reserved for internal errors and has no trigger from valid or invalid input");

    // reproducers fed back to the binary fail again
    let dir = std::env::temp_dir().join(format!("catfrac-acceptance-{}", std::process::id()));
    let _ = std::fs::create_dir_all(&dir);
    let mut repros: Vec<(String, Repro)> = failures.to_vec();
    if repros.is_empty() {
        let opts = SweepOptions {
            max_objects: 2,
            max_morphisms: 4,
            samples: 2000,
            ..SweepOptions::default()
        };
        if let Ok(s) = sweep("1.6.2-literal", &opts) {
            if let Some(f) = s.failure {
                repros.push(("1.6.2-literal".into(), f.repro));
            }
        }
    }
    o.require(
        !repros.is_empty(),
        format!("{} failing sweeps produced reproducers", repros.len()),
    );
    for (k, (id, r)) in repros.iter().enumerate() {
        let path = dir.join(format!("repro{k}.txt"));
        let _ = std::fs::write(&path, r.to_text());
        let got = exit_of(bin().args(["verify", id, "--repro"]).arg(&path));
        o.require(
            got == 3,
            format!("reproducer for {id} fails again through the binary (exit {got})"),
        );
    }
    let _ = std::fs::remove_dir_all(&dir);

    let elapsed = started.elapsed();
    o.require(
        elapsed <= SUITE_LIMIT,
        format!(
            "suite runtime {}s (limit {}s)",
            elapsed.as_secs(),
            SUITE_LIMIT.as_secs()
        ),
    );
    o
}

fn main() {
    let started = Instant::now();
    let mut failures: Vec<(String, Repro)> = Vec::new();
    let runs: Vec<(
        u32,
        &str,
        Box<dyn FnOnce(&mut Vec<(String, Repro)>) -> Outcome>,
    )> = vec![
        (1, "class lemma sweep", Box::new(criterion1)),
        (2, "chain lemma sweep", Box::new(|_| criterion2())),
        (3, "fractions soundness", Box::new(|_| criterion3())),
        (4, "fraction homotopy sweep", Box::new(criterion4)),
        (5, "fibration claim", Box::new(|_| criterion5())),
        (6, "localized hom oracle", Box::new(|_| criterion6())),
        (7, "abelian diagram suite", Box::new(|_| criterion7())),
        (8, "K0 surrogate", Box::new(|_| criterion8())),
        (9, "nerve checks", Box::new(|_| criterion9())),
    ];
    let mut passed = 0;
    for (k, name, f) in runs {
        let t = Instant::now();
        let out = f(&mut failures);
        report(k, name, &out, t.elapsed());
        passed += out.pass as usize;
    }
    let t = Instant::now();
    let out = criterion10(&failures, started);
    report(10, "command line contract", &out, t.elapsed());
    passed += out.pass as usize;
    println!(
        "acceptance: {passed} of 10 criteria pass in {}s",
        started.elapsed().as_secs()
    );
}

fn report(k: u32, name: &str, o: &Outcome, took: Duration) {
    println!(
        "{} criterion {k}: {name} ({}s)",
        if o.pass { "PASS" } else { "FAIL" },
        took.as_secs()
    );
    for d in &o.details {
        println!("    {d}");
    }
}
