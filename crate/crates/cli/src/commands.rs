//! Argument definitions and command implementations behind the `catfrac` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use catfrac::fincat::set_size_limit;
use catfrac::fractions::localize;
use catfrac::linalg::AbInvariants;
use catfrac::morclass::class_property;
use catfrac::nerve::{homology_of, nerve};
use catfrac::waldhausen::{
    claim_verifier, fibration_hypotheses_report, k0_presentation, validate_waldcat, CofPolicy,
};
use catfrac::zdiag::{
    hom_group, is_weak_equivalence, localize_diagram, weq_witness, WITNESS_BOUND,
};
use catfrac::zsuite::{defcor_suite, examples as zx, SuiteConfig};
use catfrac::{Error, FinCat, Property, Verdict};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::fcat::{self, FcatDocument};
use crate::harness::{self, parse_invert, Repro, SweepOptions};
use crate::report::RunReport;
use crate::zdformat::{self, group_text, ZdDocument};

/// Environment variable overriding the global morphism cap.
pub const SIZE_ENV: &str = "CATFRAC_MAX_MORPHISMS";

#[derive(Parser, Debug)]
#[command(
    name = "catfrac",
    version,
    about = "Decide class properties, localize finite categories and check Waldhausen hypotheses"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide a property of a morphism class.
    Check {
        file: PathBuf,
        #[arg(long)]
        class: String,
        #[arg(long)]
        property: String,
        /// Second class for the binary properties; defaults to all morphisms.
        #[arg(long)]
        wrt: Option<String>,
    },
    /// Build the category of fractions for a right localizing class.
    Localize {
        file: PathBuf,
        #[arg(long)]
        class: String,
        /// Also write the fractions category as an FCAT document.
        #[arg(long)]
        fcat_out: Option<PathBuf>,
    },
    /// Run a verification harness.
    Verify(VerifyArgs),
    /// Report the fibration hypotheses of a Waldhausen instance.
    Wald {
        file: PathBuf,
        /// Class to use as v (defaults to the isomorphisms).
        #[arg(long)]
        v: Option<String>,
        /// Run the claim verifier for `n,m`.
        #[arg(long)]
        claim: Option<String>,
        #[arg(long)]
        k0: bool,
    },
    /// Operations on diagrams of abelian groups.
    Zdiag {
        #[arg(value_enum)]
        op: ZdOp,
        files: Vec<PathBuf>,
        /// Generators of the multiplicative set, e.g. `2,3`.
        #[arg(long, default_value = "2")]
        invert: String,
        /// Instance name for `suite`.
        #[arg(long, default_value = "mixed-torsion")]
        instance: String,
    },
    /// Simplex counts and homology of the truncated nerve.
    Nerve {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        homology: bool,
        /// Include the face list.
        #[arg(long)]
        faces: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ZdOp {
    Hom,
    Loc,
    Weq,
    Suite,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    pub id: String,
    #[arg(long, default_value_t = 3)]
    pub max_objects: usize,
    #[arg(long = "max-mor", default_value_t = 8)]
    pub max_mor: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stop the sweep after this many seconds.
    #[arg(long)]
    pub budget_secs: Option<u64>,
    /// Diagram shapes for 4.3, e.g. `[1],[1]x[1]`.
    #[arg(long, default_value = "[1],[1]x[1]")]
    pub shapes: String,
    /// Chain lengths for the 1.8 harnesses.
    #[arg(long, default_value = "1,2")]
    pub n: String,
    #[arg(long, default_value_t = 6)]
    pub target_max_mor: usize,
    #[arg(long, default_value_t = 2)]
    pub claim_max: usize,
    /// Re-run a reproducer instead of sweeping.
    #[arg(long)]
    pub repro: Option<PathBuf>,
}

/// Exit status for an error: 4 size limit, 3 failed requirement, 2 bad input, 1 internal.
pub fn error_exit(e: &Error) -> i32 {
    match e {
        Error::SizeLimitExceeded { .. } => 4,
        Error::RequiresRightLocalizing(_)
        | Error::RequiresMultiplicative(_)
        | Error::NotWeakEquivalence => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

/// Output of one run: the rendered report and the exit status.
pub struct Outcome {
    pub text: String,
    pub exit: i32,
}

/// Applies the size cap from the environment, runs the command and renders the report.
pub fn run(cli: &Cli) -> Outcome {
    if let Ok(v) = std::env::var(SIZE_ENV) {
        match v.parse::<usize>() {
            Ok(n) => {
                set_size_limit(n);
            }
            Err(_) => {
                return Outcome {
                    text: format!("error: {SIZE_ENV} must be a non-negative integer, got `{v}`\n"),
                    exit: 2,
                }
            }
        }
    }
    let (mut rep, cat) = match dispatch(&cli.command) {
        Ok(r) => r,
        Err((mut rep, e)) => {
            rep.exit = error_exit(&e);
            rep.section("error", e.to_string());
            (rep, None)
        }
    };
    if rep.exit == 0 {
        rep.exit = rep.status_exit();
    }
    let text = match cli.format {
        Format::Text => rep.render_text(cat.as_deref()),
        Format::Json => rep.render_json() + "\n",
    };
    Outcome {
        text,
        exit: rep.exit,
    }
}

type Dispatch =
    std::result::Result<(RunReport, Option<std::sync::Arc<FinCat>>), (RunReport, Error)>;

fn read(path: &Path) -> catfrac::Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_fcat(path: &Path) -> catfrac::Result<FcatDocument> {
    fcat::parse(&read(path)?)
}

fn load_zd(path: &Path) -> catfrac::Result<ZdDocument> {
    zdformat::parse(&read(path)?)
}

fn echo(cmd: &Command) -> String {
    let p = |f: &Path| f.display().to_string();
    match cmd {
        Command::Check {
            file,
            class,
            property,
            wrt,
        } => {
            let mut s = format!("check {} --class {class} --property {property}", p(file));
            if let Some(t) = wrt {
                let _ = write!(s, " --wrt {t}");
            }
            s
        }
        Command::Localize { file, class, .. } => format!("localize {} --class {class}", p(file)),
        Command::Verify(a) => match &a.repro {
            Some(r) => format!("verify {} --repro {}", a.id, p(r)),
            None => format!(
                "verify {} --max-objects {} --max-mor {} --samples {} --seed {}",
                a.id, a.max_objects, a.max_mor, a.samples, a.seed
            ),
        },
        Command::Wald { file, v, claim, k0 } => {
            let mut s = format!("wald {}", p(file));
            if let Some(v) = v {
                let _ = write!(s, " --v {v}");
            }
            if let Some(c) = claim {
                let _ = write!(s, " --claim {c}");
            }
            if *k0 {
                s.push_str(" --k0");
            }
            s
        }
        Command::Zdiag {
            op, files, invert, ..
        } => {
            let names: Vec<String> = files.iter().map(|f| p(f)).collect();
            format!(
                "zdiag {} {} --invert {invert}",
                format!("{op:?}").to_lowercase(),
                names.join(" ")
            )
        }
        Command::Nerve {
            file,
            dim,
            homology,
            ..
        } => {
            format!(
                "nerve {} --dim {dim}{}",
                p(file),
                if *homology { " --homology" } else { "" }
            )
        }
    }
}

fn dispatch(cmd: &Command) -> Dispatch {
    let mut rep = RunReport::new(echo(cmd));
    let res = match cmd {
        Command::Check {
            file,
            class,
            property,
            wrt,
        } => cmd_check(&mut rep, file, class, property, wrt.as_deref()),
        Command::Localize {
            file,
            class,
            fcat_out,
        } => cmd_localize(&mut rep, file, class, fcat_out.as_deref()),
        Command::Verify(a) => cmd_verify(&mut rep, a),
        Command::Wald { file, v, claim, k0 } => {
            cmd_wald(&mut rep, file, v.as_deref(), claim.as_deref(), *k0)
        }
        Command::Zdiag {
            op,
            files,
            invert,
            instance,
        } => cmd_zdiag(&mut rep, *op, files, invert, instance).map(|_| None),
        Command::Nerve {
            file,
            dim,
            homology,
            faces,
        } => cmd_nerve(&mut rep, file, *dim, *homology, *faces),
    };
    match res {
        Ok(cat) => Ok((rep, cat)),
        Err(e) => Err((rep, e)),
    }
}

type CmdResult = catfrac::Result<Option<std::sync::Arc<FinCat>>>;

fn cmd_check(
    rep: &mut RunReport,
    file: &Path,
    class: &str,
    property: &str,
    wrt: Option<&str>,
) -> CmdResult {
    let doc = load_fcat(file)?;
    let p = Property::from_name(property).ok_or_else(|| {
        let known: Vec<&str> = Property::ALL.iter().map(|p| p.name()).collect();
        Error::Invalid(format!(
            "unknown property `{property}`; known: {}",
            known.join(", ")
        ))
    })?;
    let s = doc.class(class)?;
    let all = catfrac::MorClass::all(&doc.cat);
    let t = match wrt {
        Some(n) => Some(doc.class(n)?),
        None if p.is_binary() => Some(&all),
        None => None,
    };
    rep.verdicts.push(class_property(&doc.cat, p, s, t)?);
    Ok(Some(doc.cat.clone()))
}

fn cmd_localize(
    rep: &mut RunReport,
    file: &Path,
    class: &str,
    fcat_out: Option<&Path>,
) -> CmdResult {
    let doc = load_fcat(file)?;
    let c = &doc.cat;
    let s = doc.class(class)?;
    let v = class_property(c, Property::RightLocalizing, s, None)?;
    if !v.is_holds() {
        rep.verdicts.push(v);
        rep.exit = 3;
        return Ok(Some(c.clone()));
    }
    rep.verdicts.push(v);
    let fr = localize(c, s)?;
    let text = fcat::serialize_cat(&fr.cat);
    let mut table = String::new();
    for m in c.morphisms() {
        let _ = writeln!(
            table,
            "{} -> {}",
            c.mor_name(m),
            fr.cat.mor_name(fr.q.mor(m))
        );
    }
    if let Some(path) = fcat_out {
        std::fs::write(path, &text)
            .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    rep.section("fractions", text);
    rep.section("Q_S", table);
    Ok(Some(c.clone()))
}

/// Parses `[1],[1]x[1]` into `[[1], [1, 1]]`.
pub fn parse_shapes(s: &str) -> catfrac::Result<Vec<Vec<usize>>> {
    let bad = || Error::Invalid(format!("bad shape list `{s}`"));
    s.split(',')
        .map(|shape| {
            shape
                .split('x')
                .map(|axis| {
                    axis.trim()
                        .trim_start_matches('[')
                        .trim_end_matches(']')
                        .parse::<usize>()
                        .map_err(|_| bad())
                })
                .collect()
        })
        .collect()
}

fn parse_list(s: &str) -> catfrac::Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Invalid(format!("bad list `{s}`")))
        })
        .collect()
}

/// Sweep options from the `verify` flags.
pub fn sweep_options(a: &VerifyArgs) -> catfrac::Result<SweepOptions> {
    Ok(SweepOptions {
        max_objects: a.max_objects,
        max_morphisms: a.max_mor,
        samples: a.samples,
        seed: a.seed,
        deadline: a
            .budget_secs
            .map(|b| Instant::now() + Duration::from_secs(b)),
        n_values: parse_list(&a.n)?,
        shapes: parse_shapes(&a.shapes)?,
        target_max_morphisms: a.target_max_mor,
        claim_max: a.claim_max,
    })
}

/// The category a reproducer's bindings refer to, when there is only one.
fn repro_cat(r: &Repro) -> Option<std::sync::Arc<FinCat>> {
    match (&r.cod, &r.dom) {
        (Some(c), None) => Some(c.cat.clone()),
        _ => None,
    }
}

fn cmd_verify(rep: &mut RunReport, a: &VerifyArgs) -> CmdResult {
    if !harness::is_registered(&a.id) {
        return Err(Error::Invalid(format!(
            "unknown harness id `{}`; known: {}",
            a.id,
            harness::IDS.join(", ")
        )));
    }
    if let Some(path) = &a.repro {
        let r = Repro::parse(&read(path)?)?;
        if r.harness != a.id {
            return Err(Error::Invalid(format!(
                "reproducer is for harness {}, not {}",
                r.harness, a.id
            )));
        }
        rep.verdicts.push(harness::run_repro(&r)?);
        return Ok(repro_cat(&r));
    }
    let sum = harness::sweep(&a.id, &sweep_options(a)?)?;
    rep.section("summary", sum.render());
    if let Some(f) = &sum.failure {
        let mut v = f.verdict.clone();
        v.property = format!("{} (minimized reproducer)", v.property);
        rep.verdicts.push(v);
        rep.section("reproducer", f.repro.to_text());
    }
    rep.exit = if sum.fails > 0 {
        3
    } else if sum.size_errors > 0 {
        4
    } else if sum.errors > 0 {
        1
    } else {
        0
    };
    Ok(sum.failure.as_ref().and_then(|f| repro_cat(&f.repro)))
}

fn cmd_wald(
    rep: &mut RunReport,
    file: &Path,
    v: Option<&str>,
    claim: Option<&str>,
    k0: bool,
) -> CmdResult {
    let mut doc = load_fcat(file)?;
    if doc.zero.is_none() {
        return Err(Error::Invalid("document has no `zero` declaration".into()));
    }
    if doc.cof.is_none() {
        return Err(Error::Invalid("document has no `cof` declaration".into()));
    }
    if let Some(name) = v {
        let k = doc.class(name)?.clone();
        doc.set_class("V", k);
    }
    let w = harness::waldcat_of(&doc)?;
    let c = w.base().clone();
    let val = validate_waldcat(&w);
    let mut body = format!(
        "violations: {}\nmissing pushouts: {}\n",
        val.violations.len(),
        val.missing.len()
    );
    for x in &val.violations {
        let _ = writeln!(body, "  {x}");
    }
    rep.section("validation", body);
    if !val.is_valid() {
        return Err(Error::Invalid("not a valid Waldhausen instance".into()));
    }
    rep.verdicts.extend(fibration_hypotheses_report(&w)?);
    if let Some(nm) = claim {
        let nm = parse_list(nm)?;
        let [n, m] = nm[..] else {
            return Err(Error::Invalid("--claim expects `n,m`".into()));
        };
        let items = claim_verifier(&w, n, m, CofPolicy::default())?;
        rep.verdicts
            .push(Verdict::all(format!("claim n={n} m={m}"), items));
    }
    if k0 {
        let p = k0_presentation(&w)?;
        let mut line = format!("K0 = {}", p.invariants);
        let gens = p.cyclic_generators();
        if !p.invariants.is_zero() && !gens.is_empty() {
            let names: Vec<String> = gens
                .iter()
                .map(|&g| format!("[{}]", p.generators[g]))
                .collect();
            let _ = write!(line, ", generator {}", names.join(" or "));
        }
        let _ = write!(
            line,
            "\n{} generators, {} relations, {} cofibrations without a quotient in the instance\n",
            p.generators.len(),
            p.relations.len(),
            p.skipped
        );
        rep.section("K0", line);
    }
    Ok(Some(c))
}

/// Invariants with the free part always written as `Z^r`.
fn explicit_rank(inv: &AbInvariants) -> String {
    if inv.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    if inv.rank > 0 {
        parts.push(format!("Z^{}", inv.rank));
    }
    parts.extend(inv.torsion.iter().map(|d| format!("Z/{d}")));
    parts.join(" + ")
}

fn cmd_zdiag(
    rep: &mut RunReport,
    op: ZdOp,
    files: &[PathBuf],
    invert: &str,
    instance: &str,
) -> catfrac::Result<()> {
    let docs = files
        .iter()
        .map(|f| load_zd(f))
        .collect::<catfrac::Result<Vec<_>>>()?;
    let need = |k: usize| -> catfrac::Result<()> {
        if docs.len() < k {
            Err(Error::Invalid(format!("expected {k} diagram file(s)")))
        } else {
            Ok(())
        }
    };
    match op {
        ZdOp::Hom => {
            need(1)?;
            let x = docs[0].first_object()?;
            let y = match docs.get(1) {
                Some(d) => d.first_object()?,
                None => docs[0]
                    .objects
                    .get(1)
                    .map_or(Ok(x), |o| Ok::<_, Error>(&o.1))?,
            };
            let h = hom_group(x, y)?;
            rep.section(
                "hom",
                format!("Hom = {}\n", explicit_rank(&h.group.invariants())),
            );
        }
        ZdOp::Loc => {
            need(1)?;
            let s = parse_invert(invert)?;
            let x = docs[0].first_object()?;
            let l = localize_diagram(x, &s)?;
            let mut body = String::new();
            if l.num_points() == 1 {
                let _ = writeln!(body, "{}", group_text(&l.points[0]));
            } else {
                for (p, g) in l.points.iter().enumerate() {
                    let _ = writeln!(body, "point {:?} = {}", l.coords(p), group_text(g));
                }
            }
            rep.section("localized", body);
            rep.section("diagram", zdformat::serialize(&zdformat::single_object(&l)));
        }
        ZdOp::Weq => {
            need(1)?;
            let s = parse_invert(invert)?;
            let f = docs[0].first_morphism()?;
            let mut v = is_weak_equivalence(f, &s)?;
            if v.is_holds() {
                if let Some(w) = weq_witness(f, &s, WITNESS_BOUND)? {
                    let ok = catfrac::zdiag::witness_replay(f, &w)?;
                    v.notes.push(format!(
                        "witness replay {}",
                        if ok { "passes" } else { "FAILS" }
                    ));
                    if !ok {
                        return Err(Error::Internal("witness does not replay".into()));
                    }
                }
            }
            rep.verdicts.push(v);
        }
        ZdOp::Suite => {
            let cfg = SuiteConfig::default();
            let inst = match instance {
                "mixed-torsion" => zx::mixed_torsion(cfg),
                "finite-mixed" => zx::finite_mixed(cfg),
                "finite-2groups" => zx::finite_2groups(cfg),
                other => return Err(Error::Invalid(format!("unknown suite instance `{other}`"))),
            };
            rep.verdicts.extend(defcor_suite(&inst)?);
        }
    }
    Ok(())
}

fn cmd_nerve(
    rep: &mut RunReport,
    file: &Path,
    dim: usize,
    homology: bool,
    faces: bool,
) -> CmdResult {
    let doc = load_fcat(file)?;
    let n = nerve(&doc.cat, dim)?;
    let mut body = String::new();
    for k in 0..=dim {
        let _ = writeln!(body, "level {k}: {}", n.count(k));
    }
    let _ = writeln!(
        body,
        "euler characteristic (truncated): {}",
        n.euler_characteristic()
    );
    let _ = writeln!(body, "complete: {}", n.complete);
    rep.section("simplices", body);
    if homology {
        if dim == 0 {
            return Err(Error::Invalid("homology needs --dim at least 1".into()));
        }
        let h = homology_of(&n);
        rep.section("homology", format!("{h}\n").replace(" = ", "="));
    }
    if faces {
        rep.section("faces", n.to_face_list(&doc.cat));
    }
    Ok(Some(doc.cat.clone()))
}
