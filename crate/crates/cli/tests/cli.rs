use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_catfrac"))
        .args(args)
        .env_remove("CATFRAC_MAX_MORPHISMS")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

#[test]
fn check_ordinal_classes() {
    let f = data("ord1.fcat");
    let (code, out) = run(&[
        "check",
        &f,
        "--class",
        "S",
        "--property",
        "right-localizing",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("HOLDS: right-localizing"));
    let (code, out) = run(&[
        "check",
        &f,
        "--class",
        "T",
        "--property",
        "right-cofinal",
        "--wrt",
        "S",
    ]);
    assert_eq!(code, 3);
    assert!(out.contains("outside=f"), "{out}");
}

#[test]
fn malformed_input_reports_the_line() {
    let (code, out) = run(&[
        "check",
        &data("malformed.fcat"),
        "--class",
        "S",
        "--property",
        "saturated",
    ]);
    assert_eq!(code, 2);
    assert!(out.contains("line 3"), "{out}");
}

#[test]
fn localize_ordinal_gives_singleton_homs() {
    let (code, out) = run(&["localize", &data("ord1.fcat"), "--class", "S"]);
    assert_eq!(code, 0, "{out}");
    let fcat_text: String = out
        .split("[fractions]\n")
        .nth(1)
        .unwrap()
        .split("[Q_S]")
        .next()
        .unwrap()
        .into();
    let doc = catfrac_cli::fcat::parse(&fcat_text).unwrap();
    let c = &doc.cat;
    assert_eq!(c.num_objects(), 2);
    for x in c.objects() {
        for y in c.objects() {
            assert_eq!(c.hom(x, y).len(), 1);
        }
    }
    assert!(out.contains("f -> frac(f,id(A))"));
}

#[test]
fn localize_groupoid_class_is_isomorphic() {
    let (code, out) = run(&["localize", &data("walking_iso.fcat"), "--class", "I"]);
    assert_eq!(code, 0);
    let text: String = out
        .split("[fractions]\n")
        .nth(1)
        .unwrap()
        .split("[Q_S]")
        .next()
        .unwrap()
        .into();
    let doc = catfrac_cli::fcat::parse(&text).unwrap();
    assert_eq!((doc.cat.num_objects(), doc.cat.num_morphisms()), (2, 4));
}

#[test]
fn localize_refuses_a_cospan() {
    let (code, out) = run(&["localize", &data("cospan.fcat"), "--class", "S"]);
    assert_eq!(code, 3);
    assert!(out.contains("a=f b=g"), "{out}");
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "7.7"]).0, 2);
    let (code, out) = run(&[
        "verify",
        "4.3",
        "--shapes",
        "[1],[1]x[1]",
        "--samples",
        "200",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains(" 0 fails"), "{out}");
}

#[test]
fn failing_sweep_reproducer_fails_again() {
    let (code, out) = run(&[
        "verify",
        "1.6.2-literal",
        "--max-objects",
        "2",
        "--max-mor",
        "4",
        "--samples",
        "2000",
    ]);
    assert_eq!(code, 3, "{out}");
    let repro: String = out
        .split("[reproducer]\n")
        .nth(1)
        .unwrap()
        .split("exit 3")
        .next()
        .unwrap()
        .into();
    let dir = std::env::temp_dir().join(format!("catfrac-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("repro.txt");
    std::fs::write(&path, &repro).unwrap();
    let (code, out) = run(&["verify", "1.6.2-literal", "--repro", path.to_str().unwrap()]);
    assert_eq!(code, 3, "{out}");
    assert!(out.contains("FAILS"));
}

#[test]
fn wald_t2() {
    let f = data("t2.fcat");
    let (code, out) = run(&["wald", &f, "--k0"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("K0 = Z, generator [Z/2]"));
    assert_eq!(out.matches("HOLDS: (").count(), 9);
    assert_eq!(run(&["wald", &data("ord1.fcat")]).0, 2);
}

#[test]
fn wald_claim_on_t2() {
    let (code, out) = run(&["wald", &data("t2.fcat"), "--claim", "1,1"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("HOLDS: claim n=1 m=1"));
}

#[test]
fn zdiag_commands() {
    let x = data("double.zd");
    let (code, out) = run(&["zdiag", "hom", &x, &x]);
    assert_eq!(code, 0);
    assert!(out.contains("Hom = Z^1"), "{out}");
    let (code, out) = run(&["zdiag", "weq", &data("times3.zd"), "--invert", "3"]);
    assert_eq!(code, 0);
    assert!(
        out.contains("HOLDS: weak equivalence") && out.contains("witness: g="),
        "{out}"
    );
    assert_eq!(
        run(&["zdiag", "weq", &data("times3.zd"), "--invert", "2"]).0,
        3
    );
    let (code, out) = run(&["zdiag", "loc", &data("z6.zd"), "--invert", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("[localized]\nZ/3\n"), "{out}");
}

#[test]
fn nerve_commands() {
    let (code, out) = run(&["nerve", &data("ord1.fcat"), "--dim", "3", "--homology"]);
    assert_eq!(code, 0);
    assert!(out.contains("H0=Z\nH1=0\n"), "{out}");
    let (_, out) = run(&["nerve", &data("terminal.fcat"), "--dim", "2", "--homology"]);
    assert!(out.contains("H0=Z"));
    let (_, out) = run(&["nerve", &data("circle.fcat"), "--dim", "3", "--homology"]);
    assert!(out.contains("H1=Z\n"));
}

#[test]
fn size_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_catfrac"))
        .args(["nerve", &data("t2.fcat"), "--dim", "1"])
        .env("CATFRAC_MAX_MORPHISMS", "20")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "verify",
        "1.8.1",
        "--max-objects",
        "2",
        "--max-mor",
        "3",
        "--samples",
        "50",
        "--seed",
        "11",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a, b);
    let json = run(&[
        "--format",
        "json",
        "check",
        &data("ord1.fcat"),
        "--class",
        "S",
        "--property",
        "saturated",
    ]);
    assert_eq!(json.0, 0);
    let v: serde_json::Value = serde_json::from_str(&json.1).unwrap();
    assert_eq!(v["exit"], 0);
}
