use catfrac::zsuite::{defcor_suite, examples, SuiteConfig};

#[test]
fn mixed_torsion_suite_items() {
    let inst = examples::mixed_torsion(SuiteConfig::default());
    let items = defcor_suite(&inst).unwrap();
    let ids: Vec<&str> = items
        .iter()
        .map(|v| v.property.split(") ").next().unwrap())
        .collect();
    assert_eq!(
        ids,
        ["(1", "(2", "(3", "(4", "(5", "(6", "(7", "(8", "(9", "(10", "(11", "(13", "(14"]
    );
    for v in &items {
        assert!(
            v.is_holds(),
            "{} {:?} {:?}",
            v.property,
            v.counterexample,
            v.notes
        );
    }
}

#[test]
fn finite_instances_hold() {
    for inst in [
        examples::finite_mixed(SuiteConfig::default()),
        examples::finite_2groups(SuiteConfig::default()),
    ] {
        for v in defcor_suite(&inst).unwrap() {
            assert!(!v.is_fails(), "{} {:?}", v.property, v.counterexample);
        }
    }
}
