use nlwe_core::certify::{certify_irreducibility, classify_hidden_nonlocality, Irreducibility, Verdict};
use nlwe_core::measurement::{is_orthogonality_preserving, joint_outcomes};
use nlwe_core::report::{reproduce, run_check};
use nlwe_core::{Family, JointMeasurement, ProtocolTree, SpaceSpec, StateSet};

fn classify(f: &Family) -> nlwe_core::certify::Classification {
    let set = f.construct().unwrap();
    classify_hidden_nonlocality(
        &set,
        &f.activating_measurement().unwrap(),
        &f.builtin_protocol().unwrap(),
        "builtin",
        &f.outcome_witnesses().unwrap(),
    )
}

#[test]
fn classification_is_deterministic() {
    let f = Family::TypeII78;
    let a = serde_json::to_string(&classify(&f)).unwrap();
    let b = serde_json::to_string(&classify(&f)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn example2_is_type_i() {
    assert_eq!(classify(&Family::TypeI(13)).verdict, Verdict::TypeI);
}

#[test]
fn type1_15_pipeline_runs() {
    // composite dimension: same construction, same verdict
    assert_eq!(classify(&Family::TypeI(15)).verdict, Verdict::TypeI);
}

#[test]
fn measurement_literal_round_trip() {
    for lit in ["B:0-4;5-10", "A:0-3;4-6/B:0-4;5-7", "B:0-4;5-10/D:0-4;5-10/F:0-5;6-12"] {
        let m: JointMeasurement = lit.parse().unwrap();
        assert_eq!(m.to_string(), lit);
    }
}

#[test]
fn non_preserving_measurement_is_flagged() {
    let set = Family::TypeI(11).construct().unwrap();
    let m: JointMeasurement = "B:0-1;2-10".parse().unwrap();
    let op = is_orthogonality_preserving(&set, &m).unwrap();
    assert!(!op.preserving);
    assert!(!op.violations.is_empty());
}

#[test]
fn outcome_ids_are_one_based_and_nested() {
    let set = Family::MultipartyTypeI(vec![11, 11, 13]).construct().unwrap();
    let m = Family::MultipartyTypeI(vec![11, 11, 13]).activating_measurement().unwrap();
    let ids: Vec<String> = joint_outcomes(&set, &m).unwrap().into_iter().map(|o| o.outcome_id).collect();
    assert_eq!(ids.first().map(String::as_str), Some("1.1.1"));
    assert_eq!(ids.last().map(String::as_str), Some("2.2.2"));
}

#[test]
fn product_basis_is_reducible() {
    let set = StateSet::parse(
        SpaceSpec::bipartite(2, 2).unwrap(),
        &[("a", &["|0>", "|0>"]), ("b", &["|0>", "|1>"]), ("c", &["|1>", "|0>"]), ("d", &["|1>", "|1>"])],
    )
    .unwrap();
    assert!(matches!(certify_irreducibility(&set).unwrap().verdict, Irreducibility::Reducible { .. }));
}

#[test]
fn unknown_protocol_leaf_gives_not_established() {
    let f = Family::TypeI(11);
    let set = f.construct().unwrap();
    let c = classify_hidden_nonlocality(
        &set,
        &f.activating_measurement().unwrap(),
        &ProtocolTree::Leaf,
        "leaf",
        &f.outcome_witnesses().unwrap(),
    );
    assert!(matches!(c.verdict, Verdict::NotEstablished(_)));
}

#[test]
fn checks_by_name() {
    let set = Family::StrongTypeI11.construct().unwrap();
    assert_eq!(run_check("orthogonality", &set, None, None).unwrap().passed, Some(true));
    assert!(run_check("bogus", &set, None, None).is_err());
}

#[test]
fn unknown_example_is_an_error() {
    assert!(reproduce("example9").is_err());
}
