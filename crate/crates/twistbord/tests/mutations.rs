use twistbord::ext::{assemble_groups, collapse_certificate, ext_of};
use twistbord::module::GradedA1Module;
use twistbord::obstruction::{twoform_degree6_injectivity, twoform_degree6_with};
use twistbord::pipeline::run_pipeline;
use twistbord::space::{named_structure_with, SpaceError, SqMutation};

fn mutation(generator: &str, square: u32, term: &str) -> SqMutation {
    SqMutation { generator: generator.into(), square, term: term.into() }
}

fn groups_of(m: &GradedA1Module, through: i32) -> Vec<String> {
    let chart = ext_of(m, 12, through + 13).unwrap();
    assemble_groups(&chart, &collapse_certificate(&chart), through).groups().iter().map(ToString::to_string).collect()
}

/// The mutated structure either fails validation or changes its bordism groups.
fn caught(name: &str, through: i32, mu: &SqMutation) -> bool {
    let m = named_structure_with(name, through + 20, Some(mu)).unwrap();
    if m.validate().is_err() {
        return true;
    }
    let clean: Vec<String> = run_pipeline(name, through).unwrap().iter().map(|g| g.group().to_string()).collect();
    groups_of(&m, through) != clean
}

#[test]
fn dropping_sq1_of_the_thom_class_in_gm_changes_groups() {
    let mu = mutation("w2", 1, "w1*w2");
    let m = named_structure_with("GM", 25, Some(&mu)).unwrap();
    assert!(m.validate().is_ok());
    assert_eq!(groups_of(&m, 5), ["Z", "0", "Z", "Z/2", "Z^2+Z/2", "Z/8+Z/2"]);
}

#[test]
fn dropping_sq1_w2_in_spin_o2_changes_groups() {
    assert!(caught("SpinO2", 5, &mutation("w2", 1, "w1*w2")));
}

#[test]
fn breaking_sq2_w2_fails_validation() {
    for name in ["SpinO2", "FK", "GM"] {
        let m = named_structure_with(name, 12, Some(&mutation("w2", 2, "w2^2"))).unwrap();
        let err = m.validate().unwrap_err().to_string();
        assert!(err.contains("Sq2∘Sq2"), "{name}: {err}");
    }
}

#[test]
fn breaking_sq1_of_a_line_class_fails_validation() {
    for (name, g) in [("PinMinus", "t"), ("KTplus", "t"), ("SigmaBO2", "w1"), ("PinMinusO2", "w1"), ("TauPlus", "b")] {
        let m = named_structure_with(name, 12, Some(&mutation(g, 1, &format!("{g}^2")))).unwrap();
        assert!(m.validate().is_err(), "{name}");
    }
}

#[test]
fn at_least_five_corruptions_are_caught() {
    let cases = [
        ("GM", 5, mutation("w2", 1, "w1*w2")),
        ("SpinO2", 5, mutation("w2", 1, "w1*w2")),
        ("SpinO2", 5, mutation("w2", 2, "w2^2")),
        ("PinMinus", 4, mutation("t", 1, "t^2")),
        ("FK", 4, mutation("w2", 2, "w2^2")),
        ("SigmaBO2", 5, mutation("w1", 1, "w1^2")),
        ("MV_a_ab", 4, mutation("b", 1, "b^2")),
    ];
    for (name, through, mu) in &cases {
        assert!(caught(name, *through, mu), "{name}: {mu:?}");
    }
}

#[test]
fn corrupted_w3_breaks_twoform_injectivity() {
    assert!(twoform_degree6_injectivity().injective);
    let v = twoform_degree6_with(Some(&mutation("w3", 1, "w1*w3"))).unwrap();
    assert!(!v.injective);
    assert_eq!(v.pullbacks[0], "0");
}

#[test]
fn malformed_mutations_are_rejected() {
    let wrong_degree = named_structure_with("FKO", 8, Some(&mutation("w2", 1, "w2")));
    assert!(matches!(wrong_degree, Err(SpaceError::DegreeMismatch { expected: 3, got: 2, .. })));
    let unparsable = named_structure_with("GM", 8, Some(&mutation("w2", 1, "w1 w2")));
    assert!(matches!(unparsable, Err(SpaceError::Parse { .. })));
    let mixed = named_structure_with("GM", 8, Some(&mutation("w2", 1, "w1*w2 + w1")));
    assert!(matches!(mixed, Err(SpaceError::Inhomogeneous { .. })));
}

#[test]
fn absent_generators_leave_the_structure_alone() {
    let m = named_structure_with("PinMinus", 10, Some(&mutation("w2", 1, "w1*w2"))).unwrap();
    assert!(m.validate().is_ok());
}
