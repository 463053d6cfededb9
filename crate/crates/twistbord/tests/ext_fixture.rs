mod common;

use twistbord::catalog::catalog;
use twistbord::ext::{assemble_groups, collapse_certificate, ext_of};

const FIXTURE: &str = include_str!("../fixtures/ext/f2.tsv");

fn fixture() -> Vec<(usize, i32, usize)> {
    FIXTURE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("s\t"))
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn fixture_covers_the_window() {
    assert_eq!(fixture().len(), 13 * 9);
}

#[test]
fn engine_matches_fixture() {
    let chart = ext_of(&catalog("F2", 24).unwrap(), 12, 21).unwrap();
    for (s, n, dim) in fixture() {
        assert_eq!(chart.dim(s, n), dim, "Ext^({s},{})", s as i32 + n);
    }
}

#[test]
fn oracle_matches_fixture() {
    let oracle = common::oracle_ext(&catalog("F2", 24).unwrap(), 12, 21);
    for (s, n, dim) in fixture() {
        assert_eq!(oracle.dim(s, n), dim, "Ext^({s},{})", s as i32 + n);
    }
}

#[test]
fn f2_groups_are_ko() {
    let chart = ext_of(&catalog("F2", 24).unwrap(), 12, 21).unwrap();
    let report = assemble_groups(&chart, &collapse_certificate(&chart), 8);
    let groups: Vec<String> = report.groups().iter().map(ToString::to_string).collect();
    assert_eq!(groups, ["Z", "Z/2", "Z/2", "0", "Z", "0", "0", "0", "Z"]);
    assert!(report.fully_certified());
}

#[test]
fn h0_and_h1_products_in_low_stems() {
    let chart = ext_of(&catalog("F2", 24).unwrap(), 12, 21).unwrap();
    assert!(chart.h0(0, 0).get(0, 0));
    assert!(chart.h1(0, 0).get(0, 0));
    assert!(chart.h1(1, 1).get(0, 0));
    assert!(chart.h0(3, 4).get(0, 0));
}
