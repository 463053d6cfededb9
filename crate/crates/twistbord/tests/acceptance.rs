//! Acceptance runner: one PASS/FAIL line per criterion, followed by indented
//! detail lines. Exits 0 unless `ACCEPTANCE_STRICT=1` is set and a criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::props::{self, leaf, recipe, CLI_COMMANDS};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};
use twistbord::catalog::catalog;
use twistbord::decompose::IsoResult;
use twistbord::ext::{assemble_groups, collapse_certificate, ext_of};
use twistbord::groups::AbelianGroup;
use twistbord::les::{parse_les, solve_les, LesProblem};
use twistbord::obstruction::{
    evaluate_obstruction_on, nonzero_on, primary_obstruction_oneform, twoform_degree6_injectivity, twoform_degree6_with, CohomologyClassExpr,
    Verdict,
};
use twistbord::pipeline::{decompose_structure, matches_reference, run_pipeline, OddPart};
use twistbord::space::{named_structure_with, SqMutation};

const CASES: u32 = 200;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: impl Into<String>) {
        let line = line.into();
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }
}

const PUBLISHED: [(&str, &[&str]); 10] = [
    ("GM", &["Z", "0", "0", "0", "Z^2", "0"]),
    ("KTminus", &["Z/2", "0", "Z/2", "0", "(Z/2)^3"]),
    ("KTplus", &["Z/2", "0", "Z/2", "0", "(Z/2)^3"]),
    ("FK", &["Z", "0", "Z", "0", "Z^2"]),
    ("FKO", &["Z/2", "0", "Z/4", "0", "Z/8+Z/2"]),
    ("SpinO2", &["Z", "Z/2", "Z/2", "Z/2", "Z^2", "Z/2"]),
    ("SigmaBO2", &["Z/2", "Z/2", "Z+Z/8", "Z/2", "0", "Z/16"]),
    ("TauMinus", &["Z/2", "Z/2", "(Z/2)^2", "(Z/2)^2"]),
    ("TauPlus", &["Z/2", "Z/2", "(Z/2)^2", "Z/8+Z/2", "(Z/2)^4"]),
    ("PinMinusO2", &["Z/2", "Z/2", "(Z/2)^2", "Z/2", "Z/4+Z/2+Z/2"]),
];

fn golden_tables() -> Outcome {
    let mut out = Outcome::new();
    for (name, table) in PUBLISHED {
        let start = Instant::now();
        let rows = run_pipeline(name, table.len() as i32 - 1).expect("registered pipeline");
        let elapsed = start.elapsed();
        for (row, want) in rows.iter().zip(table) {
            let want: AbelianGroup = want.parse().expect("table entries parse");
            let got = row.group();
            if got != want || !row.flags.certified {
                let status = if row.flags.certified { "certified" } else { "uncertified" };
                out.check(false, format!("{name} degree {}: computed {got} ({status}), table {want}", row.degree));
            }
        }
        let matching = rows.iter().zip(table).filter(|(r, w)| r.flags.certified && r.group() == w.parse::<AbelianGroup>().unwrap()).count();
        let odd = match rows.first().map(|r| &r.odd_part) {
            Some(OddPart::Documented { source, .. }) => format!("odd part documented ({source})"),
            _ => "odd part assumed trivial".to_string(),
        };
        out.check(elapsed < Duration::from_secs(30), format!("{name}: {matching}/{} degrees match, {odd}, {elapsed:.2?}", table.len()));
    }
    out
}

fn decompositions() -> Outcome {
    let mut out = Outcome::new();
    for (name, n) in [("GM", 6), ("SpinO2", 6), ("J⊗PinMinus", 4), ("KTminus", 4), ("KTplus", 4)] {
        let dec = decompose_structure(name, n).expect("known structure");
        let verdict = match matches_reference(name, n).expect("known structure") {
            IsoResult::Iso(w) => (w.is_iso(), "isomorphism witness found".to_string()),
            IsoResult::NotIsomorphic(why) => (false, format!("not isomorphic: {why}")),
            IsoResult::Undecided { subspace_dim } => (false, format!("undecided ({subspace_dim} bits)")),
        };
        out.check(dec.verify() && verdict.0, format!("{name} through {n}: split witness {}, reference {}", dec.verify(), verdict.1));
    }
    out
}

fn les(name: &str) -> LesProblem {
    let path = format!("{}/fixtures/les/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_les(&std::fs::read_to_string(path).expect("fixture exists")).expect("fixture parses")
}

fn slot(p: &LesProblem, degree: i32, column: &str) -> usize {
    p.slots.iter().position(|s| s.degree == degree && s.column == column).expect("slot exists")
}

fn les_outputs() -> Outcome {
    let mut out = Outcome::new();
    let gm = les("gm.les");
    match solve_les(&gm) {
        Ok(s) => {
            let got: Vec<String> = (0..6).map(|k| s.get(slot(&gm, k, "pi")).unwrap().describe()).collect();
            out.check(got == ["Z", "Z/2", "Z/2", "0", "Z+Z/2", "0"], format!("pi(F_GM) = {}", got.join(", ")));
        }
        Err(c) => out.check(false, format!("GM sequence: {c}")),
    }
    let minus = les("kt_minus.les");
    match solve_les(&minus) {
        Ok(s) => {
            let a = s.get(slot(&minus, 2, "pi")).unwrap();
            let b = s.get(slot(&minus, 4, "pi")).unwrap();
            out.check(a.order_bounds() == Some((4, Some(4))) && a.determined().is_none(), format!("|A-| : {}", a.describe()));
            out.check(b.nonzero, format!("B- : {}", b.describe()));
        }
        Err(c) => out.check(false, format!("KT- sequence: {c}")),
    }
    let plus = les("kt_plus.les");
    match solve_les(&plus) {
        Ok(s) => {
            let a = s.get(slot(&plus, 4, "pi")).unwrap();
            let lower = a.order_bounds().map(|(lo, _)| lo);
            out.check(lower == Some(8) && a.determined().is_none(), format!("|A+| : {}", a.describe()));
        }
        Err(c) => out.check(false, format!("KT+ sequence: {c}")),
    }
    out
}

fn obstructions() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let ob = primary_obstruction_oneform();
    out.check(ob.equals_sq2sq1, format!("ker Sq1 / Im Sq1 in degree 5 is spanned by {}; equals Sq2Sq1 B: {}", ob.expr(), ob.equals_sq2sq1));
    let sq1 = ob.space.poly_label(&ob.sq1_of_sq2sq1);
    out.check(!ob.sq1_of_sq2sq1.is_zero(), format!("Sq1 Sq2Sq1 B = {sq1}, so Sq2Sq1 B is not a cocycle for Sq1"));
    let hits = nonzero_on(&ob.expr());
    out.check(hits.iter().any(|s| s == "WuManifold"), format!("kernel class nonzero on: {}", if hits.is_empty() { "none".into() } else { hits.join(", ") }));
    let wu = CohomologyClassExpr::parse("Sq2Sq1 z2").expect("literal");
    let e = evaluate_obstruction_on("WuManifold", &wu).expect("Wu manifold is cataloged");
    out.details.push(format!("info Sq2Sq1 z2 on the Wu manifold = {} ({})", e.label, e.verdict));
    out.check(!hits.iter().any(|s| s == "SpinPlaceholder"), "kernel class vanishes on the spin placeholder");
    let spin = evaluate_obstruction_on("SpinPlaceholder", &CohomologyClassExpr::parse("Sq2Sq1 B").expect("literal")).expect("placeholder");
    out.check(spin.verdict == Verdict::Zero, format!("Sq2Sq1 B on the spin placeholder: {}", spin.verdict));
    let two = twoform_degree6_injectivity();
    out.check(two.injective, format!("degree-6 two-form pullback injective: {} ({})", two.injective, two.pullbacks.join(", ")));
    out.check(start.elapsed() < Duration::from_secs(1), format!("runtime {:.2?}", start.elapsed()));
    out
}

fn ext_fixture() -> Outcome {
    let mut out = Outcome::new();
    let text = include_str!("../fixtures/ext/f2.tsv");
    let f2 = catalog("F2", 24).expect("catalog");
    let chart = ext_of(&f2, 12, 21).expect("resolves");
    let oracle = common::oracle_ext(&f2, 12, 21);
    let mut mismatches = 0;
    let mut entries = 0;
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("s\t")) {
        let f: Vec<usize> = line.split('\t').map(|x| x.parse().expect("numeric")).collect();
        let (s, n, dim) = (f[0], f[1] as i32, f[2]);
        entries += 1;
        if chart.dim(s, n) != dim || oracle.dim(s, n) != dim {
            mismatches += 1;
        }
    }
    out.check(entries == 117 && mismatches == 0, format!("{entries} fixture entries, {mismatches} disagree with engine or oracle"));
    let report = assemble_groups(&chart, &collapse_certificate(&chart), 8);
    let groups: Vec<String> = report.groups().iter().map(ToString::to_string).collect();
    out.check(groups == ["Z", "Z/2", "Z/2", "0", "Z", "0", "0", "0", "Z"], format!("groups {}", groups.join(", ")));
    out
}

fn run_property<S: Strategy>(out: &mut Outcome, name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) {
    let mut runner = TestRunner::new_with_rng(Config { cases: CASES, failure_persistence: None, ..Config::default() }, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    match runner.run(&strategy, test) {
        Ok(()) => out.check(true, format!("{name}: {CASES} cases")),
        Err(TestError::Fail(why, value)) => out.check(false, format!("{name}: {why} at {value:?}")),
        Err(TestError::Abort(why)) => out.check(false, format!("{name}: aborted, {why}")),
    }
}

fn property_suites() -> Outcome {
    let mut out = Outcome::new();
    let assoc = props::associativity_exhaustive();
    out.check(assoc == Ok(512), format!("A(1) associativity over all basis triples: {assoc:?}"));
    let models = props::faithful_on_x1234().and_then(|()| props::products_match_models());
    out.check(models.is_ok(), format!("A(1) products against independent models: {models:?}"));
    run_property(&mut out, "tensor/suspend closure", (leaf(), leaf(), -2..5i32), |(a, b, k)| props::tensor_and_suspend_stay_valid(&a, &b, k));
    run_property(&mut out, "split_free closure", recipe(), |r| props::split_free_pieces_are_valid(&r));
    run_property(&mut out, "Margolis-Kunneth", (leaf(), leaf(), 0..2u32), |(a, b, i)| props::margolis_kunneth(&a, &b, i));
    run_property(&mut out, "Ext additivity", (leaf(), leaf()), |(a, b)| props::ext_is_additive(&a, &b));
    run_property(&mut out, "Ext suspension shift", (recipe(), 1..3i32), |(a, k)| props::ext_shifts_with_suspension(&a, k));
    run_property(&mut out, "Ext against the oracle", recipe(), |a| props::ext_matches_oracle(&a));
    run_property(&mut out, "GF(2) rank-nullity", (0..24usize, 0..24usize, any::<u64>()), |(r, c, s)| props::rank_nullity(r, c, s));
    run_property(&mut out, "CLI --jobs 1 vs --jobs 8", (0..CLI_COMMANDS.len(), any::<bool>()), |(i, s)| props::cli_output_independent_of_jobs(i, s));
    out
}

fn mutation(generator: &str, square: u32, term: &str) -> SqMutation {
    SqMutation { generator: generator.into(), square, term: term.into() }
}

fn negative_controls() -> Outcome {
    let mut out = Outcome::new();
    let cases = [
        ("GM", 5, mutation("w2", 1, "w1*w2")),
        ("SpinO2", 5, mutation("w2", 1, "w1*w2")),
        ("SpinO2", 5, mutation("w2", 2, "w2^2")),
        ("PinMinus", 4, mutation("t", 1, "t^2")),
        ("FK", 4, mutation("w2", 2, "w2^2")),
        ("SigmaBO2", 5, mutation("w1", 1, "w1^2")),
        ("KTplus", 4, mutation("t", 1, "t^2")),
        ("MV_a_ab", 4, mutation("b", 1, "b^2")),
    ];
    let mut caught = 0;
    for (name, through, mu) in &cases {
        let m = named_structure_with(name, through + 20, Some(mu)).expect("well-formed mutation");
        let how = if let Err(e) = m.validate() {
            Some(format!("validate: {e}"))
        } else {
            let chart = ext_of(&m, 12, through + 13).expect("resolves");
            let got: Vec<String> = assemble_groups(&chart, &collapse_certificate(&chart), *through).groups().iter().map(ToString::to_string).collect();
            let clean: Vec<String> = run_pipeline(name, *through).expect("pipeline").iter().map(|g| g.group().to_string()).collect();
            (got != clean).then(|| format!("groups become {}", got.join(", ")))
        };
        caught += usize::from(how.is_some());
        out.check(how.is_some(), format!("{name}: Sq{} {} += {}: {}", mu.square, mu.generator, mu.term, how.unwrap_or_else(|| "not detected".into())));
    }
    let w3 = twoform_degree6_with(Some(&mutation("w3", 1, "w1*w3"))).expect("well-formed mutation");
    caught += usize::from(!w3.injective);
    out.check(!w3.injective, format!("MO3: Sq1 w3 += w1*w3: two-form pullback injective = {}", w3.injective));
    out.check(caught >= 5, format!("{caught} corruptions detected"));
    out
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("golden bordism tables", golden_tables),
        ("decompositions with witnesses", decompositions),
        ("LES outputs", les_outputs),
        ("obstruction suite", obstructions),
        ("Ext(F2) fixture", ext_fixture),
        ("property suites", property_suites),
        ("negative controls", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        failed += usize::from(!outcome.pass);
        println!("criterion {}: {} {name} ({:.2?})", i + 1, if outcome.pass { "PASS" } else { "FAIL" }, start.elapsed());
        for d in &outcome.details {
            println!("    {d}");
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
