//! Property checks shared by the proptest suite and the acceptance runner.

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use twistbord::a1::{basis_product, A1Element, BASIS_WORDS};
use twistbord::catalog::catalog;
use twistbord::cli;
use twistbord::decompose::split_free;
use twistbord::ext::ext_of;
use twistbord::gf2::{BitMatrix, BitVec};
use twistbord::module::GradedA1Module;

type Check = Result<(), TestCaseError>;

// Sq action on F2[x1..x4] with deg xi = 1, via Cartan and Sq(x) = x + x^2.
type Poly = BTreeMap<[u32; 4], bool>;

fn toggle_all(into: &mut Poly, from: impl IntoIterator<Item = [u32; 4]>) {
    for m in from {
        let e = into.entry(m).or_insert(false);
        *e = !*e;
    }
}

fn binom_odd(n: u32, k: u32) -> bool {
    k <= n && (k & !n) == 0
}

fn sq_mono(m: [u32; 4], k: u32) -> Poly {
    let mut acc: Poly = BTreeMap::new();
    let mut stack = vec![(0usize, k, m)];
    while let Some((i, left, cur)) = stack.pop() {
        if i == 4 {
            if left == 0 {
                toggle_all(&mut acc, [cur]);
            }
            continue;
        }
        for j in 0..=left.min(m[i]) {
            if binom_odd(m[i], j) {
                let mut next = cur;
                next[i] = m[i] + j;
                stack.push((i + 1, left - j, next));
            }
        }
    }
    acc.retain(|_, v| *v);
    acc
}

fn sq_poly(p: &Poly, k: u32) -> Poly {
    let mut out: Poly = BTreeMap::new();
    for m in p.keys() {
        toggle_all(&mut out, sq_mono(*m, k).into_keys());
    }
    out.retain(|_, v| *v);
    out
}

fn act(word: &[u8], p: &Poly) -> Poly {
    word.iter().rev().fold(p.clone(), |acc, &k| sq_poly(&acc, u32::from(k)))
}

fn act_element(a: A1Element, p: &Poly) -> Poly {
    let mut out: Poly = BTreeMap::new();
    for i in a.terms() {
        toggle_all(&mut out, act(BASIS_WORDS[i], p).into_keys());
    }
    out.retain(|_, v| *v);
    out
}

fn x1234() -> Poly {
    BTreeMap::from([([1, 1, 1, 1], true)])
}

/// No nonzero element of A(1) kills x1x2x3x4.
pub fn faithful_on_x1234() -> Result<(), String> {
    let v = x1234();
    let images: Vec<Poly> = (0..8).map(|i| act(BASIS_WORDS[i], &v)).collect();
    for mask in 1u16..256 {
        let mut sum: Poly = BTreeMap::new();
        for (i, img) in images.iter().enumerate() {
            if mask >> i & 1 == 1 {
                toggle_all(&mut sum, img.keys().copied());
            }
        }
        sum.retain(|_, v| *v);
        if sum.is_empty() {
            return Err(format!("mask {mask:#b} acts as zero"));
        }
    }
    Ok(())
}

/// Associativity over all 512 basis triples; returns the number checked.
pub fn associativity_exhaustive() -> Result<usize, String> {
    let mut checked = 0;
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                let (a, b, c) = (A1Element::basis(i), A1Element::basis(j), A1Element::basis(k));
                if (a * b) * c != a * (b * c) {
                    return Err(format!("({i},{j},{k})"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Basis products agree with the action on x1x2x3x4 and with word rewriting.
pub fn products_match_models() -> Result<(), String> {
    let v = x1234();
    for (i, wi) in super::WORDS.iter().enumerate() {
        for (j, wj) in super::WORDS.iter().enumerate() {
            let prod = basis_product(i, j).map_or(A1Element::zero(), A1Element::basis);
            if act_element(prod, &v) != act(BASIS_WORDS[i], &act(BASIS_WORDS[j], &v)) {
                return Err(format!("{wi} * {wj} disagrees with the polynomial model"));
            }
            let reduced = super::reduce(&format!("{wi}{wj}"));
            let expected = reduced.first().map(|w| super::WORDS.iter().position(|x| x == w).unwrap());
            if reduced.len() > 1 || basis_product(i, j) != expected {
                return Err(format!("{wi} * {wj} disagrees with rewriting"));
            }
        }
    }
    Ok(())
}

const PIECES: [&str; 7] = ["F2", "A1free", "M0", "M1", "J", "Q", "R2"];

#[derive(Clone, Debug)]
pub enum Recipe {
    Leaf(usize, i32),
    Sum(Box<Recipe>, Box<Recipe>),
    Tensor(Box<Recipe>, Box<Recipe>),
}

impl Recipe {
    pub fn build(&self) -> GradedA1Module {
        match self {
            Self::Leaf(i, k) => catalog(PIECES[*i], 16).unwrap().suspend(*k),
            Self::Sum(a, b) => a.build().direct_sum(&b.build()),
            Self::Tensor(a, b) => a.build().tensor(&b.build()),
        }
    }
}

pub fn leaf() -> impl Strategy<Value = Recipe> {
    (0..PIECES.len(), 0..4i32).prop_map(|(i, k)| Recipe::Leaf(i, k))
}

/// A leaf, a sum of two leaves, or a tensor of two non-free leaves.
pub fn recipe() -> impl Strategy<Value = Recipe> {
    let small = (0..PIECES.len(), 0..3i32).prop_filter("no free factors", |(i, _)| PIECES[*i] != "A1free");
    prop_oneof![
        leaf(),
        (leaf(), leaf()).prop_map(|(a, b)| Recipe::Sum(Box::new(a), Box::new(b))),
        (small.clone(), small).prop_map(|((i, a), (j, b))| Recipe::Tensor(Box::new(Recipe::Leaf(i, a)), Box::new(Recipe::Leaf(j, b)))),
    ]
}

fn margolis_dims(m: &GradedA1Module, i: u32) -> BTreeMap<i32, usize> {
    m.margolis(i).unwrap().support().into_iter().collect()
}

pub fn tensor_and_suspend_stay_valid(a: &Recipe, b: &Recipe, k: i32) -> Check {
    let (m, n) = (a.build(), b.build());
    prop_assert!(m.tensor(&n).validate().is_ok());
    prop_assert!(m.suspend(k).validate().is_ok());
    prop_assert_eq!(m.suspend(k).dim(k + 1), m.dim(1));
    Ok(())
}

pub fn split_free_pieces_are_valid(r: &Recipe) -> Check {
    let m = r.build();
    let dec = split_free(&m);
    prop_assert!(dec.verify());
    prop_assert!(dec.remainder.validate().is_ok());
    for (_, piece) in &dec.summands {
        prop_assert!(piece.validate().is_ok());
        prop_assert_eq!(piece.total_dim(), 8);
    }
    let total = dec.summands.iter().map(|(_, p)| p.total_dim()).sum::<usize>() + dec.remainder.total_dim();
    prop_assert_eq!(total, m.total_dim());
    Ok(())
}

pub fn margolis_kunneth(a: &Recipe, b: &Recipe, i: u32) -> Check {
    let (m, n) = (a.build(), b.build());
    prop_assume!(m.is_complete() && n.is_complete());
    let (hm, hn, ht) = (margolis_dims(&m, i), margolis_dims(&n, i), margolis_dims(&m.tensor(&n), i));
    let mut expected: BTreeMap<i32, usize> = BTreeMap::new();
    for (p, x) in &hm {
        for (q, y) in &hn {
            *expected.entry(p + q).or_default() += x * y;
        }
    }
    expected.retain(|_, v| *v > 0);
    prop_assert_eq!(ht, expected);
    Ok(())
}

const EXT_S: usize = 4;
const EXT_T: i32 = 10;

pub fn ext_is_additive(a: &Recipe, b: &Recipe) -> Check {
    let (m, n) = (a.build(), b.build());
    prop_assume!(m.is_complete() && n.is_complete());
    let em = ext_of(&m, EXT_S, EXT_T).unwrap();
    let en = ext_of(&n, EXT_S, EXT_T).unwrap();
    let es = ext_of(&m.direct_sum(&n), EXT_S, EXT_T).unwrap();
    for s in 0..=EXT_S {
        for k in -1..=EXT_T - EXT_S as i32 {
            prop_assert_eq!(es.dim(s, k), em.dim(s, k) + en.dim(s, k), "s={} n={}", s, k);
        }
    }
    Ok(())
}

pub fn ext_shifts_with_suspension(a: &Recipe, shift: i32) -> Check {
    let m = a.build();
    prop_assume!(m.is_complete());
    let e = ext_of(&m, EXT_S, EXT_T).unwrap();
    let es = ext_of(&m.suspend(shift), EXT_S, EXT_T + shift).unwrap();
    for s in 0..=EXT_S {
        for k in -1..=EXT_T - EXT_S as i32 {
            prop_assert_eq!(es.dim(s, k + shift), e.dim(s, k));
        }
    }
    Ok(())
}

pub fn ext_matches_oracle(a: &Recipe) -> Check {
    let m = a.build();
    prop_assume!(m.is_complete());
    let (e, o) = (ext_of(&m, EXT_S, EXT_T).unwrap(), super::oracle_ext(&m, EXT_S, EXT_T));
    for s in 0..=EXT_S {
        for k in -1..=EXT_T - EXT_S as i32 {
            prop_assert_eq!(e.dim(s, k), o.dim(s, k), "s={} n={}", s, k);
        }
    }
    Ok(())
}

pub fn rank_nullity(rows: usize, cols: usize, seed: u64) -> Check {
    let mut state = seed | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state & 1 == 1
    };
    let columns: Vec<BitVec> = (0..cols).map(|_| BitVec::from_bools(&(0..rows).map(|_| next()).collect::<Vec<_>>())).collect();
    let m = BitMatrix::from_columns(rows, &columns);
    let kernel = m.kernel_basis();
    prop_assert_eq!(m.rank() + kernel.len(), cols);
    for v in &kernel {
        prop_assert!(m.mul_vec(v).is_zero());
    }
    let dense: Vec<Vec<u8>> = columns.iter().map(|c| (0..rows).map(|r| u8::from(c.get(r))).collect()).collect();
    prop_assert_eq!(m.rank(), super::rank(rows, &dense));
    Ok(())
}

pub const CLI_COMMANDS: [&[&str]; 12] = [
    &["list"],
    &["bordism", "GM"],
    &["bordism", "SpinO2", "--format", "tsv"],
    &["bordism", "TauPlus"],
    &["bordism", "PinMinus", "--through", "6"],
    &["ext", "F2", "--max-n", "8", "--max-s", "12"],
    &["ext", "KTminus", "--max-n", "5", "--max-s", "8", "--format", "tsv"],
    &["decompose", "SpinO2", "--through", "6"],
    &["decompose", "GM", "--through", "6", "--format", "tsv"],
    &["module", "R2"],
    &["obstruction", "one-form", "--format", "tsv"],
    &["obstruction", "two-form"],
];

pub fn cli_output_independent_of_jobs(i: usize, strict: bool) -> Check {
    let mut base: Vec<&str> = vec!["twistbord"];
    if strict {
        base.push("--strict");
    }
    base.extend_from_slice(CLI_COMMANDS[i]);
    let one = cli::run(base.iter().copied().chain(["--jobs", "1"]));
    let eight = cli::run(base.iter().copied().chain(["--jobs", "8"]));
    prop_assert_eq!(one, eight);
    Ok(())
}
