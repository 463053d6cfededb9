//! The named small A(1)-modules: F2, A(1), M0, M1, J, Q, R2, R3.
//!
//! Cyclic and two-generator modules are built as quotients of free modules by
//! the submodule generated by their relations. R2 is the augmentation ideal of
//! Σ⁻¹A(1); R3 is the non-free part of J ⊗ H*((BO₁)^{σ−1}).

use crate::a1::{A1Element, BASIS_DEGREES};
use crate::decompose::split_free;
use crate::gf2::{BitMatrix, BitVec, EchelonBasis};
use crate::module::{f2, free_a1, GradedA1Module, ModuleError};
use crate::space;

pub const CATALOG_NAMES: [&str; 8] = ["F2", "A1free", "M0", "M1", "J", "Q", "R2", "R3"];

/// One generator of a presentation.
pub struct Generator<'a> {
    pub label: &'a str,
    pub degree: i32,
}

/// The quotient of the free module on `gens` by the submodule generated by
/// `relations`, each a sum of (generator index, operation) terms.
#[must_use]
pub fn presented(name: &str, gens: &[Generator<'_>], relations: &[Vec<(usize, A1Element)>]) -> GradedA1Module {
    let mut free = GradedA1Module::zero(name);
    let mut offsets: Vec<Vec<(i32, usize)>> = Vec::new();
    for g in gens {
        let piece = free_a1().suspend(g.degree).relabel(|w| if w == "1" { g.label.to_string() } else { format!("{w}·{}", g.label) });
        // Position of each basis word of this generator inside the running sum.
        let mut pos = Vec::new();
        for (w, &deg) in BASIS_DEGREES.iter().enumerate() {
            let d = g.degree + deg as i32;
            let before = free.dim(d);
            let within = (0..w).filter(|&v| BASIS_DEGREES[v] == deg).count();
            pos.push((d, before + within));
        }
        offsets.push(pos);
        free = free.direct_sum(&piece);
    }
    let generator_vector = |g: usize, word: usize| -> (i32, BitVec) {
        let (d, i) = offsets[g][word];
        (d, BitVec::unit(free.dim(d), i))
    };
    let (lo, hi) = (free.lo(), free.hi());
    let mut spans: Vec<EchelonBasis> = (lo..=hi).map(|d| EchelonBasis::new(free.dim(d))).collect();
    for rel in relations {
        let mut degree = None;
        let mut vec: Option<BitVec> = None;
        for &(g, a) in rel {
            for w in a.terms() {
                let (d, v) = generator_vector(g, w);
                assert!(degree.is_none() || degree == Some(d), "relation is not homogeneous");
                degree = Some(d);
                match &mut vec {
                    Some(acc) => acc.xor_assign(&v),
                    None => vec = Some(v),
                }
            }
        }
        let (Some(d), Some(v)) = (degree, vec) else { continue };
        for (w, &deg) in BASIS_DEGREES.iter().enumerate() {
            let e = d + deg as i32;
            if e > hi {
                continue;
            }
            let image = free.apply_basis(w, d, &v).expect("free module is complete");
            spans[(e - lo) as usize].insert(&image);
        }
    }
    quotient_by(&free, &spans).named(name)
}

/// Quotient of a complete module by per-degree subspaces that form a submodule.
fn quotient_by(m: &GradedA1Module, spans: &[EchelonBasis]) -> GradedA1Module {
    let (lo, hi) = (m.lo(), m.hi());
    let kept: Vec<Vec<usize>> = (lo..=hi)
        .map(|d| {
            let pivots: Vec<usize> = spans[(d - lo) as usize].pivots().collect();
            (0..m.dim(d)).filter(|i| !pivots.contains(i)).collect()
        })
        .collect();
    let mut dims = Vec::new();
    let mut labels = Vec::new();
    let mut sq1 = Vec::new();
    let mut sq2 = Vec::new();
    for d in lo..=hi {
        let k = &kept[(d - lo) as usize];
        dims.push(k.len());
        labels.push(k.iter().map(|&i| m.labels(d)[i].clone()).collect());
        for (s, maps) in [(1u32, &mut sq1), (2u32, &mut sq2)] {
            let t = d + s as i32;
            if t > hi {
                maps.push(BitMatrix::zeros(0, k.len()));
                continue;
            }
            let tk = &kept[(t - lo) as usize];
            let mut mat = BitMatrix::zeros(tk.len(), k.len());
            for (c, &i) in k.iter().enumerate() {
                let image = spans[(t - lo) as usize].reduce(&m.apply_sq(s, d, &BitVec::unit(m.dim(d), i)).expect("complete"));
                for (r, &j) in tk.iter().enumerate() {
                    if image.get(j) {
                        mat.set(r, c, true);
                    }
                }
            }
            maps.push(mat);
        }
    }
    GradedA1Module::from_parts(&m.name, lo, true, dims, sq1, sq2, labels).expect("quotient shapes are consistent")
}

/// The submodule generated by the given homogeneous elements, with basis the
/// reduced echelon rows of its span in each degree.
#[must_use]
pub fn submodule(m: &GradedA1Module, gens: &[(i32, BitVec)]) -> GradedA1Module {
    let (lo, hi) = (m.lo(), m.hi());
    let mut spans: Vec<EchelonBasis> = (lo..=hi).map(|d| EchelonBasis::new(m.dim(d))).collect();
    for (d, v) in gens {
        for (w, &deg) in BASIS_DEGREES.iter().enumerate() {
            let e = d + deg as i32;
            if e > hi {
                continue;
            }
            if let Ok(image) = m.apply_basis(w, *d, v) {
                spans[(e - lo) as usize].insert(&image);
            }
        }
    }
    let bases: Vec<Vec<(usize, BitVec)>> = spans
        .iter()
        .map(|s| {
            let mut rows = s.rows().to_vec();
            rows.sort_by_key(|r| r.0);
            rows
        })
        .collect();
    let mut dims = Vec::new();
    let mut labels = Vec::new();
    let mut sq1 = Vec::new();
    let mut sq2 = Vec::new();
    for d in lo..=hi {
        let b = &bases[(d - lo) as usize];
        dims.push(b.len());
        labels.push(b.iter().map(|(_, v)| v.iter_ones().map(|i| m.labels(d)[i].clone()).collect::<Vec<_>>().join("+")).collect());
        for (s, maps) in [(1u32, &mut sq1), (2u32, &mut sq2)] {
            let t = d + s as i32;
            if t > hi || !m.known(t) {
                maps.push(BitMatrix::zeros(0, b.len()));
                continue;
            }
            let tb = &bases[(t - lo) as usize];
            let mut mat = BitMatrix::zeros(tb.len(), b.len());
            for (c, (_, v)) in b.iter().enumerate() {
                let image = m.apply_sq(s, d, v).expect("known degree");
                for (r, (p, _)) in tb.iter().enumerate() {
                    if image.get(*p) {
                        mat.set(r, c, true);
                    }
                }
            }
            maps.push(mat);
        }
    }
    GradedA1Module::from_parts(&m.name, lo, m.is_complete(), dims, sq1, sq2, labels).expect("submodule shapes are consistent")
}

fn op(word: &[u8]) -> A1Element {
    A1Element::from_word(word)
}

/// M0 = A(1) ⊗_{A(0)} F2 = A(1)/A(1)·Sq¹.
#[must_use]
pub fn m0() -> GradedA1Module {
    presented("M0", &[Generator { label: "g", degree: 0 }], &[vec![(0, A1Element::sq1())]])
}

/// The nontrivial extension of Σ⁴M0 by M0.
#[must_use]
pub fn m1() -> GradedA1Module {
    presented(
        "M1",
        &[Generator { label: "g", degree: 0 }, Generator { label: "h", degree: 4 }],
        &[vec![(0, A1Element::sq1())], vec![(1, A1Element::sq1()), (0, op(&[2, 1, 2]))]],
    )
}

/// The Joker A(1)/A(1)·Sq³ with Sq³ = Sq¹Sq².
#[must_use]
pub fn joker() -> GradedA1Module {
    presented("J", &[Generator { label: "g", degree: 0 }], &[vec![(0, op(&[1, 2]))]])
}

/// The question mark A(1)/(Sq¹, Sq²Sq³).
#[must_use]
pub fn question() -> GradedA1Module {
    presented("Q", &[Generator { label: "g", degree: 0 }], &[vec![(0, A1Element::sq1())], vec![(0, op(&[2, 1, 2]))]])
}

/// The augmentation ideal of Σ⁻¹A(1), generated by Sq¹ and Sq².
#[must_use]
pub fn r2() -> GradedA1Module {
    let a = free_a1().suspend(-1);
    submodule(&a, &[(0, BitVec::unit(1, 0)), (1, BitVec::unit(1, 0))]).named("R2")
}

/// R3, known through `hi`: the remainder of J ⊗ H*((BO₁)^{σ−1}) after
/// splitting off every free summand.
#[must_use]
pub fn r3(hi: i32) -> GradedA1Module {
    let p = space::named_structure("PinMinus", hi + 6).expect("PinMinus is cataloged");
    let t = joker().tensor(&p);
    split_free(&t).remainder.truncate_known(hi).named("R3")
}

/// Looks up a catalog module; `hi` bounds the known range of infinite ones.
///
/// # Errors
/// Unknown names are rejected.
pub fn catalog(name: &str, hi: i32) -> Result<GradedA1Module, ModuleError> {
    Ok(match name {
        "F2" => f2(),
        "A1free" => free_a1(),
        "M0" => m0(),
        "M1" => m1(),
        "J" => joker(),
        "Q" => question(),
        "R2" => r2(),
        "R3" => r3(hi),
        other => return Err(ModuleError::UnknownCatalogName(other.to_string())),
    })
}
