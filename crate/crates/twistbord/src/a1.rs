//! The subalgebra A(1) of the mod 2 Steenrod algebra.
//!
//! A(1) is generated by Sq¹ and Sq² subject to Sq¹Sq¹ = 0 and
//! Sq²Sq² = Sq¹Sq²Sq¹. It has dimension 8, with normal-form basis the
//! alternating words listed in [`BASIS_WORDS`]; the two alternating words of
//! length four coincide and are written Sq¹Sq²Sq¹Sq².

use std::fmt;
use std::ops::{Add, Mul};
use std::sync::OnceLock;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum A1Error {
    #[error("element is not homogeneous")]
    Inhomogeneous,
    #[error("Milnor primitive Q{0} does not lie in A(1)")]
    NoSuchPrimitive(u32),
}

/// Normal-form words, written as sequences of 1 and 2 for Sq¹ and Sq².
pub const BASIS_WORDS: [&[u8]; 8] = [&[], &[1], &[2], &[1, 2], &[2, 1], &[1, 2, 1], &[2, 1, 2], &[1, 2, 1, 2]];

/// Degrees of the basis words.
pub const BASIS_DEGREES: [u32; 8] = [0, 1, 2, 3, 3, 4, 5, 6];

pub const ONE: usize = 0;
pub const SQ1: usize = 1;
pub const SQ2: usize = 2;
pub const SQ1SQ2: usize = 3;
pub const SQ2SQ1: usize = 4;
pub const SQ1SQ2SQ1: usize = 5;
pub const SQ2SQ1SQ2: usize = 6;
pub const TOP: usize = 7;

/// Reduces a word in Sq¹, Sq² to a basis index, or `None` when it vanishes.
#[must_use]
pub fn reduce_word(word: &[u8]) -> Option<usize> {
    let mut w: Vec<u8> = word.to_vec();
    loop {
        if w.windows(2).any(|p| p == [1, 1]) {
            return None;
        }
        if let Some(i) = w.windows(2).position(|p| p == [2, 2]) {
            w.splice(i..i + 2, [1, 2, 1]);
            continue;
        }
        if let Some(i) = w.windows(4).position(|p| p == [2, 1, 2, 1]) {
            w.splice(i..i + 4, [1, 2, 1, 2]);
            continue;
        }
        return BASIS_WORDS.iter().position(|b| *b == w.as_slice());
    }
}

fn table() -> &'static [[Option<usize>; 8]; 8] {
    static TABLE: OnceLock<[[Option<usize>; 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[None; 8]; 8];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let word: Vec<u8> = BASIS_WORDS[i].iter().chain(BASIS_WORDS[j]).copied().collect();
                *entry = reduce_word(&word);
            }
        }
        t
    })
}

/// Product of two basis elements: a basis index or zero.
#[must_use]
pub fn basis_product(i: usize, j: usize) -> Option<usize> {
    table()[i][j]
}

/// An element of A(1), stored as a coefficient mask over the basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct A1Element(u8);

impl A1Element {
    #[must_use]
    pub const fn zero() -> Self {
        Self(0)
    }

    #[must_use]
    pub const fn one() -> Self {
        Self(1)
    }

    #[must_use]
    pub const fn basis(i: usize) -> Self {
        Self(1 << i)
    }

    #[must_use]
    pub const fn sq1() -> Self {
        Self::basis(SQ1)
    }

    #[must_use]
    pub const fn sq2() -> Self {
        Self::basis(SQ2)
    }

    #[must_use]
    pub const fn from_mask(mask: u8) -> Self {
        Self(mask)
    }

    #[must_use]
    pub const fn mask(self) -> u8 {
        self.0
    }

    /// The element named by an arbitrary word in Sq¹ and Sq².
    #[must_use]
    pub fn from_word(word: &[u8]) -> Self {
        reduce_word(word).map_or(Self::zero(), Self::basis)
    }

    #[must_use]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn terms(self) -> impl Iterator<Item = usize> {
        (0..8).filter(move |i| self.0 >> i & 1 == 1)
    }

    #[must_use]
    pub fn coefficient(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    /// Degree of a nonzero homogeneous element.
    ///
    /// # Errors
    /// Fails on inhomogeneous elements. Zero is reported as degree 0.
    pub fn degree(self) -> Result<u32, A1Error> {
        let mut degs = self.terms().map(|i| BASIS_DEGREES[i]);
        let Some(d) = degs.next() else {
            return Ok(0);
        };
        if degs.all(|e| e == d) {
            Ok(d)
        } else {
            Err(A1Error::Inhomogeneous)
        }
    }

    #[must_use]
    pub fn multiply(self, other: Self) -> Self {
        let mut out = 0u8;
        for i in self.terms() {
            for j in other.terms() {
                if let Some(k) = basis_product(i, j) {
                    out ^= 1 << k;
                }
            }
        }
        Self(out)
    }
}

impl Add for A1Element {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Self) -> Self {
        Self(self.0 ^ rhs.0)
    }
}

impl Mul for A1Element {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.multiply(rhs)
    }
}

impl fmt::Display for A1Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(basis_name).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for A1Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Name of a basis word such as `Sq1Sq2`.
#[must_use]
pub fn basis_name(i: usize) -> String {
    if i == ONE {
        return "1".to_string();
    }
    BASIS_WORDS[i].iter().map(|s| format!("Sq{s}")).collect()
}

/// The Milnor primitives Q₀ = Sq¹ and Q₁ = Sq¹Sq² + Sq²Sq¹.
///
/// # Errors
/// Only `i ∈ {0, 1}` lie in A(1).
pub fn milnor_primitive(i: u32) -> Result<A1Element, A1Error> {
    match i {
        0 => Ok(A1Element::sq1()),
        1 => Ok(A1Element::basis(SQ1SQ2) + A1Element::basis(SQ2SQ1)),
        _ => Err(A1Error::NoSuchPrimitive(i)),
    }
}

/// The nonzero element of top degree 6, equal to Sq²Sq²Sq².
#[must_use]
pub fn top_class() -> A1Element {
    A1Element::basis(TOP)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_relations() {
        assert!((A1Element::sq1() * A1Element::sq1()).is_zero());
        assert_eq!(A1Element::sq2() * A1Element::sq2(), A1Element::basis(SQ1SQ2SQ1));
        assert_eq!(A1Element::from_word(&[2, 1, 2, 1]), top_class());
        assert_eq!(A1Element::from_word(&[2, 2, 2]), top_class());
    }

    #[test]
    fn sq2_times_sq2sq1_vanishes() {
        assert!((A1Element::sq2() * A1Element::basis(SQ2SQ1)).is_zero());
    }

    #[test]
    fn primitives() {
        let q0 = milnor_primitive(0).unwrap();
        let q1 = milnor_primitive(1).unwrap();
        assert_eq!(q0, A1Element::sq1());
        assert_eq!(q1.to_string(), "Sq1Sq2 + Sq2Sq1");
        assert!((q0 * q0).is_zero());
        assert!((q1 * q1).is_zero());
        assert_eq!(q0 * q1, q1 * q0);
        assert_eq!(milnor_primitive(2), Err(A1Error::NoSuchPrimitive(2)));
    }

    #[test]
    fn top_class_is_annihilated_on_both_sides() {
        let top = top_class();
        assert!((A1Element::sq1() * top).is_zero());
        assert!((top * A1Element::sq1()).is_zero());
        assert!((A1Element::sq2() * top).is_zero());
        assert_eq!(top.to_string(), "Sq1Sq2Sq1Sq2");
    }

    #[test]
    fn graded_dimensions() {
        let mut dims = [0; 7];
        for d in BASIS_DEGREES {
            dims[d as usize] += 1;
        }
        assert_eq!(dims, [1, 1, 1, 2, 1, 1, 1]);
    }

    #[test]
    fn degree_of_inhomogeneous_sum_is_an_error() {
        assert_eq!((A1Element::one() + A1Element::sq1()).degree(), Err(A1Error::Inhomogeneous));
        assert_eq!(milnor_primitive(1).unwrap().degree(), Ok(3));
    }
}
