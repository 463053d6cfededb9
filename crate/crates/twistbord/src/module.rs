//! Finite graded modules over A(1).
//!
//! A module stores, for each degree in `lo..=hi`, its dimension and the
//! matrices of Sq¹ and Sq² leaving that degree. Degrees above `hi` are
//! unknown unless the module is flagged complete, in which case they are zero.
//! Maps whose target lies above `hi` in an incomplete module are stored as
//! matrices with zero rows and must not be used.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::a1::{self, A1Element, BASIS_DEGREES, BASIS_WORDS};
use crate::gf2::{BitMatrix, BitVec, EchelonBasis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("{relation} fails at degree {degree}")]
    Relation { degree: i32, relation: &'static str },
    #[error("degree {degree} is above the known range (known through {hi})")]
    Unknown { degree: i32, hi: i32 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("Margolis differential Q{0} does not square to zero")]
    NotADifferential(u32),
    #[error("unknown catalog module {0:?}")]
    UnknownCatalogName(String),
}

/// Name of the first violated relation, as reported by [`GradedA1Module::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub degree: i32,
    pub relation: &'static str,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at degree {}", self.relation, self.degree)
    }
}

pub const SQ1_SQUARED: &str = "Sq1∘Sq1 ≠ 0";
pub const SQ2_SQUARED: &str = "Sq2∘Sq2 ≠ Sq1∘Sq2∘Sq1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedA1Module {
    pub name: String,
    lo: i32,
    hi: i32,
    complete: bool,
    dims: Vec<usize>,
    sq1: Vec<BitMatrix>,
    sq2: Vec<BitMatrix>,
    labels: Vec<Vec<String>>,
}

impl GradedA1Module {
    /// The zero module, complete.
    #[must_use]
    pub fn zero(name: &str) -> Self {
        Self { name: name.to_string(), lo: 0, hi: -1, complete: true, dims: vec![], sq1: vec![], sq2: vec![], labels: vec![] }
    }

    /// Assembles a module from per-degree data. `sq1[i]` and `sq2[i]` leave
    /// degree `lo + i`; maps into unknown degrees may be given with zero rows.
    ///
    /// # Errors
    /// Fails when a matrix shape disagrees with the dimensions.
    pub fn from_parts(
        name: &str,
        lo: i32,
        complete: bool,
        dims: Vec<usize>,
        sq1: Vec<BitMatrix>,
        sq2: Vec<BitMatrix>,
        labels: Vec<Vec<String>>,
    ) -> Result<Self, ModuleError> {
        let n = dims.len();
        if sq1.len() != n || sq2.len() != n || labels.len() != n {
            return Err(ModuleError::Shape("per-degree vectors have different lengths".into()));
        }
        let hi = lo + n as i32 - 1;
        let mut m = Self { name: name.to_string(), lo, hi, complete, dims, sq1, sq2, labels };
        for i in 0..n {
            if m.labels[i].len() != m.dims[i] {
                return Err(ModuleError::Shape(format!("labels at degree {}", lo + i as i32)));
            }
            for (k, maps) in [(1usize, &mut m.sq1), (2usize, &mut m.sq2)] {
                let target = i + k;
                let rows = if target < n { m.dims[target] } else { 0 };
                let mat = &mut maps[i];
                if mat.cols() != m.dims[i] {
                    return Err(ModuleError::Shape(format!("Sq{k} at degree {} has {} columns", lo + i as i32, mat.cols())));
                }
                if target >= n && mat.rows() != 0 {
                    if mat.is_zero() || complete {
                        if !mat.is_zero() {
                            return Err(ModuleError::Shape(format!("Sq{k} leaves a complete module at degree {}", lo + i as i32)));
                        }
                        *mat = BitMatrix::zeros(0, m.dims[i]);
                    } else {
                        *mat = BitMatrix::zeros(0, m.dims[i]);
                    }
                } else if target < n && mat.rows() != rows {
                    return Err(ModuleError::Shape(format!("Sq{k} at degree {} has {} rows", lo + i as i32, mat.rows())));
                }
            }
        }
        m.trim();
        Ok(m)
    }

    /// Drops zero-dimensional degrees at the bottom of the range.
    fn trim(&mut self) {
        let lead = self.dims.iter().take_while(|&&d| d == 0).count();
        if lead == 0 {
            return;
        }
        if lead == self.dims.len() && !self.complete {
            return;
        }
        let lead = lead.min(self.dims.len());
        self.dims.drain(..lead);
        self.sq1.drain(..lead);
        self.sq2.drain(..lead);
        self.labels.drain(..lead);
        self.lo += lead as i32;
        if self.dims.is_empty() {
            self.lo = 0;
            self.hi = -1;
        }
    }

    #[must_use]
    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest degree with known contents.
    #[must_use]
    pub fn hi(&self) -> i32 {
        self.hi
    }

    #[must_use]
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Whether degree `d` has known contents.
    #[must_use]
    pub fn known(&self, d: i32) -> bool {
        self.complete || d <= self.hi
    }

    #[must_use]
    pub fn is_zero_module(&self) -> bool {
        self.complete && self.dims.iter().all(|&d| d == 0)
    }

    fn index(&self, d: i32) -> Option<usize> {
        (d >= self.lo && d <= self.hi).then(|| (d - self.lo) as usize)
    }

    /// Dimension in degree `d` (zero outside the stored range).
    #[must_use]
    pub fn dim(&self, d: i32) -> usize {
        self.index(d).map_or(0, |i| self.dims[i])
    }

    #[must_use]
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Graded dimensions for degrees `from..=to`.
    #[must_use]
    pub fn graded_dims(&self, from: i32, to: i32) -> Vec<usize> {
        (from..=to).map(|d| self.dim(d)).collect()
    }

    #[must_use]
    pub fn labels(&self, d: i32) -> &[String] {
        self.index(d).map_or(&[], |i| &self.labels[i])
    }

    /// Matrix of Sq^k (k = 1 or 2) from degree `d`, shape `dim(d+k) × dim(d)`.
    ///
    /// # Errors
    /// Fails when the target degree is unknown.
    pub fn sq(&self, k: u32, d: i32) -> Result<BitMatrix, ModuleError> {
        assert!(k == 1 || k == 2, "only Sq1 and Sq2 are stored");
        let target = d + k as i32;
        if !self.known(target) {
            return Err(ModuleError::Unknown { degree: target, hi: self.hi });
        }
        match self.index(d) {
            Some(i) if self.index(target).is_some() => Ok(if k == 1 { self.sq1[i].clone() } else { self.sq2[i].clone() }),
            _ => Ok(BitMatrix::zeros(self.dim(target), self.dim(d))),
        }
    }

    fn sq_ref(&self, k: u32, d: i32) -> Option<&BitMatrix> {
        let i = self.index(d)?;
        self.index(d + k as i32)?;
        Some(if k == 1 { &self.sq1[i] } else { &self.sq2[i] })
    }

    /// Applies Sq^k to a vector in degree `d`.
    ///
    /// # Errors
    /// Fails when the target degree is unknown.
    pub fn apply_sq(&self, k: u32, d: i32, v: &BitVec) -> Result<BitVec, ModuleError> {
        let target = d + k as i32;
        if !self.known(target) {
            return Err(ModuleError::Unknown { degree: target, hi: self.hi });
        }
        Ok(match self.sq_ref(k, d) {
            Some(m) => m.mul_vec(v),
            None => BitVec::zeros(self.dim(target)),
        })
    }

    /// Applies a basis word of A(1) to a vector in degree `d`.
    ///
    /// # Errors
    /// Fails when some intermediate degree is unknown.
    pub fn apply_basis(&self, word: usize, d: i32, v: &BitVec) -> Result<BitVec, ModuleError> {
        let mut v = v.clone();
        let mut deg = d;
        for &s in BASIS_WORDS[word].iter().rev() {
            v = self.apply_sq(u32::from(s), deg, &v)?;
            deg += i32::from(s);
        }
        Ok(v)
    }

    /// Applies a homogeneous element of A(1).
    ///
    /// # Errors
    /// Fails on inhomogeneous elements or unknown target degrees.
    pub fn apply(&self, a: A1Element, d: i32, v: &BitVec) -> Result<BitVec, ModuleError> {
        let deg = a.degree().map_err(|_| ModuleError::Shape("inhomogeneous operator".into()))?;
        let mut out = BitVec::zeros(self.dim(d + deg as i32));
        for w in a.terms() {
            out.xor_assign(&self.apply_basis(w, d, v)?);
        }
        Ok(out)
    }

    /// Matrix of a basis word from degree `d`.
    ///
    /// # Errors
    /// Fails when the target degree is unknown.
    pub fn basis_matrix(&self, word: usize, d: i32) -> Result<BitMatrix, ModuleError> {
        let n = self.dim(d);
        let cols: Vec<BitVec> = (0..n).map(|i| self.apply_basis(word, d, &BitVec::unit(n, i))).collect::<Result<_, _>>()?;
        Ok(BitMatrix::from_columns(self.dim(d + BASIS_DEGREES[word] as i32), &cols))
    }

    /// Checks the defining relations of A(1) in every degree where both sides are known.
    ///
    /// # Errors
    /// Reports the first failing degree and relation.
    pub fn validate(&self) -> Result<(), Violation> {
        for d in self.lo..=self.hi {
            if self.known(d + 2) {
                let (Ok(a), Ok(b)) = (self.sq(1, d), self.sq(1, d + 1)) else { continue };
                if !b.mul(&a).is_zero() {
                    return Err(Violation { degree: d, relation: SQ1_SQUARED });
                }
            }
            if self.known(d + 4) {
                let lhs = self.sq(2, d + 2).unwrap().mul(&self.sq(2, d).unwrap());
                let rhs = self.sq(1, d + 3).unwrap().mul(&self.sq(2, d + 1).unwrap()).mul(&self.sq(1, d).unwrap());
                if lhs != rhs {
                    return Err(Violation { degree: d, relation: SQ2_SQUARED });
                }
            }
        }
        Ok(())
    }

    /// Σᵏ M.
    #[must_use]
    pub fn suspend(&self, k: i32) -> Self {
        let mut m = self.clone();
        m.lo += k;
        m.hi += k;
        if self.dims.is_empty() {
            m.lo = 0;
            m.hi = -1;
        }
        m
    }

    /// Renames the module.
    #[must_use]
    pub fn named(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Replaces the labels of every basis element with `prefix` applied to the old label.
    #[must_use]
    pub fn relabel(mut self, f: impl Fn(&str) -> String) -> Self {
        for row in &mut self.labels {
            for l in row.iter_mut() {
                *l = f(l);
            }
        }
        self
    }

    /// Forgets everything above degree `n`; the result is known through `n`.
    #[must_use]
    pub fn truncate_known(&self, n: i32) -> Self {
        if n >= self.hi {
            return self.clone();
        }
        self.restrict(n, false)
    }

    /// The quotient M / M_{>n}, a complete module.
    #[must_use]
    pub fn quotient_above(&self, n: i32) -> Self {
        assert!(self.known(n), "quotient above {n} needs the module known through {n}");
        self.restrict(n, true)
    }

    fn restrict(&self, n: i32, complete: bool) -> Self {
        let top = n.min(self.hi.max(n));
        let lo = self.lo.min(top + 1);
        let mut dims = Vec::new();
        let mut sq1 = Vec::new();
        let mut sq2 = Vec::new();
        let mut labels = Vec::new();
        for d in lo..=top {
            dims.push(self.dim(d));
            labels.push(self.labels(d).to_vec());
            for (k, maps) in [(1u32, &mut sq1), (2u32, &mut sq2)] {
                let target = d + k as i32;
                if target <= top {
                    maps.push(self.sq(k, d).unwrap_or_else(|_| BitMatrix::zeros(self.dim(target), self.dim(d))));
                } else {
                    maps.push(BitMatrix::zeros(0, self.dim(d)));
                }
            }
        }
        let mut m = Self { name: self.name.clone(), lo, hi: top, complete, dims, sq1, sq2, labels };
        if m.dims.is_empty() {
            m.lo = 0;
            m.hi = -1;
        }
        m.trim();
        m
    }

    /// M ⊕ N, with the basis of M first in every degree.
    #[must_use]
    pub fn direct_sum(&self, other: &Self) -> Self {
        if self.dims.is_empty() && self.complete {
            return other.clone().named(&format!("{} ⊕ {}", self.name, other.name));
        }
        if other.dims.is_empty() && other.complete {
            return self.clone().named(&format!("{} ⊕ {}", self.name, other.name));
        }
        let lo = self.lo.min(other.lo);
        let complete = self.complete && other.complete;
        let hi = match (self.complete, other.complete) {
            (true, true) => self.hi.max(other.hi),
            (true, false) => other.hi,
            (false, true) => self.hi,
            (false, false) => self.hi.min(other.hi),
        };
        let mut dims = Vec::new();
        let mut sq1 = Vec::new();
        let mut sq2 = Vec::new();
        let mut labels = Vec::new();
        for d in lo..=hi {
            dims.push(self.dim(d) + other.dim(d));
            let mut l = self.labels(d).to_vec();
            l.extend_from_slice(other.labels(d));
            labels.push(l);
            for (k, maps) in [(1u32, &mut sq1), (2u32, &mut sq2)] {
                let t = d + k as i32;
                if t > hi {
                    maps.push(BitMatrix::zeros(0, self.dim(d) + other.dim(d)));
                    continue;
                }
                let a = self.sq(k, d).unwrap_or_else(|_| BitMatrix::zeros(self.dim(t), self.dim(d)));
                let b = other.sq(k, d).unwrap_or_else(|_| BitMatrix::zeros(other.dim(t), other.dim(d)));
                maps.push(block_diag(&a, &b));
            }
        }
        let mut m = Self { name: format!("{} ⊕ {}", self.name, other.name), lo, hi, complete, dims, sq1, sq2, labels };
        m.trim();
        m
    }

    /// Graded tensor product with the Cartan-formula action.
    #[must_use]
    pub fn tensor(&self, other: &Self) -> Self {
        let name = format!("{} ⊗ {}", self.name, other.name);
        if self.is_zero_module() || other.is_zero_module() {
            return Self::zero(&name);
        }
        let complete = self.complete && other.complete;
        let hi = if complete {
            self.hi + other.hi
        } else {
            let mut h = i32::MAX;
            if !self.complete {
                h = h.min(self.hi + other.lo);
            }
            if !other.complete {
                h = h.min(other.hi + self.lo);
            }
            h
        };
        let lo = self.lo + other.lo;
        // Basis of degree d: pairs (p, i, j) with i in M_p, j in N_{d-p}, ordered by p, i, j.
        let layout = |d: i32| -> Vec<(i32, usize)> {
            let mut blocks = Vec::new();
            let mut off = 0;
            for p in self.lo..=self.hi.min(d - other.lo) {
                let q = d - p;
                let (a, b) = (self.dim(p), other.dim(q));
                if a * b > 0 {
                    blocks.push((p, off));
                    off += a * b;
                }
            }
            blocks
        };
        let dim_of = |d: i32| -> usize { (self.lo..=self.hi.min(d - other.lo)).map(|p| self.dim(p) * other.dim(d - p)).sum() };
        let mut dims = Vec::new();
        let mut labels = Vec::new();
        let mut sq1 = Vec::new();
        let mut sq2 = Vec::new();
        for d in lo..=hi {
            dims.push(dim_of(d));
            let mut l = Vec::new();
            for (p, _) in layout(d) {
                for a in self.labels(p) {
                    for b in other.labels(d - p) {
                        l.push(tensor_label(a, b));
                    }
                }
            }
            labels.push(l);
        }
        let offset_in = |d: i32, p: i32| -> Option<usize> { layout(d).into_iter().find(|(q, _)| *q == p).map(|(_, o)| o) };
        for d in lo..=hi {
            let src = dim_of(d);
            for k in [1u32, 2] {
                let t = d + k as i32;
                if t > hi {
                    if k == 1 { sq1.push(BitMatrix::zeros(0, src)) } else { sq2.push(BitMatrix::zeros(0, src)) }
                    continue;
                }
                let mut mat = BitMatrix::zeros(dim_of(t), src);
                for (p, off) in layout(d) {
                    let q = d - p;
                    let (na, nb) = (self.dim(p), other.dim(q));
                    // Terms Sq^i x ⊗ Sq^{k-i} y with the Cartan coefficients for k ≤ 2.
                    for i in 0..=k {
                        let j = k - i;
                        let pa = p + i as i32;
                        let qb = q + j as i32;
                        if self.dim(pa) == 0 || other.dim(qb) == 0 {
                            continue;
                        }
                        let Some(toff) = offset_in(t, pa) else { continue };
                        let ma = if i == 0 { BitMatrix::identity(na) } else { self.sq(i, p).expect("tensor factor known") };
                        let mb = if j == 0 { BitMatrix::identity(nb) } else { other.sq(j, q).expect("tensor factor known") };
                        let tb = other.dim(qb);
                        for x in 0..na {
                            for y in 0..nb {
                                let col = off + x * nb + y;
                                for xr in ma.column(x).iter_ones() {
                                    for yr in mb.column(y).iter_ones() {
                                        let row = toff + xr * tb + yr;
                                        let cur = mat.get(row, col);
                                        mat.set(row, col, !cur);
                                    }
                                }
                            }
                        }
                    }
                }
                if k == 1 { sq1.push(mat) } else { sq2.push(mat) }
            }
        }
        let mut m = Self { name, lo, hi, complete, dims, sq1, sq2, labels };
        m.trim();
        m
    }

    /// Margolis homology for Q₀ (`i = 0`) or Q₁ (`i = 1`).
    ///
    /// # Errors
    /// Fails when Qᵢ does not square to zero.
    pub fn margolis(&self, i: u32) -> Result<MargolisHomology, ModuleError> {
        let step = if i == 0 { 1 } else { 3 };
        let q = |d: i32| -> Option<BitMatrix> {
            if !self.known(d + step) {
                return None;
            }
            Some(if i == 0 {
                self.sq(1, d).unwrap()
            } else {
                self.sq(1, d + 2).unwrap().mul(&self.sq(2, d).unwrap()).add(&self.sq(2, d + 1).unwrap().mul(&self.sq(1, d).unwrap()))
            })
        };
        let mut degrees = Vec::new();
        for d in self.lo..=self.hi {
            let incoming = q(d - step);
            let outgoing = q(d);
            if let (Some(a), Some(b)) = (&incoming, &outgoing) {
                if !b.mul(a).is_zero() {
                    return Err(ModuleError::NotADifferential(i));
                }
            }
            let rank_in = incoming.as_ref().map_or(0, BitMatrix::rank);
            let (kernel, reliable) = match &outgoing {
                Some(b) => (self.dim(d) - b.rank(), true),
                None => (self.dim(d), false),
            };
            degrees.push(MargolisDegree { degree: d, dim: kernel - rank_in, reliable });
        }
        Ok(MargolisHomology { primitive: i, degrees })
    }

    /// Indecomposables: a basis of a complement to Sq¹M + Sq²M in degree `d`,
    /// together with the reduction data for projecting onto it.
    fn decomposables(&self, d: i32) -> EchelonBasis {
        let mut e = EchelonBasis::new(self.dim(d));
        for k in [1u32, 2] {
            if let Some(m) = self.sq_ref(k, d - k as i32) {
                for c in 0..m.cols() {
                    e.insert(&m.column(c));
                }
            }
        }
        e
    }

    /// Dimension of the indecomposable quotient M/A(1)⁺M in degree `d`.
    #[must_use]
    pub fn generator_count(&self, d: i32) -> usize {
        self.dim(d) - self.decomposables(d).dim()
    }

    /// Human-readable listing in the `.a1mod` format.
    #[must_use]
    pub fn to_a1mod(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "MODULE {}", self.name.replace(' ', "_"));
        for d in self.lo..=self.hi {
            if self.dim(d) > 0 {
                let _ = writeln!(out, "DEG {d}: {}", self.labels(d).iter().map(|l| sanitize_label(l)).collect::<Vec<_>>().join(" "));
            }
        }
        for d in self.lo..=self.hi {
            for k in [1u32, 2] {
                let Some(m) = self.sq_ref(k, d) else { continue };
                for c in 0..m.cols() {
                    let col = m.column(c);
                    if col.is_zero() {
                        continue;
                    }
                    let targets: Vec<String> = col.iter_ones().map(|r| sanitize_label(&self.labels(d + k as i32)[r])).collect();
                    let _ = writeln!(out, "SQ{k} {} -> {}", sanitize_label(&self.labels(d)[c]), targets.join(" + "));
                }
            }
        }
        if !self.complete {
            let _ = writeln!(out, "TRUNCATE {}", self.hi);
        }
        out
    }
}

fn sanitize_label(l: &str) -> String {
    l.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect()
}

fn tensor_label(a: &str, b: &str) -> String {
    match (a, b) {
        ("1", _) => b.to_string(),
        (_, "1") => a.to_string(),
        _ => format!("{a}⊗{b}"),
    }
}

/// Block-diagonal matrix diag(a, b).
#[must_use]
pub fn block_diag(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let mut m = BitMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    for r in 0..a.rows() {
        for c in a.row(r).iter_ones() {
            m.set(r, c, true);
        }
    }
    for r in 0..b.rows() {
        for c in b.row(r).iter_ones() {
            m.set(a.rows() + r, a.cols() + c, true);
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MargolisDegree {
    pub degree: i32,
    pub dim: usize,
    pub reliable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MargolisHomology {
    pub primitive: u32,
    pub degrees: Vec<MargolisDegree>,
}

impl MargolisHomology {
    /// Nonzero reliable degrees with their dimensions.
    #[must_use]
    pub fn support(&self) -> Vec<(i32, usize)> {
        self.degrees.iter().filter(|d| d.reliable && d.dim > 0).map(|d| (d.degree, d.dim)).collect()
    }

    #[must_use]
    pub fn dim(&self, degree: i32) -> usize {
        self.degrees.iter().find(|d| d.degree == degree).map_or(0, |d| d.dim)
    }

    #[must_use]
    pub fn reliable_through(&self) -> Option<i32> {
        self.degrees.iter().take_while(|d| d.reliable).last().map(|d| d.degree)
    }
}

/// Builder for modules given by named basis elements and actions on them.
#[derive(Default, Clone, Debug)]
pub struct ModuleBuilder {
    name: String,
    basis: BTreeMap<i32, Vec<String>>,
    actions: Vec<(u32, String, Vec<String>)>,
    truncate: Option<i32>,
}

impl ModuleBuilder {
    #[must_use]
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), ..Self::default() }
    }

    #[must_use]
    pub fn degree(mut self, d: i32, labels: &[&str]) -> Self {
        self.basis.entry(d).or_default().extend(labels.iter().map(|s| s.to_string()));
        self
    }

    #[must_use]
    pub fn sq(mut self, k: u32, from: &str, to: &[&str]) -> Self {
        self.actions.push((k, from.to_string(), to.iter().map(|s| s.to_string()).collect()));
        self
    }

    #[must_use]
    pub fn truncate(mut self, hi: i32) -> Self {
        self.truncate = Some(hi);
        self
    }

    /// Builds the module without checking the A(1) relations.
    ///
    /// # Errors
    /// Fails on unknown labels or actions of the wrong degree.
    pub fn build_unchecked(&self) -> Result<GradedA1Module, String> {
        let mut where_is: BTreeMap<&str, (i32, usize)> = BTreeMap::new();
        for (&d, labels) in &self.basis {
            for (i, l) in labels.iter().enumerate() {
                if where_is.insert(l.as_str(), (d, i)).is_some() {
                    return Err(format!("duplicate label {l}"));
                }
            }
        }
        let (lo, top) = match (self.basis.keys().next(), self.basis.keys().last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (0, -1),
        };
        let hi = self.truncate.unwrap_or(top);
        let lo = lo.min(hi + 1);
        let dim = |d: i32| self.basis.get(&d).map_or(0, Vec::len);
        let mut sq1: Vec<BitMatrix> = (lo..=hi).map(|d| BitMatrix::zeros(if d < hi { dim(d + 1) } else { 0 }, dim(d))).collect();
        let mut sq2: Vec<BitMatrix> = (lo..=hi).map(|d| BitMatrix::zeros(if d + 2 <= hi { dim(d + 2) } else { 0 }, dim(d))).collect();
        for (k, from, to) in &self.actions {
            let &(d, c) = where_is.get(from.as_str()).ok_or_else(|| format!("unknown label {from}"))?;
            for t in to {
                let &(e, r) = where_is.get(t.as_str()).ok_or_else(|| format!("unknown label {t}"))?;
                if e != d + *k as i32 {
                    return Err(format!("Sq{k} {from} -> {t} changes degree by {}", e - d));
                }
                if e > hi {
                    continue;
                }
                let mat = if *k == 1 { &mut sq1[(d - lo) as usize] } else { &mut sq2[(d - lo) as usize] };
                let cur = mat.get(r, c);
                mat.set(r, c, !cur);
            }
        }
        let dims: Vec<usize> = (lo..=hi).map(dim).collect();
        let labels: Vec<Vec<String>> = (lo..=hi).map(|d| self.basis.get(&d).cloned().unwrap_or_default()).collect();
        GradedA1Module::from_parts(&self.name, lo, self.truncate.is_none(), dims, sq1, sq2, labels).map_err(|e| e.to_string())
    }

    /// Builds and validates.
    ///
    /// # Errors
    /// Fails on malformed data or violated relations.
    pub fn build(&self) -> Result<GradedA1Module, String> {
        let m = self.build_unchecked()?;
        m.validate().map_err(|v| v.to_string())?;
        Ok(m)
    }
}

/// A diagnostic from the `.a1mod` parser.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// Parses the `.a1mod` text format.
///
/// ```text
/// MODULE <name>
/// DEG <d>: <label> <label> ...
/// SQ1 <label> -> <label> [+ <label>]*
/// SQ2 <label> -> <label> [+ <label>]*
/// TRUNCATE <hi>
/// ```
///
/// Without a `TRUNCATE` line the module is finite and complete.
///
/// # Errors
/// Reports the offending line, including the first action line whose source
/// degree violates an A(1) relation.
pub fn parse_a1mod(text: &str) -> Result<GradedA1Module, ParseError> {
    let mut b = ModuleBuilder::new("unnamed");
    let mut action_lines: Vec<(usize, u32, String)> = Vec::new();
    let mut label_degree: BTreeMap<String, i32> = BTreeMap::new();
    let err = |line: usize, message: String| ParseError { line, message };
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "MODULE" => {
                if rest.is_empty() {
                    return Err(err(line_no, "MODULE needs a name".into()));
                }
                b.name = rest.to_string();
            }
            "DEG" => {
                let (d, labels) = rest.split_once(':').ok_or_else(|| err(line_no, "expected DEG <d>: <labels>".into()))?;
                let d: i32 = d.trim().parse().map_err(|_| err(line_no, format!("bad degree {:?}", d.trim())))?;
                let labels: Vec<&str> = labels.split_whitespace().collect();
                for l in &labels {
                    if label_degree.insert((*l).to_string(), d).is_some() {
                        return Err(err(line_no, format!("duplicate label {l}")));
                    }
                }
                b = b.degree(d, &labels);
            }
            "SQ1" | "SQ2" => {
                let k = if keyword == "SQ1" { 1 } else { 2 };
                let (from, to) = rest.split_once("->").ok_or_else(|| err(line_no, "expected <label> -> <label> [+ <label>]*".into()))?;
                let from = from.trim();
                let targets: Vec<&str> = to.split('+').map(str::trim).filter(|s| !s.is_empty()).collect();
                if targets.is_empty() {
                    return Err(err(line_no, "action with no target".into()));
                }
                let Some(&d) = label_degree.get(from) else {
                    return Err(err(line_no, format!("unknown label {from}")));
                };
                for t in &targets {
                    match label_degree.get(*t) {
                        None => return Err(err(line_no, format!("unknown label {t}"))),
                        Some(&e) if e != d + k as i32 => {
                            return Err(err(line_no, format!("Sq{k} {from} -> {t} goes from degree {d} to {e}")));
                        }
                        _ => {}
                    }
                }
                action_lines.push((line_no, k, from.to_string()));
                b = b.sq(k, from, &targets);
            }
            "TRUNCATE" => {
                let hi: i32 = rest.parse().map_err(|_| err(line_no, format!("bad truncation degree {rest:?}")))?;
                b = b.truncate(hi);
            }
            other => return Err(err(line_no, format!("unknown keyword {other}"))),
        }
    }
    let m = b.build_unchecked().map_err(|e| err(0, e))?;
    if let Err(v) = m.validate() {
        let line = action_lines
            .iter()
            .find(|(_, _, from)| label_degree.get(from) == Some(&v.degree))
            .map_or(text.lines().count(), |(l, _, _)| *l);
        return Err(err(line, v.to_string()));
    }
    Ok(m)
}

/// The free module A(1) on one generator in degree 0.
#[must_use]
pub fn free_a1() -> GradedA1Module {
    let mut b = ModuleBuilder::new("A(1)");
    for (i, &d) in BASIS_DEGREES.iter().enumerate() {
        b = b.degree(d as i32, &[&a1::basis_name(i)]);
    }
    let names: Vec<String> = (0..8).map(a1::basis_name).collect();
    for (i, name) in names.iter().enumerate() {
        for (k, op) in [(1u32, a1::SQ1), (2u32, a1::SQ2)] {
            if let Some(j) = a1::basis_product(op, i) {
                b = b.sq(k, name, &[&names[j]]);
            }
        }
    }
    b.build().expect("A(1) is a module over itself")
}

/// F2 concentrated in degree 0.
#[must_use]
pub fn f2() -> GradedA1Module {
    ModuleBuilder::new("F2").degree(0, &["1"]).build().expect("F2 is a module")
}
