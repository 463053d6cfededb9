//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors and matrices store 64 entries per `u64` word. Matrices are
//! row-major; a matrix of shape `m × n` represents a linear map from an
//! `n`-dimensional space to an `m`-dimensional one, acting on column vectors.
//!
//! Row reduction always picks the leftmost column that still has a pivot
//! candidate, and within it the lowest-index row, so every result is
//! reproducible bit for bit.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len }
    }

    #[must_use]
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    #[must_use]
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    #[must_use]
    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[must_use]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[must_use]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND, i.e. the standard dot product.
    #[must_use]
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones % 2 == 1
    }

    /// Index of the lowest set bit.
    #[must_use]
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + tz)
                }
            })
        })
    }

    /// Concatenation `self ⊕ other`.
    #[must_use]
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            v.set(i, true);
        }
        for i in other.iter_ones() {
            v.set(self.len + i, true);
        }
        v
    }

    /// The sub-vector of entries `start..start + len`.
    #[must_use]
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        let mut v = BitVec::zeros(len);
        for i in self.iter_ones() {
            if i >= start && i < start + len {
                v.set(i - start, true);
            }
        }
        v
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec(")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, ")")
    }
}

/// A dense `rows × cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    #[must_use]
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row vectors, all of length `cols`.
    #[must_use]
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            assert_eq!(v.len(), cols, "row {r} has the wrong length");
            m.data[r * m.stride..(r + 1) * m.stride].copy_from_slice(v.words());
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors, all of length `rows`.
    #[must_use]
    pub fn from_columns(rows: usize, cols: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (c, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), rows, "column {c} has the wrong length");
            for r in v.iter_ones() {
                m.set(r, c, true);
            }
        }
        m
    }

    /// Parses rows written as strings of `0`/`1`.
    #[must_use]
    pub fn from_strs(rows: &[&str]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let vecs: Vec<BitVec> = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix literal");
                BitVec::from_bools(&r.chars().map(|c| c == '1').collect::<Vec<_>>())
            })
            .collect();
        Self::from_rows(cols, &vecs)
    }

    #[must_use]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[must_use]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        (self.data[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        let w = &mut self.data[r * self.stride + c / 64];
        let mask = 1u64 << (c % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[must_use]
    pub fn row(&self, r: usize) -> BitVec {
        let mut v = BitVec::zeros(self.cols);
        v.words.copy_from_slice(&self.data[r * self.stride..(r + 1) * self.stride]);
        v
    }

    #[must_use]
    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    fn xor_rows(&mut self, target: usize, source: usize) {
        let s = self.stride;
        let (a, b) = if target < source {
            let (lo, hi) = self.data.split_at_mut(source * s);
            (&mut lo[target * s..(target + 1) * s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(target * s);
            (&mut hi[..s], &lo[source * s..(source + 1) * s])
        };
        for (x, y) in a.iter_mut().zip(b.iter()) {
            *x ^= y;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.data.swap(a * s + k, b * s + k);
        }
    }

    /// Matrix–vector product `self · v`.
    ///
    /// # Errors
    /// Fails when `v` does not have `cols` entries.
    pub fn try_mul_vec(&self, v: &BitVec) -> Result<BitVec, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let row = &self.data[r * self.stride..(r + 1) * self.stride];
            let parity: u32 = row.iter().zip(v.words()).map(|(a, b)| (a & b).count_ones()).sum();
            if parity % 2 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Matrix–vector product; panics on a shape mismatch.
    #[must_use]
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        self.try_mul_vec(v).expect("matrix-vector shape mismatch")
    }

    /// Matrix product `self · other`.
    #[must_use]
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let src = &other.data[k * other.stride..(k + 1) * other.stride];
                    let dst = &mut out.data[r * out.stride..(r + 1) * out.stride];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        out
    }

    #[must_use]
    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols, "matrix sum shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        out
    }

    #[must_use]
    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Block matrix `[self | other]`.
    #[must_use]
    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let rows: Vec<BitVec> = (0..self.rows).map(|r| self.row(r).concat(&other.row(r))).collect();
        BitMatrix::from_rows(self.cols + other.cols, &rows)
    }

    /// Block matrix with `self` above `other`.
    #[must_use]
    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut m = BitMatrix::zeros(self.rows + other.rows, self.cols);
        m.data[..self.data.len()].copy_from_slice(&self.data);
        m.data[self.data.len()..].copy_from_slice(&other.data);
        m
    }

    /// Reduced row-echelon form and the list of pivot columns.
    #[must_use]
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..m.cols {
            if next == m.rows {
                break;
            }
            let Some(p) = (next..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(next, p);
            for r in 0..m.rows {
                if r != next && m.get(r, c) {
                    m.xor_rows(r, next);
                }
            }
            pivots.push(c);
            next += 1;
        }
        (m, pivots)
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the null space `{v : self · v = 0}`.
    ///
    /// One vector per free column, in increasing order of that column; the
    /// vector has a 1 at its free column and zeros at the other free columns.
    #[must_use]
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::unit(self.cols, f);
            for (row, &p) in pivots.iter().enumerate() {
                if r.get(row, f) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Some `x` with `self · x = b`, if one exists.
    ///
    /// # Errors
    /// Fails when `b` does not have `rows` entries.
    pub fn solve(&self, b: &BitVec) -> Result<Option<BitVec>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.rows, got: b.len() });
        }
        let aug = self.hstack(&BitMatrix::from_columns(self.rows, std::slice::from_ref(b)));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = BitVec::zeros(self.cols);
        for (row, &p) in pivots.iter().enumerate() {
            if r.get(row, self.cols) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    /// Whether the square matrix is invertible.
    #[must_use]
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Inverse of a square invertible matrix.
    #[must_use]
    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(BitMatrix::zeros(0, 0));
        }
        let (r, pivots) = self.hstack(&BitMatrix::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = BitMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if r.get(i, n + j) {
                    inv.set(i, j, true);
                }
            }
        }
        Some(inv)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Incremental echelon basis of a subspace, used to test membership and
/// extend spanning sets one vector at a time.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    rows: Vec<(usize, BitVec)>,
}

impl EchelonBasis {
    #[must_use]
    pub fn new(len: usize) -> Self {
        Self { len, rows: Vec::new() }
    }

    #[must_use]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows; the result is zero iff `v` lies in the span.
    #[must_use]
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (p, row) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        v
    }

    #[must_use]
    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` if it is independent; returns whether the span grew.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len, "echelon basis length mismatch");
        let r = self.reduce(v);
        let Some(p) = r.first_one() else {
            return false;
        };
        for (_, row) in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&r);
            }
        }
        self.rows.push((p, r));
        true
    }

    /// Stored rows with their pivots, in insertion order. Each row is zero at every other pivot.
    #[must_use]
    pub fn rows(&self) -> &[(usize, BitVec)] {
        &self.rows
    }

    /// Pivot positions of the stored rows.
    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|(p, _)| *p)
    }
}
