//! Minimal free resolutions over A(1), Adams charts, vanishing certificates
//! for Adams differentials and the h₀-extension reading of the E∞ page.
//!
//! A class in Ext^{s,t} is dual to a generator of the stage-s free module in
//! internal degree t. Multiplication by h₀ (resp. h₁) is read from the Sq¹
//! (resp. Sq²) coefficients of the boundary of the stage-(s+1) generators.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::a1::{basis_product, A1Element, BASIS_DEGREES, SQ1, SQ2};
use crate::gf2::{BitMatrix, BitVec, EchelonBasis};
use crate::groups::AbelianGroup;
use crate::module::GradedA1Module;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtError {
    #[error("module {name} is known only through degree {known}; resolving through t = {max_t} needs cutoff ≥ {max_t}")]
    Truncated { name: String, known: i32, max_t: i32 },
}

/// One stage of a minimal resolution: a free module with generators in the
/// listed internal degrees, and its boundary into the previous stage.
#[derive(Clone, Debug)]
pub struct ResolutionStage {
    pub s: usize,
    pub generators: Vec<i32>,
    images: Vec<BitVec>,
    lo: i32,
    basis: Vec<Vec<(usize, usize)>>,
    matrices: Vec<BitMatrix>,
}

impl ResolutionStage {
    fn new(s: usize, lo: i32, max_t: i32) -> Self {
        let n = (max_t - lo + 1).max(0) as usize;
        Self { s, generators: Vec::new(), images: Vec::new(), lo, basis: vec![Vec::new(); n], matrices: vec![BitMatrix::zeros(0, 0); n] }
    }

    fn slot(&self, d: i32) -> Option<usize> {
        let i = d - self.lo;
        (i >= 0 && (i as usize) < self.basis.len()).then_some(i as usize)
    }

    /// Dimension of the free module in degree `d`.
    #[must_use]
    pub fn dim(&self, d: i32) -> usize {
        self.slot(d).map_or(0, |i| self.basis[i].len())
    }

    fn index(&self, d: i32, generator: usize, word: usize) -> Option<usize> {
        self.basis[self.slot(d)?].binary_search(&(generator, word)).ok()
    }

    /// Generator indices in internal degree `t`.
    #[must_use]
    pub fn generators_in(&self, t: i32) -> Vec<usize> {
        (0..self.generators.len()).filter(|&g| self.generators[g] == t).collect()
    }

    /// The boundary matrix in internal degree `t` (columns: basis of this stage).
    #[must_use]
    pub fn matrix(&self, t: i32) -> Option<&BitMatrix> {
        self.matrices.get(self.slot(t)?)
    }

    /// The image of generator `g` in the previous stage, at its own degree.
    #[must_use]
    pub fn image(&self, g: usize) -> &BitVec {
        &self.images[g]
    }

    fn add_generator(&mut self, t: i32, image: BitVec) {
        let g = self.generators.len();
        self.generators.push(t);
        self.images.push(image);
        for (w, &deg) in BASIS_DEGREES.iter().enumerate() {
            if let Some(i) = self.slot(t + deg as i32) {
                self.basis[i].push((g, w));
            }
        }
    }

    fn apply(&self, word: usize, d: i32, v: &BitVec) -> BitVec {
        let e = d + BASIS_DEGREES[word] as i32;
        let mut out = BitVec::zeros(self.dim(e));
        let Some(slot) = self.slot(d) else { return out };
        for i in v.iter_ones() {
            let (g, u) = self.basis[slot][i];
            if let Some(p) = basis_product(word, u) {
                if let Some(j) = self.index(e, g, p) {
                    out.flip(j);
                }
            }
        }
        out
    }

    /// The coefficient of generator `k` of the previous stage in the boundary of
    /// generator `j` of this stage.
    #[must_use]
    pub fn boundary_entry(&self, previous: &ResolutionStage, j: usize, k: usize) -> A1Element {
        let t = self.generators[j];
        let mut mask = 0u8;
        for w in 0..8 {
            if let Some(i) = previous.index(t, k, w) {
                if self.images[j].get(i) {
                    mask |= 1 << w;
                }
            }
        }
        A1Element::from_mask(mask)
    }
}

enum Target<'a> {
    Module(&'a GradedA1Module),
    Free(&'a ResolutionStage),
}

impl Target<'_> {
    fn dim(&self, d: i32) -> usize {
        match self {
            Target::Module(m) => m.dim(d),
            Target::Free(f) => f.dim(d),
        }
    }

    fn apply(&self, word: usize, d: i32, v: &BitVec) -> BitVec {
        match self {
            Target::Module(m) => m.apply_basis(word, d, v).expect("resolved module is complete"),
            Target::Free(f) => f.apply(word, d, v),
        }
    }
}

/// A minimal resolution of a module through homological degree `max_s` and
/// internal degree `max_t`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub module: GradedA1Module,
    pub max_s: usize,
    pub max_t: i32,
    pub stages: Vec<ResolutionStage>,
}

/// Resolves `m` (known through `max_t`) by a minimal free resolution.
///
/// # Errors
/// Refuses modules not known through `max_t`.
pub fn minimal_resolution(m: &GradedA1Module, max_s: usize, max_t: i32) -> Result<Resolution, ExtError> {
    if !m.known(max_t) {
        return Err(ExtError::Truncated { name: m.name.clone(), known: m.hi(), max_t });
    }
    let module = m.quotient_above(max_t);
    let lo = module.lo();
    let mut stages: Vec<ResolutionStage> = Vec::new();
    for s in 0..=max_s {
        let kernels: Vec<Vec<BitVec>> = match stages.last() {
            None => (lo..=max_t).map(|t| (0..module.dim(t)).map(|i| BitVec::unit(module.dim(t), i)).collect()).collect(),
            Some(prev) => prev.matrices.par_iter().map(BitMatrix::kernel_basis).collect(),
        };
        let target = match stages.last() {
            None => Target::Module(&module),
            Some(prev) => Target::Free(prev),
        };
        let mut stage = ResolutionStage::new(s, lo, max_t);
        for t in lo..=max_t {
            let slot = (t - lo) as usize;
            let mut span = EchelonBasis::new(target.dim(t));
            let mut columns = Vec::with_capacity(stage.basis[slot].len());
            for &(g, w) in &stage.basis[slot] {
                let image = target.apply(w, stage.generators[g], &stage.images[g]);
                span.insert(&image);
                columns.push(image);
            }
            for k in &kernels[slot] {
                if span.insert(k) {
                    stage.add_generator(t, k.clone());
                    columns.push(k.clone());
                }
            }
            stage.matrices[slot] = BitMatrix::from_columns(target.dim(t), &columns);
        }
        stages.push(stage);
    }
    Ok(Resolution { module, max_s, max_t, stages })
}

impl Resolution {
    /// Checks d∘d = 0 and minimality (no boundary coefficient is a unit).
    #[must_use]
    pub fn verify(&self) -> bool {
        let lo = self.module.lo();
        for s in 0..self.stages.len() {
            for t in lo..=self.max_t {
                let d = self.stages[s].matrix(t).expect("in range");
                let composite = if s == 0 {
                    continue;
                } else {
                    self.stages[s - 1].matrix(t).expect("in range").mul(d)
                };
                if !composite.is_zero() {
                    return false;
                }
            }
            if s > 0 {
                for j in 0..self.stages[s].generators.len() {
                    for k in 0..self.stages[s - 1].generators.len() {
                        if self.stages[s].boundary_entry(&self.stages[s - 1], j, k).coefficient(0) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Whether a column of the chart is computed for every s in the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reliability {
    Complete,
    BoundaryAffected,
}

/// The E₂ page: dimensions per (s, n = t − s) and the h₀, h₁ products.
#[derive(Clone, Debug)]
pub struct ExtChart {
    pub lo: i32,
    pub max_s: usize,
    pub max_t: i32,
    dims: BTreeMap<(usize, i32), usize>,
    h0: BTreeMap<(usize, i32), BitMatrix>,
    h1: BTreeMap<(usize, i32), BitMatrix>,
    free: BTreeMap<i32, Vec<BitVec>>,
}

/// Reads the chart off a resolution.
#[must_use]
pub fn ext_chart(res: &Resolution) -> ExtChart {
    let lo = res.module.lo();
    let mut dims = BTreeMap::new();
    let mut h0 = BTreeMap::new();
    let mut h1 = BTreeMap::new();
    for (s, stage) in res.stages.iter().enumerate() {
        for t in lo..=res.max_t {
            let k = stage.generators_in(t).len();
            if k > 0 {
                dims.insert((s, t - s as i32), k);
            }
        }
    }
    for s in 0..res.stages.len().saturating_sub(1) {
        let (here, next) = (&res.stages[s], &res.stages[s + 1]);
        for t in lo..=res.max_t {
            let cols = here.generators_in(t);
            if cols.is_empty() {
                continue;
            }
            for (word, shift, store) in [(SQ1, 1, &mut h0), (SQ2, 2, &mut h1)] {
                let rows = next.generators_in(t + shift);
                if rows.is_empty() {
                    continue;
                }
                let mut mat = BitMatrix::zeros(rows.len(), cols.len());
                for (r, &g) in rows.iter().enumerate() {
                    for (c, &j) in cols.iter().enumerate() {
                        if let Some(i) = here.index(t + shift, j, word) {
                            if next.images[g].get(i) {
                                mat.set(r, c, true);
                            }
                        }
                    }
                }
                store.insert((s, t - s as i32), mat);
            }
        }
    }
    let mut free = BTreeMap::new();
    if let Some(stage) = res.stages.first() {
        for t in lo..=res.max_t - 6 {
            let gens = stage.generators_in(t);
            if gens.is_empty() {
                continue;
            }
            let tops: Vec<BitVec> = gens
                .iter()
                .map(|&g| res.module.apply_basis(crate::a1::TOP, t, &stage.images[g]).expect("complete"))
                .collect();
            let rows = BitMatrix::from_columns(res.module.dim(t + 6), &tops);
            let mut span = EchelonBasis::new(gens.len());
            for r in 0..rows.rows() {
                span.insert(&rows.row(r));
            }
            if span.dim() > 0 {
                free.insert(t, span.rows().iter().map(|(_, v)| v.clone()).collect());
            }
        }
    }
    ExtChart { lo, max_s: res.max_s, max_t: res.max_t, dims, h0, h1, free }
}

/// Resolves and reads the chart in one step.
///
/// # Errors
/// As [`minimal_resolution`].
pub fn ext_of(m: &GradedA1Module, max_s: usize, max_t: i32) -> Result<ExtChart, ExtError> {
    Ok(ext_chart(&minimal_resolution(m, max_s, max_t)?))
}

/// Behaviour of a column above the window, inferred from its top two rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stable {
    Zero,
    Tower(usize),
    Unknown,
}

impl ExtChart {
    /// Largest n whose column is complete for all s ≤ max_s.
    #[must_use]
    pub fn max_n(&self) -> i32 {
        self.max_t - self.max_s as i32
    }

    #[must_use]
    pub fn reliability(&self, n: i32) -> Reliability {
        if n <= self.max_n() {
            Reliability::Complete
        } else {
            Reliability::BoundaryAffected
        }
    }

    #[must_use]
    pub fn dim(&self, s: usize, n: i32) -> usize {
        self.dims.get(&(s, n)).copied().unwrap_or(0)
    }

    /// h₀: (s, n) → (s+1, n).
    #[must_use]
    pub fn h0(&self, s: usize, n: i32) -> BitMatrix {
        self.h0.get(&(s, n)).cloned().unwrap_or_else(|| BitMatrix::zeros(self.dim(s + 1, n), self.dim(s, n)))
    }

    /// h₁: (s, n) → (s+1, n+1).
    #[must_use]
    pub fn h1(&self, s: usize, n: i32) -> BitMatrix {
        self.h1.get(&(s, n)).cloned().unwrap_or_else(|| BitMatrix::zeros(self.dim(s + 1, n + 1), self.dim(s, n)))
    }

    /// Nonzero bidegrees in the window, ordered by (s, n).
    pub fn bidegrees(&self) -> impl Iterator<Item = ((usize, i32), usize)> + '_ {
        self.dims.iter().map(|(&k, &v)| (k, v))
    }

    /// Classes in Ext^{0,n} dual to free A(1)-summands, as coordinate vectors.
    #[must_use]
    pub fn free_classes(&self, n: i32) -> &[BitVec] {
        self.free.get(&n).map_or(&[], Vec::as_slice)
    }

    /// Total dimension of column n over s ≤ max_s.
    #[must_use]
    pub fn column_total(&self, n: i32) -> usize {
        (0..=self.max_s).map(|s| self.dim(s, n)).sum()
    }

    fn stable(&self, n: i32) -> Stable {
        let s = self.max_s;
        if n < self.lo {
            return Stable::Zero;
        }
        if self.reliability(n) != Reliability::Complete || s == 0 {
            return Stable::Unknown;
        }
        let (a, b) = (self.dim(s - 1, n), self.dim(s, n));
        if a == 0 && b == 0 {
            Stable::Zero
        } else if a == b && self.h0(s - 1, n).is_invertible() {
            Stable::Tower(b)
        } else {
            Stable::Unknown
        }
    }

    /// Dimension at any s, extrapolating stable columns above the window.
    fn ext_dim(&self, s: usize, n: i32) -> Option<usize> {
        if n < self.lo {
            return Some(0);
        }
        if self.reliability(n) != Reliability::Complete {
            return None;
        }
        if s <= self.max_s {
            return Some(self.dim(s, n));
        }
        match self.stable(n) {
            Stable::Zero => Some(0),
            Stable::Tower(k) => Some(k),
            Stable::Unknown => None,
        }
    }

    /// Whether h₀ (`h = 0`) or h₁ (`h = 1`) is injective on (s, n).
    fn injective(&self, h: usize, s: usize, n: i32) -> bool {
        match self.ext_dim(s, n) {
            Some(0) => return true,
            None => return false,
            _ => {}
        }
        if s < self.max_s && (h == 0 || self.reliability(n + 1) == Reliability::Complete) {
            let m = if h == 0 { self.h0(s, n) } else { self.h1(s, n) };
            return m.rank() == m.cols();
        }
        h == 0 && matches!(self.stable(n), Stable::Tower(_))
    }

    /// Whether h₀ / h₁ vanishes on (s, n).
    fn kills(&self, h: usize, s: usize, n: i32) -> bool {
        if self.ext_dim(s, n) == Some(0) {
            return true;
        }
        if s + 1 > self.max_s {
            return false;
        }
        let m = if h == 0 { self.h0(s, n) } else { self.h1(s, n) };
        (h == 0 || self.reliability(n + 1) == Reliability::Complete) && m.is_zero()
    }
}

fn columns(m: &BitMatrix) -> Vec<BitVec> {
    (0..m.cols()).map(|c| m.column(c)).collect()
}

/// Proven vanishing of Adams differentials d_r from each bidegree.
#[derive(Clone, Debug)]
pub struct CollapseCertificate {
    pub max_r: usize,
    zero: BTreeMap<(usize, usize, i32), bool>,
    columns: BTreeMap<i32, Result<(), String>>,
}

impl CollapseCertificate {
    /// Whether no differential can enter or leave (s, n).
    #[must_use]
    pub fn bidegree(&self, s: usize, n: i32) -> bool {
        (2..=self.max_r).all(|r| self.is_zero(r, s, n) && (s < r || self.is_zero(r, s - r, n + 1)))
    }

    /// Certification of a whole column, including the part above the window.
    pub fn column(&self, n: i32) -> Result<(), String> {
        self.columns.get(&n).cloned().unwrap_or_else(|| Err(format!("column {n} lies outside the window")))
    }

    fn is_zero(&self, r: usize, s: usize, n: i32) -> bool {
        self.zero.get(&(r, s, n)).copied().unwrap_or(false)
    }
}

/// Proves vanishing of differentials by degree reasons and h₀/h₁-linearity.
///
/// A differential d_r: (s, n) → (s+r, n−1) is zero when either space is zero;
/// when the source is spanned by classes dual to free summands (these split
/// off by Margolis' theorem) together with h₀/h₁-multiples of classes already
/// known to have zero d_r; or when some h ∈ {h₀, h₁} is injective on the
/// target and d_r is already zero on the h-image of the source. Above the
/// window a column is extrapolated from its top rows: empty, or an h₀-tower.
#[must_use]
pub fn collapse_certificate(chart: &ExtChart) -> CollapseCertificate {
    let top = chart.max_s;
    let max_r = top + 2;
    let (lo, hi) = (chart.lo, chart.max_n());
    let mut zero: BTreeMap<(usize, usize, i32), bool> = BTreeMap::new();
    let beyond = |r: usize, s: usize, n: i32| -> bool {
        chart.ext_dim(s, n) == Some(0) || chart.ext_dim(s + r, n - 1) == Some(0)
    };
    let get = |zero: &BTreeMap<(usize, usize, i32), bool>, r: usize, s: usize, n: i32| -> bool {
        if n < lo {
            return true;
        }
        if s > top {
            return beyond(r, s, n);
        }
        zero.get(&(r, s, n)).copied().unwrap_or(false)
    };
    loop {
        let mut changed = false;
        for r in 2..=max_r {
            for n in lo..=hi {
                for s in 0..=top {
                    if get(&zero, r, s, n) {
                        continue;
                    }
                    let proven = 'rule: {
                        let v = chart.dim(s, n);
                        if v == 0 {
                            break 'rule true;
                        }
                        match chart.ext_dim(s + r, n - 1) {
                            Some(0) => break 'rule true,
                            None => break 'rule false,
                            _ => {}
                        }
                        {
                            let mut span = EchelonBasis::new(v);
                            if s == 0 {
                                for c in chart.free_classes(n) {
                                    span.insert(c);
                                }
                            }
                            if s > 0 && get(&zero, r, s - 1, n) {
                                for c in columns(&chart.h0(s - 1, n)) {
                                    span.insert(&c);
                                }
                            }
                            if s > 0 && get(&zero, r, s - 1, n - 1) {
                                for c in columns(&chart.h1(s - 1, n - 1)) {
                                    span.insert(&c);
                                }
                            }
                            if span.dim() == v {
                                break 'rule true;
                            }
                        }
                        let via_h0 = (chart.kills(0, s, n) || get(&zero, r, s + 1, n)) && chart.injective(0, s + r, n - 1);
                        let via_h1 = (chart.kills(1, s, n) || get(&zero, r, s + 1, n + 1)) && chart.injective(1, s + r, n - 1);
                        via_h0 || via_h1
                    };
                    if proven {
                        zero.insert((r, s, n), true);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut cert = CollapseCertificate { max_r, zero, columns: BTreeMap::new() };
    for n in lo..hi {
        let result = (|| {
            for s in 0..=top {
                if chart.dim(s, n) > 0 && !cert.bidegree(s, n) {
                    return Err(format!("possible differential at (s={s}, n={n})"));
                }
                for r in 2..=max_r {
                    if !cert.is_zero(r, s, n + 1) && s + r > top && chart.ext_dim(s + r, n) != Some(0) {
                        return Err(format!("possible d{r} from (s={s}, n={}) above the window", n + 1));
                    }
                }
            }
            match (chart.stable(n), chart.stable(n - 1)) {
                (Stable::Zero, _) | (_, Stable::Zero) => Ok(()),
                (Stable::Unknown, _) => Err(format!("column {n} does not stabilise within s ≤ {top}")),
                _ => Err(format!("towers in adjacent columns {} and {n}", n - 1)),
            }
        })();
        cert.columns.insert(n, result);
    }
    cert
}

/// One degree of the abutment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupEntry {
    pub degree: i32,
    pub group: AbelianGroup,
    pub certified: bool,
    pub tower_at_boundary: bool,
    pub notes: Vec<String>,
}

/// 2-completed homotopy groups read off a certified chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupReport {
    pub entries: Vec<GroupEntry>,
}

impl GroupReport {
    #[must_use]
    pub fn fully_certified(&self) -> bool {
        self.entries.iter().all(|e| e.certified)
    }

    #[must_use]
    pub fn groups(&self) -> Vec<AbelianGroup> {
        self.entries.iter().map(|e| e.group.clone()).collect()
    }
}

/// Rank of the composite h₀^{b−a}: (a, n) → (b, n).
fn chain_rank(chart: &ExtChart, n: i32, a: usize, b: usize) -> usize {
    let mut m = BitMatrix::identity(chart.dim(a, n));
    for s in a..b {
        m = chart.h0(s, n).mul(&m);
    }
    m.rank()
}

/// The h₀-persistence decomposition of column n: (first s, last s) for each chain.
#[must_use]
pub fn h0_chains(chart: &ExtChart, n: i32) -> Vec<(usize, usize)> {
    let top = chart.max_s;
    let rk = |a: isize, b: usize| -> isize {
        if a < 0 || b > top {
            0
        } else {
            chain_rank(chart, n, a as usize, b) as isize
        }
    };
    let mut out = Vec::new();
    for a in 0..=top {
        for b in a..=top {
            let count = rk(a as isize, b) - rk(a as isize - 1, b) - rk(a as isize, b + 1) + rk(a as isize - 1, b + 1);
            for _ in 0..count.max(0) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Reads groups in degrees `lo..=through` assuming h₀ resolves every extension.
#[must_use]
pub fn assemble_groups(chart: &ExtChart, cert: &CollapseCertificate, through: i32) -> GroupReport {
    let mut entries = Vec::new();
    for n in chart.lo.min(0)..=through {
        let mut notes = Vec::new();
        let mut certified = true;
        if let Err(why) = cert.column(n) {
            certified = false;
            notes.push(format!("uncertified: {why}"));
        }
        let chains = h0_chains(chart, n);
        let mut free = 0;
        let mut torsion = Vec::new();
        let mut tower = false;
        for &(a, b) in &chains {
            if b == chart.max_s {
                tower = true;
                if matches!(chart.stable(n), Stable::Tower(_)) {
                    free += 1;
                } else {
                    certified = false;
                    notes.push(format!("chain from s={a} reaches the window top without stabilising"));
                }
            } else {
                torsion.push((b - a + 1) as u32);
            }
        }
        if torsion.len() > 1 || (!torsion.is_empty() && free > 0) {
            notes.push("extensions unresolved beyond h0".to_string());
        }
        if tower {
            notes.push("tower reaches window boundary".to_string());
        }
        entries.push(GroupEntry { degree: n, group: AbelianGroup::new(free, torsion), certified, tower_at_boundary: tower, notes });
    }
    GroupReport { entries }
}

/// TSV export: one row per nonzero bidegree with columns s, n, dim, h0-rank.
#[must_use]
pub fn chart_tsv(chart: &ExtChart, max_n: i32) -> String {
    let mut out = String::from("s\tn\tdim\th0_rank\n");
    for s in 0..=chart.max_s {
        for n in chart.lo..=max_n {
            let d = chart.dim(s, n);
            if d > 0 {
                let _ = writeln!(out, "{s}\t{n}\t{d}\t{}", chart.h0(s, n).rank());
            }
        }
    }
    out
}

/// ASCII Adams chart: one 4-character column per n, s increasing upward,
/// `o` per class (a digit beyond three) and `|` where h₀ is nonzero.
#[must_use]
pub fn chart_ascii(chart: &ExtChart, max_n: i32) -> String {
    let lo = chart.lo.min(0);
    let cell = |k: usize| -> String {
        match k {
            0 => "    ".to_string(),
            1..=3 => format!("{:<4}", "o".repeat(k)),
            k => format!("{:<4}", k),
        }
    };
    let mut out = String::new();
    for s in (0..=chart.max_s).rev() {
        let mut line = format!("{s:>3} ");
        for n in lo..=max_n {
            line.push_str(&cell(chart.dim(s, n)));
        }
        out.push_str(line.trim_end());
        out.push('\n');
        if s > 0 {
            let mut links = "    ".to_string();
            for n in lo..=max_n {
                links.push_str(if chart.h0(s - 1, n).is_zero() { "    " } else { "|   " });
            }
            out.push_str(links.trim_end());
            out.push('\n');
        }
    }
    let mut axis = "s/n ".to_string();
    for n in lo..=max_n {
        axis.push_str(&format!("{n:<4}"));
    }
    out.push_str(axis.trim_end());
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::module::{f2, free_a1};

    #[test]
    fn free_module_is_projective() {
        let res = minimal_resolution(&free_a1(), 4, 12).unwrap();
        assert_eq!(res.stages[0].generators, vec![0]);
        assert!(res.stages[1..].iter().all(|s| s.generators.is_empty()));
        let chart = ext_chart(&res);
        assert_eq!(chart.bidegrees().collect::<Vec<_>>(), vec![((0, 0), 1)]);
        let cert = collapse_certificate(&chart);
        assert!(cert.bidegree(0, 0));
    }

    #[test]
    fn f2_resolution_is_minimal() {
        let res = minimal_resolution(&f2(), 6, 16).unwrap();
        assert!(res.verify());
        assert_eq!(res.stages[1].generators, vec![1, 2]);
    }

    #[test]
    fn f2_ko_pattern() {
        let chart = ext_of(&f2(), 12, 21).unwrap();
        let cert = collapse_certificate(&chart);
        let report = assemble_groups(&chart, &cert, 8);
        let shown: Vec<String> = report.groups().iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["Z", "Z/2", "Z/2", "0", "Z", "0", "0", "0", "Z"]);
        assert!(report.fully_certified());
        assert!(chart.h1(0, 0).get(0, 0));
        assert!(chart.h1(1, 1).get(0, 0));
    }

    #[test]
    fn truncated_module_refused() {
        let m = free_a1().truncate_known(3);
        assert!(matches!(minimal_resolution(&m, 2, 8), Err(ExtError::Truncated { .. })));
    }

    #[test]
    fn joker_is_z2_in_degree_2() {
        let chart = ext_of(&catalog::joker(), 12, 18).unwrap();
        let cert = collapse_certificate(&chart);
        let groups = assemble_groups(&chart, &cert, 4).groups();
        assert_eq!(groups[0], AbelianGroup::cyclic(1));
    }

    #[test]
    fn ascii_chart_shows_tower() {
        let chart = ext_of(&f2(), 4, 8).unwrap();
        let text = chart_ascii(&chart, 4);
        assert!(text.lines().next().unwrap().starts_with("  4 o"));
        assert!(text.contains("    |"));
    }
}
