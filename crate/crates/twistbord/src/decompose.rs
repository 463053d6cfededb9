//! Module maps, Hom spaces, summand splitting and bounded-degree isomorphism search.

use crate::a1::{self, BASIS_DEGREES};
use crate::gf2::{BitMatrix, BitVec, EchelonBasis};
use crate::module::{block_diag, free_a1, GradedA1Module};

/// A degree-preserving linear map, one matrix per degree in `lo..=hi`.
/// `mats[i]` has shape `dim_N(lo+i) × dim_M(lo+i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub lo: i32,
    pub mats: Vec<BitMatrix>,
}

impl GradedMap {
    #[must_use]
    pub fn hi(&self) -> i32 {
        self.lo + self.mats.len() as i32 - 1
    }

    #[must_use]
    pub fn at(&self, d: i32) -> Option<&BitMatrix> {
        if d < self.lo {
            return None;
        }
        self.mats.get((d - self.lo) as usize)
    }

    /// The identity of `m` on degrees `lo..=hi`.
    #[must_use]
    pub fn identity(m: &GradedA1Module, lo: i32, hi: i32) -> Self {
        Self { lo, mats: (lo..=hi).map(|d| BitMatrix::identity(m.dim(d))).collect() }
    }

    /// `self ∘ other`, on the common range.
    #[must_use]
    pub fn compose(&self, other: &Self) -> Self {
        let lo = self.lo.max(other.lo);
        let hi = self.hi().min(other.hi());
        Self { lo, mats: (lo..=hi).map(|d| self.at(d).unwrap().mul(other.at(d).unwrap())).collect() }
    }

    #[must_use]
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.lo, self.mats.len()), (other.lo, other.mats.len()), "maps on different ranges");
        Self { lo: self.lo, mats: self.mats.iter().zip(&other.mats).map(|(a, b)| a.add(b)).collect() }
    }

    #[must_use]
    pub fn is_iso(&self) -> bool {
        self.mats.iter().all(BitMatrix::is_invertible)
    }

    #[must_use]
    pub fn inverse(&self) -> Option<Self> {
        Some(Self { lo: self.lo, mats: self.mats.iter().map(BitMatrix::inverse).collect::<Option<_>>()? })
    }

    /// Whether the map commutes with Sq¹ and Sq² on every pair of degrees inside its range.
    #[must_use]
    pub fn commutes(&self, src: &GradedA1Module, dst: &GradedA1Module) -> bool {
        for d in self.lo..=self.hi() {
            for k in [1u32, 2] {
                let t = d + k as i32;
                if t > self.hi() {
                    continue;
                }
                let (Ok(a), Ok(b)) = (src.sq(k, d), dst.sq(k, d)) else { return false };
                if self.at(t).unwrap().mul(&a) != b.mul(self.at(d).unwrap()) {
                    return false;
                }
            }
        }
        true
    }
}

/// A basis of the module maps `M → N` on degrees `lo..=top`, where the
/// commuting conditions are imposed whenever the target degree is at most `top`.
#[must_use]
pub fn hom_basis(m: &GradedA1Module, n: &GradedA1Module, top: i32) -> Vec<GradedMap> {
    let lo = m.lo().min(n.lo());
    let mut offsets = Vec::new();
    let mut total = 0;
    for d in lo..=top {
        offsets.push(total);
        total += m.dim(d) * n.dim(d);
    }
    let var = |d: i32, r: usize, c: usize| offsets[(d - lo) as usize] + r * m.dim(d) + c;
    let mut equations: Vec<BitVec> = Vec::new();
    for d in lo..=top {
        for k in [1u32, 2] {
            let t = d + k as i32;
            if t > top {
                continue;
            }
            let sm = m.sq(k, d).expect("source known through top");
            let sn = n.sq(k, d).expect("target known through top");
            for r in 0..n.dim(t) {
                for c in 0..m.dim(d) {
                    let mut eq = BitVec::zeros(total);
                    for j in 0..m.dim(t) {
                        if sm.get(j, c) {
                            eq.flip(var(t, r, j));
                        }
                    }
                    for j in 0..n.dim(d) {
                        if sn.get(r, j) {
                            eq.flip(var(d, j, c));
                        }
                    }
                    if !eq.is_zero() {
                        equations.push(eq);
                    }
                }
            }
        }
    }
    let system = BitMatrix::from_rows(total, &equations);
    system
        .kernel_basis()
        .into_iter()
        .map(|v| GradedMap {
            lo,
            mats: (lo..=top)
                .map(|d| {
                    let mut mat = BitMatrix::zeros(n.dim(d), m.dim(d));
                    for r in 0..n.dim(d) {
                        for c in 0..m.dim(d) {
                            if v.get(var(d, r, c)) {
                                mat.set(r, c, true);
                            }
                        }
                    }
                    mat
                })
                .collect(),
        })
        .collect()
}

/// Result of splitting a summand `P` off `R` along maps `ι: P → R`, `φ: R → P`
/// with `φ∘ι = id`.
struct Split {
    /// Per-degree isomorphism `R_d → P_d ⊕ K_d`.
    witness: GradedMap,
    complement: GradedA1Module,
}

fn split_along(r: &GradedA1Module, iota: &GradedMap, phi: &GradedMap) -> Split {
    let (lo, hi) = (r.lo(), r.hi());
    let mut kernels: Vec<(Vec<BitVec>, Vec<usize>)> = Vec::new();
    let mut witness = Vec::new();
    for d in lo..=hi {
        let n = r.dim(d);
        let phi_d = phi.at(d).cloned().unwrap_or_else(|| BitMatrix::zeros(0, n));
        let basis = phi_d.kernel_basis();
        // Kernel vectors carry a unit entry at their own free column; those columns are the coordinates.
        let (_, pivots) = phi_d.rref();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let iota_d = iota.at(d).cloned().unwrap_or_else(|| BitMatrix::zeros(n, 0));
        let projector = if iota_d.cols() == 0 { BitMatrix::identity(n) } else { BitMatrix::identity(n).add(&iota_d.mul(&phi_d)) };
        let mut coords = BitMatrix::zeros(free.len(), n);
        for (i, &f) in free.iter().enumerate() {
            coords.set(i, f, true);
        }
        witness.push(phi_d.vstack(&coords.mul(&projector)));
        kernels.push((basis, free));
    }
    let mut dims = Vec::new();
    let mut labels = Vec::new();
    let mut sq1 = Vec::new();
    let mut sq2 = Vec::new();
    for d in lo..=hi {
        let (basis, _) = &kernels[(d - lo) as usize];
        dims.push(basis.len());
        labels.push(
            basis
                .iter()
                .map(|v| {
                    let mut terms: Vec<String> = Vec::new();
                    for i in v.iter_ones() {
                        for t in r.labels(d)[i].split('+') {
                            match terms.iter().position(|x| x == t) {
                                Some(p) => {
                                    terms.remove(p);
                                }
                                None => terms.push(t.to_string()),
                            }
                        }
                    }
                    terms.sort();
                    if terms.is_empty() { "0".to_string() } else { terms.join("+") }
                })
                .collect(),
        );
        for (k, maps) in [(1u32, &mut sq1), (2u32, &mut sq2)] {
            let t = d + k as i32;
            if t > hi || !r.known(t) {
                maps.push(BitMatrix::zeros(0, basis.len()));
                continue;
            }
            let (tbasis, tfree) = &kernels[(t - lo) as usize];
            let mut mat = BitMatrix::zeros(tbasis.len(), basis.len());
            for (c, v) in basis.iter().enumerate() {
                let image = r.apply_sq(k, d, v).expect("known degree");
                for (row, &f) in tfree.iter().enumerate() {
                    if image.get(f) {
                        mat.set(row, c, true);
                    }
                }
            }
            maps.push(mat);
        }
    }
    let complement = GradedA1Module::from_parts(&complement_name(&r.name), lo, r.is_complete(), dims, sq1, sq2, labels)
        .expect("complement shapes are consistent");
    Split { witness: GradedMap { lo, mats: witness }, complement }
}

/// Inclusion of the free module on `x ∈ R_d` and its Frobenius retraction.
fn free_split_maps(r: &GradedA1Module, d: i32, x: &BitVec) -> (GradedA1Module, GradedMap, GradedMap) {
    let piece = free_a1().suspend(d);
    let (lo, hi) = (r.lo(), r.hi());
    let top_x = r.apply_basis(a1::TOP, d, x).expect("top degree known");
    let lambda = top_x.first_one().expect("x generates a free summand");
    let mut iota = Vec::new();
    let mut phi = Vec::new();
    for e in lo..=hi {
        let words: Vec<usize> = (0..8).filter(|&w| d + BASIS_DEGREES[w] as i32 == e).collect();
        let mut inc = BitMatrix::zeros(r.dim(e), words.len());
        for (c, &w) in words.iter().enumerate() {
            for i in r.apply_basis(w, d, x).expect("known degree").iter_ones() {
                inc.set(i, c, true);
            }
        }
        iota.push(inc);
        // Pairing ⟨c, w⟩ = coefficient of the top class in c·w, with deg c + deg w = 6.
        let duals: Vec<usize> = (0..8).filter(|&c| BASIS_DEGREES[c] as i32 + e - d == 6).collect();
        let mut pairing = BitMatrix::zeros(duals.len(), words.len());
        for (i, &c) in duals.iter().enumerate() {
            for (j, &w) in words.iter().enumerate() {
                if a1::basis_product(c, w) == Some(a1::TOP) {
                    pairing.set(i, j, true);
                }
            }
        }
        let inverse = pairing.inverse().expect("the Frobenius pairing is perfect");
        let mut values = BitMatrix::zeros(duals.len(), r.dim(e));
        for col in 0..r.dim(e) {
            let m = BitVec::unit(r.dim(e), col);
            for (i, &c) in duals.iter().enumerate() {
                if r.apply_basis(c, e, &m).expect("known degree").get(lambda) {
                    values.set(i, col, true);
                }
            }
        }
        phi.push(inverse.mul(&values));
    }
    (piece, GradedMap { lo, mats: iota }, GradedMap { lo, mats: phi })
}

/// One summand of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Summand {
    /// Σᵈ A(1), generated by the element with the given label.
    Free { degree: i32, generator: String },
    /// Σᵈ of a catalog module.
    Catalog { name: String, degree: i32 },
}

impl std::fmt::Display for Summand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Free { degree, .. } => write!(f, "A1free@{degree}"),
            Self::Catalog { name, degree } => write!(f, "{name}@{degree}"),
        }
    }
}

/// A direct-sum decomposition with a stored isomorphism witness.
#[derive(Clone, Debug)]
pub struct ModuleDecomposition {
    pub input: GradedA1Module,
    pub summands: Vec<(Summand, GradedA1Module)>,
    pub remainder: GradedA1Module,
    pub valid_through: i32,
    /// Per-degree isomorphism from `input` onto the sum of the summands followed by the remainder.
    pub witness: GradedMap,
}

impl ModuleDecomposition {
    fn trivial(m: &GradedA1Module) -> Self {
        Self {
            input: m.clone(),
            summands: Vec::new(),
            remainder: m.clone(),
            valid_through: m.hi(),
            witness: GradedMap::identity(m, m.lo(), m.hi()),
        }
    }

    #[must_use]
    pub fn free_summands(&self) -> Vec<(i32, String)> {
        self.summands
            .iter()
            .filter_map(|(s, _)| match s {
                Summand::Free { degree, generator } => Some((*degree, generator.clone())),
                Summand::Catalog { .. } => None,
            })
            .collect()
    }

    #[must_use]
    pub fn catalog_summands(&self) -> Vec<(String, i32)> {
        self.summands
            .iter()
            .filter_map(|(s, _)| match s {
                Summand::Catalog { name, degree } => Some((name.clone(), *degree)),
                Summand::Free { .. } => None,
            })
            .collect()
    }

    /// The sum of all summands and the remainder, in witness order.
    #[must_use]
    pub fn assembled(&self) -> GradedA1Module {
        let mut sum = GradedA1Module::zero("sum");
        for (_, piece) in &self.summands {
            sum = sum.direct_sum(piece);
        }
        sum.direct_sum(&self.remainder)
    }

    /// Checks that the witness is invertible and commutes with Sq¹, Sq² through `valid_through`.
    #[must_use]
    pub fn verify(&self) -> bool {
        let top = self.valid_through;
        let lo = self.input.lo().min(self.witness.lo);
        let target = self.assembled();
        if lo > top {
            return true;
        }
        let Some(w) = restrict(&self.witness, lo, top, &self.input, &target) else { return false };
        w.is_iso() && w.commutes(&self.input.truncate_known(top), &target.truncate_known(top))
    }

    fn push_split(&mut self, summand: Summand, piece: GradedA1Module, split: Split) {
        // Extend the witness: rows of the old remainder are replaced by the new piece followed by the complement.
        let lo = self.witness.lo;
        let mut mats = Vec::new();
        for d in lo..=self.witness.hi() {
            let old = self.witness.at(d).unwrap();
            let prefix: usize = self.summands.iter().map(|(_, p)| p.dim(d)).sum();
            let rem = self.remainder.dim(d);
            let step = split.witness.at(d).cloned().unwrap_or_else(|| BitMatrix::zeros(piece.dim(d) + split.complement.dim(d), rem));
            mats.push(block_diag(&BitMatrix::identity(prefix), &step).mul(old));
        }
        self.witness = GradedMap { lo, mats };
        self.summands.push((summand, piece));
        self.remainder = split.complement;
    }
}

fn restrict(w: &GradedMap, lo: i32, hi: i32, src: &GradedA1Module, dst: &GradedA1Module) -> Option<GradedMap> {
    let mats = (lo..=hi)
        .map(|d| match w.at(d) {
            Some(m) => Some(m.clone()),
            None if src.dim(d) == 0 && dst.dim(d) == 0 => Some(BitMatrix::zeros(0, 0)),
            None => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some(GradedMap { lo, mats })
}

fn complement_name(name: &str) -> String {
    if name.ends_with(" (complement)") { name.to_string() } else { format!("{name} (complement)") }
}

/// Repeatedly splits off free summands A(1)·x, choosing the lowest degree and
/// lowest basis index with Sq²Sq²Sq²·x ≠ 0 among degrees at most `hi − 6`.
#[must_use]
pub fn split_free(m: &GradedA1Module) -> ModuleDecomposition {
    let mut dec = ModuleDecomposition::trivial(m);
    let limit = if m.is_complete() { m.hi() } else { m.hi() - 6 };
    'search: loop {
        let r = dec.remainder.clone();
        for d in r.lo()..=limit {
            let n = r.dim(d);
            for i in 0..n {
                let x = BitVec::unit(n, i);
                let Ok(top) = r.apply_basis(a1::TOP, d, &x) else { continue };
                if top.is_zero() {
                    continue;
                }
                let label = r.labels(d)[i].clone();
                let (piece, iota, phi) = free_split_maps(&r, d, &x);
                let split = split_along(&r, &iota, &phi);
                let piece = piece.relabel(|w| if w == "1" { label.clone() } else { format!("{w}·{label}") }).named(&format!("A1free@{d}"));
                let piece = if r.is_complete() { piece } else { piece.truncate_known(r.hi()) };
                dec.push_split(Summand::Free { degree: d, generator: label }, piece, split);
                continue 'search;
            }
        }
        break;
    }
    dec
}

/// Tries to split `piece` off `r` (both complete). Uses pairs of basis maps
/// `f: P → R`, `g: R → P` with `g∘f` invertible.
fn split_piece(r: &GradedA1Module, piece: &GradedA1Module) -> Option<Split> {
    if piece.is_zero_module() || piece.lo() < r.lo() {
        return None;
    }
    for d in piece.lo()..=piece.hi() {
        if piece.dim(d) > r.dim(d) {
            return None;
        }
    }
    let top = r.hi().max(piece.hi());
    let into = hom_basis(piece, r, top);
    let back = hom_basis(r, piece, top);
    for f in &into {
        for g in &back {
            let gf = g.compose(f);
            let Some(inv) = gf.inverse() else { continue };
            let phi = inv.compose(g);
            let lo = r.lo();
            let iota = GradedMap { lo, mats: (lo..=r.hi()).map(|d| f.at(d).cloned().unwrap_or_else(|| BitMatrix::zeros(r.dim(d), piece.dim(d)))).collect() };
            let phi = GradedMap { lo, mats: (lo..=r.hi()).map(|d| phi.at(d).cloned().unwrap_or_else(|| BitMatrix::zeros(piece.dim(d), r.dim(d)))).collect() };
            return Some(split_along(r, &iota, &phi));
        }
    }
    None
}

/// Splits free summands off `m` (known through at least `n + 6` for complete
/// detection through `n`), truncates to degrees `≤ n`, then peels off
/// catalog summands. Each `hints` entry `(name, degree, module)` is tried at
/// its own degree first; afterwards `candidates` are tried at the bottom degree
/// of what remains.
#[must_use]
pub fn decompose_through(
    m: &GradedA1Module,
    n: i32,
    hints: &[(String, i32, GradedA1Module)],
    candidates: &[(String, GradedA1Module)],
) -> ModuleDecomposition {
    let freed = split_free(m);
    let mut dec = ModuleDecomposition {
        input: m.quotient_above(n),
        summands: Vec::new(),
        remainder: GradedA1Module::zero("remainder"),
        valid_through: n,
        witness: GradedMap { lo: m.lo(), mats: vec![] },
    };
    // Truncating the free splitting at n keeps a valid witness on degrees ≤ n.
    let mut pieces = Vec::new();
    for (s, p) in &freed.summands {
        if let Summand::Free { degree, .. } = s {
            if *degree <= n {
                pieces.push((s.clone(), p.quotient_above(n)));
            }
        }
    }
    let dropped: Vec<usize> = freed
        .summands
        .iter()
        .enumerate()
        .filter(|(_, (s, _))| matches!(s, Summand::Free { degree, .. } if *degree > n))
        .map(|(i, _)| i)
        .collect();
    let remainder = freed.remainder.quotient_above(n);
    let lo = m.lo();
    let mut mats = Vec::new();
    for d in lo..=n {
        let w = freed.witness.at(d).cloned().unwrap_or_else(|| BitMatrix::zeros(0, m.dim(d)));
        // Drop the rows of free summands that start above n; they vanish in these degrees.
        let mut rows = Vec::new();
        let mut offset = 0;
        for (i, (_, p)) in freed.summands.iter().enumerate() {
            let k = p.dim(d);
            if !dropped.contains(&i) {
                rows.extend(offset..offset + k);
            }
            offset += k;
        }
        rows.extend(offset..offset + freed.remainder.dim(d));
        let kept: Vec<BitVec> = rows.iter().map(|&r| w.row(r)).collect();
        mats.push(BitMatrix::from_rows(m.dim(d), &kept));
    }
    dec.witness = GradedMap { lo, mats };
    dec.summands = pieces;
    dec.remainder = remainder;
    let mut used = vec![false; hints.len()];
    for (s, _) in &dec.summands {
        if let Summand::Free { degree, .. } = s {
            if let Some(i) = (0..hints.len()).find(|&i| !used[i] && hints[i].0 == "A1free" && hints[i].1 == *degree) {
                used[i] = true;
            }
        }
    }
    'peel: loop {
        let r = dec.remainder.clone();
        if r.total_dim() == 0 {
            break;
        }
        for (i, (name, degree, c)) in hints.iter().enumerate() {
            if used[i] || c.lo() + degree > n || c.lo() + degree < r.lo() {
                continue;
            }
            let piece = c.suspend(*degree).quotient_above(n);
            if let Some(split) = split_piece(&r, &piece) {
                used[i] = true;
                let piece = piece.named(&format!("{name}@{degree}"));
                dec.push_split(Summand::Catalog { name: name.clone(), degree: *degree }, piece, split);
                continue 'peel;
            }
        }
        let bottom = r.lo();
        for (name, c) in candidates {
            if c.lo() + bottom > n {
                continue;
            }
            let piece = c.suspend(bottom).quotient_above(n);
            if let Some(split) = split_piece(&r, &piece) {
                let piece = piece.named(&format!("{name}@{bottom}"));
                dec.push_split(Summand::Catalog { name: name.clone(), degree: bottom }, piece, split);
                continue 'peel;
            }
        }
        break;
    }
    dec
}

/// Outcome of a bounded isomorphism search.
/// Degree, decomposables of both modules, and the indices spanning each indecomposable quotient.
type IndecomposableSlice = (i32, EchelonBasis, EchelonBasis, Vec<usize>, Vec<usize>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoResult {
    Iso(GradedMap),
    NotIsomorphic(String),
    Undecided { subspace_dim: usize },
}

/// Largest dimension of the space of induced maps on indecomposables searched exhaustively.
pub const ISO_SEARCH_BUDGET_BITS: usize = 22;

/// Searches for an isomorphism `M/M_{>n} ≅ N/N_{>n}`.
///
/// A module map is an isomorphism on bounded-below finite modules iff it is
/// bijective on each degree, which (given equal dimensions) holds iff it is
/// surjective on indecomposables. The search enumerates the induced maps on
/// indecomposables spanned by a Hom-space basis.
#[must_use]
pub fn iso_up_to_degree(m: &GradedA1Module, n: &GradedA1Module, top: i32) -> IsoResult {
    let mq = m.quotient_above(top);
    let nq = n.quotient_above(top);
    let lo = mq.lo().min(nq.lo());
    for d in lo..=top {
        if mq.dim(d) != nq.dim(d) {
            return IsoResult::NotIsomorphic(format!("graded dimensions differ in degree {d}"));
        }
    }
    for i in [0, 1] {
        let (Ok(a), Ok(b)) = (mq.margolis(i), nq.margolis(i)) else {
            return IsoResult::NotIsomorphic("invalid module".into());
        };
        if a.support() != b.support() {
            return IsoResult::NotIsomorphic(format!("Q{i} Margolis homology differs"));
        }
    }
    for d in lo..=top {
        if mq.generator_count(d) != nq.generator_count(d) {
            return IsoResult::NotIsomorphic(format!("generator counts differ in degree {d}"));
        }
    }
    if mq.total_dim() == 0 {
        return IsoResult::Iso(GradedMap { lo, mats: (lo..=top).map(|_| BitMatrix::zeros(0, 0)).collect() });
    }
    let same = (lo..=top).all(|d| {
        mq.dim(d) == nq.dim(d)
            && [1u32, 2].iter().all(|&k| mq.sq(k, d).ok() == nq.sq(k, d).ok())
    });
    if same {
        return IsoResult::Iso(GradedMap::identity(&mq, lo, top));
    }
    let homs = hom_basis(&mq, &nq, top);
    // Induced maps on indecomposables, flattened into one vector per Hom basis element.
    let quotients: Vec<IndecomposableSlice> = (lo..=top)
        .filter(|&d| mq.generator_count(d) > 0)
        .map(|d| {
            let dm = decomposable_basis(&mq, d);
            let dn = decomposable_basis(&nq, d);
            let fm: Vec<usize> = (0..mq.dim(d)).filter(|i| !dm.pivots().any(|p| p == *i)).collect();
            let fn_: Vec<usize> = (0..nq.dim(d)).filter(|i| !dn.pivots().any(|p| p == *i)).collect();
            (d, dm, dn, fm, fn_)
        })
        .collect();
    let induced = |h: &GradedMap| -> Vec<BitMatrix> {
        quotients
            .iter()
            .map(|(d, _, dn, fm, fn_)| {
                let mut q = BitMatrix::zeros(fn_.len(), fm.len());
                for (c, &i) in fm.iter().enumerate() {
                    let image = dn.reduce(&h.at(*d).unwrap().column(i));
                    for (r, &j) in fn_.iter().enumerate() {
                        if image.get(j) {
                            q.set(r, c, true);
                        }
                    }
                }
                q
            })
            .collect()
    };
    let flat = |blocks: &[BitMatrix]| -> BitVec {
        let mut bits = Vec::new();
        for b in blocks {
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    bits.push(b.get(r, c));
                }
            }
        }
        BitVec::from_bools(&bits)
    };
    // Choose Hom elements whose induced maps form a basis of the image.
    let Some(first) = homs.first() else {
        return IsoResult::NotIsomorphic("no nonzero module maps".into());
    };
    let mut image = EchelonBasis::new(flat(&induced(first)).len());
    let mut chosen: Vec<(GradedMap, Vec<BitMatrix>)> = Vec::new();
    for h in &homs {
        let q = induced(h);
        if image.insert(&flat(&q)) {
            chosen.push((h.clone(), q));
        }
    }
    if chosen.is_empty() {
        return IsoResult::NotIsomorphic("every module map is zero on indecomposables".into());
    }
    if chosen.len() > ISO_SEARCH_BUDGET_BITS {
        return IsoResult::Undecided { subspace_dim: chosen.len() };
    }
    let mut current_q: Vec<BitMatrix> = chosen[0].1.iter().map(|b| BitMatrix::zeros(b.rows(), b.cols())).collect();
    let mut current_h = GradedMap { lo: homs[0].lo, mats: homs[0].mats.iter().map(|b| BitMatrix::zeros(b.rows(), b.cols())).collect() };
    let total: u64 = 1 << chosen.len();
    for step in 1..total {
        let bit = step.trailing_zeros() as usize;
        current_h = current_h.add(&chosen[bit].0);
        for (a, b) in current_q.iter_mut().zip(&chosen[bit].1) {
            *a = a.add(b);
        }
        if current_q.iter().all(BitMatrix::is_invertible) {
            let lifted = GradedMap { lo, mats: (lo..=top).map(|d| current_h.at(d).cloned().unwrap_or_else(|| BitMatrix::zeros(0, 0))).collect() };
            debug_assert!(lifted.is_iso() && lifted.commutes(&mq, &nq));
            return IsoResult::Iso(lifted);
        }
    }
    IsoResult::NotIsomorphic("no module map is invertible on indecomposables".into())
}

fn decomposable_basis(m: &GradedA1Module, d: i32) -> EchelonBasis {
    let mut e = EchelonBasis::new(m.dim(d));
    for k in [1u32, 2] {
        if let Ok(s) = m.sq(k, d - k as i32) {
            for c in 0..s.cols() {
                e.insert(&s.column(c));
            }
        }
    }
    e
}
