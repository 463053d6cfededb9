//! Truncated cohomology rings with total Steenrod squares, Thom-class models,
//! Eilenberg–Mac Lane spaces, and the twisted Thom-module constructor.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::catalog::submodule;
use crate::gf2::{BitMatrix, BitVec};
use crate::module::GradedA1Module;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("unknown space {0:?}")]
    UnknownSpace(String),
    #[error("unknown structure {0:?}")]
    UnknownStructure(String),
    #[error("negative cutoff {0}")]
    NegativeCutoff(i32),
    #[error("{what} must have degree {expected}, found degree {got}")]
    DegreeMismatch { what: String, expected: u32, got: u32 },
    #[error("{what} is not homogeneous")]
    Inhomogeneous { what: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("instability fails: {0}")]
    Instability(String),
    #[error("degree {degree} exceeds the modeled range (through {limit})")]
    OutOfRange { degree: u32, limit: u32 },
}

/// Exponent vector over the generators of a presentation.
pub type Mono = Vec<u16>;

/// A polynomial over GF(2): a set of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly(pub BTreeSet<Mono>);

impl Poly {
    #[must_use]
    pub fn zero() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn mono(m: Mono) -> Self {
        Self(BTreeSet::from([m]))
    }

    #[must_use]
    pub fn one(ngens: usize) -> Self {
        Self::mono(vec![0; ngens])
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn toggle(&mut self, m: Mono) {
        if !self.0.remove(&m) {
            self.0.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for m in &other.0 {
            self.toggle(m.clone());
        }
    }

    #[must_use]
    pub fn plus(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        p.add_assign(other);
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub degree: u32,
    /// `x^e = 0` for this exponent, when present.
    pub nilpotent: Option<u16>,
}

/// Generators forming a Thom class model: a monomial is allowed iff its
/// exponents on `gens` all vanish or its exponent on `euler` is positive.
/// The class `euler` plays the Thom class U.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThomBlock {
    pub gens: Vec<usize>,
    pub euler: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacePresentation {
    pub name: String,
    pub gens: Vec<Generator>,
    /// `total_sq[g][i] = Sqⁱ g` for `0 ≤ i ≤ deg g`.
    pub total_sq: Vec<Vec<Poly>>,
    pub thom: Vec<ThomBlock>,
    pub cutoff: u32,
}

fn binom_odd(n: i64, k: i64) -> bool {
    if k == 0 {
        return true;
    }
    if n < 0 || k < 0 || k > n {
        return false;
    }
    (n & k) == k
}

impl SpacePresentation {
    #[must_use]
    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    #[must_use]
    pub fn generator(&self, label: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.label == label)
    }

    #[must_use]
    pub fn degree_of(&self, m: &[u16]) -> u32 {
        m.iter().zip(&self.gens).map(|(&e, g)| u32::from(e) * g.degree).sum()
    }

    /// Degree of a homogeneous nonzero polynomial (zero has no degree).
    #[must_use]
    pub fn poly_degree(&self, p: &Poly) -> Option<u32> {
        let mut degs = p.0.iter().map(|m| self.degree_of(m));
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    /// Whether the monomial survives the nilpotence relations and the cutoff.
    #[must_use]
    pub fn ambient_ok(&self, m: &[u16]) -> bool {
        self.degree_of(m) <= self.cutoff && m.iter().zip(&self.gens).all(|(e, g)| g.nilpotent.is_none_or(|n| *e < n))
    }

    /// Whether the monomial is a basis element: it survives in the ambient ring
    /// and satisfies every Thom condition.
    #[must_use]
    pub fn allowed(&self, m: &[u16]) -> bool {
        self.ambient_ok(m) && self.thom.iter().all(|b| m[b.euler] > 0 || b.gens.iter().all(|&i| m[i] == 0))
    }

    /// Monomial basis in degree `d`, in decreasing lexicographic order of exponents.
    #[must_use]
    pub fn basis(&self, d: u32) -> Vec<Mono> {
        let mut out = Vec::new();
        let mut cur = vec![0u16; self.ngens()];
        self.enumerate(0, d, &mut cur, &mut out);
        out.retain(|m| self.allowed(m));
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    fn enumerate(&self, i: usize, remaining: u32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if i == self.ngens() {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let g = &self.gens[i];
        let max = remaining / g.degree;
        let max = g.nilpotent.map_or(max, |n| max.min(u32::from(n) - 1));
        for e in 0..=max {
            cur[i] = e as u16;
            self.enumerate(i + 1, remaining - e * g.degree, cur, out);
        }
        cur[i] = 0;
    }

    /// Whether every allowed monomial has degree at most the cutoff.
    #[must_use]
    pub fn is_finite_within_cutoff(&self) -> bool {
        let mut top = 0;
        for g in &self.gens {
            match g.nilpotent {
                Some(n) => top += (u32::from(n) - 1) * g.degree,
                None => return false,
            }
        }
        top <= self.cutoff
    }

    fn mul_mono(&self, a: &[u16], b: &[u16]) -> Option<Mono> {
        let m: Mono = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.ambient_ok(&m).then_some(m)
    }

    /// Product in the ambient polynomial ring (nilpotence and cutoff applied).
    #[must_use]
    pub fn multiply(&self, p: &Poly, q: &Poly) -> Poly {
        let mut out = Poly::zero();
        for a in &p.0 {
            for b in &q.0 {
                if let Some(m) = self.mul_mono(a, b) {
                    out.toggle(m);
                }
            }
        }
        out
    }

    /// Sqᵏ of a generator.
    #[must_use]
    pub fn sq_generator(&self, g: usize, k: u32) -> Poly {
        self.total_sq[g].get(k as usize).cloned().unwrap_or_default()
    }

    /// Checks Sq⁰g = g, Sq^{deg g}g = g² and homogeneity of every stored square.
    ///
    /// # Errors
    /// Names the first failing generator.
    pub fn check_instability(&self) -> Result<(), SpaceError> {
        for (i, g) in self.gens.iter().enumerate() {
            let mut unit = vec![0u16; self.ngens()];
            unit[i] = 1;
            if self.total_sq[i].len() != g.degree as usize + 1 {
                return Err(SpaceError::Instability(format!("{} needs squares Sq0..Sq{}", g.label, g.degree)));
            }
            if self.total_sq[i][0] != Poly::mono(unit.clone()).filtered(self) {
                return Err(SpaceError::Instability(format!("Sq0 {} ≠ {}", g.label, g.label)));
            }
            let square = self.multiply(&Poly::mono(unit.clone()), &Poly::mono(unit));
            if self.total_sq[i][g.degree as usize] != square {
                return Err(SpaceError::Instability(format!("Sq{} {} ≠ {}²", g.degree, g.label, g.label)));
            }
            for (k, p) in self.total_sq[i].iter().enumerate() {
                if let Some(d) = self.poly_degree(p) {
                    if d != g.degree + k as u32 {
                        return Err(SpaceError::Instability(format!("Sq{k} {} has degree {d}", g.label)));
                    }
                } else if !p.is_zero() {
                    return Err(SpaceError::Instability(format!("Sq{k} {} is not homogeneous", g.label)));
                }
            }
        }
        Ok(())
    }

    /// Product space X × Y with both cutoffs replaced by `cutoff`.
    #[must_use]
    pub fn product(&self, other: &Self, cutoff: u32) -> Self {
        let n = self.ngens();
        let m = other.ngens();
        let widen = |p: &Poly, left: bool| -> Poly {
            Poly(
                p.0.iter()
                    .map(|mono| if left { mono.iter().copied().chain(std::iter::repeat_n(0, m)).collect() } else { std::iter::repeat_n(0, n).chain(mono.iter().copied()).collect() })
                    .collect(),
            )
        };
        let mut total_sq: Vec<Vec<Poly>> = self.total_sq.iter().map(|v| v.iter().map(|p| widen(p, true)).collect()).collect();
        total_sq.extend(other.total_sq.iter().map(|v| v.iter().map(|p| widen(p, false)).collect::<Vec<_>>()));
        let mut thom = self.thom.clone();
        thom.extend(other.thom.iter().map(|b| ThomBlock { gens: b.gens.iter().map(|i| i + n).collect(), euler: b.euler + n }));
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        let mut s = Self { name: format!("{}×{}", self.name, other.name), gens, total_sq, thom, cutoff };
        s.refilter();
        s
    }

    fn refilter(&mut self) {
        let snapshot = self.clone();
        for v in &mut self.total_sq {
            for p in v.iter_mut() {
                *p = p.filtered(&snapshot);
            }
        }
    }

    /// Human-readable label of a monomial; Thom blocks print their class as U.
    #[must_use]
    pub fn mono_label(&self, m: &[u16]) -> String {
        let mut parts = Vec::new();
        let mut thom_parts = Vec::new();
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let block = self.thom.iter().find(|b| b.euler == i);
            let e = if block.is_some() { e - 1 } else { e };
            if block.is_some() {
                thom_parts.push("U".to_string());
            }
            if e == 0 {
                continue;
            }
            let label = &self.gens[i].label;
            parts.push(if e == 1 { label.clone() } else { format!("{label}^{e}") });
        }
        parts.extend(thom_parts);
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }

    #[must_use]
    pub fn poly_label(&self, p: &Poly) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<&Mono> = p.0.iter().collect();
        terms.sort_by(|a, b| b.cmp(a));
        terms.iter().map(|m| self.mono_label(m)).collect::<Vec<_>>().join(" + ")
    }

    /// Parses a polynomial in the generators, written with `+`, `*` and `^`.
    ///
    /// # Errors
    /// Unknown generators and malformed terms are rejected.
    pub fn parse_poly(&self, text: &str) -> Result<Poly, String> {
        let mut out = Poly::zero();
        for term in text.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err("empty term".into());
            }
            if term == "0" {
                continue;
            }
            let mut mono = vec![0u16; self.ngens()];
            if term != "1" {
                for factor in term.split('*') {
                    let factor = factor.trim();
                    let (label, power) = match factor.split_once('^') {
                        Some((l, p)) => (l.trim(), p.trim().parse::<u16>().map_err(|_| format!("bad exponent in {factor:?}"))?),
                        None => (factor, 1),
                    };
                    let g = self.generator(label).ok_or_else(|| format!("unknown generator {label:?}"))?;
                    mono[g] += power;
                }
            }
            if self.ambient_ok(&mono) {
                out.toggle(mono);
            }
        }
        Ok(out)
    }
}

impl Poly {
    /// Drops monomials that vanish in the ambient ring.
    #[must_use]
    pub fn filtered(&self, s: &SpacePresentation) -> Poly {
        Poly(self.0.iter().filter(|m| s.ambient_ok(m)).cloned().collect())
    }

    /// Keeps only basis monomials of the presentation.
    #[must_use]
    pub fn projected(&self, s: &SpacePresentation) -> Poly {
        Poly(self.0.iter().filter(|m| s.allowed(m)).cloned().collect())
    }
}

/// Memoized Cartan-formula evaluation of Steenrod squares on a presentation.
pub struct SqEngine<'a> {
    space: &'a SpacePresentation,
    cache: HashMap<(Mono, u32), Poly>,
}

impl<'a> SqEngine<'a> {
    #[must_use]
    pub fn new(space: &'a SpacePresentation) -> Self {
        Self { space, cache: HashMap::new() }
    }

    /// Sqᵏ of a monomial in the ambient ring, by Sq(xy) = Sq(x)Sq(y) after
    /// peeling off the first generator.
    pub fn sq_mono(&mut self, m: &[u16], k: u32) -> Poly {
        if k == 0 {
            return Poly::mono(m.to_vec()).filtered(self.space);
        }
        if let Some(p) = self.cache.get(&(m.to_vec(), k)) {
            return p.clone();
        }
        let Some(g) = m.iter().position(|&e| e > 0) else {
            return Poly::zero();
        };
        let mut rest = m.to_vec();
        rest[g] -= 1;
        let mut out = Poly::zero();
        let gdeg = self.space.gens[g].degree;
        for i in 0..=k.min(gdeg) {
            let left = self.space.sq_generator(g, i);
            if left.is_zero() {
                continue;
            }
            let right = self.sq_mono(&rest, k - i);
            out.add_assign(&self.space.multiply(&left, &right));
        }
        self.cache.insert((m.to_vec(), k), out.clone());
        out
    }

    pub fn sq(&mut self, p: &Poly, k: u32) -> Poly {
        let mut out = Poly::zero();
        for m in &p.0 {
            out.add_assign(&self.sq_mono(m, k));
        }
        out
    }

    /// Applies a word of squares, rightmost first.
    pub fn sq_word(&mut self, word: &[u32], p: &Poly) -> Poly {
        let mut cur = p.clone();
        for &k in word.iter().rev() {
            cur = self.sq(&cur, k);
        }
        cur
    }
}

fn unit_mono(n: usize, i: usize, e: u16) -> Mono {
    let mut m = vec![0; n];
    m[i] = e;
    m
}

/// H*(BO_n) with the Wu formula Sqⁱwⱼ = Σₖ C(j−i+k−1, k) w_{i−k} w_{j+k}.
#[must_use]
pub fn bo(n: usize, cutoff: u32) -> SpacePresentation {
    let gens: Vec<Generator> = (1..=n).map(|j| Generator { label: format!("w{j}"), degree: j as u32, nilpotent: None }).collect();
    let w = |j: usize| -> Option<Mono> {
        match j {
            0 => Some(vec![0; n]),
            j if j <= n => Some(unit_mono(n, j - 1, 1)),
            _ => None,
        }
    };
    let mut total_sq = Vec::new();
    for j in 1..=n {
        let mut squares = Vec::new();
        for i in 0..=j {
            let mut p = Poly::zero();
            for k in 0..=i {
                if !binom_odd(j as i64 - i as i64 + k as i64 - 1, k as i64) {
                    continue;
                }
                let (Some(a), Some(b)) = (w(i - k), w(j + k)) else { continue };
                p.toggle(a.iter().zip(&b).map(|(x, y)| x + y).collect());
            }
            squares.push(p);
        }
        total_sq.push(squares);
    }
    let mut s = SpacePresentation { name: format!("BO{n}"), gens, total_sq, thom: vec![], cutoff };
    s.refilter();
    s
}

/// H*(BO₁) = F2[t].
#[must_use]
pub fn bo1(cutoff: u32, label: &str) -> SpacePresentation {
    let mut s = bo(1, cutoff);
    s.gens[0].label = label.to_string();
    s
}

/// The Thom space of the universal rank-n bundle, modeled as F2·1 ⊕ wₙ·H*(BOₙ)
/// with U = wₙ (the Euler class embeds H̃*(MOₙ) into H*(BOₙ)).
#[must_use]
pub fn mo(n: usize, cutoff: u32) -> SpacePresentation {
    let mut s = bo(n, cutoff);
    s.name = format!("MO{n}");
    s.thom.push(ThomBlock { gens: (0..n).collect(), euler: n - 1 });
    s.refilter();
    s
}

/// H*(BSO₂) = F2[w₂].
#[must_use]
pub fn bso2(cutoff: u32) -> SpacePresentation {
    let mut s = SpacePresentation {
        name: "BSO2".into(),
        gens: vec![Generator { label: "w2".into(), degree: 2, nilpotent: None }],
        total_sq: vec![vec![Poly::mono(vec![1]), Poly::zero(), Poly::mono(vec![2])]],
        thom: vec![],
        cutoff,
    };
    s.refilter();
    s
}

/// The Wu manifold SU₃/SO₃: F2[z₂, z₃]/(z₂², z₃²), Sq z₂ = z₂ + z₃, Sq z₃ = z₃ + z₂z₃.
#[must_use]
pub fn wu_manifold() -> SpacePresentation {
    SpacePresentation {
        name: "WuManifold".into(),
        gens: vec![
            Generator { label: "z2".into(), degree: 2, nilpotent: Some(2) },
            Generator { label: "z3".into(), degree: 3, nilpotent: Some(2) },
        ],
        total_sq: vec![
            vec![Poly::mono(vec![1, 0]), Poly::mono(vec![0, 1]), Poly::zero()],
            vec![Poly::mono(vec![0, 1]), Poly::zero(), Poly::mono(vec![1, 1]), Poly::zero()],
        ],
        thom: vec![],
        cutoff: 5,
    }
}

/// Reduces a sum of Steenrod words to admissible form by Adem relations.
#[must_use]
pub fn admissible_form(words: &BTreeSet<Vec<u32>>) -> BTreeSet<Vec<u32>> {
    let mut done: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut todo: Vec<Vec<u32>> = words.iter().cloned().collect();
    let mut pending: BTreeMap<Vec<u32>, bool> = BTreeMap::new();
    for w in todo.drain(..) {
        *pending.entry(w).or_insert(false) ^= true;
    }
    while let Some((w, _)) = pending.iter().find(|(_, &v)| v).map(|(w, v)| (w.clone(), *v)) {
        pending.remove(&w);
        let w: Vec<u32> = w.into_iter().filter(|&x| x != 0).collect();
        match w.windows(2).position(|p| p[0] < 2 * p[1]) {
            None => {
                if !done.remove(&w) {
                    done.insert(w);
                }
            }
            Some(i) => {
                let (a, b) = (w[i], w[i + 1]);
                for c in 0..=a / 2 {
                    if binom_odd(i64::from(b) - i64::from(c) - 1, i64::from(a) - 2 * i64::from(c)) {
                        let mut nw = w[..i].to_vec();
                        nw.push(a + b - c);
                        if c > 0 {
                            nw.push(c);
                        }
                        nw.extend_from_slice(&w[i + 2..]);
                        *pending.entry(nw).or_insert(false) ^= true;
                    }
                }
            }
        }
        pending.retain(|_, v| *v);
    }
    done
}

fn excess(i: &[u32]) -> i64 {
    match i.split_first() {
        None => 0,
        Some((&first, rest)) => i64::from(first) - rest.iter().map(|&x| i64::from(x)).sum::<i64>(),
    }
}

fn admissible_sequences(max_total: u32, n: u32) -> Vec<Vec<u32>> {
    fn extend(seq: &[u32], total: u32, max_total: u32, n: u32, out: &mut Vec<Vec<u32>>) {
        // Sequences are grown from the right: each new leading entry is at least twice the previous leader.
        out.push(seq.to_vec());
        let min_next = seq.first().map_or(1, |&f| 2 * f);
        for next in min_next..=max_total.saturating_sub(total) {
            let mut cand = vec![next];
            cand.extend_from_slice(seq);
            if excess(&cand) >= i64::from(n) {
                continue;
            }
            extend(&cand, total + next, max_total, n, out);
        }
    }
    let mut out = Vec::new();
    extend(&[], 0, max_total, n, &mut out);
    out.sort_by_key(|s| (s.iter().sum::<u32>(), s.clone()));
    out
}

fn sq_word_label(word: &[u32], base: &str) -> String {
    let ops: String = word.iter().map(|k| format!("Sq{k}")).collect();
    format!("{ops}{base}")
}

/// H*(K(Z/2, n)) as the polynomial ring on Sq^I ι over admissible I of
/// excess below n. Squares of generators are computed by Adem reduction.
///
/// # Errors
/// `n` must be at least 1.
pub fn eilenberg_maclane(n: u32, cutoff: u32, base: &str) -> Result<SpacePresentation, SpaceError> {
    if n == 0 {
        return Err(SpaceError::UnknownSpace("KZ2_0".into()));
    }
    let seqs: Vec<Vec<u32>> = admissible_sequences(cutoff.saturating_sub(n), n);
    let gens: Vec<Generator> = seqs.iter().map(|s| Generator { label: sq_word_label(s, base), degree: n + s.iter().sum::<u32>(), nilpotent: None }).collect();
    let ng = gens.len();
    let index: HashMap<Vec<u32>, usize> = seqs.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let mut s = SpacePresentation { name: format!("KZ2_{n}"), gens, total_sq: vec![], thom: vec![], cutoff };
    // Value of an admissible word on ι, as a polynomial in the generators.
    fn evaluate(word: &[u32], n: u32, index: &HashMap<Vec<u32>, usize>, s: &SpacePresentation, ng: usize) -> Poly {
        let e = excess(word);
        if e > i64::from(n) {
            return Poly::zero();
        }
        if e < i64::from(n) {
            return match index.get(word) {
                Some(&g) => Poly::mono(unit_mono(ng, g, 1)),
                None => Poly::zero(),
            };
        }
        let inner = evaluate(&word[1..], n, index, s, ng);
        s.multiply(&inner, &inner)
    }
    let mut total_sq = Vec::new();
    for (g, seq) in seqs.iter().enumerate() {
        let deg = s.gens[g].degree;
        let mut squares = Vec::new();
        for k in 0..=deg {
            if deg + k > cutoff {
                squares.push(Poly::zero());
                continue;
            }
            let mut w = vec![k];
            w.extend_from_slice(seq);
            let mut p = Poly::zero();
            for a in admissible_form(&BTreeSet::from([w])) {
                p.add_assign(&evaluate(&a, n, &index, &s, ng));
            }
            squares.push(p);
        }
        total_sq.push(squares);
    }
    s.total_sq = total_sq;
    Ok(s)
}

/// The cataloged spaces, truncated at `cutoff`.
///
/// # Errors
/// Unknown names and negative cutoffs are rejected.
pub fn space(name: &str, cutoff: i32) -> Result<SpacePresentation, SpaceError> {
    if cutoff < 0 {
        return Err(SpaceError::NegativeCutoff(cutoff));
    }
    let c = cutoff as u32;
    Ok(match name {
        "BO1" => bo1(c, "t"),
        "BO2" => bo(2, c),
        "BO3" => bo(3, c),
        "BSO2" => bso2(c),
        "MO2" => mo(2, c),
        "MO3" => mo(3, c),
        "BO1×BO1" | "BO1xBO1" => bo1(c, "a").product(&bo1(c, "b"), c),
        "BO1×BO2" | "BO1xBO2" => {
            let mut b = bo(2, c);
            b.gens[0].label = "b".into();
            b.gens[1].label = "c".into();
            bo1(c, "a").product(&b, c)
        }
        "WuManifold" => {
            let mut w = wu_manifold();
            w.cutoff = c.min(5);
            w.refilter();
            w
        }
        "KZ2_2" => eilenberg_maclane(2, c, "B")?,
        "KZ2_3" => eilenberg_maclane(3, c, "C")?,
        other => return Err(SpaceError::UnknownSpace(other.to_string())),
    })
}

pub const SPACE_NAMES: [&str; 11] = ["BO1", "BO2", "BO3", "BSO2", "MO2", "MO3", "BO1×BO1", "BO1×BO2", "WuManifold", "KZ2_2", "KZ2_3"];

/// The twisted Thom module V(X, a, b): basis Q·m over monomials m, with
/// Sq¹(Qm) = Q(am + Sq¹m) and Sq²(Qm) = Q(bm + a·Sq¹m + Sq²m), placed so that Q
/// sits in degree `shift`.
///
/// # Errors
/// `a` must be zero or of degree 1, `b` zero or of degree 2.
pub fn twist(x: &SpacePresentation, a: &Poly, b: &Poly, shift: i32, label: &str) -> Result<GradedA1Module, SpaceError> {
    for (what, p, expected) in [("a", a, 1u32), ("b", b, 2u32)] {
        if p.is_zero() {
            continue;
        }
        match x.poly_degree(p) {
            Some(d) if d == expected => {}
            Some(d) => return Err(SpaceError::DegreeMismatch { what: what.into(), expected, got: d }),
            None => return Err(SpaceError::Inhomogeneous { what: what.into() }),
        }
    }
    let cutoff = x.cutoff;
    let bases: Vec<Vec<Mono>> = (0..=cutoff).map(|d| x.basis(d)).collect();
    let index: Vec<HashMap<&Mono, usize>> = bases.iter().map(|b| b.iter().enumerate().map(|(i, m)| (m, i)).collect()).collect();
    let mut engine = SqEngine::new(x);
    let mut sq1 = Vec::new();
    let mut sq2 = Vec::new();
    let to_vec = |p: &Poly, d: u32| -> BitVec {
        let mut v = BitVec::zeros(bases[d as usize].len());
        for m in &p.0 {
            v.flip(index[d as usize][m]);
        }
        v
    };
    for d in 0..=cutoff {
        let n = bases[d as usize].len();
        for k in [1u32, 2] {
            let t = d + k;
            if t > cutoff {
                if k == 1 { sq1.push(BitMatrix::zeros(0, n)) } else { sq2.push(BitMatrix::zeros(0, n)) }
                continue;
            }
            let mut cols = Vec::with_capacity(n);
            for m in &bases[d as usize] {
                let mp = Poly::mono(m.clone());
                let mut image = engine.sq_mono(m, k);
                if k == 1 {
                    image.add_assign(&x.multiply(a, &mp));
                } else {
                    image.add_assign(&x.multiply(b, &mp));
                    let s1 = engine.sq_mono(m, 1);
                    image.add_assign(&x.multiply(a, &s1));
                }
                cols.push(to_vec(&image.projected(x), t));
            }
            let mat = BitMatrix::from_columns(bases[t as usize].len(), &cols);
            if k == 1 { sq1.push(mat) } else { sq2.push(mat) }
        }
    }
    let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
    let labels: Vec<Vec<String>> = bases
        .iter()
        .map(|b| b.iter().map(|m| if m.iter().all(|&e| e == 0) { label.to_string() } else { format!("{label}·{}", x.mono_label(m)) }).collect())
        .collect();
    let complete = x.is_finite_within_cutoff();
    let m = GradedA1Module::from_parts(&format!("V({}, {}, {})", x.name, x.poly_label(a), x.poly_label(b)), 0, complete, dims, sq1, sq2, labels)
        .expect("twist shapes are consistent");
    Ok(m.suspend(shift))
}

/// A change to one Steenrod square of one generator, used for mutation testing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqMutation {
    pub generator: String,
    pub square: u32,
    /// Polynomial added to Sq^square(generator).
    pub term: String,
}

impl SqMutation {
    /// Spaces without the named generator are left alone.
    ///
    /// # Errors
    /// A term that does not parse, or whose degree is not that of Sq^square(generator).
    pub fn apply(&self, s: &mut SpacePresentation) -> Result<(), SpaceError> {
        let Some(g) = s.generator(&self.generator) else { return Ok(()) };
        let p = s.parse_poly(&self.term).map_err(|message| SpaceError::Parse { line: 0, message })?;
        let expected = s.gens[g].degree + self.square;
        match s.poly_degree(&p) {
            None if !p.is_zero() => return Err(SpaceError::Inhomogeneous { what: format!("mutation term {:?}", self.term) }),
            Some(got) if got != expected => {
                return Err(SpaceError::DegreeMismatch { what: format!("mutation term {:?}", self.term), expected, got });
            }
            _ => {}
        }
        if let Some(q) = s.total_sq[g].get_mut(self.square as usize) {
            q.add_assign(&p);
        }
        Ok(())
    }
}

pub const STRUCTURE_NAMES: [&str; 15] = [
    "FK", "FKO", "GM", "KTminus", "KTplus", "SpinO2", "SigmaBO2", "TauMinus", "TauPlus", "TauMinusComplement", "PinMinusO2", "PinMinus", "PinPlus",
    "MV_a_ab", "J⊗PinMinus",
];

/// The module whose Ext computes the 2-completed bordism of a named twisted
/// spin structure, known through `cutoff`.
///
/// # Errors
/// Unknown names and negative cutoffs are rejected.
pub fn named_structure(name: &str, cutoff: i32) -> Result<GradedA1Module, SpaceError> {
    named_structure_with(name, cutoff, None)
}

/// As [`named_structure`], applying `mutation` to every base space that has the named generator.
///
/// # Errors
/// Unknown names and negative cutoffs are rejected.
pub fn named_structure_with(name: &str, cutoff: i32, mutation: Option<&SqMutation>) -> Result<GradedA1Module, SpaceError> {
    let base = |n: &str| -> Result<SpacePresentation, SpaceError> {
        let mut s = space(n, cutoff)?;
        if let Some(m) = mutation {
            m.apply(&mut s)?;
        }
        Ok(s)
    };
    let v = |n: &str, a: &str, b: &str| -> Result<GradedA1Module, SpaceError> {
        let s = base(n)?;
        let pa = s.parse_poly(a).map_err(|e| SpaceError::Parse { line: 0, message: e })?;
        let pb = s.parse_poly(b).map_err(|e| SpaceError::Parse { line: 0, message: e })?;
        twist(&s, &pa, &pb, 0, "Q")
    };
    let m = match name {
        "PinMinus" => v("BO1", "t", "0")?,
        "PinPlus" => v("BO1", "t", "t^2")?,
        "FK" => v("BSO2", "0", "w2")?,
        "FKO" => v("BO1", "t", "0")?.tensor(&v("BSO2", "0", "w2")?),
        "GM" => v("MO2", "0", "w2")?,
        "KTminus" => v("BO1", "t", "0")?.tensor(&v("MO2", "0", "w2")?),
        "KTplus" => v("BO1", "t", "t^2")?.tensor(&v("MO2", "0", "w2")?),
        "SpinO2" => v("BO2", "0", "w2")?,
        "SigmaBO2" => v("BO2", "w1", "0")?,
        "TauMinus" => v("BO1×BO2", "a + b", "a^2 + a*b + b^2")?,
        "TauPlus" => v("BO1×BO2", "a + b", "a*b + b^2")?,
        "TauMinusComplement" => {
            let s = base("BO1×BO2")?;
            let t = v("BO1×BO2", "a + b", "a^2 + a*b + b^2")?;
            let c = s.generator("c").expect("BO1×BO2 has c");
            let mut gens = Vec::new();
            for d in 0..=cutoff {
                for (i, mono) in s.basis(d as u32).iter().enumerate() {
                    if mono[c] > 0 {
                        gens.push((d, BitVec::unit(t.dim(d), i)));
                    }
                }
            }
            submodule(&t, &gens)
        }
        "PinMinusO2" => v("BO2", "w1", "w2")?.tensor(&v("BO1", "t", "0")?),
        "MV_a_ab" => v("BO1×BO1", "a", "a*b")?,
        "J⊗PinMinus" => crate::catalog::joker().tensor(&v("BO1", "t", "0")?),
        other => return Err(SpaceError::UnknownStructure(other.to_string())),
    };
    Ok(m.named(name))
}

impl fmt::Display for SpacePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SPACE {}", self.name)?;
        for g in &self.gens {
            match g.nilpotent {
                Some(e) => writeln!(f, "GEN {} DEG {} NILPOTENT {e}", g.label, g.degree)?,
                None => writeln!(f, "GEN {} DEG {}", g.label, g.degree)?,
            }
        }
        for (i, g) in self.gens.iter().enumerate() {
            let total: Vec<String> = self.total_sq[i].iter().filter(|p| !p.is_zero()).map(|p| self.poly_label_plain(p)).collect();
            writeln!(f, "SQ {} = {}", g.label, if total.is_empty() { "0".to_string() } else { total.join(" + ") })?;
        }
        for b in &self.thom {
            writeln!(f, "THOM {} EULER {}", b.gens.iter().map(|&i| self.gens[i].label.clone()).collect::<Vec<_>>().join(" "), self.gens[b.euler].label)?;
        }
        writeln!(f, "CUTOFF {}", self.cutoff)
    }
}

impl SpacePresentation {
    /// Polynomial text in the `.space` syntax.
    #[must_use]
    pub fn poly_label_plain(&self, p: &Poly) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<&Mono> = p.0.iter().collect();
        terms.sort_by(|a, b| b.cmp(a));
        terms
            .iter()
            .map(|m| {
                let f: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { self.gens[i].label.clone() } else { format!("{}^{e}", self.gens[i].label) })
                    .collect();
                if f.is_empty() { "1".to_string() } else { f.join("*") }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A parsed `.space` file: the presentation plus its twist data.
#[derive(Clone, Debug)]
pub struct SpaceFile {
    pub space: SpacePresentation,
    pub twist_a: Poly,
    pub twist_b: Poly,
    pub shift: i32,
}

impl SpaceFile {
    /// The twisted module described by the file.
    ///
    /// # Errors
    /// Propagates degree errors from [`twist`].
    pub fn module(&self) -> Result<GradedA1Module, SpaceError> {
        twist(&self.space, &self.twist_a, &self.twist_b, self.shift, "Q")
    }
}

/// Parses the `.space` format:
///
/// ```text
/// SPACE <name>
/// GEN <label> DEG <d> [NILPOTENT <e>]
/// SQ <label> = <polynomial>
/// THOM <label> ... EULER <label>
/// CUTOFF <n>
/// TWIST A = <polynomial>
/// TWIST B = <polynomial>
/// SHIFT <k>
/// ```
///
/// `SQ` gives the total square; its homogeneous parts are sorted by degree.
///
/// # Errors
/// Reports the offending line.
pub fn parse_space(text: &str) -> Result<SpaceFile, SpaceError> {
    let err = |line: usize, message: String| SpaceError::Parse { line, message };
    let mut name = "unnamed".to_string();
    let mut gens: Vec<Generator> = Vec::new();
    let mut sq_lines: Vec<(usize, String, String)> = Vec::new();
    let mut thom_lines: Vec<(usize, Vec<String>, String)> = Vec::new();
    let mut twist_lines: Vec<(usize, char, String)> = Vec::new();
    let mut cutoff: Option<u32> = None;
    let mut shift = 0;
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "SPACE" => name = words.get(1).ok_or_else(|| err(line_no, "SPACE needs a name".into()))?.to_string(),
            "GEN" => {
                if words.len() < 4 || words[2] != "DEG" {
                    return Err(err(line_no, "expected GEN <label> DEG <d> [NILPOTENT <e>]".into()));
                }
                let degree: u32 = words[3].parse().map_err(|_| err(line_no, format!("bad degree {:?}", words[3])))?;
                if degree == 0 {
                    return Err(err(line_no, "generators must have positive degree".into()));
                }
                let nilpotent = match words.get(4) {
                    Some(&"NILPOTENT") => Some(words.get(5).and_then(|w| w.parse::<u16>().ok()).filter(|&e| e >= 1).ok_or_else(|| err(line_no, "bad nilpotence exponent".into()))?),
                    Some(other) => return Err(err(line_no, format!("unexpected {other:?}"))),
                    None => None,
                };
                if gens.iter().any(|g| g.label == words[1]) {
                    return Err(err(line_no, format!("duplicate generator {}", words[1])));
                }
                gens.push(Generator { label: words[1].to_string(), degree, nilpotent });
            }
            "SQ" => {
                let (lhs, rhs) = line[2..].split_once('=').ok_or_else(|| err(line_no, "expected SQ <label> = <polynomial>".into()))?;
                sq_lines.push((line_no, lhs.trim().to_string(), rhs.trim().to_string()));
            }
            "THOM" => {
                let pos = words.iter().position(|w| *w == "EULER").ok_or_else(|| err(line_no, "expected THOM <labels> EULER <label>".into()))?;
                let euler = words.get(pos + 1).ok_or_else(|| err(line_no, "missing Euler class".into()))?.to_string();
                thom_lines.push((line_no, words[1..pos].iter().map(|s| s.to_string()).collect(), euler));
            }
            "CUTOFF" => {
                let c: i64 = words.get(1).and_then(|w| w.parse().ok()).ok_or_else(|| err(line_no, "bad cutoff".into()))?;
                if c < 0 {
                    return Err(SpaceError::NegativeCutoff(c as i32));
                }
                cutoff = Some(c as u32);
            }
            "TWIST" => {
                let rest = line[5..].trim();
                let (which, poly) = rest.split_once('=').ok_or_else(|| err(line_no, "expected TWIST A|B = <polynomial>".into()))?;
                let which = match which.trim() {
                    "A" => 'A',
                    "B" => 'B',
                    other => return Err(err(line_no, format!("unknown twist parameter {other:?}"))),
                };
                twist_lines.push((line_no, which, poly.trim().to_string()));
            }
            "SHIFT" => shift = words.get(1).and_then(|w| w.parse().ok()).ok_or_else(|| err(line_no, "bad shift".into()))?,
            other => return Err(err(line_no, format!("unknown keyword {other}"))),
        }
    }
    let cutoff = cutoff.ok_or_else(|| err(text.lines().count(), "missing CUTOFF".into()))?;
    let ng = gens.len();
    let mut s = SpacePresentation { name, gens, total_sq: vec![], thom: vec![], cutoff };
    for (line, labels, euler) in thom_lines {
        let idx = |l: &str| s.generator(l).ok_or_else(|| err(line, format!("unknown generator {l:?}")));
        let block = ThomBlock { gens: labels.iter().map(|l| idx(l)).collect::<Result<_, _>>()?, euler: idx(&euler)? };
        s.thom.push(block);
    }
    let mut total: Vec<Option<Vec<Poly>>> = vec![None; ng];
    for (line, label, rhs) in &sq_lines {
        let g = s.generator(label).ok_or_else(|| err(*line, format!("unknown generator {label:?}")))?;
        let p = s.parse_poly(rhs).map_err(|m| err(*line, m))?;
        let deg = s.gens[g].degree;
        let mut parts = vec![Poly::zero(); deg as usize + 1];
        for m in p.0 {
            let d = s.degree_of(&m);
            if d < deg || d > 2 * deg {
                return Err(err(*line, format!("term of degree {d} cannot occur in Sq {label}")));
            }
            parts[(d - deg) as usize].toggle(m);
        }
        total[g] = Some(parts);
    }
    for (i, t) in total.iter().enumerate() {
        if t.is_none() {
            return Err(err(0, format!("missing SQ line for {}", s.gens[i].label)));
        }
    }
    s.total_sq = total.into_iter().map(Option::unwrap).collect();
    s.refilter();
    if let Err(e) = s.check_instability() {
        let line = sq_lines.first().map_or(0, |l| l.0);
        return Err(err(line, e.to_string()));
    }
    let mut twist_a = Poly::zero();
    let mut twist_b = Poly::zero();
    for (line, which, poly) in twist_lines {
        let p = s.parse_poly(&poly).map_err(|m| err(line, m))?;
        let expected = if which == 'A' { 1 } else { 2 };
        if !p.is_zero() && s.poly_degree(&p) != Some(expected) {
            return Err(err(line, format!("TWIST {which} must have degree {expected}")));
        }
        if which == 'A' { twist_a = p } else { twist_b = p }
    }
    Ok(SpaceFile { space: s, twist_a, twist_b, shift })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &SpacePresentation, t: &str) -> Poly {
        s.parse_poly(t).unwrap()
    }

    #[test]
    fn bo1_squares() {
        let s = space("BO1", 5).unwrap();
        let mut e = SqEngine::new(&s);
        assert_eq!(e.sq(&p(&s, "t"), 1), p(&s, "t^2"));
        assert_eq!(e.sq(&p(&s, "t^2"), 2), p(&s, "t^4"));
        assert_eq!(e.sq(&p(&s, "t^2"), 1), Poly::zero());
    }

    #[test]
    fn wu_formula_bo2() {
        let s = space("BO2", 8).unwrap();
        assert_eq!(s.sq_generator(1, 1), p(&s, "w1*w2"));
        assert_eq!(s.sq_generator(1, 2), p(&s, "w2^2"));
        assert_eq!(s.sq_generator(0, 1), p(&s, "w1^2"));
    }

    #[test]
    fn wu_formula_bo3() {
        let s = space("BO3", 9).unwrap();
        assert_eq!(s.sq_generator(2, 1), p(&s, "w1*w3"));
        assert_eq!(s.sq_generator(2, 2), p(&s, "w2*w3"));
        assert_eq!(s.sq_generator(1, 1), p(&s, "w1*w2 + w3"));
    }

    #[test]
    fn wu_manifold_actions() {
        let s = space("WuManifold", 5).unwrap();
        let mut e = SqEngine::new(&s);
        assert_eq!(e.sq(&p(&s, "z3"), 2), p(&s, "z2*z3"));
        assert_eq!(e.sq(&p(&s, "z2"), 1), p(&s, "z3"));
        assert!(s.check_instability().is_ok());
    }

    #[test]
    fn kz2_2_degree_five() {
        let s = space("KZ2_2", 6).unwrap();
        let labels: Vec<String> = s.basis(5).iter().map(|m| s.mono_label(m)).collect();
        assert_eq!(labels.len(), 2);
        assert!(labels.contains(&"Sq2Sq1B".to_string()));
        assert!(labels.contains(&"B Sq1B".to_string()));
        assert!(s.check_instability().is_ok());
    }

    #[test]
    fn adem_examples() {
        let one = |w: Vec<u32>| admissible_form(&BTreeSet::from([w]));
        assert!(one(vec![1, 1]).is_empty());
        assert_eq!(one(vec![2, 2]), BTreeSet::from([vec![3, 1]]));
        assert_eq!(one(vec![1, 2]), BTreeSet::from([vec![3]]));
        assert_eq!(one(vec![2, 3]), BTreeSet::from([vec![5], vec![4, 1]]));
    }

    #[test]
    fn instability_holds_in_catalog() {
        for name in SPACE_NAMES {
            let s = space(name, 9).unwrap();
            assert!(s.check_instability().is_ok(), "{name}");
        }
    }

    #[test]
    fn mo2_model() {
        let s = space("MO2", 6).unwrap();
        let dims: Vec<usize> = (0..=6).map(|d| s.basis(d).len()).collect();
        assert_eq!(dims, vec![1, 0, 1, 1, 2, 2, 3]);
        assert_eq!(s.mono_label(&[1, 1]), "w1 U");
    }

    #[test]
    fn zero_twist_is_untwisted() {
        let s = space("BO1", 8).unwrap();
        let m = twist(&s, &Poly::zero(), &Poly::zero(), 0, "Q").unwrap();
        assert_eq!(m.graded_dims(0, 8), vec![1; 9]);
        assert!(m.sq(1, 0).unwrap().is_zero());
        assert!(!m.sq(1, 1).unwrap().is_zero());
    }

    #[test]
    fn twist_rejects_wrong_degree() {
        let s = space("BO1", 4).unwrap();
        let bad = p(&s, "t^2");
        assert!(matches!(twist(&s, &bad, &Poly::zero(), 0, "Q"), Err(SpaceError::DegreeMismatch { .. })));
    }

    #[test]
    fn pin_minus_margolis() {
        let m = named_structure("PinMinus", 14).unwrap();
        assert_eq!(m.graded_dims(0, 5), vec![1; 6]);
        assert!(m.validate().is_ok());
        assert!(m.margolis(0).unwrap().support().is_empty());
        assert_eq!(m.margolis(1).unwrap().support(), vec![(1, 1)]);
    }

    #[test]
    fn parse_space_round_trip() {
        let s = space("BO2", 6).unwrap();
        let text = format!("{s}TWIST A = w1\nSHIFT 0\n");
        let f = parse_space(&text).unwrap();
        assert_eq!(f.space.total_sq, s.total_sq);
        assert_eq!(f.module().unwrap(), twist(&s, &p(&s, "w1"), &Poly::zero(), 0, "Q").unwrap());
    }

    #[test]
    fn parse_space_rejects_unstable_square() {
        let text = "SPACE X\nGEN x DEG 1\nSQ x = x\nCUTOFF 4\n";
        assert!(matches!(parse_space(text), Err(SpaceError::Parse { line: 3, .. })));
    }
}
