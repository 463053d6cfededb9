//! Primary obstructions to breaking higher-form Z/2 symmetries: the Thom-class
//! pullback H*(K(Z/2,n)) → H*(MO_n), Sq¹-quotients, and evaluation on
//! cataloged manifolds.
//!
//! The obstruction is handled mod 2 only. The integral class lives in
//! H⁵(K(Z/2,2);Z) ≅ Z/4; its mod-2 shadow is an element of ker Sq¹ taken
//! modulo Im Sq¹, and that quotient is what is computed here.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec, EchelonBasis};
use crate::space::{eilenberg_maclane, mo, space, Generator, Poly, SpaceError, SpacePresentation, SqEngine, SqMutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("the Thom pullback is modeled for n in 2..=4, not n = {0}")]
    UnsupportedN(u32),
    #[error("degree {degree} is outside the modeled range (K(Z/2,{n}) is exact only through degree {limit})")]
    DegreeOutOfRange { n: u32, degree: u32, limit: u32 },
    #[error("cannot parse class expression {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("class expression is not homogeneous")]
    Inhomogeneous,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// One factor of a monomial: `Sq^{word} x^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Factor {
    word: Vec<u32>,
    generator: String,
    power: u16,
}

/// A sum of products of Steenrod words applied to named generators, written
/// like `Sq2Sq1 B + B*Sq1 B` or `C^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClassExpr {
    pub text: String,
    terms: Vec<Vec<Factor>>,
}

impl CohomologyClassExpr {
    /// # Errors
    /// Empty terms, malformed squares and bad exponents.
    pub fn parse(text: &str) -> Result<Self, ObstructionError> {
        let err = |reason: &str| ObstructionError::Parse { text: text.to_string(), reason: reason.to_string() };
        let mut terms = Vec::new();
        for term in text.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(err("empty term"));
            }
            if term == "0" {
                continue;
            }
            let mut factors = Vec::new();
            for raw in term.split(['*', '·']) {
                let mut rest: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
                let mut word = Vec::new();
                while let Some(after) = rest.strip_prefix("Sq") {
                    let digits: String = after.chars().take_while(char::is_ascii_digit).collect();
                    if digits.is_empty() {
                        return Err(err("Sq needs a degree"));
                    }
                    word.push(digits.parse().map_err(|_| err("bad Sq degree"))?);
                    rest = after[digits.len()..].to_string();
                }
                let (generator, power) = match rest.split_once('^') {
                    Some((g, p)) => (g.to_string(), p.parse().map_err(|_| err("bad exponent"))?),
                    None => (rest.clone(), 1),
                };
                if generator.is_empty() {
                    return Err(err("missing generator"));
                }
                factors.push(Factor { word, generator, power });
            }
            terms.push(factors);
        }
        Ok(Self { text: text.trim().to_string(), terms })
    }

    /// Value in `space`, with generators looked up in `env` first and then among the space's own.
    ///
    /// # Errors
    /// Unknown generators.
    pub fn evaluate(&self, space: &SpacePresentation, env: &BTreeMap<String, Poly>) -> Result<Poly, ObstructionError> {
        let mut engine = SqEngine::new(space);
        let mut total = Poly::zero();
        for term in &self.terms {
            let mut product = Poly::one(space.ngens());
            for f in term {
                let base = match env.get(&f.generator) {
                    Some(p) => p.clone(),
                    None => {
                        let g = space.generator(&f.generator).ok_or_else(|| ObstructionError::Parse {
                            text: self.text.clone(),
                            reason: format!("unknown generator {:?} in {}", f.generator, space.name),
                        })?;
                        let mut m = vec![0u16; space.ngens()];
                        m[g] = 1;
                        Poly::mono(m)
                    }
                };
                let mut value = engine.sq_word(&f.word, &base);
                let single = value.clone();
                for _ in 1..f.power {
                    value = space.multiply(&value, &single);
                }
                product = space.multiply(&product, &value);
            }
            total.add_assign(&product);
        }
        Ok(total.projected(space))
    }
}

impl fmt::Display for CohomologyClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Coordinates of a homogeneous polynomial in the monomial basis of degree `d`.
fn coords(s: &SpacePresentation, p: &Poly, d: u32) -> BitVec {
    let basis = s.basis(d);
    let mut v = BitVec::zeros(basis.len());
    for m in &p.0 {
        if let Some(i) = basis.iter().position(|b| b == m) {
            v.flip(i);
        }
    }
    v
}

fn from_coords(s: &SpacePresentation, v: &BitVec, d: u32) -> Poly {
    let basis = s.basis(d);
    let mut p = Poly::zero();
    for i in v.iter_ones() {
        p.toggle(basis[i].clone());
    }
    p
}

/// Matrix of Sq^k from degree d to d + k.
fn sq_matrix(s: &SpacePresentation, k: u32, d: u32) -> BitMatrix {
    let mut engine = SqEngine::new(s);
    let cols: Vec<BitVec> = s.basis(d).iter().map(|m| coords(s, &engine.sq_mono(m, k).projected(s), d + k)).collect();
    BitMatrix::from_columns(s.basis(d + k).len(), &cols)
}

/// Span of Sq¹(H^{d−1}) inside H^d.
fn sq1_image(s: &SpacePresentation, d: u32) -> EchelonBasis {
    let mut image = EchelonBasis::new(s.basis(d).len());
    if d > 0 {
        let m = sq_matrix(s, 1, d - 1);
        for c in 0..m.cols() {
            image.insert(&m.column(c));
        }
    }
    image
}

/// Whether `p` lies in Im Sq¹ of its degree.
fn in_sq1_image(s: &SpacePresentation, p: &Poly, d: u32) -> bool {
    sq1_image(s, d).contains(&coords(s, p, d))
}

/// Label of a class in a Thom model as `(…) U`.
#[must_use]
pub fn thom_label(target: &SpacePresentation, p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let label = target.poly_label(p);
    let terms: Vec<&str> = label.rsplit(" + ").map(|t| t.strip_suffix(" U").or_else(|| (t == "U").then_some("1")).unwrap_or(t)).collect();
    if terms.len() == 1 {
        if terms[0] == "1" { "U".into() } else { format!("{} U", terms[0]) }
    } else {
        format!("({}) U", terms.join(" + "))
    }
}

/// The map H*(K(Z/2,n)) → H*(MOₙ) induced by the Thom class: ι ↦ U, Sq^I ι ↦ Sq^I U, multiplicative.
#[derive(Clone, Debug)]
pub struct ThomPullback {
    pub n: u32,
    pub source: SpacePresentation,
    pub target: SpacePresentation,
    /// Image of each polynomial generator of the source.
    images: Vec<Poly>,
}

impl ThomPullback {
    /// Highest degree in which the source model is exact.
    #[must_use]
    pub fn limit(&self) -> u32 {
        self.n + 3
    }

    #[must_use]
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for m in &p.0 {
            let mut prod = Poly::one(self.target.ngens());
            for (g, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    prod = self.target.multiply(&prod, &self.images[g]);
                }
            }
            out.add_assign(&prod);
        }
        out.projected(&self.target)
    }

    /// Matrix of the pullback in degree d, columns indexed by the source basis.
    ///
    /// # Errors
    /// Degrees above n + 3.
    pub fn matrix(&self, d: u32) -> Result<BitMatrix, ObstructionError> {
        if d > self.limit() {
            return Err(ObstructionError::DegreeOutOfRange { n: self.n, degree: d, limit: self.limit() });
        }
        let cols: Vec<BitVec> = self.source.basis(d).iter().map(|m| coords(&self.target, &self.apply(&Poly::mono(m.clone())), d)).collect();
        Ok(BitMatrix::from_columns(self.target.basis(d).len(), &cols))
    }

    /// Pulls back a class expression written in the source generators.
    ///
    /// # Errors
    /// Unknown generators, or an expression above degree n + 3.
    pub fn pull(&self, expr: &CohomologyClassExpr) -> Result<Poly, ObstructionError> {
        let value = expr.evaluate(&self.source, &BTreeMap::new())?;
        if let Some(d) = self.source.poly_degree(&value) {
            if d > self.limit() {
                return Err(ObstructionError::DegreeOutOfRange { n: self.n, degree: d, limit: self.limit() });
            }
        }
        Ok(self.apply(&value))
    }
}

fn base_label(n: u32) -> &'static str {
    match n {
        2 => "B",
        3 => "C",
        _ => "D",
    }
}

/// # Errors
/// `n` outside 2..=4.
pub fn pullback_along_thom_class(n: u32) -> Result<ThomPullback, ObstructionError> {
    pullback_with(n, None)
}

/// As [`pullback_along_thom_class`], with a deliberate change to the Wu formula of MOₙ.
///
/// # Errors
/// `n` outside 2..=4.
pub fn pullback_with(n: u32, mutation: Option<&SqMutation>) -> Result<ThomPullback, ObstructionError> {
    if !(2..=4).contains(&n) {
        return Err(ObstructionError::UnsupportedN(n));
    }
    let cutoff = n + 3;
    let source = eilenberg_maclane(n, cutoff, base_label(n))?;
    let mut target = mo(n as usize, cutoff);
    if let Some(m) = mutation {
        m.apply(&mut target)?;
    }
    let mut u = vec![0u16; target.ngens()];
    u[n as usize - 1] = 1;
    let u = Poly::mono(u);
    let mut engine = SqEngine::new(&target);
    let images = source
        .gens
        .iter()
        .map(|g: &Generator| {
            let word = parse_word(&g.label);
            engine.sq_word(&word, &u).projected(&target)
        })
        .collect();
    Ok(ThomPullback { n, source, target, images })
}

/// The Steenrod word in a generator label such as `Sq2Sq1B`.
fn parse_word(label: &str) -> Vec<u32> {
    let mut rest = label;
    let mut word = Vec::new();
    while let Some(after) = rest.strip_prefix("Sq") {
        let digits: String = after.chars().take_while(char::is_ascii_digit).collect();
        word.push(digits.parse().unwrap_or(0));
        rest = &after[digits.len()..];
    }
    word
}

/// ker(Sq¹: H⁵ → H⁶) modulo Im(Sq¹: H⁴ → H⁵) on K(Z/2,2).
#[derive(Clone, Debug)]
pub struct OneFormObstruction {
    pub degree: u32,
    /// Representative of the nonzero element of the quotient.
    pub class: Poly,
    pub label: String,
    pub kernel_dim: usize,
    pub image_dim: usize,
    pub quotient_dim: usize,
    /// Whether the class agrees with Sq²Sq¹B modulo Im Sq¹.
    pub equals_sq2sq1: bool,
    /// Sq¹(Sq²Sq¹B), which must vanish for Sq²Sq¹B to lie in the kernel.
    pub sq1_of_sq2sq1: Poly,
    pub pullback: Poly,
    pub pullback_label: String,
    pub space: SpacePresentation,
}

impl OneFormObstruction {
    /// The representative as a class expression in B.
    #[must_use]
    pub fn expr(&self) -> CohomologyClassExpr {
        let text = self
            .space
            .poly_label_plain(&self.class)
            .rsplit(" + ")
            .map(|t| t.split('*').map(|f| f.replacen('B', " B", 1).trim().to_string()).collect::<Vec<_>>().join("*"))
            .collect::<Vec<_>>()
            .join(" + ");
        CohomologyClassExpr::parse(&text).expect("labels of K(Z/2,2) parse back")
    }
}

/// The mod-2 primary obstruction for a one-form Z/2 symmetry, computed from
/// the model of H*(K(Z/2,2)) through degree 6.
#[must_use]
pub fn primary_obstruction_oneform() -> OneFormObstruction {
    let k = eilenberg_maclane(2, 6, "B").expect("n = 2 is supported");
    let sq1 = sq_matrix(&k, 1, 5);
    let kernel = sq1.kernel_basis();
    let image = sq1_image(&k, 5);
    let mut quotient = image.clone();
    let mut reps = Vec::new();
    for v in &kernel {
        if quotient.insert(v) {
            reps.push(v.clone());
        }
    }
    let class = reps.first().map(|v| from_coords(&k, v, 5)).unwrap_or_default();
    let sq2sq1 = CohomologyClassExpr::parse("Sq2Sq1 B").expect("literal").evaluate(&k, &BTreeMap::new()).expect("B exists");
    let equals_sq2sq1 = !class.is_zero() && in_sq1_image(&k, &class.plus(&sq2sq1), 5);
    let mut engine = SqEngine::new(&k);
    let sq1_of_sq2sq1 = engine.sq(&sq2sq1, 1).projected(&k);
    let thom = pullback_along_thom_class(2).expect("n = 2 is supported");
    let pullback = thom.apply(&class);
    OneFormObstruction {
        degree: 5,
        label: k.poly_label(&class),
        class,
        kernel_dim: kernel.len(),
        image_dim: image.dim(),
        quotient_dim: reps.len(),
        equals_sq2sq1,
        sq1_of_sq2sq1,
        pullback_label: thom_label(&thom.target, &pullback),
        pullback,
        space: k,
    }
}

/// The degree-6 pullback for two-form symmetries on the basis {Sq²Sq¹C, C²}.
#[derive(Clone, Debug)]
pub struct TwoFormVerdict {
    pub classes: Vec<String>,
    pub pullbacks: Vec<String>,
    pub matrix: BitMatrix,
    pub kernel_dim: usize,
    pub injective: bool,
}

#[must_use]
pub fn twoform_degree6_injectivity() -> TwoFormVerdict {
    twoform_degree6_with(None).expect("the unmutated presentation is well formed")
}

/// As [`twoform_degree6_injectivity`] with a mutated Wu formula on MO₃.
/// # Errors
/// A mutation whose term is malformed for MO₃.
pub fn twoform_degree6_with(mutation: Option<&SqMutation>) -> Result<TwoFormVerdict, ObstructionError> {
    let thom = pullback_with(3, mutation)?;
    Ok(injectivity_on(&thom, &["Sq2Sq1 C", "C^2"], 6))
}

/// Injectivity of the pullback on the span of the given classes in degree d.
#[must_use]
pub fn injectivity_on(thom: &ThomPullback, classes: &[&str], d: u32) -> TwoFormVerdict {
    let mut cols = Vec::new();
    let mut pullbacks = Vec::new();
    for c in classes {
        let expr = CohomologyClassExpr::parse(c).expect("class literals parse");
        let p = thom.pull(&expr).expect("classes are in range");
        pullbacks.push(thom_label(&thom.target, &p));
        cols.push(coords(&thom.target, &p, d));
    }
    let matrix = BitMatrix::from_columns(thom.target.basis(d).len(), &cols);
    let kernel_dim = matrix.kernel_basis().len();
    TwoFormVerdict { classes: classes.iter().map(ToString::to_string).collect(), pullbacks, matrix, kernel_dim, injective: kernel_dim == 0 }
}

/// The spin placeholder: the cohomology of S²×S³, F2[B, y]/(B², y²) with all
/// positive squares zero, so v₂ = 0 as for every closed spin 5-manifold.
#[must_use]
pub fn spin_placeholder() -> SpacePresentation {
    SpacePresentation {
        name: "SpinPlaceholder".into(),
        gens: vec![
            Generator { label: "B".into(), degree: 2, nilpotent: Some(2) },
            Generator { label: "y".into(), degree: 3, nilpotent: Some(2) },
        ],
        total_sq: vec![
            vec![Poly::mono(vec![1, 0]), Poly::zero(), Poly::zero()],
            vec![Poly::mono(vec![0, 1]), Poly::zero(), Poly::zero(), Poly::zero()],
        ],
        thom: vec![],
        cutoff: 5,
    }
}

/// Names accepted by [`evaluate_obstruction_on`].
pub const TEST_SPACES: [&str; 2] = ["WuManifold", "SpinPlaceholder"];

fn test_space(name: &str) -> Result<SpacePresentation, ObstructionError> {
    Ok(match name {
        "SpinPlaceholder" => spin_placeholder(),
        other => space(other, 5)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Zero,
    Nonzero,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Zero => "zero",
            Self::Nonzero => "nonzero",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub degree: u32,
    pub value: Poly,
    pub label: String,
    pub verdict: Verdict,
}

/// Evaluates a class on a cataloged manifold and decides vanishing modulo Im Sq¹.
///
/// # Errors
/// Unknown spaces or generators, inhomogeneous classes, degrees above the space's range.
pub fn evaluate_obstruction_on(space_name: &str, expr: &CohomologyClassExpr) -> Result<Evaluation, ObstructionError> {
    evaluate_with(space_name, expr, &BTreeMap::new())
}

/// As [`evaluate_obstruction_on`], substituting classes for generators first.
///
/// # Errors
/// As [`evaluate_obstruction_on`].
pub fn evaluate_with(space_name: &str, expr: &CohomologyClassExpr, env: &BTreeMap<String, Poly>) -> Result<Evaluation, ObstructionError> {
    let s = test_space(space_name)?;
    let value = expr.evaluate(&s, env)?;
    let degree = expression_degree(&s, expr, env)?;
    if degree > s.cutoff {
        return Err(ObstructionError::Space(SpaceError::OutOfRange { degree, limit: s.cutoff }));
    }
    let verdict = if value.is_zero() || in_sq1_image(&s, &value, degree) { Verdict::Zero } else { Verdict::Nonzero };
    Ok(Evaluation { degree, label: s.poly_label(&value), value, verdict })
}

/// Degree of an expression from generator degrees, independent of vanishing.
fn expression_degree(s: &SpacePresentation, expr: &CohomologyClassExpr, env: &BTreeMap<String, Poly>) -> Result<u32, ObstructionError> {
    let mut degree = None;
    for term in &expr.terms {
        let mut d = 0;
        for f in term {
            let base = match env.get(&f.generator) {
                Some(p) => s.poly_degree(p).ok_or(ObstructionError::Inhomogeneous)?,
                None => s.gens[s.generator(&f.generator).ok_or_else(|| ObstructionError::Parse { text: expr.text.clone(), reason: format!("unknown generator {:?}", f.generator) })?].degree,
            };
            d += (base + f.word.iter().sum::<u32>()) * u32::from(f.power);
        }
        if degree.is_some_and(|x| x != d) {
            return Err(ObstructionError::Inhomogeneous);
        }
        degree = Some(d);
    }
    Ok(degree.unwrap_or(0))
}

/// Test spaces carrying some B ∈ H² on which the class in B is nonzero modulo Im Sq¹.
#[must_use]
pub fn nonzero_on(expr: &CohomologyClassExpr) -> Vec<String> {
    let mut out = Vec::new();
    for name in TEST_SPACES {
        let s = test_space(name).expect("test spaces exist");
        let basis = s.basis(2);
        let hit = (1u32..1 << basis.len()).any(|mask| {
            let mut b = Poly::zero();
            for (i, m) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    b.toggle(m.clone());
                }
            }
            let env = BTreeMap::from([("B".to_string(), b)]);
            evaluate_with(name, expr, &env).is_ok_and(|e| e.verdict == Verdict::Nonzero)
        });
        if hit {
            out.push(name.to_string());
        }
    }
    out
}

/// Machine-readable verdict row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionRecord {
    pub degree: u32,
    pub class: String,
    pub pullback: String,
    pub verdict: String,
}

#[must_use]
pub fn oneform_records() -> Vec<ObstructionRecord> {
    let ob = primary_obstruction_oneform();
    let thom = pullback_along_thom_class(2).expect("n = 2 is supported");
    let sq2sq1 = thom.pull(&CohomologyClassExpr::parse("Sq2Sq1 B").expect("literal")).expect("in range");
    let where_nonzero = nonzero_on(&ob.expr());
    vec![
        ObstructionRecord {
            degree: 5,
            class: ob.expr().to_string(),
            pullback: ob.pullback_label.clone(),
            verdict: format!("ker Sq1 / Im Sq1 generator; nonzero on: {}", if where_nonzero.is_empty() { "none".into() } else { where_nonzero.join(",") }),
        },
        ObstructionRecord {
            degree: 5,
            class: "Sq2Sq1 B".into(),
            pullback: thom_label(&thom.target, &sq2sq1),
            verdict: if ob.sq1_of_sq2sq1.is_zero() { "in ker Sq1".into() } else { format!("not in ker Sq1: Sq1 = {}", ob.space.poly_label(&ob.sq1_of_sq2sq1)) },
        },
    ]
}

#[must_use]
pub fn twoform_records() -> Vec<ObstructionRecord> {
    let v = twoform_degree6_injectivity();
    let verdict = if v.injective { "injective: no degree-6 primary obstruction" } else { "not injective" };
    v.classes
        .iter()
        .zip(&v.pullbacks)
        .map(|(c, p)| ObstructionRecord { degree: 6, class: c.clone(), pullback: p.clone(), verdict: verdict.into() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(s: &str) -> CohomologyClassExpr {
        CohomologyClassExpr::parse(s).unwrap()
    }

    #[test]
    fn iota_maps_to_u() {
        let t = pullback_along_thom_class(2).unwrap();
        assert_eq!(thom_label(&t.target, &t.pull(&expr("B")).unwrap()), "U");
    }

    #[test]
    fn sq2sq1_pulls_back_to_w2w1_plus_w1_cubed() {
        for n in [2, 3] {
            let t = pullback_along_thom_class(n).unwrap();
            let base = base_label(n);
            let p = t.pull(&expr(&format!("Sq2Sq1 {base}"))).unwrap();
            assert_eq!(thom_label(&t.target, &p), "(w1 w2 + w1^3) U", "n = {n}");
        }
    }

    #[test]
    fn c_squared_pulls_back_to_w3u() {
        let t = pullback_along_thom_class(3).unwrap();
        assert_eq!(thom_label(&t.target, &t.pull(&expr("C^2")).unwrap()), "w3 U");
        assert_eq!(t.pull(&expr("Sq3 C")).unwrap(), t.pull(&expr("C^2")).unwrap());
    }

    #[test]
    fn refuses_above_n_plus_3() {
        let t = pullback_along_thom_class(2).unwrap();
        assert!(matches!(t.matrix(6), Err(ObstructionError::DegreeOutOfRange { degree: 6, limit: 5, .. })));
        assert!(t.matrix(5).is_ok());
        assert!(matches!(pullback_along_thom_class(1), Err(ObstructionError::UnsupportedN(1))));
    }

    #[test]
    fn expression_parsing() {
        let e = expr("Sq2Sq1 B + B*Sq1 B");
        assert_eq!(e.terms.len(), 2);
        assert_eq!(e.terms[0][0].word, vec![2, 1]);
        assert!(CohomologyClassExpr::parse("Sq B").is_err());
        assert!(CohomologyClassExpr::parse("B + ").is_err());
    }

    #[test]
    fn wu_manifold_squares() {
        let e = evaluate_obstruction_on("WuManifold", &expr("Sq1 z2")).unwrap();
        assert_eq!(e.label, "z3");
        let e = evaluate_obstruction_on("WuManifold", &expr("Sq2Sq1 z2")).unwrap();
        assert_eq!(e.label, "z2 z3");
        assert_eq!(e.verdict, Verdict::Nonzero);
    }

    #[test]
    fn spin_placeholder_kills_sq2sq1() {
        let e = evaluate_obstruction_on("SpinPlaceholder", &expr("Sq2Sq1 B")).unwrap();
        assert_eq!(e.verdict, Verdict::Zero);
    }

    #[test]
    fn evaluation_refuses_out_of_range() {
        assert!(evaluate_obstruction_on("WuManifold", &expr("z3^2")).is_err());
    }

    #[test]
    fn oneform_kernel_class() {
        let ob = primary_obstruction_oneform();
        assert_eq!(ob.kernel_dim, 1);
        assert_eq!(ob.image_dim, 0);
        assert_eq!(ob.quotient_dim, 1);
        let mut engine = SqEngine::new(&ob.space);
        assert!(engine.sq(&ob.class, 1).projected(&ob.space).is_zero());
        assert_eq!(ob.expr().to_string(), "Sq2Sq1 B + B*Sq1 B");
    }

    #[test]
    fn twoform_injective_and_sensitive() {
        assert!(twoform_degree6_injectivity().injective);
        let corrupt = SqMutation { generator: "w3".into(), square: 1, term: "w1*w3".into() };
        assert!(!twoform_degree6_with(Some(&corrupt)).unwrap().injective);
    }
}
