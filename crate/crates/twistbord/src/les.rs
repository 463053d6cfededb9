//! Constraint propagation along long exact sequences of abelian 2-groups.
//!
//! The unknowns are the images of the maps. At a known slot X with incoming
//! image H and outgoing image H', exactness says H ≤ X with X/H ≅ H'; at an
//! unknown slot it says the slot is an extension of H' by H. Candidate sets of
//! isomorphism types are intersected until nothing changes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::groups::{extensions, quotient_types, subgroup_pairs, subgroup_types, AbelianGroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlotValue {
    Known(AbelianGroup),
    /// `exponent` bounds 2^e·x = 0 for every element, when given.
    Unknown { exponent: Option<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub degree: i32,
    pub column: String,
    pub value: SlotValue,
}

impl Slot {
    #[must_use]
    pub fn label(&self) -> String {
        format!("{} {}", self.degree, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    Zero,
    Injective,
    Surjective,
    Iso,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Zero => "zero",
            Self::Injective => "injective",
            Self::Surjective => "surjective",
            Self::Iso => "iso",
        })
    }
}

/// Slots in sequence order; `maps[i]` annotates the map from slot i to slot i+1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LesProblem {
    pub slots: Vec<Slot>,
    pub maps: BTreeMap<usize, MapKind>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LesError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("a sequence needs at least 3 slots, found {0}")]
    TooShort(usize),
}

impl LesProblem {
    #[must_use]
    pub fn new() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn known(mut self, degree: i32, column: &str, g: AbelianGroup) -> Self {
        self.slots.push(Slot { degree, column: column.into(), value: SlotValue::Known(g) });
        self
    }

    #[must_use]
    pub fn unknown(mut self, degree: i32, column: &str) -> Self {
        self.slots.push(Slot { degree, column: column.into(), value: SlotValue::Unknown { exponent: None } });
        self
    }

    /// Annotates the map out of the most recently added slot.
    #[must_use]
    pub fn then(mut self, kind: MapKind) -> Self {
        self.maps.insert(self.slots.len() - 1, kind);
        self
    }

    #[must_use]
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.slots {
            let v = match &s.value {
                SlotValue::Known(g) => g.to_string(),
                SlotValue::Unknown { exponent: None } => "?".into(),
                SlotValue::Unknown { exponent: Some(e) } => format!("? exp {}", 1u64 << e),
            };
            out.push_str(&format!("{} {} = {v}\n", s.degree, s.column));
        }
        for (i, k) in &self.maps {
            out.push_str(&format!("MAP {}->{} = {k}\n", i, i + 1));
        }
        out
    }
}

/// Reads the text format: slot lines `<degree> <column> = <group|?>` (an
/// unknown may carry `exp 2^k`), map lines `MAP <i>-><i+1> = zero|injective|surjective|iso`,
/// `#` comments.
///
/// # Errors
/// Malformed lines, non-adjacent maps, or fewer than three slots.
pub fn parse_les(text: &str) -> Result<LesProblem, LesError> {
    let mut p = LesProblem::new();
    let mut pending = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let err = |message: String| LesError::Parse { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (lhs, rhs) = body.split_once('=').ok_or_else(|| err("expected '='".into()))?;
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if let Some(arrow) = lhs.strip_prefix("MAP") {
            let (a, b) = arrow.trim().split_once("->").ok_or_else(|| err("expected MAP i->i+1".into()))?;
            let a: usize = a.trim().parse().map_err(|_| err(format!("bad slot index {a:?}")))?;
            let b: usize = b.trim().parse().map_err(|_| err(format!("bad slot index {b:?}")))?;
            if b != a + 1 {
                return Err(err(format!("map {a}->{b} does not join adjacent slots")));
            }
            let kind = match rhs {
                "zero" => MapKind::Zero,
                "injective" => MapKind::Injective,
                "surjective" => MapKind::Surjective,
                "iso" => MapKind::Iso,
                other => return Err(err(format!("unknown map kind {other:?}"))),
            };
            pending.push((line, a, kind));
            continue;
        }
        let mut words = lhs.split_whitespace();
        let degree: i32 = words.next().and_then(|w| w.parse().ok()).ok_or_else(|| err("expected a degree".into()))?;
        let column = words.collect::<Vec<_>>().join(" ");
        if column.is_empty() {
            return Err(err("expected a column name".into()));
        }
        let value = if let Some(rest) = rhs.strip_prefix('?') {
            let rest = rest.trim();
            let exponent = if rest.is_empty() {
                None
            } else {
                let order: u64 = rest.strip_prefix("exp").map(str::trim).and_then(|o| o.parse().ok()).ok_or_else(|| err(format!("bad unknown annotation {rest:?}")))?;
                if !order.is_power_of_two() {
                    return Err(err(format!("exponent {order} is not a power of 2")));
                }
                Some(order.trailing_zeros())
            };
            SlotValue::Unknown { exponent }
        } else {
            SlotValue::Known(rhs.parse().map_err(|e| err(format!("{e}")))?)
        };
        p.slots.push(Slot { degree, column, value });
    }
    if p.slots.len() < 3 {
        return Err(LesError::TooShort(p.slots.len()));
    }
    for (line, a, kind) in pending {
        if a + 1 >= p.slots.len() {
            return Err(LesError::Parse { line, message: format!("map {a}->{} leaves the sequence", a + 1) });
        }
        p.maps.insert(a, kind);
    }
    Ok(p)
}

/// Candidate isomorphism types of an image; `Any` means unconstrained.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Images {
    Any,
    Set(BTreeSet<AbelianGroup>),
}

impl Images {
    fn meet(&mut self, other: BTreeSet<AbelianGroup>) {
        *self = Self::Set(match self {
            Self::Any => other,
            Self::Set(s) => s.intersection(&other).cloned().collect(),
        });
    }

    fn retain(&mut self, f: impl Fn(&AbelianGroup) -> bool) {
        if let Self::Set(s) = self {
            s.retain(|g| f(g));
        }
    }

    fn is_empty(&self) -> bool {
        matches!(self, Self::Set(s) if s.is_empty())
    }
}

fn is_subgroup_type(h: &AbelianGroup, x: &AbelianGroup) -> bool {
    h.free_rank <= x.free_rank && h.torsion_part().embeds_in(&x.torsion_part())
}

/// Whether X has a subgroup of type h with quotient of type q. Exact for
/// enumerable finite groups and for finite h; a necessary condition otherwise.
fn valid_pair(x: &AbelianGroup, h: &AbelianGroup, q: &AbelianGroup) -> bool {
    if h.free_rank + q.free_rank != x.free_rank || !is_subgroup_type(h, x) || !q.is_quotient_of(x) {
        return false;
    }
    if h.free_rank == 0 {
        if q.free_rank != x.free_rank {
            return false;
        }
        if let Some(pairs) = subgroup_pairs(&x.torsion_part()) {
            return pairs.contains(&(h.clone(), q.torsion_part()));
        }
        return h.log_order().unwrap_or(0) + q.torsion_part().log_order().unwrap_or(0) == x.torsion_part().log_order().unwrap_or(0);
    }
    true
}

fn within_exponent(g: &AbelianGroup, e: Option<u32>) -> bool {
    e.is_none_or(|e| g.exponent().is_some_and(|x| x <= e))
}

/// What exactness implies about one unknown slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub slot: usize,
    /// Every isomorphism type compatible with exactness, when that list is computable.
    pub candidates: Option<Vec<AbelianGroup>>,
    pub rank: (usize, Option<usize>),
    /// Bounds on log₂ of the order, present when the group is known to be finite.
    pub log_order: Option<(u32, Option<u32>)>,
    pub nonzero: bool,
}

impl Constraint {
    /// The group, when exactness pins it down.
    #[must_use]
    pub fn determined(&self) -> Option<&AbelianGroup> {
        match &self.candidates {
            Some(c) if c.len() == 1 => c.first(),
            _ => None,
        }
    }

    #[must_use]
    pub fn order_bounds(&self) -> Option<(u64, Option<u64>)> {
        self.log_order.map(|(lo, hi)| (1u64 << lo, hi.map(|h| 1u64 << h)))
    }

    /// One-line summary: a group, an order with candidates, bounds, or `?`.
    #[must_use]
    pub fn describe(&self) -> String {
        if let Some(g) = self.determined() {
            return g.to_string();
        }
        let list = |c: &[AbelianGroup]| c.iter().map(ToString::to_string).collect::<Vec<_>>().join(" | ");
        match (self.order_bounds(), &self.candidates) {
            (Some((lo, Some(hi))), Some(c)) if lo == hi => format!("order {lo}: {}", list(c)),
            (Some((lo, Some(hi))), _) => format!("order >= {lo}, <= {hi}"),
            (Some((lo, None)), _) if lo > 1 => format!("order >= {lo}"),
            _ => {
                let mut parts = Vec::new();
                if let Some(c) = &self.candidates {
                    parts.push(list(c));
                }
                match self.rank {
                    (0, Some(0)) | (0, None) => {}
                    (lo, Some(hi)) if lo == hi => parts.push(format!("rank {lo}")),
                    (lo, hi) => parts.push(format!("rank >= {lo}{}", hi.map(|h| format!(", <= {h}")).unwrap_or_default())),
                }
                if self.nonzero && self.candidates.is_none() {
                    parts.push("nonzero".into());
                }
                if parts.is_empty() {
                    "?".into()
                } else {
                    parts.join("; ")
                }
            }
        }
    }
}

/// Exactness fails at the middle slot of `triple`.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("exactness fails at {} -> {} -> {}: {reason}", labels.0, labels.1, labels.2)]
pub struct Contradiction {
    pub triple: (usize, usize, usize),
    pub labels: (String, String, String),
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesSolution {
    pub constraints: Vec<Constraint>,
    /// Map kinds forced by exactness on top of the given annotations.
    pub maps: BTreeMap<usize, MapKind>,
}

impl LesSolution {
    #[must_use]
    pub fn get(&self, slot: usize) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.slot == slot)
    }

    /// Text in the input format, unknowns replaced by their constraints.
    #[must_use]
    pub fn render(&self, p: &LesProblem) -> String {
        let mut out = String::new();
        for (i, s) in p.slots.iter().enumerate() {
            let v = match (&s.value, self.get(i)) {
                (SlotValue::Known(g), _) => g.to_string(),
                (_, Some(c)) => c.describe(),
                _ => "?".into(),
            };
            out.push_str(&format!("{} {} = {v}\n", s.degree, s.column));
        }
        for (i, k) in &self.maps {
            out.push_str(&format!("MAP {}->{} = {k}\n", i, i + 1));
        }
        out
    }
}

struct Solver<'a> {
    p: &'a LesProblem,
    images: Vec<Images>,
}

impl<'a> Solver<'a> {
    fn new(p: &'a LesProblem) -> Self {
        let n = p.slots.len();
        let mut images = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let mut im = Images::Any;
            match &p.slots[i + 1].value {
                SlotValue::Known(t) => {
                    if let Some(s) = subgroup_types(t) {
                        im.meet(s);
                    }
                }
                SlotValue::Unknown { exponent } => {
                    let e = *exponent;
                    im.retain(|g| within_exponent(g, e));
                }
            }
            match &p.slots[i].value {
                SlotValue::Known(s) => {
                    if let Some(q) = quotient_types(s).filter(|_| matches!(im, Images::Any)) {
                        im.meet(q);
                    }
                    im.retain(|g| g.is_quotient_of(s));
                }
                SlotValue::Unknown { exponent } => {
                    let e = *exponent;
                    im.retain(|g| within_exponent(g, e));
                }
            }
            images.push(im);
        }
        let mut s = Self { p, images };
        for (&i, &kind) in &p.maps {
            let zero = BTreeSet::from([AbelianGroup::zero()]);
            if matches!(kind, MapKind::Zero) {
                s.images[i].meet(zero.clone());
            }
            if matches!(kind, MapKind::Injective | MapKind::Iso) {
                if i > 0 {
                    s.images[i - 1].meet(zero.clone());
                }
                if let SlotValue::Known(g) = &p.slots[i].value {
                    s.images[i].meet(BTreeSet::from([g.clone()]));
                }
            }
            if matches!(kind, MapKind::Surjective | MapKind::Iso) {
                if i + 1 < s.images.len() {
                    s.images[i + 1].meet(zero.clone());
                }
                if let SlotValue::Known(g) = &p.slots[i + 1].value {
                    s.images[i].meet(BTreeSet::from([g.clone()]));
                }
            }
        }
        s
    }

    fn incoming(&self, j: usize) -> &Images {
        if j == 0 { &Images::Any } else { &self.images[j - 1] }
    }

    fn outgoing(&self, j: usize) -> &Images {
        self.images.get(j).unwrap_or(&Images::Any)
    }

    fn contradiction(&self, j: usize, reason: String) -> Contradiction {
        let n = self.p.slots.len();
        let mid = j.clamp(1, n - 2);
        let label = |k: usize| self.p.slots[k].label();
        Contradiction { triple: (mid - 1, mid, mid + 1), labels: (label(mid - 1), label(mid), label(mid + 1)), reason }
    }

    /// New (incoming, outgoing) candidates at a known slot.
    fn narrow_known(&self, x: &AbelianGroup, inc: &Images, out: &Images) -> (Images, Images) {
        let mut new_in = inc.clone();
        let mut new_out = out.clone();
        match (inc, out) {
            (Images::Set(a), Images::Set(b)) => {
                new_in = Images::Set(a.iter().filter(|h| b.iter().any(|q| valid_pair(x, h, q))).cloned().collect());
                new_out = Images::Set(b.iter().filter(|q| a.iter().any(|h| valid_pair(x, h, q))).cloned().collect());
            }
            (Images::Any, Images::Set(b)) => {
                new_out.retain(|q| q.is_quotient_of(x));
                if let Some(subs) = subgroup_types(x) {
                    new_in = Images::Set(subs.into_iter().filter(|h| b.iter().any(|q| valid_pair(x, h, q))).collect());
                }
            }
            (Images::Set(a), Images::Any) => {
                new_in.retain(|h| is_subgroup_type(h, x));
                if a.iter().all(AbelianGroup::is_finite) {
                    if let Some(pairs) = subgroup_pairs(&x.torsion_part()) {
                        new_out = Images::Set(
                            pairs
                                .into_iter()
                                .filter(|(h, _)| a.contains(h))
                                .map(|(_, q)| AbelianGroup::new(x.free_rank, q.torsion))
                                .collect(),
                        );
                    }
                }
            }
            (Images::Any, Images::Any) => {}
        }
        (new_in, new_out)
    }

    fn run(&mut self) -> Result<(), Contradiction> {
        let n = self.p.slots.len();
        loop {
            let before = self.images.clone();
            for j in 0..n {
                let (inc, out) = (self.incoming(j).clone(), self.outgoing(j).clone());
                let (new_in, new_out) = match &self.p.slots[j].value {
                    SlotValue::Known(x) => self.narrow_known(x, &inc, &out),
                    SlotValue::Unknown { exponent } => {
                        let (mut a, mut b) = (inc, out);
                        a.retain(|g| within_exponent(g, *exponent));
                        b.retain(|g| within_exponent(g, *exponent));
                        (a, b)
                    }
                };
                if j > 0 {
                    self.images[j - 1] = new_in;
                }
                if j + 1 < n {
                    self.images[j] = new_out;
                }
                let empty_in = j > 0 && self.images[j - 1].is_empty();
                let empty_out = j + 1 < n && self.images[j].is_empty();
                if empty_in || empty_out {
                    let what = match &self.p.slots[j].value {
                        SlotValue::Known(x) => format!("no subgroup of {x} fits both neighbouring maps"),
                        SlotValue::Unknown { .. } => "the exponent bound excludes every possible image".to_string(),
                    };
                    return Err(self.contradiction(j, what));
                }
            }
            if self.images == before {
                return Ok(());
            }
        }
    }

    fn constraint(&self, j: usize, exponent: Option<u32>) -> Constraint {
        let (inc, out) = (self.incoming(j), self.outgoing(j));
        let mut c = Constraint { slot: j, candidates: None, rank: (0, None), log_order: None, nonzero: false };
        if exponent.is_some() {
            c.rank = (0, Some(0));
        }
        match (inc, out) {
            (Images::Set(a), Images::Set(b)) => {
                let mut all = BTreeSet::new();
                let mut complete = true;
                for h in a {
                    for q in b {
                        match extensions(h, q) {
                            Some(list) => all.extend(list.into_iter().filter(|g| within_exponent(g, exponent))),
                            None => complete = false,
                        }
                    }
                }
                let pairs: Vec<(&AbelianGroup, &AbelianGroup)> = a.iter().flat_map(|h| b.iter().map(move |q| (h, q))).collect();
                let rank = |(h, q): &(&AbelianGroup, &AbelianGroup)| h.free_rank + q.free_rank;
                c.rank = (pairs.iter().map(rank).min().unwrap_or(0), pairs.iter().map(rank).max());
                c.nonzero = pairs.iter().all(|(h, q)| !h.is_zero() || !q.is_zero());
                if pairs.iter().all(|(h, q)| h.is_finite() && q.is_finite()) {
                    let lo = pairs.iter().map(|(h, q)| h.log_order().unwrap_or(0) + q.log_order().unwrap_or(0));
                    c.log_order = Some((lo.clone().min().unwrap_or(0), lo.max()));
                }
                if complete {
                    let mut list: Vec<AbelianGroup> = all.into_iter().collect();
                    list.sort_by_key(|g| (g.free_rank, g.log_order(), std::cmp::Reverse(g.torsion.clone())));
                    if list.iter().all(AbelianGroup::is_finite) {
                        let orders = list.iter().filter_map(AbelianGroup::log_order);
                        c.log_order = Some((orders.clone().min().unwrap_or(0), orders.max()));
                    }
                    c.nonzero = !list.iter().any(AbelianGroup::is_zero);
                    c.candidates = Some(list);
                }
            }
            (Images::Set(s), Images::Any) | (Images::Any, Images::Set(s)) => {
                c.rank.0 = s.iter().map(|g| g.free_rank).min().unwrap_or(0);
                c.nonzero = s.iter().all(|g| !g.is_zero());
                if exponent.is_some() {
                    c.log_order = Some((s.iter().filter_map(AbelianGroup::log_order).min().unwrap_or(0), None));
                }
            }
            (Images::Any, Images::Any) => {}
        }
        c
    }

    /// Map kinds read off the final image sets.
    fn forced_maps(&self) -> BTreeMap<usize, MapKind> {
        let mut out = self.p.maps.clone();
        let zero = |im: &Images| matches!(im, Images::Set(s) if s.len() == 1 && s.contains(&AbelianGroup::zero()));
        for i in 0..self.images.len() {
            if out.contains_key(&i) {
                continue;
            }
            let whole = |k: usize| match (&self.images[i], &self.p.slots[k].value) {
                (Images::Set(s), SlotValue::Known(g)) => g.is_finite() && s.len() == 1 && s.contains(g),
                _ => false,
            };
            let injective = (i > 0 && zero(&self.images[i - 1])) || whole(i);
            let surjective = (i + 1 < self.images.len() && zero(&self.images[i + 1])) || whole(i + 1);
            let kind = if zero(&self.images[i]) {
                Some(MapKind::Zero)
            } else {
                match (injective, surjective) {
                    (true, true) => Some(MapKind::Iso),
                    (true, false) => Some(MapKind::Injective),
                    (false, true) => Some(MapKind::Surjective),
                    (false, false) => None,
                }
            };
            if let Some(k) = kind {
                out.insert(i, k);
            }
        }
        out
    }
}

/// Propagates exactness and reports what it implies about every unknown slot.
///
/// # Errors
/// A contradiction naming the triple where exactness cannot hold.
pub fn solve_les(p: &LesProblem) -> Result<LesSolution, Contradiction> {
    assert!(p.slots.len() >= 3, "a sequence needs at least 3 slots");
    let mut solver = Solver::new(p);
    if let Some(j) = solver.images.iter().position(|im| im.is_empty()) {
        return Err(solver.contradiction(j + 1, "the map annotations admit no image".into()));
    }
    solver.run()?;
    let constraints = p
        .slots
        .iter()
        .enumerate()
        .filter_map(|(j, s)| match s.value {
            SlotValue::Unknown { exponent } => Some(solver.constraint(j, exponent)),
            SlotValue::Known(_) => None,
        })
        .collect();
    Ok(LesSolution { constraints, maps: solver.forced_maps() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn zero_flanked_unknown_vanishes() {
        let p = LesProblem::new().known(0, "a", g("0")).unknown(0, "x").known(0, "b", g("0"));
        let s = solve_les(&p).unwrap();
        assert_eq!(s.get(1).unwrap().determined(), Some(&g("0")));
    }

    #[test]
    fn short_exact_unknown_lists_extensions() {
        let p = LesProblem::new().known(0, "z", g("0")).known(0, "a", g("Z/2")).unknown(0, "x").known(0, "b", g("Z/2")).known(0, "z", g("0"));
        let c = solve_les(&p).unwrap().get(2).unwrap().clone();
        assert_eq!(c.candidates, Some(vec![g("Z/4"), g("(Z/2)^2")]));
        assert_eq!(c.describe(), "order 4: Z/4 | (Z/2)^2");
    }

    #[test]
    fn finite_onto_free_is_a_contradiction() {
        let p = LesProblem::new().known(0, "a", g("Z/2")).known(0, "b", g("Z")).known(0, "c", g("0"));
        let err = solve_les(&p).unwrap_err();
        assert_eq!(err.triple, (0, 1, 2));
        assert!(err.to_string().contains("0 b"));
    }

    #[test]
    fn parse_round_trip() {
        let text = "0 pi = ?\n0 Omega = Z+Z/2\n-2 T = ? exp 2\nMAP 0->1 = surjective\n";
        let p = parse_les(text).unwrap();
        assert_eq!(p.slots[2].value, SlotValue::Unknown { exponent: Some(1) });
        assert_eq!(parse_les(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_les("0 a = Z\n0 b = Z\n"), Err(LesError::TooShort(2))));
        assert!(matches!(parse_les("0 a = Z\n0 b = Z\n0 c = Z\nMAP 0->2 = iso\n"), Err(LesError::Parse { line: 4, .. })));
        assert!(matches!(parse_les("0 a = Q\n"), Err(LesError::Parse { line: 1, .. })));
    }

    #[test]
    fn injective_into_known_forces_zero_before() {
        let p = LesProblem::new().unknown(0, "u").known(0, "a", g("Z/2")).then(MapKind::Injective).known(0, "b", g("Z/4")).known(0, "c", g("Z/2"));
        let s = solve_les(&p).unwrap();
        assert_eq!(s.maps.get(&2), Some(&MapKind::Surjective));
    }
}
