//! Finitely generated abelian 2-local groups: Z^r ⊕ Z/2^{k₁} ⊕ ….

use std::fmt;
use std::str::FromStr;

/// Free rank plus torsion exponents, sorted descending (`3` means Z/8).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<u32>,
}

impl AbelianGroup {
    #[must_use]
    pub fn zero() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn new(free_rank: usize, mut torsion: Vec<u32>) -> Self {
        torsion.retain(|&k| k > 0);
        torsion.sort_unstable_by(|a, b| b.cmp(a));
        Self { free_rank, torsion }
    }

    #[must_use]
    pub fn free(rank: usize) -> Self {
        Self::new(rank, vec![])
    }

    /// Z/2^k.
    #[must_use]
    pub fn cyclic(k: u32) -> Self {
        Self::new(0, vec![k])
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    #[must_use]
    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// log₂ of the order of a finite group.
    #[must_use]
    pub fn log_order(&self) -> Option<u32> {
        self.is_finite().then(|| self.torsion.iter().sum())
    }

    /// Number of cyclic summands of the 2-torsion-and-free part mod 2.
    #[must_use]
    pub fn rank_mod_2(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    #[must_use]
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut t = self.torsion.clone();
        t.extend(&other.torsion);
        Self::new(self.free_rank + other.free_rank, t)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let k = self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|&&x| x == k).count();
            let order = 1u64 << k;
            parts.push(if run == 1 { format!("Z/{order}") } else { format!("(Z/{order})^{run}") });
            i += run;
        }
        write!(f, "{}", parts.join("+"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse group {0:?}")]
pub struct GroupParseError(pub String);

impl FromStr for AbelianGroup {
    type Err = GroupParseError;

    /// Accepts `0`, `Z`, `Z^2`, `Z/8`, `(Z/2)^3`, `Z2` and sums joined by `+` or `⊕`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GroupParseError(s.to_string());
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut g = Self::zero();
        for part in s.split(['+', '⊕']) {
            let part: String = part.chars().filter(|c| !c.is_whitespace()).collect();
            let (base, mult) = match part.rsplit_once('^') {
                Some((b, m)) if !b.is_empty() => (b.trim_matches(|c| c == '(' || c == ')').to_string(), m.parse::<usize>().map_err(|_| err())?),
                _ => (part.clone(), 1),
            };
            let base = base.replace('²', "").to_string();
            let mult = if part.ends_with('²') { 2 } else { mult };
            if base == "Z" {
                g.free_rank += mult;
            } else if let Some(order) = base.strip_prefix("Z/") {
                let order: u64 = order.parse().map_err(|_| err())?;
                if !order.is_power_of_two() || order < 2 {
                    return Err(err());
                }
                g = g.direct_sum(&Self::new(0, vec![order.trailing_zeros(); mult]));
            } else {
                return Err(err());
            }
        }
        Ok(Self::new(g.free_rank, g.torsion))
    }
}

/// Largest order (as a power of two) for which subgroups are enumerated.
pub const MAX_ENUM_LOG_ORDER: u32 = 8;

impl AbelianGroup {
    /// The torsion subgroup.
    #[must_use]
    pub fn torsion_part(&self) -> Self {
        Self::new(0, self.torsion.clone())
    }

    /// Exponent as a power of two; `None` when there is a free summand.
    #[must_use]
    pub fn exponent(&self) -> Option<u32> {
        self.is_finite().then(|| self.torsion.first().copied().unwrap_or(0))
    }

    /// Whether this finite group is isomorphic to a subgroup (equivalently a
    /// quotient) of the finite group `other`.
    #[must_use]
    pub fn embeds_in(&self, other: &Self) -> bool {
        self.is_finite()
            && other.is_finite()
            && self.torsion.len() <= other.torsion.len()
            && self.torsion.iter().zip(&other.torsion).all(|(a, b)| a <= b)
    }

    /// Whether this group is a quotient of `other`. Free summands of `other`
    /// surject onto the largest cyclic summands of the quotient.
    #[must_use]
    pub fn is_quotient_of(&self, other: &Self) -> bool {
        if self.free_rank > other.free_rank {
            return false;
        }
        let spare = other.free_rank - self.free_rank;
        let rest = Self::new(0, self.torsion.iter().skip(spare).copied().collect());
        rest.embeds_in(&other.torsion_part())
    }
}

/// All groups of order 2^n.
#[must_use]
pub fn groups_of_log_order(n: u32) -> Vec<AbelianGroup> {
    fn partitions(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<AbelianGroup>) {
        if n == 0 {
            out.push(AbelianGroup::new(0, prefix.clone()));
            return;
        }
        for k in (1..=max.min(n)).rev() {
            prefix.push(k);
            partitions(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    partitions(n, n, &mut Vec::new(), &mut out);
    out
}

/// Explicit model of a finite group Z/2^{k₁} ⊕ … for brute-force enumeration.
struct Elements {
    moduli: Vec<u64>,
    order: usize,
}

impl Elements {
    fn new(g: &AbelianGroup) -> Self {
        let moduli: Vec<u64> = g.torsion.iter().map(|&k| 1u64 << k).collect();
        let order = moduli.iter().product::<u64>() as usize;
        Self { moduli, order }
    }

    fn add(&self, x: usize, y: usize) -> usize {
        let (mut x, mut y, mut out, mut place) = (x as u64, y as u64, 0u64, 1u64);
        for &m in &self.moduli {
            out += ((x % m + y % m) % m) * place;
            x /= m;
            y /= m;
            place *= m;
        }
        out as usize
    }

    fn times_power_of_two(&self, x: usize, j: u32) -> usize {
        let (mut x, mut out, mut place) = (x as u64, 0u64, 1u64);
        for &m in &self.moduli {
            out += (((x % m) << j) % m) * place;
            x /= m;
            place *= m;
        }
        out as usize
    }

    /// The type of a group from the sizes |G[2^j]| for j = 0, 1, ….
    fn type_from_counts(counts: &[usize]) -> AbelianGroup {
        let logs: Vec<u32> = counts.iter().map(|c| c.trailing_zeros()).collect();
        let mut parts = Vec::new();
        let at_least: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        for (j, w) in at_least.windows(2).enumerate() {
            parts.extend(std::iter::repeat_n((j + 1) as u32, (w[0] - w[1]) as usize));
        }
        if let Some(&last) = at_least.last() {
            parts.extend(std::iter::repeat_n(at_least.len() as u32, last as usize));
        }
        AbelianGroup::new(0, parts)
    }
}

/// Every (subgroup type, quotient type) pair realised inside a finite group,
/// or `None` when the group is infinite or too large to enumerate.
#[must_use]
pub fn subgroup_pairs(g: &AbelianGroup) -> Option<std::collections::BTreeSet<(AbelianGroup, AbelianGroup)>> {
    use std::collections::{BTreeSet, HashSet};
    if !g.is_finite() || g.log_order()? > MAX_ENUM_LOG_ORDER {
        return None;
    }
    let el = Elements::new(g);
    let depth = g.exponent().unwrap_or(0) + 1;
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut queue = vec![{
        let mut z = vec![false; el.order];
        z[0] = true;
        z
    }];
    let mut pairs = BTreeSet::new();
    while let Some(sub) = queue.pop() {
        if !seen.insert(sub.clone()) {
            continue;
        }
        let size = sub.iter().filter(|&&b| b).count();
        let mut sub_counts = Vec::new();
        let mut quo_counts = Vec::new();
        for j in 0..=depth {
            sub_counts.push((0..el.order).filter(|&x| sub[x] && el.times_power_of_two(x, j) == 0).count());
            quo_counts.push((0..el.order).filter(|&x| sub[el.times_power_of_two(x, j)]).count() / size);
        }
        pairs.insert((Elements::type_from_counts(&sub_counts), Elements::type_from_counts(&quo_counts)));
        for x in 0..el.order {
            if sub[x] {
                continue;
            }
            let mut next = sub.clone();
            let members: Vec<usize> = (0..el.order).filter(|&y| sub[y]).collect();
            let mut multiple = x;
            while !next[multiple] {
                for &y in &members {
                    next[el.add(y, multiple)] = true;
                }
                multiple = el.add(multiple, x);
            }
            if !seen.contains(&next) {
                queue.push(next);
            }
        }
    }
    Some(pairs)
}

/// Isomorphism types of subgroups: Z^a ⊕ F with a ≤ rank and F a subgroup of the torsion.
#[must_use]
pub fn subgroup_types(g: &AbelianGroup) -> Option<std::collections::BTreeSet<AbelianGroup>> {
    let pairs = subgroup_pairs(&g.torsion_part())?;
    let mut out = std::collections::BTreeSet::new();
    for a in 0..=g.free_rank {
        for (sub, _) in &pairs {
            out.insert(AbelianGroup::new(a, sub.torsion.clone()));
        }
    }
    Some(out)
}

/// Isomorphism types of quotients of a finite group.
#[must_use]
pub fn quotient_types(g: &AbelianGroup) -> Option<std::collections::BTreeSet<AbelianGroup>> {
    if !g.is_finite() {
        return None;
    }
    Some(subgroup_pairs(g)?.into_iter().map(|(_, q)| q).collect())
}

/// Groups X with a subgroup of type `sub` and quotient of type `quot`, when
/// that set is computable: `quot` free (the extension splits) or both finite.
#[must_use]
pub fn extensions(sub: &AbelianGroup, quot: &AbelianGroup) -> Option<Vec<AbelianGroup>> {
    if quot.torsion.is_empty() {
        return Some(vec![sub.direct_sum(quot)]);
    }
    if !sub.is_finite() || !quot.is_finite() {
        return None;
    }
    let n = sub.log_order()? + quot.log_order()?;
    if n > MAX_ENUM_LOG_ORDER {
        return None;
    }
    Some(
        groups_of_log_order(n)
            .into_iter()
            .filter(|x| sub.embeds_in(x) && subgroup_pairs(x).is_some_and(|p| p.contains(&(sub.clone(), quot.clone()))))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(AbelianGroup::zero().to_string(), "0");
        assert_eq!(AbelianGroup::free(2).to_string(), "Z^2");
        assert_eq!(AbelianGroup::new(1, vec![3]).to_string(), "Z+Z/8");
        assert_eq!(AbelianGroup::new(0, vec![1, 1, 1]).to_string(), "(Z/2)^3");
        assert_eq!(AbelianGroup::new(0, vec![1, 2, 1]).to_string(), "Z/4+(Z/2)^2");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "Z", "Z^2", "Z/2", "(Z/2)^4", "Z/8+Z/2", "Z+Z/16", "Z/4+(Z/2)^2"] {
            assert_eq!(s.parse::<AbelianGroup>().unwrap().to_string(), s);
        }
        assert_eq!("Z ⊕ Z/8".parse::<AbelianGroup>().unwrap(), AbelianGroup::new(1, vec![3]));
        assert_eq!("Z²".parse::<AbelianGroup>().unwrap(), AbelianGroup::free(2));
        assert!("Z/6".parse::<AbelianGroup>().is_err());
        assert!("Q".parse::<AbelianGroup>().is_err());
    }

    fn g(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn subgroups_of_z4() {
        let pairs = subgroup_pairs(&g("Z/4")).unwrap();
        let expected: std::collections::BTreeSet<_> =
            [("0", "Z/4"), ("Z/2", "Z/2"), ("Z/4", "0")].iter().map(|(a, b)| (g(a), g(b))).collect();
        assert_eq!(pairs, expected);
    }

    #[test]
    fn quotients_of_z8_z2() {
        let q = quotient_types(&g("Z/8+Z/2")).unwrap();
        for s in ["0", "Z/2", "(Z/2)^2", "Z/4", "Z/4+Z/2", "Z/8", "Z/8+Z/2"] {
            assert!(q.contains(&g(s)), "{s}");
        }
        assert!(!q.contains(&g("(Z/2)^3")));
    }

    #[test]
    fn extensions_of_z2_by_z2() {
        assert_eq!(extensions(&g("Z/2"), &g("Z/2")).unwrap(), vec![g("Z/4"), g("(Z/2)^2")]);
        assert_eq!(extensions(&g("Z/2"), &g("Z")).unwrap(), vec![g("Z+Z/2")]);
        assert!(extensions(&g("Z"), &g("Z/2")).is_none());
    }

    #[test]
    fn quotient_of_free() {
        assert!(g("Z/8").is_quotient_of(&g("Z")));
        assert!(!g("(Z/2)^2").is_quotient_of(&g("Z")));
        assert!(g("Z+Z/8").is_quotient_of(&g("Z^2")));
        assert!(groups_of_log_order(4).len() == 5);
    }
}
