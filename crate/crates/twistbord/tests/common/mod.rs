//! Test-side oracles. Nothing here calls the library's A(1), linear algebra
//! or resolution code: A(1) is rebuilt from the rewriting rules
//! Sq1Sq1 = 0, Sq2Sq2 = Sq1Sq2Sq1, Sq2Sq1Sq2Sq1 = Sq1Sq2Sq1Sq2, and elimination
//! works on plain byte rows.

#![allow(dead_code)]

use std::collections::BTreeMap;

use twistbord::module::GradedA1Module;

pub mod props;

/// Admissible words of A(1), each a string over {1, 2} read left to right as
/// composition (the rightmost square acts first).
pub const WORDS: [&str; 8] = ["", "1", "2", "12", "21", "121", "212", "1212"];

pub fn word_degree(w: &str) -> i32 {
    w.bytes().map(|b| i32::from(b - b'0')).sum()
}

/// Normal form of a word as a set of basis words (mod 2).
pub fn reduce(word: &str) -> Vec<&'static str> {
    let mut pending = vec![word.to_string()];
    let mut out: BTreeMap<&'static str, bool> = BTreeMap::new();
    while let Some(w) = pending.pop() {
        if w.contains("11") {
            continue;
        }
        if let Some(i) = w.find("22") {
            pending.push(format!("{}121{}", &w[..i], &w[i + 2..]));
            continue;
        }
        if let Some(i) = w.find("2121") {
            pending.push(format!("{}1212{}", &w[..i], &w[i + 4..]));
            continue;
        }
        let basis = WORDS.iter().find(|b| **b == w).unwrap_or_else(|| panic!("unreduced word {w}"));
        let e = out.entry(basis).or_insert(false);
        *e = !*e;
    }
    out.into_iter().filter(|&(_, on)| on).map(|(w, _)| w).collect()
}

/// Dense GF(2) row reduction: returns the rank and a nullspace basis of the
/// map whose columns are `cols` (each of length `rows`).
pub fn nullspace(rows: usize, cols: &[Vec<u8>]) -> (usize, Vec<Vec<u8>>) {
    let n = cols.len();
    let mut m: Vec<Vec<u8>> = (0..rows).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..n {
        let Some(p) = (row..rows).find(|&r| m[r][c] == 1) else { continue };
        m.swap(row, p);
        let pivot = m[row].clone();
        for (r, line) in m.iter_mut().enumerate() {
            if r != row && line[c] == 1 {
                for (x, y) in line.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![0u8; n];
        v[f] = 1;
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = m[r][f];
        }
        basis.push(v);
    }
    (pivots.len(), basis)
}

pub fn rank(rows: usize, cols: &[Vec<u8>]) -> usize {
    nullspace(rows, cols).0
}

/// Something Sq1 and Sq2 act on, degree by degree.
trait Target {
    fn dim(&self, t: i32) -> usize;
    fn sq(&self, k: u8, t: i32, v: &[u8]) -> Vec<u8>;

    fn act(&self, word: &str, t: i32, v: &[u8]) -> Vec<u8> {
        let mut v = v.to_vec();
        let mut d = t;
        for b in word.bytes().rev() {
            let k = b - b'0';
            v = self.sq(k, d, &v);
            d += i32::from(k);
        }
        v
    }
}

struct Module {
    lo: i32,
    dims: Vec<usize>,
    /// sq[k-1][t-lo] has columns the images of basis vectors.
    sq: [Vec<Vec<Vec<u8>>>; 2],
}

impl Module {
    fn from_library(m: &GradedA1Module, max_t: i32) -> Self {
        let lo = m.lo().min(0);
        let dims: Vec<usize> = (lo..=max_t).map(|t| m.dim(t)).collect();
        let mut sq: [Vec<Vec<Vec<u8>>>; 2] = [Vec::new(), Vec::new()];
        for k in 1..=2u32 {
            for t in lo..=max_t {
                let target = if t + k as i32 <= max_t { m.dim(t + k as i32) } else { 0 };
                let cols: Vec<Vec<u8>> = if target == 0 || m.dim(t) == 0 {
                    vec![vec![0; target]; m.dim(t)]
                } else {
                    let mat = m.sq(k, t).expect("module known in window");
                    (0..m.dim(t)).map(|c| (0..target).map(|r| u8::from(mat.get(r, c))).collect()).collect()
                };
                sq[k as usize - 1].push(cols);
            }
        }
        Self { lo, dims, sq }
    }
}

impl Target for Module {
    fn dim(&self, t: i32) -> usize {
        if t < self.lo {
            return 0;
        }
        self.dims.get((t - self.lo) as usize).copied().unwrap_or(0)
    }

    fn sq(&self, k: u8, t: i32, v: &[u8]) -> Vec<u8> {
        let target = self.dim(t + i32::from(k));
        let mut out = vec![0u8; target];
        if t < self.lo || target == 0 {
            return out;
        }
        let cols = &self.sq[k as usize - 1][(t - self.lo) as usize];
        for (i, &x) in v.iter().enumerate() {
            if x == 1 {
                for r in 0..target {
                    out[r] ^= cols[i][r];
                }
            }
        }
        out
    }
}

/// A free A(1)-module with generators in given degrees and, for each
/// generator, its image in the previous target.
struct Free {
    gens: Vec<i32>,
}

impl Free {
    /// Basis of degree t: (generator, word) pairs.
    fn basis(&self, t: i32) -> Vec<(usize, &'static str)> {
        let mut out = Vec::new();
        for (g, &d) in self.gens.iter().enumerate() {
            for w in WORDS {
                if d + word_degree(w) == t {
                    out.push((g, w));
                }
            }
        }
        out
    }
}

impl Target for Free {
    fn dim(&self, t: i32) -> usize {
        self.basis(t).len()
    }

    fn sq(&self, k: u8, t: i32, v: &[u8]) -> Vec<u8> {
        let src = self.basis(t);
        let dst = self.basis(t + i32::from(k));
        let mut out = vec![0u8; dst.len()];
        for (i, &(g, w)) in src.iter().enumerate() {
            if v[i] == 0 {
                continue;
            }
            for r in reduce(&format!("{k}{w}")) {
                let j = dst.iter().position(|&(h, x)| h == g && x == r).expect("degree bookkeeping");
                out[j] ^= 1;
            }
        }
        out
    }
}

/// Generator counts of a minimal free resolution: `gens[s][t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleExt {
    pub lo: i32,
    pub max_s: usize,
    pub max_t: i32,
    pub gens: Vec<BTreeMap<i32, usize>>,
}

impl OracleExt {
    /// dim Ext^{s, s+n}.
    pub fn dim(&self, s: usize, n: i32) -> usize {
        self.gens[s].get(&(n + s as i32)).copied().unwrap_or(0)
    }
}

/// One stage: the free module and the images of its generators one step down.
struct Stage {
    free: Free,
    images: Vec<Vec<u8>>,
}

fn target<'a>(module: &'a Module, stages: &'a [Stage], s: usize) -> &'a dyn Target {
    if s == 0 {
        module
    } else {
        &stages[s - 1].free
    }
}

/// Builds a minimal resolution of `m` (known through `max_t`) up to stage `max_s`.
pub fn oracle_ext(m: &GradedA1Module, max_s: usize, max_t: i32) -> OracleExt {
    let module = Module::from_library(m, max_t);
    let lo = module.lo;
    let mut stages: Vec<Stage> = Vec::new();
    for s in 0..=max_s {
        let mut stage = Stage { free: Free { gens: Vec::new() }, images: Vec::new() };
        for t in lo..=max_t {
            let tgt = target(&module, &stages, s);
            let kernel: Vec<Vec<u8>> = if s == 0 {
                let d = module.dim(t);
                (0..d).map(|i| (0..d).map(|j| u8::from(i == j)).collect()).collect()
            } else {
                let below = &stages[s - 1];
                let down = target(&module, &stages, s - 1);
                let cols: Vec<Vec<u8>> =
                    below.free.basis(t).iter().map(|&(g, w)| down.act(w, below.free.gens[g], &below.images[g])).collect();
                nullspace(down.dim(t), &cols).1
            };
            let mut span: Vec<Vec<u8>> = Vec::new();
            for (g, &d) in stage.free.gens.iter().enumerate() {
                for w in WORDS {
                    if d + word_degree(w) == t {
                        span.push(tgt.act(w, d, &stage.images[g]));
                    }
                }
            }
            let dim = tgt.dim(t);
            let mut r = rank(dim, &span);
            for k in kernel {
                span.push(k.clone());
                let r2 = rank(dim, &span);
                if r2 > r {
                    r = r2;
                    stage.free.gens.push(t);
                    stage.images.push(k);
                } else {
                    span.pop();
                }
            }
        }
        stages.push(stage);
    }
    let gens = stages
        .iter()
        .map(|st| {
            let mut c = BTreeMap::new();
            for &d in &st.free.gens {
                *c.entry(d).or_insert(0) += 1;
            }
            c
        })
        .collect();
    OracleExt { lo, max_s, max_t, gens }
}
