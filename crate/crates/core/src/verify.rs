//! Ground truth: nearest/farthest maps induced by distances, metric checks, certification of
//! point configurations, and the brute-force realizability oracle for tiny `n`.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::funcgraph::{all_pairs, pair_count, pair_index, FuncMap, FuncPair};
use crate::realize::DistanceMatrix;

/// Largest `n` the oracles accept; `C(6,2)! = 15!` orders is out of reach.
pub const ORACLE_MAX_N: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("configuration has {points} points but the instance has {expected}")]
    CountMismatch { points: usize, expected: usize },
    #[error("point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, got: usize, expected: usize },
    #[error("points {0} and {1} coincide")]
    Coincident(usize, usize),
    #[error("coordinate of point {0} is not finite")]
    NonFinite(usize),
    #[error("need at least {min} points, got {got}")]
    TooFew { min: usize, got: usize },
    #[error("oracle handles n <= {ORACLE_MAX_N}, got {0}")]
    OracleTooLarge(usize),
}

/// `n` pairwise distinct points in `R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    k: usize,
    coords: Vec<Vec<f64>>,
}

impl PointConfig {
    pub fn new(coords: Vec<Vec<f64>>) -> Result<Self, VerifyError> {
        let k = coords.first().map_or(0, Vec::len);
        for (i, c) in coords.iter().enumerate() {
            if c.len() != k {
                return Err(VerifyError::DimensionMismatch { index: i + 1, got: c.len(), expected: k });
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(VerifyError::NonFinite(i + 1));
            }
        }
        for (i, j) in all_pairs(coords.len()) {
            if coords[i] == coords[j] {
                return Err(VerifyError::Coincident(i + 1, j + 1));
            }
        }
        Ok(Self { k, coords })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Vec<f64>> {
        self.coords
    }
}

/// Per-row argmin / argmax of a distance matrix. Maps are 0-based; ties go to the smallest index
/// and leave `distinct` false, which never certifies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapsResult {
    pub nearest: Vec<usize>,
    pub farthest: Vec<usize>,
    pub distinct: bool,
}

pub fn extract_maps(d: &DistanceMatrix) -> MapsResult {
    let n = d.n();
    let mut nearest = vec![0; n];
    let mut farthest = vec![0; n];
    for i in 0..n {
        let row = d.row(i);
        let mut lo: Option<usize> = None;
        let mut hi: Option<usize> = None;
        for j in (0..n).filter(|&j| j != i) {
            if lo.is_none_or(|l| row[j] < row[l]) {
                lo = Some(j);
            }
            if hi.is_none_or(|h| row[j] > row[h]) {
                hi = Some(j);
            }
        }
        nearest[i] = lo.unwrap_or(i);
        farthest[i] = hi.unwrap_or(i);
    }
    let mut values: Vec<f64> = all_pairs(n).map(|(i, j)| d.get(i, j)).collect();
    values.sort_by(f64::total_cmp);
    let distinct = values.windows(2).all(|w| w[0] < w[1]);
    MapsResult { nearest, farthest, distinct }
}

/// Positive off-diagonal entries and the triangle inequality on every triple.
///
/// The triangle check allows a relative slack of `1e-12` of the largest entry so that
/// floating-point Euclidean distances of collinear points still pass.
pub fn is_metric(d: &DistanceMatrix) -> bool {
    let n = d.n();
    let scale = all_pairs(n).map(|(i, j)| d.get(i, j)).fold(0.0, f64::max);
    let slack = 1e-12 * scale;
    if all_pairs(n).any(|(i, j)| d.get(i, j) <= 0.0) {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            for r in 0..n {
                if d.get(i, j) + d.get(j, r) < d.get(i, r) - slack {
                    return false;
                }
            }
        }
    }
    true
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn distances(c: &PointConfig) -> DistanceMatrix {
    DistanceMatrix::from_pairs(c.n(), |i, j| euclidean(c.point(i), c.point(j)))
}

/// One vertex whose induced neighbor differs from the required one (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub vertex: usize,
    pub expected: usize,
    pub got: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifyReport {
    pub certified: bool,
    pub distinct: bool,
    pub nearest_mismatches: Vec<Mismatch>,
    pub farthest_mismatches: Vec<Mismatch>,
}

fn mismatches(got: &[usize], want: Option<&FuncMap>) -> Vec<Mismatch> {
    let Some(want) = want else { return Vec::new() };
    (0..got.len())
        .filter(|&i| got[i] != want.at(i))
        .map(|i| Mismatch { vertex: i + 1, expected: want.at(i) + 1, got: got[i] + 1 })
        .collect()
}

/// Certifies a configuration against an optional nearest map and an optional farthest map.
pub fn certify_maps(
    c: &PointConfig,
    nearest: Option<&FuncMap>,
    farthest: Option<&FuncMap>,
) -> Result<CertifyReport, VerifyError> {
    for m in [nearest, farthest].into_iter().flatten() {
        if m.n() != c.n() {
            return Err(VerifyError::CountMismatch { points: c.n(), expected: m.n() });
        }
    }
    let maps = extract_maps(&distances(c));
    let nearest_mismatches = mismatches(&maps.nearest, nearest);
    let farthest_mismatches = mismatches(&maps.farthest, farthest);
    Ok(CertifyReport {
        certified: maps.distinct && nearest_mismatches.is_empty() && farthest_mismatches.is_empty(),
        distinct: maps.distinct,
        nearest_mismatches,
        farthest_mismatches,
    })
}

/// Whether the points realize `p` exactly: distinct distances, nearest = f, farthest = g.
pub fn certify(c: &PointConfig, p: &FuncPair) -> Result<CertifyReport, VerifyError> {
    certify_maps(c, Some(&p.f), Some(&p.g))
}

/// Which extreme a pair order must induce at each vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Nearest,
    Farthest,
}

/// Precedence constraints between pair indices: `before[a]` lists the pairs that must come after `a`.
struct OrderConstraints {
    pairs: usize,
    /// Bitmask of pairs that must be placed before each pair.
    preds: Vec<u32>,
}

impl OrderConstraints {
    fn new(n: usize, nearest: Option<&FuncMap>, farthest: Option<&FuncMap>) -> Self {
        let pairs = pair_count(n);
        let mut preds = vec![0u32; pairs];
        for i in 0..n {
            if let Some(f) = nearest {
                let own = pair_index(n, i, f.at(i));
                for r in (0..n).filter(|&r| r != i && r != f.at(i)) {
                    preds[pair_index(n, i, r)] |= 1 << own;
                }
            }
            if let Some(g) = farthest {
                let own = pair_index(n, i, g.at(i));
                for r in (0..n).filter(|&r| r != i && r != g.at(i)) {
                    preds[own] |= 1 << pair_index(n, i, r);
                }
            }
        }
        Self { pairs, preds }
    }

    /// Depth-first extension of order prefixes, pruning any pair whose predecessors are not all
    /// placed; dead prefix sets are memoized.
    fn exists(&self) -> bool {
        let full: u32 = if self.pairs == 32 { u32::MAX } else { (1u32 << self.pairs) - 1 };
        let mut dead = HashSet::new();
        self.extend(0, full, &mut dead)
    }

    fn extend(&self, placed: u32, full: u32, dead: &mut HashSet<u32>) -> bool {
        if placed == full {
            return true;
        }
        if dead.contains(&placed) {
            return false;
        }
        for e in 0..self.pairs {
            let bit = 1u32 << e;
            if placed & bit == 0 && self.preds[e] & !placed == 0 && self.extend(placed | bit, full, dead) {
                return true;
            }
        }
        dead.insert(placed);
        false
    }
}

fn oracle_guard(n: usize) -> Result<(), VerifyError> {
    if n > ORACLE_MAX_N {
        Err(VerifyError::OracleTooLarge(n))
    } else if n < 3 {
        Err(VerifyError::TooFew { min: 3, got: n })
    } else {
        Ok(())
    }
}

/// Whether some total order of the pairs of `[n]` puts `{i, f(i)}` first and `{i, g(i)}` last
/// among the pairs at every `i`. Any such order is realized by distances close to 1.
pub fn oracle(p: &FuncPair) -> Result<bool, VerifyError> {
    oracle_guard(p.n())?;
    Ok(OrderConstraints::new(p.n(), Some(&p.f), Some(&p.g)).exists())
}

/// Single-map version of [`oracle`].
pub fn oracle_single(f: &FuncMap, mode: Extreme) -> Result<bool, VerifyError> {
    oracle_guard(f.n())?;
    let c = match mode {
        Extreme::Nearest => OrderConstraints::new(f.n(), Some(f), None),
        Extreme::Farthest => OrderConstraints::new(f.n(), None, Some(f)),
    };
    Ok(c.exists())
}

/// Full factorial enumeration of pair orders without pruning; reference for the pruned search.
pub fn oracle_exhaustive(n: usize, nearest: Option<&FuncMap>, farthest: Option<&FuncMap>) -> Result<bool, VerifyError> {
    oracle_guard(n)?;
    let pairs = pair_count(n);
    let mut rank: Vec<usize> = (0..pairs).collect();
    let induces = |rank: &[usize]| {
        let d = DistanceMatrix::from_pairs(n, |i, j| rank[pair_index(n, i, j)] as f64 + 1.0);
        let m = extract_maps(&d);
        nearest.is_none_or(|f| m.nearest == f.images()) && farthest.is_none_or(|g| m.farthest == g.images())
    };
    // Heap's algorithm over all rank assignments
    let mut counters = vec![0usize; pairs];
    if induces(&rank) {
        return Ok(true);
    }
    let mut i = 0;
    while i < pairs {
        if counters[i] < i {
            if i % 2 == 0 {
                rank.swap(0, i);
            } else {
                rank.swap(counters[i], i);
            }
            if induces(&rank) {
                return Ok(true);
            }
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(false)
}
