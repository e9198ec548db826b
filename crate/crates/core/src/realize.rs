//! Deciding realizability of a (nearest, farthest) pair and building the abstract metric witness.
//!
//! A pair is *nice* when neither map has a cycle longer than two, `f∘g` fixes at most one point,
//! and any such fixed point `i` is a source of `G_g` with `g(i)` a source of `G_f`. Nice pairs are
//! exactly the realizable ones; [`edge_labeling`] orders the pairs of `[n]` so that every point's
//! nearest pair comes first and its farthest pair last, and [`metric_witness`] turns that order
//! into distances in `(1, 2)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funcgraph::{all_pairs, pair_count, pair_index, EdgeSet, FuncMap, FuncPair, GraphError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizeError {
    #[error("pair is not realizable: {0:?}")]
    NotNice(Vec<Violation>),
    #[error("pairs need n >= 3, got {0}")]
    TooSmall(usize),
    #[error("labeling broke the ordering at vertex {vertex}")]
    LabelingInvariant { vertex: usize },
    #[error("distance matrix: {0}")]
    Matrix(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    F,
    G,
}

/// One reason a pair fails to be nice. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    FixedPoint { side: Side, index: usize },
    PointwiseCollision { index: usize },
    LongCycle { side: Side, cycle: Vec<usize> },
    MultipleFixedPoints { points: Vec<usize> },
    /// `index` must be a source of `G_side` but has a preimage.
    SourceCondition { side: Side, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceReport {
    pub is_nice: bool,
    pub violations: Vec<Violation>,
}

impl NiceReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self { is_nice: violations.is_empty(), violations }
    }
}

/// Checks every realizability condition and reports all failures.
pub fn check(p: &FuncPair) -> NiceReport {
    let mut v = Vec::new();
    for (side, map) in [(Side::F, &p.f), (Side::G, &p.g)] {
        if let Some(cycle) = map.long_cycle() {
            v.push(Violation::LongCycle { side, cycle: cycle.iter().map(|c| c + 1).collect() });
        }
    }
    let fixed = p.compose_fixed_points();
    if fixed.len() > 1 {
        v.push(Violation::MultipleFixedPoints { points: fixed.iter().map(|c| c + 1).collect() });
    }
    let (src_f, src_g) = (p.f.sources(), p.g.sources());
    for &i in &fixed {
        if !src_g.contains(&i) {
            v.push(Violation::SourceCondition { side: Side::G, index: i + 1 });
        }
        let gi = p.g.at(i);
        if !src_f.contains(&gi) {
            v.push(Violation::SourceCondition { side: Side::F, index: gi + 1 });
        }
    }
    NiceReport::from_violations(v)
}

/// Like [`check`] but on raw 1-based arrays, so fixed points and pointwise collisions become
/// violations instead of construction errors. Out-of-range values and length mismatches are
/// still errors.
pub fn check_images(f: &[usize], g: &[usize]) -> Result<NiceReport, GraphError> {
    let n = f.len();
    if g.len() != n {
        return Err(GraphError::SizeMismatch(n, g.len()));
    }
    for map in [f, g] {
        if let Some((i, &v)) = map.iter().enumerate().find(|(_, &v)| v == 0 || v > n) {
            return Err(GraphError::OutOfRange { index: i + 1, value: v, n });
        }
    }
    let mut v = Vec::new();
    for i in 0..n {
        if f[i] == i + 1 {
            v.push(Violation::FixedPoint { side: Side::F, index: i + 1 });
        }
        if g[i] == i + 1 {
            v.push(Violation::FixedPoint { side: Side::G, index: i + 1 });
        }
        if f[i] == g[i] {
            v.push(Violation::PointwiseCollision { index: i + 1 });
        }
    }
    if !v.is_empty() {
        return Ok(NiceReport::from_violations(v));
    }
    Ok(check(&FuncPair::from_one_based(f, g)?))
}

/// A single map is nearest- (equivalently farthest-) realizable iff it has no cycle longer than two.
pub fn check_single(f: &FuncMap) -> bool {
    f.long_cycle().is_none()
}

fn require_nice(p: &FuncPair) -> Result<(), RealizeError> {
    if p.n() < 3 {
        return Err(RealizeError::TooSmall(p.n()));
    }
    let report = check(p);
    if report.is_nice {
        Ok(())
    } else {
        Err(RealizeError::NotNice(report.violations))
    }
}

/// A bijection from the pairs of `[n]` to `1..=n(n-1)/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLabeling {
    n: usize,
    labels: Vec<usize>,
}

impl EdgeLabeling {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self, i: usize, j: usize) -> usize {
        self.labels[pair_index(self.n, i, j)]
    }

    /// Labels indexed by lexicographic pair rank.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// First vertex at which `{j, f(j)}` is not the strictly smallest label, if any.
    pub fn nearest_violation(&self, f: &FuncMap) -> Option<usize> {
        (0..self.n).find(|&j| {
            let own = self.label(j, f.at(j));
            (0..self.n).any(|r| r != j && r != f.at(j) && self.label(j, r) <= own)
        })
    }

    /// First vertex at which `{j, g(j)}` is not the strictly largest label, if any.
    pub fn farthest_violation(&self, g: &FuncMap) -> Option<usize> {
        (0..self.n).find(|&j| {
            let own = self.label(j, g.at(j));
            (0..self.n).any(|r| r != j && r != g.at(j) && self.label(j, r) >= own)
        })
    }
}

/// Shadow edges minus the common edge, sorted by level type then lexicographically.
fn typed_edges(map: &FuncMap, common: &EdgeSet) -> Result<Vec<(usize, usize)>, GraphError> {
    let levels = map.level_partition()?;
    let mut edges: Vec<(usize, usize)> = map.shadow().difference(common).iter().collect();
    // an edge of type l > 0 joins levels l and l-1; type 0 joins two level-0 vertices
    edges.sort_by_key(|&(a, b)| (levels.level[a].max(levels.level[b]), a, b));
    Ok(edges)
}

/// Labels the pairs of `[n]` so that, at every vertex, the nearest pair gets the smallest label
/// and the farthest pair the largest.
///
/// `T_f` edges take the bottom labels in ascending type, `T_g` edges the top labels. With a
/// common edge `k1 k2`, the remaining edges at `k2` come next from the bottom and the remaining
/// edges at `k1` next from the top. Everything else fills the gap in lexicographic order.
pub fn edge_labeling(p: &FuncPair) -> Result<EdgeLabeling, RealizeError> {
    require_nice(p)?;
    let n = p.n();
    let total = pair_count(n);
    let common = p.f.shadow().intersection(&p.g.shadow());
    let t_f = typed_edges(&p.f, &common)?;
    let t_g = typed_edges(&p.g, &common)?;

    let mut labels = vec![0usize; total];
    for (i, &(a, b)) in t_f.iter().enumerate() {
        labels[pair_index(n, a, b)] = i + 1;
    }
    for (i, &(a, b)) in t_g.iter().enumerate() {
        labels[pair_index(n, a, b)] = total - i;
    }
    let mut low = t_f.len();
    let mut high = total + 1 - t_g.len();

    if let Some((k1, k2)) = p.common_edge()? {
        for w in (0..n).filter(|&w| w != k1 && w != k2) {
            let idx = pair_index(n, k2, w);
            if labels[idx] == 0 {
                low += 1;
                labels[idx] = low;
            }
        }
        for w in (0..n).filter(|&w| w != k1 && w != k2) {
            let idx = pair_index(n, k1, w);
            if labels[idx] == 0 {
                high -= 1;
                labels[idx] = high;
            }
        }
    }
    for (i, j) in all_pairs(n) {
        let idx = pair_index(n, i, j);
        if labels[idx] == 0 {
            low += 1;
            labels[idx] = low;
        }
    }
    debug_assert_eq!(low + 1, high);

    let labeling = EdgeLabeling { n, labels };
    if let Some(v) = labeling.nearest_violation(&p.f).or_else(|| labeling.farthest_violation(&p.g)) {
        return Err(RealizeError::LabelingInvariant { vertex: v + 1 });
    }
    Ok(labeling)
}

/// Symmetric `n × n` matrix with zero diagonal, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates shape, zero diagonal, symmetry and nonnegative finite entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, RealizeError> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(RealizeError::Matrix(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
            }
            d.extend_from_slice(row);
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(RealizeError::Matrix(format!("diagonal entry {} is nonzero", i + 1)));
            }
            for j in 0..n {
                let x = d[i * n + j];
                if !x.is_finite() || x < 0.0 {
                    return Err(RealizeError::Matrix(format!("entry ({}, {}) = {x} is not a nonnegative real", i + 1, j + 1)));
                }
                if x != d[j * n + i] {
                    return Err(RealizeError::Matrix(format!("entries ({0}, {1}) and ({1}, {0}) differ", i + 1, j + 1)));
                }
            }
        }
        Ok(Self { n, d })
    }

    /// Builds from a function of the pair; `value(i, j)` is only called with `i < j`.
    pub fn from_pairs(n: usize, mut value: impl FnMut(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for (i, j) in all_pairs(n) {
            let x = value(i, j);
            d[i * n + j] = x;
            d[j * n + i] = x;
        }
        Self { n, d }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

/// The value assigned to label `t` of `total`: `1 + t / (total + 1)`.
#[inline]
pub fn witness_value(t: usize, total: usize) -> f64 {
    1.0 + t as f64 / (total as f64 + 1.0)
}

/// Distances on `[n]` realizing the pair: `d(i, j) = 1 + label({i,j}) / (C(n,2) + 1)`.
pub fn metric_witness(p: &FuncPair) -> Result<DistanceMatrix, RealizeError> {
    let labeling = edge_labeling(p)?;
    let total = pair_count(p.n());
    Ok(DistanceMatrix::from_pairs(p.n(), |i, j| witness_value(labeling.label(i, j), total)))
}
