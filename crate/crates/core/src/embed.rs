//! Euclidean witnesses: the simplex embedding in `R^{n-1}`, the spherical-cap construction in
//! `R^k`, distinctness perturbation, bound calculators and named instance families.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use log::debug;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::funcgraph::{all_pairs, canonical, EdgeSet, FuncMap, FuncPair, GraphError};
use crate::realize::{check, edge_labeling, metric_witness, RealizeError};
use crate::spherical::{
    self, boundary_intersection_alpha, cap_area, dot, full_area, sample_on_with, BoundarySphere, SphereCap,
    SphericalError, DEFAULT_MAX_ATTEMPTS, MAX_SPAN,
};
use crate::verify::{certify, certify_maps, distances, PointConfig, VerifyError};

/// Largest number of earlier constraint neighbors any vertex may have.
pub const MAX_BACK_DEGREE: usize = MAX_SPAN;

const PERTURB_HALVINGS: u32 = 40;
/// Random draws tried at each perturbation width before halving it.
const PERTURB_DRAWS: u32 = 8;
const WINDOW_MARGIN: f64 = 0.01;
const ANGLE_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spherical(#[from] SphericalError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("required nearest/farthest inequalities have zero margin")]
    ZeroMargin,
    #[error("no distinct-distance perturbation found after {0} halvings")]
    PerturbExhausted(u32),
}

fn require_nice(p: &FuncPair) -> Result<(), EmbedError> {
    let r = check(p);
    if r.is_nice {
        Ok(())
    } else {
        Err(RealizeError::NotNice(r.violations).into())
    }
}

/// Points of `R^{n-1}` realizing `p`, obtained from the compressed metric witness by classical
/// multidimensional scaling.
pub fn simplex(p: &FuncPair) -> Result<PointConfig, EmbedError> {
    let w = metric_witness(p)?;
    let n = p.n();
    let shrink = 4.0 * (n * n) as f64;
    let sq = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let d = 1.0 + (w.get(i, j) - 1.0) / shrink;
            d * d
        }
    });
    let row_mean: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let all_mean = row_mean.iter().sum::<f64>() / n as f64;
    let gram = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_mean[i] - row_mean[j] + all_mean));
    let eig = SymmetricEigen::new(gram);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-9 {
        return Err(EmbedError::Internal(format!("Gram matrix not PSD (min eigenvalue {min:e})")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            order[..n - 1]
                .iter()
                .map(|&c| eig.eigenvectors[(i, c)] * eig.eigenvalues[c].max(0.0).sqrt())
                .collect()
        })
        .collect();
    let config = PointConfig::new(coords)?;
    let report = certify(&config, p)?;
    if !report.certified {
        return Err(EmbedError::Internal(format!("simplex embedding failed to certify: {report:?}")));
    }
    Ok(config)
}

/// Smallest eigenvalue of the double-centered Gram matrix used by [`simplex`].
pub fn simplex_gram_min_eigenvalue(p: &FuncPair) -> Result<f64, EmbedError> {
    let w = metric_witness(p)?;
    let n = p.n();
    let shrink = 4.0 * (n * n) as f64;
    let sq = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { (1.0 + (w.get(i, j) - 1.0) / shrink).powi(2) });
    let j = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let gram = -0.5 * &j * sq * &j;
    Ok(gram.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Prescribed angles for the constraint-graph edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleTable {
    n: usize,
    alpha: BTreeMap<(usize, usize), f64>,
}

impl AngleTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.alpha.get(&canonical(i, j)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.alpha.iter().map(|(&e, &a)| (e, a))
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// Open angle windows for each edge class, in increasing order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleWindows {
    pub nearest: (f64, f64),
    pub star_low: (f64, f64),
    pub star_high: (f64, f64),
    pub farthest: (f64, f64),
}

impl AngleWindows {
    pub fn new(alpha: f64) -> Self {
        Self {
            nearest: (alpha.acos(), (alpha / 2.0).acos()),
            star_low: ((alpha / 2.0).acos(), PI / 2.0),
            star_high: (PI / 2.0, (-alpha / 2.0).acos()),
            farthest: ((-alpha / 2.0).acos(), (-alpha).acos()),
        }
    }
}

/// Angle table with the default constant `α = 1/500`.
pub fn angle_table(p: &FuncPair) -> Result<AngleTable, EmbedError> {
    angle_table_with(p, spherical::ALPHA)
}

pub fn angle_table_with(p: &FuncPair, alpha: f64) -> Result<AngleTable, EmbedError> {
    require_nice(p)?;
    let labels = edge_labeling(p)?;
    let windows = AngleWindows::new(alpha);
    let hf = p.f.shadow();
    let hg = p.g.shadow();
    let common = p.common_edge()?;
    let mut classes: [Vec<(usize, usize)>; 4] = Default::default();
    let mut table = BTreeMap::new();
    for (i, j) in p.constraint_graph().iter() {
        let (in_f, in_g) = (hf.contains(i, j), hg.contains(i, j));
        let class = match (in_f, in_g) {
            (true, true) => {
                table.insert((i, j), PI / 2.0);
                continue;
            }
            (true, false) => 0,
            (false, true) => 3,
            (false, false) => {
                let (k1, k2) = common.ok_or_else(|| EmbedError::Internal("star edge without common edge".into()))?;
                if i == k2 || j == k2 {
                    1
                } else if i == k1 || j == k1 {
                    2
                } else {
                    return Err(EmbedError::Internal(format!("edge ({i},{j}) has no class")));
                }
            }
        };
        classes[class].push((i, j));
    }
    let bounds = [windows.nearest, windows.star_low, windows.star_high, windows.farthest];
    for (edges, (lo, hi)) in classes.iter_mut().zip(bounds) {
        edges.sort_by_key(|&(i, j)| labels.label(i, j));
        let m = edges.len();
        for (r, &e) in edges.iter().enumerate() {
            let frac = if m == 1 { 0.5 } else { WINDOW_MARGIN + (1.0 - 2.0 * WINDOW_MARGIN) * r as f64 / (m - 1) as f64 };
            table.insert(e, lo + (hi - lo) * frac);
        }
    }
    Ok(AngleTable { n: p.n(), alpha: table })
}

/// A vertex order in which every vertex has at most seven earlier neighbors in the constraint
/// graph: repeatedly strip a minimum-degree vertex, then reverse.
pub fn elimination_order(p: &FuncPair) -> Result<Vec<usize>, EmbedError> {
    require_nice(p)?;
    order_graph(&p.constraint_graph())
}

fn order_graph(h: &EdgeSet) -> Result<Vec<usize>, EmbedError> {
    let n = h.n();
    let adj = h.adjacency();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .ok_or_else(|| EmbedError::Internal("empty graph".into()))?;
        if degree[v] > MAX_BACK_DEGREE {
            return Err(EmbedError::Internal(format!("minimum degree {} exceeds {MAX_BACK_DEGREE}", degree[v])));
        }
        removed[v] = true;
        for &u in &adj[v] {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
        order.push(v);
    }
    order.reverse();
    Ok(order)
}

/// Largest number of earlier neighbors over the order.
pub fn back_degree(h: &EdgeSet, order: &[usize]) -> usize {
    (0..order.len())
        .map(|s| order[..s].iter().filter(|&&u| h.contains(u, order[s])).count())
        .max()
        .unwrap_or(0)
}

/// Knobs for the spherical construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedParams {
    pub k: usize,
    pub seed: u64,
    pub alpha_const: f64,
    pub delta: f64,
    pub max_attempts_per_point: usize,
    pub max_restarts: usize,
    pub perturb_scale: f64,
}

impl EmbedParams {
    pub fn new(k: usize, seed: u64) -> Self {
        let alpha_const = spherical::ALPHA;
        Self {
            k,
            seed,
            alpha_const,
            delta: (alpha_const / 2.0).acos(),
            max_attempts_per_point: DEFAULT_MAX_ATTEMPTS,
            max_restarts: 20,
            perturb_scale: 1e-6,
        }
    }

    fn validate(&self) -> Result<(), EmbedError> {
        if self.k < 9 {
            return Err(EmbedError::Precondition(format!("spherical construction needs k >= 9, got {}", self.k)));
        }
        if !(self.alpha_const > 0.0 && self.alpha_const < 1.0 / 200.0) {
            return Err(EmbedError::Precondition(format!("alpha_const must lie in (0, 1/200), got {}", self.alpha_const)));
        }
        if !(self.delta > self.alpha_const.acos() && self.delta < PI / 2.0) {
            return Err(EmbedError::Precondition(format!("delta {} must lie in (arccos alpha, pi/2)", self.delta)));
        }
        if self.max_attempts_per_point == 0 || !(self.perturb_scale > 0.0 && self.perturb_scale < 0.5) {
            return Err(EmbedError::Precondition("attempt budget must be positive and perturb_scale in (0, 1/2)".into()));
        }
        Ok(())
    }
}

/// Outcome of [`spherical_embed_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedReport {
    pub config: Option<PointConfig>,
    /// Restarts consumed, including the successful one.
    pub restarts: usize,
    /// Points that needed band-targeted placement after plain rejection sampling ran out.
    pub targeted_points: usize,
}

/// Points in `R^k` realizing `p`, or `None` when every restart exhausts its sampling budget.
pub fn spherical_embed(p: &FuncPair, params: &EmbedParams) -> Result<Option<PointConfig>, EmbedError> {
    spherical_embed_report(p, params).map(|r| r.config)
}

pub fn spherical_embed_report(p: &FuncPair, params: &EmbedParams) -> Result<EmbedReport, EmbedError> {
    params.validate()?;
    require_nice(p)?;
    let table = angle_table_with(p, params.alpha_const)?;
    let h = p.constraint_graph();
    let order = order_graph(&h)?;
    let mut targeted_points = 0;
    for restart in 0..params.max_restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(restart as u64);
        let Some(points) = place_all(&h, &table, &order, params, &mut rng, &mut targeted_points)? else {
            debug!("restart {restart}: sampling budget exhausted");
            continue;
        };
        if let Err(msg) = check_angles(&h, &table, &points, params.delta) {
            debug!("restart {restart}: angle invariant failed: {msg}");
            continue;
        }
        let config = PointConfig::new(points)?;
        let perturbed = match perturb_with(&config, Some(&p.f), Some(&p.g), params.perturb_scale, &mut rng) {
            Ok(c) => c,
            Err(e) => {
                debug!("restart {restart}: perturbation failed: {e}");
                continue;
            }
        };
        if certify(&perturbed, p)?.certified {
            return Ok(EmbedReport { config: Some(perturbed), restarts: restart + 1, targeted_points });
        }
        debug!("restart {restart}: certification failed");
    }
    Ok(EmbedReport { config: None, restarts: params.max_restarts, targeted_points })
}

fn place_all(
    h: &EdgeSet,
    table: &AngleTable,
    order: &[usize],
    params: &EmbedParams,
    rng: &mut ChaCha8Rng,
    targeted: &mut usize,
) -> Result<Option<Vec<Vec<f64>>>, EmbedError> {
    let n = h.n();
    let k = params.k;
    let mut points: Vec<Vec<f64>> = vec![Vec::new(); n];
    for (s, &v) in order.iter().enumerate() {
        let (nbrs, others): (Vec<usize>, Vec<usize>) = order[..s].iter().partition(|&&u| h.contains(u, v));
        if nbrs.len() > MAX_BACK_DEGREE {
            return Err(EmbedError::Internal(format!("vertex {} has {} earlier neighbors", v + 1, nbrs.len())));
        }
        let caps: Vec<SphereCap> = nbrs
            .iter()
            .map(|&u| {
                let angle = table.get(u, v).ok_or_else(|| EmbedError::Internal("missing angle".into()))?;
                Ok(SphereCap::new(points[u].clone(), angle)?)
            })
            .collect::<Result<_, EmbedError>>()?;
        let sphere = if caps.is_empty() {
            BoundarySphere::full(k)
        } else {
            boundary_intersection_alpha(&caps, k, params.alpha_const)?
        };
        let mut forbidden = Vec::with_capacity(2 * others.len());
        for &u in &others {
            let neg: Vec<f64> = points[u].iter().map(|x| -x).collect();
            forbidden.push(SphereCap::new(points[u].clone(), params.delta)?);
            forbidden.push(SphereCap::new(neg, params.delta)?);
        }
        let x = match sample_on_with(&sphere, &forbidden, rng, params.max_attempts_per_point) {
            Some(x) => x,
            None => {
                *targeted += 1;
                match targeted_sample(&caps, &others, &points, &forbidden, params, rng)? {
                    Some(x) => x,
                    None => return Ok(None),
                }
            }
        };
        points[v] = x;
    }
    Ok(Some(points))
}

/// Fallback when plain rejection sampling misses the thin bands `|x·X_u| < cos δ`: pin as many
/// of the far vertices as the dimension allows to random targets inside their bands, then
/// rejection-sample the rest on the smaller sphere.
fn targeted_sample(
    caps: &[SphereCap],
    others: &[usize],
    points: &[Vec<f64>],
    forbidden: &[SphereCap],
    params: &EmbedParams,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vec<f64>>, EmbedError> {
    const DRAWS: usize = 100;
    let k = params.k;
    let room = k.saturating_sub(2 + caps.len());
    let band = params.delta.cos() * 0.9;
    let per_draw = (params.max_attempts_per_point / DRAWS).max(1);
    let mut pool = others.to_vec();
    for _ in 0..DRAWS {
        pool.shuffle(rng);
        let pinned = &pool[..room.min(pool.len())];
        let mut centers: Vec<Vec<f64>> = caps.iter().map(|c| c.center().to_vec()).collect();
        let mut cosines: Vec<f64> = caps.iter().map(|c| c.angle().cos()).collect();
        for &u in pinned {
            centers.push(points[u].clone());
            cosines.push(rng.random_range(-band..band));
        }
        let sphere = spherical::intersect(&centers, &cosines, k)?;
        if let Some(x) = sample_on_with(&sphere, forbidden, rng, per_draw) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    (dot(a, b) / (spherical::norm(a) * spherical::norm(b))).clamp(-1.0, 1.0).acos()
}

fn check_angles(h: &EdgeSet, table: &AngleTable, points: &[Vec<f64>], delta: f64) -> Result<(), String> {
    for (i, j) in all_pairs(points.len()) {
        let a = angle(&points[i], &points[j]);
        match table.get(i, j).filter(|_| h.contains(i, j)) {
            Some(want) if (a - want).abs() > ANGLE_TOL => {
                return Err(format!("edge ({},{}) angle {a} wants {want}", i + 1, j + 1));
            }
            None if !(a > delta && a < PI - delta) => {
                return Err(format!("non-edge ({},{}) angle {a} outside the band", i + 1, j + 1));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Smallest slack of the required strict inequalities: `d(i,j) - d(i,f(i))` and
/// `d(i,g(i)) - d(i,j)` over all `j`.
pub fn certification_margin(c: &PointConfig, nearest: Option<&FuncMap>, farthest: Option<&FuncMap>) -> f64 {
    let d = distances(c);
    let n = c.n();
    let mut margin = f64::INFINITY;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            if let Some(f) = nearest.filter(|f| f.at(i) != j) {
                margin = margin.min(d.get(i, j) - d.get(i, f.at(i)));
            }
            if let Some(g) = farthest.filter(|g| g.at(i) != j) {
                margin = margin.min(d.get(i, g.at(i)) - d.get(i, j));
            }
        }
    }
    margin
}

/// Random displacement that makes all distances distinct without flipping any required strict
/// inequality.
pub fn perturb_distinct(c: &PointConfig, p: &FuncPair, scale: f64, seed: u64) -> Result<PointConfig, EmbedError> {
    perturb_with(c, Some(&p.f), Some(&p.g), scale, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub(crate) fn perturb_with<R: Rng + ?Sized>(
    c: &PointConfig,
    nearest: Option<&FuncMap>,
    farthest: Option<&FuncMap>,
    scale: f64,
    rng: &mut R,
) -> Result<PointConfig, EmbedError> {
    if !(scale > 0.0 && scale < 0.5) {
        return Err(EmbedError::Precondition(format!("perturbation scale {scale} outside (0, 1/2)")));
    }
    let margin = certification_margin(c, nearest, farthest);
    if !(margin > 0.0) {
        return Err(EmbedError::ZeroMargin);
    }
    let mut half = scale * margin / (2.0 * (c.k() as f64).sqrt());
    for _ in 0..=PERTURB_HALVINGS {
        for _ in 0..PERTURB_DRAWS {
            let coords: Vec<Vec<f64>> =
                c.coords().iter().map(|x| x.iter().map(|v| v + rng.random_range(-half..=half)).collect()).collect();
            if let Ok(moved) = PointConfig::new(coords) {
                if certify_maps(&moved, nearest, farthest)?.certified {
                    return Ok(moved);
                }
            }
        }
        half /= 2.0;
    }
    Err(EmbedError::PerturbExhausted(PERTURB_HALVINGS))
}

/// Closed-form constants of the dimension bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub k: usize,
    /// Upper bound on the largest realizable `n`; defined for `k >= 4`.
    pub upper_m: Option<f64>,
    pub lower_a: f64,
    pub lower_c: f64,
    /// `A·c^k + 1`.
    pub lower_n: f64,
    /// Cap-packing bound with caps of angle `arccos(2/3)/2` on `S^{k-1}`.
    pub pack_bk: f64,
}

/// `1 + 1/(α_ub ε^k)` with `ε = sin(π/12)` and `α_ub = 1/(6 ε³)`.
pub fn upper_m(k: usize) -> Option<f64> {
    let eps = (PI / 12.0).sin();
    let alpha_ub = 1.0 / (6.0 * eps.powi(3));
    (k >= 4).then(|| 1.0 + 1.0 / (alpha_ub * eps.powi(k as i32)))
}

/// `(c, A)` of the lower bound `n < A·c^k + 1`.
pub fn lower_constants() -> (f64, f64) {
    let alpha: f64 = 1.0 / 500.0;
    let beta = ((alpha - 128.0 * alpha * alpha) / 2.0).acos();
    let mid = ((PI / 2.0 + beta) / 2.0).sin();
    let c = mid / beta.sin();
    let a = (PI / 2.0 - beta) * beta.sin().powi(10) / (2.0 * beta * mid.powi(10));
    (c, a)
}

/// Count of lattice points `(2r+1)^k` in a cube of half-width `r`.
pub fn ball_bound(r: u32, k: u32) -> f64 {
    (2.0 * r as f64 + 1.0).powi(k as i32)
}

pub fn bounds(k: usize) -> Result<BoundsReport, EmbedError> {
    if k < 2 {
        return Err(EmbedError::Precondition(format!("bounds need k >= 2, got {k}")));
    }
    let (c, a) = lower_constants();
    let phi = (2.0f64 / 3.0).acos() / 2.0;
    let pack_bk = full_area(k - 1) / cap_area(k - 1, phi)?;
    Ok(BoundsReport {
        k,
        upper_m: upper_m(k),
        lower_a: a,
        lower_c: c,
        lower_n: a * c.powi(k as i32) + 1.0,
        pack_bk,
    })
}

/// Named instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Croft6,
    Star(usize),
    Btree(u32),
    Twofix4,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyInstance {
    Pair(FuncPair),
    Single(FuncMap),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Croft6 => write!(f, "croft6"),
            Family::Star(n) => write!(f, "star({n})"),
            Family::Btree(s) => write!(f, "btree({s})"),
            Family::Twofix4 => write!(f, "twofix4"),
        }
    }
}

impl FromStr for Family {
    type Err = EmbedError;

    /// Accepts `croft6`, `twofix4`, `star(n)` / `star:n` and `btree(s)` / `btree:s`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || EmbedError::Precondition(format!("unknown family '{s}'"));
        match s.as_str() {
            "croft6" => return Ok(Family::Croft6),
            "twofix4" => return Ok(Family::Twofix4),
            _ => {}
        }
        let (name, arg) = s
            .strip_suffix(')')
            .and_then(|t| t.split_once('('))
            .or_else(|| s.split_once(':'))
            .ok_or_else(bad)?;
        let arg = arg.trim();
        match name.trim() {
            "star" => Ok(Family::Star(arg.parse().map_err(|_| bad())?)),
            "btree" => Ok(Family::Btree(arg.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

pub fn family(which: Family) -> Result<FamilyInstance, EmbedError> {
    let pair = |f: Vec<usize>, g: Vec<usize>| Ok(FamilyInstance::Pair(FuncPair::from_one_based(&f, &g)?));
    match which {
        Family::Croft6 => pair(vec![6, 6, 6, 6, 6, 1], vec![2, 1, 1, 1, 1, 2]),
        Family::Twofix4 => pair(vec![2, 1, 1, 2], vec![3, 4, 4, 3]),
        Family::Star(n) => {
            if n < 3 {
                return Err(EmbedError::Precondition(format!("star(n) needs n >= 3, got {n}")));
            }
            let f = (1..=n).map(|i| if i < n { n } else { 1 }).collect();
            let g = (1..=n).map(|i| if i == 1 || i == n { 2 } else { 1 }).collect();
            pair(f, g)
        }
        Family::Btree(s) => {
            if !(1..=24).contains(&s) {
                return Err(EmbedError::Precondition(format!("btree(s) needs 1 <= s <= 24, got {s}")));
            }
            let aux = 1usize << (s + 1);
            let f: Vec<usize> = (1..=aux).map(|v| if v == 1 { aux } else if v == aux { 1 } else { v / 2 }).collect();
            Ok(FamilyInstance::Single(FuncMap::from_one_based(&f)?))
        }
    }
}
