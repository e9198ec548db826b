//! Farthest-point maps realized in the plane. Each component of the map is laid out on the
//! ellipse `x² + 4y² = 4` near the ends of its major axis; components are then placed on
//! distinct diameters of the unit circle.

use std::f64::consts::PI;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::embed::{certification_margin, perturb_with, EmbedError};
use crate::funcgraph::{Component, FuncMap, GraphError};
use crate::verify::{certify_maps, euclidean, PointConfig, VerifyError};

pub type Point = [f64; 2];

const SHRINK_STEPS: u32 = 40;
/// Largest relative spread of a sibling cluster around its nominal parameter.
const SPREAD: f64 = 0.45;
/// Fraction of the stretched parent gap a sibling cluster may use.
const CHILD_SPREAD: f64 = 0.5;
const PERTURB_SCALE: f64 = 0.25;

#[derive(Debug, Error)]
pub enum MaxRealError {
    #[error("map has a cycle of length {} and is not max-realizable", .0.len())]
    NotMaxRealizable(Vec<usize>),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no certifying configuration after {0} shrink steps")]
    ShrinkExhausted(u32),
}

fn in_open(x: f64, lo: f64, hi: f64) -> bool {
    x > lo && x < hi
}

/// Parameter `b ∈ (0, 1/3)` of the four symmetric ellipse points `P_b, Q_b, R_b, S_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseParam(f64);

impl EllipseParam {
    pub fn new(b: f64) -> Result<Self, MaxRealError> {
        if in_open(b, 0.0, 1.0 / 3.0) {
            Ok(Self(b))
        } else {
            Err(MaxRealError::Domain(format!("ellipse parameter {b} outside (0, 1/3)")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `(-2√(1-b²), -b)`
    pub fn p(self) -> Point {
        point_p(self.0)
    }

    /// `(2√(1-b²), b)`
    pub fn q(self) -> Point {
        point_q(self.0)
    }

    /// `(-2√(1-b²), b)`
    pub fn r(self) -> Point {
        [-point_q(self.0)[0], self.0]
    }

    /// `(2√(1-b²), -b)`
    pub fn s(self) -> Point {
        [point_q(self.0)[0], -self.0]
    }
}

pub fn point_p(b: f64) -> Point {
    [-2.0 * (1.0 - b * b).sqrt(), -b]
}

pub fn point_q(y: f64) -> Point {
    [2.0 * (1.0 - y * y).sqrt(), y]
}

fn domain(b: f64, y: f64) -> Result<(), MaxRealError> {
    if !in_open(b, 0.0, 1.0 / 3.0) || !in_open(y, 0.0, 1.0) {
        return Err(MaxRealError::Domain(format!("need b in (0, 1/3) and y in (0, 1), got b={b}, y={y}")));
    }
    Ok(())
}

/// `|P_b Q_y|²`.
pub fn g_b(b: f64, y: f64) -> Result<f64, MaxRealError> {
    domain(b, y)?;
    let s = (1.0 - y * y).sqrt() + (1.0 - b * b).sqrt();
    Ok(4.0 * s * s + (y + b) * (y + b))
}

/// `d/dy g_b(y)`.
pub fn g_b_prime(b: f64, y: f64) -> Result<f64, MaxRealError> {
    domain(b, y)?;
    Ok(-6.0 * y - 8.0 * y * (1.0 - b * b).sqrt() / (1.0 - y * y).sqrt() + 2.0 * b)
}

/// `(3y - b)²(1 - y²)/y²`, decreasing on `(0, b/3]`.
pub fn h_b(b: f64, y: f64) -> Result<f64, MaxRealError> {
    domain(b, y)?;
    Ok((3.0 * y - b).powi(2) * (1.0 - y * y) / (y * y))
}

/// Bisects a decreasing predicate boundary on `(lo, hi)` down to adjacent floats.
fn bisect(mut lo: f64, mut hi: f64, mut above: impl FnMut(f64) -> bool) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if above(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

fn mb(b: f64) -> f64 {
    let target = 16.0 * (1.0 - b * b);
    bisect(0.0, b / 3.0, |y| (3.0 * y - b).powi(2) * (1.0 - y * y) / (y * y) > target)
}

/// The maximizer `m_b` of `g_b`, the unique root of `h_b(y) = 16(1 - b²)` in `(0, b/3)`.
pub fn solve_mb(b: f64) -> Result<f64, MaxRealError> {
    EllipseParam::new(b)?;
    Ok(mb(b))
}

/// Supremum of `b ↦ m_b` over `(0, 1/3)`.
pub fn mb_sup() -> f64 {
    mb(1.0 / 3.0)
}

/// The `b ∈ (0, 1/3)` with `m_b = y`.
pub fn farthest_param_inverse(y: f64) -> Result<f64, MaxRealError> {
    if !in_open(y, 0.0, mb_sup()) {
        return Err(MaxRealError::Domain(format!("{y} outside the range (0, {}) of b -> m_b", mb_sup())));
    }
    Ok(bisect(0.0, 1.0 / 3.0, |b| mb(b) < y))
}

/// Layout of one component in canonical coordinates, anchors at `(-2,0)` and `(2,0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentPlan {
    pub members: Vec<usize>,
    pub cycle: (usize, usize),
    /// Vertices whose path into the 2-cycle ends at `cycle.0`, excluding it.
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
    /// `levels[i-1] = b_i`, with `b_{i-1} = m_{b_i}`.
    pub levels: Vec<f64>,
    pub delta: f64,
    pub eps: f64,
}

const CANON_A: Point = [-2.0, 0.0];
const CANON_B: Point = [2.0, 0.0];

struct Layout {
    plan: ComponentPlan,
    children: Vec<Vec<usize>>,
    level: Vec<usize>,
}

fn layout(g: &FuncMap, cycle: (usize, usize), members: &[usize], eps: f64) -> Result<Layout, MaxRealError> {
    let n = g.n();
    let part = g.level_partition()?;
    let level = part.level.clone();
    let mut children = vec![Vec::new(); n];
    for &v in members {
        if level[v] > 0 {
            children[g.at(v)].push(v);
        }
    }
    let root_of = |mut v: usize| {
        while level[v] > 0 {
            v = g.at(v);
        }
        v
    };
    let (mut side_a, mut side_b) = (Vec::new(), Vec::new());
    for &v in members.iter().filter(|&&v| level[v] > 0) {
        if root_of(v) == cycle.0 {
            side_a.push(v);
        } else {
            side_b.push(v);
        }
    }
    let depth = members.iter().map(|&v| level[v]).max().unwrap_or(0);
    // b_m puts P_{b_m} at half the locality radius from the anchor
    let dist_to_a = |b: f64| euclidean(&point_p(b), &CANON_A);
    let top = bisect(0.0, 0.3, |b| dist_to_a(b) < 0.5 * eps).min(0.3);
    let mut levels = vec![top; depth];
    for i in (0..depth.saturating_sub(1)).rev() {
        levels[i] = mb(levels[i + 1]);
    }
    Ok(Layout {
        plan: ComponentPlan {
            members: members.to_vec(),
            cycle,
            side_a,
            side_b,
            levels,
            delta: eps / 10.0,
            eps,
        },
        children,
        level,
    })
}

/// Position of a vertex with parameter `t` at level `l` on the given side.
fn place(side_a: bool, l: usize, t: f64) -> Point {
    let p = point_p(t);
    let q = point_q(t);
    match (side_a, l % 2 == 1) {
        (true, true) => q,
        (true, false) => p,
        (false, true) => [-q[0], q[1]],
        (false, false) => [-p[0], p[1]],
    }
}

fn offsets(c: usize) -> impl Iterator<Item = f64> {
    (0..c).map(move |t| t as f64 - (c as f64 - 1.0) / 2.0)
}

/// Canonical coordinates for every member, indexed by global vertex.
fn component_points(lay: &Layout, delta: f64) -> Result<Vec<Option<Point>>, MaxRealError> {
    let plan = &lay.plan;
    let n = lay.level.len();
    let mut pos: Vec<Option<Point>> = vec![None; n];
    let mut param = vec![0.0; n];
    let mut sigma = vec![0.0; n];
    let (a0, b0) = plan.cycle;
    pos[a0] = Some(CANON_A);
    pos[b0] = Some(CANON_B);
    for (root, side_a) in [(a0, true), (b0, false)] {
        let first = &lay.children[root];
        if first.is_empty() {
            continue;
        }
        let b1 = plan.levels[0];
        let half = delta.min(SPREAD * b1);
        let s1 = 2.0 * half / first.len() as f64;
        let mut frontier = Vec::new();
        for (&v, o) in first.iter().zip(offsets(first.len())) {
            param[v] = b1 + s1 * o;
            sigma[v] = s1;
            frontier.push(v);
        }
        while let Some(v) = frontier.pop() {
            pos[v] = Some(place(side_a, lay.level[v], param[v]));
            let kids = &lay.children[v];
            if kids.is_empty() {
                continue;
            }
            let centre = farthest_param_inverse(param[v])?;
            // Children may spread over half of the preimage of v's own gap to its neighbours;
            // the inverse map stretches that gap, so spreads do not collapse with depth.
            let gap = 0.5 * sigma[v];
            let up = farthest_param_inverse((param[v] + gap).min(mb_sup() * (1.0 - 1e-12)))? - centre;
            let down = centre - farthest_param_inverse(param[v] - gap)?;
            let s = CHILD_SPREAD * up.min(down) / kids.len() as f64;
            for (&c, o) in kids.iter().zip(offsets(kids.len())) {
                param[c] = centre + s * o;
                sigma[c] = s;
                frontier.push(c);
            }
        }
    }
    Ok(pos)
}

/// Similarity sending `(-2,0)` to `a` and `(2,0)` to `b`.
fn similarity(a: Point, b: Point) -> impl Fn(Point) -> Point {
    let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    let d = [(b[0] - a[0]) / 4.0, (b[1] - a[1]) / 4.0];
    move |p: Point| [mid[0] + d[0] * p[0] - d[1] * p[1], mid[1] + d[1] * p[0] + d[0] * p[1]]
}

fn local_margin(g: &FuncMap, members: &[usize], pos: &[Option<Point>]) -> Result<f64, MaxRealError> {
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in members.iter().enumerate() {
        index[v] = i;
    }
    let local = FuncMap::new(members.iter().map(|&v| index[g.at(v)]).collect())?;
    let coords = members
        .iter()
        .map(|&v| pos[v].map(|p| p.to_vec()).ok_or_else(|| MaxRealError::Precondition("unplaced vertex".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let config = PointConfig::new(coords)?;
    Ok(certification_margin(&config, None, Some(&local)))
}

/// Canonical layout with the cluster radius shrunk until the fragment's farthest map is `g`.
fn solve_component(
    g: &FuncMap,
    cycle: (usize, usize),
    members: &[usize],
    eps: f64,
) -> Result<(ComponentPlan, Vec<Option<Point>>), MaxRealError> {
    let mut lay = layout(g, cycle, members, eps)?;
    let mut delta = lay.plan.delta;
    for _ in 0..=SHRINK_STEPS {
        let pos = component_points(&lay, delta)?;
        let local = members.iter().all(|&v| {
            pos[v].is_some_and(|p| euclidean(&p, &CANON_A).min(euclidean(&p, &CANON_B)) < eps)
        });
        if local && local_margin(g, members, &pos)? > 0.0 {
            lay.plan.delta = delta;
            return Ok((lay.plan, pos));
        }
        debug!("component {:?}: delta {delta:e} fails, halving", cycle);
        delta /= 2.0;
    }
    Err(MaxRealError::ShrinkExhausted(SHRINK_STEPS))
}

fn require_single_component(g: &FuncMap) -> Result<Vec<Component>, MaxRealError> {
    if let Some(cycle) = g.long_cycle() {
        return Err(MaxRealError::NotMaxRealizable(cycle.iter().map(|v| v + 1).collect()));
    }
    Ok(g.components()?)
}

/// Plan for a single-component map, with `eps` the locality radius in canonical coordinates.
pub fn plan_component(g: &FuncMap, eps: f64) -> Result<ComponentPlan, MaxRealError> {
    let comps = require_single_component(g)?;
    let [(cycle, members)] = comps.as_slice() else {
        return Err(MaxRealError::Precondition(format!("expected one component, found {}", comps.len())));
    };
    Ok(solve_component(g, *cycle, members, eps)?.0)
}

/// Points realizing a single-component `g` as a farthest-point map, all within `eps` of the
/// anchors `a` and `b`. The 2-cycle sits exactly on the anchors.
pub fn realize_component(g: &FuncMap, a: Point, b: Point, eps: f64) -> Result<PointConfig, MaxRealError> {
    let comps = require_single_component(g)?;
    let [(cycle, members)] = comps.as_slice() else {
        return Err(MaxRealError::Precondition(format!("expected one component, found {}", comps.len())));
    };
    let scale = euclidean(&a, &b) / 4.0;
    if !(scale > 0.0) || !(eps > 0.0) {
        return Err(MaxRealError::Precondition("anchors must differ and eps must be positive".into()));
    }
    let (_, pos) = solve_component(g, *cycle, members, eps / scale)?;
    let map = similarity(a, b);
    let coords = pos.into_iter().map(|p| p.map(|p| map(p).to_vec()).unwrap_or_default()).collect();
    Ok(PointConfig::new(coords)?)
}

/// Points in the plane whose farthest-point map is exactly `g`, with all distances distinct.
pub fn max_realize(g: &FuncMap, seed: u64) -> Result<PointConfig, MaxRealError> {
    let comps = require_single_component(g)?;
    let s = comps.len();
    let mut eps = 1.0 / (8.0 * s as f64);
    for _ in 0..=SHRINK_STEPS {
        let mut coords = vec![Vec::new(); g.n()];
        for (i, (cycle, members)) in comps.iter().enumerate() {
            let theta = i as f64 * PI / s as f64 + PI / (4.0 * s as f64);
            let a = [theta.cos(), theta.sin()];
            let map = similarity(a, [-a[0], -a[1]]);
            // the similarity halves lengths
            let (_, pos) = solve_component(g, *cycle, members, 2.0 * eps)?;
            for &v in members {
                coords[v] = pos[v].map(|p| map(p).to_vec()).unwrap_or_default();
            }
        }
        let config = PointConfig::new(coords)?;
        let margin = certification_margin(&config, None, Some(g));
        debug!("eps {eps:e}: farthest margin {margin:e}");
        if margin > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match perturb_with(&config, None, Some(g), PERTURB_SCALE, &mut rng) {
                Ok(out) if certify_maps(&out, None, Some(g))?.certified => return Ok(out),
                Ok(_) | Err(EmbedError::PerturbExhausted(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        debug!("eps {eps:e} fails, halving");
        eps /= 2.0;
    }
    Err(MaxRealError::ShrinkExhausted(SHRINK_STEPS))
}
