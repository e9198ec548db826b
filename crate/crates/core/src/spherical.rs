//! Hyperspherical caps: areas, ratio bounds, the near-orthogonal span solver, and sampling on
//! intersections of cap boundaries.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

/// Largest number of simultaneous boundary constraints the span solver accepts.
pub const MAX_SPAN: usize = 7;
/// Dot-product and target bound used by the cap construction.
pub const ALPHA: f64 = 1.0 / 500.0;
/// Default rejection budget for [`sample_on`].
pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

const QUAD_TOL: f64 = 1e-13;
const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SphericalError {
    #[error("sphere dimension must be at least 1, got {0}")]
    Dimension(usize),
    #[error("angle {0} outside the allowed range")]
    Angle(f64),
    #[error("need {lo} <= count <= {hi}, got {got}")]
    Count { got: usize, lo: usize, hi: usize },
    #[error("ambient dimension {k} too small (need at least {min})")]
    Ambient { k: usize, min: usize },
    #[error("vector {0} has the wrong length or is not a unit vector")]
    NotUnit(usize),
    #[error("dot product or target {value} exceeds bound {bound}")]
    TooLarge { value: f64, bound: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn unit_vector(v: &[f64], k: usize, index: usize) -> Result<(), SphericalError> {
    if v.len() != k || (norm(v) - 1.0).abs() > 1e-12 {
        Err(SphericalError::NotUnit(index))
    } else {
        Ok(())
    }
}

/// `C_{v,φ}`: the unit vectors within angle `angle` of `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereCap {
    center: Vec<f64>,
    angle: f64,
}

impl SphereCap {
    pub fn new(center: Vec<f64>, angle: f64) -> Result<Self, SphericalError> {
        unit_vector(&center, center.len(), 0)?;
        if !(angle > 0.0 && angle < PI) {
            return Err(SphericalError::Angle(angle));
        }
        Ok(Self { center, angle })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Closed-cap membership, `∠(x, center) ≤ angle`.
    pub fn contains(&self, x: &[f64]) -> bool {
        dot(x, &self.center) >= self.angle.cos()
    }
}

/// The sphere `{offset + radius·u : u a unit combination of basis}` cut out of `S^{k-1}` by a set
/// of cap boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySphere {
    offset: Vec<f64>,
    basis: Vec<Vec<f64>>,
    radius: f64,
}

impl BoundarySphere {
    /// Builds a boundary sphere, checking orthonormality of the basis and its orthogonality to
    /// the offset.
    pub fn new(offset: Vec<f64>, basis: Vec<Vec<f64>>, radius: f64) -> Result<Self, SphericalError> {
        let k = offset.len();
        if !(radius > 0.0) || basis.is_empty() {
            return Err(SphericalError::Numerical("degenerate boundary sphere".into()));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.len() != k || (norm(b) - 1.0).abs() > 1e-10 || dot(b, &offset).abs() > 1e-10 {
                return Err(SphericalError::NotUnit(i));
            }
            for c in &basis[..i] {
                if dot(b, c).abs() > 1e-10 {
                    return Err(SphericalError::Numerical("basis not orthonormal".into()));
                }
            }
        }
        Ok(Self { offset, basis, radius })
    }

    /// The whole unit sphere `S^{k-1}`.
    pub fn full(k: usize) -> Self {
        let basis = (0..k)
            .map(|i| {
                let mut e = vec![0.0; k];
                e[i] = 1.0;
                e
            })
            .collect();
        Self { offset: vec![0.0; k], basis, radius: 1.0 }
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn ambient(&self) -> usize {
        self.offset.len()
    }

    /// Maps a unit vector in basis coordinates to the sphere.
    pub fn point(&self, u: &[f64]) -> Vec<f64> {
        let mut x = self.offset.clone();
        for (b, &c) in self.basis.iter().zip(u) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += self.radius * c * bi;
            }
        }
        x
    }

    /// Uniformly random point.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let g: Vec<f64> = (0..self.basis.len()).map(|_| rng.sample(StandardNormal)).collect();
            let r = norm(&g);
            if r > 1e-300 {
                let u: Vec<f64> = g.iter().map(|x| x / r).collect();
                return self.point(&u);
            }
        }
    }
}

/// Area of `S^d ⊂ R^{d+1}`.
pub fn full_area(d: usize) -> f64 {
    let h = (d as f64 + 1.0) / 2.0;
    (2f64.ln() + h * PI.ln() - ln_gamma(h)).exp()
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    const PANELS: usize = 16;
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == PANELS { b } else { lo + h };
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            rec(f, lo, hi, fa, fm, fb, whole, tol / PANELS as f64, 40)
        })
        .sum()
}

/// Natural log of [`cap_area`]; finite for every `phi > 0` even when the area underflows.
pub fn ln_cap_area(d: usize, phi: f64) -> Result<f64, SphericalError> {
    if d == 0 {
        return Err(SphericalError::Dimension(d));
    }
    if !(0.0..=PI).contains(&phi) {
        return Err(SphericalError::Angle(phi));
    }
    if phi == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let h = d as f64 / 2.0;
    let ln_coef = 2f64.ln() + h * PI.ln() - ln_gamma(h);
    if d == 1 {
        return Ok(ln_coef + phi.ln());
    }
    // integrand scaled by its maximum on [0, phi]
    let p = (d - 1) as f64;
    let ln_peak = p * phi.min(PI / 2.0).sin().ln();
    let integrand = |t: f64| {
        let s = t.sin();
        if s <= 0.0 {
            0.0
        } else {
            (p * s.ln() - ln_peak).exp()
        }
    };
    let integral = adaptive_simpson(&integrand, 0.0, phi, QUAD_TOL);
    Ok(ln_coef + ln_peak + integral.ln())
}

/// Surface area of a cap of angular radius `phi` on `S^d ⊂ R^{d+1}`.
pub fn cap_area(d: usize, phi: f64) -> Result<f64, SphericalError> {
    ln_cap_area(d, phi).map(f64::exp)
}

/// Exponential bounds `(lower, upper)` on `cap_area(k-1, phi1) / cap_area(k-1, phi2)`.
pub fn cap_ratio_bounds(phi1: f64, phi2: f64, k: usize) -> Result<(f64, f64), SphericalError> {
    if k < 3 {
        return Err(SphericalError::Ambient { k, min: 3 });
    }
    if !(phi1 > 0.0 && phi1 < phi2 && phi2 <= PI / 2.0) {
        return Err(SphericalError::Angle(phi1));
    }
    let e = (k - 2) as f64;
    let lower = (phi1.ln() + e * (phi1 / 2.0).sin().ln() - 2f64.ln() - phi2.ln() - e * phi2.sin().ln()).exp();
    let upper = (2f64.ln() + phi1.ln() + e * phi1.sin().ln()
        - (phi2 - phi1).ln()
        - e * ((phi1 + phi2) / 2.0).sin().ln())
    .exp();
    Ok((lower, upper))
}

/// Solves the Gram system for the vector in `span(vs)` with `v·vs[i] = targets[i]`, without
/// size or magnitude limits.
pub(crate) fn span_vector(vs: &[Vec<f64>], targets: &[f64]) -> Result<Vec<f64>, SphericalError> {
    let s = vs.len();
    let k = vs.first().map_or(0, Vec::len);
    let gram = DMatrix::from_fn(s, s, |i, j| dot(&vs[i], &vs[j]));
    let rhs = DVector::from_column_slice(targets);
    let coef = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| SphericalError::Numerical("singular Gram matrix".into()))?;
    let mut v = vec![0.0; k];
    for (c, w) in coef.iter().zip(vs) {
        for (vi, wi) in v.iter_mut().zip(w) {
            *vi += c * wi;
        }
    }
    let residual = vs.iter().zip(targets).map(|(w, a)| (dot(&v, w) - a).abs()).fold(0.0, f64::max);
    if residual > RESIDUAL_TOL {
        return Err(SphericalError::Numerical(format!("span residual {residual:e}")));
    }
    Ok(v)
}

/// The unique `v ∈ span(vs)` with `v·vs[i] = targets[i]` for nearly orthogonal unit vectors and
/// small targets; `‖v‖ ≤ 8α` where `α` bounds all dot products and targets.
pub fn solve_span(vs: &[Vec<f64>], targets: &[f64]) -> Result<Vec<f64>, SphericalError> {
    let s = vs.len();
    if !(1..=MAX_SPAN).contains(&s) || targets.len() != s {
        return Err(SphericalError::Count { got: s, lo: 1, hi: MAX_SPAN });
    }
    let k = vs[0].len();
    if k < s {
        return Err(SphericalError::Ambient { k, min: s });
    }
    for (i, v) in vs.iter().enumerate() {
        unit_vector(v, k, i)?;
    }
    let mut alpha = targets.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    for i in 0..s {
        for j in 0..i {
            alpha = alpha.max(dot(&vs[i], &vs[j]).abs());
        }
    }
    if !(alpha < 0.01) {
        return Err(SphericalError::TooLarge { value: alpha, bound: 0.01 });
    }
    let v = span_vector(vs, targets)?;
    let len = norm(&v);
    if len > 8.0 * alpha + 1e-15 {
        return Err(SphericalError::Numerical(format!("span vector norm {len:e} exceeds 8·{alpha:e}")));
    }
    Ok(v)
}

/// Orthonormal basis of the orthogonal complement of `span(vs)` in `R^k`.
fn complement_basis(vs: &[Vec<f64>], k: usize) -> Result<Vec<Vec<f64>>, SphericalError> {
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(k);
    let reduce = |mut w: Vec<f64>, frame: &Vec<Vec<f64>>| {
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in frame {
                let c = dot(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        w
    };
    for v in vs {
        let w = reduce(v.clone(), &frame);
        let r = norm(&w);
        if r < 1e-6 {
            return Err(SphericalError::Numerical("dependent constraint vectors".into()));
        }
        frame.push(w.iter().map(|x| x / r).collect());
    }
    let fixed = frame.len();
    // Complete with the coordinate axis of largest residual; the squared residuals sum to the
    // remaining dimension, so the best one has norm at least 1/sqrt(k).
    while frame.len() < k {
        let (w, r) = (0..k)
            .map(|i| {
                let mut e = vec![0.0; k];
                e[i] = 1.0;
                let w = reduce(e, &frame);
                let r = norm(&w);
                (w, r)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("k > 0");
        if r < 0.5 / (k as f64).sqrt() {
            return Err(SphericalError::Numerical("complement basis incomplete".into()));
        }
        frame.push(w.iter().map(|x| x / r).collect());
    }
    Ok(frame.split_off(fixed))
}

/// `∩ {x ∈ S^{k-1} : x·centers[i] = cosines[i]}` without the size and magnitude restrictions of
/// [`boundary_intersection`].
pub(crate) fn intersect(centers: &[Vec<f64>], cosines: &[f64], k: usize) -> Result<BoundarySphere, SphericalError> {
    if centers.is_empty() {
        return Ok(BoundarySphere::full(k));
    }
    if centers.len() + 2 > k {
        return Err(SphericalError::Ambient { k, min: centers.len() + 2 });
    }
    let offset = span_vector(centers, cosines)?;
    let r2 = 1.0 - dot(&offset, &offset);
    if !(r2 > 0.0) {
        return Err(SphericalError::Numerical("empty intersection".into()));
    }
    let basis = complement_basis(centers, k)?;
    Ok(BoundarySphere { offset, basis, radius: r2.sqrt() })
}

/// `T = ∩ ∂C_i` for at most seven nearly orthogonal caps with angles near `π/2`.
pub fn boundary_intersection(caps: &[SphereCap], k: usize) -> Result<BoundarySphere, SphericalError> {
    boundary_intersection_alpha(caps, k, ALPHA)
}

/// [`boundary_intersection`] with a caller-chosen bound on dot products and cosines (below 1/100).
pub fn boundary_intersection_alpha(caps: &[SphereCap], k: usize, alpha: f64) -> Result<BoundarySphere, SphericalError> {
    if !(alpha > 0.0 && alpha < 0.01) {
        return Err(SphericalError::TooLarge { value: alpha, bound: 0.01 });
    }
    if !(1..=MAX_SPAN).contains(&caps.len()) {
        return Err(SphericalError::Count { got: caps.len(), lo: 1, hi: MAX_SPAN });
    }
    if k < 9 {
        return Err(SphericalError::Ambient { k, min: 9 });
    }
    let centers: Vec<Vec<f64>> = caps.iter().map(|c| c.center.clone()).collect();
    let cosines: Vec<f64> = caps.iter().map(|c| c.angle.cos()).collect();
    for (i, c) in centers.iter().enumerate() {
        unit_vector(c, k, i)?;
    }
    let bound = alpha + 1e-12;
    for (i, &a) in cosines.iter().enumerate() {
        if a.abs() > bound {
            return Err(SphericalError::TooLarge { value: a, bound: alpha });
        }
        for c in &centers[..i] {
            let d = dot(c, &centers[i]);
            if d.abs() > bound {
                return Err(SphericalError::TooLarge { value: d, bound: alpha });
            }
        }
    }
    let offset = solve_span(&centers, &cosines)?;
    let radius = (1.0 - dot(&offset, &offset)).sqrt();
    let basis = complement_basis(&centers, k)?;
    Ok(BoundarySphere { offset, basis, radius })
}

/// Rejection sampling on `b`, avoiding every forbidden closed cap.
pub fn sample_on_with<R: Rng + ?Sized>(
    b: &BoundarySphere,
    forbidden: &[SphereCap],
    rng: &mut R,
    max_attempts: usize,
) -> Option<Vec<f64>> {
    let thresholds: Vec<f64> = forbidden.iter().map(|c| c.angle.cos()).collect();
    (0..max_attempts).find_map(|_| {
        let x = b.random_point(rng);
        forbidden.iter().zip(&thresholds).all(|(c, &t)| dot(&x, &c.center) < t).then_some(x)
    })
}

/// Seeded form of [`sample_on_with`].
pub fn sample_on(b: &BoundarySphere, forbidden: &[SphereCap], seed: u64, max_attempts: usize) -> Option<Vec<f64>> {
    sample_on_with(b, forbidden, &mut ChaCha8Rng::seed_from_u64(seed), max_attempts)
}
