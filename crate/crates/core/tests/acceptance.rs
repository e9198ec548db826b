//! Acceptance criteria 1 to 12. Runs without the libtest harness and prints one PASS/FAIL line
//! per criterion; exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use realizer_core::embed::{self, EmbedParams, Family, FamilyInstance};
use realizer_core::funcgraph::{FuncMap, FuncPair};
use realizer_core::maxreal2d::{self, max_realize};
use realizer_core::realize::{self, edge_labeling, metric_witness};
use realizer_core::spherical::{cap_area, cap_ratio_bounds, full_area, solve_span, ALPHA};
use realizer_core::verify::{self, certify, Extreme, PointConfig};

use common::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn within(start: Instant, secs: u64) -> bool {
    start.elapsed() < Duration::from_secs(secs)
}

fn c1_pairs_vs_oracle() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    let mut realizable = 0;
    let mut disagreements = Vec::new();
    for n in 3..=4 {
        for f in all_maps(n) {
            for g in all_maps(n) {
                if (0..n).any(|i| f[i] == g[i]) {
                    continue;
                }
                let p = FuncPair::new(FuncMap::new(f.clone()).unwrap(), FuncMap::new(g).unwrap()).unwrap();
                let nice = realize::check(&p).is_nice;
                let oracle = verify::oracle(&p).unwrap();
                checked += 1;
                realizable += oracle as usize;
                if nice != oracle {
                    disagreements.push((p.f.to_one_based(), p.g.to_one_based()));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        disagreements.is_empty() && within(start, 120),
        format!("{checked} pairs, {realizable} realizable, {} disagreements {disagreements:?}, {secs:.2}s", disagreements.len()),
    )
}

fn c2_single_vs_oracles() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for n in 3..=4 {
        for f in all_maps(n) {
            let f = FuncMap::new(f).unwrap();
            let a = realize::check_single(&f);
            let near = verify::oracle_single(&f, Extreme::Nearest).unwrap();
            let far = verify::oracle_single(&f, Extreme::Farthest).unwrap();
            checked += 1;
            if !(a == near && near == far) {
                bad.push(f.to_one_based());
            }
        }
    }
    verdict(bad.is_empty() && within(start, 60), format!("{checked} maps, disagreements {bad:?}, {:.2}s", start.elapsed().as_secs_f64()))
}

fn nice_sample() -> Vec<FuncPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..1000).map(|_| {
        let n = rng.random_range(3..=64);
        random_nice_pair(n, &mut rng)
    }).collect()
}

fn c3_witness_round_trip(pairs: &[FuncPair]) -> Verdict {
    let start = Instant::now();
    let mut ok = 0;
    for p in pairs {
        let rows = metric_witness(p).unwrap().to_rows();
        let (near, far, distinct) = maps_of_rows(&rows);
        if near == p.f.images() && far == p.g.images() && distinct && is_metric_rows(&rows) {
            ok += 1;
        }
    }
    verdict(ok == pairs.len() && within(start, 60), format!("{ok}/{} round trips, {:.2}s", pairs.len(), start.elapsed().as_secs_f64()))
}

fn c4_labeling(pairs: &[FuncPair]) -> Verdict {
    let mut violations = 0;
    for p in pairs {
        let c = edge_labeling(p).unwrap();
        let n = p.n();
        for j in 0..n {
            let (fj, gj) = (p.f.at(j), p.g.at(j));
            for r in (0..n).filter(|&r| r != j) {
                if r != fj && c.label(j, fj) >= c.label(j, r) {
                    violations += 1;
                }
                if r != gj && c.label(j, gj) <= c.label(j, r) {
                    violations += 1;
                }
            }
        }
    }
    verdict(violations == 0, format!("{violations} violations over {} pairs", pairs.len()))
}

fn c5_simplex() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ok = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.random_range(3..=12);
        let p = random_nice_pair(n, &mut rng);
        let c = embed::simplex(&p).unwrap();
        let (near, far, distinct) = maps_of_rows(&distance_rows(c.coords()));
        let psd = embed::simplex_gram_min_eigenvalue(&p).unwrap();
        worst = worst.min(psd);
        if near == p.f.images() && far == p.g.images() && distinct && psd >= -1e-9 {
            ok += 1;
        }
    }
    verdict(
        ok == 200 && within(start, 60),
        format!("{ok}/200 certified, min Gram eigenvalue {worst:.3e}, {:.2}s", start.elapsed().as_secs_f64()),
    )
}

fn c6_spherical() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut successes, mut certified) = (0, 0);
    for i in 0..100u64 {
        let n = rng.random_range(3..=10);
        let p = random_nice_pair(n, &mut rng);
        if let Some(c) = embed::spherical_embed(&p, &EmbedParams::new(12, i)).unwrap() {
            successes += 1;
            let (near, far, distinct) = maps_of_rows(&distance_rows(c.coords()));
            if c.k() == 12 && near == p.f.images() && far == p.g.images() && distinct {
                certified += 1;
            }
        }
    }
    verdict(
        certified == successes && successes >= 90 && within(start, 300),
        format!("{successes}/100 succeeded, {certified} of those certified, {:.2}s", start.elapsed().as_secs_f64()),
    )
}

fn c7_caps() -> Verdict {
    let start = Instant::now();
    let mut notes = Vec::new();
    let hemi = cap_area(2, PI / 2.0).unwrap();
    if (hemi - 2.0 * PI).abs() > 1e-9 {
        notes.push(format!("cap_area(2, pi/2) = {hemi}"));
    }
    for d in 1..=30 {
        let r = cap_area(d, PI / 2.0).unwrap() / full_area(d);
        if (r - 0.5).abs() > 1e-9 {
            notes.push(format!("d={d} half ratio {r}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    for _ in 0..1000 {
        let k = rng.random_range(3..=30);
        let phi2 = rng.random_range(1e-3..=PI / 2.0);
        let phi1 = rng.random_range(1e-3 * phi2..phi2);
        let (lo, hi) = cap_ratio_bounds(phi1, phi2, k).unwrap();
        let ratio = sin_power_integral(k - 2, phi1, 4000) / sin_power_integral(k - 2, phi2, 4000);
        if !(lo < ratio && ratio < hi) {
            violations += 1;
        }
    }
    if violations > 0 {
        notes.push(format!("{violations} bracket violations"));
    }
    verdict(
        notes.is_empty() && within(start, 30),
        format!("hemisphere 2pi err {:.1e}, 1000 brackets, issues {notes:?}, {:.2}s", (hemi - 2.0 * PI).abs(), start.elapsed().as_secs_f64()),
    )
}

fn gaussian_unit<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Unit vectors with pairwise `|v_i·v_j| ≤ ALPHA`: perturbed coordinate axes in a random frame.
fn near_orthogonal<R: Rng>(s: usize, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    loop {
        let frame: Vec<Vec<f64>> = {
            let mut q: Vec<Vec<f64>> = Vec::new();
            while q.len() < s {
                let mut v = gaussian_unit(k, rng);
                for u in &q {
                    let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
                }
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                q.push(v.into_iter().map(|x| x / n).collect());
            }
            q
        };
        let t = rng.random_range(0.0..ALPHA / 2.0);
        let vs: Vec<Vec<f64>> = frame
            .iter()
            .map(|u| {
                let z = gaussian_unit(k, rng);
                let w: Vec<f64> = u.iter().zip(&z).map(|(a, b)| a + t * b).collect();
                let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                w.into_iter().map(|x| x / n).collect()
            })
            .collect();
        let ok = (0..s).all(|i| (0..i).all(|j| vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum::<f64>().abs() <= ALPHA));
        if ok {
            return vs;
        }
    }
}

fn c8_span() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    let mut worst_norm = 0.0f64;
    for _ in 0..1000 {
        let s = rng.random_range(1..=7);
        let k = rng.random_range(7..=20);
        let vs = near_orthogonal(s, k, &mut rng);
        let a: Vec<f64> = (0..s).map(|_| rng.random_range(-ALPHA..=ALPHA)).collect();
        let v = solve_span(&vs, &a).unwrap();
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
        let residual = vs.iter().zip(&a).map(|(w, t)| (dot(&v, w) - t).abs()).fold(0.0, f64::max);
        let gram: Vec<Vec<f64>> = vs.iter().map(|x| vs.iter().map(|y| dot(x, y)).collect()).collect();
        let coef = solve_dense(gram, a.clone());
        let expected: Vec<f64> = (0..k).map(|c| coef.iter().zip(&vs).map(|(ci, w)| ci * w[c]).sum()).collect();
        let gap = v.iter().zip(&expected).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let norm = dot(&v, &v).sqrt();
        worst_norm = worst_norm.max(norm / ALPHA);
        if residual > 1e-9 || norm > 8.0 * ALPHA || gap > 1e-12 {
            violations += 1;
        }
    }
    verdict(
        violations == 0,
        format!("{violations} violations, max ‖v‖/α = {worst_norm:.3}, {:.2}s", start.elapsed().as_secs_f64()),
    )
}

fn c9_bounds() -> Verdict {
    let b4 = embed::bounds(4).unwrap();
    let m = b4.upper_m.unwrap();
    let expected_m = 1.0 + 6.0 / (PI / 12.0).sin();
    let pack = embed::bounds(2).unwrap().pack_bk;
    let expected_pack = PI / ((2.0f64 / 3.0).acos() / 2.0);
    verdict(
        (m - expected_m).abs() <= 1e-9 && (pack - expected_pack).abs() <= 1e-9,
        format!("upper_m(4) = {m:.12} vs {expected_m:.12}; pack_Bk(2) = {pack:.12} vs {expected_pack:.12}"),
    )
}

fn c10_maxreal() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ok = 0;
    let mut failures = Vec::new();
    for i in 0..200u64 {
        let n = rng.random_range(3..=25);
        let comps = rng.random_range(1..=4usize.min(n / 2));
        let g = random_max_realizable(n, comps, &mut rng);
        match max_realize(&g, i) {
            Ok(c) => {
                let (_, far, distinct) = maps_of_rows(&distance_rows(c.coords()));
                if c.k() == 2 && far == g.images() && distinct {
                    ok += 1;
                } else {
                    failures.push(format!("{:?}: uncertified", g.to_one_based()));
                }
            }
            Err(e) => failures.push(format!("{:?}: {e}", g.to_one_based())),
        }
    }
    failures.truncate(3);
    verdict(
        ok == 200 && within(start, 180),
        format!("{ok}/200 certified, {:.2}s, first failures {failures:?}", start.elapsed().as_secs_f64()),
    )
}

fn g_oracle(b: f64, y: f64) -> f64 {
    let p = [-2.0 * (1.0 - b * b).sqrt(), -b];
    let q = [2.0 * (1.0 - y * y).sqrt(), y];
    (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
}

fn c11_ellipse() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid: Vec<f64> = (0..100).map(|i| 0.01 + 0.32 * i as f64 / 99.0).collect();
    let ms: Vec<f64> = grid.iter().map(|&b| maxreal2d::solve_mb(b).unwrap()).collect();
    let mut violations = 0;
    for (&b, &m) in grid.iter().zip(&ms) {
        if m >= b / 3.0 {
            violations += 1;
        }
        let top = g_oracle(b, m);
        for _ in 0..1000 {
            let y: f64 = rng.random_range(1e-9..1.0);
            if g_oracle(b, y) > top * (1.0 + 1e-15) {
                violations += 1;
            }
        }
    }
    let steps: Vec<f64> = ms.windows(2).map(|w| w[1] - w[0]).collect();
    violations += steps.iter().filter(|&&s| s <= 0.0).count();
    violations += steps.windows(2).filter(|w| w[1] > 10.0 * w[0] || w[0] > 10.0 * w[1]).count();
    let m03 = maxreal2d::solve_mb(0.3).unwrap();
    let grid_max = (1..200_000)
        .map(|i| i as f64 * 0.5e-6)
        .max_by(|&x, &y| g_oracle(0.3, x).total_cmp(&g_oracle(0.3, y)))
        .unwrap();
    let spot = (m03 - grid_max).abs() <= 1e-5 && (m03 - 0.043997).abs() <= 1e-5;
    verdict(violations == 0 && spot, format!("{violations} violations; m_0.3 = {m03:.9}, grid argmax {grid_max:.7}"))
}

/// Hinge loss on squared distances for the nearest/farthest orders, with its gradient.
fn croft_loss(x: &[[f64; 2]], f: &[usize], g: &[usize], margin: f64, grad: &mut [[f64; 2]]) -> f64 {
    let n = x.len();
    let d2 = |a: usize, b: usize| (x[a][0] - x[b][0]).powi(2) + (x[a][1] - x[b][1]).powi(2);
    grad.iter_mut().for_each(|v| *v = [0.0, 0.0]);
    let mut loss = 0.0;
    let mut add = |i: usize, small: usize, large: usize, grad: &mut [[f64; 2]]| {
        let h = d2(i, small) - d2(i, large) + margin;
        if h > 0.0 {
            loss += h;
            for c in 0..2 {
                grad[i][c] += 2.0 * (x[i][c] - x[small][c]) - 2.0 * (x[i][c] - x[large][c]);
                grad[small][c] -= 2.0 * (x[i][c] - x[small][c]);
                grad[large][c] += 2.0 * (x[i][c] - x[large][c]);
            }
        }
    };
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            if j != f[i] {
                add(i, f[i], j, grad);
            }
            if j != g[i] {
                add(i, j, g[i], grad);
            }
        }
    }
    loss
}

fn c12_croft6_planar() -> Verdict {
    let start = Instant::now();
    let FamilyInstance::Pair(p) = embed::family(Family::Croft6).unwrap() else { unreachable!() };
    let (f, g) = (p.f.images().to_vec(), p.g.images().to_vec());
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut certified = 0;
    let mut best = f64::INFINITY;
    let mut grad = [[0.0; 2]; 6];
    for _ in 0..100_000 {
        let mut x = [[0.0; 2]; 6];
        for pt in &mut x {
            *pt = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        }
        let mut loss = croft_loss(&x, &f, &g, 1e-3, &mut grad);
        let mut step = 0.05;
        for _ in 0..30 {
            if loss == 0.0 {
                break;
            }
            let trial: Vec<[f64; 2]> = x.iter().zip(&grad).map(|(a, d)| [a[0] - step * d[0], a[1] - step * d[1]]).collect();
            let mut tg = [[0.0; 2]; 6];
            let tl = croft_loss(&trial, &f, &g, 1e-3, &mut tg);
            if tl < loss {
                x.copy_from_slice(&trial);
                grad = tg;
                loss = tl;
                step *= 1.2;
            } else {
                step *= 0.5;
            }
        }
        best = best.min(loss);
        let pts: Vec<Vec<f64>> = x.iter().map(|a| a.to_vec()).collect();
        if let Ok(c) = PointConfig::new(pts) {
            if certify(&c, &p).unwrap().certified {
                certified += 1;
            }
        }
    }
    verdict(
        certified == 0 && within(start, 300),
        format!("{certified} of 1e5 polished planar configurations certify, best loss {best:.3e}, {:.2}s", start.elapsed().as_secs_f64()),
    )
}

fn main() -> ExitCode {
    let pairs = nice_sample();
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("1 exhaustive pair oracle", Box::new(c1_pairs_vs_oracle)),
        ("2 exhaustive single-map oracles", Box::new(c2_single_vs_oracles)),
        ("3 witness round trip", Box::new(|| c3_witness_round_trip(&pairs))),
        ("4 labeling inequalities", Box::new(|| c4_labeling(&pairs))),
        ("5 simplex embedding", Box::new(c5_simplex)),
        ("6 spherical embedding k=12", Box::new(c6_spherical)),
        ("7 cap numerics", Box::new(c7_caps)),
        ("8 span solver", Box::new(c8_span)),
        ("9 bound figures", Box::new(c9_bounds)),
        ("10 planar max-realization", Box::new(c10_maxreal)),
        ("11 ellipse root finding", Box::new(c11_ellipse)),
        ("12 croft6 planar negative control (soft)", Box::new(c12_croft6_planar)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let v = run();
        failed += !v.pass as usize;
        println!("{} criterion {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
