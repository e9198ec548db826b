//! Random instance generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use realizer_core::funcgraph::{FuncMap, FuncPair};
use realizer_core::realize;

/// A random in-forest onto `cycles` disjoint 2-cycles: vertices are visited in random order,
/// the first `2·cycles` pair up and every later vertex points to a uniformly chosen earlier one
/// other than `avoid[v]`. `None` when some vertex has no admissible parent.
pub fn random_forest<R: Rng>(n: usize, cycles: usize, avoid: Option<&[usize]>, rng: &mut R) -> Option<Vec<usize>> {
    assert!(cycles >= 1 && 2 * cycles <= n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut image = vec![usize::MAX; n];
    for c in 0..cycles {
        let (a, b) = (order[2 * c], order[2 * c + 1]);
        image[a] = b;
        image[b] = a;
    }
    for idx in 2 * cycles..n {
        let v = order[idx];
        let choices: Vec<usize> = order[..idx].iter().copied().filter(|&u| avoid.is_none_or(|a| a[v] != u)).collect();
        image[v] = *choices.get(rng.random_range(0..choices.len().max(1)))?;
    }
    if let Some(a) = avoid {
        if (0..n).any(|v| image[v] == a[v]) {
            return None;
        }
    }
    Some(image)
}

pub fn random_cycle_count<R: Rng>(n: usize, max: usize, rng: &mut R) -> usize {
    rng.random_range(1..=max.min(n / 2))
}

/// A random nice pair on `n` vertices, by rejection.
pub fn random_nice_pair<R: Rng>(n: usize, rng: &mut R) -> FuncPair {
    loop {
        let cf = random_cycle_count(n, 3, rng);
        let cg = random_cycle_count(n, 3, rng);
        let Some(f) = random_forest(n, cf, None, rng) else { continue };
        let Some(g) = random_forest(n, cg, Some(&f), rng) else { continue };
        let p = FuncPair::new(FuncMap::new(f).unwrap(), FuncMap::new(g).unwrap()).unwrap();
        if realize::check(&p).is_nice {
            return p;
        }
    }
}

/// A random max-realizable map with `components` components.
pub fn random_max_realizable<R: Rng>(n: usize, components: usize, rng: &mut R) -> FuncMap {
    FuncMap::new(random_forest(n, components, None, rng).unwrap()).unwrap()
}

/// Every fixed-point-free map on `n` vertices.
pub fn all_maps(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for i in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..n).filter(move |&j| j != i).map(move |j| {
                    let mut v = prefix.clone();
                    v.push(j);
                    v
                })
            })
            .collect();
    }
    out
}

/// Nearest and farthest maps read off a symmetric matrix, and whether the off-diagonal
/// entries are pairwise distinct.
pub fn maps_of_rows(d: &[Vec<f64>]) -> (Vec<usize>, Vec<usize>, bool) {
    let n = d.len();
    let mut near = vec![0; n];
    let mut far = vec![0; n];
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        near[i] = *others.iter().min_by(|&&a, &&b| d[i][a].total_cmp(&d[i][b])).unwrap();
        far[i] = *others.iter().max_by(|&&a, &&b| d[i][a].total_cmp(&d[i][b])).unwrap();
    }
    let mut values: Vec<f64> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| d[i][j]).collect();
    values.sort_by(f64::total_cmp);
    let distinct = values.windows(2).all(|w| w[0] < w[1]);
    (near, far, distinct)
}

pub fn distance_rows(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| points.iter().map(|b| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()).collect())
        .collect()
}

/// Symmetric, zero diagonal, positive off-diagonal, triangle inequality.
pub fn is_metric_rows(d: &[Vec<f64>]) -> bool {
    let n = d.len();
    (0..n).all(|i| {
        d[i][i] == 0.0
            && (0..n).all(|j| {
                d[i][j] == d[j][i] && (i == j || d[i][j] > 0.0) && (0..n).all(|k| d[i][k] <= d[i][j] + d[j][k])
            })
    })
}

/// `∫₀^φ sin^m θ dθ` by composite Simpson.
pub fn sin_power_integral(m: usize, phi: f64, panels: usize) -> f64 {
    let h = phi / panels as f64;
    let f = |t: f64| t.sin().powi(m as i32);
    let mut s = f(0.0) + f(phi);
    for i in 1..panels {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= m * a[c][k];
            }
            b[r] -= m * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}
