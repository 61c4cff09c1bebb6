//! Generators and brute-force oracles shared by the integration suites.
#![allow(dead_code)]

use lensrank::dataset::View2D;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Labelled points around `k` random centres, rescaled to the unit square.
/// Every class gets at least one point.
pub fn random_view(rng: &mut ChaCha8Rng, n: usize, k: usize) -> View2D {
    let centres: Vec<[f64; 2]> = (0..k).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let spread: f64 = rng.gen_range(0.01..0.4);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = if i < k { i } else { rng.gen_range(0..k) };
        let p = [
            centres[c][0] + spread * (rng.gen::<f64>() - 0.5),
            centres[c][1] + spread * (rng.gen::<f64>() - 0.5),
        ];
        points.push(p);
        labels.push(c);
    }
    View2D::from_points(points, labels).unwrap().normalized()
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn groups(v: &View2D) -> Vec<Vec<[f64; 2]>> {
    let mut g = vec![Vec::new(); v.n_classes];
    for (p, &l) in v.points.iter().zip(&v.labels) {
        g[l].push(*p);
    }
    g.into_iter().filter(|g| !g.is_empty()).collect()
}

fn centroid(g: &[[f64; 2]]) -> [f64; 2] {
    let n = g.len() as f64;
    [
        g.iter().map(|p| p[0]).sum::<f64>() / n,
        g.iter().map(|p| p[1]).sum::<f64>() / n,
    ]
}

/// C index by sorting every pairwise distance. `None` when undefined.
pub fn c_index_oracle(v: &View2D) -> Option<f64> {
    let mut all = Vec::new();
    let mut within = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = dist(v.points[i], v.points[j]);
            all.push(d);
            if v.labels[i] == v.labels[j] {
                within.push(d);
            }
        }
    }
    let p = within.len();
    all.sort_by(f64::total_cmp);
    let sd = neumaier(within);
    let lo = neumaier(all[..p].iter().copied());
    let hi = neumaier(all[all.len() - p..].iter().copied());
    (p > 0 && hi > lo).then(|| ((sd - lo) / (hi - lo)).clamp(0.0, 1.0))
}

/// Raw Davies-Bouldin value: mean over classes of the smallest
/// separation-to-scatter ratio against any other class.
pub fn davies_bouldin_oracle(v: &View2D) -> Option<f64> {
    let g = groups(v);
    if g.len() < 2 {
        return None;
    }
    let cents: Vec<_> = g.iter().map(|c| centroid(c)).collect();
    let scatter: Vec<f64> = g
        .iter()
        .zip(&cents)
        .map(|(c, m)| c.iter().map(|p| dist(*p, *m)).sum::<f64>() / c.len() as f64)
        .collect();
    let mut total = 0.0;
    for i in 0..g.len() {
        let mut best = f64::INFINITY;
        for j in 0..g.len() {
            if i == j {
                continue;
            }
            let sep = dist(cents[i], cents[j]);
            let den = scatter[i] + scatter[j];
            let r = if den > 0.0 {
                sep / den
            } else if sep > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            best = best.min(r);
        }
        total += best;
    }
    Some(total / g.len() as f64)
}

/// Raw Dunn value: smallest single-link class distance over largest diameter.
pub fn dunn_oracle(v: &View2D) -> Option<f64> {
    let g = groups(v);
    if g.len() < 2 {
        return None;
    }
    let mut sep = f64::INFINITY;
    let mut diam = 0.0f64;
    for (i, a) in g.iter().enumerate() {
        for p in a {
            for q in a {
                diam = diam.max(dist(*p, *q));
            }
        }
        for b in &g[i + 1..] {
            for p in a {
                for q in b {
                    sep = sep.min(dist(*p, *q));
                }
            }
        }
    }
    match (sep > 0.0, diam > 0.0) {
        (_, true) => Some(sep / diam),
        (true, false) => Some(f64::INFINITY),
        (false, false) => None,
    }
}

/// Fraction of points not strictly closer to their own centroid than to
/// every other one.
pub fn ccm_oracle(v: &View2D) -> Option<f64> {
    let mut cents = vec![None; v.n_classes];
    for (c, slot) in cents.iter_mut().enumerate() {
        let members: Vec<_> = v.points.iter().zip(&v.labels).filter(|(_, &l)| l == c).map(|(p, _)| *p).collect();
        if !members.is_empty() {
            *slot = Some(centroid(&members));
        }
    }
    if cents.iter().flatten().count() < 2 {
        return None;
    }
    let bad = v
        .points
        .iter()
        .zip(&v.labels)
        .filter(|(p, &l)| {
            let own = dist(**p, cents[l].unwrap());
            cents
                .iter()
                .enumerate()
                .any(|(c, m)| c != l && m.is_some_and(|m| dist(**p, m) <= own))
        })
        .count();
    Some(bad as f64 / v.len() as f64)
}

/// det(W) / det(W + B) from explicit scatter sums.
pub fn lda_oracle(v: &View2D) -> f64 {
    let grand = centroid(&v.points);
    let mut w = [[0.0; 2]; 2];
    let mut t = [[0.0; 2]; 2];
    let g = groups(v);
    for c in &g {
        let m = centroid(c);
        for p in c {
            for a in 0..2 {
                for b in 0..2 {
                    w[a][b] += (p[a] - m[a]) * (p[b] - m[b]);
                    t[a][b] += (p[a] - grand[a]) * (p[b] - grand[b]);
                }
            }
        }
    }
    let det = |m: [[f64; 2]; 2]| m[0][0] * m[1][1] - m[0][1] * m[1][0];
    det(w) / det(t)
}

/// Maximum of the soft-margin SVM dual by enumerating every assignment of
/// each multiplier to lower bound, upper bound or free, and solving the
/// equality-constrained stationarity system on the free set.
pub fn svm_dual_oracle(points: &[[f64; 2]], y: &[f64], c: f64) -> f64 {
    let n = points.len();
    let q = |i: usize, j: usize| y[i] * y[j] * (points[i][0] * points[j][0] + points[i][1] * points[j][1]);
    let objective = |a: &[f64]| {
        let mut s = a.iter().sum::<f64>();
        for i in 0..n {
            for j in 0..n {
                s -= 0.5 * a[i] * a[j] * q(i, j);
            }
        }
        s
    };
    let mut best = 0.0f64;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut r = code;
        for s in state.iter_mut() {
            *s = (r % 3) as u8;
            r /= 3;
        }
        let mut alpha: Vec<f64> = state.iter().map(|&s| if s == 1 { c } else { 0.0 }).collect();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        if !free.is_empty() {
            let m = free.len() + 1;
            let mut a = vec![vec![0.0; m + 1]; m];
            for (r, &i) in free.iter().enumerate() {
                for (k, &j) in free.iter().enumerate() {
                    a[r][k] = q(i, j);
                }
                a[r][m - 1] = y[i];
                let fixed: f64 = (0..n).filter(|&j| state[j] != 2).map(|j| q(i, j) * alpha[j]).sum();
                a[r][m] = 1.0 - fixed;
            }
            for (k, &j) in free.iter().enumerate() {
                a[m - 1][k] = y[j];
            }
            a[m - 1][m] = -(0..n).filter(|&j| state[j] != 2).map(|j| y[j] * alpha[j]).sum::<f64>();
            let Some(sol) = solve(a) else { continue };
            for (k, &j) in free.iter().enumerate() {
                alpha[j] = sol[k];
            }
        }
        let feasible = alpha.iter().all(|&v| (-1e-9..=c + 1e-9).contains(&v))
            && alpha.iter().zip(y).map(|(a, y)| a * y).sum::<f64>().abs() < 1e-9;
        if feasible {
            best = best.max(objective(&alpha));
        }
    }
    best
}

fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..=m {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
    }
    Some((0..m).map(|i| a[i][m] / a[i][i]).collect())
}
