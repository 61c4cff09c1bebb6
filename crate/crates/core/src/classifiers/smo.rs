//! Linear soft-margin SVM trained by sequential minimal optimization.
//!
//! The dual `min 1/2 a'Qa - e'a` subject to `0 <= a_i <= C`, `y'a = 0` with
//! `Q_ij = y_i y_j <x_i, x_j>` is solved by repeatedly optimizing the pair of
//! multipliers chosen by second-order working-set selection, stopping when
//! the maximal KKT violation falls below the tolerance.

use super::{argmax, Classify, Learner};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoParams {
    pub c: f64,
    pub tol: f64,
    /// The pair-update budget is `max_passes * n * n` (at least 1000).
    pub max_passes: usize,
}

impl Default for SmoParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10,
        }
    }
}

/// A trained two-class linear SVM: `f(x) = <w, x> + b`, positive side is `+1`.
#[derive(Debug, Clone)]
pub struct LinearSvm {
    pub alpha: Vec<f64>,
    pub w: [f64; 2],
    pub b: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl LinearSvm {
    /// Trains on `points` with targets `y` in `{-1, +1}`.
    pub fn train(points: &[[f64; 2]], y: &[f64], params: &SmoParams) -> LinearSvm {
        let n = points.len();
        let c = params.c;
        let q = |i: usize, j: usize| y[i] * y[j] * dot(points[i], points[j]);
        let mut alpha = vec![0.0; n];
        let mut grad = vec![-1.0; n];
        let max_iter = params.max_passes.saturating_mul(n).saturating_mul(n).max(1000);
        let mut converged = false;
        let mut iterations = 0;

        let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
        let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

        while iterations < max_iter {
            // i: maximal violator in I_up
            let mut gmax = f64::NEG_INFINITY;
            let mut i_sel = None;
            for t in 0..n {
                if in_up(alpha[t], y[t]) {
                    let v = -y[t] * grad[t];
                    if v > gmax {
                        gmax = v;
                        i_sel = Some(t);
                    }
                }
            }
            // j: second-order choice in I_low
            let mut gmin = f64::INFINITY;
            let mut j_sel = None;
            let mut obj_min = f64::INFINITY;
            if let Some(i) = i_sel {
                let qii = dot(points[i], points[i]);
                for t in 0..n {
                    if !in_low(alpha[t], y[t]) {
                        continue;
                    }
                    let v = -y[t] * grad[t];
                    gmin = gmin.min(v);
                    let diff = gmax - v;
                    if diff > 0.0 {
                        let qtt = dot(points[t], points[t]);
                        let a = (qii + qtt - 2.0 * dot(points[i], points[t])).max(TAU);
                        let obj = -(diff * diff) / a;
                        if obj < obj_min {
                            obj_min = obj;
                            j_sel = Some(t);
                        }
                    }
                }
            }
            let (Some(i), Some(j)) = (i_sel, j_sel) else {
                converged = true;
                break;
            };
            if gmax - gmin < params.tol {
                converged = true;
                break;
            }
            iterations += 1;

            let (old_i, old_j) = (alpha[i], alpha[j]);
            let kii = dot(points[i], points[i]);
            let kjj = dot(points[j], points[j]);
            let kij = dot(points[i], points[j]);
            let quad = (kii + kjj - 2.0 * kij).max(TAU);
            if y[i] != y[j] {
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for t in 0..n {
                grad[t] += q(t, i) * di + q(t, j) * dj;
            }
        }

        let b = -Self::rho(&alpha, &grad, y, c);
        let mut w = [0.0; 2];
        for t in 0..n {
            w[0] += alpha[t] * y[t] * points[t][0];
            w[1] += alpha[t] * y[t] * points[t][1];
        }
        LinearSvm {
            alpha,
            w,
            b,
            converged,
            iterations,
        }
    }

    /// Offset: mean of `y_t grad_t` over free multipliers, else the midpoint
    /// of the feasible interval.
    fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut sum_free, mut n_free) = (0.0, 0usize);
        for t in 0..alpha.len() {
            let yg = y[t] * grad[t];
            let at_upper = alpha[t] >= c;
            let at_lower = alpha[t] <= 0.0;
            if at_upper {
                if y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if at_lower {
                if y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                n_free += 1;
                sum_free += yg;
            }
        }
        if n_free > 0 {
            sum_free / n_free as f64
        } else if ub.is_finite() && lb.is_finite() {
            (ub + lb) / 2.0
        } else if ub.is_finite() {
            ub
        } else if lb.is_finite() {
            lb
        } else {
            0.0
        }
    }

    pub fn decision(&self, p: [f64; 2]) -> f64 {
        dot(self.w, p) + self.b
    }

    /// Dual objective `sum(a) - 1/2 a'Qa` (to be maximized).
    pub fn dual_objective(&self, points: &[[f64; 2]], y: &[f64]) -> f64 {
        dual_objective(&self.alpha, points, y)
    }
}

pub fn dual_objective(alpha: &[f64], points: &[[f64; 2]], y: &[f64]) -> f64 {
    let mut v = [0.0; 2];
    for t in 0..alpha.len() {
        v[0] += alpha[t] * y[t] * points[t][0];
        v[1] += alpha[t] * y[t] * points[t][1];
    }
    alpha.iter().sum::<f64>() - 0.5 * dot(v, v)
}

/// Multi-class wrapper: one linear SVM per class pair, majority vote.
#[derive(Debug, Clone, Copy, Default)]
pub struct OneVsOne(pub SmoParams);

pub struct OvoModel {
    n_classes: usize,
    /// `(a, b, svm)` with `a < b`; positive decision votes for `a`.
    machines: Vec<(usize, usize, LinearSvm)>,
    /// The only class seen in training, if there was just one.
    single: Option<usize>,
}

impl Learner for OneVsOne {
    type Model = OvoModel;

    fn fit(&self, points: &[[f64; 2]], labels: &[usize], n_classes: usize) -> OvoModel {
        let mut present = vec![false; n_classes];
        for &l in labels {
            present[l] = true;
        }
        let classes: Vec<usize> = (0..n_classes).filter(|&c| present[c]).collect();
        let mut machines = Vec::new();
        for (ia, &a) in classes.iter().enumerate() {
            for &b in &classes[ia + 1..] {
                let (mut xs, mut ys) = (Vec::new(), Vec::new());
                for (p, &l) in points.iter().zip(labels) {
                    if l == a || l == b {
                        xs.push(*p);
                        ys.push(if l == a { 1.0 } else { -1.0 });
                    }
                }
                machines.push((a, b, LinearSvm::train(&xs, &ys, &self.0)));
            }
        }
        OvoModel {
            n_classes,
            machines,
            single: (classes.len() == 1).then(|| classes[0]),
        }
    }
}

impl Classify for OvoModel {
    fn predict(&self, p: [f64; 2]) -> usize {
        if let Some(c) = self.single {
            return c;
        }
        let mut votes = vec![0.0; self.n_classes];
        for (a, b, svm) in &self.machines {
            if svm.decision(p) >= 0.0 {
                votes[*a] += 1.0;
            } else {
                votes[*b] += 1.0;
            }
        }
        argmax(votes)
    }

    fn converged(&self) -> bool {
        self.machines.iter().all(|(_, _, m)| m.converged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{smo_score, FoldPlan};
    use crate::dataset::View2D;

    /// Two parallel rows a unit apart; with every point a support vector
    /// the hard-margin multipliers (0.2 each) stay below `C`.
    fn separable() -> (Vec<[f64; 2]>, Vec<f64>) {
        let mut pts = Vec::new();
        let mut y = Vec::new();
        for i in 0..10 {
            let t = i as f64 / 9.0;
            pts.push([t, 0.0]);
            y.push(1.0);
            pts.push([t, 1.0]);
            y.push(-1.0);
        }
        (pts, y)
    }

    #[test]
    fn separable_points_lie_beyond_the_margin() {
        let (pts, y) = separable();
        let svm = LinearSvm::train(&pts, &y, &SmoParams::default());
        assert!(svm.converged);
        for (p, &t) in pts.iter().zip(&y) {
            assert!(t * svm.decision(*p) >= 1.0 - 2e-3, "{}", t * svm.decision(*p));
        }
    }

    #[test]
    fn kkt_conditions_hold_at_convergence() {
        let pts: Vec<[f64; 2]> = (0..30)
            .map(|i| [((i * 37) % 30) as f64 / 29.0, ((i * 11) % 30) as f64 / 29.0])
            .collect();
        let y: Vec<f64> = pts.iter().map(|p| if p[0] + 0.3 * p[1] > 0.6 { 1.0 } else { -1.0 }).collect();
        let params = SmoParams::default();
        let svm = LinearSvm::train(&pts, &y, &params);
        assert!(svm.converged);
        let slack = 2.0 * params.tol;
        for ((p, &t), &a) in pts.iter().zip(&y).zip(&svm.alpha) {
            let m = t * svm.decision(*p);
            if a <= 0.0 {
                assert!(m >= 1.0 - slack, "alpha=0, margin {m}");
            } else if a >= params.c {
                assert!(m <= 1.0 + slack, "alpha=C, margin {m}");
            } else {
                assert!((m - 1.0).abs() <= slack, "free alpha, margin {m}");
            }
        }
        let balance: f64 = svm.alpha.iter().zip(&y).map(|(a, t)| a * t).sum();
        assert!(balance.abs() < 1e-9);
    }

    #[test]
    fn separable_view_scores_zero() {
        let (pts, y) = separable();
        let labels = y.iter().map(|&t| if t > 0.0 { 0 } else { 1 }).collect();
        let v = View2D::from_points(pts, labels).unwrap();
        let plan = FoldPlan::stratified(&v, 10, 42).unwrap();
        assert_eq!(smo_score(&v, &plan).unwrap().error_rate, 0.0);
    }

    #[test]
    fn three_separable_classes_one_vs_one() {
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for (c, centre) in [[0.1, 0.1], [0.9, 0.1], [0.5, 0.9]].iter().enumerate() {
            for i in 0..10 {
                let d = (i as f64 - 4.5) * 0.01;
                pts.push([centre[0] + d, centre[1] - d]);
                labels.push(c);
            }
        }
        let v = View2D::from_points(pts, labels).unwrap();
        let plan = FoldPlan::stratified(&v, 10, 42).unwrap();
        let s = smo_score(&v, &plan).unwrap();
        assert_eq!(s.error_rate, 0.0);
        assert!(s.converged);
    }
}
