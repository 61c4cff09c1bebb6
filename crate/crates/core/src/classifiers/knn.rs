use super::{argmax, Classify, Learner};

/// k-nearest neighbours with inverse-distance weighted votes.
#[derive(Debug, Clone, Copy, Default)]
pub struct Knn;

pub struct KnnModel {
    points: Vec<[f64; 2]>,
    labels: Vec<usize>,
    n_classes: usize,
    k: usize,
}

impl Learner for Knn {
    type Model = KnnModel;

    fn fit(&self, points: &[[f64; 2]], labels: &[usize], n_classes: usize) -> KnnModel {
        let k = ((points.len() as f64).sqrt().floor() as usize).max(1);
        KnnModel {
            points: points.to_vec(),
            labels: labels.to_vec(),
            n_classes,
            k,
        }
    }
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }
}

impl Classify for KnnModel {
    fn predict(&self, p: [f64; 2]) -> usize {
        let mut dist: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, q)| (((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt(), i))
            .collect();
        let k = self.k.min(dist.len());
        if k == 0 {
            return 0;
        }
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        dist.select_nth_unstable_by(k - 1, cmp);
        let mut votes = vec![0.0; self.n_classes];
        for &(d, i) in &dist[..k] {
            votes[self.labels[i]] += 1.0 / (d + 1e-12);
        }
        argmax(votes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{knn_score, FoldPlan};
    use crate::dataset::View2D;

    #[test]
    fn k_is_floor_sqrt_of_training_size() {
        let pts = vec![[0.0, 0.0]; 17];
        let m = Knn.fit(&pts, &[0; 17], 1);
        assert_eq!(m.k(), 4);
        assert_eq!(Knn.fit(&pts[..1], &[0], 1).k(), 1);
    }

    #[test]
    fn perfect_separation() {
        let mut pts = vec![[0.0, 0.0]; 10];
        pts.extend(vec![[1.0, 1.0]; 10]);
        let labels: Vec<usize> = (0..20).map(|i| i / 10).collect();
        let v = View2D::from_points(pts, labels).unwrap();
        let plan = FoldPlan::stratified(&v, 10, 42).unwrap();
        assert_eq!(knn_score(&v, &plan).unwrap().error_rate, 0.0);
    }

    /// Leave-one-out on six points against a hand-enumerated table.
    #[test]
    fn six_point_leave_one_out_table() {
        // canonical order is by x, so rows below are already canonical
        let pts = vec![[0.0, 0.0], [0.1, 0.0], [0.2, 0.5], [0.5, 0.5], [0.95, 1.0], [1.0, 0.0]];
        let labels = vec![0, 0, 1, 0, 1, 1];
        let v = View2D::from_points(pts.clone(), labels.clone()).unwrap();
        // k = floor(sqrt(5)) = 2. Two nearest of each held-out point:
        //   0 -> 1 (0.1, c0), 2 (0.539, c1)          -> 0 (correct)
        //   1 -> 0 (0.1, c0), 2 (0.510, c1)          -> 0 (correct)
        //   2 -> 3 (0.3, c0), 1 (0.510, c0)          -> 0 (wrong)
        //   3 -> 2 (0.3, c1), 1 (0.640, c0)          -> 1 (wrong)
        //   4 -> 3 (0.673, c0), 2 (0.901, c1)        -> 0 (wrong)
        //   5 -> 3 (0.707, c0), 2 (0.943, c1)        -> 0 (wrong)
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let mut oracle_errors = 0;
        for i in 0..6 {
            let mut others: Vec<(f64, usize)> = (0..6).filter(|&j| j != i).map(|j| (d(pts[i], pts[j]), j)).collect();
            others.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let mut w = [0.0, 0.0];
            for &(dist, j) in &others[..2] {
                w[labels[j]] += 1.0 / (dist + 1e-12);
            }
            let pred = if w[1] > w[0] { 1 } else { 0 };
            if pred != labels[i] {
                oracle_errors += 1;
            }
        }
        assert_eq!(oracle_errors, 4);
        let s = knn_score(&v, &FoldPlan::leave_one_out(6)).unwrap();
        assert_eq!(s.error_rate, 4.0 / 6.0);
    }
}
