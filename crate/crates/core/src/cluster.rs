//! Cluster validity indices over a view, using class labels as the grouping.
//!
//! The C index lands in `[0, 1]` on its own. Davies-Bouldin and Dunn produce
//! raw values that only become comparable after min-max normalization over a
//! collection of views: [`collection_minmax`] for Davies-Bouldin and the
//! inverted [`collection_badness`] for Dunn.

use crate::dataset::View2D;

/// Euclidean distances over all point pairs `(i, j)`, `i < j`, row-major.
#[derive(Debug, Clone)]
pub struct PairwiseDistances {
    pub dist: Vec<f64>,
    pub same_class: Vec<bool>,
}

impl PairwiseDistances {
    pub fn new(view: &View2D) -> Self {
        let n = view.len();
        let m = n * n.saturating_sub(1) / 2;
        let mut dist = Vec::with_capacity(m);
        let mut same_class = Vec::with_capacity(m);
        for i in 0..n {
            for j in i + 1..n {
                dist.push(euclid(view.points[i], view.points[j]));
                same_class.push(view.labels[i] == view.labels[j]);
            }
        }
        Self { dist, same_class }
    }
}

pub(crate) fn euclid(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// An index value with its degeneracy status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexValue {
    pub value: f64,
    pub degenerate: bool,
}

/// Raw Davies-Bouldin or Dunn value. `value` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawIndex {
    pub value: f64,
    /// A zero denominator produced an infinite ratio.
    pub infinite_ratio: bool,
    pub degenerate: bool,
}

/// `(SD - SD_min) / (SD_max - SD_min)`, where `SD` sums the `p` within-class
/// distances and `SD_min`/`SD_max` sum the `p` smallest/largest distances
/// overall. Smaller is better.
pub fn c_index(view: &View2D) -> IndexValue {
    let pd = PairwiseDistances::new(view);
    let p = pd.same_class.iter().filter(|&&s| s).count();
    if p == 0 {
        return IndexValue {
            value: 0.0,
            degenerate: true,
        };
    }
    let sd: f64 = pd
        .dist
        .iter()
        .zip(&pd.same_class)
        .filter(|(_, &s)| s)
        .map(|(d, _)| d)
        .sum();
    let mut sorted = pd.dist;
    sorted.sort_by(f64::total_cmp);
    let sd_min: f64 = sorted[..p].iter().sum();
    let sd_max: f64 = sorted[sorted.len() - p..].iter().sum();
    if sd_max <= sd_min {
        return IndexValue {
            value: 0.0,
            degenerate: true,
        };
    }
    IndexValue {
        value: ((sd - sd_min) / (sd_max - sd_min)).clamp(0.0, 1.0),
        degenerate: false,
    }
}

/// Members of each class that has at least one point.
fn groups(view: &View2D) -> Vec<Vec<[f64; 2]>> {
    let mut g = vec![Vec::new(); view.n_classes];
    for (p, &l) in view.points.iter().zip(&view.labels) {
        g[l].push(*p);
    }
    g.retain(|members| !members.is_empty());
    g
}

fn centroid(members: &[[f64; 2]]) -> [f64; 2] {
    let n = members.len() as f64;
    [
        members.iter().map(|p| p[0]).sum::<f64>() / n,
        members.iter().map(|p| p[1]).sum::<f64>() / n,
    ]
}

/// `(1/n) sum_i min_{j != i} delta(i, j) / (Delta(i) + Delta(j))` with
/// centroid-to-centroid `delta` and mean distance to centroid `Delta`.
/// Larger raw values mean better separated classes.
pub fn davies_bouldin(view: &View2D) -> RawIndex {
    let g = groups(view);
    if g.len() < 2 {
        return RawIndex {
            value: 0.0,
            infinite_ratio: false,
            degenerate: true,
        };
    }
    let centroids: Vec<[f64; 2]> = g.iter().map(|m| centroid(m)).collect();
    let scatter: Vec<f64> = g
        .iter()
        .zip(&centroids)
        .map(|(m, c)| m.iter().map(|p| euclid(*p, *c)).sum::<f64>() / m.len() as f64)
        .collect();
    let mut infinite_ratio = false;
    let mut total = 0.0;
    for i in 0..g.len() {
        let mut best = f64::INFINITY;
        for j in 0..g.len() {
            if i == j {
                continue;
            }
            let between = euclid(centroids[i], centroids[j]);
            let within = scatter[i] + scatter[j];
            let ratio = if within > 0.0 {
                between / within
            } else if between > 0.0 {
                infinite_ratio = true;
                f64::INFINITY
            } else {
                0.0
            };
            best = best.min(ratio);
        }
        total += best;
    }
    RawIndex {
        value: total / g.len() as f64,
        infinite_ratio,
        degenerate: false,
    }
}

/// Smallest single-linkage distance between two classes over the largest
/// class diameter. Larger raw values mean better separated classes.
pub fn dunn(view: &View2D) -> RawIndex {
    let n = view.len();
    let classes = groups(view).len();
    if classes < 2 {
        return RawIndex {
            value: 0.0,
            infinite_ratio: false,
            degenerate: true,
        };
    }
    let mut min_between = f64::INFINITY;
    let mut max_diameter: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = euclid(view.points[i], view.points[j]);
            if view.labels[i] == view.labels[j] {
                max_diameter = max_diameter.max(d);
            } else {
                min_between = min_between.min(d);
            }
        }
    }
    if max_diameter > 0.0 {
        RawIndex {
            value: min_between / max_diameter,
            infinite_ratio: false,
            degenerate: false,
        }
    } else if min_between > 0.0 {
        RawIndex {
            value: f64::INFINITY,
            infinite_ratio: true,
            degenerate: false,
        }
    } else {
        RawIndex {
            value: 0.0,
            infinite_ratio: false,
            degenerate: true,
        }
    }
}

fn finite_range(raw: &[f64]) -> Option<(f64, f64)> {
    let finite = raw.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    (hi > lo).then_some((lo, hi))
}

/// Min-max normalization over one collection, `(r - min) / (max - min)`
/// over the finite values. Infinite values map to 1. A collection whose
/// finite values are all equal maps them to 0.
pub fn collection_minmax(raw: &[f64]) -> Vec<f64> {
    let range = finite_range(raw);
    raw.iter()
        .map(|&r| match range {
            _ if r.is_infinite() => 1.0,
            Some((lo, hi)) => ((r - lo) / (hi - lo)).clamp(0.0, 1.0),
            None => 0.0,
        })
        .collect()
}

/// Inverted min-max normalization, `1 - (r - min) / (max - min)`, turning
/// larger-is-better raw values into `[0, 1]` badness. Infinite values score
/// 0, as does a collection whose finite values are all equal.
pub fn collection_badness(raw: &[f64]) -> Vec<f64> {
    let range = finite_range(raw);
    raw.iter()
        .map(|&r| match range {
            _ if r.is_infinite() => 0.0,
            Some((lo, hi)) => (1.0 - (r - lo) / (hi - lo)).clamp(0.0, 1.0),
            None => 0.0,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view(points: &[[f64; 2]], labels: &[usize]) -> View2D {
        View2D::from_points(points.to_vec(), labels.to_vec()).unwrap()
    }

    #[test]
    fn c_index_compact_classes_is_zero() {
        let v = view(
            &[[0.0, 0.0], [0.01, 0.0], [0.0, 0.01], [1.0, 1.0], [0.99, 1.0], [1.0, 0.99]],
            &[0, 0, 0, 1, 1, 1],
        );
        let c = c_index(&v);
        assert_eq!(c.value, 0.0);
        assert!(!c.degenerate);
    }

    #[test]
    fn c_index_hand_values() {
        // labels pair each point with the far one
        let v = view(&[[0.0, 0.0], [0.01, 0.0], [1.0, 0.0], [1.01, 0.0]], &[0, 1, 0, 1]);
        // distances .01 1 1.01 .99 1 .01; within-class 1 + 1
        let want = (2.0 - 0.02) / (2.01 - 0.02);
        assert!((c_index(&v).value - want).abs() < 1e-12);
        let far = view(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]], &[0, 1, 0]);
        assert_eq!(c_index(&far).value, 1.0);
    }

    #[test]
    fn c_index_without_spread_is_degenerate() {
        let pair = view(&[[0.0, 0.0], [1.0, 0.0]], &[0, 0]);
        assert_eq!(c_index(&pair), IndexValue { value: 0.0, degenerate: true });
        let singletons = view(&[[0.0, 0.0], [1.0, 0.0]], &[0, 1]);
        assert!(c_index(&singletons).degenerate);
    }

    #[test]
    fn davies_bouldin_point_masses_with_jitter() {
        let s = 1e-6;
        let v = view(&[[0.0, s], [0.0, -s], [1.0, s], [1.0, -s]], &[0, 0, 1, 1]);
        // delta = 1, Delta = s for both classes
        let raw = davies_bouldin(&v).value;
        let want = 1.0 / (2.0 * s);
        assert!((raw - want).abs() / want < 1e-9, "{raw}");
    }

    #[test]
    fn davies_bouldin_coincident_centroids_is_zero() {
        let v = view(&[[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]], &[0, 0, 1, 1]);
        assert_eq!(davies_bouldin(&v).value, 0.0);
        let masses = view(&[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], &[0, 0, 1]);
        let r = davies_bouldin(&masses);
        assert!(r.infinite_ratio && r.value.is_infinite());
    }

    #[test]
    fn dunn_cases() {
        let tight = view(&[[0.0, 0.0], [0.0, 0.1], [1.0, 0.0], [1.0, 0.1]], &[0, 0, 1, 1]);
        assert!((dunn(&tight).value - 10.0).abs() < 1e-12);
        let shared = view(&[[0.0, 0.0], [0.5, 0.5], [0.5, 0.5], [1.0, 1.0]], &[0, 0, 1, 1]);
        assert_eq!(dunn(&shared).value, 0.0);
        let masses = view(&[[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]], &[0, 0, 1]);
        assert!(dunn(&masses).value.is_infinite());
        let same = view(&[[0.3, 0.3], [0.3, 0.3], [0.3, 0.3]], &[0, 0, 1]);
        assert!(dunn(&same).degenerate);
    }

    #[test]
    fn minmax_normalization() {
        assert_eq!(collection_minmax(&[0.0, 5.0, 10.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(collection_minmax(&[f64::INFINITY, 2.0, 4.0]), vec![1.0, 0.0, 1.0]);
        assert_eq!(collection_minmax(&[3.0, 3.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn badness_normalization() {
        assert_eq!(collection_badness(&[0.0, 5.0, 10.0]), vec![1.0, 0.5, 0.0]);
        assert_eq!(collection_badness(&[f64::INFINITY, 2.0, 4.0]), vec![0.0, 1.0, 0.0]);
        assert_eq!(collection_badness(&[3.0, 3.0]), vec![0.0, 0.0]);
    }
}
