//! Visual separation measures: the LDA scatter ratio, centroid consistency
//! and the neighbourhood-smoothed 2D histogram entropy.

use crate::cluster::euclid;
use crate::dataset::View2D;

pub const DEFAULT_BINS: usize = 100;
const DET_FLOOR: f64 = 1e-15;

type Mat2 = [[f64; 2]; 2];

fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Within-class and between-class scatter matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterMatrices {
    pub within: Mat2,
    pub between: Mat2,
}

impl ScatterMatrices {
    pub fn new(view: &View2D) -> Self {
        let k = view.n_classes;
        let mut sums = vec![[0.0; 2]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in view.points.iter().zip(&view.labels) {
            sums[l][0] += p[0];
            sums[l][1] += p[1];
            counts[l] += 1;
        }
        let n = view.len() as f64;
        let mean = [
            view.points.iter().map(|p| p[0]).sum::<f64>() / n,
            view.points.iter().map(|p| p[1]).sum::<f64>() / n,
        ];
        let means: Vec<[f64; 2]> = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c == 0 { [0.0; 2] } else { [s[0] / c as f64, s[1] / c as f64] })
            .collect();
        let mut within = [[0.0; 2]; 2];
        for (p, &l) in view.points.iter().zip(&view.labels) {
            let d = [p[0] - means[l][0], p[1] - means[l][1]];
            for a in 0..2 {
                for b in 0..2 {
                    within[a][b] += d[a] * d[b];
                }
            }
        }
        let mut between = [[0.0; 2]; 2];
        for (m, &c) in means.iter().zip(&counts) {
            if c == 0 {
                continue;
            }
            let d = [m[0] - mean[0], m[1] - mean[1]];
            for a in 0..2 {
                for b in 0..2 {
                    between[a][b] += c as f64 * d[a] * d[b];
                }
            }
        }
        Self { within, between }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisualValue {
    pub value: f64,
    pub degenerate: bool,
}

/// `det(W) / det(W + B)`, i.e. Wilks' lambda. Smaller means more of the
/// total scatter is explained by the classes.
pub fn lda_index(view: &View2D) -> VisualValue {
    let s = ScatterMatrices::new(view);
    let mut total = s.within;
    for a in 0..2 {
        for b in 0..2 {
            total[a][b] += s.between[a][b];
        }
    }
    let denom = det(&total);
    if denom.abs() <= DET_FLOOR {
        return VisualValue {
            value: 1.0,
            degenerate: true,
        };
    }
    VisualValue {
        value: (det(&s.within) / denom).clamp(0.0, 1.0),
        degenerate: false,
    }
}

/// Fraction of points that are not strictly closer to their own class
/// centroid than to every other class centroid.
pub fn ccm(view: &View2D) -> VisualValue {
    let k = view.n_classes;
    let mut sums = vec![[0.0; 2]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in view.points.iter().zip(&view.labels) {
        sums[l][0] += p[0];
        sums[l][1] += p[1];
        counts[l] += 1;
    }
    let centroids: Vec<Option<[f64; 2]>> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| (c > 0).then(|| [s[0] / c as f64, s[1] / c as f64]))
        .collect();
    if centroids.iter().flatten().count() < 2 {
        return VisualValue {
            value: 0.0,
            degenerate: true,
        };
    }
    let inconsistent = view
        .points
        .iter()
        .zip(&view.labels)
        .filter(|(p, &l)| {
            let own = euclid(**p, centroids[l].expect("own class has members"));
            centroids
                .iter()
                .enumerate()
                .any(|(c, cen)| c != l && cen.map_or(false, |cen| euclid(**p, cen) <= own))
        })
        .count();
    VisualValue {
        value: inconsistent as f64 / view.len() as f64,
        degenerate: false,
    }
}

/// Per-class point counts on a `bins x bins` grid over the unit square.
#[derive(Debug, Clone)]
pub struct HistogramGrid {
    pub bins: usize,
    pub n_classes: usize,
    /// `counts[(row * bins + col) * n_classes + class]`.
    pub counts: Vec<u32>,
}

impl HistogramGrid {
    pub fn new(view: &View2D, bins: usize) -> Self {
        assert!(bins >= 1, "at least one bin per axis");
        let k = view.n_classes;
        let mut counts = vec![0u32; bins * bins * k];
        for (p, &l) in view.points.iter().zip(&view.labels) {
            let col = bin_of(p[0], bins);
            let row = bin_of(p[1], bins);
            counts[(row * bins + col) * k + l] += 1;
        }
        Self {
            bins,
            n_classes: k,
            counts,
        }
    }

    /// Class counts summed over the 3x3 neighbourhood of a cell, clipped at
    /// the grid border.
    pub fn neighbourhood(&self, row: usize, col: usize) -> Vec<u32> {
        let k = self.n_classes;
        let mut out = vec![0u32; k];
        for r in row.saturating_sub(1)..=(row + 1).min(self.bins - 1) {
            for c in col.saturating_sub(1)..=(col + 1).min(self.bins - 1) {
                let base = (r * self.bins + c) * k;
                for (o, v) in out.iter_mut().zip(&self.counts[base..base + k]) {
                    *o += v;
                }
            }
        }
        out
    }
}

/// `floor(v * B)`, with `v = 1` falling into the last bin.
pub fn bin_of(v: f64, bins: usize) -> usize {
    ((v * bins as f64).floor().max(0.0) as usize).min(bins - 1)
}

fn entropy_bits(counts: &[u32]) -> (f64, u64) {
    let total: u64 = counts.iter().map(|&c| c as u64).sum();
    if total == 0 {
        return (0.0, 0);
    }
    let n = total as f64;
    let h = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    (h, total)
}

/// Weighted average of the neighbourhood class entropy over all grid cells,
/// weighted by neighbourhood mass and divided by `log2(M)` for `M` points.
pub fn hdm2d(view: &View2D, bins: usize) -> VisualValue {
    let m = view.len();
    if m < 2 {
        return VisualValue {
            value: 0.0,
            degenerate: true,
        };
    }
    let grid = HistogramGrid::new(view, bins);
    let mut weighted = 0.0;
    let mut mass = 0u64;
    for row in 0..bins {
        for col in 0..bins {
            let u = grid.neighbourhood(row, col);
            let (h, total) = entropy_bits(&u);
            weighted += total as f64 * h;
            mass += total;
        }
    }
    VisualValue {
        value: (weighted / (mass as f64 * (m as f64).log2())).clamp(0.0, 1.0),
        degenerate: false,
    }
}
