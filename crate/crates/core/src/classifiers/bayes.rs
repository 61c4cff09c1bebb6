use super::{argmax, Classify, Learner};

const VARIANCE_FLOOR: f64 = 1e-9;

/// Gaussian naive Bayes with empirical class priors.
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianNb;

#[derive(Debug, Clone)]
struct ClassDensity {
    log_prior: f64,
    mean: [f64; 2],
    var: [f64; 2],
}

pub struct NbModel {
    /// `None` for classes absent from the training data.
    classes: Vec<Option<ClassDensity>>,
}

impl Learner for GaussianNb {
    type Model = NbModel;

    fn fit(&self, points: &[[f64; 2]], labels: &[usize], n_classes: usize) -> NbModel {
        let n = points.len() as f64;
        let classes = (0..n_classes)
            .map(|c| {
                let members: Vec<[f64; 2]> = points
                    .iter()
                    .zip(labels)
                    .filter(|&(_, &l)| l == c)
                    .map(|(p, _)| *p)
                    .collect();
                if members.is_empty() {
                    return None;
                }
                let m = members.len() as f64;
                let mut mean = [0.0; 2];
                let mut var = [0.0; 2];
                for axis in 0..2 {
                    mean[axis] = members.iter().map(|p| p[axis]).sum::<f64>() / m;
                    var[axis] = (members.iter().map(|p| (p[axis] - mean[axis]).powi(2)).sum::<f64>() / m)
                        .max(VARIANCE_FLOOR);
                }
                Some(ClassDensity {
                    log_prior: (m / n).ln(),
                    mean,
                    var,
                })
            })
            .collect();
        NbModel { classes }
    }
}

impl NbModel {
    pub fn log_posterior(&self, p: [f64; 2]) -> Vec<f64> {
        self.classes
            .iter()
            .map(|c| match c {
                None => f64::NEG_INFINITY,
                Some(c) => {
                    c.log_prior
                        + (0..2)
                            .map(|a| {
                                -0.5 * (2.0 * std::f64::consts::PI * c.var[a]).ln()
                                    - (p[a] - c.mean[a]).powi(2) / (2.0 * c.var[a])
                            })
                            .sum::<f64>()
                }
            })
            .collect()
    }
}

impl Classify for NbModel {
    fn predict(&self, p: [f64; 2]) -> usize {
        argmax(self.log_posterior(p))
    }
}
