//! Wrapper measures: the cross-validated error of a classifier trained on a
//! view's two coordinates.
//!
//! All scorers run on the view's canonical form (points sorted by
//! coordinates, then label), so scores do not depend on input row order.
//! Fold assignments in a [`FoldPlan`] index rows of that canonical form.

mod bayes;
mod knn;
mod smo;
mod tree;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use bayes::GaussianNb;
pub use knn::Knn;
pub use smo::{LinearSvm, OneVsOne, SmoParams};
pub use tree::DecisionTree;

use crate::dataset::View2D;
use crate::error::{Error, Result};

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WrapperKind {
    Knn,
    J48,
    NaiveBayes,
    Smo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrapperScore {
    pub kind: WrapperKind,
    /// `1 - accuracy` over held-out folds.
    pub error_rate: f64,
    /// False when an SMO sub-problem hit its iteration budget.
    pub converged: bool,
}

/// Assignment of each canonical row to one cross-validation fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub n_folds: usize,
    pub seed: u64,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// Stratified plan over `view`'s canonical order: each class is shuffled
    /// and dealt round-robin, continuing where the previous class stopped.
    pub fn stratified(view: &View2D, n_folds: usize, seed: u64) -> Result<Self> {
        let canonical = view.canonical();
        Self::stratified_labels(&canonical.labels, canonical.n_classes, n_folds, seed)
    }

    pub fn stratified_labels(labels: &[usize], n_classes: usize, n_folds: usize, seed: u64) -> Result<Self> {
        if n_folds == 0 || labels.len() < n_folds {
            return Err(Error::TooFewPoints {
                points: labels.len(),
                folds: n_folds,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut assignments = vec![0; labels.len()];
        let mut next = 0;
        for class in 0..n_classes {
            let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            members.shuffle(&mut rng);
            for i in members {
                assignments[i] = next;
                next = (next + 1) % n_folds;
            }
        }
        Ok(Self {
            n_folds,
            seed,
            assignments,
        })
    }

    pub fn leave_one_out(n: usize) -> Self {
        Self {
            n_folds: n,
            seed: 0,
            assignments: (0..n).collect(),
        }
    }
}

/// A trainable classifier over 2D points.
pub trait Learner {
    type Model: Classify;

    fn fit(&self, points: &[[f64; 2]], labels: &[usize], n_classes: usize) -> Self::Model;
}

pub trait Classify {
    fn predict(&self, point: [f64; 2]) -> usize;

    /// Whether training reached its stopping criterion.
    fn converged(&self) -> bool {
        true
    }
}

/// Index of the largest value; ties resolve to the lowest index.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

fn check_view(view: &View2D, plan: &FoldPlan) -> Result<()> {
    if view.degenerate {
        return Err(Error::DegenerateView("cannot score a degenerate view".into()));
    }
    if view.len() < plan.n_folds {
        return Err(Error::TooFewPoints {
            points: view.len(),
            folds: plan.n_folds,
        });
    }
    if plan.assignments.len() != view.len() {
        return Err(Error::Config(format!(
            "fold plan covers {} rows, view has {}",
            plan.assignments.len(),
            view.len()
        )));
    }
    Ok(())
}

/// Cross-validated error of `learner` on `view` under `plan`.
pub fn cross_validate<L: Learner>(learner: &L, view: &View2D, plan: &FoldPlan) -> Result<(f64, bool)> {
    check_view(view, plan)?;
    let view = view.canonical();
    let mut errors = 0usize;
    let mut converged = true;
    for fold in 0..plan.n_folds {
        let (mut train_x, mut train_y) = (Vec::new(), Vec::new());
        for (i, &f) in plan.assignments.iter().enumerate() {
            if f != fold {
                train_x.push(view.points[i]);
                train_y.push(view.labels[i]);
            }
        }
        if train_x.len() == view.len() {
            continue;
        }
        let model = learner.fit(&train_x, &train_y, view.n_classes);
        converged &= model.converged();
        errors += plan
            .assignments
            .iter()
            .enumerate()
            .filter(|&(i, &f)| f == fold && model.predict(view.points[i]) != view.labels[i])
            .count();
    }
    Ok((errors as f64 / view.len() as f64, converged))
}

fn score<L: Learner>(kind: WrapperKind, learner: &L, view: &View2D, plan: &FoldPlan) -> Result<WrapperScore> {
    let (error_rate, converged) = cross_validate(learner, view, plan)?;
    Ok(WrapperScore {
        kind,
        error_rate,
        converged,
    })
}

/// Distance-weighted k-nearest-neighbour error, `k = floor(sqrt(n_train))`.
pub fn knn_score(view: &View2D, plan: &FoldPlan) -> Result<WrapperScore> {
    score(WrapperKind::Knn, &Knn, view, plan)
}

/// Unpruned gain-ratio decision tree error.
pub fn j48_score(view: &View2D, plan: &FoldPlan) -> Result<WrapperScore> {
    score(WrapperKind::J48, &DecisionTree, view, plan)
}

/// Gaussian naive Bayes error.
pub fn nb_score(view: &View2D, plan: &FoldPlan) -> Result<WrapperScore> {
    score(WrapperKind::NaiveBayes, &GaussianNb, view, plan)
}

/// Linear soft-margin SVM (SMO, one-vs-one) error.
pub fn smo_score(view: &View2D, plan: &FoldPlan) -> Result<WrapperScore> {
    score(WrapperKind::Smo, &OneVsOne(SmoParams::default()), view, plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stratified_plan_balances_classes() {
        let labels: Vec<usize> = (0..53).map(|i| if i % 3 == 0 { 1 } else { 0 }).collect();
        let plan = FoldPlan::stratified_labels(&labels, 2, 10, 42).unwrap();
        for class in 0..2 {
            let counts: Vec<usize> = (0..10)
                .map(|f| {
                    (0..labels.len())
                        .filter(|&i| labels[i] == class && plan.assignments[i] == f)
                        .count()
                })
                .collect();
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            assert!(hi - lo <= 1, "{counts:?}");
        }
        assert!(plan.assignments.iter().all(|&f| f < 10));
    }

    #[test]
    fn plan_is_seed_deterministic() {
        let labels = vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let a = FoldPlan::stratified_labels(&labels, 2, 3, 7).unwrap();
        let b = FoldPlan::stratified_labels(&labels, 2, 3, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fewer_points_than_folds() {
        assert!(matches!(
            FoldPlan::stratified_labels(&[0, 1, 0], 2, 10, 42),
            Err(Error::TooFewPoints { points: 3, folds: 10 })
        ));
    }

    #[test]
    fn degenerate_view_is_rejected() {
        let mut v = View2D::from_points(vec![[0.0, 0.0]; 12], vec![0; 12]).unwrap();
        v.degenerate = true;
        let plan = FoldPlan::leave_one_out(12);
        assert!(matches!(knn_score(&v, &plan), Err(Error::DegenerateView(_))));
    }

    #[test]
    fn argmax_prefers_lowest_index_on_ties() {
        assert_eq!(argmax([1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax([0.0, 0.0]), 0);
    }
}
