use super::{argmax, Classify, Learner};

/// Unpruned C4.5-style tree: binary axis-aligned splits chosen by gain ratio,
/// grown until nodes are pure or hold fewer than two samples.
#[derive(Debug, Clone, Copy, Default)]
pub struct DecisionTree;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf(usize),
    Split {
        axis: usize,
        threshold: f64,
        /// Taken when `value <= threshold`.
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 1,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

impl Classify for TreeNode {
    fn predict(&self, p: [f64; 2]) -> usize {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf(c) => return *c,
                TreeNode::Split {
                    axis,
                    threshold,
                    left,
                    right,
                } => node = if p[*axis] <= *threshold { left } else { right },
            }
        }
    }
}

impl Learner for DecisionTree {
    type Model = TreeNode;

    fn fit(&self, points: &[[f64; 2]], labels: &[usize], n_classes: usize) -> TreeNode {
        let idx: Vec<usize> = (0..points.len()).collect();
        grow(points, labels, n_classes, idx)
    }
}

fn entropy(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

struct Candidate {
    ratio: f64,
    axis: usize,
    threshold: f64,
}

fn best_split(points: &[[f64; 2]], labels: &[usize], n_classes: usize, idx: &[usize], parent: f64) -> Option<Candidate> {
    let n = idx.len();
    let mut best: Option<Candidate> = None;
    for axis in 0..2 {
        let mut order = idx.to_vec();
        order.sort_by(|&a, &b| points[a][axis].total_cmp(&points[b][axis]).then(a.cmp(&b)));
        let mut left = vec![0usize; n_classes];
        let mut right = vec![0usize; n_classes];
        for &i in &order {
            right[labels[i]] += 1;
        }
        for k in 0..n - 1 {
            let i = order[k];
            left[labels[i]] += 1;
            right[labels[i]] -= 1;
            let (a, b) = (points[i][axis], points[order[k + 1]][axis]);
            if a == b {
                continue;
            }
            let (nl, nr) = (k + 1, n - k - 1);
            let (wl, wr) = (nl as f64 / n as f64, nr as f64 / n as f64);
            let gain = parent - wl * entropy(&left, nl) - wr * entropy(&right, nr);
            let split_info = -wl * wl.log2() - wr * wr.log2();
            let ratio = gain.max(0.0) / split_info;
            if best.as_ref().is_none_or(|b| ratio > b.ratio) {
                best = Some(Candidate {
                    ratio,
                    axis,
                    threshold: a + (b - a) / 2.0,
                });
            }
        }
    }
    best
}

fn grow(points: &[[f64; 2]], labels: &[usize], n_classes: usize, idx: Vec<usize>) -> TreeNode {
    let mut counts = vec![0usize; n_classes];
    for &i in &idx {
        counts[labels[i]] += 1;
    }
    let majority = argmax(counts.iter().map(|&c| c as f64));
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if pure || idx.len() < 2 {
        return TreeNode::Leaf(majority);
    }
    let parent = entropy(&counts, idx.len());
    let Some(split) = best_split(points, labels, n_classes, &idx, parent) else {
        return TreeNode::Leaf(majority);
    };
    let (l, r): (Vec<usize>, Vec<usize>) = idx
        .into_iter()
        .partition(|&i| points[i][split.axis] <= split.threshold);
    TreeNode::Split {
        axis: split.axis,
        threshold: split.threshold,
        left: Box::new(grow(points, labels, n_classes, l)),
        right: Box::new(grow(points, labels, n_classes, r)),
    }
}
