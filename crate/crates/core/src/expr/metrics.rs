//! Structural complexity attributes of an expression.

use super::{BinOp, Expr};

/// The six structural attributes used by the semantic model.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprMetrics {
    pub n_operands: usize,
    pub n_operators: usize,
    pub tree_depth: usize,
    pub n_blocks: usize,
    pub avg_block_size: f64,
    pub total_size: usize,
}

/// Published semantic model: `(intercept, [depth, blocks, avg block size, total size])`.
pub const SEMANTIC_MODEL: (f64, [f64; 4]) = (0.2151, [0.0854, -0.2568, -0.1014, 0.0899]);

/// Predicted human rating of an expression's difficulty (smaller is easier).
pub fn phr_semantic(m: &ExprMetrics) -> f64 {
    let (intercept, [depth, blocks, avg, total]) = SEMANTIC_MODEL;
    depth * m.tree_depth as f64
        + blocks * m.n_blocks as f64
        + avg * m.avg_block_size
        + total * m.total_size as f64
        + intercept
}

pub fn metrics(e: &Expr) -> ExprMetrics {
    let (n_operands, n_operators) = counts(e);
    let blocks = block_sizes(e);
    ExprMetrics {
        n_operands,
        n_operators,
        tree_depth: depth(e),
        n_blocks: blocks.len(),
        avg_block_size: blocks.iter().sum::<usize>() as f64 / blocks.len() as f64,
        total_size: n_operands + n_operators,
    }
}

fn counts(e: &Expr) -> (usize, usize) {
    match e {
        Expr::Var(_) | Expr::Lit(_) => (1, 0),
        Expr::Binary { lhs, rhs, .. } => {
            let (a, b) = counts(lhs);
            let (c, d) = counts(rhs);
            (a + c, b + d + 1)
        }
        Expr::Unary { arg: inner, .. } | Expr::Pow { base: inner, .. } => {
            let (a, b) = counts(inner);
            (a, b + 1)
        }
    }
}

fn total_size(e: &Expr) -> usize {
    let (a, b) = counts(e);
    a + b
}

/// Operands of the maximal subtree rooted at `e` whose binary nodes all belong
/// to `e`'s precedence class, left to right.
fn chain_operands<'a>(e: &'a Expr, class_of: BinOp, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::Binary { op, lhs, rhs } if op.same_class(class_of) => {
            chain_operands(lhs, class_of, out);
            chain_operands(rhs, class_of, out);
        }
        other => out.push(other),
    }
}

/// Node count on the longest root-to-leaf path.
///
/// A run of same-class binary operators has no intrinsic nesting, so each run
/// is measured at its shallowest order-preserving bracketing.
fn depth(e: &Expr) -> usize {
    match e {
        Expr::Var(_) | Expr::Lit(_) => 1,
        Expr::Unary { arg: inner, .. } | Expr::Pow { base: inner, .. } => 1 + depth(inner),
        Expr::Binary { op, .. } => {
            let mut operands = Vec::new();
            chain_operands(e, *op, &mut operands);
            let depths: Vec<usize> = operands.into_iter().map(depth).collect();
            shallowest_bracketing(&depths)
        }
    }
}

/// Minimum, over binary trees with the given ordered leaves, of the deepest
/// leaf path (internal nodes count one each).
fn shallowest_bracketing(leaves: &[usize]) -> usize {
    let n = leaves.len();
    // best[i][j]: optimal depth for leaves i..=j
    let mut best = vec![vec![0usize; n]; n];
    for i in 0..n {
        best[i][i] = leaves[i];
    }
    for span in 1..n {
        for i in 0..n - span {
            let j = i + span;
            best[i][j] = (i..j)
                .map(|k| 1 + best[i][k].max(best[k + 1][j]))
                .min()
                .expect("non-empty split range");
        }
    }
    best[0][n - 1]
}

/// Sizes of the expression's blocks.
///
/// Unary and power wrappers at the root are stripped. A stripped root that is
/// not a binary node makes the whole expression one block. Otherwise the
/// root's same-class operator run is flattened: a multiplicative run over
/// atoms is a single block, and in every other case each run operand is a
/// block of its own total size.
pub fn block_sizes(e: &Expr) -> Vec<usize> {
    let mut core = e;
    while let Expr::Unary { arg: inner, .. } | Expr::Pow { base: inner, .. } = core {
        core = inner;
    }
    let Expr::Binary { op, .. } = core else {
        return vec![total_size(e)];
    };
    let mut operands = Vec::new();
    chain_operands(core, *op, &mut operands);
    if !op.is_additive() && operands.iter().all(|o| o.is_atom()) {
        return vec![total_size(core)];
    }
    operands.into_iter().map(total_size).collect()
}
