//! Projection expressions: syntax trees, structural complexity metrics and the
//! semantic interpretability model.
//!
//! Expressions range over named variables, numeric literals, the binary
//! operators `+ - * /`, the functions `log`, `sqrt`, `exp` (also written
//! `e^{...}`) and positive integer powers.

mod eval;
pub mod fixtures;
mod metrics;
mod parser;
mod render;

use std::fmt;

pub use eval::BoundExpr;
pub use metrics::{block_sizes, metrics, phr_semantic, ExprMetrics, SEMANTIC_MODEL};
pub use parser::parse;

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    /// Operators of one class share a precedence level.
    pub fn is_additive(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub)
    }

    fn same_class(self, other: BinOp) -> bool {
        self.is_additive() == other.is_additive()
    }
}

/// Unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Log,
    Sqrt,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
        }
    }
}

/// Syntax tree of a projection expression.
///
/// Parentheses are not stored: they only shape the tree. A power's exponent
/// is an attribute of the node, not an operand.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(String),
    /// Numeric literal; a leading minus sign is absorbed into the value.
    Lit(f64),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        func: Func,
        arg: Box<Expr>,
    },
    Pow {
        base: Box<Expr>,
        exponent: u32,
    },
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn unary(func: Func, arg: Expr) -> Expr {
        Expr::Unary {
            func,
            arg: Box::new(arg),
        }
    }

    pub fn pow(base: Expr, exponent: u32) -> Expr {
        Expr::Pow {
            base: Box::new(base),
            exponent,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Expr::Var(_) | Expr::Lit(_))
    }

    /// Distinct variable names in first-occurrence order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Var(name) = e {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
        });
        out
    }

    /// True when evaluation may leave the real domain on `[0, 1]` inputs
    /// (logarithms and divisions).
    pub fn needs_positive_domain(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| match e {
            Expr::Unary {
                func: Func::Log, ..
            }
            | Expr::Binary { op: BinOp::Div, .. } => found = true,
            _ => {}
        });
        found
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Var(_) | Expr::Lit(_) => {}
            Expr::Binary { lhs, rhs, .. } => {
                lhs.visit(f);
                rhs.visit(f);
            }
            Expr::Unary { arg, .. } => arg.visit(f),
            Expr::Pow { base, .. } => base.visit(f),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render_linearized(self))
    }
}

pub use render::render_linearized;
