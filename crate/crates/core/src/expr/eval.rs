use super::{BinOp, Expr, Func};
use crate::error::{Error, Result};

/// An expression whose variables have been resolved to column indices.
#[derive(Debug, Clone)]
pub enum BoundExpr {
    Column(usize),
    Lit(f64),
    Binary(BinOp, Box<BoundExpr>, Box<BoundExpr>),
    Unary(Func, Box<BoundExpr>),
    Pow(Box<BoundExpr>, i32),
}

impl BoundExpr {
    /// Resolves every variable through `resolve`.
    pub fn bind(e: &Expr, resolve: &impl Fn(&str) -> Option<usize>) -> Result<BoundExpr> {
        Ok(match e {
            Expr::Var(name) => {
                BoundExpr::Column(resolve(name).ok_or_else(|| Error::UnboundVariable(name.clone()))?)
            }
            Expr::Lit(v) => BoundExpr::Lit(*v),
            Expr::Binary { op, lhs, rhs } => BoundExpr::Binary(
                *op,
                Box::new(Self::bind(lhs, resolve)?),
                Box::new(Self::bind(rhs, resolve)?),
            ),
            Expr::Unary { func, arg } => BoundExpr::Unary(*func, Box::new(Self::bind(arg, resolve)?)),
            Expr::Pow { base, exponent } => BoundExpr::Pow(
                Box::new(Self::bind(base, resolve)?),
                i32::try_from(*exponent).unwrap_or(i32::MAX),
            ),
        })
    }

    /// Evaluates on one row of column values. May return a non-finite value.
    pub fn eval(&self, row: &[f64]) -> f64 {
        match self {
            BoundExpr::Column(i) => row[*i],
            BoundExpr::Lit(v) => *v,
            BoundExpr::Binary(op, a, b) => {
                let (a, b) = (a.eval(row), b.eval(row));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            BoundExpr::Unary(func, a) => {
                let a = a.eval(row);
                match func {
                    // log of a non-positive value is rejected rather than
                    // propagated as -inf/NaN
                    Func::Log if a <= 0.0 => f64::NAN,
                    Func::Log => a.ln(),
                    Func::Sqrt => a.sqrt(),
                    Func::Exp => a.exp(),
                }
            }
            BoundExpr::Pow(base, n) => base.eval(row).powi(*n),
        }
    }
}
