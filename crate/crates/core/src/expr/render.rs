use super::{Expr, Func};

/// Single-line rendering with explicit grouping.
///
/// Every binary operand that is itself a binary node is parenthesized, except
/// the left operand of a same-class run, so `a + b + c` renders as written.
/// Division stays inline and powers use `^`.
pub fn render_linearized(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn write_literal(v: f64, out: &mut String) {
    out.push_str(&format!("{v}"));
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Var(name) => out.push_str(name),
        Expr::Lit(v) => write_literal(*v, out),
        Expr::Binary { op, lhs, rhs } => {
            let left_bare = match lhs.as_ref() {
                Expr::Binary { op: inner, .. } => inner.same_class(*op),
                _ => true,
            };
            write_operand(lhs, left_bare, out);
            out.push(' ');
            out.push(op.symbol());
            out.push(' ');
            write_operand(rhs, !matches!(rhs.as_ref(), Expr::Binary { .. }), out);
        }
        Expr::Unary { func: Func::Exp, arg } => {
            out.push_str("e^{");
            write_expr(arg, out);
            out.push('}');
        }
        Expr::Unary { func, arg } => {
            out.push_str(func.name());
            out.push('(');
            write_expr(arg, out);
            out.push(')');
        }
        Expr::Pow { base, exponent } => {
            let bare = match base.as_ref() {
                Expr::Var(_) => true,
                Expr::Lit(v) => *v >= 0.0,
                Expr::Unary { func, .. } => *func != Func::Exp,
                _ => false,
            };
            write_operand(base, bare, out);
            out.push('^');
            out.push_str(&exponent.to_string());
        }
    }
}

fn write_operand(e: &Expr, bare: bool, out: &mut String) {
    if bare {
        write_expr(e, out);
    } else {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    }
}
