//! Recursive-descent parser.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '√' unary | power
//! power   := primary ('^' exponent)*
//! primary := NUMBER | '-' NUMBER | IDENT | FUNC '(' expr ')'
//!          | 'e' '^' (group | NUMBER | IDENT) | '(' expr ')'
//! group   := '(' expr ')' | '{' expr '}'
//! ```
//!
//! Positions in errors are 0-based character offsets.

use super::{BinOp, Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    Caret,
    Sqrt,
    LParen,
    RParen,
    LBrace,
    RBrace,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::Caret => "'^'".into(),
            Tok::Sqrt => "'√'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' => Tok::Op(c),
            '×' | '·' => Tok::Op('*'),
            '−' => Tok::Op('-'),
            '^' => Tok::Caret,
            '√' => Tok::Sqrt,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            c if c.is_ascii_digit() || c == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                if lit.parse::<f64>().is_err() {
                    return Err(err(start, format!("malformed number `{lit}`")));
                }
                out.push((Tok::Num(lit), start));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => return Err(err(start, format!("unknown symbol '{other}'"))),
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(err(
                self.offset(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Sqrt {
            self.bump();
            let arg = self.unary()?;
            return Ok(Expr::unary(Func::Sqrt, arg));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.exponent()?;
            base = Expr::pow(base, exponent);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32> {
        let braced = *self.peek() == Tok::LBrace;
        if braced {
            self.bump();
        }
        let at = self.offset();
        let value = match self.bump() {
            Tok::Num(n) => n
                .parse::<u32>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| err(at, format!("exponent must be a positive integer, found {n}")))?,
            other => {
                return Err(err(
                    at,
                    format!("expected integer exponent, found {}", other.describe()),
                ))
            }
        };
        if braced {
            self.expect(Tok::RBrace)?;
        }
        Ok(value)
    }

    fn group(&mut self) -> Result<Expr> {
        let close = match self.peek() {
            Tok::LParen => Tok::RParen,
            Tok::LBrace => Tok::RBrace,
            other => {
                return Err(err(
                    self.offset(),
                    format!("expected '(' or '{{', found {}", other.describe()),
                ))
            }
        };
        self.bump();
        let inner = self.expr()?;
        self.expect(close)?;
        Ok(inner)
    }

    fn primary(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(n) => Ok(Expr::Lit(n.parse().expect("validated by tokenizer"))),
            Tok::Op('-') => match self.bump() {
                Tok::Num(n) => Ok(Expr::Lit(-n.parse::<f64>().expect("validated by tokenizer"))),
                _ => Err(err(at, "unary minus is only allowed before a numeric literal")),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(err(
                        self.offset(),
                        format!("unbalanced parentheses: expected ')', found {}", self.peek().describe()),
                    ));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "log" | "ln" => Some(Func::Log),
                    "sqrt" => Some(Func::Sqrt),
                    "exp" => Some(Func::Exp),
                    _ => None,
                };
                if let Some(func) = func {
                    if *self.peek() == Tok::LParen {
                        let arg = self.group()?;
                        return Ok(Expr::unary(func, arg));
                    }
                }
                if name == "e" && *self.peek() == Tok::Caret {
                    self.bump();
                    let arg = match self.peek() {
                        Tok::LParen | Tok::LBrace => self.group()?,
                        _ => self.primary()?,
                    };
                    return Ok(Expr::unary(Func::Exp, arg));
                }
                Ok(Expr::Var(name))
            }
            Tok::End => Err(err(at, "expected operand, found end of input")),
            Tok::RParen => Err(err(at, "unbalanced parentheses: unexpected ')'")),
            other => Err(err(at, format!("expected operand, found {}", other.describe()))),
        }
    }
}

/// Parses an expression such as `0.5*t + log(x)` or `e^{sqrt(t+u)}`.
pub fn parse(text: &str) -> Result<Expr> {
    let toks = tokenize(text)?;
    if toks.len() == 1 {
        return Err(err(0, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::RParen => Err(err(p.offset(), "unbalanced parentheses: unexpected ')'")),
        other => Err(err(
            p.offset(),
            format!("unexpected {} after expression", other.describe()),
        )),
    }
}
