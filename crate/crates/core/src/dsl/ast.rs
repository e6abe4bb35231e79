use std::fmt;

use super::scalar::Func;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Wedge,
}

impl BinOp {
    fn precedence(&self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Wedge => 3,
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Wedge => "^",
        }
    }
}

/// Surface syntax tree: scalars and forms share one grammar.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    /// The differential `d<var>`.
    Diff(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.precedence(),
            Expr::Neg(_) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |e: &Expr, f: &mut fmt::Formatter<'_>, parens: bool| {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(name) => write!(f, "{name}"),
            Expr::Diff(name) => write!(f, "d{name}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                child(e, f, e.precedence() < 4)
            }
            Expr::Bin(op, a, b) => {
                let p = op.precedence();
                child(a, f, a.precedence() < p)?;
                write!(f, "{}", op.symbol())?;
                child(b, f, b.precedence() <= p)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Pow(e, n) => write!(f, "pow({e},{n})"),
        }
    }
}
