//! The `.sdg` input language.
//!
//! ```text
//! dim 3
//! var x y z
//! form w = dz - y*dx          # "^" is the wedge, powers are pow(x,n)
//! vector X = (1, 0, y)
//! dist D = ker(w)
//! patch P(s, t) = (s, t, 0)
//! conn A = [0, -x*dy; x*dy, 0]
//! ```
//!
//! Precedence from loosest to tightest: `+ -`, `* /`, `^`, unary minus.
//! Scalars are 0-forms; `+` requires equal degrees and `*` needs at least one
//! scalar operand.

mod ast;
mod lexer;
mod parser;
mod program;
mod scalar;

use std::fmt;

pub use ast::{BinOp, Expr};
pub use parser::parse;
pub use program::{Definition, DistKind, Program};
pub use scalar::{Func, Scalar, ScalarDisplay, ScalarExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Unbalanced,
    UnknownIdentifier,
    DegreeMismatch,
    DuplicateName,
    Syntax,
}

impl ParseErrorKind {
    fn label(&self) -> &'static str {
        match self {
            ParseErrorKind::Lexical => "lexical error",
            ParseErrorKind::Unbalanced => "unbalanced delimiter",
            ParseErrorKind::UnknownIdentifier => "unknown identifier",
            ParseErrorKind::DegreeMismatch => "degree mismatch",
            ParseErrorKind::DuplicateName => "duplicate name",
            ParseErrorKind::Syntax => "syntax error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.line,
            self.col,
            self.kind.label(),
            self.message
        )
    }
}

impl std::error::Error for ParseError {}
