use std::collections::HashMap;

use super::ast::{BinOp, Expr};
use super::lexer::{tokenize, Tok, Token};
use super::program::{Definition, DistKind, Program};
use super::scalar::Func;
use super::{ParseError, ParseErrorKind};

const KEYWORDS: &[&str] = &["dim", "var", "form", "vector", "dist", "patch", "conn"];

/// Parses a whole program.
pub fn parse(text: &str) -> Result<Program, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        dim: None,
        vars: Vec::new(),
        kinds: HashMap::new(),
        defs: Vec::new(),
    };
    p.program()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DefKind {
    Form(usize),
    Vector,
    Dist,
    Patch,
    Conn,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    dim: Option<usize>,
    vars: Vec<String>,
    kinds: HashMap<String, DefKind>,
    defs: Vec<(String, Definition)>,
}

/// Variables visible inside an expression.
struct Scope<'a> {
    vars: &'a [String],
    diffs: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error_at(
        &self,
        tok: &Token,
        kind: ParseErrorKind,
        message: impl Into<String>,
    ) -> ParseError {
        ParseError {
            kind,
            line: tok.line,
            col: tok.col,
            message: message.into(),
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let t = self.peek();
        let kind = match t.tok {
            Tok::RParen | Tok::RBracket => ParseErrorKind::Unbalanced,
            _ => ParseErrorKind::Syntax,
        };
        self.error_at(
            t,
            kind,
            format!("expected {what}, found {}", t.tok.describe()),
        )
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Token> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(what))
        }
    }

    /// Expects the closing delimiter of `open`.
    fn close(&mut self, tok: Tok, open: &Token) -> PResult<()> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            let t = self.peek();
            Err(self.error_at(
                t,
                ParseErrorKind::Unbalanced,
                format!(
                    "expected {} to close {} opened at {}:{}, found {}",
                    tok.describe(),
                    open.tok.describe(),
                    open.line,
                    open.col,
                    t.tok.describe()
                ),
            ))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Token)> {
        match &self.peek().tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                Ok((s, self.bump()))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => break,
                Tok::Ident(kw) => match kw.as_str() {
                    "dim" => self.dim_stmt()?,
                    "var" => self.var_stmt()?,
                    "form" | "vector" | "dist" | "patch" | "conn" => {
                        self.require_chart(&t)?;
                        let kw = kw.clone();
                        self.bump();
                        let (name, name_tok) = self.ident("a definition name")?;
                        if self.kinds.contains_key(&name) || self.vars.contains(&name) {
                            return Err(self.error_at(
                                &name_tok,
                                ParseErrorKind::DuplicateName,
                                format!("'{name}' is already defined"),
                            ));
                        }
                        let (def, kind) = match kw.as_str() {
                            "form" => self.form_def()?,
                            "vector" => self.vector_def()?,
                            "dist" => self.dist_def()?,
                            "patch" => self.patch_def()?,
                            _ => self.conn_def()?,
                        };
                        self.kinds.insert(name.clone(), kind);
                        self.defs.push((name, def));
                    }
                    _ => return Err(self.unexpected("a statement keyword")),
                },
                _ => return Err(self.unexpected("a statement keyword")),
            }
        }
        let dim = self.dim.unwrap_or(self.vars.len());
        Ok(Program {
            dim,
            vars: std::mem::take(&mut self.vars),
            defs: std::mem::take(&mut self.defs),
        })
    }

    fn require_chart(&self, at: &Token) -> PResult<()> {
        if self.vars.is_empty() {
            Err(self.error_at(
                at,
                ParseErrorKind::Syntax,
                "definitions require a preceding 'var' declaration",
            ))
        } else {
            Ok(())
        }
    }

    fn dim_stmt(&mut self) -> PResult<()> {
        let kw = self.bump();
        let t = self.bump();
        match t.tok {
            Tok::Num(v) if v.fract() == 0.0 && v >= 1.0 => {
                if self.dim.is_some() {
                    return Err(self.error_at(
                        &kw,
                        ParseErrorKind::DuplicateName,
                        "'dim' declared twice",
                    ));
                }
                if !self.vars.is_empty() && self.vars.len() != v as usize {
                    return Err(self.error_at(
                        &t,
                        ParseErrorKind::Syntax,
                        "dimension does not match declared variables",
                    ));
                }
                self.dim = Some(v as usize);
                Ok(())
            }
            _ => Err(self.error_at(
                &t,
                ParseErrorKind::Syntax,
                "expected a positive integer after 'dim'",
            )),
        }
    }

    fn var_stmt(&mut self) -> PResult<()> {
        let kw = self.bump();
        if !self.vars.is_empty() {
            return Err(self.error_at(&kw, ParseErrorKind::DuplicateName, "'var' declared twice"));
        }
        let mut vars: Vec<String> = Vec::new();
        while let Tok::Ident(name) = &self.peek().tok {
            if KEYWORDS.contains(&name.as_str()) {
                break;
            }
            let name = name.clone();
            let t = self.bump();
            if vars.contains(&name) || Func::from_name(&name).is_some() || name == "pow" {
                return Err(self.error_at(
                    &t,
                    ParseErrorKind::DuplicateName,
                    format!("variable '{name}' is not allowed or repeated"),
                ));
            }
            vars.push(name);
        }
        if vars.is_empty() {
            return Err(self.unexpected("variable names"));
        }
        if let Some(d) = self.dim {
            if d != vars.len() {
                return Err(self.error_at(
                    &kw,
                    ParseErrorKind::Syntax,
                    format!("'dim {d}' but {} variables declared", vars.len()),
                ));
            }
        }
        self.vars = vars;
        Ok(())
    }

    fn form_def(&mut self) -> PResult<(Definition, DefKind)> {
        self.expect(Tok::Eq, "'='")?;
        let vars = self.vars.clone();
        let scope = Scope {
            vars: &vars,
            diffs: true,
        };
        let (expr, degree) = self.sum(&scope)?;
        Ok((Definition::Form { expr, degree }, DefKind::Form(degree)))
    }

    fn scalar_list(&mut self, scope: &Scope) -> PResult<Vec<Expr>> {
        let open = self.expect(Tok::LParen, "'('")?;
        let mut out = vec![self.scalar(scope)?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            out.push(self.scalar(scope)?);
        }
        self.close(Tok::RParen, &open)?;
        Ok(out)
    }

    fn scalar(&mut self, scope: &Scope) -> PResult<Expr> {
        let start = self.peek().clone();
        let (e, degree) = self.sum(scope)?;
        if degree != 0 {
            return Err(self.error_at(
                &start,
                ParseErrorKind::DegreeMismatch,
                format!("expected a scalar, found a {degree}-form"),
            ));
        }
        Ok(e)
    }

    fn check_len(&self, at: &Token, got: usize) -> PResult<()> {
        let dim = self.vars.len();
        if got != dim {
            Err(self.error_at(
                at,
                ParseErrorKind::Syntax,
                format!("expected {dim} components, found {got}"),
            ))
        } else {
            Ok(())
        }
    }

    fn vector_def(&mut self) -> PResult<(Definition, DefKind)> {
        self.expect(Tok::Eq, "'='")?;
        let at = self.peek().clone();
        let vars = self.vars.clone();
        let comps = self.scalar_list(&Scope {
            vars: &vars,
            diffs: false,
        })?;
        self.check_len(&at, comps.len())?;
        Ok((Definition::Vector(comps), DefKind::Vector))
    }

    fn dist_def(&mut self) -> PResult<(Definition, DefKind)> {
        self.expect(Tok::Eq, "'='")?;
        let kind_tok = self.peek().clone();
        let kind = match &kind_tok.tok {
            Tok::Ident(s) if s == "span" => DistKind::Span,
            Tok::Ident(s) if s == "ker" => DistKind::Kernel,
            _ => return Err(self.unexpected("'span' or 'ker'")),
        };
        self.bump();
        let open = self.expect(Tok::LParen, "'('")?;
        let mut refs = Vec::new();
        loop {
            let t = self.peek().clone();
            let name = match &t.tok {
                Tok::Ident(s) => s.clone(),
                _ => return Err(self.unexpected("a vector or form name")),
            };
            self.bump();
            let ok = match (kind, self.kinds.get(&name)) {
                (DistKind::Span, Some(DefKind::Vector)) => true,
                (DistKind::Kernel, Some(DefKind::Form(1))) => true,
                (_, None) => {
                    return Err(self.error_at(
                        &t,
                        ParseErrorKind::UnknownIdentifier,
                        format!("unknown identifier '{name}'"),
                    ))
                }
                _ => false,
            };
            if !ok {
                let want = if kind == DistKind::Span {
                    "a vector"
                } else {
                    "a 1-form"
                };
                return Err(self.error_at(
                    &t,
                    ParseErrorKind::DegreeMismatch,
                    format!("'{name}' is not {want}"),
                ));
            }
            refs.push(name);
            if self.peek().tok == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.close(Tok::RParen, &open)?;
        Ok((Definition::Dist { kind, refs }, DefKind::Dist))
    }

    fn patch_def(&mut self) -> PResult<(Definition, DefKind)> {
        let open = self.expect(Tok::LParen, "'('")?;
        let mut params = Vec::new();
        loop {
            let (p, t) = self.ident("a parameter name")?;
            if params.contains(&p) {
                return Err(self.error_at(
                    &t,
                    ParseErrorKind::DuplicateName,
                    format!("parameter '{p}' repeated"),
                ));
            }
            params.push(p);
            if self.peek().tok == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.close(Tok::RParen, &open)?;
        self.expect(Tok::Eq, "'='")?;
        let at = self.peek().clone();
        let comps = self.scalar_list(&Scope {
            vars: &params,
            diffs: false,
        })?;
        self.check_len(&at, comps.len())?;
        Ok((Definition::Patch { params, comps }, DefKind::Patch))
    }

    fn conn_def(&mut self) -> PResult<(Definition, DefKind)> {
        self.expect(Tok::Eq, "'='")?;
        let open = self.expect(Tok::LBracket, "'['")?;
        let vars = self.vars.clone();
        let scope = Scope {
            vars: &vars,
            diffs: true,
        };
        let mut rows: Vec<Vec<Expr>> = vec![Vec::new()];
        loop {
            let at = self.peek().clone();
            let (e, degree) = self.sum(&scope)?;
            if degree != 1 && e != Expr::Num(0.0) {
                return Err(self.error_at(
                    &at,
                    ParseErrorKind::DegreeMismatch,
                    format!("connection entries must be 1-forms, found degree {degree}"),
                ));
            }
            rows.last_mut().expect("nonempty").push(e);
            match self.peek().tok {
                Tok::Comma => {
                    self.bump();
                }
                Tok::Semi => {
                    self.bump();
                    rows.push(Vec::new());
                }
                _ => break,
            }
        }
        self.close(Tok::RBracket, &open)?;
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(self.error_at(
                &open,
                ParseErrorKind::Syntax,
                "connection matrix must be square",
            ));
        }
        Ok((Definition::Conn(rows), DefKind::Conn))
    }

    // Expressions. Each returns the tree and its form degree.

    fn sum(&mut self, scope: &Scope) -> PResult<(Expr, usize)> {
        let (mut lhs, degree) = self.product(scope)?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            let op_tok = self.bump();
            let (rhs, d) = self.product(scope)?;
            if d != degree {
                return Err(self.error_at(
                    &op_tok,
                    ParseErrorKind::DegreeMismatch,
                    format!("cannot combine a {degree}-form with a {d}-form"),
                ));
            }
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, degree))
    }

    fn product(&mut self, scope: &Scope) -> PResult<(Expr, usize)> {
        let (mut lhs, mut degree) = self.wedge(scope)?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            let op_tok = self.bump();
            let (rhs, d) = self.wedge(scope)?;
            match op {
                BinOp::Mul if degree > 0 && d > 0 => {
                    return Err(self.error_at(
                        &op_tok,
                        ParseErrorKind::DegreeMismatch,
                        "'*' needs a scalar operand; use '^' for the wedge",
                    ))
                }
                BinOp::Div if d > 0 => {
                    return Err(self.error_at(
                        &op_tok,
                        ParseErrorKind::DegreeMismatch,
                        "division by a form",
                    ))
                }
                _ => {}
            }
            degree += d;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, degree))
    }

    fn wedge(&mut self, scope: &Scope) -> PResult<(Expr, usize)> {
        let (mut lhs, mut degree) = self.unary(scope)?;
        while self.peek().tok == Tok::Caret {
            let op_tok = self.bump();
            let (rhs, d) = self.unary(scope)?;
            degree += d;
            if degree > scope.vars.len() {
                return Err(self.error_at(
                    &op_tok,
                    ParseErrorKind::DegreeMismatch,
                    format!("degree {degree} exceeds the dimension {}", scope.vars.len()),
                ));
            }
            lhs = Expr::Bin(BinOp::Wedge, Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, degree))
    }

    fn unary(&mut self, scope: &Scope) -> PResult<(Expr, usize)> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            let (e, d) = self.unary(scope)?;
            return Ok((Expr::Neg(Box::new(e)), d));
        }
        self.atom(scope)
    }

    fn atom(&mut self, scope: &Scope) -> PResult<(Expr, usize)> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Num(v) => {
                self.bump();
                Ok((Expr::Num(*v), 0))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.sum(scope)?;
                self.close(Tok::RParen, &t)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let name = name.clone();
                if *self.peek_at(1) == Tok::LParen
                    && (name == "pow" || Func::from_name(&name).is_some())
                {
                    return self.call(&name, scope);
                }
                self.bump();
                if scope.vars.contains(&name) {
                    return Ok((Expr::Var(name), 0));
                }
                if let Some(v) = name.strip_prefix('d') {
                    if scope.diffs && scope.vars.iter().any(|s| s == v) {
                        return Ok((Expr::Diff(v.to_string()), 1));
                    }
                }
                Err(self.error_at(
                    &t,
                    ParseErrorKind::UnknownIdentifier,
                    format!("unknown identifier '{name}'"),
                ))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn call(&mut self, name: &str, scope: &Scope) -> PResult<(Expr, usize)> {
        self.bump();
        let open = self.bump();
        let arg = self.scalar(scope)?;
        let e = if name == "pow" {
            self.expect(Tok::Comma, "',' in pow(x,n)")?;
            let negative = if self.peek().tok == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let t = self.bump();
            let n = match t.tok {
                Tok::Num(v) if v.fract() == 0.0 && v.abs() < i32::MAX as f64 => v as i32,
                _ => {
                    return Err(self.error_at(
                        &t,
                        ParseErrorKind::Syntax,
                        "pow exponent must be an integer literal",
                    ))
                }
            };
            Expr::Pow(Box::new(arg), if negative { -n } else { n })
        } else {
            Expr::Call(
                Func::from_name(name).expect("checked by caller"),
                Box::new(arg),
            )
        };
        self.close(Tok::RParen, &open)?;
        Ok((e, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_form_program() {
        let p = parse("dim 3\nvar x y z\nform w = dz - y*dx").unwrap();
        assert_eq!(p.dim, 3);
        match p.definition("w") {
            Some(Definition::Form { degree, .. }) => assert_eq!(*degree, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_form_terms() {
        let p = parse("var x y z\nform t = dx^dy + sin(z)*dy^dz").unwrap();
        let form = p.form("t").unwrap();
        assert_eq!(form.degree(), 2);
        assert_eq!(form.terms().count(), 2);
    }

    #[test]
    fn degree_mismatch_at_plus() {
        let err = parse("var x y\nform bad = dx + dx^dy").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DegreeMismatch);
        assert_eq!((err.line, err.col), (2, 15));
    }

    #[test]
    fn error_kinds() {
        let cases = [
            ("var x\nform w = (dx", ParseErrorKind::Unbalanced),
            ("var x\nform w = dq", ParseErrorKind::UnknownIdentifier),
            (
                "var x\nform w = dx\nform w = dx",
                ParseErrorKind::DuplicateName,
            ),
            ("var x y\nform w = dx*dy", ParseErrorKind::DegreeMismatch),
            ("var x\nform w = dx @", ParseErrorKind::Lexical),
            ("var x\nform w = sin(dx)", ParseErrorKind::DegreeMismatch),
            ("var x y\nvector v = (1)", ParseErrorKind::Syntax),
            (
                "var x y\nform w = dx^dy\ndist D = ker(w)",
                ParseErrorKind::DegreeMismatch,
            ),
            (
                "var x y\ndist D = span(V)",
                ParseErrorKind::UnknownIdentifier,
            ),
            ("var x y\nconn A = [dx, 0; 0]", ParseErrorKind::Syntax),
            ("dim 2\nvar x y z", ParseErrorKind::Syntax),
            ("var x y\nform w = dx)", ParseErrorKind::Unbalanced),
        ];
        for (src, kind) in cases {
            let err = parse(src).unwrap_err();
            assert_eq!(err.kind, kind, "{src:?}: {err}");
        }
    }

    #[test]
    fn patch_params_are_local() {
        let p = parse("var x y\npatch c(t) = (cos(t), sin(t))").unwrap();
        assert!(matches!(p.definition("c"), Some(Definition::Patch { .. })));
        assert!(parse("var x y\npatch c(t) = (x, t)").is_err());
    }

    #[test]
    fn connection_matrix() {
        let p = parse("var x y\nconn A = [0, -x*dy; x*dy, 0]").unwrap();
        match p.definition("A") {
            Some(Definition::Conn(rows)) => assert_eq!(rows.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
