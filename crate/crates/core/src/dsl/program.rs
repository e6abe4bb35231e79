use std::fmt;

use crate::connections::{ConnectionData, MatrixGroupSpec};
use crate::distributions::{Distribution, IntegralPatch, VectorField};
use crate::error::{Error, Result};
use crate::forms::ClassicalForm;

use super::ast::{BinOp, Expr};
use super::scalar::ScalarExpr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistKind {
    Span,
    Kernel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Definition {
    Form {
        expr: Expr,
        degree: usize,
    },
    Vector(Vec<Expr>),
    Dist {
        kind: DistKind,
        refs: Vec<String>,
    },
    Patch {
        params: Vec<String>,
        comps: Vec<Expr>,
    },
    /// Rows of 1-form entries (or the literal `0`).
    Conn(Vec<Vec<Expr>>),
}

/// A parsed `.sdg` file.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub dim: usize,
    pub vars: Vec<String>,
    pub defs: Vec<(String, Definition)>,
}

fn lower_form(e: &Expr, vars: &[String]) -> Result<ClassicalForm> {
    let n = vars.len();
    let index = |name: &str| {
        vars.iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Invalid(format!("unknown variable '{name}'")))
    };
    Ok(match e {
        Expr::Num(v) => ClassicalForm::scalar(n, ScalarExpr::Const(*v)),
        Expr::Var(name) => ClassicalForm::scalar(n, ScalarExpr::var(index(name)?)),
        Expr::Diff(name) => ClassicalForm::differential(n, index(name)?)?,
        Expr::Neg(a) => lower_form(a, vars)?.neg(),
        Expr::Bin(op, a, b) => {
            let (a, b) = (lower_form(a, vars)?, lower_form(b, vars)?);
            match op {
                BinOp::Add => a.add(&b)?,
                BinOp::Sub => a.sub(&b)?,
                BinOp::Wedge => a.wedge(&b)?,
                BinOp::Mul if a.degree() == 0 => b.mul_scalar(&scalar_part(&a)),
                BinOp::Mul => a.mul_scalar(&scalar_part(&b)),
                BinOp::Div if b.degree() == 0 => a.div_scalar(&scalar_part(&b)),
                BinOp::Div => return Err(Error::Invalid("division by a form".into())),
            }
        }
        Expr::Call(..) | Expr::Pow(..) => ClassicalForm::scalar(n, lower_scalar(e, vars)?),
    })
}

fn scalar_part(f: &ClassicalForm) -> ScalarExpr {
    f.coefficient(&[])
        .cloned()
        .unwrap_or(ScalarExpr::Const(0.0))
}

/// Lowers a degree-0 expression with `vars` as variables `0..`.
pub(crate) fn lower_scalar(e: &Expr, vars: &[String]) -> Result<ScalarExpr> {
    Ok(match e {
        Expr::Num(v) => ScalarExpr::Const(*v),
        Expr::Var(name) => ScalarExpr::var(
            vars.iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Invalid(format!("unknown variable '{name}'")))?,
        ),
        Expr::Diff(name) => return Err(Error::Invalid(format!("d{name} is not a scalar"))),
        Expr::Neg(a) => ScalarExpr::neg(lower_scalar(a, vars)?),
        Expr::Bin(op, a, b) => {
            let (a, b) = (lower_scalar(a, vars)?, lower_scalar(b, vars)?);
            match op {
                BinOp::Add => ScalarExpr::add(a, b),
                BinOp::Sub => ScalarExpr::sub(a, b),
                BinOp::Mul => ScalarExpr::mul(a, b),
                BinOp::Div => ScalarExpr::div(a, b),
                BinOp::Wedge => return Err(Error::Invalid("wedge of scalars".into())),
            }
        }
        Expr::Call(f, a) => ScalarExpr::call(*f, lower_scalar(a, vars)?),
        Expr::Pow(a, k) => ScalarExpr::pow(lower_scalar(a, vars)?, *k),
    })
}

impl Program {
    pub fn definition(&self, name: &str) -> Option<&Definition> {
        self.defs.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    fn lookup(&self, name: &str, what: &str) -> Result<&Definition> {
        self.definition(name)
            .ok_or_else(|| Error::Invalid(format!("no {what} named '{name}'")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(|(n, _)| n.as_str())
    }

    pub fn form(&self, name: &str) -> Result<ClassicalForm> {
        match self.lookup(name, "form")? {
            Definition::Form { expr, .. } => lower_form(expr, &self.vars),
            _ => Err(Error::Invalid(format!("'{name}' is not a form"))),
        }
    }

    pub fn vector(&self, name: &str) -> Result<VectorField> {
        match self.lookup(name, "vector")? {
            Definition::Vector(comps) => {
                comps.iter().map(|c| lower_scalar(c, &self.vars)).collect()
            }
            _ => Err(Error::Invalid(format!("'{name}' is not a vector"))),
        }
    }

    pub fn distribution(&self, name: &str) -> Result<Distribution> {
        match self.lookup(name, "distribution")? {
            Definition::Dist {
                kind: DistKind::Span,
                refs,
            } => {
                let fields = refs.iter().map(|r| self.vector(r)).collect::<Result<_>>()?;
                Distribution::from_span(self.dim, fields)
            }
            Definition::Dist {
                kind: DistKind::Kernel,
                refs,
            } => {
                let forms = refs.iter().map(|r| self.form(r)).collect::<Result<_>>()?;
                Distribution::from_kernel(self.dim, forms)
            }
            _ => Err(Error::Invalid(format!("'{name}' is not a distribution"))),
        }
    }

    /// Parameter names and the patch map.
    pub fn patch(&self, name: &str) -> Result<(Vec<String>, IntegralPatch)> {
        match self.lookup(name, "patch")? {
            Definition::Patch { params, comps } => {
                let map = comps
                    .iter()
                    .map(|c| lower_scalar(c, params))
                    .collect::<Result<_>>()?;
                Ok((params.clone(), IntegralPatch::new(params.len(), map)?))
            }
            _ => Err(Error::Invalid(format!("'{name}' is not a patch"))),
        }
    }

    /// The connection with structure group GL(m).
    pub fn connection(&self, name: &str) -> Result<ConnectionData> {
        self.connection_in(name, MatrixGroupSpec::general)
    }

    pub fn connection_in(
        &self,
        name: &str,
        group: impl FnOnce(usize) -> MatrixGroupSpec,
    ) -> Result<ConnectionData> {
        match self.lookup(name, "connection")? {
            Definition::Conn(rows) => {
                let entries = rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| match e {
                                Expr::Num(v) if *v == 0.0 => Ok(ClassicalForm::zero(self.dim, 1)),
                                e => lower_form(e, &self.vars),
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                ConnectionData::from_form_matrix(self.dim, group(rows.len()), &entries)
            }
            _ => Err(Error::Invalid(format!("'{name}' is not a connection"))),
        }
    }
}

fn list(f: &mut fmt::Formatter<'_>, items: &[impl fmt::Display], sep: &str) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            write!(f, "{sep}")?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

/// Canonical source text; parsing it back yields an equal program.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        write!(f, "var ")?;
        list(f, &self.vars, " ")?;
        writeln!(f)?;
        for (name, def) in &self.defs {
            match def {
                Definition::Form { expr, .. } => writeln!(f, "form {name} = {expr}")?,
                Definition::Vector(comps) => {
                    write!(f, "vector {name} = (")?;
                    list(f, comps, ", ")?;
                    writeln!(f, ")")?;
                }
                Definition::Dist { kind, refs } => {
                    let k = match kind {
                        DistKind::Span => "span",
                        DistKind::Kernel => "ker",
                    };
                    write!(f, "dist {name} = {k}(")?;
                    list(f, refs, ", ")?;
                    writeln!(f, ")")?;
                }
                Definition::Patch { params, comps } => {
                    write!(f, "patch {name}(")?;
                    list(f, params, ", ")?;
                    write!(f, ") = (")?;
                    list(f, comps, ", ")?;
                    writeln!(f, ")")?;
                }
                Definition::Conn(rows) => {
                    write!(f, "conn {name} = [")?;
                    for (i, row) in rows.iter().enumerate() {
                        if i > 0 {
                            write!(f, "; ")?;
                        }
                        list(f, row, ", ")?;
                    }
                    writeln!(f, "]")?;
                }
            }
        }
        Ok(())
    }
}
