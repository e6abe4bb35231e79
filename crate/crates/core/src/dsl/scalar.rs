use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::nilpotent::{Context, NilElement, Primitive};

/// Named unary functions of the surface language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn primitive(&self) -> Primitive {
        match self {
            Func::Sin => Primitive::Sin,
            Func::Cos => Primitive::Cos,
            Func::Exp => Primitive::Exp,
            Func::Ln => Primitive::Ln,
            Func::Sqrt => Primitive::Sqrt,
        }
    }
}

/// Closed-form scalar expression over indexed variables.
///
/// Children are reference counted so that derivatives can share subtrees.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarExpr {
    Const(f64),
    Var(usize),
    Neg(Arc<ScalarExpr>),
    Add(Arc<ScalarExpr>, Arc<ScalarExpr>),
    Sub(Arc<ScalarExpr>, Arc<ScalarExpr>),
    Mul(Arc<ScalarExpr>, Arc<ScalarExpr>),
    Div(Arc<ScalarExpr>, Arc<ScalarExpr>),
    Pow(Arc<ScalarExpr>, i32),
    Call(Func, Arc<ScalarExpr>),
}

use ScalarExpr::*;

#[allow(clippy::should_implement_trait, clippy::redundant_guards)]
impl ScalarExpr {
    pub fn var(i: usize) -> Self {
        Var(i)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    // Smart constructors: constant folding and the identities 0+a, 1*a, …

    pub fn neg(a: ScalarExpr) -> Self {
        match a {
            Const(c) => Const(-c),
            Neg(inner) => (*inner).clone(),
            other => Neg(Arc::new(other)),
        }
    }

    pub fn add(a: ScalarExpr, b: ScalarExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Const(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Add(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn sub(a: ScalarExpr, b: ScalarExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Const(x - y),
            (Some(x), _) if x == 0.0 => Self::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Sub(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn mul(a: ScalarExpr, b: ScalarExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Const(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Const(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == -1.0 => Self::neg(b),
            (_, Some(y)) if y == -1.0 => Self::neg(a),
            _ => Mul(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn div(a: ScalarExpr, b: ScalarExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Const(x / y),
            (Some(x), _) if x == 0.0 => Const(0.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => Div(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn pow(a: ScalarExpr, n: i32) -> Self {
        match (a.as_const(), n) {
            (_, 0) => Const(1.0),
            (_, 1) => a,
            (Some(x), n) if x != 0.0 || n > 0 => Const(x.powi(n)),
            _ => Pow(Arc::new(a), n),
        }
    }

    pub fn call(f: Func, a: ScalarExpr) -> Self {
        Call(f, Arc::new(a))
    }

    /// Exact symbolic derivative with respect to variable `v`.
    pub fn diff(&self, v: usize) -> ScalarExpr {
        match self {
            Const(_) => Const(0.0),
            Var(i) => Const(if *i == v { 1.0 } else { 0.0 }),
            Neg(a) => Self::neg(a.diff(v)),
            Add(a, b) => Self::add(a.diff(v), b.diff(v)),
            Sub(a, b) => Self::sub(a.diff(v), b.diff(v)),
            Mul(a, b) => Self::add(
                Self::mul(a.diff(v), (**b).clone()),
                Self::mul((**a).clone(), b.diff(v)),
            ),
            Div(a, b) => {
                let da = a.diff(v);
                let db = b.diff(v);
                if db.is_zero() {
                    Self::div(da, (**b).clone())
                } else {
                    // (a'b - ab') / b²
                    Self::div(
                        Self::sub(Self::mul(da, (**b).clone()), Self::mul((**a).clone(), db)),
                        Self::pow((**b).clone(), 2),
                    )
                }
            }
            Pow(a, n) => Self::mul(
                Self::mul(Const(*n as f64), Self::pow((**a).clone(), n - 1)),
                a.diff(v),
            ),
            Call(f, a) => {
                let inner = (**a).clone();
                let outer = match f {
                    Func::Sin => Self::call(Func::Cos, inner),
                    Func::Cos => Self::neg(Self::call(Func::Sin, inner)),
                    Func::Exp => self.clone(),
                    Func::Ln => Self::div(Const(1.0), inner),
                    Func::Sqrt => Self::div(Const(1.0), Self::mul(Const(2.0), self.clone())),
                };
                let da = a.diff(v);
                // keep the outer factor first: d ln(x)/dx prints as 1/x
                Self::mul(outer, da)
            }
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Const(_) => None,
            Var(i) => Some(*i),
            Neg(a) | Pow(a, _) | Call(_, a) => a.max_var(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Replaces every variable by an expression (composition).
    pub fn compose(&self, subs: &[ScalarExpr]) -> ScalarExpr {
        match self {
            Const(c) => Const(*c),
            Var(i) => subs[*i].clone(),
            Neg(a) => Self::neg(a.compose(subs)),
            Add(a, b) => Self::add(a.compose(subs), b.compose(subs)),
            Sub(a, b) => Self::sub(a.compose(subs), b.compose(subs)),
            Mul(a, b) => Self::mul(a.compose(subs), b.compose(subs)),
            Div(a, b) => Self::div(a.compose(subs), b.compose(subs)),
            Pow(a, n) => Self::pow(a.compose(subs), *n),
            Call(f, a) => Self::call(*f, a.compose(subs)),
        }
    }

    /// Structural evaluation; primitives on W arguments go through the
    /// Taylor lift.
    pub fn eval<S: Scalar>(&self, env: &[S], ctx: S::Ctx) -> Result<S> {
        Ok(match self {
            Const(c) => S::constant(ctx, *c),
            Var(i) => env.get(*i).cloned().ok_or(Error::IndexOutOfRange {
                index: *i,
                bound: env.len(),
            })?,
            Neg(a) => a.eval(env, ctx)?.neg(),
            Add(a, b) => a.eval(env, ctx)?.add(&b.eval(env, ctx)?),
            Sub(a, b) => a.eval(env, ctx)?.sub(&b.eval(env, ctx)?),
            Mul(a, b) => a.eval(env, ctx)?.mul(&b.eval(env, ctx)?),
            Div(a, b) => a.eval(env, ctx)?.div(&b.eval(env, ctx)?)?,
            Pow(a, n) => a.eval(env, ctx)?.powi(*n)?,
            Call(f, a) => a.eval(env, ctx)?.apply(f.primitive())?,
        })
    }

    /// Real evaluation; rejects non-finite results.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        let v = self.eval::<f64>(point, ())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("non-finite value at {point:?}")))
        }
    }

    /// Evaluation at W-valued coordinates.
    pub fn eval_nil(&self, coords: &[NilElement]) -> Result<NilElement> {
        let ctx = coords
            .first()
            .map(|c| c.context())
            .ok_or_else(|| Error::Invalid("no coordinates supplied".into()))?;
        self.eval::<NilElement>(coords, ctx)
    }

    /// Printable form using the given variable names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> ScalarDisplay<'a> {
        ScalarDisplay { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(..) => 4,
            Const(c) if *c < 0.0 => 4,
            _ => 5,
        }
    }
}

pub struct ScalarDisplay<'a> {
    expr: &'a ScalarExpr,
    names: &'a [String],
}

impl ScalarDisplay<'_> {
    fn write(&self, e: &ScalarExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |e: &ScalarExpr, f: &mut fmt::Formatter<'_>, parens: bool| {
            if parens {
                write!(f, "(")?;
                self.write(e, f)?;
                write!(f, ")")
            } else {
                self.write(e, f)
            }
        };
        match e {
            Const(c) => write!(f, "{c}"),
            Var(i) => match self.names.get(*i) {
                Some(n) => write!(f, "{n}"),
                None => write!(f, "v{i}"),
            },
            Neg(a) => {
                write!(f, "-")?;
                child(a, f, a.precedence() < 4)
            }
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                let (op, p) = match e {
                    Add(..) => (" + ", 1),
                    Sub(..) => (" - ", 1),
                    Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                child(a, f, a.precedence() < p)?;
                write!(f, "{op}")?;
                child(b, f, b.precedence() <= p)
            }
            Pow(a, n) => {
                write!(f, "pow(")?;
                self.write(a, f)?;
                write!(f, ",{n})")
            }
            Call(func, a) => {
                write!(f, "{}(", func.name())?;
                self.write(a, f)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for ScalarDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f)
    }
}

/// Values an expression can be evaluated in: plain reals or W elements.
pub trait Scalar: Clone {
    type Ctx: Copy;
    fn constant(ctx: Self::Ctx, c: f64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, other: &Self) -> Result<Self>;
    fn powi(&self, n: i32) -> Result<Self>;
    fn apply(&self, f: Primitive) -> Result<Self>;
}

impl Scalar for f64 {
    type Ctx = ();
    fn constant(_: (), c: f64) -> Self {
        c
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if *o == 0.0 {
            Err(Error::Domain("division by zero".into()))
        } else {
            Ok(self / o)
        }
    }
    fn powi(&self, n: i32) -> Result<Self> {
        if n < 0 && *self == 0.0 {
            Err(Error::Domain("negative power of zero".into()))
        } else {
            Ok(f64::powi(*self, n))
        }
    }
    fn apply(&self, f: Primitive) -> Result<Self> {
        f.apply(*self)
    }
}

impl Scalar for NilElement {
    type Ctx = Context;
    fn constant(ctx: Context, c: f64) -> Self {
        NilElement::constant(ctx, c)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if o.constant_term() == 0.0 {
            return Err(Error::Domain("division by a nilpotent-only element".into()));
        }
        self.checked_div(o)
    }
    fn powi(&self, n: i32) -> Result<Self> {
        if n >= 0 {
            Ok(self.powu(n as u32))
        } else {
            Ok(self.recip()?.powu(n.unsigned_abs()))
        }
    }
    fn apply(&self, f: Primitive) -> Result<Self> {
        self.lift(f)
    }
}
