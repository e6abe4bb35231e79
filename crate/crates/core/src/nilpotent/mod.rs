//! Arithmetic in W(k,n), the algebra of functions on a generic infinitesimal
//! k-simplex in Rⁿ.
//!
//! W(k,n) is generated by the displacement coordinates ξ_{i,a} (row `i` is the
//! vertex `x_{i+1} - x_0`, column `a` the coordinate) subject to commutativity
//! and the exchange relation
//!
//! ```text
//! ξ_{i,a} ξ_{j,b} = -ξ_{j,a} ξ_{i,b}
//! ```
//!
//! A product of generators is therefore zero as soon as a row or a column
//! repeats, and every surviving product is ± a canonical monomial `m(S,T)`
//! with `|S| = |T|`: rows sorted increasingly, columns sorted increasingly,
//! paired in order. The degree-r part has dimension C(k,r)·C(n,r).
//!
//! Rows and columns are 0-based throughout.

mod lift;
mod matrix;
mod morphism;

pub use lift::Primitive;
pub use matrix::WMatrix;

pub(crate) use morphism::small_det as morphism_det;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Maximum number of rows or columns representable by the bitmask keys.
pub const MAX_INDEX: usize = 64;

/// The (k, n) pair fixing which W(k,n) an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Context {
    pub rows: usize,
    pub cols: usize,
}

impl Context {
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(
            rows <= MAX_INDEX && cols <= MAX_INDEX,
            "W({rows},{cols}) exceeds the 64-index limit"
        );
        Context { rows, cols }
    }

    /// Largest degree carrying nonzero monomials, `min(k, n)`.
    pub fn max_degree(&self) -> usize {
        self.rows.min(self.cols)
    }

    fn check(&self, other: &Context) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ContextMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ))
        }
    }
}

/// A single generator ξ_{row,col}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub row: usize,
    pub col: usize,
}

impl Generator {
    pub fn new(row: usize, col: usize) -> Self {
        Generator { row, col }
    }
}

/// Canonical monomial `m(S,T)` stored as a pair of bitmasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub rows: u64,
    pub cols: u64,
}

impl Monomial {
    pub const UNIT: Monomial = Monomial { rows: 0, cols: 0 };

    pub fn from_sets(rows: &[usize], cols: &[usize]) -> Self {
        assert_eq!(rows.len(), cols.len(), "|S| must equal |T|");
        let r = rows.iter().fold(0u64, |m, &i| m | (1 << i));
        let c = cols.iter().fold(0u64, |m, &a| m | (1 << a));
        assert_eq!(r.count_ones() as usize, rows.len(), "repeated row");
        assert_eq!(c.count_ones() as usize, cols.len(), "repeated column");
        Monomial { rows: r, cols: c }
    }

    pub fn degree(&self) -> usize {
        self.rows.count_ones() as usize
    }

    pub fn row_set(&self) -> Vec<usize> {
        bits(self.rows)
    }

    pub fn col_set(&self) -> Vec<usize> {
        bits(self.cols)
    }

    /// Product of two canonical monomials: `None` when a row or column
    /// repeats, otherwise the sign and the canonical result.
    pub fn product(self, other: Monomial) -> Option<(f64, Monomial)> {
        if self.rows & other.rows != 0 || self.cols & other.cols != 0 {
            return None;
        }
        let parity = shuffle_parity(self.rows, other.rows) ^ shuffle_parity(self.cols, other.cols);
        let sign = if parity { -1.0 } else { 1.0 };
        Some((
            sign,
            Monomial {
                rows: self.rows | other.rows,
                cols: self.cols | other.cols,
            },
        ))
    }

    fn fits(&self, ctx: &Context) -> bool {
        let row_ok = ctx.rows >= 64 || self.rows >> ctx.rows == 0;
        let col_ok = ctx.cols >= 64 || self.cols >> ctx.cols == 0;
        row_ok && col_ok && self.rows.count_ones() == self.cols.count_ones()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == 0 {
            return write!(f, "1");
        }
        let join = |v: Vec<usize>| {
            v.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "m({{{}}},{{{}}})",
            join(self.row_set()),
            join(self.col_set())
        )
    }
}

pub(crate) fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}

/// Parity of the number of pairs (a ∈ A, b ∈ B) with a > b: the sign of the
/// shuffle that merges the sorted sequences A and B.
fn shuffle_parity(a: u64, b: u64) -> bool {
    let mut count = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        count += if j >= 63 {
            0
        } else {
            (a >> (j + 1)).count_ones()
        };
    }
    count % 2 == 1
}

/// Normal form of a product of generators: sort by row (no sign), then carry
/// the sign of the permutation sorting the column sequence. Returns `None`
/// when a row or a column repeats.
pub fn canonicalize(factors: &[Generator]) -> Option<(i8, Monomial)> {
    let mut sorted = factors.to_vec();
    sorted.sort_by_key(|g| g.row);
    let mut rows = 0u64;
    let mut cols = 0u64;
    for g in &sorted {
        if rows & (1 << g.row) != 0 || cols & (1 << g.col) != 0 {
            return None;
        }
        rows |= 1 << g.row;
        cols |= 1 << g.col;
    }
    let col_seq: Vec<usize> = sorted.iter().map(|g| g.col).collect();
    let mut inversions = 0usize;
    for i in 0..col_seq.len() {
        for j in i + 1..col_seq.len() {
            if col_seq[i] > col_seq[j] {
                inversions += 1;
            }
        }
    }
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    Some((sign, Monomial { rows, cols }))
}

/// An element of W(k,n): a sparse real combination of canonical monomials.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct NilElement {
    ctx: Context,
    terms: BTreeMap<Monomial, f64>,
}

impl NilElement {
    pub fn zero(ctx: Context) -> Self {
        NilElement {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: Context, c: f64) -> Self {
        let mut e = Self::zero(ctx);
        e.insert(Monomial::UNIT, c);
        e
    }

    pub fn one(ctx: Context) -> Self {
        Self::constant(ctx, 1.0)
    }

    pub fn generator(ctx: Context, row: usize, col: usize) -> Self {
        assert!(row < ctx.rows && col < ctx.cols, "generator out of range");
        Self::monomial(ctx, Monomial::from_sets(&[row], &[col]), 1.0)
    }

    pub fn monomial(ctx: Context, m: Monomial, coeff: f64) -> Self {
        assert!(
            m.fits(&ctx),
            "monomial {m} does not fit W({},{})",
            ctx.rows,
            ctx.cols
        );
        let mut e = Self::zero(ctx);
        e.insert(m, coeff);
        e
    }

    /// Builds an element from raw terms, validating each monomial.
    pub fn from_terms(
        ctx: Context,
        terms: impl IntoIterator<Item = (Monomial, f64)>,
    ) -> Result<Self> {
        let mut e = Self::zero(ctx);
        for (m, c) in terms {
            if !m.fits(&ctx) {
                return Err(Error::Invalid(format!(
                    "monomial {m} does not fit W({},{})",
                    ctx.rows, ctx.cols
                )));
            }
            e.insert(m, c);
        }
        Ok(e)
    }

    fn insert(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(m).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.remove(&m);
        }
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &f64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coefficient(&Monomial::UNIT)
    }

    /// The element with its constant term removed.
    pub fn nilpotent_part(&self) -> Self {
        let mut e = self.clone();
        e.terms.remove(&Monomial::UNIT);
        e
    }

    /// The homogeneous component of the given degree.
    pub fn degree_part(&self, degree: usize) -> Self {
        NilElement {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    /// Maximum absolute coefficient difference.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.ctx == other.ctx && self.distance(other) <= tol
    }

    /// Drops coefficients with magnitude at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        NilElement {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ctx.check(&other.ctx)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(*m, *c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ctx.check(&other.ctx)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(*m, -*c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero(self.ctx);
        }
        let mut out = Self::zero(self.ctx);
        for (m, v) in &self.terms {
            out.insert(*m, c * v);
        }
        out
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.insert(Monomial::UNIT, c);
        out
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ctx.check(&other.ctx)?;
        let mut out = Self::zero(self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((sign, m)) = ma.product(*mb) {
                    out.insert(m, sign * ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// Non-negative integer power by repeated squaring.
    pub fn powu(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ctx);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        self.lift(Primitive::Recip)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.ctx.check(&other.ctx)?;
        Ok(self * &other.recip()?)
    }

    /// Re-embeds the element into a context with at least as many rows and
    /// columns.
    pub fn extend_context(&self, ctx: Context) -> Result<Self> {
        if ctx.rows < self.ctx.rows || ctx.cols < self.ctx.cols {
            return Err(Error::Invalid(format!(
                "cannot shrink W({},{}) into W({},{})",
                self.ctx.rows, self.ctx.cols, ctx.rows, ctx.cols
            )));
        }
        Ok(NilElement {
            ctx,
            terms: self.terms.clone(),
        })
    }
}

impl fmt::Display for NilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if *c < 0.0 { "-" } else { "+" })?;
            } else if *c < 0.0 {
                write!(f, "-")?;
            }
            if *m == Monomial::UNIT {
                write!(f, "{}", c.abs())?;
            } else if c.abs() == 1.0 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}·{m}", c.abs())?;
            }
        }
        Ok(())
    }
}

macro_rules! panicking_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&NilElement> for &NilElement {
            type Output = NilElement;
            /// Panics on context mismatch; use the `checked_` form otherwise.
            fn $method(self, rhs: &NilElement) -> NilElement {
                self.$checked(rhs).expect("W-context mismatch")
            }
        }
        impl $tr<NilElement> for NilElement {
            type Output = NilElement;
            fn $method(self, rhs: NilElement) -> NilElement {
                (&self).$checked(&rhs).expect("W-context mismatch")
            }
        }
        impl $tr<&NilElement> for NilElement {
            type Output = NilElement;
            fn $method(self, rhs: &NilElement) -> NilElement {
                (&self).$checked(rhs).expect("W-context mismatch")
            }
        }
    };
}

panicking_binop!(Add, add, checked_add);
panicking_binop!(Sub, sub, checked_sub);
panicking_binop!(Mul, mul, checked_mul);

impl Neg for &NilElement {
    type Output = NilElement;
    fn neg(self) -> NilElement {
        self.scale(-1.0)
    }
}

impl Neg for NilElement {
    type Output = NilElement;
    fn neg(self) -> NilElement {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &NilElement {
    type Output = NilElement;
    fn mul(self, rhs: f64) -> NilElement {
        self.scale(rhs)
    }
}

/// All canonical monomials of W(k,n) of the given degree.
pub fn monomials_of_degree(ctx: Context, degree: usize) -> Vec<Monomial> {
    let rows = subsets(ctx.rows, degree);
    let cols = subsets(ctx.cols, degree);
    let mut out = Vec::with_capacity(rows.len() * cols.len());
    for r in &rows {
        for c in &cols {
            out.push(Monomial { rows: *r, cols: *c });
        }
    }
    out
}

/// Bitmasks of all `size`-element subsets of `0..n`, in increasing order.
pub(crate) fn subsets(n: usize, size: usize) -> Vec<u64> {
    fn rec(start: usize, n: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            if n - i < left {
                break;
            }
            rec(i + 1, n, left - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if size <= n {
        rec(0, n, size, 0, &mut out);
    }
    out
}
