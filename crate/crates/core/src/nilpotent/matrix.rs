use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::{Context, Monomial, NilElement};
use crate::error::{Error, Result};

/// Square matrix with entries in W(k,n).
#[derive(Debug, Clone, PartialEq)]
pub struct WMatrix {
    ctx: Context,
    size: usize,
    entries: Vec<NilElement>,
}

impl WMatrix {
    pub fn zeros(ctx: Context, size: usize) -> Self {
        WMatrix {
            ctx,
            size,
            entries: vec![NilElement::zero(ctx); size * size],
        }
    }

    pub fn identity(ctx: Context, size: usize) -> Self {
        Self::from_real(ctx, &DMatrix::identity(size, size))
    }

    pub fn from_real(ctx: Context, m: &DMatrix<f64>) -> Self {
        assert!(m.is_square(), "WMatrix must be square");
        let size = m.nrows();
        let mut out = Self::zeros(ctx, size);
        for i in 0..size {
            for j in 0..size {
                out.entries[i * size + j] = NilElement::constant(ctx, m[(i, j)]);
            }
        }
        out
    }

    /// `m ⊗ e`: every entry of the real matrix scaled by the same W element.
    pub fn from_real_scaled(m: &DMatrix<f64>, e: &NilElement) -> Self {
        let ctx = e.context();
        let size = m.nrows();
        let mut out = Self::zeros(ctx, size);
        for i in 0..size {
            for j in 0..size {
                out.entries[i * size + j] = e.scale(m[(i, j)]);
            }
        }
        out
    }

    pub fn from_entries(size: usize, entries: Vec<NilElement>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                got: entries.len(),
            });
        }
        let ctx = entries
            .first()
            .map(|e| e.context())
            .ok_or_else(|| Error::Invalid("empty WMatrix".into()))?;
        if entries.iter().any(|e| e.context() != ctx) {
            return Err(Error::Invalid(
                "WMatrix entries in different contexts".into(),
            ));
        }
        Ok(WMatrix { ctx, size, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> &NilElement {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: NilElement) {
        assert_eq!(e.context(), self.ctx);
        self.entries[i * self.size + j] = e;
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch(
                self.ctx.rows,
                self.ctx.cols,
                other.ctx.rows,
                other.ctx.cols,
            ));
        }
        if self.size != other.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                got: other.size,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(WMatrix { entries, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(WMatrix { entries, ..*self })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.size;
        let mut out = Self::zeros(self.ctx, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = NilElement::zero(self.ctx);
                for l in 0..n {
                    let a = self.get(i, l);
                    let b = other.get(l, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a * b;
                    }
                }
                out.entries[i * n + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        WMatrix {
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
            ..*self
        }
    }

    pub fn constant_part(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |i, j| self.get(i, j).constant_term())
    }

    pub fn nilpotent_part(&self) -> Self {
        WMatrix {
            entries: self.entries.iter().map(|e| e.nilpotent_part()).collect(),
            ..*self
        }
    }

    /// Coefficient matrices keyed by monomial, zero matrices omitted.
    pub fn components(&self) -> BTreeMap<Monomial, DMatrix<f64>> {
        let n = self.size;
        let mut out: BTreeMap<Monomial, DMatrix<f64>> = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                for (m, c) in self.get(i, j).terms() {
                    out.entry(*m).or_insert_with(|| DMatrix::zeros(n, n))[(i, j)] = *c;
                }
            }
        }
        out
    }

    pub fn component(&self, m: &Monomial) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |i, j| self.get(i, j).coefficient(m))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, e| acc.max(e.max_abs()))
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance(&Self::identity(self.ctx, self.size))
            .map(|d| d <= tol)
            .unwrap_or(false)
    }

    /// Inverse via the constant part: (C + N)⁻¹ = Σ_r (-C⁻¹N)ʳ C⁻¹, a finite
    /// sum since N is nilpotent.
    pub fn inverse(&self) -> Result<Self> {
        let c = self.constant_part();
        let c_inv = c
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Domain("constant part of W-matrix is singular".into()))?;
        let c_inv_w = Self::from_real(self.ctx, &c_inv);
        let step = c_inv_w.mul(&self.nilpotent_part())?.scale(-1.0);
        let mut term = Self::identity(self.ctx, self.size);
        let mut sum = term.clone();
        for _ in 0..self.ctx.max_degree() {
            term = term.mul(&step)?;
            if term.max_abs() == 0.0 {
                break;
            }
            sum = sum.add(&term)?;
        }
        sum.mul(&c_inv_w)
    }

    /// exp of a matrix with nilpotent entries (zero constant part).
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if self.constant_part().amax() != 0.0 {
            return Err(Error::Invalid(
                "exp_nilpotent needs a zero constant part".into(),
            ));
        }
        let mut term = Self::identity(self.ctx, self.size);
        let mut sum = term.clone();
        for r in 1..=self.ctx.max_degree() {
            term = term.mul(self)?.scale(1.0 / r as f64);
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// log of `I + N` with N nilpotent: Σ (-1)^{r+1} Nʳ/r.
    pub fn log_unipotent(&self, tol: f64) -> Result<Self> {
        let identity = Self::identity(self.ctx, self.size);
        let id_real = DMatrix::<f64>::identity(self.size, self.size);
        if (self.constant_part() - id_real).amax() > tol {
            return Err(Error::Invalid(
                "log_unipotent needs constant part equal to the identity".into(),
            ));
        }
        let n = self.sub(&identity)?.nilpotent_part();
        let mut power = n.clone();
        let mut sum = n.clone();
        for r in 2..=self.ctx.max_degree() {
            power = power.mul(&n)?;
            let sign = if r % 2 == 0 { -1.0 } else { 1.0 };
            sum = sum.add(&power.scale(sign / r as f64))?;
        }
        Ok(sum)
    }
}
