use std::collections::BTreeMap;
use std::fmt;

use crate::chart::Point;
use crate::dsl::ScalarExpr;
use crate::error::{Error, Result};

use super::multicovector::{sort_sign, Multicovector};

/// A differential form `Σ_T a_T(x) dx^T` with closed-form coefficients.
/// Only strictly increasing index tuples are stored; zero coefficients are
/// dropped after constant folding.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalForm {
    degree: usize,
    dim: usize,
    terms: BTreeMap<Vec<usize>, ScalarExpr>,
}

impl ClassicalForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        ClassicalForm {
            degree,
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The 0-form `f`.
    pub fn scalar(dim: usize, f: ScalarExpr) -> Self {
        Self::from_terms(dim, 0, [(vec![], f)]).expect("empty index tuple")
    }

    /// The 1-form `dx^i`.
    pub fn differential(dim: usize, i: usize) -> Result<Self> {
        Self::from_terms(dim, 1, [(vec![i], ScalarExpr::Const(1.0))])
    }

    /// Collects terms with arbitrary index order, applying permutation signs
    /// and dropping repeated indices.
    pub fn from_terms(
        dim: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, ScalarExpr)>,
    ) -> Result<Self> {
        let mut out = Self::zero(dim, degree);
        for (idx, a) in terms {
            if idx.len() != degree {
                return Err(Error::DimensionMismatch {
                    expected: degree,
                    got: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    bound: dim,
                });
            }
            if let Some((sign, key)) = sort_sign(&idx) {
                let a = if sign < 0.0 { ScalarExpr::neg(a) } else { a };
                out.accumulate(key, a);
            }
        }
        Ok(out)
    }

    fn accumulate(&mut self, key: Vec<usize>, a: ScalarExpr) {
        let value = match self.terms.remove(&key) {
            Some(prev) => ScalarExpr::add(prev, a),
            None => a,
        };
        if !value.is_zero() {
            self.terms.insert(key, value);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &[usize]) -> Option<&ScalarExpr> {
        self.terms.get(idx)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DimensionMismatch {
                expected: self.degree,
                got: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, a) in &other.terms {
            out.accumulate(k.clone(), a.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|a| ScalarExpr::neg(a.clone()))
    }

    /// `f·ω` for a scalar function `f`.
    pub fn mul_scalar(&self, f: &ScalarExpr) -> Self {
        self.map_coefficients(|a| ScalarExpr::mul(f.clone(), a.clone()))
    }

    /// `ω / f` for a scalar function `f`.
    pub fn div_scalar(&self, f: &ScalarExpr) -> Self {
        self.map_coefficients(|a| ScalarExpr::div(a.clone(), f.clone()))
    }

    fn map_coefficients(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        ClassicalForm {
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.clone(), f(a)))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
            ..*self
        }
    }

    /// Wedge product as the plain shuffle sum, `dx^S ∧ dx^T = ±dx^{S∪T}`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut terms = Vec::new();
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                let mut idx = s.clone();
                idx.extend_from_slice(t);
                terms.push((idx, ScalarExpr::mul(a.clone(), b.clone())));
            }
        }
        Self::from_terms(self.dim, self.degree + other.degree, terms)
    }

    /// `d(a dx^T) = Σ_i ∂_i a dx^i ∧ dx^T` with symbolic derivatives.
    pub fn exterior_derivative(&self) -> Self {
        let mut terms = Vec::new();
        for (t, a) in &self.terms {
            for i in 0..self.dim {
                if t.contains(&i) {
                    continue;
                }
                let mut idx = vec![i];
                idx.extend_from_slice(t);
                terms.push((idx, a.diff(i)));
            }
        }
        Self::from_terms(self.dim, self.degree + 1, terms).expect("indices are in range")
    }

    /// Pointwise value as a multicovector.
    pub fn at(&self, p: &Point) -> Result<Multicovector> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        let entries = self
            .terms
            .iter()
            .map(|(t, a)| Ok((t.clone(), a.eval_f64(p.coords())?)))
            .collect::<Result<Vec<_>>>()?;
        Multicovector::from_coefficients(self.dim, self.degree, entries)
    }

    /// Renders in the input language, e.g. `dz - y*dx`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> FormDisplay<'a> {
        FormDisplay { form: self, names }
    }
}

pub struct FormDisplay<'a> {
    form: &'a ClassicalForm,
    names: &'a [String],
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (t, a)) in self.form.terms.iter().enumerate() {
            let basis: Vec<String> = t.iter().map(|&i| format!("d{}", self.names[i])).collect();
            let basis = basis.join("^");
            let (negative, a) = match a {
                ScalarExpr::Neg(inner) => (true, (**inner).clone()),
                ScalarExpr::Const(c) if *c < 0.0 => (true, ScalarExpr::Const(-c)),
                other => (false, other.clone()),
            };
            match (n, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let coeff = a.display(self.names).to_string();
            let compound = matches!(a, ScalarExpr::Add(..) | ScalarExpr::Sub(..));
            match (t.is_empty(), a.as_const() == Some(1.0), compound) {
                (true, _, _) => write!(f, "{coeff}")?,
                (false, true, _) => write!(f, "{basis}")?,
                (false, false, true) => write!(f, "({coeff})*{basis}")?,
                (false, false, false) => write!(f, "{coeff}*{basis}")?,
            }
        }
        Ok(())
    }
}
