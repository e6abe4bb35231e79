use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
pub(crate) fn sort_sign(idx: &[usize]) -> Option<(f64, Vec<usize>)> {
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let mut inversions = 0;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] > idx[j] {
                inversions += 1;
            }
        }
    }
    Some((if inversions % 2 == 0 { 1.0 } else { -1.0 }, sorted))
}

/// All strictly increasing `degree`-tuples from `0..dim`.
pub fn index_tuples(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    crate::nilpotent::subsets(dim, degree)
        .into_iter()
        .map(crate::nilpotent::bits)
        .collect()
}

/// Determinant of a small real matrix given by rows.
pub(crate) fn det(rows: &[Vec<f64>]) -> f64 {
    crate::nilpotent::morphism_det(rows)
}

/// An alternating multilinear form on a single tangent space:
/// `Σ_T c_T dx^T` with `dx^T(v_1,…,v_p) = det(v_j[T_i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multicovector {
    pub degree: usize,
    pub dim: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

impl Multicovector {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Multicovector {
            degree,
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    /// Accepts unsorted index tuples; signs are applied while sorting.
    pub fn from_coefficients(
        dim: usize,
        degree: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, f64)>,
    ) -> Result<Self> {
        let mut out = Self::zero(dim, degree);
        for (idx, c) in entries {
            if idx.len() != degree || idx.iter().any(|&i| i >= dim) {
                return Err(Error::Invalid(format!("bad index tuple {idx:?}")));
            }
            if let Some((sign, key)) = sort_sign(&idx) {
                *out.coeffs.entry(key).or_insert(0.0) += sign * c;
            }
        }
        out.coeffs.retain(|_, c| *c != 0.0);
        Ok(out)
    }

    pub fn coefficient(&self, idx: &[usize]) -> f64 {
        self.coeffs.get(idx).copied().unwrap_or(0.0)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Vec<usize>, &f64)> {
        self.coeffs.iter()
    }

    /// Coefficients in lexicographic order of all increasing index tuples.
    pub fn dense(&self) -> Vec<f64> {
        index_tuples(self.dim, self.degree)
            .iter()
            .map(|t| self.coefficient(t))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Multicovector {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (k.clone(), s * c))
                .filter(|(_, c)| *c != 0.0)
                .collect(),
            ..*self
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree || self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.degree,
                got: other.degree,
            });
        }
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            *out.coeffs.entry(k.clone()).or_insert(0.0) -= c;
        }
        out.coeffs.retain(|_, c| *c != 0.0);
        Ok(out)
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut entries = Vec::new();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let mut idx = a.clone();
                idx.extend_from_slice(b);
                entries.push((idx, ca * cb));
            }
        }
        Self::from_coefficients(self.dim, self.degree + other.degree, entries)
    }

    /// Multilinear evaluation on `degree` vectors.
    pub fn apply(&self, vectors: &[&[f64]]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::DimensionMismatch {
                expected: self.degree,
                got: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(t, c)| {
                let m: Vec<Vec<f64>> = vectors
                    .iter()
                    .map(|v| t.iter().map(|&i| v[i]).collect())
                    .collect();
                c * det(&m)
            })
            .sum())
    }

    /// Least-squares ratio `r` with `self ≈ r·reference`; `None` when the
    /// reference vanishes.
    pub fn ratio_to(&self, reference: &Self, tol: f64) -> Option<f64> {
        let num: f64 = reference
            .coeffs
            .iter()
            .map(|(k, c)| c * self.coefficient(k))
            .sum();
        let den: f64 = reference.coeffs.values().map(|c| c * c).sum();
        if den.sqrt() <= tol {
            None
        } else {
            Some(num / den)
        }
    }

    /// Text rendering with variable names, e.g. `0.5 dx^dy`.
    pub fn render(&self, names: &[String]) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|(t, c)| {
                if t.is_empty() {
                    format!("{c}")
                } else {
                    let basis: Vec<String> = t.iter().map(|&i| format!("d{}", names[i])).collect();
                    format!("{c} {}", basis.join("^"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for Multicovector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.dim).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.render(&names))
    }
}
