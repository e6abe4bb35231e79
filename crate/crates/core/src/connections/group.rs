use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, LinearSpan};

#[derive(Debug, Clone, PartialEq)]
pub enum GroupKind {
    General,
    SpecialOrthogonal,
    /// The connected subgroup with the given Lie-algebra basis.
    Subgroup(Vec<DMatrix<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGroupSpec {
    size: usize,
    kind: GroupKind,
}

impl MatrixGroupSpec {
    pub fn general(size: usize) -> Self {
        MatrixGroupSpec {
            size,
            kind: GroupKind::General,
        }
    }

    pub fn special_orthogonal(size: usize) -> Self {
        MatrixGroupSpec {
            size,
            kind: GroupKind::SpecialOrthogonal,
        }
    }

    /// Checks that the basis is independent and closed under brackets.
    pub fn subgroup(size: usize, basis: Vec<DMatrix<f64>>, tol: f64) -> Result<Self> {
        let mut span = LinearSpan::new(size * size);
        for x in &basis {
            if x.nrows() != size || x.ncols() != size {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    got: x.nrows(),
                });
            }
            if !span.insert(&linalg::flatten(x), tol) {
                return Err(Error::Invalid(
                    "Lie-algebra basis is linearly dependent".into(),
                ));
            }
        }
        for a in &basis {
            for b in &basis {
                let r = span.residual(&linalg::flatten(&linalg::bracket(a, b)));
                if r > tol * (1.0 + a.norm() * b.norm()) {
                    return Err(Error::Invalid(format!(
                        "basis is not closed under brackets (residual {r:e})"
                    )));
                }
            }
        }
        Ok(MatrixGroupSpec {
            size,
            kind: GroupKind::Subgroup(basis),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn algebra_dim(&self) -> usize {
        match &self.kind {
            GroupKind::General => self.size * self.size,
            GroupKind::SpecialOrthogonal => self.size * (self.size - 1) / 2,
            GroupKind::Subgroup(b) => b.len(),
        }
    }

    /// Distance of `x` from the Lie algebra.
    pub fn algebra_residual(&self, x: &DMatrix<f64>) -> f64 {
        match &self.kind {
            GroupKind::General => 0.0,
            GroupKind::SpecialOrthogonal => (x + x.transpose()).norm() / 2.0,
            GroupKind::Subgroup(basis) => {
                let mut span = LinearSpan::new(self.size * self.size);
                for b in basis {
                    span.insert(&linalg::flatten(b), 1e-12);
                }
                span.residual(&linalg::flatten(x))
            }
        }
    }

    /// Re-projection onto the group after a numeric step.
    pub fn project(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        match self.kind {
            GroupKind::SpecialOrthogonal => linalg::orthogonal_projection(g),
            _ => g.clone(),
        }
    }
}
