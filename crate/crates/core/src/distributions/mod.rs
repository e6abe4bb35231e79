//! Tangent sub-bundles `E ⊆ TM` over a chart and the neighbour relation
//! `x ≈ y iff log(x,y) ∈ E_x` they induce.
//!
//! A distribution is presented by spanning vector fields, by annihilating
//! 1-forms, or both. Every check is pointwise at sample points: the fiber
//! computations are exact in W, the base is covered by sampling.

mod involutive;
mod leaf;
mod patch;

pub use involutive::{
    check_involutive_classical, check_involutive_combinatorial, flat_symmetry_check,
    involutivity_report, semi_infinitesimal_check, third_face_check, ClassicalVerdict,
    InvolutivityReport, PointVerdict, SemiInfinitesimalOutcome,
};
pub use leaf::trace_leaf;
pub use patch::{check_integral_patch, IntegralPatch, PatchMode, PatchReport};

use nalgebra::{DMatrix, DVector};

use crate::chart::{NilPoint, Point};
use crate::dsl::ScalarExpr;
use crate::error::{Error, Result};
use crate::forms::{ClassicalForm, CombinatorialForm};
use crate::linalg;
use crate::nilpotent::{NilElement, WMatrix};

/// A vector field given by component expressions.
pub type VectorField = Vec<ScalarExpr>;

#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    dim: usize,
    rank: usize,
    span: Option<Vec<VectorField>>,
    kernel: Option<Vec<ClassicalForm>>,
}

impl Distribution {
    pub fn from_span(dim: usize, fields: Vec<VectorField>) -> Result<Self> {
        if fields.is_empty() || fields.len() > dim {
            return Err(Error::Invalid(format!(
                "a span needs between 1 and {dim} fields, found {}",
                fields.len()
            )));
        }
        if let Some(f) = fields.iter().find(|f| f.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: f.len(),
            });
        }
        Ok(Distribution {
            dim,
            rank: fields.len(),
            span: Some(fields),
            kernel: None,
        })
    }

    pub fn from_kernel(dim: usize, forms: Vec<ClassicalForm>) -> Result<Self> {
        if forms.len() >= dim {
            return Err(Error::Invalid(format!(
                "{} kernel forms leave no directions in dimension {dim}",
                forms.len()
            )));
        }
        for f in &forms {
            if f.degree() != 1 || f.dim() != dim {
                return Err(Error::Invalid(
                    "kernel forms must be 1-forms on the chart".into(),
                ));
            }
        }
        Ok(Distribution {
            dim,
            rank: dim - forms.len(),
            span: None,
            kernel: Some(forms),
        })
    }

    /// Adds annihilating forms to a span presentation.
    pub fn with_kernel(mut self, forms: Vec<ClassicalForm>) -> Result<Self> {
        let k = Self::from_kernel(self.dim, forms)?;
        if k.rank != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: k.rank,
            });
        }
        self.kernel = k.kernel;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn span(&self) -> Option<&[VectorField]> {
        self.span.as_deref()
    }

    pub fn kernel(&self) -> Option<&[ClassicalForm]> {
        self.kernel.as_deref()
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            })
        } else {
            Ok(())
        }
    }

    /// Spanning fields at `p` as the columns of an n×m matrix.
    pub fn span_matrix(&self, p: &Point, tol: f64) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let fields = self
            .span
            .as_ref()
            .ok_or_else(|| Error::MissingRepresentation("spanning vector fields".into()))?;
        let mut m = DMatrix::zeros(self.dim, self.rank);
        for (a, f) in fields.iter().enumerate() {
            for (i, c) in f.iter().enumerate() {
                m[(i, a)] = c.eval_f64(p.coords())?;
            }
        }
        self.full_rank(m, self.rank, p, tol)
    }

    /// Kernel forms at `p` as the rows of an (n−m)×n matrix.
    pub fn kernel_matrix(&self, p: &Point, tol: f64) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let forms = self
            .kernel
            .as_ref()
            .ok_or_else(|| Error::MissingRepresentation("kernel 1-forms".into()))?;
        let mut m = DMatrix::zeros(forms.len(), self.dim);
        for (i, f) in forms.iter().enumerate() {
            let w = f.at(p)?;
            for a in 0..self.dim {
                m[(i, a)] = w.coefficient(&[a]);
            }
        }
        self.full_rank(m, forms.len(), p, tol)
    }

    fn full_rank(
        &self,
        m: DMatrix<f64>,
        expected: usize,
        p: &Point,
        tol: f64,
    ) -> Result<DMatrix<f64>> {
        let found = linalg::rank(&m, tol.max(1e-12));
        if found == expected {
            Ok(m)
        } else {
            Err(Error::RankDeficient {
                point: p.coords().to_vec(),
                expected,
                found,
            })
        }
    }

    /// Orthonormal basis of `E_p` as the columns of an n×m matrix.
    pub fn basis(&self, p: &Point, tol: f64) -> Result<DMatrix<f64>> {
        if self.span.is_some() {
            Ok(linalg::column_basis(
                &self.span_matrix(p, tol)?,
                tol.max(1e-12),
            ))
        } else {
            let k = self.kernel_matrix(p, tol)?;
            Ok(linalg::null_space(&k, tol.max(1e-12)))
        }
    }

    /// Whether `u ∈ E_p`, i.e. `p ≈ p + d·u`.
    pub fn is_flat(&self, p: &Point, u: &[f64], tol: f64) -> Result<bool> {
        self.check_point(p)?;
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        let u = DVector::from_column_slice(u);
        if self.kernel.is_some() {
            let k = self.kernel_matrix(p, tol)?;
            Ok((k * u).amax() <= tol)
        } else {
            let s = self.span_matrix(p, tol)?;
            Ok(linalg::span_residual(&s, &u) <= tol * u.norm().max(1.0))
        }
    }

    /// Combinatorial 1-forms whose common kernel is `E` near `p`.
    ///
    /// With kernel forms given they are used directly. For a span-only
    /// presentation the forms are the last n−m rows of `[X(y) | C]⁻¹`, with
    /// `C` the orthogonal complement of `E_p`; the inverse is taken over W so
    /// the forms are exact at every neighbour of `p`.
    pub fn kernel_forms(&self, p: &Point, tol: f64) -> Result<Vec<CombinatorialForm>> {
        if let Some(forms) = &self.kernel {
            self.kernel_matrix(p, tol)?;
            return Ok(forms
                .iter()
                .map(CombinatorialForm::from_classical)
                .collect());
        }
        let s = self.span_matrix(p, tol)?;
        let complement = linalg::null_space(&s.transpose(), tol.max(1e-12));
        let fields = self.span.clone().expect("span checked above");
        let (n, m) = (self.dim, self.rank);
        Ok((0..n - m)
            .map(|i| {
                let fields = fields.clone();
                let complement = complement.clone();
                CombinatorialForm::new(n, 1, move |pts| {
                    let row = frame_inverse_row(&fields, &complement, &pts[0], m + i)?;
                    let offset = crate::chart::log_pair(&pts[0], &pts[1])?;
                    Ok(row
                        .iter()
                        .zip(&offset)
                        .fold(NilElement::zero(pts[0].context()), |acc, (a, b)| {
                            acc + a * b
                        }))
                })
            })
            .collect())
    }
}

/// Row `r` of `[X(y) | C]⁻¹` at a W-valued point `y`.
fn frame_inverse_row(
    fields: &[VectorField],
    complement: &DMatrix<f64>,
    y: &NilPoint,
    r: usize,
) -> Result<Vec<NilElement>> {
    let n = y.dim();
    let ctx = y.context();
    let coords = y.coords();
    let mut entries = vec![NilElement::zero(ctx); n * n];
    for (a, f) in fields.iter().enumerate() {
        for (i, c) in f.iter().enumerate() {
            entries[i * n + a] = c.eval_nil(&coords)?;
        }
    }
    for b in 0..complement.ncols() {
        for i in 0..n {
            entries[i * n + fields.len() + b] = NilElement::constant(ctx, complement[(i, b)]);
        }
    }
    let inv = WMatrix::from_entries(n, entries)?.inverse()?;
    Ok((0..n).map(|j| inv.get(r, j).clone()).collect())
}
