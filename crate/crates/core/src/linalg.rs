//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Numerical rank: singular values above `tol · max(1, σ_max)`.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let scale = sv.iter().cloned().fold(1.0, f64::max);
    sv.iter().filter(|s| **s > tol * scale).count()
}

/// Orthonormal basis (as columns) of the column space.
pub fn column_basis(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut span = LinearSpan::new(m.nrows());
    for c in m.column_iter() {
        span.insert(&c.into_owned(), tol);
    }
    span.basis_matrix()
}

/// Orthonormal basis (as columns) of `{v : m·v = 0}`.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // Pad to at least n rows so that the SVD returns a full V.
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let scale = svd.singular_values.iter().cloned().fold(1.0, f64::max);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| svd.singular_values[i] <= tol * scale)
        .map(|i| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Distance from `v` to the column space of `basis` (least squares).
pub fn span_residual(basis: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    if basis.ncols() == 0 {
        return v.norm();
    }
    let q = column_basis(basis, 1e-12);
    let proj = &q * (q.transpose() * v);
    (v - proj).norm()
}

/// Incrementally built orthonormal basis of a subspace of `R^dim`.
#[derive(Debug, Clone)]
pub struct LinearSpan {
    dim: usize,
    basis: Vec<DVector<f64>>,
}

impl LinearSpan {
    pub fn new(dim: usize) -> Self {
        LinearSpan {
            dim,
            basis: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Component of `v` orthogonal to the span (two Gram–Schmidt passes).
    pub fn residual_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.dot(&r);
                r.axpy(-c, b, 1.0);
            }
        }
        r
    }

    pub fn residual(&self, v: &DVector<f64>) -> f64 {
        self.residual_vector(v).norm()
    }

    /// Adds `v` when its orthogonal part exceeds `tol · max(1, |v|)`; returns
    /// whether the span grew.
    pub fn insert(&mut self, v: &DVector<f64>, tol: f64) -> bool {
        if self.basis.len() >= self.dim {
            return false;
        }
        let r = self.residual_vector(v);
        let norm = r.norm();
        if norm <= tol * v.norm().max(1.0) {
            return false;
        }
        self.basis.push(r / norm);
        true
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> DMatrix<f64> {
        if self.basis.is_empty() {
            DMatrix::zeros(self.dim, 0)
        } else {
            DMatrix::from_columns(&self.basis)
        }
    }
}

/// Row-major flattening of a square matrix.
pub fn flatten(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.len(), m.transpose().iter().cloned())
}

pub fn unflatten(v: &DVector<f64>, size: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(size, size, v.as_slice())
}

pub fn bracket(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Principal logarithm by inverse scaling and squaring: take square roots
/// (Denman–Beavers) until close to the identity, then a Mercator series.
/// Fails when an eigenvalue lies on the closed negative real axis.
pub fn matrix_log(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    if n != g.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.ncols(),
        });
    }
    let eigen: Vec<Complex<f64>> = g.clone().complex_eigenvalues().iter().cloned().collect();
    let scale = g.amax().max(1.0);
    for z in &eigen {
        if z.im.abs() <= 1e-12 * scale && z.re <= 1e-12 * scale {
            return Err(Error::LogBranch(format!(
                "eigenvalue {:.6} on the non-positive real axis",
                z.re
            )));
        }
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut a = g.clone();
    let mut roots = 0;
    while (&a - &id).norm() > 0.25 {
        a = sqrt_denman_beavers(&a)?;
        roots += 1;
        if roots > 60 {
            return Err(Error::LogBranch("square roots did not converge".into()));
        }
    }
    let x = &a - &id;
    let mut term = x.clone();
    let mut sum = DMatrix::zeros(n, n);
    for k in 1..=60 {
        let c = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
        sum += &term * c;
        term = &term * &x;
        if term.norm() < 1e-18 {
            break;
        }
    }
    Ok(sum * 2f64.powi(roots))
}

fn sqrt_denman_beavers(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let yi = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LogBranch("singular iterate in square root".into()))?;
        let zi = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LogBranch("singular iterate in square root".into()))?;
        let y_next = (&y + &zi) * 0.5;
        let z_next = (&z + &yi) * 0.5;
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * y.norm() {
            break;
        }
    }
    Ok(y)
}

/// Nearest orthogonal matrix (polar factor) with the determinant sign kept.
pub fn orthogonal_projection(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    u * v_t
}
