//! Principal connections on a trivialized bundle `P = M × G` over a chart,
//! with `G` a matrix group.
//!
//! The local connection 1-form `A = Σ A_i dx^i` gives the transport between
//! neighbours `T(a,b) = I - Σ_i A_i(a)(b-a)_i`, exact in W because the
//! displacement is nilpotent. The connection form on `P` is
//! `ω((a,g),(b,h)) = g⁻¹·T(a,b)·h`, and curvature is its group coboundary
//! `ω(x,y)·ω(y,z)·ω(z,x)` on the generic 2-simplex.

mod curvature;
mod group;
mod holonomy;

pub use curvature::{
    coboundary_closure, coboundary_value, curvature_coboundary, curvature_oracle, pin_conventions,
    ClosureCheck, Curvature, PinnedConventions, BRACKET_SIGN, CURVATURE_SCALE,
};
pub use group::{GroupKind, MatrixGroupSpec};
pub use holonomy::{
    ambrose_singer_check, horizontal_lift, matrix_log_along, parallel_transport,
    AmbroseSingerReport, Curve, TransportResult,
};

use nalgebra::DMatrix;

use crate::chart::{log_pair, NilPoint, Point};
use crate::dsl::ScalarExpr;
use crate::error::{Error, Result};
use crate::forms::ClassicalForm;
use crate::linalg::LinearSpan;
use crate::nilpotent::{NilElement, WMatrix};

/// `A = Σ_i A_i dx^i` with each `A_i` an m×m matrix of expressions
/// (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionData {
    dim: usize,
    group: MatrixGroupSpec,
    a: Vec<Vec<ScalarExpr>>,
}

impl ConnectionData {
    pub fn new(dim: usize, group: MatrixGroupSpec, a: Vec<Vec<ScalarExpr>>) -> Result<Self> {
        let m = group.size();
        if a.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: a.len(),
            });
        }
        if let Some(bad) = a.iter().find(|ai| ai.len() != m * m) {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                got: bad.len(),
            });
        }
        Ok(ConnectionData { dim, group, a })
    }

    /// Builds `A_i` from a matrix of 1-forms: `A_i[r][c]` is the `dx^i`
    /// coefficient of entry `(r, c)`.
    pub fn from_form_matrix(
        dim: usize,
        group: MatrixGroupSpec,
        entries: &[Vec<ClassicalForm>],
    ) -> Result<Self> {
        let m = group.size();
        if entries.len() != m || entries.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: entries.len(),
            });
        }
        let mut a = vec![vec![ScalarExpr::Const(0.0); m * m]; dim];
        for (r, row) in entries.iter().enumerate() {
            for (c, form) in row.iter().enumerate() {
                if form.degree() != 1 && !form.is_zero() {
                    return Err(Error::Invalid("connection entries must be 1-forms".into()));
                }
                for (idx, coeff) in form.terms() {
                    a[idx[0]][r * m + c] = coeff.clone();
                }
            }
        }
        Self::new(dim, group, a)
    }

    /// Sums `f(x)·X dx^i` over `(i, f, X)` terms with real matrices `X`.
    pub fn from_scaled_generators(
        dim: usize,
        group: MatrixGroupSpec,
        terms: &[(usize, ScalarExpr, DMatrix<f64>)],
    ) -> Result<Self> {
        let m = group.size();
        let mut a = vec![vec![ScalarExpr::Const(0.0); m * m]; dim];
        for (i, f, x) in terms {
            if *i >= dim {
                return Err(Error::IndexOutOfRange {
                    index: *i,
                    bound: dim,
                });
            }
            for r in 0..m {
                for c in 0..m {
                    if x[(r, c)] != 0.0 {
                        let e = ScalarExpr::mul(ScalarExpr::Const(x[(r, c)]), f.clone());
                        a[*i][r * m + c] = ScalarExpr::add(a[*i][r * m + c].clone(), e);
                    }
                }
            }
        }
        Self::new(dim, group, a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.group.size()
    }

    pub fn group(&self) -> &MatrixGroupSpec {
        &self.group
    }

    /// Entry `(r, c)` of `A_i`.
    pub fn entry(&self, i: usize, r: usize, c: usize) -> &ScalarExpr {
        &self.a[i][r * self.size() + c]
    }

    /// The 1-form `Σ_i A_i[r][c] dx^i`.
    pub fn entry_form(&self, r: usize, c: usize) -> ClassicalForm {
        ClassicalForm::from_terms(
            self.dim,
            1,
            (0..self.dim).map(|i| (vec![i], self.entry(i, r, c).clone())),
        )
        .expect("indices in range")
    }

    pub fn a_at(&self, i: usize, p: &Point) -> Result<DMatrix<f64>> {
        let m = self.size();
        let mut out = DMatrix::zeros(m, m);
        for r in 0..m {
            for c in 0..m {
                out[(r, c)] = self.entry(i, r, c).eval_f64(p.coords())?;
            }
        }
        Ok(out)
    }

    /// `∂_j A_i` at a real point.
    pub fn da_at(&self, i: usize, j: usize, p: &Point) -> Result<DMatrix<f64>> {
        let m = self.size();
        let mut out = DMatrix::zeros(m, m);
        for r in 0..m {
            for c in 0..m {
                out[(r, c)] = self.entry(i, r, c).diff(j).eval_f64(p.coords())?;
            }
        }
        Ok(out)
    }

    fn a_at_nil(&self, i: usize, coords: &[NilElement]) -> Result<WMatrix> {
        let entries = self.a[i]
            .iter()
            .map(|e| e.eval_nil(coords))
            .collect::<Result<Vec<_>>>()?;
        WMatrix::from_entries(self.size(), entries)
    }

    /// `Σ_i A_i(x)·u_i` for a real point and direction.
    pub fn contract(&self, p: &Point, u: &[f64]) -> Result<DMatrix<f64>> {
        let m = self.size();
        let mut out = DMatrix::zeros(m, m);
        for (i, ui) in u.iter().enumerate() {
            if *ui != 0.0 {
                out += self.a_at(i, p)? * *ui;
            }
        }
        Ok(out)
    }

    /// Largest distance of an `A_i(p)` from the group's Lie algebra.
    pub fn algebra_residual(&self, samples: &[Point]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in samples {
            for i in 0..self.dim {
                worst = worst.max(self.group.algebra_residual(&self.a_at(i, p)?));
            }
        }
        Ok(worst)
    }

    /// The connection with `A` replaced by `-A`.
    pub fn negated(&self) -> Self {
        ConnectionData {
            a: self
                .a
                .iter()
                .map(|ai| ai.iter().map(|e| ScalarExpr::neg(e.clone())).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// `C·A_i·C⁻¹` for a constant invertible `C`.
    pub fn conjugated(&self, c: &DMatrix<f64>) -> Result<Self> {
        let m = self.size();
        let c_inv = c
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Domain("conjugating matrix is singular".into()))?;
        let mut a = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut out = vec![ScalarExpr::Const(0.0); m * m];
            for r in 0..m {
                for s in 0..m {
                    let mut acc = ScalarExpr::Const(0.0);
                    for k in 0..m {
                        for l in 0..m {
                            let w = c[(r, k)] * c_inv[(l, s)];
                            if w != 0.0 {
                                acc = ScalarExpr::add(
                                    acc,
                                    ScalarExpr::mul(
                                        ScalarExpr::Const(w),
                                        self.entry(i, k, l).clone(),
                                    ),
                                );
                            }
                        }
                    }
                    out[r * m + s] = acc;
                }
            }
            a.push(out);
        }
        Self::new(self.dim, self.group.clone(), a)
    }
}

/// `e·M` for a W scalar and a W matrix.
fn scale_w(m: &WMatrix, e: &NilElement) -> Result<WMatrix> {
    let k = m.size();
    let mut entries = Vec::with_capacity(k * k);
    for r in 0..k {
        for c in 0..k {
            entries.push(m.get(r, c) * e);
        }
    }
    WMatrix::from_entries(k, entries)
}

/// `T(a,b) = I - Σ_i A_i(a)·(b-a)_i`, the transport `P_b → P_a`.
pub fn transport(conn: &ConnectionData, a: &NilPoint, b: &NilPoint) -> Result<WMatrix> {
    if a.dim() != conn.dim() {
        return Err(Error::DimensionMismatch {
            expected: conn.dim(),
            got: a.dim(),
        });
    }
    let delta = log_pair(a, b)?;
    let coords = a.coords();
    let mut out = WMatrix::identity(a.context(), conn.size());
    for (i, d) in delta.iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        let ai = conn.a_at_nil(i, &coords)?;
        out = out.sub(&scale_w(&ai, d)?)?;
    }
    Ok(out)
}

/// `ω((a,g),(b,h)) = g⁻¹·T(a,b)·h`.
pub fn connection_form(
    conn: &ConnectionData,
    a: &NilPoint,
    g: &DMatrix<f64>,
    b: &NilPoint,
    h: &WMatrix,
) -> Result<WMatrix> {
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("fiber element is not invertible".into()))?;
    let t = transport(conn, a, b)?;
    WMatrix::from_real(t.context(), &g_inv).mul(&t)?.mul(h)
}

/// Whether `ω(x,y) - I` has every W-coefficient matrix in `span(h_basis)`.
pub fn holonomy_distribution_flatness(
    omega: &WMatrix,
    h_basis: &[DMatrix<f64>],
    tol: f64,
) -> Result<bool> {
    let m = omega.size();
    let mut span = LinearSpan::new(m * m);
    for x in h_basis {
        span.insert(&crate::linalg::flatten(x), 1e-12);
    }
    let n = omega.sub(&WMatrix::identity(omega.context(), m))?;
    Ok(n.components()
        .values()
        .all(|c| span.residual(&crate::linalg::flatten(c)) <= tol))
}
