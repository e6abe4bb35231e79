use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::chart::{generic_simplex, Point};
use crate::error::{Error, Result};
use crate::forms::top_monomial;
use crate::linalg::{self, LinearSpan};
use crate::nilpotent::{Context, NilElement, WMatrix};

use super::{transport, ConnectionData};

/// Ratio between the coboundary curvature and the classical curl
/// `∂_i A_j - ∂_j A_i`, fixed by [`pin_conventions`].
pub const CURVATURE_SCALE: f64 = -0.5;

/// Sign `s` of the bracket in `∂_i A_j - ∂_j A_i + s·[A_i, A_j]` matching the
/// coboundary, fixed by [`pin_conventions`].
pub const BRACKET_SIGN: f64 = -1.0;

/// Matrices `F_ij`, `i < j`, of a Lie-algebra-valued 2-form at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    pub dim: usize,
    pub components: Vec<((usize, usize), DMatrix<f64>)>,
    /// Largest entry of the coboundary outside the top-degree part
    /// (zero up to rounding).
    pub residual: f64,
}

impl Curvature {
    pub fn get(&self, i: usize, j: usize) -> Option<&DMatrix<f64>> {
        self.components
            .iter()
            .find(|(k, _)| *k == (i, j))
            .map(|(_, m)| m)
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .map(|(_, m)| m.amax())
            .fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &Curvature) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|((_, a), (_, b))| (a - b).amax())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Curvature {
        Curvature {
            components: self.components.iter().map(|(k, m)| (*k, m * s)).collect(),
            ..self.clone()
        }
    }
}

/// `ω(x_0,x_1)·ω(x_1,x_2)·ω(x_2,x_0)` on the generic 2-simplex at `p` with
/// trivial fiber coordinates, as a W-matrix in W(2, n).
pub fn coboundary_value(conn: &ConnectionData, p: &Point) -> Result<WMatrix> {
    let s = generic_simplex(p, 2);
    transport(conn, &s[0], &s[1])?
        .mul(&transport(conn, &s[1], &s[2])?)?
        .mul(&transport(conn, &s[2], &s[0])?)
}

/// Curvature read off the coboundary: the coefficient matrix of
/// `m({0,1},{i,j})` divided by 2.
pub fn curvature_coboundary(conn: &ConnectionData, p: &Point) -> Result<Curvature> {
    let value = coboundary_value(conn, p)?;
    let n = conn.dim();
    let m = conn.size();
    let mut residual = (value.constant_part() - DMatrix::identity(m, m)).amax();
    for (mono, c) in value.components() {
        if mono.degree() == 1 {
            residual = residual.max(c.amax());
        }
    }
    let mut components = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            components.push(((i, j), value.component(&top_monomial(&[i, j])) / 2.0));
        }
    }
    Ok(Curvature {
        dim: n,
        components,
        residual,
    })
}

fn curl_and_bracket(
    conn: &ConnectionData,
    p: &Point,
    i: usize,
    j: usize,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let curl = conn.da_at(j, i, p)? - conn.da_at(i, j, p)?;
    let br = linalg::bracket(&conn.a_at(i, p)?, &conn.a_at(j, p)?);
    Ok((curl, br))
}

/// `F_ij = ∂_i A_j - ∂_j A_i + s·[A_i, A_j]` by symbolic differentiation.
pub fn curvature_oracle(conn: &ConnectionData, p: &Point, s: f64) -> Result<Curvature> {
    let n = conn.dim();
    let mut components = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (curl, br) = curl_and_bracket(conn, p, i, j)?;
            components.push(((i, j), curl + br * s));
        }
    }
    Ok(Curvature {
        dim: n,
        components,
        residual: 0.0,
    })
}

/// Least-squares fit of `coboundary = α·curl + β·bracket`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinnedConventions {
    pub scale: f64,
    /// `β/α`; `None` when every bracket vanished.
    pub bracket_sign: Option<f64>,
    pub residual: f64,
}

pub fn pin_conventions(conns: &[(ConnectionData, Vec<Point>)]) -> Result<PinnedConventions> {
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for (conn, points) in conns {
        for p in points {
            let f = curvature_coboundary(conn, p)?;
            for ((i, j), fij) in &f.components {
                let (curl, br) = curl_and_bracket(conn, p, *i, *j)?;
                for k in 0..fij.len() {
                    rows.push((curl[k], br[k], fij[k]));
                }
            }
        }
    }
    let mut ata = Matrix2::zeros();
    let mut atb = Vector2::zeros();
    for &(c, b, f) in &rows {
        ata += Matrix2::new(c * c, c * b, b * c, b * b);
        atb += Vector2::new(c * f, b * f);
    }
    let has_bracket = ata[(1, 1)] > 1e-20;
    let (alpha, beta) = if has_bracket {
        let sol = ata.lu().solve(&atb).ok_or_else(|| {
            Error::Domain("curl and bracket are collinear on the pinning set".into())
        })?;
        (sol[0], sol[1])
    } else if ata[(0, 0)] > 1e-20 {
        (atb[0] / ata[(0, 0)], 0.0)
    } else {
        return Err(Error::Domain("pinning set has zero curvature".into()));
    };
    let residual = rows
        .iter()
        .map(|&(c, b, f)| (f - alpha * c - beta * b).abs())
        .fold(0.0, f64::max);
    Ok(PinnedConventions {
        scale: alpha,
        bracket_sign: has_bracket.then(|| beta / alpha),
        residual,
    })
}

/// Which of the four factors of the coboundary identity on a 2-simplex in
/// `P` lie in the subgroup with Lie algebra `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureCheck {
    pub first_face: bool,
    pub second_face: bool,
    pub coboundary: bool,
    pub third_face: bool,
}

impl ClosureCheck {
    /// Three factors in H force the fourth.
    pub fn consistent(&self) -> bool {
        !(self.first_face && self.second_face && self.coboundary) || self.third_face
    }
}

fn in_algebra(span: &LinearSpan, g: &WMatrix, tol: f64) -> Result<bool> {
    let log = g.log_unipotent(tol)?;
    Ok(log
        .components()
        .values()
        .all(|c| span.residual(&linalg::flatten(c)) <= tol * c.norm().max(1.0)))
}

/// Builds the 2-simplex `(p, I)`, `(x_1, T(x_0,x_1)⁻¹(I + η_1))`,
/// `(x_2, T(x_0,x_2)⁻¹(I + η_2))` over the generic simplex at `p`, where
/// `η_r = Σ_a Y_{r,a}·ξ_{r,a}` for the given real matrices, and tests each
/// factor of `ω(x_0,x_1)·ω(x_1,x_2)·ω(x_2,x_0)` for membership in `h`.
pub fn coboundary_closure(
    conn: &ConnectionData,
    h_basis: &[DMatrix<f64>],
    p: &Point,
    eta: [&[DMatrix<f64>]; 2],
    tol: f64,
) -> Result<ClosureCheck> {
    let n = conn.dim();
    let m = conn.size();
    let ctx = Context::new(2, n);
    let mut span = LinearSpan::new(m * m);
    for x in h_basis {
        span.insert(&linalg::flatten(x), 1e-12);
    }
    let s = generic_simplex(p, 2);
    let id = WMatrix::identity(ctx, m);
    let mut fibers = vec![id.clone()];
    for r in 0..2 {
        if eta[r].len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: eta[r].len(),
            });
        }
        let mut bump = id.clone();
        for (a, y) in eta[r].iter().enumerate() {
            bump = bump.add(&WMatrix::from_real_scaled(
                y,
                &NilElement::generator(ctx, r, a),
            ))?;
        }
        fibers.push(transport(conn, &s[0], &s[r + 1])?.inverse()?.mul(&bump)?);
    }
    let omega = |a: usize, b: usize| -> Result<WMatrix> {
        fibers[a]
            .inverse()?
            .mul(&transport(conn, &s[a], &s[b])?)?
            .mul(&fibers[b])
    };
    let w01 = omega(0, 1)?;
    let w02 = omega(0, 2)?;
    let w12 = omega(1, 2)?;
    let w20 = omega(2, 0)?;
    let cob = w01.mul(&w12)?.mul(&w20)?;
    Ok(ClosureCheck {
        first_face: in_algebra(&span, &w01, tol)?,
        second_face: in_algebra(&span, &w02, tol)?,
        coboundary: in_algebra(&span, &cob, tol)?,
        third_face: in_algebra(&span, &w12, tol)?,
    })
}
