use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::chart::Point;
use crate::dsl::ScalarExpr;
use crate::error::{Error, Result};
use crate::linalg::{self, LinearSpan};

use super::curvature::curvature_coboundary;
use super::ConnectionData;

/// A curve parametrized over `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    /// Counter-clockwise circle in the plane of the first two coordinates,
    /// starting at `center + (r, 0, …)`.
    Circle {
        center: Vec<f64>,
        radius: f64,
    },
    Segment {
        from: Vec<f64>,
        to: Vec<f64>,
    },
    /// `t ↦ comps(t)` for `t ∈ [t0, t1]`, with `t` as variable 0.
    Expr {
        comps: Vec<ScalarExpr>,
        t0: f64,
        t1: f64,
    },
    /// Pieces traversed in order, each integrated separately.
    Chain(Vec<Curve>),
}

impl Curve {
    pub fn dim(&self) -> usize {
        match self {
            Curve::Circle { center, .. } => center.len(),
            Curve::Segment { from, .. } => from.len(),
            Curve::Expr { comps, .. } => comps.len(),
            Curve::Chain(pieces) => pieces.first().map_or(0, |c| c.dim()),
        }
    }

    /// Position and velocity at `s ∈ [0, 1]`.
    pub fn at(&self, s: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            Curve::Circle { center, radius } => {
                let (sin, cos) = (2.0 * PI * s).sin_cos();
                let mut x = center.clone();
                let mut v = vec![0.0; center.len()];
                x[0] += radius * cos;
                x[1] += radius * sin;
                v[0] = -2.0 * PI * radius * sin;
                v[1] = 2.0 * PI * radius * cos;
                Ok((x, v))
            }
            Curve::Segment { from, to } => Ok((
                from.iter().zip(to).map(|(a, b)| a + s * (b - a)).collect(),
                from.iter().zip(to).map(|(a, b)| b - a).collect(),
            )),
            Curve::Expr { comps, t0, t1 } => {
                let t = [t0 + s * (t1 - t0)];
                let x = comps
                    .iter()
                    .map(|c| c.eval_f64(&t))
                    .collect::<Result<Vec<_>>>()?;
                let v = comps
                    .iter()
                    .map(|c| Ok(c.diff(0).eval_f64(&t)? * (t1 - t0)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((x, v))
            }
            Curve::Chain(_) => Err(Error::Invalid(
                "a chain has no single parametrization".into(),
            )),
        }
    }

    pub fn start(&self) -> Result<Vec<f64>> {
        match self {
            Curve::Chain(pieces) => pieces
                .first()
                .ok_or_else(|| Error::Invalid("empty chain".into()))?
                .start(),
            c => Ok(c.at(0.0)?.0),
        }
    }

    pub fn end(&self) -> Result<Vec<f64>> {
        match self {
            Curve::Chain(pieces) => pieces
                .last()
                .ok_or_else(|| Error::Invalid("empty chain".into()))?
                .end(),
            c => Ok(c.at(1.0)?.0),
        }
    }

    /// `segment(base → start) · self · segment(end → base)`.
    pub fn based_at(&self, base: &[f64]) -> Result<Curve> {
        Ok(Curve::Chain(vec![
            Curve::Segment {
                from: base.to_vec(),
                to: self.start()?,
            },
            self.clone(),
            Curve::Segment {
                from: self.end()?,
                to: base.to_vec(),
            },
        ]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    pub g: DMatrix<f64>,
    /// Accumulated rotation angle for 2×2 results that stay of the form
    /// `a·I + b·J` along the whole path; unwrapped, so it may exceed π.
    pub angle: Option<f64>,
}

/// Angle of `a·I + b·J`, or `None` when `g` is not of that form.
fn rotation_angle(g: &DMatrix<f64>) -> Option<f64> {
    if g.nrows() != 2 {
        return None;
    }
    let scale = g.amax().max(1e-300);
    let off = ((g[(0, 0)] - g[(1, 1)]).abs() + (g[(0, 1)] + g[(1, 0)]).abs()) / scale;
    (off <= 1e-9).then(|| g[(1, 0)].atan2(g[(0, 0)]))
}

fn wrap(a: f64) -> f64 {
    let mut a = (a + PI).rem_euclid(2.0 * PI) - PI;
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

struct Integrator<'a> {
    conn: &'a ConnectionData,
    sign: f64,
    steps: usize,
}

impl Integrator<'_> {
    fn rhs(&self, curve: &Curve, s: f64, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let (x, v) = curve.at(s)?;
        let p = Point::new(x.clone()).map_err(|_| Error::LeftChart(x))?;
        Ok(self.conn.contract(&p, &v)? * g * self.sign)
    }

    fn run(
        &self,
        curve: &Curve,
        g0: DMatrix<f64>,
        angle: Option<f64>,
    ) -> Result<(DMatrix<f64>, Option<f64>)> {
        if let Curve::Chain(pieces) = curve {
            return pieces
                .iter()
                .try_fold((g0, angle), |(g, a), c| self.run(c, g, a));
        }
        let h = 1.0 / self.steps as f64;
        let group = self.conn.group();
        let mut g = g0;
        let mut angle = angle;
        for k in 0..self.steps {
            let s = k as f64 * h;
            let k1 = self.rhs(curve, s, &g)?;
            let k2 = self.rhs(curve, s + h / 2.0, &(&g + &k1 * (h / 2.0)))?;
            let k3 = self.rhs(curve, s + h / 2.0, &(&g + &k2 * (h / 2.0)))?;
            let k4 = self.rhs(curve, s + h, &(&g + &k3 * h))?;
            let next = group.project(&(&g + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)));
            angle = match (angle, rotation_angle(&g), rotation_angle(&next)) {
                (Some(a), Some(before), Some(after)) => Some(a + wrap(after - before)),
                _ => None,
            };
            g = next;
        }
        Ok((g, angle))
    }
}

fn integrate(
    conn: &ConnectionData,
    curve: &Curve,
    steps: usize,
    sign: f64,
) -> Result<TransportResult> {
    if steps == 0 {
        return Err(Error::StepUnderflow);
    }
    if curve.dim() != conn.dim() {
        return Err(Error::DimensionMismatch {
            expected: conn.dim(),
            got: curve.dim(),
        });
    }
    let m = conn.size();
    let start = (m == 2).then_some(0.0);
    let (g, angle) = Integrator { conn, sign, steps }.run(curve, DMatrix::identity(m, m), start)?;
    Ok(TransportResult { g, angle })
}

/// Solves `ġ = -Σ_i A_i(c(t))·ċ_i(t)·g`, `g(0) = I`, by RK4 with `steps`
/// steps per curve piece.
pub fn parallel_transport(
    conn: &ConnectionData,
    curve: &Curve,
    steps: usize,
) -> Result<TransportResult> {
    integrate(conn, curve, steps, -1.0)
}

/// Horizontal lift for the connection form `g⁻¹·T(a,b)·h`: neighbouring
/// points `(a,g)`, `(b,h)` are horizontal when `h = T(b,a)·g`, which is
/// `ġ = +Σ_i A_i ċ_i g` in the limit.
pub fn horizontal_lift(
    conn: &ConnectionData,
    curve: &Curve,
    steps: usize,
) -> Result<TransportResult> {
    integrate(conn, curve, steps, 1.0)
}

/// Logarithm of a transport result: from the unwrapped angle when one was
/// tracked, otherwise the principal logarithm.
pub fn matrix_log_along(t: &TransportResult) -> Result<DMatrix<f64>> {
    match t.angle {
        Some(theta) => {
            let r = t.g.determinant().max(0.0).sqrt();
            if r <= 0.0 {
                return Err(Error::LogBranch("singular holonomy".into()));
            }
            let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
            Ok(DMatrix::identity(2, 2) * r.ln() + j * theta)
        }
        None => linalg::matrix_log(&t.g),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbroseSingerReport {
    /// Dimension of the Lie algebra generated by the transported curvature
    /// values.
    pub algebra_dim: usize,
    pub group_algebra_dim: usize,
    /// Relative distance of each loop's log-holonomy from that algebra.
    pub loop_residuals: Vec<f64>,
    pub inclusion: bool,
    pub basis: Vec<DMatrix<f64>>,
}

impl AmbroseSingerReport {
    pub fn full(&self) -> bool {
        self.algebra_dim == self.group_algebra_dim
    }
}

/// Bracket closure of the given generators.
pub fn generated_algebra(size: usize, generators: &[DMatrix<f64>], tol: f64) -> LinearSpan {
    let mut span = LinearSpan::new(size * size);
    for g in generators {
        span.insert(&linalg::flatten(g), tol);
    }
    loop {
        let basis: Vec<DMatrix<f64>> = span
            .vectors()
            .iter()
            .map(|v| linalg::unflatten(v, size))
            .collect();
        let mut grew = false;
        for a in 0..basis.len() {
            for b in a + 1..basis.len() {
                grew |= span.insert(
                    &linalg::flatten(&linalg::bracket(&basis[a], &basis[b])),
                    tol,
                );
            }
        }
        if !grew || span.len() == size * size {
            return span;
        }
    }
}

/// Lie-algebra form of the Ambrose–Singer statement at `basepoint`: the log
/// of every loop holonomy lies in the algebra generated by `U⁻¹·F_ij(p)·U`,
/// `U` the horizontal lift along the segment from `basepoint` to `p`.
pub fn ambrose_singer_check(
    conn: &ConnectionData,
    basepoint: &Point,
    loops: &[Curve],
    samples: &[Point],
    steps: usize,
    tol: f64,
) -> Result<AmbroseSingerReport> {
    let m = conn.size();
    let generators: Vec<Vec<DMatrix<f64>>> = samples
        .par_iter()
        .map(|p| {
            let seg = Curve::Segment {
                from: basepoint.coords().to_vec(),
                to: p.coords().to_vec(),
            };
            let u = horizontal_lift(conn, &seg, steps)?.g;
            let u_inv = u
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Domain("singular transport".into()))?;
            Ok(curvature_coboundary(conn, p)?
                .components
                .into_iter()
                .map(|(_, f)| &u_inv * f * &u)
                .collect())
        })
        .collect::<Result<_>>()?;
    let generators: Vec<DMatrix<f64>> = generators.into_iter().flatten().collect();
    let span = generated_algebra(m, &generators, 1e-9);
    let loop_residuals = loops
        .par_iter()
        .map(|l| {
            let hol = horizontal_lift(conn, &l.based_at(basepoint.coords())?, steps)?;
            let log = matrix_log_along(&hol)?;
            let v: DVector<f64> = linalg::flatten(&log);
            Ok(span.residual(&v) / v.norm().max(1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let inclusion = loop_residuals.iter().all(|r| *r <= tol);
    Ok(AmbroseSingerReport {
        algebra_dim: span.len(),
        group_algebra_dim: conn.group().algebra_dim(),
        loop_residuals,
        inclusion,
        basis: span
            .vectors()
            .iter()
            .map(|v| linalg::unflatten(v, m))
            .collect(),
    })
}
