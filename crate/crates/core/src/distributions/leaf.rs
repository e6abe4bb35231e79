use nalgebra::DVector;

use crate::chart::Point;
use crate::error::{Error, Result};
use crate::sampling::BoxDomain;

use super::Distribution;

/// Follows the distribution from `start` with RK4.
///
/// `direction` is either m span coefficients (flow of `Σ c_a X_a`) or an
/// n-vector projected onto `E_x` at every stage. Returns `steps + 1` points.
pub fn trace_leaf(
    dist: &Distribution,
    start: &Point,
    direction: &[f64],
    steps: usize,
    h: f64,
    domain: Option<&BoxDomain>,
    tol: f64,
) -> Result<Vec<Point>> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::StepUnderflow);
    }
    let use_span = dist.span().is_some() && direction.len() == dist.rank();
    if !use_span && direction.len() != dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: dist.dim(),
            got: direction.len(),
        });
    }
    let w = DVector::from_column_slice(direction);
    let field = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let p = Point::new(x.as_slice().to_vec())?;
        if let Some(b) = domain {
            if !b.contains(x.as_slice()) {
                return Err(Error::LeftChart(x.as_slice().to_vec()));
            }
        }
        if use_span {
            Ok(dist.span_matrix(&p, tol)? * &w)
        } else {
            let e = dist.basis(&p, tol)?;
            Ok(&e * (e.transpose() * &w))
        }
    };
    let mut x = DVector::from_column_slice(start.coords());
    let mut out = vec![start.clone()];
    for _ in 0..steps {
        let k1 = field(&x)?;
        let k2 = field(&(&x + &k1 * (h / 2.0)))?;
        let k3 = field(&(&x + &k2 * (h / 2.0)))?;
        let k4 = field(&(&x + &k3 * h))?;
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if let Some(b) = domain {
            if !b.contains(x.as_slice()) {
                return Err(Error::LeftChart(x.as_slice().to_vec()));
            }
        }
        out.push(Point::new(x.as_slice().to_vec())?);
    }
    Ok(out)
}
