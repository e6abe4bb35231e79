use nalgebra::DVector;
use rayon::prelude::*;

use crate::chart::{jacobian, Point};
use crate::dsl::ScalarExpr;
use crate::error::{Error, Result};
use crate::linalg;

use super::Distribution;

/// A parametrized piece of submanifold `φ: R^q → R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralPatch {
    params: usize,
    map: Vec<ScalarExpr>,
}

impl IntegralPatch {
    pub fn new(params: usize, map: Vec<ScalarExpr>) -> Result<Self> {
        if let Some(v) = map.iter().filter_map(|c| c.max_var()).max() {
            if v >= params {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    bound: params,
                });
            }
        }
        Ok(IntegralPatch { params, map })
    }

    pub fn param_dim(&self) -> usize {
        self.params
    }

    pub fn ambient_dim(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[ScalarExpr] {
        &self.map
    }

    pub fn image(&self, s: &Point) -> Result<Point> {
        Point::new(
            self.map
                .iter()
                .map(|c| c.eval_f64(s.coords()))
                .collect::<Result<_>>()?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchMode {
    /// `T_xQ ⊆ E_x`.
    Weak,
    /// `T_xQ = E_x`.
    Strong,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchReport {
    pub weak: bool,
    pub strong: bool,
    /// Largest distance of a patch tangent from `E`.
    pub tangent_residual: f64,
    /// Largest distance of an `E` basis vector from the patch tangent space.
    pub fiber_residual: f64,
}

impl PatchReport {
    pub fn verdict(&self, mode: PatchMode) -> bool {
        match mode {
            PatchMode::Weak => self.weak,
            PatchMode::Strong => self.strong,
        }
    }
}

/// Compares the patch tangent spaces with the distribution fibers at the
/// image of each parameter sample. Both verdicts are always computed.
pub fn check_integral_patch(
    dist: &Distribution,
    patch: &IntegralPatch,
    params: &[Point],
    tol: f64,
) -> Result<PatchReport> {
    if patch.ambient_dim() != dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: dist.dim(),
            got: patch.ambient_dim(),
        });
    }
    let per_point = params
        .par_iter()
        .map(|s| {
            let jac = jacobian(patch.map(), s)?;
            let q = patch.param_dim();
            let found = linalg::rank(&jac, tol.max(1e-12));
            if found != q {
                return Err(Error::RankDeficient {
                    point: s.coords().to_vec(),
                    expected: q,
                    found,
                });
            }
            let x = patch.image(s)?;
            let e = dist.basis(&x, tol)?;
            let tangent = jac
                .column_iter()
                .map(|c| {
                    let c: DVector<f64> = c.into_owned();
                    linalg::span_residual(&e, &c) / c.norm().max(1.0)
                })
                .fold(0.0, f64::max);
            let fiber = e
                .column_iter()
                .map(|c| linalg::span_residual(&jac, &c.into_owned()))
                .fold(0.0, f64::max);
            Ok((tangent, fiber))
        })
        .collect::<Result<Vec<_>>>()?;
    let tangent_residual = per_point.iter().map(|r| r.0).fold(0.0, f64::max);
    let fiber_residual = per_point.iter().map(|r| r.1).fold(0.0, f64::max);
    let weak = tangent_residual <= tol;
    let strong = weak && patch.param_dim() == dist.rank() && fiber_residual <= tol;
    Ok(PatchReport {
        weak,
        strong,
        tangent_residual,
        fiber_residual,
    })
}
