use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chart::{flat_simplex, generic_simplex, Point};
use crate::error::{Error, Result};
use crate::forms::{CombinatorialForm, Multicovector};
use crate::linalg;

use super::Distribution;

/// Outcome at one sample point: the verdict and the largest value that
/// should have vanished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointVerdict {
    pub involutive: bool,
    pub residual: f64,
}

impl PointVerdict {
    fn new(residual: f64, tol: f64) -> Self {
        PointVerdict {
            involutive: residual <= tol,
            residual,
        }
    }
}

/// `ω(x,y) = -ω(y,x)` in W for every kernel form at every sample.
pub fn flat_symmetry_check(dist: &Distribution, samples: &[Point], tol: f64) -> Result<bool> {
    let results = samples
        .par_iter()
        .map(|p| {
            let forms = dist.kernel_forms(p, tol)?;
            let s = generic_simplex(p, 1);
            let reversed = [s[1].clone(), s[0].clone()];
            let mut worst: f64 = 0.0;
            for f in &forms {
                let sum = &f.eval(&s)? + &f.eval(&reversed)?;
                worst = worst.max(sum.max_abs());
            }
            Ok(worst <= tol)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(results.into_iter().all(|b| b))
}

/// `dω_i` on the generic flat 2-simplex at `p`, for each kernel form.
fn flat_d_values(dist: &Distribution, p: &Point, tol: f64) -> Result<f64> {
    let forms = dist.kernel_forms(p, tol)?;
    let basis = dist.basis(p, tol)?;
    let mut worst: f64 = 0.0;
    for f in &forms {
        worst = worst.max(f.d().eval_flat(p, &basis)?.max_abs());
    }
    Ok(worst)
}

/// Combinatorial test: if two faces of an infinitesimal 2-simplex are flat,
/// so is the third. Checked as `dω_i = 0` on the generic flat 2-simplex.
pub fn check_involutive_combinatorial(
    dist: &Distribution,
    samples: &[Point],
    tol: f64,
) -> Result<Vec<PointVerdict>> {
    samples
        .par_iter()
        .map(|p| Ok(PointVerdict::new(flat_d_values(dist, p, tol)?, tol)))
        .collect()
}

/// The third face `ω_i(y,z)` of the generic flat simplex `(p, y, z)`,
/// evaluated directly.
pub fn third_face_check(
    dist: &Distribution,
    samples: &[Point],
    tol: f64,
) -> Result<Vec<PointVerdict>> {
    samples
        .par_iter()
        .map(|p| {
            let forms = dist.kernel_forms(p, tol)?;
            let basis = dist.basis(p, tol)?;
            let s = flat_simplex(p, &basis, 2)?;
            let mut worst: f64 = 0.0;
            for f in &forms {
                worst = worst.max(f.eval(&s[1..])?.max_abs());
            }
            Ok(PointVerdict::new(worst, tol))
        })
        .collect()
}

/// Classical verdicts: the ideal test needs kernel forms, the bracket test
/// spanning fields. Whichever representation is present is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalVerdict {
    pub ideal: Option<PointVerdict>,
    pub bracket: Option<PointVerdict>,
}

impl ClassicalVerdict {
    pub fn involutive(&self) -> bool {
        self.ideal.is_none_or(|v| v.involutive) && self.bracket.is_none_or(|v| v.involutive)
    }

    /// Both tests ran and disagree.
    pub fn conflicting(&self) -> bool {
        matches!((self.ideal, self.bracket), (Some(a), Some(b)) if a.involutive != b.involutive)
    }
}

fn ideal_residual(dist: &Distribution, p: &Point, tol: f64) -> Result<f64> {
    let forms = dist.kernel().expect("caller checked");
    dist.kernel_matrix(p, tol)?;
    let values = forms
        .iter()
        .map(|f| f.at(p))
        .collect::<Result<Vec<Multicovector>>>()?;
    let all = values[1..]
        .iter()
        .try_fold(values[0].clone(), |acc, w| acc.wedge(w))?;
    let mut worst: f64 = 0.0;
    for f in forms {
        let dw = f.exterior_derivative().at(p)?;
        worst = worst.max(dw.wedge(&all)?.max_abs());
    }
    Ok(worst)
}

fn bracket_residual(dist: &Distribution, p: &Point, tol: f64) -> Result<f64> {
    let fields = dist.span().expect("caller checked");
    let s = dist.span_matrix(p, tol)?;
    let n = dist.dim();
    let x = p.coords();
    // J[a][(i, j)] = ∂_j X_a^i
    let jac = fields
        .iter()
        .map(|f| {
            let mut m = DMatrix::zeros(n, n);
            for (i, c) in f.iter().enumerate() {
                for j in 0..n {
                    m[(i, j)] = c.diff(j).eval_f64(x)?;
                }
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for a in 0..fields.len() {
        for b in a + 1..fields.len() {
            let xa: DVector<f64> = s.column(a).into_owned();
            let xb: DVector<f64> = s.column(b).into_owned();
            let br = &jac[b] * &xa - &jac[a] * &xb;
            worst = worst.max(linalg::span_residual(&s, &br));
        }
    }
    Ok(worst)
}

/// Classical involutivity: `dω_i ∧ ω_1 ∧ … ∧ ω_r = 0` and/or
/// `[X_a, X_b] ∈ span{X_c}` at each sample.
pub fn check_involutive_classical(
    dist: &Distribution,
    samples: &[Point],
    tol: f64,
) -> Result<Vec<ClassicalVerdict>> {
    samples
        .par_iter()
        .map(|p| {
            let ideal = match dist.kernel() {
                Some(_) => Some(PointVerdict::new(ideal_residual(dist, p, tol)?, tol)),
                None => None,
            };
            let bracket = match dist.span() {
                Some(_) => Some(PointVerdict::new(bracket_residual(dist, p, tol)?, tol)),
                None => None,
            };
            Ok(ClassicalVerdict { ideal, bracket })
        })
        .collect()
}

/// Both tests side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct InvolutivityReport {
    pub samples: Vec<Point>,
    pub combinatorial: Vec<PointVerdict>,
    pub classical: Vec<ClassicalVerdict>,
}

impl InvolutivityReport {
    pub fn combinatorial_verdict(&self) -> bool {
        self.combinatorial.iter().all(|v| v.involutive)
    }

    pub fn classical_verdict(&self) -> bool {
        self.classical.iter().all(|v| v.involutive())
    }

    /// Agreement at every sample point, including agreement between the two
    /// classical tests when both ran.
    pub fn agree(&self) -> bool {
        self.combinatorial
            .iter()
            .zip(&self.classical)
            .all(|(c, k)| !k.conflicting() && c.involutive == k.involutive())
    }
}

pub fn involutivity_report(
    dist: &Distribution,
    samples: &[Point],
    tol: f64,
) -> Result<InvolutivityReport> {
    Ok(InvolutivityReport {
        samples: samples.to_vec(),
        combinatorial: check_involutive_combinatorial(dist, samples, tol)?,
        classical: check_involutive_classical(dist, samples, tol)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SemiInfinitesimalOutcome {
    /// θ does not vanish on flat infinitesimal 2-simplices at this point.
    PreconditionFailed {
        point: Vec<f64>,
        residual: f64,
    },
    Holds,
    /// Precondition held but some semi-infinitesimal value is nonzero.
    Violated {
        point: Vec<f64>,
        residual: f64,
    },
}

/// If θ annihilates flat infinitesimal 2-simplices it annihilates flat
/// semi-infinitesimal ones: `θ̄(u, v) = 0` for `u, v ∈ E_p`. Checked on basis
/// pairs and `extra` random combinations per sample.
pub fn semi_infinitesimal_check(
    dist: &Distribution,
    theta: &CombinatorialForm,
    samples: &[Point],
    extra: usize,
    seed: u64,
    tol: f64,
) -> Result<SemiInfinitesimalOutcome> {
    if theta.degree() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: theta.degree(),
        });
    }
    let mut bases = Vec::with_capacity(samples.len());
    for p in samples {
        let basis = dist.basis(p, tol)?;
        let residual = theta.eval_flat(p, &basis)?.max_abs();
        if residual > tol {
            return Ok(SemiInfinitesimalOutcome::PreconditionFailed {
                point: p.coords().to_vec(),
                residual,
            });
        }
        bases.push(basis);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (p, basis) in samples.iter().zip(&bases) {
        let e = theta.extract_classical(p, tol)?;
        let m = basis.ncols();
        let mut vectors: Vec<DVector<f64>> = basis.column_iter().map(|c| c.into_owned()).collect();
        for _ in 0..extra {
            let c = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
            vectors.push(basis * c);
        }
        let mut worst: f64 = 0.0;
        for u in &vectors {
            for v in &vectors {
                worst = worst.max(e.apply(&[u.as_slice(), v.as_slice()])?.abs());
            }
        }
        if worst > tol {
            return Ok(SemiInfinitesimalOutcome::Violated {
                point: p.coords().to_vec(),
                residual: worst,
            });
        }
    }
    Ok(SemiInfinitesimalOutcome::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::ScalarExpr;
    use crate::forms::ClassicalForm;

    fn dx(i: usize) -> ClassicalForm {
        ClassicalForm::differential(3, i).unwrap()
    }

    fn contact() -> Distribution {
        let w = dx(2).sub(&dx(0).mul_scalar(&ScalarExpr::var(1))).unwrap();
        Distribution::from_kernel(3, vec![w]).unwrap()
    }

    fn pts() -> Vec<Point> {
        vec![Point::origin(3), Point::new(vec![0.5, -0.3, 0.2]).unwrap()]
    }

    #[test]
    fn contact_is_not_involutive() {
        let r = involutivity_report(&contact(), &pts(), 1e-9).unwrap();
        assert!(!r.combinatorial_verdict());
        assert!(!r.classical_verdict());
        assert!(r.agree());
    }

    #[test]
    fn horizontal_planes_are_involutive() {
        let d = Distribution::from_kernel(3, vec![dx(2)]).unwrap();
        let r = involutivity_report(&d, &pts(), 1e-9).unwrap();
        assert!(r.combinatorial_verdict() && r.classical_verdict());
        assert!(flat_symmetry_check(&d, &pts(), 1e-12).unwrap());
    }

    #[test]
    fn contact_span_bracket() {
        let one = ScalarExpr::Const(1.0);
        let zero = ScalarExpr::Const(0.0);
        let d = Distribution::from_span(
            3,
            vec![
                vec![one.clone(), zero.clone(), ScalarExpr::var(1)],
                vec![zero.clone(), one.clone(), zero.clone()],
            ],
        )
        .unwrap();
        let r = involutivity_report(&d, &pts(), 1e-9).unwrap();
        assert!(!r.classical_verdict());
        assert!(!r.combinatorial_verdict());
        let third = third_face_check(&d, &pts(), 1e-9).unwrap();
        assert!(third.iter().all(|v| !v.involutive));
    }

    #[test]
    fn semi_infinitesimal_outcomes() {
        let d = Distribution::from_kernel(3, vec![dx(2)]).unwrap();
        let area = CombinatorialForm::from_classical(&dx(0).wedge(&dx(1)).unwrap());
        assert!(matches!(
            semi_infinitesimal_check(&d, &area, &pts(), 3, 1, 1e-9).unwrap(),
            SemiInfinitesimalOutcome::PreconditionFailed { .. }
        ));
        let zero = CombinatorialForm::zero(3, 2);
        assert_eq!(
            semi_infinitesimal_check(&d, &zero, &pts(), 3, 1, 1e-9).unwrap(),
            SemiInfinitesimalOutcome::Holds
        );
        let dw = CombinatorialForm::from_classical(&dx(2)).d();
        assert_eq!(
            semi_infinitesimal_check(&d, &dw, &pts(), 3, 1, 1e-9).unwrap(),
            SemiInfinitesimalOutcome::Holds
        );
    }
}
