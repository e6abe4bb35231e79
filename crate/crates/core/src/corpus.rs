//! Seeded random inputs shared by tests and the acceptance run.

use nalgebra::DMatrix;
use rand::Rng;

use crate::connections::{ConnectionData, MatrixGroupSpec};
use crate::distributions::Distribution;
use crate::dsl::{Func, ScalarExpr};
use crate::error::Result;
use crate::forms::{index_tuples, ClassicalForm};

fn monomial(exps: &[u32]) -> ScalarExpr {
    exps.iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(i, e)| ScalarExpr::pow(ScalarExpr::var(i), *e as i32))
        .fold(ScalarExpr::Const(1.0), ScalarExpr::mul)
}

/// Polynomial in `n` variables of total degree `<= degree` with small integer
/// coefficients.
pub fn random_polynomial<R: Rng>(rng: &mut R, n: usize, degree: u32, terms: usize) -> ScalarExpr {
    let mut out = ScalarExpr::Const(0.0);
    for _ in 0..terms {
        let c = rng.gen_range(-3..=3) as f64;
        if c == 0.0 {
            continue;
        }
        let mut exps = vec![0u32; n];
        let total = rng.gen_range(0..=degree);
        for _ in 0..total {
            exps[rng.gen_range(0..n)] += 1;
        }
        out = ScalarExpr::add(out, ScalarExpr::mul(ScalarExpr::Const(c), monomial(&exps)));
    }
    out
}

/// Polynomial, possibly times `sin` or `cos` of one coordinate.
pub fn random_smooth<R: Rng>(rng: &mut R, n: usize) -> ScalarExpr {
    let p = random_polynomial(rng, n, 2, 3);
    match rng.gen_range(0..3) {
        0 => p,
        k => {
            let f = if k == 1 { Func::Sin } else { Func::Cos };
            ScalarExpr::mul(p, ScalarExpr::call(f, ScalarExpr::var(rng.gen_range(0..n))))
        }
    }
}

/// A `degree`-form on `R^n` with 1 to 3 random terms.
pub fn random_form<R: Rng>(rng: &mut R, n: usize, degree: usize, trig: bool) -> ClassicalForm {
    let tuples = index_tuples(n, degree);
    let count = rng.gen_range(1..=3.min(tuples.len()));
    let terms = (0..count).map(|_| {
        let t = tuples[rng.gen_range(0..tuples.len())].clone();
        let a = if trig {
            random_smooth(rng, n)
        } else {
            random_polynomial(rng, n, 2, 3)
        };
        (t, a)
    });
    let terms: Vec<_> = terms.collect();
    ClassicalForm::from_terms(n, degree, terms).expect("indices in range")
}

/// `ker(dF_1, …, dF_{n-m})` with `F_j = x_{m+j} + p_j(x)`, `p_j` depending
/// only on `x_0..x_{m-1}` so the forms stay independent. Always involutive.
pub fn random_integrable_kernel<R: Rng>(rng: &mut R, n: usize, m: usize) -> Result<Distribution> {
    let forms = (0..n - m)
        .map(|j| {
            let p = random_polynomial(rng, m, 2, 3);
            let f = ScalarExpr::add(ScalarExpr::var(m + j), p);
            ClassicalForm::scalar(n, f).exterior_derivative()
        })
        .collect();
    Distribution::from_kernel(n, forms)
}

/// `ker(dx_{m+j} - Σ_a f_{ja}(x) dx_a)` with random polynomial `f`; generically
/// not involutive.
pub fn random_normal_kernel<R: Rng>(rng: &mut R, n: usize, m: usize) -> Result<Distribution> {
    let forms = (0..n - m)
        .map(|j| {
            let mut terms = vec![(vec![m + j], ScalarExpr::Const(1.0))];
            for a in 0..m {
                terms.push((vec![a], ScalarExpr::neg(random_polynomial(rng, n, 2, 2))));
            }
            ClassicalForm::from_terms(n, 1, terms).expect("indices in range")
        })
        .collect();
    Distribution::from_kernel(n, forms)
}

/// `f = x_{n-1} + p(x_0..x_{n-2})`, so `df` never vanishes.
pub fn random_submersion<R: Rng>(rng: &mut R, n: usize) -> ScalarExpr {
    let p = random_smooth(rng, n - 1);
    ScalarExpr::add(ScalarExpr::var(n - 1), p)
}

/// Random `m×m` real matrix with entries in `[-1, 1]`.
pub fn random_matrix<R: Rng>(rng: &mut R, m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..=1.0))
}

/// Connection on `R^n` with `A_i = Σ_k p_{ik}(x)·X_k`, random linear
/// polynomials `p` and random matrices `X`.
pub fn random_connection<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    scale: f64,
) -> Result<ConnectionData> {
    let gens: Vec<DMatrix<f64>> = (0..2).map(|_| random_matrix(rng, m) * scale).collect();
    let mut terms = Vec::new();
    for i in 0..n {
        for x in &gens {
            terms.push((i, random_polynomial(rng, n, 1, 2), x.clone()));
        }
    }
    ConnectionData::from_scaled_generators(n, MatrixGroupSpec::general(m), &terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_deterministic() {
        let a = random_form(&mut ChaCha8Rng::seed_from_u64(4), 3, 2, true);
        let b = random_form(&mut ChaCha8Rng::seed_from_u64(4), 3, 2, true);
        assert_eq!(a, b);
        assert_eq!(a.degree(), 2);
    }

    #[test]
    fn distributions_have_requested_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(random_integrable_kernel(&mut rng, 4, 2).unwrap().rank(), 2);
        assert_eq!(random_normal_kernel(&mut rng, 4, 3).unwrap().rank(), 3);
    }
}
