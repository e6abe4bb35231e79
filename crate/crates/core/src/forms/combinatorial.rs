use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::chart::{flat_simplex, generic_simplex, log_pair, NilPoint, Point};
use crate::error::{Error, Result};
use crate::nilpotent::{Context, Monomial, NilElement};

use super::classical::ClassicalForm;
use super::multicovector::Multicovector;

type Evaluator = dyn Fn(&[NilPoint]) -> Result<NilElement> + Send + Sync;

/// A function on (p+1)-tuples of neighbour points, valued in the W algebra
/// the points live in.
#[derive(Clone)]
pub struct CombinatorialForm {
    degree: usize,
    dim: usize,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for CombinatorialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CombinatorialForm")
            .field("degree", &self.degree)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

pub(crate) fn factorial(p: usize) -> f64 {
    (1..=p).map(|i| i as f64).product()
}

/// Leibniz determinant of a small square matrix over W.
fn det_w(rows: &[Vec<NilElement>], ctx: Context) -> NilElement {
    let p = rows.len();
    if p == 0 {
        return NilElement::one(ctx);
    }
    let mut perm: Vec<usize> = (0..p).collect();
    let mut total = NilElement::zero(ctx);
    permutations(&mut perm, 0, &mut |sigma, sign| {
        let mut term = NilElement::constant(ctx, sign);
        for (i, &j) in sigma.iter().enumerate() {
            term = &term * &rows[i][j];
            if term.is_zero() {
                return;
            }
        }
        total = &total + &term;
    });
    total
}

fn permutations(v: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize], f64)) {
    fn go(v: &mut [usize], k: usize, sign: f64, f: &mut dyn FnMut(&[usize], f64)) {
        if k == v.len() {
            f(v, sign);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            go(v, k + 1, if i == k { sign } else { -sign }, f);
            v.swap(k, i);
        }
    }
    go(v, k, 1.0, f);
}

impl CombinatorialForm {
    pub fn new(
        dim: usize,
        degree: usize,
        eval: impl Fn(&[NilPoint]) -> Result<NilElement> + Send + Sync + 'static,
    ) -> Self {
        CombinatorialForm {
            degree,
            dim,
            eval: Arc::new(eval),
        }
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        Self::new(dim, degree, |pts| Ok(NilElement::zero(pts[0].context())))
    }

    /// `θ(x_0,…,x_p) = Σ_T a_T(x_0)·det[log(x_0,x_j)_{T_i}]`.
    pub fn from_classical(form: &ClassicalForm) -> Self {
        let form = form.clone();
        let (dim, degree) = (form.dim(), form.degree());
        Self::new(dim, degree, move |pts| {
            let ctx = pts[0].context();
            let base = pts[0].coords();
            let logs = pts[1..]
                .iter()
                .map(|y| log_pair(&pts[0], y))
                .collect::<Result<Vec<_>>>()?;
            let mut total = NilElement::zero(ctx);
            for (t, a) in form.terms() {
                let minor: Vec<Vec<NilElement>> = logs
                    .iter()
                    .map(|u| t.iter().map(|&i| u[i].clone()).collect())
                    .collect();
                let det = det_w(&minor, ctx);
                if det.is_zero() {
                    continue;
                }
                total = &total + &(&a.eval_nil(&base)? * &det);
            }
            Ok(total)
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Value on the given `degree + 1` vertices.
    pub fn eval(&self, pts: &[NilPoint]) -> Result<NilElement> {
        if pts.len() != self.degree + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.degree + 1,
                got: pts.len(),
            });
        }
        if let Some(p) = pts.iter().find(|p| p.dim() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        (self.eval)(pts)
    }

    /// Value on the generic infinitesimal simplex at `base`, in W(p, n).
    pub fn eval_generic(&self, base: &Point) -> Result<NilElement> {
        self.eval(&generic_simplex(base, self.degree))
    }

    /// Value on the generic flat simplex spanned by the columns of `basis`,
    /// in W(p, m).
    pub fn eval_flat(&self, base: &Point, basis: &DMatrix<f64>) -> Result<NilElement> {
        self.eval(&flat_simplex(base, basis, self.degree)?)
    }

    /// Classical coefficients at `base`: the coefficient of `m({0..p}, T)`
    /// divided by `p!`. Any lower-degree term above `tol` means the value
    /// does not vanish on degenerate simplices.
    pub fn extract_classical(&self, base: &Point, tol: f64) -> Result<Multicovector> {
        let value = self.eval_generic(base)?;
        coefficients_from_value(&value, self.dim, self.degree, tol)
    }

    /// `dθ(x_0,…,x_{p+1}) = Σ_i (-1)^i θ(x_0,…,x̂_i,…,x_{p+1})`.
    pub fn d(&self) -> CombinatorialForm {
        let inner = self.clone();
        Self::new(self.dim, self.degree + 1, move |pts| {
            let mut total = NilElement::zero(pts[0].context());
            for i in 0..pts.len() {
                let face: Vec<NilPoint> = pts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, p)| p.clone())
                    .collect();
                let v = inner.eval(&face)?;
                total = if i % 2 == 0 { &total + &v } else { &total - &v };
            }
            Ok(total)
        })
    }

    /// `(ω∧θ)(x_0,…,x_{k+l}) = ω(x_0,…,x_k)·θ(x_k,…,x_{k+l})`.
    pub fn wedge(&self, other: &CombinatorialForm) -> Result<CombinatorialForm> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let (a, b) = (self.clone(), other.clone());
        let k = self.degree;
        Ok(Self::new(
            self.dim,
            self.degree + other.degree,
            move |pts| Ok(&a.eval(&pts[..=k])? * &b.eval(&pts[k..])?),
        ))
    }

    /// `θ̄(v_1,…,v_p)` at `base`, with no neighbour condition among the `v_j`.
    pub fn eval_on_vectors(&self, base: &Point, vectors: &[&[f64]], tol: f64) -> Result<f64> {
        self.extract_classical(base, tol)?.apply(vectors)
    }

    /// The semi-infinitesimal 2-simplex value `θ̄(u, v)`.
    pub fn eval_semi(&self, base: &Point, u: &[f64], v: &[f64], tol: f64) -> Result<f64> {
        if self.degree != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.degree,
            });
        }
        self.eval_on_vectors(base, &[u, v], tol)
    }

    /// The constant-coefficient form with the given extraction; evaluating it
    /// on the generic simplex at any base reproduces `p!·c_T·m({0..p},T)`.
    pub fn from_multicovector(m: &Multicovector) -> Result<Self> {
        let entries: Vec<(Vec<usize>, crate::dsl::ScalarExpr)> = m
            .coefficients()
            .map(|(t, c)| (t.clone(), crate::dsl::ScalarExpr::Const(*c)))
            .collect();
        Ok(Self::from_classical(&ClassicalForm::from_terms(
            m.dim, m.degree, entries,
        )?))
    }
}

/// Reads classical coefficients off a W(p, n) value.
pub fn coefficients_from_value(
    value: &NilElement,
    dim: usize,
    degree: usize,
    tol: f64,
) -> Result<Multicovector> {
    let scale = factorial(degree);
    let mut entries = Vec::new();
    let mut residual: f64 = 0.0;
    for (m, c) in value.terms() {
        if m.degree() == degree {
            entries.push((m.col_set(), c / scale));
        } else {
            residual = residual.max(c.abs());
        }
    }
    if residual > tol {
        return Err(Error::NotAForm { degree, residual });
    }
    Multicovector::from_coefficients(dim, degree, entries)
}

/// The top monomial `m({0..p}, T)`.
pub fn top_monomial(cols: &[usize]) -> Monomial {
    let rows: Vec<usize> = (0..cols.len()).collect();
    Monomial::from_sets(&rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::ScalarExpr;

    fn point(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn dx(n: usize, i: usize) -> ClassicalForm {
        ClassicalForm::differential(n, i).unwrap()
    }

    #[test]
    fn to_combinatorial_examples() {
        let base = point(&[2.0, 5.0]);
        let ctx = Context::new(1, 2);
        let xi = |a| NilElement::generator(ctx, 0, a);

        let v = CombinatorialForm::from_classical(&dx(2, 1))
            .eval_generic(&base)
            .unwrap();
        assert_eq!(v, xi(1));

        let w = dx(2, 1).mul_scalar(&ScalarExpr::var(0));
        let v = CombinatorialForm::from_classical(&w)
            .eval_generic(&base)
            .unwrap();
        assert_eq!(v, xi(1).scale(2.0));

        let area = dx(2, 0).wedge(&dx(2, 1)).unwrap();
        let v = CombinatorialForm::from_classical(&area)
            .eval_generic(&base)
            .unwrap();
        let m = NilElement::monomial(Context::new(2, 2), top_monomial(&[0, 1]), 2.0);
        assert_eq!(v, m);
    }

    #[test]
    fn extraction_examples() {
        let base = point(&[2.0, 5.0]);
        let area = dx(2, 0).wedge(&dx(2, 1)).unwrap();
        let e = CombinatorialForm::from_classical(&area)
            .extract_classical(&base, 1e-12)
            .unwrap();
        assert_eq!(e.coefficient(&[0, 1]), 1.0);

        let w = dx(2, 1).mul_scalar(&ScalarExpr::var(0));
        let e = CombinatorialForm::from_classical(&w)
            .extract_classical(&base, 1e-12)
            .unwrap();
        assert_eq!(e.coefficient(&[1]), 2.0);

        let z = CombinatorialForm::zero(2, 2)
            .extract_classical(&base, 1e-12)
            .unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn d_of_function() {
        let f = ClassicalForm::scalar(1, ScalarExpr::pow(ScalarExpr::var(0), 2));
        let df = CombinatorialForm::from_classical(&f).d();
        let v = df.eval_generic(&point(&[3.0])).unwrap();
        assert_eq!(
            v,
            NilElement::generator(Context::new(1, 1), 0, 0).scale(6.0)
        );
    }

    #[test]
    fn d_of_x_dy_is_half_area() {
        let w = dx(2, 1).mul_scalar(&ScalarExpr::var(0));
        let dw = CombinatorialForm::from_classical(&w).d();
        let v = dw.eval_generic(&point(&[0.3, -1.0])).unwrap();
        assert_eq!(
            v,
            NilElement::monomial(Context::new(2, 2), top_monomial(&[0, 1]), 1.0)
        );
        let e = dw.extract_classical(&point(&[0.3, -1.0]), 1e-12).unwrap();
        assert_eq!(e.coefficient(&[0, 1]), 0.5);
        let closed = CombinatorialForm::from_classical(&dx(2, 0)).d();
        assert!(closed.eval_generic(&point(&[1.0, 1.0])).unwrap().is_zero());
    }

    #[test]
    fn wedge_of_differentials() {
        let a = CombinatorialForm::from_classical(&dx(2, 0));
        let b = CombinatorialForm::from_classical(&dx(2, 1));
        let v = a
            .wedge(&b)
            .unwrap()
            .eval_generic(&point(&[0.0, 0.0]))
            .unwrap();
        assert_eq!(
            v,
            NilElement::monomial(Context::new(2, 2), top_monomial(&[0, 1]), 1.0)
        );
    }

    #[test]
    fn lower_degree_terms_are_rejected() {
        let bad = CombinatorialForm::new(2, 1, |pts| Ok(NilElement::one(pts[0].context())));
        assert!(matches!(
            bad.extract_classical(&point(&[0.0, 0.0]), 1e-9),
            Err(Error::NotAForm { .. })
        ));
    }

    #[test]
    fn semi_simplex_values() {
        let area = CombinatorialForm::from_classical(&dx(3, 0).wedge(&dx(3, 1)).unwrap());
        let p = point(&[0.0, 0.0, 0.0]);
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        assert_eq!(area.eval_semi(&p, &e1, &e2, 1e-12).unwrap(), 1.0);
        assert_eq!(area.eval_semi(&p, &e2, &e1, 1e-12).unwrap(), -1.0);
        assert_eq!(area.eval_semi(&p, &[0.0; 3], &e1, 1e-12).unwrap(), 0.0);
    }
}
