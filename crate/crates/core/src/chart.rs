//! Points, neighbour points and tangent vectors in a single coordinate chart,
//! with the log/exp correspondence between neighbour pairs and infinitesimal
//! tangent vectors.

use nalgebra::DMatrix;

use crate::dsl::ScalarExpr;
use crate::error::{Error, Result};
use crate::nilpotent::{Context, NilElement};

/// A real point of the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().all(|c| c.is_finite()) {
            Ok(Point { coords })
        } else {
            Err(Error::Domain(format!("non-finite coordinates {coords:?}")))
        }
    }

    pub fn origin(dim: usize) -> Self {
        Point {
            coords: vec![0.0; dim],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn translate(&self, v: &[f64]) -> Result<Point> {
        check_dim(self.dim(), v.len())?;
        Point::new(self.coords.iter().zip(v).map(|(a, b)| a + b).collect())
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// A virtual point `base + offset` with nilpotent offset: a neighbour of
/// `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct NilPoint {
    base: Point,
    offset: Vec<NilElement>,
}

impl NilPoint {
    pub fn new(base: Point, offset: Vec<NilElement>) -> Result<Self> {
        check_dim(base.dim(), offset.len())?;
        let ctx = offset
            .first()
            .map(|o| o.context())
            .ok_or_else(|| Error::Invalid("zero-dimensional chart".into()))?;
        for o in &offset {
            if o.context() != ctx {
                return Err(Error::Invalid(
                    "offset components in different contexts".into(),
                ));
            }
            if o.constant_term() != 0.0 {
                return Err(Error::Invalid("offset has a nonzero constant term".into()));
            }
        }
        Ok(NilPoint { base, offset })
    }

    /// The real point itself, viewed in context `ctx`.
    pub fn from_point(base: &Point, ctx: Context) -> Self {
        NilPoint {
            base: base.clone(),
            offset: vec![NilElement::zero(ctx); base.dim()],
        }
    }

    /// Splits W-valued coordinates into base and offset.
    pub fn from_coords(coords: Vec<NilElement>) -> Result<Self> {
        let base = Point::new(coords.iter().map(|c| c.constant_term()).collect())?;
        let offset = coords.iter().map(|c| c.nilpotent_part()).collect();
        NilPoint::new(base, offset)
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn offset(&self) -> &[NilElement] {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn context(&self) -> Context {
        self.offset[0].context()
    }

    pub fn coords(&self) -> Vec<NilElement> {
        self.offset
            .iter()
            .zip(self.base.coords())
            .map(|(o, b)| o.add_constant(*b))
            .collect()
    }

    pub fn is_real(&self) -> bool {
        self.offset.iter().all(|o| o.is_zero())
    }

    pub fn distance(&self, other: &NilPoint) -> Result<f64> {
        let diff = log_pair(self, other)?;
        Ok(diff.iter().fold(0.0, |acc, d| acc.max(d.max_abs())))
    }
}

/// A tangent vector `d ↦ base + d·direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub base: Point,
    pub direction: Vec<f64>,
}

impl Tangent {
    pub fn new(base: Point, direction: Vec<f64>) -> Result<Self> {
        check_dim(base.dim(), direction.len())?;
        Ok(Tangent { base, direction })
    }

    /// `s·t`, the tangent `δ ↦ t(s·δ)`.
    pub fn scale(&self, s: f64) -> Tangent {
        Tangent {
            base: self.base.clone(),
            direction: self.direction.iter().map(|v| s * v).collect(),
        }
    }
}

fn check_context(a: Context, b: Context) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ContextMismatch(a.rows, a.cols, b.rows, b.cols))
    }
}

/// `(1-d)·x + d·y` componentwise, with `d` nilpotent.
pub fn affine_combination(d: &NilElement, x: &NilPoint, y: &NilPoint) -> Result<NilPoint> {
    check_dim(x.dim(), y.dim())?;
    check_context(x.context(), y.context())?;
    check_context(d.context(), x.context())?;
    if d.constant_term() != 0.0 {
        return Err(Error::Invalid("affine weight must be nilpotent".into()));
    }
    let one_minus_d = -d + NilElement::one(d.context());
    let coords = x
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| &one_minus_d * a + d * &b)
        .collect();
    NilPoint::from_coords(coords)
}

/// `log(x,y)`: in a chart the tangent `d ↦ x + d·(y-x)`, returned as the
/// W-vector `y - x`.
pub fn log_pair(x: &NilPoint, y: &NilPoint) -> Result<Vec<NilElement>> {
    check_dim(x.dim(), y.dim())?;
    check_context(x.context(), y.context())?;
    Ok(y.coords()
        .iter()
        .zip(x.coords())
        .map(|(a, b)| a - &b)
        .collect())
}

/// `exp(d·t) = t(d) = base + d·direction` for `d` of square zero.
pub fn exp_tangent(t: &Tangent, d: &NilElement) -> Result<NilPoint> {
    if d.constant_term() != 0.0 {
        return Err(Error::Invalid("d must have zero constant term".into()));
    }
    if !(d * d).is_zero() {
        return Err(Error::NotSquareZero);
    }
    NilPoint::new(
        t.base.clone(),
        t.direction.iter().map(|v| d.scale(*v)).collect(),
    )
}

/// Image of a neighbour point under a smooth map given componentwise.
pub fn pushforward(map: &[ScalarExpr], p: &NilPoint) -> Result<NilPoint> {
    let coords = p.coords();
    let image = map
        .iter()
        .map(|f| f.eval_nil(&coords))
        .collect::<Result<Vec<_>>>()?;
    NilPoint::from_coords(image)
}

/// Jacobian of a componentwise map at a real point, by symbolic differentiation.
pub fn jacobian(map: &[ScalarExpr], p: &Point) -> Result<DMatrix<f64>> {
    let mut jac = DMatrix::zeros(map.len(), p.dim());
    for (i, f) in map.iter().enumerate() {
        for a in 0..p.dim() {
            jac[(i, a)] = f.diff(a).eval_f64(p.coords())?;
        }
    }
    Ok(jac)
}

/// Jacobian at W-valued coordinates (entries are W elements).
pub fn jacobian_nil(map: &[ScalarExpr], coords: &[NilElement]) -> Result<Vec<Vec<NilElement>>> {
    map.iter()
        .map(|f| {
            (0..coords.len())
                .map(|a| f.diff(a).eval_nil(coords))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// The generic infinitesimal p-simplex at `base`: `x_0 = base`,
/// `x_j = base + (ξ_{j-1,a})_a`, in W(p, n).
pub fn generic_simplex(base: &Point, p: usize) -> Vec<NilPoint> {
    let n = base.dim();
    let ctx = Context::new(p, n);
    let mut out = vec![NilPoint::from_point(base, ctx)];
    for row in 0..p {
        out.push(NilPoint {
            base: base.clone(),
            offset: (0..n).map(|a| NilElement::generator(ctx, row, a)).collect(),
        });
    }
    out
}

/// The generic flat p-simplex for the subspace spanned by the columns of
/// `basis` (n×m): `x_j = base + basis·ζ_{j-1}`, in W(p, m).
pub fn flat_simplex(base: &Point, basis: &DMatrix<f64>, p: usize) -> Result<Vec<NilPoint>> {
    check_dim(base.dim(), basis.nrows())?;
    let m = basis.ncols();
    let ctx = Context::new(p, m);
    let mut out = vec![NilPoint::from_point(base, ctx)];
    for row in 0..p {
        let offset = (0..base.dim())
            .map(|a| {
                (0..m).fold(NilElement::zero(ctx), |acc, alpha| {
                    acc + NilElement::generator(ctx, row, alpha).scale(basis[(a, alpha)])
                })
            })
            .collect();
        out.push(NilPoint {
            base: base.clone(),
            offset,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::ScalarExpr;
    use crate::nilpotent::Monomial;

    fn gen(ctx: Context, r: usize, c: usize) -> NilElement {
        NilElement::generator(ctx, r, c)
    }

    #[test]
    fn affine_combination_examples() {
        let ctx = Context::new(1, 1);
        let x = NilPoint::from_point(&Point::new(vec![3.0]).unwrap(), ctx);
        let y = NilPoint::from_point(&Point::new(vec![5.0]).unwrap(), ctx);
        let zero = NilElement::zero(ctx);
        assert_eq!(affine_combination(&zero, &x, &y).unwrap(), x);

        let d = gen(ctx, 0, 0);
        let r = affine_combination(&d, &x, &y).unwrap();
        assert_eq!(r.coords()[0], gen(ctx, 0, 0).scale(2.0).add_constant(3.0));

        assert_eq!(affine_combination(&d, &x, &x).unwrap(), x);
    }

    #[test]
    fn log_examples() {
        let ctx = Context::new(1, 2);
        let x = NilPoint::from_point(&Point::new(vec![2.0, 5.0]).unwrap(), ctx);
        assert!(log_pair(&x, &x).unwrap().iter().all(|c| c.is_zero()));

        let y = NilPoint::new(x.base().clone(), vec![gen(ctx, 0, 0), gen(ctx, 0, 1)]).unwrap();
        assert_eq!(
            log_pair(&x, &y).unwrap(),
            vec![gen(ctx, 0, 0), gen(ctx, 0, 1)]
        );
    }

    #[test]
    fn exp_and_log_are_inverse() {
        let ctx = Context::new(1, 2);
        let base = Point::new(vec![0.5, -1.0]).unwrap();
        let t = Tangent::new(base.clone(), vec![3.0, 4.0]).unwrap();
        let d = gen(ctx, 0, 0) + gen(ctx, 0, 1).scale(2.0);
        assert!((&d * &d).is_zero());

        let y = exp_tangent(&t, &d).unwrap();
        let x = NilPoint::from_point(&base, ctx);
        let log = log_pair(&x, &y).unwrap();
        for (l, v) in log.iter().zip(&t.direction) {
            assert_eq!(*l, d.scale(*v));
        }

        let y2 = exp_tangent(&t.scale(2.0), &d).unwrap();
        let doubled: Vec<_> = t.direction.iter().map(|v| d.scale(2.0 * v)).collect();
        assert_eq!(log_pair(&x, &y2).unwrap(), doubled);

        let at_zero = exp_tangent(&t, &NilElement::zero(ctx)).unwrap();
        assert_eq!(at_zero, x);
    }

    #[test]
    fn exp_rejects_non_square_zero() {
        let ctx = Context::new(2, 2);
        let d = gen(ctx, 0, 0) + gen(ctx, 1, 1);
        let t = Tangent::new(Point::origin(2), vec![1.0, 0.0]).unwrap();
        assert!(matches!(exp_tangent(&t, &d), Err(Error::NotSquareZero)));
    }

    #[test]
    fn pushforward_square_map() {
        let ctx = Context::new(1, 2);
        let map = vec![ScalarExpr::pow(ScalarExpr::var(0), 2), ScalarExpr::var(1)];
        let p = NilPoint::new(
            Point::new(vec![1.0, 0.0]).unwrap(),
            vec![gen(ctx, 0, 0), gen(ctx, 0, 1)],
        )
        .unwrap();
        let q = pushforward(&map, &p).unwrap();
        assert_eq!(q.base().coords(), &[1.0, 0.0]);
        assert_eq!(q.offset()[0], gen(ctx, 0, 0).scale(2.0));
        assert_eq!(q.offset()[1], gen(ctx, 0, 1));

        let id = vec![ScalarExpr::var(0), ScalarExpr::var(1)];
        assert_eq!(pushforward(&id, &p).unwrap(), p);
    }

    #[test]
    fn generic_and_flat_simplices() {
        let base = Point::new(vec![1.0, 2.0, 3.0]).unwrap();
        let s = generic_simplex(&base, 2);
        assert_eq!(s.len(), 3);
        assert_eq!(s[2].offset()[1], gen(Context::new(2, 3), 1, 1));

        let basis = DMatrix::from_column_slice(3, 1, &[1.0, 1.0, 0.0]);
        let f = flat_simplex(&base, &basis, 2).unwrap();
        let ctx = Context::new(2, 1);
        assert_eq!(f[1].offset()[0], gen(ctx, 0, 0));
        assert!(f[1].offset()[2].is_zero());
        // two flat vertices along one direction: their product vanishes
        let prod = &f[1].offset()[0] * &f[2].offset()[1];
        assert!(prod.is_zero());
        assert_eq!(prod.coefficient(&Monomial::UNIT), 0.0);
    }
}
