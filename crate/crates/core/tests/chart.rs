use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sdg_core::chart::{
    affine_combination, exp_tangent, jacobian, log_pair, pushforward, NilPoint, Point, Tangent,
};
use sdg_core::corpus::random_polynomial;
use sdg_core::dsl::ScalarExpr;
use sdg_core::nilpotent::{Context, NilElement};
use sdg_core::Error;

/// `Σ_a c_a ξ_{0,a}`: squares to zero in any W(k,n).
fn square_zero(ctx: Context, c: &[i32]) -> NilElement {
    c.iter()
        .enumerate()
        .fold(NilElement::zero(ctx), |acc, (a, v)| {
            acc + NilElement::generator(ctx, 0, a).scale(*v as f64)
        })
}

fn small_vec(n: usize) -> impl Strategy<Value = Vec<i32>> {
    proptest::collection::vec(-5i32..=5, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exp_log_identities(
        (k, base, dir, c) in (1usize..=3, 1usize..=4)
            .prop_flat_map(|(k, n)| (Just(k), small_vec(n), small_vec(n), small_vec(n)))
    ) {
        let n = base.len();
        let ctx = Context::new(k, n);
        let x = Point::new(base.iter().map(|v| *v as f64).collect()).unwrap();
        let t = Tangent::new(x.clone(), dir.iter().map(|v| *v as f64).collect()).unwrap();
        let d = square_zero(ctx, &c);
        let y = exp_tangent(&t, &d).unwrap();
        // log(x, exp(d·t)) = d·t
        let log = log_pair(&NilPoint::from_point(&x, ctx), &y).unwrap();
        for (a, l) in log.iter().enumerate() {
            prop_assert_eq!(l, &d.scale(t.direction[a]));
        }
        // exp(log) reproduces y through the tangent d ↦ x + d·t
        prop_assert_eq!(y.base(), &x);
        // scaling the tangent scales the displacement
        let y2 = exp_tangent(&t.scale(2.0), &d).unwrap();
        let y3 = exp_tangent(&t, &d.scale(2.0)).unwrap();
        prop_assert_eq!(y2, y3);
    }

    #[test]
    fn affine_combination_is_weight_affine(
        (base, off, c) in (1usize..=3)
            .prop_flat_map(|n| (small_vec(n), small_vec(n), small_vec(n)))
    ) {
        let n = base.len();
        let ctx = Context::new(2, n);
        let x = NilPoint::from_point(&Point::new(base.iter().map(|v| *v as f64).collect()).unwrap(), ctx);
        let y = NilPoint::new(
            x.base().clone(),
            off.iter().enumerate().map(|(a, v)| NilElement::generator(ctx, 1, a).scale(*v as f64)).collect(),
        ).unwrap();
        let d = square_zero(ctx, &c);
        prop_assert_eq!(affine_combination(&d, &x, &x).unwrap(), x.clone());
        prop_assert_eq!(affine_combination(&NilElement::zero(ctx), &x, &y).unwrap(), x.clone());
        // x + d·(y - x)
        let z = affine_combination(&d, &x, &y).unwrap();
        let log = log_pair(&x, &z).unwrap();
        let diff = log_pair(&x, &y).unwrap();
        for (l, v) in log.iter().zip(&diff) {
            prop_assert_eq!(l, &(&d * v));
        }
    }

    #[test]
    fn log_is_chart_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // polynomial germ φ = id + p
        let phi: Vec<ScalarExpr> = (0..n)
            .map(|i| ScalarExpr::add(ScalarExpr::var(i), random_polynomial(&mut rng, n, 3, 3)))
            .collect();
        let x = Point::new((0..n).map(|i| (i as f64) - 1.0).collect()).unwrap();
        let ctx = Context::new(1, n);
        let y = NilPoint::new(x.clone(), (0..n).map(|a| NilElement::generator(ctx, 0, a)).collect()).unwrap();
        let fx = pushforward(&phi, &NilPoint::from_point(&x, ctx)).unwrap();
        let fy = pushforward(&phi, &y).unwrap();
        let lhs = log_pair(&fx, &fy).unwrap();
        let jac = jacobian(&phi, &x).unwrap();
        let offset = log_pair(&NilPoint::from_point(&x, ctx), &y).unwrap();
        for i in 0..n {
            let rhs = (0..n).fold(NilElement::zero(ctx), |acc, a| acc + offset[a].scale(jac[(i, a)]));
            prop_assert_eq!(&lhs[i], &rhs);
        }
    }
}

#[test]
fn worked_examples() {
    let ctx = Context::new(1, 1);
    let xi = NilElement::generator(ctx, 0, 0);
    let x = NilPoint::from_point(&Point::new(vec![3.0]).unwrap(), ctx);
    let y = NilPoint::from_point(&Point::new(vec![5.0]).unwrap(), ctx);
    let z = affine_combination(&xi, &x, &y).unwrap();
    assert_eq!(z.coords()[0], xi.scale(2.0).add_constant(3.0));

    // φ = (x², y) at (1, 0)
    let ctx = Context::new(1, 2);
    let phi = vec![ScalarExpr::pow(ScalarExpr::var(0), 2), ScalarExpr::var(1)];
    let p = NilPoint::new(
        Point::new(vec![1.0, 0.0]).unwrap(),
        vec![
            NilElement::generator(ctx, 0, 0),
            NilElement::generator(ctx, 0, 1),
        ],
    )
    .unwrap();
    let q = pushforward(&phi, &p).unwrap();
    assert_eq!(q.base().coords(), &[1.0, 0.0]);
    assert_eq!(q.offset()[0], NilElement::generator(ctx, 0, 0).scale(2.0));
    assert_eq!(q.offset()[1], NilElement::generator(ctx, 0, 1));

    // log(x, x) = 0
    let x = NilPoint::from_point(&Point::new(vec![2.0, 5.0]).unwrap(), ctx);
    assert!(log_pair(&x, &x).unwrap().iter().all(|e| e.is_zero()));
}

#[test]
fn exp_rejects_non_square_zero() {
    let ctx = Context::new(2, 2);
    let d = NilElement::generator(ctx, 0, 0) + NilElement::generator(ctx, 1, 1);
    let t = Tangent::new(Point::origin(2), vec![1.0, 0.0]).unwrap();
    assert_eq!(exp_tangent(&t, &d).unwrap_err(), Error::NotSquareZero);
}
