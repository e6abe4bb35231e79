mod common;

use common::{all_monomials, context, int_element, int_nilpotent};
use nalgebra::DMatrix;
use proptest::prelude::*;
use sdg_core::nilpotent::{
    canonicalize, monomials_of_degree, Context, Generator, Monomial, NilElement, Primitive,
};

fn binom(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Oracle product: multiply generator words by brute force, using only
/// commutativity and the exchange relation as permutations of columns.
fn brute_product(a: &NilElement, b: &NilElement) -> NilElement {
    let ctx = a.context();
    let mut out = NilElement::zero(ctx);
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let word: Vec<Generator> = ma
                .row_set()
                .into_iter()
                .zip(ma.col_set())
                .chain(mb.row_set().into_iter().zip(mb.col_set()))
                .map(|(r, c)| Generator::new(r, c))
                .collect();
            if let Some((sign, m)) = canonicalize(&word) {
                out = out + NilElement::monomial(ctx, m, ca * cb * sign as f64);
            }
        }
    }
    out
}

fn triple_ctx() -> impl Strategy<Value = (NilElement, NilElement, NilElement)> {
    context().prop_flat_map(|ctx| (int_element(ctx), int_element(ctx), int_element(ctx)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_laws((a, b, c) in triple_ctx()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &NilElement::one(a.context()), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn product_matches_word_canonicalization((a, b, _c) in triple_ctx()) {
        prop_assert_eq!(&a * &b, brute_product(&a, &b));
    }

    #[test]
    fn nilpotency(ctx in context(), seed in proptest::collection::vec(-3i32..=3, 1..64)) {
        // min(k,n)+1 elements of pure degree 1
        let deg1 = monomials_of_degree(ctx, 1);
        let factors: Vec<NilElement> = (0..=ctx.max_degree())
            .map(|f| {
                NilElement::from_terms(
                    ctx,
                    deg1.iter().enumerate().map(|(i, m)| (*m, seed[(i + 7 * f) % seed.len()] as f64)),
                )
                .unwrap()
            })
            .collect();
        let prod = factors.iter().fold(NilElement::one(ctx), |acc, f| &acc * f);
        prop_assert!(prod.is_zero());
    }

    #[test]
    fn row_maps_are_morphisms(
        (a, b, map) in context().prop_flat_map(|ctx| {
            let k = ctx.rows;
            (
                int_element(ctx),
                int_element(ctx),
                proptest::collection::vec(-2i32..=2, k * k).prop_map(move |v| {
                    DMatrix::from_iterator(k, k, v.into_iter().map(f64::from))
                }),
            )
        })
    ) {
        let phi = |x: &NilElement| x.map_rows(&map).unwrap();
        prop_assert_eq!(phi(&(&a * &b)), &phi(&a) * &phi(&b));
        prop_assert_eq!(phi(&(&a + &b)), &phi(&a) + &phi(&b));
    }

    #[test]
    fn column_substitution_is_a_morphism(
        (a, b, map) in (1usize..=4, 1usize..=3, 1usize..=4).prop_flat_map(|(k, m, n)| {
            let src = Context::new(k, m);
            (
                int_element(src),
                int_element(src),
                proptest::collection::vec(-2i32..=2, n * m).prop_map(move |v| {
                    DMatrix::from_iterator(n, m, v.into_iter().map(f64::from))
                }),
            )
        })
    ) {
        let phi = |x: &NilElement| x.substitute_columns(&map).unwrap();
        prop_assert_eq!(phi(&(&a * &b)), &phi(&a) * &phi(&b));
        // generators go where the matrix says
        let ctx = a.context();
        let tgt = Context::new(ctx.rows, map.nrows());
        for j in 0..ctx.rows {
            for alpha in 0..ctx.cols {
                let img = (0..map.nrows()).fold(NilElement::zero(tgt), |acc, r| {
                    acc + NilElement::generator(tgt, j, r).scale(map[(r, alpha)])
                });
                prop_assert_eq!(phi(&NilElement::generator(ctx, j, alpha)), img);
            }
        }
    }

    #[test]
    fn identify_and_permute_are_morphisms(
        (a, b, i, j, perm) in context().prop_flat_map(|ctx| {
            let k = ctx.rows;
            (
                int_element(ctx),
                int_element(ctx),
                0..k,
                0..k,
                Just((0..k).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
    ) {
        let id = |x: &NilElement| x.identify_rows(i, j).unwrap();
        prop_assert_eq!(id(&(&a * &b)), &id(&a) * &id(&b));
        let pr = |x: &NilElement| x.permute_rows(&perm).unwrap();
        prop_assert_eq!(pr(&(&a * &b)), &pr(&a) * &pr(&b));
    }

    #[test]
    fn lift_respects_identities(
        (u, v, c1, c2) in context().prop_flat_map(|ctx| {
            (int_nilpotent(ctx), int_nilpotent(ctx), -8i32..=8, -8i32..=8)
        })
    ) {
        let ctx = u.context();
        let a = u.scale(0.25).add_constant(c1 as f64 / 4.0);
        let b = v.scale(0.25).add_constant(c2 as f64 / 4.0);
        let exp = |x: &NilElement| x.lift(Primitive::Exp).unwrap();
        let lhs = exp(&(&a + &b));
        let rhs = &exp(&a) * &exp(&b);
        prop_assert!(lhs.distance(&rhs) <= 1e-12 * lhs.max_abs().max(1.0), "{lhs} vs {rhs}");
        let s = a.lift(Primitive::Sin).unwrap();
        let c = a.lift(Primitive::Cos).unwrap();
        let one = &(&s * &s) + &(&c * &c);
        prop_assert!(one.distance(&NilElement::one(ctx)) <= 1e-12);
    }

    #[test]
    fn fresh_row_cancellation(a in int_element(Context::new(3, 4))) {
        // a does not involve row 2; if a·ξ_{2,b} = 0 for every b then a = 0
        let ctx = Context::new(3, 4);
        let a = a.zero_row(2).unwrap();
        let all_zero = (0..4).all(|b| (&a * &NilElement::generator(ctx, 2, b)).is_zero());
        prop_assert_eq!(all_zero, a.is_zero());
    }
}

#[test]
fn graded_dimensions() {
    for k in 0..=4 {
        for n in 1..=4 {
            let ctx = Context::new(k, n);
            for r in 0..=4 {
                assert_eq!(
                    monomials_of_degree(ctx, r).len(),
                    binom(k, r) * binom(n, r),
                    "W({k},{n}) degree {r}"
                );
            }
            let total: usize = (0..=4).map(|r| binom(k, r) * binom(n, r)).sum();
            assert_eq!(all_monomials(ctx).len(), total);
        }
    }
}

#[test]
fn zero_iff_all_coefficients_zero() {
    let ctx = Context::new(2, 2);
    let m = Monomial::from_sets(&[0, 1], &[0, 1]);
    let e = NilElement::from_terms(ctx, [(m, 1.0), (m, -1.0)]).unwrap();
    assert!(e.is_zero());
    assert_eq!(e.num_terms(), 0);
    assert!(!NilElement::monomial(ctx, m, 1e-300).is_zero());
}

#[test]
fn worked_examples() {
    let g = |r, c| Generator::new(r, c);
    assert_eq!(canonicalize(&[g(0, 0), g(0, 1)]), None);
    assert_eq!(
        canonicalize(&[g(0, 1), g(1, 0)]),
        Some((-1, Monomial::from_sets(&[0, 1], &[0, 1])))
    );
    assert_eq!(canonicalize(&[g(0, 0), g(1, 0)]), None);

    let ctx = Context::new(2, 2);
    let x = |r, c| NilElement::generator(ctx, r, c);
    let m = NilElement::monomial(ctx, Monomial::from_sets(&[0, 1], &[0, 1]), 1.0);
    assert_eq!(&x(0, 0) * &x(1, 1), m);
    let lhs = &x(0, 0).add_constant(1.0) * &x(1, 0).add_constant(1.0);
    assert_eq!(lhs, (x(0, 0) + x(1, 0)).add_constant(1.0));
    // four cross terms: +m, -m, 0, 0
    assert!((&(x(0, 0) + x(0, 1)) * &(x(1, 0) + x(1, 1))).is_zero());

    assert!((x(0, 0) + x(0, 0).scale(-1.0)).is_zero());
    let sum = x(0, 0).add_constant(1.0) + x(1, 1).add_constant(2.0);
    assert_eq!(sum, (x(0, 0) + x(1, 1)).add_constant(3.0));
    assert!(m.add_constant(4.0).scale(0.0).is_zero());

    // lifts
    let c = 0.3;
    let e = x(0, 0).add_constant(c).lift(Primitive::Exp).unwrap();
    assert!(e.approx_eq(&x(0, 0).add_constant(1.0).scale(c.exp()), 1e-15));
    let cos = (x(0, 0) + x(1, 1)).lift(Primitive::Cos).unwrap();
    assert_eq!(cos, m.scale(-1.0).add_constant(1.0));
    let r = x(0, 0).add_constant(1.0).lift(Primitive::Recip).unwrap();
    assert_eq!(r, x(0, 0).scale(-1.0).add_constant(1.0));
}
