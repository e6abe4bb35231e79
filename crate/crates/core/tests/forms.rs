use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdg_core::chart::{generic_simplex, Point};
use sdg_core::corpus::random_form;
use sdg_core::dsl::ScalarExpr;
use sdg_core::forms::conventions::{compare_d, compare_wedge, RatioStats};
use sdg_core::forms::{ClassicalForm, CombinatorialForm, Multicovector};
use sdg_core::nilpotent::NilElement;

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Point {
    Point::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Every permutation of `0..k` with its sign.
fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    if k == 0 {
        return vec![(vec![], 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// Degenerate values vanish exactly, rows alternate exactly.
fn assert_form_axioms(value: &NilElement) {
    let k = value.context().rows;
    for i in 0..k {
        assert!(
            value.zero_row(i).unwrap().is_zero(),
            "row {i} zeroed: {value}"
        );
        for j in 0..k {
            if i != j {
                assert!(value.identify_rows(i, j).unwrap().is_zero());
            }
        }
    }
    for (sigma, sign) in permutations(k) {
        assert_eq!(value.permute_rows(&sigma).unwrap(), value.scale(sign));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn constructed_forms_vanish_on_degenerate_simplices(seed in any::<u64>(), n in 1usize..=4, p in 0usize..=2) {
        prop_assume!(p <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&mut rng, n, p, true);
        let x = random_point(&mut rng, n);
        let theta = CombinatorialForm::from_classical(&f);
        assert_form_axioms(&theta.eval_generic(&x).unwrap());
        // wedge with a second form, total degree up to 4
        let q = rng.gen_range(0..=2.min(n - p));
        let g = random_form(&mut rng, n, q, true);
        let w = theta.wedge(&CombinatorialForm::from_classical(&g)).unwrap();
        assert_form_axioms(&w.eval_generic(&x).unwrap());
    }

    #[test]
    fn swapping_the_base_vertex_flips_sign(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&mut rng, n, 1, true);
        let theta = CombinatorialForm::from_classical(&f);
        let x = random_point(&mut rng, n);
        let s = generic_simplex(&x, 1);
        let fwd = theta.eval(&[s[0].clone(), s[1].clone()]).unwrap();
        let back = theta.eval(&[s[1].clone(), s[0].clone()]).unwrap();
        prop_assert!((&fwd + &back).max_abs() <= 1e-12, "{fwd} vs {back}");
    }

    #[test]
    fn d_squared_is_zero(seed in any::<u64>(), n in 2usize..=4, p in 0usize..=2) {
        prop_assume!(p + 2 <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&mut rng, n, p, true);
        let x = random_point(&mut rng, n);
        let dd = CombinatorialForm::from_classical(&f).d().d();
        prop_assert!(dd.extract_classical(&x, 1e-9).unwrap().max_abs() <= 1e-9);
        prop_assert!(dd.eval_generic(&x).unwrap().max_abs() <= 1e-9);
    }

    #[test]
    fn extraction_round_trip(seed in any::<u64>(), n in 1usize..=4, p in 0usize..=2) {
        prop_assume!(p <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&mut rng, n, p, true);
        let x = random_point(&mut rng, n);
        let theta = CombinatorialForm::from_classical(&f);
        let back = theta.extract_classical(&x, 1e-12).unwrap();
        prop_assert!(back.distance(&f.at(&x).unwrap()).unwrap() <= 1e-12);
        // the extraction determines the generic value
        let rebuilt = CombinatorialForm::from_multicovector(&back).unwrap();
        let a = theta.eval_generic(&x).unwrap();
        let b = rebuilt.eval_generic(&x).unwrap();
        prop_assert!(a.distance(&b) <= 1e-12 * a.max_abs().max(1.0));
    }

    #[test]
    fn graded_commutativity(seed in any::<u64>(), n in 2usize..=4, k in 0usize..=2, l in 0usize..=2) {
        prop_assume!(k + l <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = CombinatorialForm::from_classical(&random_form(&mut rng, n, k, true));
        let b = CombinatorialForm::from_classical(&random_form(&mut rng, n, l, true));
        let x = random_point(&mut rng, n);
        let ab = a.wedge(&b).unwrap().extract_classical(&x, 1e-9).unwrap();
        let ba = b.wedge(&a).unwrap().extract_classical(&x, 1e-9).unwrap();
        let sign = if (k * l) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(ab.distance(&ba.scale(sign)).unwrap() <= 1e-12 * ab.max_abs().max(1.0));
    }

    #[test]
    fn one_form_wedge_itself_vanishes(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = CombinatorialForm::from_classical(&random_form(&mut rng, n, 1, true));
        let x = random_point(&mut rng, n);
        let ww = w.wedge(&w).unwrap().extract_classical(&x, 1e-9).unwrap();
        prop_assert!(ww.max_abs() <= 1e-12);
    }

    #[test]
    fn semi_values_alternate(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = CombinatorialForm::from_classical(&random_form(&mut rng, n, 2, true));
        let x = random_point(&mut rng, n);
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let uv = theta.eval_semi(&x, &u, &v, 1e-9).unwrap();
        let vu = theta.eval_semi(&x, &v, &u, 1e-9).unwrap();
        prop_assert!((uv + vu).abs() <= 1e-12);
        prop_assert_eq!(theta.eval_semi(&x, &vec![0.0; n], &v, 1e-9).unwrap(), 0.0);
    }
}

fn kappa(p: usize, count: usize) -> RatioStats {
    let mut rng = ChaCha8Rng::seed_from_u64(100 + p as u64);
    let mut stats = RatioStats::new();
    for i in 0..count {
        let n = [3, 4][i % 2];
        let f = random_form(&mut rng, n, p, i % 3 != 0);
        let x = random_point(&mut rng, n);
        let (comb, class) = compare_d(&f, &x, 1e-9).unwrap();
        stats.record(&comb, &class, 1e-9);
    }
    stats
}

fn mu(k: usize, l: usize, count: usize) -> RatioStats {
    let mut rng = ChaCha8Rng::seed_from_u64(200 + (10 * k + l) as u64);
    let mut stats = RatioStats::new();
    for i in 0..count {
        let n = 4;
        let a = random_form(&mut rng, n, k, i % 3 != 0);
        let b = random_form(&mut rng, n, l, i % 2 != 0);
        let x = random_point(&mut rng, n);
        let (comb, class) = compare_wedge(&a, &b, &x, 1e-9).unwrap();
        stats.record(&comb, &class, 1e-9);
    }
    stats
}

#[test]
fn kappa_is_constant() {
    for p in 0..=2 {
        let s = kappa(p, 100);
        assert!(s.zero_agreement && s.counterexamples == 0, "p={p}: {s:?}");
        assert!(s.ratios.len() >= 50, "p={p}: too few nonzero samples");
        assert!(s.std() <= 1e-9, "p={p}: std {}", s.std());
        // oracle: 1/(p+1)
        assert!(
            (s.mean() - 1.0 / (p as f64 + 1.0)).abs() <= 1e-9,
            "p={p}: {}",
            s.mean()
        );
    }
}

#[test]
fn mu_is_constant() {
    for (k, l) in [(0, 1), (1, 0), (1, 1), (0, 2), (1, 2), (2, 1), (2, 2)] {
        let s = mu(k, l, 100);
        assert!(
            s.zero_agreement && s.counterexamples == 0,
            "({k},{l}): {s:?}"
        );
        assert!(s.std() <= 1e-9, "({k},{l}): std {}", s.std());
        let expected = factorial(k) * factorial(l) / factorial(k + l);
        assert!(
            (s.mean() - expected).abs() <= 1e-9,
            "({k},{l}): {}",
            s.mean()
        );
    }
}

#[test]
fn closed_forms_have_zero_combinatorial_d() {
    // d(f dg) with f = g: d(g dg) = 0
    let g = ScalarExpr::mul(ScalarExpr::var(0), ScalarExpr::var(1));
    let dg = ClassicalForm::scalar(3, g.clone()).exterior_derivative();
    let w = dg.mul_scalar(&g);
    let x = Point::new(vec![0.3, -0.7, 0.2]).unwrap();
    let (comb, class) = compare_d(&w, &x, 1e-9).unwrap();
    assert!(class.max_abs() <= 1e-12);
    assert!(comb.max_abs() <= 1e-12);
}

#[test]
fn worked_values() {
    let x = Point::new(vec![2.0, 5.0]).unwrap();
    let dx = |i| ClassicalForm::differential(2, i).unwrap();
    let t = CombinatorialForm::from_classical(&dx(0).wedge(&dx(1)).unwrap());
    assert_eq!(
        t.extract_classical(&x, 1e-12).unwrap(),
        Multicovector::from_coefficients(2, 2, [(vec![0, 1], 1.0)]).unwrap()
    );
    assert_eq!(
        t.eval_semi(&x, &[1.0, 0.0], &[0.0, 1.0], 1e-12).unwrap(),
        1.0
    );
    // wedge with the constant 0-form 1
    let one = CombinatorialForm::from_classical(&ClassicalForm::scalar(2, ScalarExpr::Const(1.0)));
    let w = CombinatorialForm::from_classical(&dx(1).mul_scalar(&ScalarExpr::var(0)));
    assert_eq!(
        one.wedge(&w).unwrap().eval_generic(&x).unwrap(),
        w.eval_generic(&x).unwrap()
    );
    assert_eq!(
        w.wedge(&one).unwrap().eval_generic(&x).unwrap(),
        w.eval_generic(&x).unwrap()
    );
    // zero form
    let z = CombinatorialForm::zero(2, 1);
    assert!(z.eval_generic(&x).unwrap().is_zero());
    assert_eq!(z.extract_classical(&x, 1e-12).unwrap().max_abs(), 0.0);
    // d(dx) = 0
    assert!(CombinatorialForm::from_classical(&dx(0))
        .d()
        .eval_generic(&x)
        .unwrap()
        .is_zero());
}

#[test]
fn classical_d_examples() {
    let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let dx = |i| ClassicalForm::differential(3, i).unwrap();
    let w = dx(2).sub(&dx(0).mul_scalar(&ScalarExpr::var(1))).unwrap();
    let dw = w.exterior_derivative();
    let at = dw.at(&Point::new(vec![0.1, 0.2, 0.3]).unwrap()).unwrap();
    assert_eq!(
        at,
        Multicovector::from_coefficients(3, 2, [(vec![0, 1], 1.0)]).unwrap()
    );
    assert_eq!(dw.display(&names).to_string(), "dx^dy");
    let v = dx(1).mul_scalar(&ScalarExpr::var(0));
    assert_eq!(v.exterior_derivative().display(&names).to_string(), "dx^dy");
}
