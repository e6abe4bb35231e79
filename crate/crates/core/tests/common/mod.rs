#![allow(dead_code)]

use proptest::prelude::*;
use sdg_core::nilpotent::{monomials_of_degree, Context, Monomial, NilElement};

pub fn all_monomials(ctx: Context) -> Vec<Monomial> {
    (0..=ctx.max_degree())
        .flat_map(|r| monomials_of_degree(ctx, r))
        .collect()
}

/// Elements with small-integer coefficients, so ring laws hold exactly.
pub fn int_element(ctx: Context) -> impl Strategy<Value = NilElement> {
    let monos = all_monomials(ctx);
    let len = monos.len();
    proptest::collection::vec((0..len, -4i32..=4), 0..8).prop_map(move |terms| {
        NilElement::from_terms(ctx, terms.into_iter().map(|(i, c)| (monos[i], c as f64))).unwrap()
    })
}

/// Like [`int_element`] with zero constant term.
pub fn int_nilpotent(ctx: Context) -> impl Strategy<Value = NilElement> {
    int_element(ctx).prop_map(|e| e.nilpotent_part())
}

pub fn context() -> impl Strategy<Value = Context> {
    (1usize..=4, 1usize..=4).prop_map(|(k, n)| Context::new(k, n))
}
