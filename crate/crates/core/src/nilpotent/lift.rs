use super::{Context, NilElement};
use crate::error::{Error, Result};

/// Smooth univariate primitives that extend to nilpotent arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    /// Real power `c^p`.
    Power(f64),
    Recip,
}

impl Primitive {
    pub fn name(&self) -> &'static str {
        match self {
            Primitive::Sin => "sin",
            Primitive::Cos => "cos",
            Primitive::Exp => "exp",
            Primitive::Ln => "ln",
            Primitive::Sqrt => "sqrt",
            Primitive::Power(_) => "pow",
            Primitive::Recip => "recip",
        }
    }

    fn check_domain(&self, c: f64) -> Result<()> {
        let ok = match self {
            Primitive::Ln => c > 0.0,
            Primitive::Sqrt => c > 0.0,
            Primitive::Recip => c != 0.0,
            Primitive::Power(p) => c > 0.0 || (p.fract() == 0.0 && (c != 0.0 || *p >= 0.0)),
            _ => true,
        };
        if ok && c.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("{} at {c}", self.name())))
        }
    }

    /// Real evaluation.
    pub fn apply(&self, c: f64) -> Result<f64> {
        self.check_domain(c)?;
        Ok(self.derivatives(c, 0)[0])
    }

    /// `f(c), f'(c), …, f⁽ᵒʳᵈᵉʳ⁾(c)`.
    fn derivatives(&self, c: f64, order: usize) -> Vec<f64> {
        (0..=order)
            .map(|r| match self {
                Primitive::Sin => [c.sin(), c.cos(), -c.sin(), -c.cos()][r % 4],
                Primitive::Cos => [c.cos(), -c.sin(), -c.cos(), c.sin()][r % 4],
                Primitive::Exp => c.exp(),
                Primitive::Ln => {
                    if r == 0 {
                        c.ln()
                    } else {
                        let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
                        sign * factorial(r - 1) / c.powi(r as i32)
                    }
                }
                Primitive::Sqrt => falling(0.5, r) * c.powf(0.5 - r as f64),
                Primitive::Power(p) => {
                    let f = falling(*p, r);
                    if f == 0.0 {
                        0.0
                    } else if p.fract() == 0.0 {
                        f * c.powi(*p as i32 - r as i32)
                    } else {
                        f * c.powf(p - r as f64)
                    }
                }
                Primitive::Recip => {
                    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                    sign * factorial(r) / c.powi(r as i32 + 1)
                }
            })
            .collect()
    }
}

fn factorial(r: usize) -> f64 {
    (1..=r).fold(1.0, |acc, i| acc * i as f64)
}

/// p(p-1)…(p-r+1)
fn falling(p: f64, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (p - i as f64))
}

impl NilElement {
    /// Extends `f` to `self = c + u` with `u` nilpotent:
    /// `Σ_{r ≤ min(k,n)} f⁽ʳ⁾(c)/r! · uʳ`, exact because higher powers vanish.
    pub fn lift(&self, f: Primitive) -> Result<NilElement> {
        let c = self.constant_term();
        f.check_domain(c)?;
        let ctx: Context = self.context();
        let u = self.nilpotent_part();
        if u.is_zero() {
            return Ok(NilElement::constant(ctx, f.apply(c)?));
        }
        let order = ctx.max_degree();
        let derivs = f.derivatives(c, order);
        // Horner in u
        let mut acc = NilElement::constant(ctx, derivs[order] / factorial(order));
        for r in (0..order).rev() {
            acc = (&acc * &u).add_constant(derivs[r] / factorial(r));
        }
        Ok(acc)
    }
}
