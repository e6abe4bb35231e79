//! Classical forms with closed-form coefficients, combinatorial forms on
//! infinitesimal simplices, and the comparison between the two.
//!
//! A classical p-form becomes combinatorial through
//! `θ(x_0,…,x_p) = θ̄(log(x_0,x_1),…,log(x_0,x_p))`. Extraction reads the top
//! coefficients of the generic value and divides by `p!`, so that the round
//! trip is the identity. The simplicial `d` and the cup-product wedge then
//! agree with the classical operations up to constants measured in
//! [`conventions`].

mod classical;
mod combinatorial;
pub mod conventions;
mod multicovector;

pub use classical::{ClassicalForm, FormDisplay};
pub use combinatorial::{coefficients_from_value, top_monomial, CombinatorialForm};
pub use conventions::{ConventionConstants, RatioStats};
pub use multicovector::{index_tuples, Multicovector};

/// Largest degree and dimension accepted by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormLimits {
    pub max_degree: usize,
    pub max_dim: usize,
}

impl Default for FormLimits {
    fn default() -> Self {
        FormLimits {
            max_degree: 4,
            max_dim: 6,
        }
    }
}

impl FormLimits {
    pub fn check(&self, degree: usize, dim: usize) -> crate::Result<()> {
        if degree > self.max_degree || dim > self.max_dim {
            Err(crate::Error::Invalid(format!(
                "degree {degree} in dimension {dim} exceeds the limits ({}, {})",
                self.max_degree, self.max_dim
            )))
        } else {
            Ok(())
        }
    }
}
