//! Combinatorics of the first neighbourhood of the diagonal.
//!
//! The crate models functions on infinitesimal simplices by the nilpotent
//! algebra W(k,n) ([`nilpotent`]), builds combinatorial differential forms on
//! top of it ([`forms`]), and uses those to test geometric distributions for
//! involutivity ([`distributions`]) and to compute curvature and holonomy of
//! principal connections ([`connections`]). Every combinatorial computation
//! has a classical counterpart in the same module for cross-checking.
//!
//! Inputs are usually written in a small text language, see [`dsl`].

pub mod chart;
pub mod connections;
pub mod corpus;
pub mod distributions;
pub mod dsl;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod nilpotent;
pub mod sampling;

pub use error::{Error, Result};
