//! Exact symbolic engine for the rational H4 Calogero–Moser model.

pub mod coxeter;
pub mod error;
pub mod invariants;
pub mod model;
pub mod modular;
pub mod operator;
pub mod pipeline;
pub mod poly;
pub mod reference;
pub mod rootrational;
pub mod scalar;
pub mod special;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use poly::{Context, Monomial, Polynomial};
pub use scalar::{ExactScalar, Rational};
