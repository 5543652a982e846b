//! Scalar numerics shared across the crate: quadrature and root finding.

pub mod quadrature;
pub mod roots;

pub use quadrature::{integrate, integrate_to_infinity, Integral, QuadSettings};
pub use roots::{bisect, bisect_predicate, newton_bracketed};
