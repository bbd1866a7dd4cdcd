//! Small numerical kernels: adaptive quadrature and 1-D maximization.

pub mod golden;
pub mod quadrature;

pub use golden::{golden_section_max, Maximum};
pub use quadrature::{integrate, Integral};
