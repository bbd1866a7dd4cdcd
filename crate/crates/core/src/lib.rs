//! Weak-measurement-assisted entanglement distribution over amplitude-damping
//! channels.
//!
//! [`qstate`] is a small exact density-matrix engine; [`channels`] builds the
//! noise and filter primitives; [`bell`] and [`multipartite`] hold the closed
//! forms for two-, three- and N-party distribution; [`oracle`] replays every
//! protocol step on explicit matrices and compares; [`sweep`] drives grids.

pub mod bell;
pub mod channels;
pub mod error;
pub mod multipartite;
pub mod numeric;
pub mod oracle;
pub mod qstate;
pub mod sweep;

pub use error::{Error, Result};
