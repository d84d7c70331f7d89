//! Effective classical potential of the Coulomb interaction and variational
//! ground-state energies of the Coulomb system.
//!
//! Modules build on each other: [`numerics`] → [`correlator`] →
//! [`smearing`] → [`coulomb`] → [`groundstate`]; [`selfcheck`] collects the
//! numerical invariants of all of them.

// Comparisons are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlator;
pub mod coulomb;
pub mod groundstate;
pub mod numerics;
pub mod selfcheck;
pub mod smearing;

/// Version of the numerical engine.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
