//! The guide in `book/` is plain markdown; mdbook cannot resolve workspace
//! dependencies in its listings, so each chapter is included here and its
//! code blocks run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/numerics.md")]
pub mod numerics {}

#[doc = include_str!("../../../book/src/correlator.md")]
pub mod correlator {}

#[doc = include_str!("../../../book/src/smearing.md")]
pub mod smearing {}

#[doc = include_str!("../../../book/src/potential.md")]
pub mod potential {}

#[doc = include_str!("../../../book/src/ground-state.md")]
pub mod ground_state {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
