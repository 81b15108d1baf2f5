//! Time evolution of a plane wave switched on against a square barrier,
//! written as a sum over the barrier's resonance poles and checked against
//! numerical Laplace inversion.
//!
//! Start from [`barrier::find_resonances`], build a [`laplace::ResonanceSet`]
//! for the incident momentum and evaluate [`evolution::psi_t`]; the
//! `examples/` directory walks through each piece.

pub mod barrier;
pub mod cli;
pub mod cxmath;
pub mod error;
pub mod evolution;
pub mod greenfn;
pub mod laplace;
pub mod oracle;
pub mod quad;
pub mod stationary;
