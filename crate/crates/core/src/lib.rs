//! Fisher-information toolkit for distributed displacement sensing on
//! passive linear-optical networks.
//!
//! A single-mode squeezed vacuum carrying N̄ = n̄M photons enters one port of
//! an M-mode beam-splitter network U; every output mode then picks up the
//! same unknown displacement x along the x-quadrature. This crate provides
//!
//! * exact Gaussian-state propagation (means and covariances) through
//!   networks, local phase shifts, displacement encoding, and uniform photon
//!   loss ([`gaussian`]),
//! * the closed-form quantum Fisher information of that probe family and its
//!   bounds, with and without loss ([`qfi`]),
//! * Haar-random unitary sampling and matrix diagnostics ([`unitary`]),
//! * reproducible parallel Monte Carlo ensembles: Haar averages, tail
//!   fractions, scaling sweeps ([`ensemble`]),
//! * brickwork circuits of local Haar-random beam splitters and depth sweeps
//!   ([`brickwork`]).
//!
//! Conventions, used everywhere without exception: x̂ = (â + â†)/√2,
//! p̂ = (â − â†)/(i√2), vacuum variance 1/2; quadrature vectors are ordered
//! (x₁ … x_M, p₁ … p_M); mode and column indices are 0-based in code.

pub mod brickwork;
pub mod ensemble;
pub mod error;
pub mod gaussian;
pub mod qfi;
pub mod rng;
pub mod unitary;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, LossSpec, PhaseVector, SqueezingSpec};
pub use rng::RngStream;
pub use unitary::{ComplexMatrix, UnitaryMatrix};
