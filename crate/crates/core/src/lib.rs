//! Enlarged-space simulation of kinematic transformations.
//!
//! A wavefunction `ψ` is split into components that are even and odd under a
//! coordinate map and stored as a spinor `Ψ` on an enlarged space (one
//! two-level factor per symmetry axis). Evolving `Ψ` unitarily and applying
//! local Pauli gates on the symmetry axes reproduces transformations such as
//! parities and Galilean boosts on the simulated wavefunction, including
//! transformations no causal evolution of `ψ` could implement.
//!
//! Module map:
//! - [`grid`]: periodic 1D/2D grids, complex fields, parity mirroring, spectral derivative.
//! - [`transforms`]: linear coordinate maps and the coefficients of the enlarged equation.
//! - [`encoding`]: even/odd splitting, enlarged states, axis gates, frame readout.
//! - [`evolvers`]: time evolution for every enlarged equation, plus dense oracles.
//! - [`observables`]: frame-resolved expectations, cross-frame correlations,
//!   the propagator protocol and self-correlations.
//! - [`spin`]: finite-dimensional spin operators and reproducible random instances.
//! - [`io`]: CSV/JSON serialization of fields and enlarged states.

pub mod encoding;
mod error;
pub mod evolvers;
pub mod grid;
pub mod io;
pub mod observables;
pub mod spin;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64;
