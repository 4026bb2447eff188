//! Spectral harmonic analysis on the Heisenberg group ℍ^d and a
//! Friedrichs–Galerkin solver for its incompressible sub-Riemannian
//! Navier–Stokes system.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod frequency;
pub mod hermite;
pub mod ops;
pub mod projection;
pub mod sample;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
