//! Pseudospectral laboratory for the energy-critical Maxwell-Klein-Gordon
//! system in Coulomb gauge on a periodic 4-torus.
//!
//! The crate provides the Fourier-multiplier calculus (dyadic shells,
//! modulation localizers, sector covers, Leray projection, guarded wave
//! inverse), the MKG-CG state geometry (covariant derivatives, curvature,
//! currents, energy, gauge transformations), exact and finite-difference
//! wave solvers, the Picard iteration with convergence diagnostics, the
//! null-form and trilinear identity machinery, the sector-quantized
//! pseudodifferential parametrix with its numerical probes, and computable
//! space-time norm proxies.
//!
//! Operator conventions are collected in `docs/conventions.md` at the
//! repository root and certified by the test suite.

pub mod config;
pub mod data;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod model;
pub mod norms;
pub mod nullforms;
pub mod parametrix;
pub mod picard;
pub mod sectors;
pub mod snapshot;
pub mod solvers;
pub mod spectral;

pub use error::{MkgError, Result};
pub use field::{Parity, SpacetimeField, SpacetimeSpectrum, SpatialField, SpatialSpectrum};
pub use grid::{GridSpec, Taper, DIM};
pub use spectral::MultiplierBank;
