//! Boundary-contact (Signorini) solver for the homogeneous, isotropic
//! Lamé system on the half-space.
//!
//! The vectorial contact problem is reduced to the scalar obstacle
//! problem for the half-Laplacian through the explicit
//! Dirichlet-to-Neumann map of the half-space Lamé extension, whose
//! symbol is `c·|ξ'|` with `c = 2μ(λ+μ)/(λ+2μ)`. The tangential
//! variables live on a periodic grid (a torus standing in for ℝ^{n-1}),
//! so every operator is a Fourier multiplier; decay at infinity is
//! emulated by pinning the solution to zero on a collar of the torus.
//!
//! Modules:
//! - [`params`]: Lamé constants and everything derived from them.
//! - [`grid`]: periodic tangential grids, nodal and spectral fields.
//! - [`spectral`]: DFT contract, frequency lattice, fractional Laplacians.
//! - [`halfspace`]: extension kernel, fundamental matrix, boundary traces,
//!   Dirichlet-to-Neumann operator.
//! - [`auxiliary`]: mixed linear problem (bulk force + tangential Neumann
//!   data, zero normal trace) via explicit coefficients and reflection.
//! - [`obstacle`]: scalar obstacle problem solver (projected gradient,
//!   accelerated variant, dense PSOR oracle).
//! - [`pipeline`]: end-to-end vectorial solve and the scalar↔vectorial
//!   embeddings, plus the cutoff (localization) algebra.
//! - [`oracle`]: independent finite-difference contact solver on a strip,
//!   used for cross-validation.
//! - [`analysis`]: free-boundary diagnostics (3/2-homogeneous reference
//!   profile, vanishing-order fits, contact-set density, classification).

pub mod analysis;
pub mod auxiliary;
pub mod error;
pub mod grid;
pub mod halfspace;
pub mod obstacle;
pub mod oracle;
pub mod params;
pub mod pipeline;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{DisplacementSlab, GridSpec, RealField, SpectralField};
pub use params::LameParams;
