//! Numerical laboratory for the singular logarithmic diffusion equation
//! `u_t = Δ ln u`.
//!
//! The crate provides
//! - [`geometry`]: space-time grids, intrinsic cylinders `Q_ρ(θ)`, sampled
//!   fields and the discrete measure/oscillation/quadrature primitives;
//! - [`explicit`]: the closed-form extinction solutions used as oracles;
//! - [`solver`]: a backward-Euler / Newton finite-difference integrator;
//! - [`diagnostics`]: the continuity indicator `I_{p,ρ}`, oscillation curves,
//!   the modulus-of-continuity bound and energy-inequality audits;
//! - [`degiorgi`]: De Giorgi lemma constants, fast geometric convergence,
//!   the oscillation recursion and empirical lemma checkers;
//! - [`hausdorff`]: parabolic covering premeasures and extraction of the
//!   candidate discontinuity set;
//! - [`snapshot`] and [`report`]: on-disk formats.
//!
//! All numerics are generic over [`Real`]; the aliases below fix `f64`.

// `!(x > 0)` guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod degiorgi;
pub mod diagnostics;
pub mod error;
pub mod explicit;
pub mod geometry;
pub mod hausdorff;
pub mod report;
pub mod scalar;
pub mod snapshot;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Real;

/// Crate version, recorded in report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Grid = geometry::SpaceTimeGrid<f64>;
pub type Field = geometry::ScalarField<f64>;
pub type GradientField = geometry::VectorField<f64>;
pub type Cylinder = geometry::ParabolicCylinder<f64>;
pub type Point = geometry::SpacetimePoint<f64>;
pub type Cutoff = geometry::CutoffField<f64>;
pub type Explicit = explicit::ExplicitSolution<f64>;
pub type Constants = degiorgi::DeGiorgiConstants<f64>;
pub type PointSet = hausdorff::SpacetimePointSet<f64>;

pub type Field32 = geometry::ScalarField<f32>;
pub type Grid32 = geometry::SpaceTimeGrid<f32>;
