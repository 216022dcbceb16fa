//! Parabolic Hausdorff premeasures of finite space-time point sets.
//!
//! Covers use cylinders `(y, s) + Q_r` whose spatial cube has full side `r`
//! and whose height is `r²`. Any explicit cover bounds the premeasure from
//! above; the infimum itself is never claimed.

mod cover;
mod points;

pub use cover::{
    extract_so, parabolic_dimension, premeasure, premeasure_ladder, theta_at, CoverCylinder, CoverEstimate,
    CoverStrategy, DimensionEstimate,
};
pub use points::{BoundingBox, SpacetimePointSet};
