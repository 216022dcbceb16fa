//! Space-time grids, cubes, intrinsic cylinders, sampled fields, and the
//! measure / oscillation / quadrature primitives the other modules consume.

mod cutoff;
mod field;
mod grid;
mod ops;
mod region;

pub use cutoff::{make_cutoff, CutoffField, CutoffProfile};
pub use field::{ScalarField, VectorField, DEFAULT_EPS_FLOOR};
pub use grid::SpaceTimeGrid;
pub use ops::{
    cylinder_integral, cylinder_power_average, essosc, grad_log, gradient, level_measure, min_max, region_measure,
    LevelSet,
};
pub use region::{make_cylinder, Cube, NodeBox, ParabolicCylinder, SpacetimePoint};
