pub mod analysis;
pub mod field;
pub mod hausdorff;
pub mod lemma;

use std::path::Path;

use anyhow::{ensure, Context};

use logdiff::snapshot::read_snapshot;
use logdiff::{Field, Point};

pub fn load_field(path: &Path) -> anyhow::Result<Field> {
    read_snapshot(path).with_context(|| format!("reading snapshot {}", path.display()))
}

pub fn check_vertex(field: &Field, vertex: &Point) -> anyhow::Result<()> {
    ensure!(
        vertex.dim() == field.grid().dim(),
        logdiff::Error::InvalidArgument(format!(
            "vertex has {} coordinates but the field is {}-dimensional",
            vertex.dim(),
            field.grid().dim()
        ))
    );
    Ok(())
}

/// Geometric ladder `r0·2^{-k}`, validated.
pub fn ladder(r0: f64, levels: usize) -> anyhow::Result<Vec<f64>> {
    ensure!(
        r0 > 0.0 && r0.is_finite(),
        logdiff::Error::InvalidArgument(format!("r0 must be positive, got {r0}"))
    );
    ensure!(
        levels > 0,
        logdiff::Error::InvalidArgument("levels must be positive".into())
    );
    Ok(logdiff::diagnostics::geometric_radii(r0, levels))
}

/// Splits radii into those whose standard cylinder fits the grid and the rest.
pub fn fitting_radii(field: &Field, vertex: &Point, radii: &[f64], theta: f64) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for &r in radii {
        let q = logdiff::Cylinder::new(vertex.clone(), r, theta)?;
        if q.fits_in(field.grid()) {
            inside.push(r);
        } else {
            outside.push(r);
        }
    }
    Ok((inside, outside))
}
