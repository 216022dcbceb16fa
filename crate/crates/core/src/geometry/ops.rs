//! Discrete measure, oscillation, gradient and quadrature primitives.
//!
//! "Essential" suprema and measures are replaced by exact node maxima and
//! node counts. Quadrature is the node-cell midpoint rule: a node inside the
//! region contributes one full cell `h^N · dt`.

use serde::{Deserialize, Serialize};

use super::field::{ScalarField, VectorField};
use super::grid::SpaceTimeGrid;
use super::region::{NodeBox, ParabolicCylinder};
use crate::error::Result;
use crate::scalar::Real;

/// Which side of a level `k` a level set collects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelSet {
    /// `u < k`
    Below,
    /// `u ≤ k`
    AtOrBelow,
    /// `u > k`
    Above,
    /// `u ≥ k`
    AtOrAbove,
}

impl LevelSet {
    #[inline]
    pub fn holds<T: Real>(self, u: T, k: T) -> bool {
        match self {
            LevelSet::Below => u < k,
            LevelSet::AtOrBelow => u <= k,
            LevelSet::Above => u > k,
            LevelSet::AtOrAbove => u >= k,
        }
    }
}

/// Calls `f(slice, lin)` for every node of the block, slice-major.
pub(crate) fn for_each_node<T: Real>(grid: &SpaceTimeGrid<T>, nb: &NodeBox, mut f: impl FnMut(usize, usize)) {
    let spatial = nb.spatial_indices(grid);
    for k in nb.slices() {
        for &lin in &spatial {
            f(k, lin);
        }
    }
}

/// Minimum and maximum of the field over the nodes of `region`.
pub fn min_max<T: Real>(field: &ScalarField<T>, region: &ParabolicCylinder<T>) -> Result<(T, T)> {
    let nb = region.nodes_in(field.grid())?;
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for_each_node(field.grid(), &nb, |k, lin| {
        let v = field.value(k, lin);
        lo = lo.min(v);
        hi = hi.max(v);
    });
    Ok((lo, hi))
}

/// Discrete `ess osc`: max − min over the nodes inside `region`.
pub fn essosc<T: Real>(field: &ScalarField<T>, region: &ParabolicCylinder<T>) -> Result<T> {
    let (lo, hi) = min_max(field, region)?;
    Ok(hi - lo)
}

/// Measure of `{u ⋚ k} ∩ region`: qualifying node count × cell volume.
pub fn level_measure<T: Real>(
    field: &ScalarField<T>,
    region: &ParabolicCylinder<T>,
    k: T,
    direction: LevelSet,
) -> Result<T> {
    let nb = region.nodes_in(field.grid())?;
    let mut count = 0usize;
    for_each_node(field.grid(), &nb, |s, lin| {
        if direction.holds(field.value(s, lin), k) {
            count += 1;
        }
    });
    Ok(T::from_count(count) * field.grid().cell_volume())
}

/// Discrete measure of the region (node count × cell volume).
pub fn region_measure<T: Real>(grid: &SpaceTimeGrid<T>, region: &ParabolicCylinder<T>) -> Result<T> {
    Ok(region.nodes_in(grid)?.measure(grid))
}

/// Second-order spatial gradient of a nodal function.
///
/// Central differences in the interior; one-sided three-point differences on
/// the boundary faces.
pub fn gradient<T: Real>(grid: &SpaceTimeGrid<T>, values: &[T]) -> VectorField<T> {
    assert_eq!(values.len(), grid.node_count());
    let dim = grid.dim();
    let n = grid.nodes_per_axis();
    let nps = grid.nodes_per_slice();
    let inv2h = T::one() / (T::lit(2.0) * grid.h());
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let mut data = vec![T::zero(); grid.node_count() * dim];
    let mut idx = vec![0usize; dim];
    for k in 0..grid.n_slices() {
        let f = &values[k * nps..(k + 1) * nps];
        for lin in 0..nps {
            grid.multi_index(lin, &mut idx);
            let out = &mut data[(k * nps + lin) * dim..(k * nps + lin + 1) * dim];
            for (a, o) in out.iter_mut().enumerate() {
                let s = grid.stride(a);
                let i = idx[a];
                *o = if i == 0 {
                    (-three * f[lin] + four * f[lin + s] - f[lin + 2 * s]) * inv2h
                } else if i == n - 1 {
                    (three * f[lin] - four * f[lin - s] + f[lin - 2 * s]) * inv2h
                } else {
                    (f[lin + s] - f[lin - s]) * inv2h
                };
            }
        }
    }
    VectorField::new(grid.clone(), data, 0).expect("gradient length matches grid")
}

/// Spatial gradient of `ln u`; values below the field's floor are clamped
/// and counted.
pub fn grad_log<T: Real>(field: &ScalarField<T>) -> VectorField<T> {
    let eps = field.eps_floor();
    let mut clamped = 0usize;
    let logs: Vec<T> = field
        .values()
        .iter()
        .map(|&v| {
            if v < eps {
                clamped += 1;
                eps.ln()
            } else {
                v.ln()
            }
        })
        .collect();
    let g = gradient(field.grid(), &logs);
    VectorField::new(g.grid().clone(), g.data().to_vec(), clamped).expect("same layout")
}

fn power_sum<T: Real>(g: &VectorField<T>, nb: &NodeBox, p: T) -> T {
    let mut acc = T::zero();
    for_each_node(g.grid(), nb, |k, lin| {
        acc = acc + g.norm(k, lin).powf(p);
    });
    acc
}

/// Average of `|g|^p` over the region, normalised by the region's discrete
/// measure.
pub fn cylinder_power_average<T: Real>(g: &VectorField<T>, region: &ParabolicCylinder<T>, p: T) -> Result<T> {
    if !(p >= T::one()) {
        return Err(crate::Error::invalid(format!("power p must be at least 1, got {p}")));
    }
    let nb = region.nodes_in(g.grid())?;
    Ok(power_sum(g, &nb, p) / T::from_count(nb.count()))
}

/// `∬ |g|^p` over the region: the midpoint average rescaled to the exact
/// cylinder volume `θρ^{N+2}`.
pub fn cylinder_integral<T: Real>(g: &VectorField<T>, region: &ParabolicCylinder<T>, p: T) -> Result<T> {
    Ok(cylinder_power_average(g, region, p)? * region.volume())
}
