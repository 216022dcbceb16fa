use serde::{Deserialize, Serialize};

use super::grid::SpaceTimeGrid;
use super::region::ParabolicCylinder;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffProfile {
    /// `ζ = ζ₁(x)`, independent of time.
    SpaceOnly,
    /// `ζ = ζ₁(x) ζ₂(t)` with `ζ₂` vanishing at the bottom of the cylinder.
    SpaceTime,
}

/// Piecewise-linear cutoff sampled on every node of a grid.
///
/// Spatially `ζ₁(x) = φ(‖x − y‖_∞)` with `φ = 1` on `K_{(1−σ)ρ}`, linear down
/// to `0` on `∂K_ρ`, and `0` outside. Its gradient has Euclidean length
/// exactly `2/(σρ)` on the ramp. For [`CutoffProfile::SpaceTime`], `ζ₂` ramps
/// from `0` at `s − θρ²` to `1` at `s − (1−σ)θρ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffField<T> {
    grid: SpaceTimeGrid<T>,
    region: ParabolicCylinder<T>,
    sigma: T,
    profile: CutoffProfile,
    values: Vec<T>,
    time_derivative: Vec<T>,
    space_gradient_bound: T,
    time_derivative_bound: T,
}

pub fn make_cutoff<T: Real>(
    grid: &SpaceTimeGrid<T>,
    region: &ParabolicCylinder<T>,
    sigma: T,
    profile: CutoffProfile,
) -> Result<CutoffField<T>> {
    if !(sigma > T::zero() && sigma < T::one()) {
        return Err(Error::invalid(format!("cutoff σ must lie in (0,1), got {sigma}")));
    }
    if grid.dim() != region.dim() {
        return Err(Error::invalid("cutoff region dimension does not match grid"));
    }
    let two = T::lit(2.0);
    let rho = region.radius();
    let outer = rho / two;
    let inner = (T::one() - sigma) * rho / two;
    let slope_x = two / (sigma * rho);
    let ramp_t = sigma * region.height();
    let slope_t = match profile {
        CutoffProfile::SpaceOnly => T::zero(),
        CutoffProfile::SpaceTime => T::one() / ramp_t,
    };
    let bottom = region.t_bottom();
    let y = &region.vertex().x;

    let nps = grid.nodes_per_slice();
    let mut spatial = vec![T::zero(); nps];
    let mut x = vec![T::zero(); grid.dim()];
    for (lin, z) in spatial.iter_mut().enumerate() {
        grid.point(lin, &mut x);
        let d = x.iter().zip(y).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max);
        *z = if d <= inner {
            T::one()
        } else if d >= outer {
            T::zero()
        } else {
            (outer - d) * slope_x
        };
    }

    let mut values = Vec::with_capacity(grid.node_count());
    let mut time_derivative = Vec::with_capacity(grid.node_count());
    for k in 0..grid.n_slices() {
        let (z2, dz2) = match profile {
            CutoffProfile::SpaceOnly => (T::one(), T::zero()),
            CutoffProfile::SpaceTime => {
                let s = grid.time(k) - bottom;
                if s <= T::zero() {
                    (T::zero(), T::zero())
                } else if s >= ramp_t {
                    (T::one(), T::zero())
                } else {
                    (s / ramp_t, slope_t)
                }
            }
        };
        for &z1 in &spatial {
            values.push(z1 * z2);
            time_derivative.push(z1 * dz2);
        }
    }

    Ok(CutoffField {
        grid: grid.clone(),
        region: region.clone(),
        sigma,
        profile,
        values,
        time_derivative,
        space_gradient_bound: slope_x,
        time_derivative_bound: slope_t,
    })
}

impl<T: Real> CutoffField<T> {
    pub fn grid(&self) -> &SpaceTimeGrid<T> {
        &self.grid
    }
    pub fn region(&self) -> &ParabolicCylinder<T> {
        &self.region
    }
    pub fn sigma(&self) -> T {
        self.sigma
    }
    pub fn profile(&self) -> CutoffProfile {
        self.profile
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn time_derivative(&self) -> &[T] {
        &self.time_derivative
    }
    pub fn space_gradient_bound(&self) -> T {
        self.space_gradient_bound
    }
    pub fn time_derivative_bound(&self) -> T {
        self.time_derivative_bound
    }
    pub fn is_time_independent(&self) -> bool {
        self.profile == CutoffProfile::SpaceOnly
    }
    #[inline]
    pub fn value(&self, slice: usize, lin: usize) -> T {
        self.values[self.grid.index(slice, lin)]
    }
}
