use serde::{Deserialize, Serialize};

use super::grid::SpaceTimeGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point `(x, t)` of space-time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint<T> {
    pub x: Vec<T>,
    pub t: T,
}

impl<T: Real> SpacetimePoint<T> {
    pub fn new(x: Vec<T>, t: T) -> Self {
        Self { x, t }
    }

    pub fn origin(dim: usize) -> Self {
        Self::new(vec![T::zero(); dim], T::zero())
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Cube `K_ρ(y)` of side length `ρ` centred at `y`.
///
/// Grid nodes on the closed cube count as inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cube<T> {
    center: Vec<T>,
    side: T,
}

impl<T: Real> Cube<T> {
    pub fn new(center: Vec<T>, side: T) -> Result<Self> {
        if !(side > T::zero()) {
            return Err(Error::invalid(format!("cube side must be positive, got {side}")));
        }
        Ok(Self { center, side })
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn side(&self) -> T {
        self.side
    }

    pub fn half_width(&self) -> T {
        self.side / T::lit(2.0)
    }

    pub fn contains(&self, x: &[T]) -> bool {
        let w = self.half_width();
        self.center.iter().zip(x).all(|(&c, &xi)| (xi - c).abs() <= w)
    }

    pub fn volume(&self) -> T {
        self.side.powi(self.center.len() as i32)
    }
}

/// Intrinsic cylinder `(y,s) + Q_ρ(θ) = K_ρ(y) × (s − θρ², s]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicCylinder<T> {
    vertex: SpacetimePoint<T>,
    radius: T,
    theta: T,
}

/// Builds `(y,s) + Q_ρ(θ)`; fails unless `ρ > 0` and `θ > 0`.
pub fn make_cylinder<T: Real>(vertex: SpacetimePoint<T>, radius: T, theta: T) -> Result<ParabolicCylinder<T>> {
    ParabolicCylinder::new(vertex, radius, theta)
}

impl<T: Real> ParabolicCylinder<T> {
    pub fn new(vertex: SpacetimePoint<T>, radius: T, theta: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::invalid(format!(
                "cylinder radius must be positive, got {radius}"
            )));
        }
        if !(theta > T::zero()) || !theta.is_finite() {
            return Err(Error::invalid(format!(
                "cylinder scaling θ must be positive, got {theta}"
            )));
        }
        Ok(Self { vertex, radius, theta })
    }

    /// The standard cylinder `Q_ρ = Q_ρ(1)`.
    pub fn standard(vertex: SpacetimePoint<T>, radius: T) -> Result<Self> {
        Self::new(vertex, radius, T::one())
    }

    pub fn vertex(&self) -> &SpacetimePoint<T> {
        &self.vertex
    }
    pub fn radius(&self) -> T {
        self.radius
    }
    pub fn theta(&self) -> T {
        self.theta
    }
    pub fn dim(&self) -> usize {
        self.vertex.dim()
    }

    pub fn cube(&self) -> Cube<T> {
        Cube {
            center: self.vertex.x.clone(),
            side: self.radius,
        }
    }

    /// Time height `θρ²`.
    pub fn height(&self) -> T {
        self.theta * self.radius * self.radius
    }

    /// Excluded lower time bound `s − θρ²`.
    pub fn t_bottom(&self) -> T {
        self.vertex.t - self.height()
    }

    /// `θ ρ^{N+2}`.
    pub fn volume(&self) -> T {
        self.theta * self.radius.powi(self.dim() as i32 + 2)
    }

    pub fn contains(&self, x: &[T], t: T) -> bool {
        t > self.t_bottom() && t <= self.vertex.t && self.cube().contains(x)
    }

    /// Set inclusion of the continuum cylinders.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        let w = self.radius / T::lit(2.0);
        let wo = other.radius / T::lit(2.0);
        let spatial = self
            .vertex
            .x
            .iter()
            .zip(&other.vertex.x)
            .all(|(&a, &b)| (a - b).abs() + w <= wo);
        spatial && self.vertex.t <= other.vertex.t && self.t_bottom() >= other.t_bottom()
    }

    /// Same vertex, different radius.
    pub fn with_radius(&self, radius: T) -> Result<Self> {
        Self::new(self.vertex.clone(), radius, self.theta)
    }

    /// True if the closed spatial cube and `[s − θρ², s]` lie inside the grid box.
    pub fn fits_in(&self, grid: &SpaceTimeGrid<T>) -> bool {
        if grid.dim() != self.dim() {
            return false;
        }
        let tol_x = grid.h() * T::index_tol();
        let tol_t = grid.dt() * T::index_tol();
        let w = self.radius / T::lit(2.0);
        let spatial = (0..grid.dim()).all(|a| {
            let c = self.vertex.x[a];
            c - w >= grid.origin()[a] - tol_x && c + w <= grid.upper(a) + tol_x
        });
        spatial && self.t_bottom() >= grid.t0() - tol_t && self.vertex.t <= grid.t_end() + tol_t
    }

    /// Nodes of `grid` inside the cylinder, or `None` if there are none.
    pub fn node_box(&self, grid: &SpaceTimeGrid<T>) -> Option<NodeBox> {
        if grid.dim() != self.dim() {
            return None;
        }
        let (lo, hi) = spatial_range(grid, &self.vertex.x, self.radius / T::lit(2.0))?;
        let tol = T::index_tol();
        let fb = ((self.t_bottom() - grid.t0()) / grid.dt() + tol).floor();
        let ft = ((self.vertex.t - grid.t0()) / grid.dt() + tol).floor();
        let k_lo = (fb.to_f64()? + 1.0).max(0.0);
        let k_hi = ft.to_f64()?.min(grid.n_steps() as f64);
        if k_hi < k_lo {
            return None;
        }
        Some(NodeBox {
            lo,
            hi,
            k_lo: k_lo as usize,
            k_hi: k_hi as usize,
        })
    }

    /// Like [`node_box`](Self::node_box) but errors on an empty intersection.
    pub fn nodes_in(&self, grid: &SpaceTimeGrid<T>) -> Result<NodeBox> {
        if grid.dim() != self.dim() {
            return Err(Error::invalid(format!(
                "cylinder dimension {} does not match grid dimension {}",
                self.dim(),
                grid.dim()
            )));
        }
        self.node_box(grid).ok_or(Error::EmptyRegion)
    }

    /// Errors with out-of-domain unless the cylinder lies inside the grid.
    pub fn require_inside(&self, grid: &SpaceTimeGrid<T>) -> Result<NodeBox> {
        if !self.fits_in(grid) {
            return Err(Error::OutOfDomain(format!(
                "cylinder at t={} with radius {} and θ={} leaves the grid",
                self.vertex.t, self.radius, self.theta
            )));
        }
        self.nodes_in(grid)
    }

    /// Index of the time slice carrying the "initial" data `t = s − θρ²`
    /// (the latest slice at or below it).
    pub fn initial_slice(&self, grid: &SpaceTimeGrid<T>) -> Option<usize> {
        let f = ((self.t_bottom() - grid.t0()) / grid.dt() + T::index_tol()).floor();
        if f < T::zero() {
            return None;
        }
        f.to_usize().filter(|&k| k <= grid.n_steps())
    }
}

/// Inclusive per-axis index ranges of the closed cube `center ± half_width`.
pub(crate) fn spatial_range<T: Real>(
    grid: &SpaceTimeGrid<T>,
    center: &[T],
    half_width: T,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let tol = T::index_tol();
    let n = grid.nodes_per_axis() as f64;
    let mut lo = Vec::with_capacity(grid.dim());
    let mut hi = Vec::with_capacity(grid.dim());
    for (&c, &o) in center.iter().zip(grid.origin()) {
        let l = ((c - half_width - o) / grid.h() - tol).ceil().to_f64()?.max(0.0);
        let u = ((c + half_width - o) / grid.h() + tol).floor().to_f64()?.min(n - 1.0);
        if u < l {
            return None;
        }
        lo.push(l as usize);
        hi.push(u as usize);
    }
    Some((lo, hi))
}

/// Rectangular block of grid nodes: inclusive spatial index ranges per axis
/// and an inclusive range of time slices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeBox {
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
    pub k_lo: usize,
    pub k_hi: usize,
}

impl NodeBox {
    pub fn spatial_count(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l + 1).product()
    }

    pub fn n_slices(&self) -> usize {
        self.k_hi - self.k_lo + 1
    }

    pub fn count(&self) -> usize {
        self.spatial_count() * self.n_slices()
    }

    pub fn slices(&self) -> std::ops::RangeInclusive<usize> {
        self.k_lo..=self.k_hi
    }

    /// Row-major spatial indices of the block, in increasing order.
    pub fn spatial_indices<T: Real>(&self, grid: &SpaceTimeGrid<T>) -> Vec<usize> {
        let dim = self.lo.len();
        let mut out = Vec::with_capacity(self.spatial_count());
        let mut idx = self.lo.clone();
        loop {
            out.push(grid.spatial_index(&idx));
            let mut a = dim;
            loop {
                if a == 0 {
                    return out;
                }
                a -= 1;
                if idx[a] < self.hi[a] {
                    idx[a] += 1;
                    break;
                }
                idx[a] = self.lo[a];
            }
        }
    }

    /// Discrete measure: node count × cell volume.
    pub fn measure<T: Real>(&self, grid: &SpaceTimeGrid<T>) -> T {
        T::from_count(self.count()) * grid.cell_volume()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1d(n: usize, h: f64, dt: f64, steps: usize) -> SpaceTimeGrid<f64> {
        SpaceTimeGrid::new(
            1,
            h,
            n,
            dt,
            steps,
            vec![-(n as f64 - 1.0) * h / 2.0],
            -(steps as f64) * dt,
        )
        .unwrap()
    }

    #[test]
    fn unit_cylinder_volume() {
        let q = make_cylinder(SpacetimePoint::new(vec![0.0, 0.0], 0.0), 1.0, 1.0).unwrap();
        assert_eq!(q.volume(), 1.0);
    }

    #[test]
    fn volume_is_theta_rho_to_n_plus_two() {
        let q = make_cylinder(SpacetimePoint::<f64>::new(vec![0.0], 0.0), 0.5, 2.0).unwrap();
        assert!((q.volume() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_radius_or_theta() {
        let v = SpacetimePoint::new(vec![0.0], 0.0);
        assert!(matches!(
            make_cylinder(v.clone(), 0.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            make_cylinder(v.clone(), 1.0, -1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(make_cylinder(v, -1.0, 1.0).is_err());
    }

    #[test]
    fn small_theta_is_contained() {
        let v = SpacetimePoint::new(vec![0.3, -0.1], 2.0);
        let q = ParabolicCylinder::standard(v.clone(), 0.7).unwrap();
        for omega in [1.0, 0.5, 0.01] {
            let qw = make_cylinder(v.clone(), 0.7, omega).unwrap();
            assert!(qw.is_subset_of(&q));
        }
        let big = make_cylinder(v, 0.7, 1.5).unwrap();
        assert!(!big.is_subset_of(&q));
    }

    #[test]
    fn closed_cube_half_open_time() {
        let g = grid1d(11, 0.1, 0.1, 10);
        let q = make_cylinder(SpacetimePoint::new(vec![0.0], 0.0), 0.4, 6.25).unwrap();
        // x ∈ [-0.2, 0.2] → 5 nodes; t ∈ (-1, 0] → 10 slices
        let b = q.node_box(&g).unwrap();
        assert_eq!(b.spatial_count(), 5);
        assert_eq!(b.n_slices(), 10);
        assert_eq!(b.k_lo, 1);
        assert_eq!(q.initial_slice(&g), Some(0));
    }

    #[test]
    fn empty_intersection() {
        let g = grid1d(11, 0.1, 0.1, 10);
        let q = make_cylinder(SpacetimePoint::new(vec![5.0], 0.0), 0.4, 1.0).unwrap();
        assert!(q.node_box(&g).is_none());
        assert_eq!(q.nodes_in(&g), Err(Error::EmptyRegion));
    }
}
