use super::grid::SpaceTimeGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default floor below which values are clamped before taking a logarithm.
pub const DEFAULT_EPS_FLOOR: f64 = 1e-12;

/// Non-negative function sampled on every node of a [`SpaceTimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    grid: SpaceTimeGrid<T>,
    values: Vec<T>,
    eps_floor: T,
}

impl<T: Real> ScalarField<T> {
    pub fn new(grid: SpaceTimeGrid<T>, values: Vec<T>, eps_floor: T) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::invalid(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if !(eps_floor > T::zero()) {
            return Err(Error::invalid("eps_floor must be positive"));
        }
        if let Some(i) = values.iter().position(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::invalid(format!(
                "field values must be finite and non-negative; node {i} holds {}",
                values[i]
            )));
        }
        Ok(Self {
            grid,
            values,
            eps_floor,
        })
    }

    /// Samples `f(x, t)` at every node.
    pub fn from_fn(grid: SpaceTimeGrid<T>, eps_floor: T, f: impl Fn(&[T], T) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.node_count());
        let mut x = vec![T::zero(); grid.dim()];
        for k in 0..grid.n_slices() {
            let t = grid.time(k);
            for lin in 0..grid.nodes_per_slice() {
                grid.point(lin, &mut x);
                values.push(f(&x, t));
            }
        }
        Self::new(grid, values, eps_floor)
    }

    pub fn constant(grid: SpaceTimeGrid<T>, c: T) -> Result<Self> {
        let n = grid.node_count();
        Self::new(grid, vec![c; n], T::lit(DEFAULT_EPS_FLOOR))
    }

    pub fn grid(&self) -> &SpaceTimeGrid<T> {
        &self.grid
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn eps_floor(&self) -> T {
        self.eps_floor
    }

    #[inline]
    pub fn value(&self, slice: usize, lin: usize) -> T {
        self.values[self.grid.index(slice, lin)]
    }

    pub fn slice(&self, k: usize) -> &[T] {
        let n = self.grid.nodes_per_slice();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

/// Spatial vector per grid node (node-major, `dim` components each), plus
/// the number of nodes whose value had to be clamped when it was derived.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<T> {
    grid: SpaceTimeGrid<T>,
    data: Vec<T>,
    clamped: usize,
}

impl<T: Real> VectorField<T> {
    pub fn new(grid: SpaceTimeGrid<T>, data: Vec<T>, clamped: usize) -> Result<Self> {
        if data.len() != grid.node_count() * grid.dim() {
            return Err(Error::invalid("vector field length does not match grid"));
        }
        Ok(Self { grid, data, clamped })
    }

    /// Samples a vector-valued `f(x, t, out)` at every node.
    pub fn from_fn(grid: SpaceTimeGrid<T>, f: impl Fn(&[T], T, &mut [T])) -> Self {
        let dim = grid.dim();
        let mut data = vec![T::zero(); grid.node_count() * dim];
        let mut x = vec![T::zero(); dim];
        let nps = grid.nodes_per_slice();
        for k in 0..grid.n_slices() {
            let t = grid.time(k);
            for lin in 0..nps {
                grid.point(lin, &mut x);
                let at = (k * nps + lin) * dim;
                f(&x, t, &mut data[at..at + dim]);
            }
        }
        Self { grid, data, clamped: 0 }
    }

    pub fn grid(&self) -> &SpaceTimeGrid<T> {
        &self.grid
    }

    pub fn clamp_count(&self) -> usize {
        self.clamped
    }

    pub fn at(&self, slice: usize, lin: usize) -> &[T] {
        let d = self.grid.dim();
        let i = self.grid.index(slice, lin) * d;
        &self.data[i..i + d]
    }

    pub fn norm(&self, slice: usize, lin: usize) -> T {
        self.at(slice, lin).iter().map(|&c| c * c).sum::<T>().sqrt()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}
