use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform tensor-product grid in space times a uniform time ladder.
///
/// Spatial nodes sit at `origin + i·h` for `i = 0..nodes_per_axis` on every
/// axis; time nodes at `t0 + k·dt` for `k = 0..=n_steps`. Within a time
/// slice, nodes are numbered in row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid<T> {
    dim: usize,
    h: T,
    nodes_per_axis: usize,
    dt: T,
    n_steps: usize,
    origin: Vec<T>,
    t0: T,
}

impl<T: Real> SpaceTimeGrid<T> {
    pub fn new(dim: usize, h: T, nodes_per_axis: usize, dt: T, n_steps: usize, origin: Vec<T>, t0: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("grid dimension must be at least 1"));
        }
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::invalid(format!("grid spacing h must be positive, got {h}")));
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::invalid(format!("time step dt must be positive, got {dt}")));
        }
        if nodes_per_axis < 3 {
            return Err(Error::invalid("nodes_per_axis must be at least 3"));
        }
        if n_steps == 0 {
            return Err(Error::invalid("n_steps must be at least 1"));
        }
        if origin.len() != dim {
            return Err(Error::invalid(format!(
                "origin has {} coordinates, grid dimension is {dim}",
                origin.len()
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) || !t0.is_finite() {
            return Err(Error::invalid("grid origin must be finite"));
        }
        Ok(Self {
            dim,
            h,
            nodes_per_axis,
            dt,
            n_steps,
            origin,
            t0,
        })
    }

    /// Grid whose spatial box is `[lo, hi]^dim` and whose time range is `[t0, t1]`.
    pub fn from_box(dim: usize, lo: T, hi: T, nodes_per_axis: usize, t0: T, t1: T, n_steps: usize) -> Result<Self> {
        if nodes_per_axis < 2 || n_steps == 0 {
            return Err(Error::invalid("grid needs at least 2 nodes per axis and 1 step"));
        }
        let h = (hi - lo) / T::from_count(nodes_per_axis - 1);
        let dt = (t1 - t0) / T::from_count(n_steps);
        Self::new(dim, h, nodes_per_axis, dt, n_steps, vec![lo; dim], t0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn h(&self) -> T {
        self.h
    }
    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }
    pub fn dt(&self) -> T {
        self.dt
    }
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }
    pub fn origin(&self) -> &[T] {
        &self.origin
    }
    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn n_slices(&self) -> usize {
        self.n_steps + 1
    }

    pub fn nodes_per_slice(&self) -> usize {
        self.nodes_per_axis.pow(self.dim as u32)
    }

    /// Total node count, `nodes_per_axis^N × (n_steps + 1)`.
    pub fn node_count(&self) -> usize {
        self.nodes_per_slice() * self.n_slices()
    }

    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> T {
        self.origin[axis] + self.h * T::from_count(i)
    }

    #[inline]
    pub fn time(&self, k: usize) -> T {
        self.t0 + self.dt * T::from_count(k)
    }

    pub fn t_end(&self) -> T {
        self.time(self.n_steps)
    }

    /// Upper corner of the spatial box along `axis`.
    pub fn upper(&self, axis: usize) -> T {
        self.coord(axis, self.nodes_per_axis - 1)
    }

    /// Stride of `axis` in the row-major spatial numbering.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.nodes_per_axis.pow((self.dim - 1 - axis) as u32)
    }

    pub fn spatial_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.nodes_per_axis + i)
    }

    pub fn multi_index(&self, mut lin: usize, out: &mut [usize]) {
        for axis in (0..self.dim).rev() {
            out[axis] = lin % self.nodes_per_axis;
            lin /= self.nodes_per_axis;
        }
    }

    /// Spatial coordinates of the node with row-major index `lin`.
    pub fn point(&self, lin: usize, out: &mut [T]) {
        let mut rest = lin;
        for axis in (0..self.dim).rev() {
            out[axis] = self.coord(axis, rest % self.nodes_per_axis);
            rest /= self.nodes_per_axis;
        }
    }

    #[inline]
    pub fn index(&self, slice: usize, lin: usize) -> usize {
        slice * self.nodes_per_slice() + lin
    }

    pub fn is_boundary(&self, lin: usize) -> bool {
        let n = self.nodes_per_axis;
        let mut rest = lin;
        for _ in 0..self.dim {
            let i = rest % n;
            if i == 0 || i == n - 1 {
                return true;
            }
            rest /= n;
        }
        false
    }

    /// `h^N`.
    pub fn spatial_cell_volume(&self) -> T {
        self.h.powi(self.dim as i32)
    }

    /// `h^N · dt`.
    pub fn cell_volume(&self) -> T {
        self.spatial_cell_volume() * self.dt
    }

    /// Same spatial layout with a different time ladder.
    pub fn with_time(&self, t0: T, dt: T, n_steps: usize) -> Result<Self> {
        Self::new(
            self.dim,
            self.h,
            self.nodes_per_axis,
            dt,
            n_steps,
            self.origin.clone(),
            t0,
        )
    }

    /// Nearest time-slice index to `t`, if `t` lies within the ladder.
    pub fn slice_at(&self, t: T) -> Option<usize> {
        let f = (t - self.t0) / self.dt;
        let k = f.round();
        if (f - k).abs() > T::index_tol() * T::lit(1e3) || k < T::zero() {
            return None;
        }
        let k = k.to_usize()?;
        (k <= self.n_steps).then_some(k)
    }
}
