//! Closed-form solutions
//!
//! ```text
//! u(x,t) = 2(N−2)(T−t)^{N/(N−2)} / (λ + (T−t)^{2/(N−2)} |x|²)
//! ```
//!
//! of `u_t = Δ ln u` for `N ≥ 3`, `λ ≥ 0`. They vanish identically at the
//! extinction time `T` when `λ > 0`; for `λ = 0` they reduce to
//! `2(N−2)(T−t)/|x|²`, unbounded along the column `x = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ScalarField, SpaceTimeGrid, VectorField, DEFAULT_EPS_FLOOR};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplicitSolution<T> {
    dim: usize,
    lambda: T,
    extinction: T,
}

impl<T: Real> ExplicitSolution<T> {
    pub fn new(dim: usize, lambda: T, extinction: T) -> Result<Self> {
        if dim < 3 {
            return Err(Error::invalid(format!("explicit solutions need N ≥ 3, got N = {dim}")));
        }
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::invalid(format!("λ must be non-negative, got {lambda}")));
        }
        if !(extinction > T::zero()) || !extinction.is_finite() {
            return Err(Error::invalid(format!(
                "extinction time must be positive, got {extinction}"
            )));
        }
        Ok(Self {
            dim,
            lambda,
            extinction,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn lambda(&self) -> T {
        self.lambda
    }
    pub fn extinction_time(&self) -> T {
        self.extinction
    }

    /// True when the solution is bounded (`λ > 0`).
    pub fn is_bounded(&self) -> bool {
        self.lambda > T::zero()
    }

    fn nm2(&self) -> T {
        T::from_count(self.dim - 2)
    }

    /// `(T − t)^{2/(N−2)}`.
    fn a(&self, tau: T) -> T {
        tau.powf(T::lit(2.0) / self.nm2())
    }

    fn check(&self, x: &[T], t: T) -> Result<(T, T)> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.dim
            )));
        }
        if t > self.extinction {
            return Err(Error::OutOfDomain(format!(
                "t = {t} is past the extinction time {}",
                self.extinction
            )));
        }
        let r2: T = x.iter().map(|&c| c * c).sum();
        if self.lambda == T::zero() && r2 == T::zero() {
            return Err(Error::SingularPoint { nodes: Vec::new() });
        }
        Ok((self.extinction - t, r2))
    }

    pub fn eval(&self, x: &[T], t: T) -> Result<T> {
        let (tau, r2) = self.check(x, t)?;
        Ok(self.value(tau, r2))
    }

    fn value(&self, tau: T, r2: T) -> T {
        let two = T::lit(2.0);
        if self.lambda == T::zero() {
            return two * self.nm2() * tau / r2;
        }
        let n = T::from_count(self.dim);
        two * self.nm2() * tau.powf(n / self.nm2()) / (self.lambda + self.a(tau) * r2)
    }

    /// `D ln u = −2a x / (λ + a|x|²)` with `a = (T−t)^{2/(N−2)}`.
    pub fn grad_log_exact(&self, x: &[T], t: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.dim];
        self.grad_log_into(x, t, &mut out)?;
        Ok(out)
    }

    fn grad_log_into(&self, x: &[T], t: T, out: &mut [T]) -> Result<()> {
        let (tau, r2) = self.check(x, t)?;
        let two = T::lit(2.0);
        let factor = if self.lambda == T::zero() {
            -two / r2
        } else {
            let a = self.a(tau);
            -two * a / (self.lambda + a * r2)
        };
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = factor * xi;
        }
        Ok(())
    }

    /// `∂_t u` from the closed form.
    pub fn time_derivative(&self, x: &[T], t: T) -> Result<T> {
        let (tau, r2) = self.check(x, t)?;
        self.require_before_extinction(tau)?;
        let n = T::from_count(self.dim);
        let a = self.a(tau);
        let q = self.lambda + a * r2;
        let dlog_dtau = (n - T::lit(2.0) * a * r2 / q) / (self.nm2() * tau);
        Ok(-self.value(tau, r2) * dlog_dtau)
    }

    /// `Δ ln u` from the closed form.
    pub fn laplacian_log(&self, x: &[T], t: T) -> Result<T> {
        let (tau, r2) = self.check(x, t)?;
        let n = T::from_count(self.dim);
        let a = self.a(tau);
        let q = self.lambda + a * r2;
        Ok(-(T::lit(2.0) * a * n / q - T::lit(4.0) * a * a * r2 / (q * q)))
    }

    /// Strong-form residual `u_t − Δ ln u`; zero up to rounding.
    pub fn residual(&self, x: &[T], t: T) -> Result<T> {
        Ok(self.time_derivative(x, t)? - self.laplacian_log(x, t)?)
    }

    fn require_before_extinction(&self, tau: T) -> Result<()> {
        if tau <= T::zero() {
            return Err(Error::OutOfDomain("time derivative requires t < T".into()));
        }
        Ok(())
    }

    fn singular_nodes(&self, grid: &SpaceTimeGrid<T>) -> Result<()> {
        if grid.dim() != self.dim {
            return Err(Error::invalid(format!(
                "grid dimension {} does not match solution dimension {}",
                grid.dim(),
                self.dim
            )));
        }
        if grid.t_end() > self.extinction + grid.dt() * T::index_tol() {
            return Err(Error::OutOfDomain(format!(
                "grid ends at t = {}, past the extinction time {}",
                grid.t_end(),
                self.extinction
            )));
        }
        if self.lambda > T::zero() {
            return Ok(());
        }
        let mut x = vec![T::zero(); grid.dim()];
        let tiny = grid.h() * T::index_tol();
        let nodes: Vec<usize> = (0..grid.nodes_per_slice())
            .filter(|&lin| {
                grid.point(lin, &mut x);
                x.iter().all(|&c| c.abs() <= tiny)
            })
            .collect();
        if nodes.is_empty() {
            Ok(())
        } else {
            Err(Error::SingularPoint { nodes })
        }
    }

    /// Samples the solution on every node of `grid`.
    pub fn sample(&self, grid: &SpaceTimeGrid<T>) -> Result<ScalarField<T>> {
        self.singular_nodes(grid)?;
        let t_max = self.extinction;
        ScalarField::from_fn(grid.clone(), T::lit(DEFAULT_EPS_FLOOR), |x, t| {
            let r2: T = x.iter().map(|&c| c * c).sum();
            self.value(t_max - t.min(t_max), r2)
        })
    }

    /// Samples `D ln u` on every node of `grid` (the quadrature-only path).
    pub fn sample_grad_log(&self, grid: &SpaceTimeGrid<T>) -> Result<VectorField<T>> {
        self.singular_nodes(grid)?;
        let t_max = self.extinction;
        Ok(VectorField::from_fn(grid.clone(), |x, t, out| {
            self.grad_log_into(x, t.min(t_max), out).expect("checked above");
        }))
    }
}

/// Grid centred on `x = 0` whose nodes straddle the origin at offset `h/2`
/// on every axis, so the singular column of the `λ = 0` solution is never
/// sampled. `cells_per_axis` is the (even-node) count along each axis.
pub fn origin_avoiding_grid<T: Real>(
    dim: usize,
    half_width: T,
    nodes_per_axis: usize,
    t0: T,
    t1: T,
    n_steps: usize,
) -> Result<SpaceTimeGrid<T>> {
    if !nodes_per_axis.is_multiple_of(2) {
        return Err(Error::invalid("origin-avoiding grids need an even node count per axis"));
    }
    SpaceTimeGrid::from_box(dim, -half_width, half_width, nodes_per_axis, t0, t1, n_steps)
}
