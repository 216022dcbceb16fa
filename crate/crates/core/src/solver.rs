//! Backward-Euler finite-difference integrator for `u_t = Δ ln u (+ f)` on a
//! box with Dirichlet data.
//!
//! Each step solves
//!
//! ```text
//! G(u) = (u − u_now)/dt − Δ_h ln u − f(·, t_next) = 0
//! ```
//!
//! at interior nodes by damped Newton. The Jacobian
//! `diag(1/dt) − Δ_h diag(1/u)` factors as `(diag(u)/dt − Δ_h) diag(1/u)`;
//! the left factor is symmetric positive definite and is solved by
//! Jacobi-preconditioned conjugate gradients.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::explicit::ExplicitSolution;
use crate::geometry::{ScalarField, SpaceTimeGrid, DEFAULT_EPS_FLOOR};
use crate::scalar::Real;

/// Source term `f(x, t)`; only used for manufactured-solution checks.
pub type Forcing<T> = Arc<dyn Fn(&[T], T) -> T + Send + Sync>;

/// Most step halvings Newton may take to keep an iterate above the floor.
pub const MAX_HALVINGS: usize = 20;

#[derive(Clone)]
pub struct SolverConfig<T> {
    pub grid: SpaceTimeGrid<T>,
    pub newton_tol: T,
    pub newton_max_iter: usize,
    pub eps_floor: T,
    pub forcing: Option<Forcing<T>>,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(grid: SpaceTimeGrid<T>) -> Self {
        Self {
            grid,
            newton_tol: T::lit(1e-10),
            newton_max_iter: 50,
            eps_floor: T::lit(DEFAULT_EPS_FLOOR),
            forcing: None,
        }
    }

    pub fn with_forcing(mut self, f: impl Fn(&[T], T) -> T + Send + Sync + 'static) -> Self {
        self.forcing = Some(Arc::new(f));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > T::zero()) {
            return Err(Error::invalid("newton_tol must be positive"));
        }
        if !(self.eps_floor > T::zero()) {
            return Err(Error::invalid("eps_floor must be positive"));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::invalid("newton_max_iter must be at least 1"));
        }
        Ok(())
    }
}

impl<T: Real> fmt::Debug for SolverConfig<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverConfig")
            .field("grid", &self.grid)
            .field("newton_tol", &self.newton_tol)
            .field("newton_max_iter", &self.newton_max_iter)
            .field("eps_floor", &self.eps_floor)
            .field("forcing", &self.forcing.is_some())
            .finish()
    }
}

/// Dirichlet data: an initial condition plus boundary values in time.
pub trait BoundaryData<T: Real> {
    fn initial(&self, x: &[T]) -> Result<T>;
    fn boundary(&self, x: &[T], t: T) -> Result<T>;
}

/// Spatially and temporally constant data.
#[derive(Debug, Clone, Copy)]
pub struct ConstantData<T>(pub T);

impl<T: Real> BoundaryData<T> for ConstantData<T> {
    fn initial(&self, _x: &[T]) -> Result<T> {
        Ok(self.0)
    }
    fn boundary(&self, _x: &[T], _t: T) -> Result<T> {
        Ok(self.0)
    }
}

impl<T: Real> BoundaryData<T> for ExplicitSolution<T> {
    fn initial(&self, x: &[T]) -> Result<T> {
        Err(Error::invalid(format!(
            "explicit solution needs a start time for the initial condition at {x:?}; wrap it in OracleData"
        )))
    }
    fn boundary(&self, x: &[T], t: T) -> Result<T> {
        self.eval(x, t)
    }
}

/// Explicit solution started at time `t0`.
#[derive(Debug, Clone, Copy)]
pub struct OracleData<T> {
    pub solution: ExplicitSolution<T>,
    pub t0: T,
}

impl<T: Real> BoundaryData<T> for OracleData<T> {
    fn initial(&self, x: &[T]) -> Result<T> {
        self.solution.eval(x, self.t0)
    }
    fn boundary(&self, x: &[T], t: T) -> Result<T> {
        self.solution.eval(x, t)
    }
}

/// Data read from a stored field: slice 0 is the initial condition, and the
/// boundary at time `t` comes from the slice at `t` (or the last slice when
/// the field ends earlier).
#[derive(Debug, Clone)]
pub struct FieldData<T> {
    field: ScalarField<T>,
}

impl<T: Real> FieldData<T> {
    pub fn new(field: ScalarField<T>) -> Self {
        Self { field }
    }

    fn lookup(&self, x: &[T], slice: usize) -> Result<T> {
        let g = self.field.grid();
        let mut idx = vec![0usize; g.dim()];
        for (a, i) in idx.iter_mut().enumerate() {
            let f = ((x[a] - g.origin()[a]) / g.h()).round();
            *i = f
                .to_usize()
                .filter(|&i| i < g.nodes_per_axis())
                .ok_or_else(|| Error::OutOfDomain(format!("point {x:?} is not a node of the stored field")))?;
        }
        Ok(self.field.value(slice, g.spatial_index(&idx)))
    }
}

impl<T: Real> BoundaryData<T> for FieldData<T> {
    fn initial(&self, x: &[T]) -> Result<T> {
        self.lookup(x, 0)
    }
    fn boundary(&self, x: &[T], t: T) -> Result<T> {
        let g = self.field.grid();
        let slice = g.slice_at(t).unwrap_or(g.n_steps());
        self.lookup(x, slice)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats<T> {
    /// Residual evaluations, including the one that certified convergence.
    pub iterations: usize,
    pub residual: T,
    pub halvings: usize,
    pub cg_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct StepOutcome<T> {
    pub values: Vec<T>,
    pub stats: StepStats<T>,
}

#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub field: ScalarField<T>,
    pub stats: Vec<StepStats<T>>,
}

/// Residual `(u − u_prev)/dt − Δ_h ln u − f` at interior node `lin`.
///
/// Shared by Newton and [`pde_residual`] so that both agree bit for bit.
#[inline]
fn interior_residual<T: Real>(grid: &SpaceTimeGrid<T>, lin: usize, u: T, u_prev: T, logs: &[T], f: T) -> T {
    let inv_h2 = T::one() / (grid.h() * grid.h());
    let two = T::lit(2.0);
    let mut lap = T::zero();
    for a in 0..grid.dim() {
        let s = grid.stride(a);
        lap = lap + (logs[lin + s] + logs[lin - s] - two * logs[lin]);
    }
    (u - u_prev) / grid.dt() - lap * inv_h2 - f
}

fn floored_logs<T: Real>(u: &[T], eps: T) -> Vec<T> {
    u.iter().map(|&v| v.max(eps).ln()).collect()
}

struct StepContext<'a, T: Real> {
    grid: &'a SpaceTimeGrid<T>,
    interior: Vec<usize>,
    forcing: Vec<T>,
}

impl<'a, T: Real> StepContext<'a, T> {
    fn residual(&self, u: &[T], u_now: &[T], eps: T, out: &mut [T]) -> T {
        let logs = floored_logs(u, eps);
        let mut max = T::zero();
        for (j, &lin) in self.interior.iter().enumerate() {
            let r = interior_residual(self.grid, lin, u[lin], u_now[lin], &logs, self.forcing[j]);
            out[lin] = r;
            max = max.max(r.abs());
        }
        max
    }

    /// `(diag(u)/dt − Δ_h) y` on interior nodes; `y` vanishes on the boundary.
    fn apply(&self, u: &[T], y: &[T], out: &mut [T]) {
        let inv_h2 = T::one() / (self.grid.h() * self.grid.h());
        let inv_dt = T::one() / self.grid.dt();
        let two = T::lit(2.0);
        for &lin in &self.interior {
            let mut lap = T::zero();
            for a in 0..self.grid.dim() {
                let s = self.grid.stride(a);
                lap = lap + (y[lin + s] + y[lin - s] - two * y[lin]);
            }
            out[lin] = u[lin] * inv_dt * y[lin] - lap * inv_h2;
        }
    }

    fn dot(&self, a: &[T], b: &[T]) -> T {
        self.interior.iter().map(|&i| a[i] * b[i]).sum()
    }

    /// Jacobi-preconditioned CG for `(diag(u)/dt − Δ_h) y = rhs`.
    fn solve(&self, u: &[T], rhs: &[T]) -> (Vec<T>, usize) {
        let n = rhs.len();
        let mut y = vec![T::zero(); n];
        let bnorm = self.dot(rhs, rhs).sqrt();
        if bnorm == T::zero() {
            return (y, 0);
        }
        let inv_h2 = T::one() / (self.grid.h() * self.grid.h());
        let diag_lap = T::lit(2.0) * T::from_count(self.grid.dim()) * inv_h2;
        let inv_dt = T::one() / self.grid.dt();
        let mut r = rhs.to_vec();
        let mut z = vec![T::zero(); n];
        for &i in &self.interior {
            z[i] = r[i] / (u[i] * inv_dt + diag_lap);
        }
        let mut p = z.clone();
        let mut ap = vec![T::zero(); n];
        let mut rz = self.dot(&r, &z);
        let tol = bnorm * T::lit(1e-13);
        let max_iter = 20 * self.interior.len().max(10);
        let mut it = 0;
        while it < max_iter {
            it += 1;
            self.apply(u, &p, &mut ap);
            let alpha = rz / self.dot(&p, &ap);
            for &i in &self.interior {
                y[i] = y[i] + alpha * p[i];
                r[i] = r[i] - alpha * ap[i];
            }
            if self.dot(&r, &r).sqrt() <= tol {
                break;
            }
            for &i in &self.interior {
                z[i] = r[i] / (u[i] * inv_dt + diag_lap);
            }
            let rz_new = self.dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for &i in &self.interior {
                p[i] = z[i] + beta * p[i];
            }
        }
        (y, it)
    }
}

fn interior_nodes<T: Real>(grid: &SpaceTimeGrid<T>) -> Vec<usize> {
    (0..grid.nodes_per_slice())
        .filter(|&lin| !grid.is_boundary(lin))
        .collect()
}

/// Advances one backward-Euler step from `u_now` to `t_next`.
pub fn step<T: Real, B: BoundaryData<T> + ?Sized>(
    u_now: &[T],
    t_next: T,
    config: &SolverConfig<T>,
    bc: &B,
) -> Result<StepOutcome<T>> {
    config.validate()?;
    let grid = &config.grid;
    let nps = grid.nodes_per_slice();
    if u_now.len() != nps {
        return Err(Error::invalid(format!(
            "slice has {} values, grid slice has {nps}",
            u_now.len()
        )));
    }
    let eps = config.eps_floor;
    let interior = interior_nodes(grid);
    if let Some(&i) = interior.iter().find(|&&i| !(u_now[i] > T::zero())) {
        return Err(Error::invalid(format!(
            "u_now must be positive at interior nodes; node {i} holds {}",
            u_now[i]
        )));
    }

    let mut x = vec![T::zero(); grid.dim()];
    let mut u = u_now.to_vec();
    for (lin, v) in u.iter_mut().enumerate() {
        if grid.is_boundary(lin) {
            grid.point(lin, &mut x);
            let b = bc.boundary(&x, t_next)?;
            if !(b >= T::zero()) || !b.is_finite() {
                return Err(Error::invalid(format!(
                    "boundary data must be non-negative, got {b} at {x:?}"
                )));
            }
            *v = b;
        }
    }
    let forcing: Vec<T> = match &config.forcing {
        Some(f) => interior
            .iter()
            .map(|&lin| {
                grid.point(lin, &mut x);
                f(&x, t_next)
            })
            .collect(),
        None => vec![T::zero(); interior.len()],
    };
    let ctx = StepContext {
        grid,
        interior,
        forcing,
    };

    let mut g = vec![T::zero(); nps];
    let mut halvings = 0;
    let mut cg_total = 0;
    let mut res = T::infinity();
    for iter in 1..=config.newton_max_iter {
        res = ctx.residual(&u, u_now, eps, &mut g);
        if res <= config.newton_tol {
            return Ok(StepOutcome {
                values: u,
                stats: StepStats {
                    iterations: iter,
                    residual: res,
                    halvings,
                    cg_iterations: cg_total,
                },
            });
        }
        if iter == config.newton_max_iter {
            break;
        }
        let rhs: Vec<T> = g.iter().map(|&v| -v).collect();
        let (y, its) = ctx.solve(&u, &rhs);
        cg_total += its;
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            if ctx.interior.iter().all(|&i| u[i] + alpha * u[i] * y[i] >= eps) {
                accepted = true;
                break;
            }
            alpha = alpha / T::lit(2.0);
            halvings += 1;
        }
        if !accepted {
            return Err(Error::Divergence {
                iterations: iter,
                residual: res.as_f64(),
                step: None,
            });
        }
        for &i in &ctx.interior {
            u[i] = u[i] + alpha * u[i] * y[i];
        }
    }
    Err(Error::Divergence {
        iterations: config.newton_max_iter,
        residual: res.as_f64(),
        step: None,
    })
}

/// Integrates `n_steps` steps on the configured spatial grid and time step,
/// starting from `bc.initial` at the grid's `t0`.
pub fn run<T: Real, B: BoundaryData<T> + ?Sized>(
    config: &SolverConfig<T>,
    bc: &B,
    n_steps: usize,
) -> Result<Solution<T>> {
    config.validate()?;
    let grid = config.grid.with_time(config.grid.t0(), config.grid.dt(), n_steps)?;
    let nps = grid.nodes_per_slice();
    let mut values = Vec::with_capacity(grid.node_count());
    let mut x = vec![T::zero(); grid.dim()];
    for lin in 0..nps {
        grid.point(lin, &mut x);
        let v = bc.initial(&x)?;
        if !(v >= T::zero()) || !v.is_finite() {
            return Err(Error::invalid(format!(
                "initial data must be non-negative, got {v} at {x:?}"
            )));
        }
        values.push(v);
    }
    let mut stats = Vec::with_capacity(n_steps);
    for k in 1..=n_steps {
        let (prev, _) = values.split_at((k - 1) * nps).1.split_at(nps);
        let out = step(prev, grid.time(k), config, bc).map_err(|e| match e {
            Error::Divergence {
                iterations, residual, ..
            } => Error::Divergence {
                iterations,
                residual,
                step: Some(k),
            },
            other => other,
        })?;
        values.extend_from_slice(&out.values);
        stats.push(out.stats);
    }
    Ok(Solution {
        field: ScalarField::new(grid, values, config.eps_floor)?,
        stats,
    })
}

/// Signed nodal values on a grid (residuals may be negative).
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField<T> {
    pub grid: SpaceTimeGrid<T>,
    pub values: Vec<T>,
}

impl<T: Real> ResidualField<T> {
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Discrete l² norm of one time slice.
    pub fn slice_l2(&self, k: usize) -> T {
        let n = self.grid.nodes_per_slice();
        let s: T = self.values[k * n..(k + 1) * n].iter().map(|&v| v * v).sum();
        (s * self.grid.spatial_cell_volume()).sqrt()
    }
}

/// A-posteriori residual: backward-difference `u_t` minus `Δ_h ln u` at
/// interior nodes of slices `1..`; zero on the boundary and on slice 0.
pub fn pde_residual<T: Real>(field: &ScalarField<T>) -> ResidualField<T> {
    let grid = field.grid();
    let nps = grid.nodes_per_slice();
    let eps = field.eps_floor();
    let mut values = vec![T::zero(); grid.node_count()];
    let interior = interior_nodes(grid);
    for k in 1..grid.n_slices() {
        let now = field.slice(k);
        let prev = field.slice(k - 1);
        let logs = floored_logs(now, eps);
        for &lin in &interior {
            values[k * nps + lin] = interior_residual(grid, lin, now[lin], prev[lin], &logs, T::zero());
        }
    }
    ResidualField {
        grid: grid.clone(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(dim: usize, n: usize, dt: f64, steps: usize) -> SpaceTimeGrid<f64> {
        SpaceTimeGrid::from_box(dim, 0.0, 1.0, n, 0.0, dt * steps as f64, steps).unwrap()
    }

    #[test]
    fn constant_is_steady() {
        let cfg = SolverConfig::new(grid(2, 9, 0.01, 5));
        let sol = run(&cfg, &ConstantData(0.7), 5).unwrap();
        assert!(sol.field.values().iter().all(|&v| v == 0.7));
        assert!(sol.stats.iter().all(|s| s.iterations == 1));
        assert_eq!(pde_residual(&sol.field).max_abs(), 0.0);
    }

    #[test]
    fn manufactured_exponential_growth() {
        // u* = e^t is spatially constant, so Δ ln u* = 0 and f = e^t.
        let mut errs = Vec::new();
        for steps in [10, 20, 40] {
            let dt = 0.5 / steps as f64;
            let cfg = SolverConfig::new(grid(1, 9, dt, steps)).with_forcing(|_, t| t.exp());
            struct Exp;
            impl BoundaryData<f64> for Exp {
                fn initial(&self, _: &[f64]) -> Result<f64> {
                    Ok(1.0)
                }
                fn boundary(&self, _: &[f64], t: f64) -> Result<f64> {
                    Ok(t.exp())
                }
            }
            let sol = run(&cfg, &Exp, steps).unwrap();
            let last = sol.field.slice(steps);
            errs.push(last.iter().map(|v| (v - 0.5f64.exp()).abs()).fold(0.0, f64::max));
        }
        assert!(errs[0] < 0.05);
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.7..2.3).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn rejects_negative_boundary() {
        let cfg = SolverConfig::new(grid(1, 5, 0.1, 1));
        let u = vec![1.0; 5];
        struct Neg;
        impl BoundaryData<f64> for Neg {
            fn initial(&self, _: &[f64]) -> Result<f64> {
                Ok(1.0)
            }
            fn boundary(&self, _: &[f64], _: f64) -> Result<f64> {
                Ok(-1.0)
            }
        }
        assert!(matches!(step(&u, 0.1, &cfg, &Neg), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn divergence_reports_last_residual() {
        let mut cfg = SolverConfig::new(grid(1, 9, 0.1, 1));
        cfg.newton_max_iter = 1;
        let mut u = vec![1.0; 9];
        u[4] = 2.0;
        match step(&u, 0.1, &cfg, &ConstantData(1.0)) {
            Err(Error::Divergence {
                residual,
                iterations: 1,
                ..
            }) => assert!(residual > 0.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn solver_output_has_residual_below_tolerance() {
        let sol_oracle = ExplicitSolution::new(3, 1.0, 1.0).unwrap();
        let g = SpaceTimeGrid::from_box(3, -0.4, 0.6, 7, 0.0, 0.1, 4).unwrap();
        let cfg = SolverConfig::new(g);
        let data = OracleData {
            solution: sol_oracle,
            t0: 0.0,
        };
        let sol = run(&cfg, &data, 4).unwrap();
        let res = pde_residual(&sol.field);
        assert!(res.max_abs() <= cfg.newton_tol);
        for k in 1..=4 {
            assert!(res.slice_l2(k) <= cfg.newton_tol);
        }
        assert!(sol.field.min() >= cfg.eps_floor);
    }

    #[test]
    fn field_data_holds_last_slice() {
        let g = grid(1, 5, 0.1, 1);
        let f = ScalarField::from_fn(g.clone(), 1e-12, |x, t| 1.0 + x[0] + t).unwrap();
        let d = FieldData::new(f);
        assert_eq!(d.initial(&[0.25]).unwrap(), 1.25);
        assert!((d.boundary(&[1.0], 0.1).unwrap() - 2.1).abs() < 1e-15);
        assert!((d.boundary(&[1.0], 5.0).unwrap() - 2.1).abs() < 1e-15);
        assert!(d.initial(&[0.1]).is_ok());
        assert!(d.initial(&[3.0]).is_err());
    }
}
