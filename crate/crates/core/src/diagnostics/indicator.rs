use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    cylinder_integral, cylinder_power_average, grad_log, ParabolicCylinder, ScalarField, SpacetimePoint, VectorField,
};
use crate::scalar::Real;

/// Checks the integrability exponent for an `N`-dimensional problem.
///
/// For `N = 1` every `p ≥ 1` is admissible; for `N ≥ 2` the exponent must
/// exceed `(N+2)/2` unless `exploratory` is set.
pub fn validate_exponent<T: Real>(dim: usize, p: T, exploratory: bool) -> Result<()> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::invalid(format!("exponent p must be at least 1, got {p}")));
    }
    if dim >= 2 && !exploratory {
        let crit = T::from_count(dim + 2) / T::lit(2.0);
        if !(p > crit) {
            return Err(Error::ExponentOutOfRange(format!(
                "p = {p} must exceed (N+2)/2 = {crit} for N = {dim}"
            )));
        }
    }
    Ok(())
}

fn standard_cylinder<T: Real>(g: &VectorField<T>, vertex: &SpacetimePoint<T>, rho: T) -> Result<ParabolicCylinder<T>> {
    let q = ParabolicCylinder::standard(vertex.clone(), rho)?;
    q.require_inside(g.grid())?;
    Ok(q)
}

/// `I_{p,ρ}(y,s) = ρ (⨍⨍_{(y,s)+Q_ρ} |g|^p)^{1/p}` for a precomputed gradient.
pub fn indicator_from_gradient<T: Real>(g: &VectorField<T>, vertex: &SpacetimePoint<T>, rho: T, p: T) -> Result<T> {
    let q = standard_cylinder(g, vertex, rho)?;
    Ok(rho * cylinder_power_average(g, &q, p)?.powf(p.recip()))
}

/// `I_{p,ρ}(y,s)` of `D ln u` for a sampled field.
pub fn indicator<T: Real>(field: &ScalarField<T>, vertex: &SpacetimePoint<T>, rho: T, p: T) -> Result<T> {
    indicator_from_gradient(&grad_log(field), vertex, rho, p)
}

/// `Θ_ρ = ρ^{p−N−2} ∬_{(y,s)+Q_ρ} |g|^p`.
pub fn normalized_energy<T: Real>(g: &VectorField<T>, vertex: &SpacetimePoint<T>, rho: T, p: T) -> Result<T> {
    let q = standard_cylinder(g, vertex, rho)?;
    let n = vertex.dim() as i32;
    Ok(rho.powf(p) * rho.powi(-(n + 2)) * cylinder_integral(g, &q, p)?)
}

/// `I_{p,ρ}` sampled along a radius ladder together with its running
/// supremum `Ĩ_{p,ρ} = sup_{τ ≤ ρ} I_{p,τ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorCurve<T> {
    pub vertex: SpacetimePoint<T>,
    pub p: T,
    /// Strictly decreasing.
    pub radii: Vec<T>,
    pub values: Vec<T>,
    pub envelope: Vec<T>,
}

impl<T: Real> IndicatorCurve<T> {
    /// Builds a curve from raw samples, sorting by decreasing radius and
    /// filling in the envelope.
    pub fn from_samples(vertex: SpacetimePoint<T>, p: T, mut samples: Vec<(T, T)>) -> Self {
        samples.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite radii"));
        let (radii, values): (Vec<T>, Vec<T>) = samples.into_iter().unzip();
        let envelope = running_sup(&values);
        Self {
            vertex,
            p,
            radii,
            values,
            envelope,
        }
    }

    pub fn points(&self) -> Vec<(T, T)> {
        self.radii.iter().copied().zip(self.values.iter().copied()).collect()
    }

    /// `Ĩ` at an arbitrary radius: the envelope at the smallest sampled
    /// radius that is at least `rho` (an upper bound by monotonicity).
    pub fn envelope_at(&self, rho: T) -> Option<T> {
        self.radii
            .iter()
            .zip(&self.envelope)
            .filter(|(&r, _)| r >= rho * (T::one() - T::index_tol()))
            .last()
            .map(|(_, &e)| e)
    }
}

/// Running maximum from the smallest radius (last entry) up.
fn running_sup<T: Real>(values: &[T]) -> Vec<T> {
    let mut out = values.to_vec();
    let mut best = T::neg_infinity();
    for v in out.iter_mut().rev() {
        best = best.max(*v);
        *v = best;
    }
    out
}

/// Recomputes the monotone envelope of a curve.
pub fn envelope<T: Real>(curve: &IndicatorCurve<T>) -> IndicatorCurve<T> {
    IndicatorCurve {
        envelope: running_sup(&curve.values),
        ..curve.clone()
    }
}

/// Indicator curve over `radii` (computed in parallel; each cylinder is
/// summed sequentially so results are deterministic).
pub fn indicator_curve<T: Real>(
    g: &VectorField<T>,
    vertex: &SpacetimePoint<T>,
    p: T,
    radii: &[T],
    exploratory: bool,
) -> Result<IndicatorCurve<T>> {
    validate_exponent(vertex.dim(), p, exploratory)?;
    if radii.is_empty() {
        return Err(Error::invalid("indicator curve needs at least one radius"));
    }
    let samples = radii
        .par_iter()
        .map(|&r| indicator_from_gradient(g, vertex, r, p).map(|v| (r, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndicatorCurve::from_samples(vertex.clone(), p, samples))
}

/// `Θ_ρ` along a radius ladder, checked against `I_{p,ρ}^p`.
pub fn so_indicator<T: Real>(g: &VectorField<T>, vertex: &SpacetimePoint<T>, p: T, radii: &[T]) -> Result<Vec<(T, T)>> {
    radii
        .par_iter()
        .map(|&r| {
            let theta = normalized_energy(g, vertex, r, p)?;
            let i = indicator_from_gradient(g, vertex, r, p)?;
            let ip = i.powf(p);
            debug_assert!(
                (theta - ip).abs() <= T::lit(1e-10) * theta.abs().max(ip.abs()).max(T::min_positive_value()),
                "Θ_ρ = {theta} disagrees with I^p = {ip}"
            );
            Ok((r, theta))
        })
        .collect()
}

/// Geometric ladder `r₀ · 2^{−k}`, `k = 0..levels`.
pub fn geometric_radii<T: Real>(r0: T, levels: usize) -> Vec<T> {
    (0..levels).map(|k| r0 * T::lit(0.5).powi(k as i32)).collect()
}

/// Oscillation over `Q_r(θ)` along a radius ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscCurve<T> {
    /// `(r, essosc)` sorted by decreasing `r`.
    pub points: Vec<(T, T)>,
    /// Radii whose cylinder left the grid.
    pub skipped: Vec<T>,
}

impl<T: Real> OscCurve<T> {
    /// True when the oscillation does not increase as `r` decreases.
    pub fn is_monotone(&self, tol: T) -> bool {
        self.points.windows(2).all(|w| w[1].1 <= w[0].1 + tol)
    }
}

pub fn osc_curve<T: Real>(
    field: &ScalarField<T>,
    vertex: &SpacetimePoint<T>,
    radii: &[T],
    theta: T,
) -> Result<OscCurve<T>> {
    let mut points = Vec::with_capacity(radii.len());
    let mut skipped = Vec::new();
    for &r in radii {
        let q = ParabolicCylinder::new(vertex.clone(), r, theta)?;
        if !q.fits_in(field.grid()) {
            skipped.push(r);
            continue;
        }
        points.push((r, crate::geometry::essosc(field, &q)?));
    }
    points.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite radii"));
    Ok(OscCurve { points, skipped })
}
