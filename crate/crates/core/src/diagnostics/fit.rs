use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

/// Ordinary least squares of `ln y` on `ln x`.
pub fn powerlaw_fit<T: Real>(points: &[(T, T)]) -> Result<PowerLawFit<T>> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "power-law fit needs ≥ 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > T::zero() && *y > T::zero())) {
        return Err(Error::invalid(format!(
            "power-law fit needs positive data, got ({x}, {y})"
        )));
    }
    let n = T::from_count(points.len());
    let lx: Vec<T> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<T> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let sxx: T = lx.iter().map(|&x| (x - mx) * (x - mx)).sum();
    if sxx == T::zero() {
        return Err(Error::invalid("power-law fit needs at least two distinct abscissae"));
    }
    let sxy: T = lx.iter().zip(&ly).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: T = ly.iter().map(|&y| (y - my) * (y - my)).sum();
    let ss_res: T = lx
        .iter()
        .zip(&ly)
        .map(|(&x, &y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == T::zero() {
        T::one()
    } else {
        T::one() - ss_res / ss_tot
    };
    Ok(PowerLawFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Parameters of the modulus-of-continuity bound
/// `C̄ [ω (r/R₀)^{(1−μ)α} + Ĩ_{p, R₀^{1−μ} r^μ}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusParams<T> {
    pub omega: T,
    pub r0: T,
    pub mu: T,
    pub alpha: T,
    pub c_bar: T,
}

/// Evaluates the bound at radius `r`, with `i_tilde` the envelope value at
/// `R₀^{1−μ} r^μ`.
pub fn theorem1_bound<T: Real>(params: &ModulusParams<T>, r: T, i_tilde: T) -> Result<T> {
    let ModulusParams {
        omega,
        r0,
        mu,
        alpha,
        c_bar,
    } = *params;
    let unit = |v: T| v > T::zero() && v < T::one();
    if !(r > T::zero() && r <= r0) {
        return Err(Error::invalid(format!("need 0 < r ≤ R₀, got r = {r}, R₀ = {r0}")));
    }
    if !unit(mu) || !unit(alpha) {
        return Err(Error::invalid(format!(
            "μ and α must lie in (0,1), got μ = {mu}, α = {alpha}"
        )));
    }
    if !(c_bar > T::one()) {
        return Err(Error::invalid(format!("C̄ must exceed 1, got {c_bar}")));
    }
    if !(omega >= T::zero()) || !(i_tilde >= T::zero()) {
        return Err(Error::invalid("ω and Ĩ must be non-negative"));
    }
    Ok(c_bar * (omega * (r / r0).powf((T::one() - mu) * alpha) + i_tilde))
}

/// Radius at which the bound samples the indicator: `R₀^{1−μ} r^μ`.
pub fn indicator_radius<T: Real>(r0: T, r: T, mu: T) -> T {
    r0.powf(T::one() - mu) * r.powf(mu)
}

/// Smallest admissible `C̄` for each `α` on a grid, minimised over `α`.
///
/// `samples` holds `(r, osc(r), Ĩ(R₀^{1−μ} r^μ))`. Returns parameters such
/// that every sample satisfies `osc ≤ bound`.
pub fn fit_theorem1<T: Real>(samples: &[(T, T, T)], omega: T, r0: T, mu: T) -> Result<ModulusParams<T>> {
    if samples.is_empty() {
        return Err(Error::invalid("modulus fit needs at least one sample"));
    }
    let mut best: Option<ModulusParams<T>> = None;
    for step in 1..100 {
        let alpha = T::from_count(step) / T::lit(100.0);
        let mut need = T::one();
        for &(r, osc, i) in samples {
            let base = omega * (r / r0).powf((T::one() - mu) * alpha) + i;
            let ratio = if base > T::zero() {
                osc / base
            } else if osc > T::zero() {
                T::infinity()
            } else {
                T::zero()
            };
            need = need.max(ratio);
        }
        // strictly above 1 and above every ratio
        let c_bar = need * (T::one() + T::lit(1e-9)) + T::lit(1e-12);
        if !c_bar.is_finite() {
            continue;
        }
        let cand = ModulusParams {
            omega,
            r0,
            mu,
            alpha,
            c_bar,
        };
        best = match best {
            Some(b) if b.c_bar <= c_bar => Some(b),
            _ => Some(cand),
        };
    }
    best.ok_or_else(|| Error::invalid("no finite C̄ fits the oscillation samples"))
}
