use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Level below which a fast-geometric-convergence sequence counts as having
/// reached zero.
pub const FGC_ZERO: f64 = 1e-8;

/// `C^{−1/β} b^{−1/β²}`: initial values at or below it drive
/// `Y_{k+1} = C b^k Y_k^{1+β}` to zero.
pub fn fgc_threshold<T: Real>(c: T, b: T, beta: T) -> Result<T> {
    Ok(ln_fgc_threshold(c, b, beta)?.exp())
}

/// Logarithm of [`fgc_threshold`], which underflows for small `β`.
pub fn ln_fgc_threshold<T: Real>(c: T, b: T, beta: T) -> Result<T> {
    validate_fgc(c, b, beta)?;
    Ok(-c.ln() / beta - b.ln() / (beta * beta))
}

fn validate_fgc<T: Real>(c: T, b: T, beta: T) -> Result<()> {
    if !(c > T::zero() && c.is_finite()) {
        return Err(Error::invalid(format!("C must be positive, got {c}")));
    }
    if !(b > T::one() && b.is_finite()) {
        return Err(Error::invalid(format!("b must exceed 1, got {b}")));
    }
    if !(beta > T::zero() && beta.is_finite()) {
        return Err(Error::invalid(format!("β must be positive, got {beta}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FgcVerdict {
    /// Reached `FGC_ZERO` within the iteration budget.
    Converged,
    NotConcluded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FgcOutcome<T> {
    pub threshold: T,
    /// `Y_0, Y_1, …` up to and including the first value `≤ FGC_ZERO`.
    pub sequence: Vec<T>,
    pub verdict: FgcVerdict,
}

/// Iterates `Y_{k+1} = C b^k Y_k^{1+β}` for at most `n_max` steps.
pub fn fgc<T: Real>(y0: T, c: T, b: T, beta: T, n_max: usize) -> Result<FgcOutcome<T>> {
    let threshold = fgc_threshold(c, b, beta)?;
    if !(y0 >= T::zero() && y0.is_finite()) {
        return Err(Error::invalid(format!("Y0 must be non-negative, got {y0}")));
    }
    let zero = T::lit(FGC_ZERO);
    let mut sequence = vec![y0];
    let mut y = y0;
    let mut bk = T::one();
    let mut verdict = FgcVerdict::NotConcluded;
    for _ in 0..=n_max {
        if y <= zero {
            verdict = FgcVerdict::Converged;
            break;
        }
        if sequence.len() > n_max || !y.is_finite() {
            break;
        }
        y = c * bk * y.powf(T::one() + beta);
        bk = bk * b;
        sequence.push(y);
    }
    Ok(FgcOutcome {
        threshold,
        sequence,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The last step was pure geometric decay `ω_n = λ ω_{n−1}`.
    Completed,
    /// The last step was set by the indicator, `ω_n = 2Ĩ(ρ_{n−1}) > λ ω_{n−1}`.
    IndicatorDominated,
}

/// `ρ_n = cⁿρ₀` and `ω_n = max{λω_{n−1}, 2Ĩ(ρ_{n−1})}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationTrace<T> {
    pub lambda: T,
    pub c: T,
    pub rho: Vec<T>,
    pub omega: Vec<T>,
    /// `Ĩ(ρ_n)` after enforcing monotonicity along the ladder.
    pub indicator: Vec<T>,
    /// `α = ln λ / ln(√λ c)`.
    pub alpha: T,
    pub stop: StopReason,
}

impl<T: Real> OscillationTrace<T> {
    /// `λⁿω₀ + 2Ĩ(ρ₀)/(1−λ)`.
    pub fn closed_form_bound(&self, n: usize) -> T {
        self.lambda.powi(n as i32) * self.omega[0] + T::lit(2.0) * self.indicator[0] / (T::one() - self.lambda)
    }

    pub fn closed_form_holds(&self) -> bool {
        let tol = T::lit(64.0) * T::epsilon();
        self.omega
            .iter()
            .enumerate()
            .all(|(n, &w)| w <= self.closed_form_bound(n) * (T::one() + tol))
    }
}

/// `α = ln λ / ln(√λ c)`; it lies in `(0,1)` exactly when `c < √λ`.
pub fn alpha<T: Real>(lambda: T, c: T) -> Result<T> {
    check_unit("λ", lambda)?;
    check_unit("c", c)?;
    if c >= lambda.sqrt() {
        return Err(Error::ExponentOutOfRange(format!(
            "c = {c} ≥ √λ = {}; α would leave (0,1)",
            lambda.sqrt()
        )));
    }
    Ok(lambda.ln() / (lambda.sqrt() * c).ln())
}

fn check_unit<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v < T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in (0,1), got {v}")))
    }
}

/// Runs the oscillation recursion for `n` steps.
///
/// `indicator` is sampled at `ρ_0, …, ρ_{n−1}` and replaced by its running
/// supremum from the smallest radius up, so the ladder used is
/// non-increasing in `n` whatever the callback returns. With that, `ω` is
/// non-increasing as soon as `ω₀ ≥ 2Ĩ(ρ₀)`.
pub fn osc_recursion<T: Real>(
    omega0: T,
    rho0: T,
    lambda: T,
    c: T,
    indicator: impl Fn(T) -> T,
    n: usize,
) -> Result<OscillationTrace<T>> {
    let alpha = alpha(lambda, c)?;
    if !(omega0 >= T::zero() && omega0.is_finite()) {
        return Err(Error::invalid(format!("ω₀ must be non-negative, got {omega0}")));
    }
    if !(rho0 > T::zero() && rho0.is_finite()) {
        return Err(Error::invalid(format!("ρ₀ must be positive, got {rho0}")));
    }
    let rho: Vec<T> = (0..=n).map(|k| rho0 * c.powi(k as i32)).collect();
    let mut ind: Vec<T> = rho[..n.max(1)].iter().map(|&r| indicator(r)).collect();
    if let Some(bad) = ind.iter().find(|v| !(**v >= T::zero() && v.is_finite())) {
        return Err(Error::invalid(format!(
            "indicator must be non-negative and finite, got {bad}"
        )));
    }
    let mut best = T::zero();
    for v in ind.iter_mut().rev() {
        best = best.max(*v);
        *v = best;
    }
    let two = T::lit(2.0);
    let mut omega = Vec::with_capacity(n + 1);
    omega.push(omega0);
    let mut stop = StopReason::Completed;
    for k in 1..=n {
        let decay = lambda * omega[k - 1];
        let floor = two * ind[k - 1];
        stop = if floor > decay {
            StopReason::IndicatorDominated
        } else {
            StopReason::Completed
        };
        omega.push(decay.max(floor));
    }
    let trace = OscillationTrace {
        lambda,
        c,
        rho,
        omega,
        indicator: ind,
        alpha,
        stop,
    };
    debug_assert!(trace.closed_form_holds());
    Ok(trace)
}
