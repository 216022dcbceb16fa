use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `β = 2/(N+2) − 1/p`, the gain exponent of the level-set iteration.
pub fn beta<T: Real>(dim: usize, p: T) -> Result<T> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if !(p > T::zero()) {
        return Err(Error::invalid(format!("p must be positive, got {p}")));
    }
    let b = T::lit(2.0) / T::from_count(dim + 2) - p.recip();
    if b > T::zero() {
        Ok(b)
    } else {
        Err(Error::ExponentOutOfRange(format!(
            "β = 2/(N+2) − 1/p = {b} ≤ 0 for N = {dim}, p = {p}; need p > (N+2)/2"
        )))
    }
}

/// Inputs of the lemma constants.
///
/// `mu_minus` only enters the full form of `A`; `b` only enters `ν₊`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct LemmaParams<T> {
    pub dim: usize,
    pub p: T,
    pub a: T,
    pub xi: T,
    pub theta: T,
    pub omega: T,
    #[serde(default)]
    pub mu_minus: T,
    #[serde(default)]
    pub b: T,
    #[serde(default = "one")]
    pub gamma: T,
}

fn one<T: Real>() -> T {
    T::one()
}

fn open_unit<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v < T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in (0,1), got {v}")))
    }
}

fn positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl<T: Real> LemmaParams<T> {
    /// Parameters with `μ₋ = 0`, `b = 0` and `γ = 1`.
    pub fn new(dim: usize, p: T, a: T, xi: T, theta: T, omega: T) -> Self {
        Self {
            dim,
            p,
            a,
            xi,
            theta,
            omega,
            mu_minus: T::zero(),
            b: T::zero(),
            gamma: T::one(),
        }
    }

    pub fn with_mu_minus(mut self, mu_minus: T) -> Self {
        self.mu_minus = mu_minus;
        self
    }

    pub fn with_b(mut self, b: T) -> Self {
        self.b = b;
        self
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    fn validate_common(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        open_unit("a", self.a)?;
        open_unit("ξ", self.xi)?;
        positive("θ", self.theta)?;
        positive("ω", self.omega)?;
        positive("γ", self.gamma)
    }
}

/// Full `A`, valid for any `μ₋ ≥ 0`:
/// `γ/(1−a)² [((μ₋+ξω)/θ)^{N/(N+2)} + γ_o (θ/(μ₋+aξω))^{2/(N+2)}]`
/// with `γ_o = ((μ₋+ξω)/(μ₋+aξω))^{N/(N+2)}`.
pub fn a_full<T: Real>(params: &LemmaParams<T>) -> Result<T> {
    params.validate_common()?;
    let m = params.mu_minus;
    if !(m >= T::zero() && m.is_finite()) {
        return Err(Error::invalid(format!("μ₋ must be non-negative, got {m}")));
    }
    let (e1, e2) = exponents::<T>(params.dim);
    let xw = params.xi * params.omega;
    let upper = m + xw;
    let lower = m + params.a * xw;
    let gamma_o = (upper / lower).powf(e1);
    let bracket = (upper / params.theta).powf(e1) + gamma_o * (params.theta / lower).powf(e2);
    Ok(prefactor(params) * bracket)
}

/// Reduced `A = γ/(1−a)² [(ξω/θ)^{N/(N+2)} + (θ/(aξω))^{2/(N+2)}]`, used
/// when `μ₋` is small compared with `ξω`.
pub fn a_reduced<T: Real>(params: &LemmaParams<T>) -> Result<T> {
    params.validate_common()?;
    let (e1, e2) = exponents::<T>(params.dim);
    let xw = params.xi * params.omega;
    let bracket = (xw / params.theta).powf(e1) + (params.theta / (params.a * xw)).powf(e2);
    Ok(prefactor(params) * bracket)
}

fn exponents<T: Real>(dim: usize) -> (T, T) {
    let d = T::from_count(dim + 2);
    (T::from_count(dim) / d, T::lit(2.0) / d)
}

fn prefactor<T: Real>(params: &LemmaParams<T>) -> T {
    params.gamma / (T::one() - params.a).powi(2)
}

/// `ln ν₋ = −ln A / β − ln 16 / β²`.
///
/// For small `β` the threshold is far below the smallest normal float, so
/// the logarithm is the quantity worth reporting.
pub fn ln_nu_minus<T: Real>(params: &LemmaParams<T>, reduced: bool) -> Result<T> {
    let b = beta(params.dim, params.p)?;
    let a = if reduced { a_reduced(params)? } else { a_full(params)? };
    Ok(-a.ln() / b - T::lit(16.0).ln() / (b * b))
}

/// `ν₋ = A^{−1/β} 16^{−1/β²}`; may underflow to zero, see [`ln_nu_minus`].
pub fn nu_minus<T: Real>(params: &LemmaParams<T>, reduced: bool) -> Result<T> {
    Ok(ln_nu_minus(params, reduced)?.exp())
}

/// `ν₊ = [(1−a)²(1−ξ) / (γ 4^{N+2} (b+1)^{N/(N+2)})]^{(N+2)/2} · (ω/θ)/(1+ω/θ)^{(N+2)/2}`.
pub fn nu_plus<T: Real>(params: &LemmaParams<T>) -> Result<T> {
    params.validate_common()?;
    if !(params.b >= T::zero() && params.b.is_finite()) {
        return Err(Error::invalid(format!("b must be non-negative, got {}", params.b)));
    }
    Ok(nu_plus_unchecked(params))
}

fn nu_plus_unchecked<T: Real>(params: &LemmaParams<T>) -> T {
    let n = params.dim;
    let (e1, _) = exponents::<T>(n);
    let half = T::from_count(n + 2) / T::lit(2.0);
    let base = (T::one() - params.a).powi(2) * (T::one() - params.xi)
        / (params.gamma * T::lit(4.0).powi(n as i32 + 2) * (params.b + T::one()).powf(e1));
    let r = params.omega / params.theta;
    base.powf(half) * r / (T::one() + r).powf(half)
}

/// The lemma constants evaluated for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct DeGiorgiConstants<T> {
    pub params: LemmaParams<T>,
    /// Whether `A` uses the reduced form.
    pub reduced: bool,
    pub beta: T,
    pub big_a: T,
    pub nu_minus: T,
    pub ln_nu_minus: T,
    pub nu_plus: T,
    /// Fast-geometric-convergence threshold for `C = A`, `b = 16`.
    pub fgc_threshold: T,
}

impl<T: Real> DeGiorgiConstants<T> {
    pub fn compute(params: LemmaParams<T>, reduced: bool) -> Result<Self> {
        let beta = beta(params.dim, params.p)?;
        let big_a = if reduced { a_reduced(&params)? } else { a_full(&params)? };
        let ln_nu_minus = ln_nu_minus(&params, reduced)?;
        let nu_plus = nu_plus(&params)?;
        let fgc_threshold = super::fgc_threshold(big_a, T::lit(16.0), beta)?;
        Ok(Self {
            params,
            reduced,
            beta,
            big_a,
            nu_minus: ln_nu_minus.exp(),
            ln_nu_minus,
            nu_plus,
            fgc_threshold,
        })
    }

    /// Parameters of the final stage of the oscillation argument:
    /// `a = 1/2`, `b = 1/8`, `θ = ν₋ω/2`, with `ν₋` from the given
    /// lower-lemma parameters.
    pub fn case_three(lower: &LemmaParams<T>, reduced: bool, xi: T) -> Result<Self> {
        let nu_m = nu_minus(lower, reduced)?;
        let theta = T::lit(0.5) * nu_m * lower.omega;
        if !(theta > T::zero()) {
            return Err(Error::invalid("ν₋ underflows; the upper lemma's θ = ν₋ω/2 vanishes"));
        }
        let params = LemmaParams {
            a: T::lit(0.5),
            b: T::lit(0.125),
            theta,
            xi,
            ..lower.clone()
        };
        Self::compute(params, reduced)
    }
}
