//! Continuity indicator, oscillation curves, the modulus-of-continuity bound
//! and audits of the energy/logarithmic estimates on discrete fields.

mod audit;
mod fit;
mod indicator;

pub use audit::{audit_energy_sub, audit_energy_super, audit_log_estimate, psi, AuditReport};
pub use fit::{fit_theorem1, indicator_radius, powerlaw_fit, theorem1_bound, ModulusParams, PowerLawFit};
pub use indicator::{
    envelope, geometric_radii, indicator, indicator_curve, indicator_from_gradient, normalized_energy, osc_curve,
    so_indicator, validate_exponent, IndicatorCurve, OscCurve,
};
