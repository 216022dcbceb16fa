//! Numeric audits of the energy and logarithmic estimates.
//!
//! An audit evaluates both sides of an inequality term by term on a discrete
//! field and reports `lhs / rhs`. The inequalities hold with an unspecified
//! constant, so the ratio is the measured stand-in for that constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{grad_log, gradient, CutoffField, NodeBox, ParabolicCylinder, ScalarField, VectorField};
use crate::scalar::{neg_part, pos_part, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport<T> {
    pub lhs_terms: Vec<(String, T)>,
    pub rhs_terms: Vec<(String, T)>,
    /// `lhs_total / rhs_total`; `0` when both vanish, `∞` when only the
    /// right side does.
    pub empirical_ratio: T,
}

impl<T: Real> AuditReport<T> {
    fn from_terms(lhs: Vec<(&str, T)>, rhs: Vec<(&str, T)>) -> Self {
        let own = |v: Vec<(&str, T)>| v.into_iter().map(|(n, x)| (n.to_string(), x)).collect::<Vec<_>>();
        let l: T = lhs.iter().map(|t| t.1).sum();
        let r: T = rhs.iter().map(|t| t.1).sum();
        let empirical_ratio = if r > T::zero() {
            l / r
        } else if l > T::zero() {
            T::infinity()
        } else {
            T::zero()
        };
        Self {
            lhs_terms: own(lhs),
            rhs_terms: own(rhs),
            empirical_ratio,
        }
    }

    pub fn lhs_total(&self) -> T {
        self.lhs_terms.iter().map(|t| t.1).sum()
    }

    pub fn rhs_total(&self) -> T {
        self.rhs_terms.iter().map(|t| t.1).sum()
    }

    pub fn term(&self, name: &str) -> Option<T> {
        self.lhs_terms
            .iter()
            .chain(&self.rhs_terms)
            .find(|(n, _)| n == name)
            .map(|t| t.1)
    }

    pub fn is_finite(&self) -> bool {
        self.empirical_ratio.is_finite() && self.lhs_terms.iter().chain(&self.rhs_terms).all(|t| t.1.is_finite())
    }
}

struct Audit<'a, T: Real> {
    field: &'a ScalarField<T>,
    zeta: &'a CutoffField<T>,
    nb: NodeBox,
    spatial: Vec<usize>,
    initial: usize,
    dzeta: VectorField<T>,
}

impl<'a, T: Real> Audit<'a, T> {
    fn new(field: &'a ScalarField<T>, cyl: &ParabolicCylinder<T>, zeta: &'a CutoffField<T>) -> Result<Self> {
        let grid = field.grid();
        if zeta.grid() != grid {
            return Err(Error::invalid("cutoff and field live on different grids"));
        }
        let nb = cyl.require_inside(grid)?;
        let initial = cyl
            .initial_slice(grid)
            .ok_or_else(|| Error::OutOfDomain("cylinder has no initial slice on the grid".into()))?;
        let spatial = nb.spatial_indices(grid);
        for k in std::iter::once(initial).chain(nb.slices()) {
            if let Some(&lin) = spatial.iter().find(|&&lin| !(field.value(k, lin) > T::zero())) {
                return Err(Error::invalid(format!(
                    "field must be positive on the audited cylinder; slice {k}, node {lin} holds {}",
                    field.value(k, lin)
                )));
            }
        }
        Ok(Self {
            field,
            zeta,
            nb,
            spatial,
            initial,
            dzeta: gradient(grid, zeta.values()),
        })
    }

    fn slice_integral(&self, k: usize, f: impl Fn(usize, usize) -> T) -> T {
        let s: T = self.spatial.iter().map(|&lin| f(k, lin)).sum();
        s * self.field.grid().spatial_cell_volume()
    }

    /// Supremum over the slices of the cylinder and its initial slice: the
    /// slice integrals are continuous in time, so the supremum over the
    /// half-open interval is the one over its closure.
    fn sup_in_time(&self, f: impl Fn(usize, usize) -> T) -> T {
        std::iter::once(self.initial)
            .chain(self.nb.slices())
            .map(|k| self.slice_integral(k, &f))
            .fold(T::zero(), T::max)
    }

    fn double_integral(&self, f: impl Fn(usize, usize) -> T) -> T {
        let s: T = self
            .nb
            .slices()
            .map(|k| self.spatial.iter().map(|&lin| f(k, lin)).sum::<T>())
            .sum();
        s * self.field.grid().cell_volume()
    }

    fn u(&self, k: usize, lin: usize) -> T {
        self.field.value(k, lin)
    }
    fn z(&self, k: usize, lin: usize) -> T {
        self.zeta.value(k, lin)
    }
    fn zt(&self, k: usize, lin: usize) -> T {
        self.zeta.time_derivative()[self.field.grid().index(k, lin)].abs()
    }
    fn dz2(&self, k: usize, lin: usize) -> T {
        self.dzeta.at(k, lin).iter().map(|&c| c * c).sum()
    }

    /// Gradient of `trunc(u) · ζ` over the whole grid.
    fn truncated_gradient(&self, trunc: impl Fn(T) -> T) -> VectorField<T> {
        let w: Vec<T> = self
            .field
            .values()
            .iter()
            .zip(self.zeta.values())
            .map(|(&u, &z)| trunc(u) * z)
            .collect();
        gradient(self.field.grid(), &w)
    }
}

fn sq_norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&c| c * c).sum()
}

/// Energy estimate for sub-solutions, applied to `(u − k)₊`.
///
/// Left: `sup_t ∫(u−k)₊²ζ²`, `∬|D[(u−k)₊ζ]|²/u`.
/// Right: `∫(u−k)₊²ζ²` at the initial time, `∬(u−k)₊²ζ|ζ_t|`,
/// `∬(u−k)₊²/u·|Dζ|²`.
pub fn audit_energy_sub<T: Real>(
    field: &ScalarField<T>,
    cyl: &ParabolicCylinder<T>,
    k: T,
    zeta: &CutoffField<T>,
) -> Result<AuditReport<T>> {
    if !(k > T::zero()) {
        return Err(Error::invalid(format!("energy audit needs a level k > 0, got {k}")));
    }
    let a = Audit::new(field, cyl, zeta)?;
    let v = |s: usize, lin: usize| pos_part(a.u(s, lin) - k);
    let dw = a.truncated_gradient(|u| pos_part(u - k));
    let sup = a.sup_in_time(|s, lin| (v(s, lin) * a.z(s, lin)).powi(2));
    let grad = a.double_integral(|s, lin| sq_norm(dw.at(s, lin)) / a.u(s, lin));
    let init = a.slice_integral(a.initial, |s, lin| (v(s, lin) * a.z(s, lin)).powi(2));
    let time = a.double_integral(|s, lin| v(s, lin).powi(2) * a.z(s, lin) * a.zt(s, lin));
    let space = a.double_integral(|s, lin| v(s, lin).powi(2) / a.u(s, lin) * a.dz2(s, lin));
    Ok(AuditReport::from_terms(
        vec![("sup_energy", sup), ("gradient_energy", grad)],
        vec![("initial_energy", init), ("time_cutoff", time), ("space_cutoff", space)],
    ))
}

/// Energy estimate for super-solutions, applied to `(u − k)₋`.
///
/// Left: `½ sup_t ∫(u−k)₋²ζ²`, `k⁻¹∬|D[(u−k)₋ζ]|²`.
/// Right: `½∫(u−k)₋²ζ²` at the initial time, `∬(u−k)₋²ζ|ζ_t|`,
/// `k⁻¹∬(u−k)₋²|Dζ|²`, `2∬|D ln u|(u−k)₋|Dζ|ζ`.
pub fn audit_energy_super<T: Real>(
    field: &ScalarField<T>,
    cyl: &ParabolicCylinder<T>,
    k: T,
    zeta: &CutoffField<T>,
) -> Result<AuditReport<T>> {
    if !(k > T::zero()) {
        return Err(Error::invalid(format!("energy audit needs a level k > 0, got {k}")));
    }
    let a = Audit::new(field, cyl, zeta)?;
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let v = |s: usize, lin: usize| neg_part(a.u(s, lin) - k);
    let dw = a.truncated_gradient(|u| neg_part(u - k));
    let dlog = grad_log(field);
    let sup = half * a.sup_in_time(|s, lin| (v(s, lin) * a.z(s, lin)).powi(2));
    let grad = a.double_integral(|s, lin| sq_norm(dw.at(s, lin))) / k;
    let init = half * a.slice_integral(a.initial, |s, lin| (v(s, lin) * a.z(s, lin)).powi(2));
    let time = a.double_integral(|s, lin| v(s, lin).powi(2) * a.z(s, lin) * a.zt(s, lin));
    let space = a.double_integral(|s, lin| v(s, lin).powi(2) * a.dz2(s, lin)) / k;
    let cross = two * a.double_integral(|s, lin| dlog.norm(s, lin) * v(s, lin) * a.dz2(s, lin).sqrt() * a.z(s, lin));
    Ok(AuditReport::from_terms(
        vec![("half_sup_energy", sup), ("gradient_energy", grad)],
        vec![
            ("half_initial_energy", init),
            ("time_cutoff", time),
            ("space_cutoff", space),
            ("log_gradient_cross", cross),
        ],
    ))
}

/// `ψ(u) = ln⁺[H / (H − (u−k)₊ + c)]`.
pub fn psi<T: Real>(u: T, h: T, k: T, c: T) -> Result<T> {
    if !(h > T::zero()) {
        return Err(Error::invalid(format!("ψ needs H > 0, got {h}")));
    }
    if !(c > T::zero() && c < h.min(T::one())) {
        return Err(Error::invalid(format!(
            "ψ needs 0 < c < min(1, H), got c = {c}, H = {h}"
        )));
    }
    if !(u >= T::zero()) {
        return Err(Error::invalid(format!("ψ needs u ≥ 0, got {u}")));
    }
    let v = pos_part(u - k);
    if v > h {
        return Err(Error::invalid(format!("(u−k)₊ = {v} exceeds H = {h}")));
    }
    Ok(psi_unchecked(v, h, c))
}

#[inline]
fn psi_unchecked<T: Real>(v: T, h: T, c: T) -> T {
    (h / (h - v + c)).ln().max(T::zero())
}

/// Logarithmic estimate for a time-independent cutoff.
///
/// Left: `sup_t ∫ψ²ζ²`. Right: `∫ψ²ζ²` at the initial time, `∬ψ/u·|Dζ|²`.
/// `H` is the maximum of `(u−k)₊` over the closed cylinder; when it
/// vanishes every term is zero.
pub fn audit_log_estimate<T: Real>(
    field: &ScalarField<T>,
    cyl: &ParabolicCylinder<T>,
    k: T,
    c: T,
    zeta: &CutoffField<T>,
) -> Result<AuditReport<T>> {
    if !zeta.is_time_independent() {
        return Err(Error::invalid(
            "the logarithmic estimate needs a cutoff independent of t",
        ));
    }
    if !(k >= T::zero()) {
        return Err(Error::invalid(format!("level k must be non-negative, got {k}")));
    }
    let a = Audit::new(field, cyl, zeta)?;
    let mut h = T::zero();
    for s in std::iter::once(a.initial).chain(a.nb.slices()) {
        for &lin in &a.spatial {
            h = h.max(pos_part(a.u(s, lin) - k));
        }
    }
    let names_l = ["sup_log_energy"];
    let names_r = ["initial_log_energy", "space_cutoff"];
    if h == T::zero() {
        return Ok(AuditReport::from_terms(
            names_l.iter().map(|&n| (n, T::zero())).collect(),
            names_r.iter().map(|&n| (n, T::zero())).collect(),
        ));
    }
    if !(c > T::zero() && c < h.min(T::one())) {
        return Err(Error::invalid(format!("need 0 < c < min(1, H), got c = {c}, H = {h}")));
    }
    let ps = |s: usize, lin: usize| psi_unchecked(pos_part(a.u(s, lin) - k), h, c);
    let sup = a.sup_in_time(|s, lin| (ps(s, lin) * a.z(s, lin)).powi(2));
    let init = a.slice_integral(a.initial, |s, lin| (ps(s, lin) * a.z(s, lin)).powi(2));
    let space = a.double_integral(|s, lin| ps(s, lin) / a.u(s, lin) * a.dz2(s, lin));
    Ok(AuditReport::from_terms(
        vec![(names_l[0], sup)],
        vec![(names_r[0], init), (names_r[1], space)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_cutoff, CutoffProfile, SpaceTimeGrid, SpacetimePoint};

    fn setup(c: f64, profile: CutoffProfile) -> (ScalarField<f64>, ParabolicCylinder<f64>, CutoffField<f64>) {
        let g = SpaceTimeGrid::<f64>::from_box(2, -0.6, 0.6, 25, -1.2, 0.0, 24).unwrap();
        let f = ScalarField::constant(g.clone(), c).unwrap();
        let q = ParabolicCylinder::standard(SpacetimePoint::new(vec![0.0, 0.0], 0.0), 1.0).unwrap();
        let z = make_cutoff(&g, &q, 0.5, profile).unwrap();
        (f, q, z)
    }

    #[test]
    fn sub_audit_trivial_level() {
        let (f, q, z) = setup(2.0, CutoffProfile::SpaceTime);
        let r = audit_energy_sub(&f, &q, 3.0, &z).unwrap();
        assert_eq!(r.lhs_total(), 0.0);
        assert_eq!(r.rhs_total(), 0.0);
        assert_eq!(r.empirical_ratio, 0.0);
        assert!(matches!(
            audit_energy_sub(&f, &q, 0.0, &z),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn sub_audit_constant_field_closed_form() {
        let (f, q, z) = setup(2.0, CutoffProfile::SpaceOnly);
        let r = audit_energy_sub(&f, &q, 0.5, &z).unwrap();
        assert_eq!(r.term("time_cutoff"), Some(0.0));
        let sup = r.term("sup_energy").unwrap();
        let init = r.term("initial_energy").unwrap();
        assert!((sup - init).abs() <= 1e-14 * sup);
        let g = r.term("gradient_energy").unwrap();
        let s = r.term("space_cutoff").unwrap();
        assert!(g > 0.0 && (g - s).abs() <= 1e-12 * s);
        assert!(r.empirical_ratio <= 1.0 + 1e-12);
        // closed form of the sup term: (c−k)² Σ ζ² h²
        let h2 = f.grid().spatial_cell_volume();
        let zsum: f64 = z.values()[..f.grid().nodes_per_slice()].iter().map(|v| v * v).sum();
        assert!((sup - 2.25 * zsum * h2).abs() < 1e-12);
    }

    #[test]
    fn super_audit_cases() {
        let (f, q, z) = setup(2.0, CutoffProfile::SpaceTime);
        let r = audit_energy_super(&f, &q, 1.5, &z).unwrap();
        assert_eq!(r.lhs_total(), 0.0);
        assert_eq!(r.rhs_total(), 0.0);

        let r = audit_energy_super(&f, &q, 3.0, &z).unwrap();
        assert_eq!(r.term("log_gradient_cross"), Some(0.0));
        assert_eq!(r.term("half_initial_energy"), Some(0.0));
        let grid = f.grid();
        let nb = q.nodes_in(grid).unwrap();
        let sp = nb.spatial_indices(grid);
        let time: f64 = nb
            .slices()
            .map(|s| {
                sp.iter()
                    .map(|&l| z.value(s, l) * z.time_derivative()[grid.index(s, l)])
                    .sum::<f64>()
            })
            .sum::<f64>()
            * grid.cell_volume();
        assert!((r.term("time_cutoff").unwrap() - time).abs() < 1e-12);
        let g = r.term("gradient_energy").unwrap();
        let s = r.term("space_cutoff").unwrap();
        assert!((g - s).abs() <= 1e-12 * s);
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(0.5, 1.0, 1.0, 0.5).unwrap(), 0.0);
        assert!((psi(3.0, 1.0, 2.0, 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(psi(3.0, 1.0, 2.0, 1.0).is_err());
        assert!(psi(3.0, 2.0, 2.0, 0.0).is_err());
        for u in [0.0, 0.5, 1.0, 1.7, 2.0, 2.4] {
            assert!(psi(u, 0.5, 1.9, 0.1).unwrap() <= (0.5f64 / 0.1).ln() + 1e-15);
        }
    }

    #[test]
    fn log_audit_cases() {
        let (f, q, z) = setup(2.0, CutoffProfile::SpaceOnly);
        let r = audit_log_estimate(&f, &q, 2.5, 0.1, &z).unwrap();
        assert_eq!(r.lhs_total(), 0.0);
        assert_eq!(r.rhs_total(), 0.0);

        let r = audit_log_estimate(&f, &q, 1.5, 0.1, &z).unwrap();
        assert_eq!(r.term("sup_log_energy"), r.term("initial_log_energy"));
        assert!(r.term("space_cutoff").unwrap() > 0.0);

        let (f, q, z) = setup(2.0, CutoffProfile::SpaceTime);
        assert!(matches!(
            audit_log_estimate(&f, &q, 1.5, 0.1, &z),
            Err(Error::InvalidArgument(_))
        ));
    }
}
