use serde::{Deserialize, Serialize};

use super::constants::{ln_nu_minus, nu_plus, LemmaParams};
use crate::diagnostics::indicator_from_gradient;
use crate::error::{Error, Result};
use crate::geometry::{grad_log, LevelSet, NodeBox, ParabolicCylinder, ScalarField, SpacetimePoint};
use crate::scalar::Real;

/// Geometry and parameters shared by both lemma checkers.
///
/// The hypothesis is evaluated on `vertex + Q_{ρ_hyp}(θ)` and the
/// conclusion on `vertex + Q_{ρ_con}(θ)`. `mu_minus`/`mu_plus` default to
/// the minimum/maximum of the field over the hypothesis cylinder; explicit
/// values must bracket the field there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct LemmaSetup<T> {
    pub vertex: SpacetimePoint<T>,
    pub rho_hyp: T,
    pub rho_con: T,
    pub theta: T,
    pub xi: T,
    pub a: T,
    #[serde(default = "one")]
    pub gamma: T,
    #[serde(default)]
    pub mu_minus: Option<T>,
    #[serde(default)]
    pub mu_plus: Option<T>,
}

fn one<T: Real>() -> T {
    T::one()
}

impl<T: Real> LemmaSetup<T> {
    pub fn new(vertex: SpacetimePoint<T>, rho_hyp: T, rho_con: T, theta: T, xi: T, a: T) -> Self {
        Self {
            vertex,
            rho_hyp,
            rho_con,
            theta,
            xi,
            a,
            gamma: T::one(),
            mu_minus: None,
            mu_plus: None,
        }
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_bounds(mut self, mu_minus: Option<T>, mu_plus: Option<T>) -> Self {
        self.mu_minus = mu_minus;
        self.mu_plus = mu_plus;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LemmaKind {
    #[serde(rename = "lower")]
    Lower,
    #[serde(rename = "upper")]
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaStatus {
    /// The measure hypothesis fails; the lemma says nothing.
    HypothesisNotMet,
    /// Hypothesis met and at least one conclusion holds.
    Concluded,
    /// Hypothesis met and every conclusion fails.
    Counterexample,
    /// A standing assumption (positive ω, the `ω ≥ μ₊/(b+1)` condition) fails.
    PreconditionViolated,
}

/// Outcome of one lemma check; serialises to one JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaVerdict<T> {
    pub lemma: LemmaKind,
    pub status: LemmaStatus,
    pub hypothesis_met: bool,
    /// `ξω ≤ I_{p,ρ_hyp}`; lower lemma only.
    pub alt_indicator: Option<bool>,
    pub alt_pointwise: bool,
    pub mu_minus: T,
    pub mu_plus: T,
    pub omega: T,
    pub gamma: T,
    /// Level defining the hypothesis set.
    pub level: T,
    /// `|level set ∩ Q_hyp| / |Q_hyp|`.
    pub measure_fraction: T,
    /// `ν` the fraction is compared with (may underflow to 0).
    pub nu: T,
    pub ln_nu: T,
    pub indicator: Option<T>,
    /// Signed slack of the pointwise conclusion: positive when it holds.
    pub pointwise_margin: T,
    /// Whether the conclusion was checked on the one-cell-shrunk cube.
    pub slack_applied: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

struct Prepared<T: Real> {
    hyp: ParabolicCylinder<T>,
    con_nodes: Vec<(usize, usize)>,
    slack_applied: bool,
    mu_minus: T,
    mu_plus: T,
}

fn prepare<T: Real>(field: &ScalarField<T>, setup: &LemmaSetup<T>) -> Result<Prepared<T>> {
    let grid = field.grid();
    if setup.vertex.dim() != grid.dim() {
        return Err(Error::invalid("vertex dimension differs from the grid"));
    }
    for (name, v) in [("ξ", setup.xi), ("a", setup.a)] {
        if !(v > T::zero() && v < T::one()) {
            return Err(Error::invalid(format!("{name} must lie in (0,1), got {v}")));
        }
    }
    if !(setup.gamma > T::zero()) {
        return Err(Error::invalid(format!("γ must be positive, got {}", setup.gamma)));
    }
    let hyp = ParabolicCylinder::new(setup.vertex.clone(), setup.rho_hyp, setup.theta)?;
    let con = ParabolicCylinder::new(setup.vertex.clone(), setup.rho_con, setup.theta)?;
    let hyp_nodes = hyp.require_inside(grid)?;
    let con_box = con.require_inside(grid)?;

    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    each(field, &hyp_nodes, |v| {
        lo = lo.min(v);
        hi = hi.max(v);
    });
    let mu_minus = match setup.mu_minus {
        Some(m) if m > lo => {
            return Err(Error::invalid(format!("μ₋ = {m} exceeds the field minimum {lo}")));
        }
        Some(m) if m < T::zero() => return Err(Error::invalid(format!("μ₋ must be non-negative, got {m}"))),
        Some(m) => m,
        None => lo,
    };
    let mu_plus = match setup.mu_plus {
        Some(m) if m < hi => {
            return Err(Error::invalid(format!("μ₊ = {m} is below the field maximum {hi}")));
        }
        Some(m) => m,
        None => hi,
    };

    let (con_nodes, slack_applied) = conclusion_nodes(field, &con, &con_box);
    Ok(Prepared {
        hyp,
        con_nodes,
        slack_applied,
        mu_minus,
        mu_plus,
    })
}

fn each<T: Real>(field: &ScalarField<T>, nb: &NodeBox, mut f: impl FnMut(T)) {
    let grid = field.grid();
    let spatial = nb.spatial_indices(grid);
    for k in nb.slices() {
        for &lin in &spatial {
            f(field.value(k, lin));
        }
    }
}

/// Conclusion nodes with the outermost spatial layer dropped; falls back to
/// the full cube when nothing would remain.
fn conclusion_nodes<T: Real>(
    field: &ScalarField<T>,
    con: &ParabolicCylinder<T>,
    nb: &NodeBox,
) -> (Vec<(usize, usize)>, bool) {
    let grid = field.grid();
    let center = &con.vertex().x;
    let reach = con.radius() / T::lit(2.0) - grid.h() * (T::one() - T::index_tol());
    let mut x = vec![T::zero(); grid.dim()];
    let spatial = nb.spatial_indices(grid);
    let inner: Vec<usize> = spatial
        .iter()
        .copied()
        .filter(|&lin| {
            grid.point(lin, &mut x);
            x.iter().zip(center).all(|(&xi, &ci)| (xi - ci).abs() <= reach)
        })
        .collect();
    let (chosen, slack) = if inner.is_empty() {
        (spatial, false)
    } else {
        (inner, true)
    };
    let nodes = nb
        .slices()
        .flat_map(|k| chosen.iter().map(move |&lin| (k, lin)))
        .collect();
    (nodes, slack)
}

fn fraction<T: Real>(field: &ScalarField<T>, hyp: &ParabolicCylinder<T>, level: T, dir: LevelSet) -> Result<T> {
    let nb = hyp.nodes_in(field.grid())?;
    let mut count = 0usize;
    each(field, &nb, |v| {
        if dir.holds(v, level) {
            count += 1;
        }
    });
    Ok(T::from_count(count) / T::from_count(nb.count()))
}

fn status(hypothesis: bool, any_alternative: bool) -> LemmaStatus {
    match (hypothesis, any_alternative) {
        (false, _) => LemmaStatus::HypothesisNotMet,
        (true, true) => LemmaStatus::Concluded,
        (true, false) => LemmaStatus::Counterexample,
    }
}

/// Lower lemma: if `|[u ≤ μ₋+ξω] ∩ Q_hyp| ≤ ν₋|Q_hyp|` then either
/// `ξω ≤ I_{p,ρ_hyp}` or `u ≥ μ₋+aξω` on the conclusion cylinder.
///
/// `ν₋` uses the full form of `A` with the local `μ₋` and `ω`, so it is
/// recomputed for every cylinder checked.
pub fn check_lemma41<T: Real>(field: &ScalarField<T>, setup: &LemmaSetup<T>, p: T) -> Result<LemmaVerdict<T>> {
    let prep = prepare(field, setup)?;
    let omega = prep.mu_plus - prep.mu_minus;
    let xw = setup.xi * omega;
    let level = prep.mu_minus + xw;
    let target = prep.mu_minus + setup.a * xw;
    let measure_fraction = fraction(field, &prep.hyp, level, LevelSet::AtOrBelow)?;
    let min_con = prep
        .con_nodes
        .iter()
        .map(|&(k, lin)| field.value(k, lin))
        .fold(T::infinity(), T::min);
    let pointwise_margin = min_con - target;
    let alt_pointwise = pointwise_margin >= T::zero();

    let g = grad_log(field);
    let ind = indicator_from_gradient(&g, &setup.vertex, setup.rho_hyp, p)?;
    let alt_indicator = xw <= ind;

    let mut verdict = LemmaVerdict {
        lemma: LemmaKind::Lower,
        status: LemmaStatus::PreconditionViolated,
        hypothesis_met: false,
        alt_indicator: Some(alt_indicator),
        alt_pointwise,
        mu_minus: prep.mu_minus,
        mu_plus: prep.mu_plus,
        omega,
        gamma: setup.gamma,
        level,
        measure_fraction,
        nu: T::zero(),
        ln_nu: T::neg_infinity(),
        indicator: Some(ind),
        pointwise_margin,
        slack_applied: prep.slack_applied,
        note: None,
    };
    if !(omega > T::zero()) {
        verdict.note = Some("ω = 0: the oscillation is already zero".into());
        return Ok(verdict);
    }
    let params = LemmaParams::new(field.grid().dim(), p, setup.a, setup.xi, setup.theta, omega)
        .with_mu_minus(prep.mu_minus)
        .with_gamma(setup.gamma);
    let ln_nu = ln_nu_minus(&params, false)?;
    // compare in log space: ν₋ routinely underflows
    let hypothesis_met = measure_fraction == T::zero() || measure_fraction.ln() <= ln_nu;
    verdict.ln_nu = ln_nu;
    verdict.nu = ln_nu.exp();
    verdict.hypothesis_met = hypothesis_met;
    verdict.status = status(hypothesis_met, alt_indicator || alt_pointwise);
    Ok(verdict)
}

/// Upper lemma: assuming `ω ≥ μ₊/(b+1)`, if `|[u ≥ μ₊−ξω] ∩ Q_hyp| ≤ ν₊|Q_hyp|`
/// then `u ≤ μ₊−aξω` on the conclusion cylinder.
pub fn check_lemma42<T: Real>(field: &ScalarField<T>, setup: &LemmaSetup<T>, b: T) -> Result<LemmaVerdict<T>> {
    if !(b >= T::zero() && b.is_finite()) {
        return Err(Error::invalid(format!("b must be non-negative, got {b}")));
    }
    let prep = prepare(field, setup)?;
    let omega = prep.mu_plus - prep.mu_minus;
    let xw = setup.xi * omega;
    let level = prep.mu_plus - xw;
    let target = prep.mu_plus - setup.a * xw;
    let measure_fraction = fraction(field, &prep.hyp, level, LevelSet::AtOrAbove)?;
    let max_con = prep
        .con_nodes
        .iter()
        .map(|&(k, lin)| field.value(k, lin))
        .fold(T::neg_infinity(), T::max);
    let pointwise_margin = target - max_con;
    let alt_pointwise = pointwise_margin >= T::zero();

    let mut verdict = LemmaVerdict {
        lemma: LemmaKind::Upper,
        status: LemmaStatus::PreconditionViolated,
        hypothesis_met: false,
        alt_indicator: None,
        alt_pointwise,
        mu_minus: prep.mu_minus,
        mu_plus: prep.mu_plus,
        omega,
        gamma: setup.gamma,
        level,
        measure_fraction,
        nu: T::zero(),
        ln_nu: T::neg_infinity(),
        indicator: None,
        pointwise_margin,
        slack_applied: prep.slack_applied,
        note: None,
    };
    if !(omega > T::zero()) || omega * (b + T::one()) < prep.mu_plus {
        verdict.note = Some(format!("ω = {omega} < μ₊/(b+1) = {}", prep.mu_plus / (b + T::one())));
        return Ok(verdict);
    }
    // ν₊ does not involve p; any admissible value satisfies the validator
    let params = LemmaParams::new(field.grid().dim(), T::lit(1.0e6), setup.a, setup.xi, setup.theta, omega)
        .with_b(b)
        .with_gamma(setup.gamma);
    let nu = nu_plus(&params)?;
    let hypothesis_met = measure_fraction <= nu;
    verdict.nu = nu;
    verdict.ln_nu = nu.ln();
    verdict.hypothesis_met = hypothesis_met;
    verdict.status = status(hypothesis_met, alt_pointwise);
    Ok(verdict)
}

/// Smallest `γ` among `gammas` (taken in increasing order) for which `run`
/// produces no counterexample verdict.
pub fn smallest_consistent_gamma<T: Real>(
    gammas: &[T],
    mut run: impl FnMut(T) -> Result<Vec<LemmaVerdict<T>>>,
) -> Result<Option<T>> {
    let mut sorted = gammas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    for g in sorted {
        if run(g)?.iter().all(|v| v.status != LemmaStatus::Counterexample) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SpaceTimeGrid;

    fn grid() -> SpaceTimeGrid<f64> {
        SpaceTimeGrid::from_box(1, -1.0, 1.0, 81, -1.0, 0.0, 100).unwrap()
    }

    fn setup() -> LemmaSetup<f64> {
        LemmaSetup::new(SpacetimePoint::new(vec![0.0], 0.0), 1.0, 0.25, 1.0, 0.5, 0.5)
    }

    #[test]
    fn lower_constant_above_level() {
        let f = ScalarField::constant(grid(), 2.0).unwrap();
        let s = setup().with_bounds(Some(1.0), Some(2.5));
        let v = check_lemma41(&f, &s, 3.0).unwrap();
        // level μ₋ + ξω = 1.75 < 2: empty level set
        assert_eq!(v.measure_fraction, 0.0);
        assert!(v.hypothesis_met);
        assert!(v.alt_pointwise);
        assert_eq!(v.alt_indicator, Some(false));
        assert_eq!(v.status, LemmaStatus::Concluded);
        assert!(v.slack_applied);
    }

    #[test]
    fn lower_field_below_level() {
        let f = ScalarField::constant(grid(), 1.2).unwrap();
        let s = setup().with_bounds(Some(1.0), Some(2.0));
        let v = check_lemma41(&f, &s, 3.0).unwrap();
        assert_eq!(v.measure_fraction, 1.0);
        assert!(!v.hypothesis_met);
        assert_eq!(v.status, LemmaStatus::HypothesisNotMet);
        let line = serde_json::to_string(&v).unwrap();
        assert!(!line.contains('\n'));
        let back: LemmaVerdict<f64> = serde_json::from_str(&line).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn lower_degenerate_and_bad_bounds() {
        let f = ScalarField::constant(grid(), 1.0).unwrap();
        let v = check_lemma41(&f, &setup(), 3.0).unwrap();
        assert_eq!(v.status, LemmaStatus::PreconditionViolated);
        assert!(check_lemma41(&f, &setup().with_bounds(Some(1.5), None), 3.0).is_err());
        let far = LemmaSetup::new(SpacetimePoint::new(vec![0.9], 0.0), 1.0, 0.25, 1.0, 0.5, 0.5);
        assert!(matches!(check_lemma41(&f, &far, 3.0), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn upper_constant_is_precondition_violated() {
        let f = ScalarField::constant(grid(), 1.0).unwrap();
        let v = check_lemma42(&f, &setup(), 0.125).unwrap();
        assert_eq!(v.status, LemmaStatus::PreconditionViolated);
        assert!(v.note.is_some());
    }

    #[test]
    fn upper_two_valued_field() {
        // one spike node in Q_hyp \ Q_con, everything else at μ₊ − ω
        let g = SpaceTimeGrid::from_box(1, -1.0, 1.0, 41, -4.0, 0.0, 1600).unwrap();
        let spike = g.index(g.n_slices() - 1, 2);
        let mut vals = vec![1.0; g.node_count()];
        vals[spike] = 2.0;
        let f = ScalarField::new(g, vals, 1e-12).unwrap();
        let s = LemmaSetup::new(SpacetimePoint::new(vec![0.0], 0.0), 2.0, 1.0, 1.0, 0.5, 0.5);
        let v = check_lemma42(&f, &s, 1.0).unwrap();
        assert_eq!(v.omega, 1.0);
        assert!(v.measure_fraction > 0.0 && v.measure_fraction <= v.nu, "{v:?}");
        assert!(v.hypothesis_met);
        assert!(v.alt_pointwise);
        assert_eq!(v.status, LemmaStatus::Concluded);
    }

    #[test]
    fn gamma_sweep_picks_smallest() {
        let mk = |g: f64, bad: bool| LemmaVerdict {
            lemma: LemmaKind::Lower,
            status: if bad {
                LemmaStatus::Counterexample
            } else {
                LemmaStatus::Concluded
            },
            hypothesis_met: true,
            alt_indicator: None,
            alt_pointwise: !bad,
            mu_minus: 0.0,
            mu_plus: 1.0,
            omega: 1.0,
            gamma: g,
            level: 0.5,
            measure_fraction: 0.0,
            nu: 0.1,
            ln_nu: 0.1f64.ln(),
            indicator: None,
            pointwise_margin: 0.0,
            slack_applied: true,
            note: None,
        };
        let r = smallest_consistent_gamma(&[100.0, 1.0, 10.0], |g| Ok(vec![mk(g, g < 5.0)])).unwrap();
        assert_eq!(r, Some(10.0));
        let r = smallest_consistent_gamma(&[1.0], |g| Ok(vec![mk(g, true)])).unwrap();
        assert_eq!(r, None);
    }
}
