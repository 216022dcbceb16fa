//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p logdiff --test acceptance`. Exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use logdiff::degiorgi::{
    beta, check_lemma41, fgc, fgc_threshold, nu_minus, nu_plus, osc_recursion, smallest_consistent_gamma,
    DeGiorgiConstants, FgcVerdict, LemmaParams, LemmaSetup, LemmaStatus, LemmaVerdict,
};
use logdiff::diagnostics::{
    audit_energy_sub, audit_energy_super, audit_log_estimate, envelope, fit_theorem1, indicator_from_gradient,
    indicator_radius, powerlaw_fit, theorem1_bound, IndicatorCurve,
};
use logdiff::explicit::ExplicitSolution;
use logdiff::geometry::{
    essosc, make_cutoff, min_max, CutoffProfile, ParabolicCylinder, ScalarField, SpaceTimeGrid, SpacetimePoint,
};
use logdiff::hausdorff::{extract_so, parabolic_dimension, premeasure, CoverStrategy, SpacetimePointSet};
use logdiff::report::CsvTable;
use logdiff::snapshot::{read_snapshot, write_snapshot};
use logdiff::solver::{run, OracleData, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn halton(mut i: usize, b: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// `I_{p,r}` of the exact gradient on a grid fitted to the cylinder
/// `(x0, t) + Q_r` with `n` nodes per axis and `steps` time steps.
fn local_indicator(
    sol: &ExplicitSolution<f64>,
    x0: &[f64],
    t: f64,
    r: f64,
    p: f64,
    n: usize,
    steps: usize,
) -> Result<f64, String> {
    let grid = local_grid(x0, t, r, n, steps)?;
    let g = sol.sample_grad_log(&grid).map_err(e)?;
    indicator_from_gradient(&g, &SpacetimePoint::new(x0.to_vec(), t), r, p).map_err(e)
}

fn local_grid(x0: &[f64], t: f64, r: f64, n: usize, steps: usize) -> Result<SpaceTimeGrid<f64>, String> {
    let origin = x0.iter().map(|&c| c - r / 2.0).collect();
    SpaceTimeGrid::new(
        x0.len(),
        r / (n - 1) as f64,
        n,
        r * r / steps as f64,
        steps,
        origin,
        t - r * r,
    )
    .map_err(e)
}

// 1 ------------------------------------------------------------------------

fn explicit_residual() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in [3usize, 4] {
        for lambda in [0.0, 0.5, 1.0] {
            let s = ExplicitSolution::new(n, lambda, 1.0).map_err(e)?;
            for i in 1..=1000 {
                let x: Vec<f64> = (0..n)
                    .map(|a| {
                        let v = 2.0 * halton(i, [2, 3, 5, 7][a]) - 1.0;
                        if v.abs() < 0.05 {
                            v + 0.05 * v.signum()
                        } else {
                            v
                        }
                    })
                    .collect();
                let t = 0.95 * halton(i, 11);
                worst = worst.max(s.residual(&x, t).map_err(e)?.abs());
            }
        }
    }
    let dt = start.elapsed();
    Ok((
        worst < 1e-10 && dt < Duration::from_secs(1),
        format!(
            "max |u_t − Δ ln u| = {worst:.2e} over 6000 points in {:.3}s",
            dt.as_secs_f64()
        ),
    ))
}

// 2 ------------------------------------------------------------------------

fn final_error(n: usize, steps: usize, richardson: bool) -> Result<(f64, f64), String> {
    let sol = ExplicitSolution::new(3, 1.0, 1.0).map_err(e)?;
    let t1 = 0.5;
    let data = OracleData { solution: sol, t0: 0.0 };
    let solve = |k: usize| -> Result<Vec<f64>, String> {
        let g = SpaceTimeGrid::from_box(3, -0.4, 0.6, n, 0.0, t1, k).map_err(e)?;
        let out = run(&SolverConfig::new(g), &data, k).map_err(e)?;
        Ok(out.field.slice(k).to_vec())
    };
    let coarse = solve(steps)?;
    let approx: Vec<f64> = if richardson {
        let fine = solve(2 * steps)?;
        fine.iter().zip(&coarse).map(|(f, c)| 2.0 * f - c).collect()
    } else {
        coarse
    };
    let g = SpaceTimeGrid::from_box(3, -0.4, 0.6, n, 0.0, t1, steps).map_err(e)?;
    let mut x = [0.0; 3];
    let mut err = 0.0f64;
    for (lin, v) in approx.iter().enumerate() {
        g.point(lin, &mut x);
        err = err.max((v - sol.eval(&x, t1).map_err(e)?).abs());
    }
    Ok((g.h(), err))
}

fn solver_convergence() -> Outcome {
    let start = Instant::now();
    // spatial: time-extrapolated solutions remove the O(dt) error
    let mut spatial = Vec::new();
    for n in [9usize, 17, 33] {
        spatial.push(final_error(n, 100, true)?);
    }
    let mut temporal = Vec::new();
    for steps in [4usize, 8, 16] {
        let (_, err) = final_error(17, steps, false)?;
        temporal.push((0.5 / steps as f64, err));
    }
    let ps = powerlaw_fit(&spatial).map_err(e)?.slope;
    let pt = powerlaw_fit(&temporal).map_err(e)?.slope;
    let dt = start.elapsed();
    Ok((
        (ps - 2.0).abs() <= 0.3 && (pt - 1.0).abs() <= 0.3 && dt < Duration::from_secs(300),
        format!(
            "spatial order {ps:.3} (errors {:.2e}, {:.2e}, {:.2e}); temporal order {pt:.3} (errors {:.2e}, {:.2e}, {:.2e}); {:.1}s",
            spatial[0].1,
            spatial[1].1,
            spatial[2].1,
            temporal[0].1,
            temporal[1].1,
            temporal[2].1,
            dt.as_secs_f64()
        ),
    ))
}

// 3 ------------------------------------------------------------------------

fn indicator_scaling() -> Outcome {
    let start = Instant::now();
    let sol = ExplicitSolution::new(3, 1.0, 1.0).map_err(e)?;
    let radii: Vec<f64> = (0..7).map(|k| 0.5 * 0.5f64.powi(k)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, target) in [(3.0, 10.0 / 3.0), (4.0, 3.0)] {
        let pts = radii
            .iter()
            .map(|&r| Ok((r, local_indicator(&sol, &[0.0; 3], 1.0, r, p, 24, 24)?)))
            .collect::<Result<Vec<_>, String>>()?;
        let slope = powerlaw_fit(&pts).map_err(e)?.slope;
        ok &= rel(slope, target) <= 0.10;
        parts.push(format!("p={p}: slope {slope:.3} vs {target:.3}"));
    }
    let dt = start.elapsed();
    ok &= dt < Duration::from_secs(60);
    Ok((
        ok,
        format!(
            "{} over r ∈ [{:.4}, {}] ({:.1} decades); {:.1}s",
            parts.join(", "),
            radii[6],
            radii[0],
            (radii[0] / radii[6]).log10(),
            dt.as_secs_f64()
        ),
    ))
}

// 4 ------------------------------------------------------------------------

fn indicator_dichotomy() -> Outcome {
    let start = Instant::now();
    let sol = ExplicitSolution::new(3, 0.0, 1.0).map_err(e)?;
    let t = 0.5;
    // fixed mesh width ≈ 0.01 across one decade of radii (even node counts
    // keep the singular column between nodes)
    let even = |r: f64| 2 * ((r / 0.01 / 2.0).round() as usize).max(2);
    let i_big = local_indicator(&sol, &[0.0; 3], t, 0.8, 2.75, even(0.8), 2)?;
    let i_small = local_indicator(&sol, &[0.0; 3], t, 0.08, 2.75, even(0.08), 2)?;
    let drift = (i_big - i_small).abs() / i_small;
    let coarse = local_indicator(&sol, &[0.0; 3], t, 0.4, 3.5, 40, 2)?;
    let fine = local_indicator(&sol, &[0.0; 3], t, 0.4, 3.5, 80, 2)?;
    let growth = fine / coarse;
    let dt = start.elapsed();
    Ok((
        drift < 0.05 && growth > 2.0 && dt < Duration::from_secs(120),
        format!(
            "p=2.75: I(0.8)={i_big:.3}, I(0.08)={i_small:.3}, change {:.1}% per decade (need < 5%); \
             p=3.5: refinement ratio {growth:.3} (need > 2); {:.1}s",
            100.0 * drift,
            dt.as_secs_f64()
        ),
    ))
}

// 5 ------------------------------------------------------------------------

fn theorem1_modulus() -> Outcome {
    let sol = ExplicitSolution::new(3, 1.0, 1.0).map_err(e)?;
    let r0 = 0.5;
    let mu = 0.5;
    let radii: Vec<f64> = (0..=16).map(|j| r0 * 10f64.powf(-(j as f64) / 8.0)).collect();
    let vertex = SpacetimePoint::new(vec![0.0; 3], 1.0);
    let mut ind = Vec::new();
    let mut osc = Vec::new();
    for &r in &radii {
        ind.push((r, local_indicator(&sol, &vertex.x, 1.0, r, 3.0, 20, 20)?));
        let grid = local_grid(&vertex.x, 1.0, r, 21, 20)?;
        let f = sol.sample(&grid).map_err(e)?;
        let q = ParabolicCylinder::standard(vertex.clone(), r).map_err(e)?;
        osc.push(essosc(&f, &q).map_err(e)?);
    }
    let curve = envelope(&IndicatorCurve::from_samples(vertex.clone(), 3.0, ind));
    let omega = osc[0];
    let samples = radii
        .iter()
        .zip(&osc)
        .map(|(&r, &o)| {
            let it = curve
                .envelope_at(indicator_radius(r0, r, mu))
                .ok_or("indicator ladder too short")?;
            Ok((r, o, it))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let params = fit_theorem1(&samples, omega, r0, mu).map_err(e)?;
    let all_below = samples
        .iter()
        .all(|&(r, o, it)| theorem1_bound(&params, r, it).is_ok_and(|b| o <= b));
    Ok((
        params.c_bar <= 100.0 && params.alpha > 0.0 && params.alpha < 1.0 && all_below,
        format!(
            "C̄ = {:.4}, α = {:.2}, ω = {omega:.3e}; osc ≤ bound at all {} radii in [{:.4}, {r0}]",
            params.c_bar,
            params.alpha,
            samples.len(),
            radii[16]
        ),
    ))
}

// 6 ------------------------------------------------------------------------

fn degiorgi_constants() -> Outcome {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    checks.push(("β(1,2) = 1/6", rel(beta(1, 2.0).map_err(e)?, 1.0 / 6.0) < 1e-9));
    checks.push(("β(3,3) = 1/15", rel(beta(3, 3.0).map_err(e)?, 1.0 / 15.0) < 1e-9));
    checks.push(("β(2,2) rejected", beta(2, 2.0f64).is_err()));
    let p = LemmaParams::new(1, 2.0, 0.5, 0.5, 1.0, 1.0);
    let a_hand = 4.0 * (0.5f64.powf(1.0 / 3.0) + 4f64.powf(2.0 / 3.0));
    let nu_hand = a_hand.powi(-6) * 16f64.powi(-36);
    checks.push((
        "ν₋ reduced example",
        rel(nu_minus(&p, true).map_err(e)?, nu_hand) < 1e-9,
    ));
    let q = LemmaParams::new(1, 2.0, 1e-12, 1e-12, 1.0, 1.0);
    checks.push((
        "ν₊ limit example",
        rel(nu_plus(&q).map_err(e)?, 2f64.powi(-9) * 2f64.powf(-1.5)) < 1e-9,
    ));
    let lower = LemmaParams::new(1, 3.0, 0.5, 0.5, 1.0, 1.0);
    let c3 = DeGiorgiConstants::case_three(&lower, true, 0.25).map_err(e)?;
    let r = 2.0 / nu_minus(&lower, true).map_err(e)?;
    let base: f64 = 0.75 / (4f64.powi(4) * (9.0f64 / 8.0).powf(1.0 / 3.0));
    checks.push((
        "ν₊ case III",
        rel(c3.nu_plus, base.powf(1.5) * r / (1.0 + r).powf(1.5)) < 1e-9,
    ));
    checks.push((
        "fgc threshold 16⁻⁴",
        rel(fgc_threshold(1.0, 16.0, 0.5).map_err(e)?, 16f64.powi(-4)) < 1e-9,
    ));
    let o = fgc(1e-6, 1.0, 16.0, 0.5, 50).map_err(e)?;
    checks.push((
        "fgc Y₁ = 1e−9",
        rel(o.sequence[1], 1e-9) < 1e-9 && o.verdict == FgcVerdict::Converged,
    ));

    let mut below_ok = true;
    for c in [0.5, 1.0, 10.0, 1e3] {
        for b in [2.0, 4.0, 16.0] {
            for beta in [0.15, 0.3, 0.5, 1.0] {
                let th = fgc_threshold(c, b, beta).map_err(e)?;
                if th == 0.0 {
                    continue;
                }
                for frac in [0.999, 0.5, 1e-3] {
                    let o = fgc(th * frac, c, b, beta, 50).map_err(e)?;
                    below_ok &= o.verdict == FgcVerdict::Converged && o.sequence.len() <= 51;
                }
            }
        }
    }
    checks.push(("fgc below threshold converges in ≤ 50 steps", below_ok));

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ladders_ok = true;
    for _ in 0..1000 {
        let n = rng.gen_range(1..40);
        let lambda: f64 = rng.gen_range(0.05..0.95);
        let c = rng.gen_range(0.01..0.999) * lambda.sqrt();
        let mut ladder: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        ladder.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let w0 = rng.gen_range(0.0..3.0);
        let table = ladder.clone();
        let t = osc_recursion(
            w0,
            1.0,
            lambda,
            c,
            move |r: f64| table[((r.ln() / c.ln()).round() as usize).min(table.len() - 1)],
            n,
        )
        .map_err(e)?;
        ladders_ok &= t
            .omega
            .iter()
            .enumerate()
            .all(|(k, &w)| w <= (lambda.powi(k as i32) * w0 + 2.0 / (1.0 - lambda) * ladder[0]) * (1.0 + 1e-12));
    }
    checks.push(("closed-form bound on 1000 ladders", ladders_ok));

    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Ok((
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} checks reproduced", checks.len())
        } else {
            format!("failed: {}", failed.join("; "))
        },
    ))
}

// 7 ------------------------------------------------------------------------

fn solver_field(n: usize, steps: usize, t1: f64) -> Result<ScalarField<f64>, String> {
    let sol = ExplicitSolution::new(3, 1.0, 1.0).map_err(e)?;
    let g = SpaceTimeGrid::from_box(3, -0.5, 0.5, n, 0.0, t1, steps).map_err(e)?;
    Ok(
        run(&SolverConfig::new(g), &OracleData { solution: sol, t0: 0.0 }, steps)
            .map_err(e)?
            .field,
    )
}

fn lemma_sweep(field: &ScalarField<f64>, seed: u64, gamma: f64) -> Result<Vec<LemmaVerdict<f64>>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(240);
    let g = field.grid();
    for _ in 0..240 {
        // vertices on grid nodes, so every conclusion cylinder holds a node
        let rho: f64 = rng.gen_range(0.15..0.45);
        let half = 0.5 - rho / 2.0;
        let i_lo = ((-half - g.origin()[0]) / g.h()).ceil() as usize;
        let i_hi = ((half - g.origin()[0]) / g.h()).floor() as usize;
        let x: Vec<f64> = (0..3).map(|a| g.coord(a, rng.gen_range(i_lo..=i_hi))).collect();
        let k_min = (rho * rho / g.dt()).ceil() as usize;
        let t = g.time(rng.gen_range(k_min..=g.n_steps()));
        let xi = rng.gen_range(0.1..0.9);
        let a = rng.gen_range(0.1..0.9);
        let setup = LemmaSetup::new(SpacetimePoint::new(x, t), rho, rho / 4.0, 1.0, xi, a).with_gamma(gamma);
        out.push(check_lemma41(field, &setup, 3.0).map_err(e)?);
    }
    Ok(out)
}

fn lemma_conformance() -> Outcome {
    let field = solver_field(17, 32, 0.5)?;
    let at100 = lemma_sweep(&field, 7, 100.0)?;
    let bad = at100.iter().filter(|v| v.status == LemmaStatus::Counterexample).count();
    let met = at100.iter().filter(|v| v.hypothesis_met).count();
    let gamma = smallest_consistent_gamma(&[1.0, 10.0, 100.0], |g| {
        lemma_sweep(&field, 7, g).map_err(logdiff::Error::Format)
    })
    .map_err(e)?;
    let max_ln_nu = at100.iter().map(|v| v.ln_nu).fold(f64::NEG_INFINITY, f64::max);
    Ok((
        bad == 0 && at100.len() >= 200,
        format!(
            "{} checks, {met} with hypothesis met, {bad} counterexamples at γ = 100; smallest sufficient γ = {}; ln ν₋ ≤ {max_ln_nu:.1}",
            at100.len(),
            gamma.map_or("none".to_string(), |g| g.to_string()),
        ),
    ))
}

// 8 ------------------------------------------------------------------------

fn covering_dimensions() -> Outcome {
    let start = Instant::now();
    let deltas = [0.4, 0.2, 0.1, 0.05];
    let pt = |x: Vec<f64>, t: f64| SpacetimePoint::new(x, t);
    let seg_t =
        SpacetimePointSet::new(1, (0..=20000).map(|i| pt(vec![0.0], -(i as f64) / 20000.0)).collect()).map_err(e)?;
    let seg_x =
        SpacetimePointSet::new(2, (0..=4000).map(|i| pt(vec![i as f64 / 4000.0, 0.0], 0.0)).collect()).map_err(e)?;
    let one = SpacetimePointSet::new(3, vec![pt(vec![0.1, 0.2, 0.3], 0.5)]).map_err(e)?;
    let d_t = parabolic_dimension(&seg_t, &deltas).map_err(e)?.dimension;
    let d_x = parabolic_dimension(&seg_x, &deltas).map_err(e)?.dimension;
    let d_p = parabolic_dimension(&one, &deltas).map_err(e)?.dimension;
    let dims_ok = (d_t - 2.0).abs() <= 0.2 && (d_x - 1.0).abs() <= 0.2 && d_p <= 0.1;

    // candidate discontinuity sets from Θ at the smallest radius
    let p = 2.75;
    let rho_min = 0.05;
    let times: Vec<f64> = (1..=20).map(|j| 0.04 * j as f64).collect();
    let lattice: Vec<Vec<f64>> = (0..125)
        .map(|i| {
            vec![
                0.1 * ((i / 25) as f64 - 2.0),
                0.1 * ((i / 5 % 5) as f64 - 2.0),
                0.1 * ((i % 5) as f64 - 2.0),
            ]
        })
        .collect();
    let curves = |lambda: f64| -> Result<Vec<IndicatorCurve<f64>>, String> {
        let sol = ExplicitSolution::new(3, lambda, 1.0).map_err(e)?;
        let mut out = Vec::new();
        for &t in &times {
            for x in &lattice {
                let samples = [0.1, rho_min]
                    .iter()
                    .map(|&r| Ok((r, local_indicator(&sol, x, t, r, p, 20, 2)?)))
                    .collect::<Result<Vec<_>, String>>()?;
                out.push(IndicatorCurve::from_samples(pt(x.clone(), t), p, samples));
            }
        }
        Ok(out)
    };
    let zero = curves(0.0)?;
    let off_column = zero
        .iter()
        .filter(|c| c.vertex.x.iter().any(|&v| v != 0.0))
        .map(|c| c.values.last().copied().unwrap_or(0.0).powf(p))
        .fold(0.0f64, f64::max);
    let eta = 10.0 * off_column;
    let so = extract_so(&zero, eta, rho_min).map_err(e)?;
    let on_column = !so.is_empty() && so.points().iter().all(|q| q.x.iter().all(|&v| v.abs() <= rho_min));
    let k = 3.0 + 2.0 - p;
    let values = [0.4, 0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&d| premeasure(&so, k, d, CoverStrategy::Grid).map(|c| c.value))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?;
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let so_one = extract_so(&curves(1.0)?, eta, rho_min).map_err(e)?;
    let dt = start.elapsed();
    Ok((
        dims_ok && on_column && decreasing && so_one.is_empty() && dt < Duration::from_secs(120),
        format!(
            "dims: time segment {d_t:.3}, spatial segment {d_x:.3}, point {d_p:.3}; λ=0: |S_o| = {} on x≈0: {on_column}, \
             P_{k} bounds {:?} decreasing: {decreasing}; λ=1: |S_o| = {} (η = {eta:.3}); {:.1}s",
            so.len(),
            values.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>(),
            so_one.len(),
            dt.as_secs_f64()
        ),
    ))
}

// 9 ------------------------------------------------------------------------

fn audit_ratios(n: usize, steps: usize) -> Result<[f64; 3], String> {
    let field = solver_field(n, steps, 0.25)?;
    let g = field.grid();
    let q = ParabolicCylinder::new(SpacetimePoint::new(vec![0.05, 0.0, -0.05], 0.25), 0.8, 0.25 / 0.64).map_err(e)?;
    // fixed levels inside the oracle's range [0.65, 2] on the cylinder, so
    // only the mesh changes between refinements
    let (lo, hi) = min_max(&field, &q).map_err(e)?;
    let k = 1.3;
    if !(lo < k && k < hi) {
        return Err(format!("level {k} outside the field range [{lo}, {hi}]"));
    }
    let zt = make_cutoff(g, &q, 0.5, CutoffProfile::SpaceTime).map_err(e)?;
    let zs = make_cutoff(g, &q, 0.5, CutoffProfile::SpaceOnly).map_err(e)?;
    let sub = audit_energy_sub(&field, &q, k, &zt).map_err(e)?;
    let sup = audit_energy_super(&field, &q, k, &zt).map_err(e)?;
    let log = audit_log_estimate(&field, &q, k, 0.1, &zs).map_err(e)?;
    Ok([sub.empirical_ratio, sup.empirical_ratio, log.empirical_ratio])
}

fn inequality_audits() -> Outcome {
    let coarse = audit_ratios(17, 16)?;
    let fine = audit_ratios(33, 32)?;
    let names = ["sub-solution energy", "super-solution energy", "logarithmic"];
    let mut ok = true;
    let mut parts = Vec::new();
    for i in 0..3 {
        let finite = coarse[i].is_finite() && fine[i].is_finite() && coarse[i] > 0.0;
        let change = (fine[i] - coarse[i]).abs() / coarse[i];
        ok &= finite && change < 0.2;
        parts.push(format!(
            "{}: {:.4} → {:.4} ({:.1}%)",
            names[i],
            coarse[i],
            fine[i],
            100.0 * change
        ));
    }
    Ok((ok, parts.join("; ")))
}

// 10 -----------------------------------------------------------------------

fn infrastructure() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let path = dir.path().join("field.ldf");
    let field = solver_field(9, 4, 0.2)?;
    write_snapshot(&path, &field).map_err(e)?;
    let back = read_snapshot(&path).map_err(e)?;
    let bit_exact = back.grid() == field.grid()
        && back.values().len() == field.values().len()
        && back
            .values()
            .iter()
            .zip(field.values())
            .all(|(a, b)| a.to_bits() == b.to_bits());

    let render = |seed: u64| -> Result<String, String> {
        let mut table = CsvTable::new(["mu_minus", "level", "omega", "status", "measure_fraction", "margin"]);
        for v in lemma_sweep(&field_for_sweep()?, seed, 1.0)? {
            table
                .push([
                    v.mu_minus.to_string(),
                    v.level.to_string(),
                    v.omega.to_string(),
                    format!("{:?}", v.status),
                    v.measure_fraction.to_string(),
                    v.pointwise_margin.to_string(),
                ])
                .map_err(e)?;
        }
        Ok(table.render())
    };
    let a = render(11)?;
    let b = render(11)?;
    let c = render(12)?;
    Ok((
        bit_exact && a == b && a != c,
        format!(
            "snapshot round-trip bit-exact: {bit_exact}; seeded sweep CSV identical across runs: {}, differs across seeds: {}",
            a == b,
            a != c
        ),
    ))
}

fn field_for_sweep() -> Result<ScalarField<f64>, String> {
    solver_field(17, 16, 0.5)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("explicit-solution residual", explicit_residual),
        ("solver convergence orders", solver_convergence),
        ("indicator scaling for λ > 0", indicator_scaling),
        ("indicator dichotomy for λ = 0", indicator_dichotomy),
        ("empirical modulus of continuity", theorem1_modulus),
        ("lemma constants and recursions", degiorgi_constants),
        ("lower-lemma conformance sweep", lemma_conformance),
        ("parabolic covering dimensions", covering_dimensions),
        ("inequality audits", inequality_audits),
        ("snapshots and determinism", infrastructure),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(msg) => (false, format!("error: {msg}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2}. {name} — {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
