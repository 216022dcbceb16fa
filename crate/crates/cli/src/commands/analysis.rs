use anyhow::{bail, Context};
use serde_json::json;

use logdiff::diagnostics::{
    audit_energy_sub, audit_energy_super, audit_log_estimate, fit_theorem1, indicator_curve, indicator_radius,
    osc_curve, powerlaw_fit, theorem1_bound, AuditReport,
};
use logdiff::geometry::{essosc, grad_log, make_cutoff, min_max, CutoffProfile};
use logdiff::report::CsvTable;
use logdiff::{Cylinder, Error};

use super::{check_vertex, fitting_radii, ladder, load_field};
use crate::args::{AuditArgs, DiagnoseArgs, OscArgs};
use crate::output::{self, Provenance};

fn warn_skipped(skipped: &[f64]) {
    if !skipped.is_empty() {
        eprintln!(
            "warning: {} radii leave the grid and were skipped: {skipped:?}",
            skipped.len()
        );
    }
}

pub fn diagnose(args: DiagnoseArgs) -> anyhow::Result<()> {
    let field = load_field(&args.field)?;
    let vertex = args.vertex.point();
    check_vertex(&field, &vertex)?;
    let (radii, skipped) = fitting_radii(&field, &vertex, &ladder(args.r0, args.levels)?, 1.0)?;
    warn_skipped(&skipped);
    if radii.is_empty() {
        bail!(Error::InvalidArgument(
            "no radius of the ladder fits inside the grid".into()
        ));
    }
    let g = grad_log(&field);
    if g.clamp_count() > 0 {
        eprintln!(
            "warning: {} nodes below the floor were clamped before taking logs",
            g.clamp_count()
        );
    }
    let curve = indicator_curve(&g, &vertex, args.p, &radii, args.exploratory)?;

    let mut table = CsvTable::new(["r", "indicator", "envelope"]);
    for ((r, v), e) in curve.radii.iter().zip(&curve.values).zip(&curve.envelope) {
        table.push([r, v, e])?;
    }
    output::write(&args.out, table.render().as_bytes())?;

    let positive: Vec<(f64, f64)> = curve.points().into_iter().filter(|&(_, v)| v > 0.0).collect();
    let fit = if positive.len() >= 3 {
        powerlaw_fit(&positive).ok()
    } else {
        None
    };
    let mut prov = Provenance::new("diagnose", &args)?;
    prov.output(&args.out);
    prov.summary(json!({ "fit": fit, "skipped_radii": skipped, "clamped_nodes": g.clamp_count() }));
    prov.finish()?;
    match fit {
        Some(f) => println!(
            "slope = {:.6} (r² = {:.6}) over {} radii",
            f.slope,
            f.r_squared,
            positive.len()
        ),
        None => println!("slope = n/a (fewer than 3 positive indicator values)"),
    }
    Ok(())
}

pub fn osc(args: OscArgs) -> anyhow::Result<()> {
    let field = load_field(&args.field)?;
    let vertex = args.vertex.point();
    check_vertex(&field, &vertex)?;
    let curve = osc_curve(&field, &vertex, &ladder(args.r0, args.levels)?, args.theta)?;
    warn_skipped(&curve.skipped);
    let Some(&(r_top, omega)) = curve.points.first() else {
        bail!(Error::InvalidArgument(
            "no radius of the ladder fits inside the grid".into()
        ));
    };

    let mut prov = Provenance::new("osc", &args)?;
    let table = match args.p {
        None => {
            let mut table = CsvTable::new(["r", "osc"]);
            for (r, o) in &curve.points {
                table.push([r, o])?;
            }
            prov.summary(json!({ "monotone": curve.is_monotone(0.0), "skipped_radii": curve.skipped }));
            table
        }
        Some(p) => {
            // Ĩ sampled at R₀^{1−μ} r^μ, which lies between r and R₀
            let radii: Vec<f64> = curve
                .points
                .iter()
                .map(|&(r, _)| indicator_radius(r_top, r, args.mu))
                .collect();
            let g = grad_log(&field);
            let ind = indicator_curve(&g, &vertex, p, &radii, args.exploratory).context("indicator ladder")?;
            let samples: Vec<(f64, f64, f64)> = curve
                .points
                .iter()
                .zip(&radii)
                .map(|(&(r, o), &rho)| (r, o, ind.envelope_at(rho).unwrap_or(f64::NAN)))
                .collect();
            let params = fit_theorem1(&samples, omega, r_top, args.mu)?;
            let mut table = CsvTable::new(["r", "osc", "indicator_radius", "i_tilde", "bound"]);
            for (&(r, o, i), rho) in samples.iter().zip(&radii) {
                let bound = theorem1_bound(&params, r, i)?;
                table.push([r, o, *rho, i, bound])?;
            }
            println!("C̄ = {:.6}, α = {:.2}, ω = {omega:.6e}", params.c_bar, params.alpha);
            prov.summary(
                json!({ "modulus": params, "monotone": curve.is_monotone(0.0), "skipped_radii": curve.skipped }),
            );
            table
        }
    };
    output::write(&args.out, table.render().as_bytes())?;
    prov.output(&args.out);
    prov.finish()?;
    println!(
        "osc over {} radii: {:.6e} at r = {r_top} down to {:.6e}",
        curve.points.len(),
        omega,
        curve.points.last().map_or(omega, |p| p.1)
    );
    Ok(())
}

pub fn audit(args: AuditArgs) -> anyhow::Result<()> {
    let field = load_field(&args.field)?;
    let vertex = args.vertex.point();
    check_vertex(&field, &vertex)?;
    let q = Cylinder::new(vertex, args.rho, args.theta)?;
    let (lo, hi) = min_max(&field, &q)?;
    let k = args.k.unwrap_or(0.5 * (lo + hi));
    let g = field.grid();
    let zt = make_cutoff(g, &q, args.sigma, CutoffProfile::SpaceTime)?;
    let zs = make_cutoff(g, &q, args.sigma, CutoffProfile::SpaceOnly)?;
    let reports: [(&str, AuditReport<f64>); 3] = [
        ("energy_sub", audit_energy_sub(&field, &q, k, &zt)?),
        ("energy_super", audit_energy_super(&field, &q, k, &zt)?),
        ("log", audit_log_estimate(&field, &q, k, args.c, &zs)?),
    ];

    let mut table = CsvTable::new(["estimate", "side", "term", "value"]);
    for (name, rep) in &reports {
        for (side, terms) in [("lhs", &rep.lhs_terms), ("rhs", &rep.rhs_terms)] {
            for (term, v) in terms {
                table.push([name.to_string(), side.to_string(), term.clone(), v.to_string()])?;
            }
        }
        table.push([
            name.to_string(),
            "ratio".into(),
            "empirical_ratio".into(),
            rep.empirical_ratio.to_string(),
        ])?;
        println!(
            "{name}: lhs {:.6e}, rhs {:.6e}, ratio {:.6}",
            rep.lhs_total(),
            rep.rhs_total(),
            rep.empirical_ratio
        );
    }
    output::write(&args.out, table.render().as_bytes())?;

    let mut prov = Provenance::new("audit", &args)?;
    prov.output(&args.out);
    prov.summary(json!({
        "k": k,
        "field_range": [lo, hi],
        "osc": essosc(&field, &q)?,
        "ratios": reports.iter().map(|(n, r)| (n.to_string(), r.empirical_ratio)).collect::<std::collections::BTreeMap<_, _>>(),
    }));
    prov.finish()
}
