use anyhow::{bail, Context};
use rayon::prelude::*;
use serde_json::json;

use logdiff::diagnostics::indicator_curve;
use logdiff::geometry::grad_log;
use logdiff::hausdorff::{extract_so, parabolic_dimension, premeasure_ladder};
use logdiff::report::CsvTable;
use logdiff::{Cylinder, Error, Field, Point, PointSet};

use super::load_field;
use crate::args::{ExtractArgs, HausdorffArgs};
use crate::output::{self, Provenance};

fn required(name: &str, v: Option<f64>) -> anyhow::Result<f64> {
    v.ok_or_else(|| Error::InvalidArgument(format!("--{name} is required with --field")).into())
}

/// Radii `r0·2^{-k}` down to the first one at or below `rho_min`.
fn extraction_radii(r0: f64, rho_min: f64) -> anyhow::Result<Vec<f64>> {
    if !(rho_min > 0.0 && rho_min <= r0) {
        bail!(Error::InvalidArgument(format!(
            "need 0 < rho_min ≤ r0, got rho_min = {rho_min}, r0 = {r0}"
        )));
    }
    let mut radii = vec![r0];
    while *radii.last().expect("non-empty") > rho_min * (1.0 + 1e-9) {
        radii.push(radii.last().expect("non-empty") / 2.0);
    }
    Ok(radii)
}

/// Candidate vertices: every `stride`-th node whose largest cylinder fits.
fn vertices(field: &Field, r0: f64, stride: usize) -> anyhow::Result<Vec<Point>> {
    if stride == 0 {
        bail!(Error::InvalidArgument("stride must be positive".into()));
    }
    let g = field.grid();
    let mut x = vec![0.0; g.dim()];
    let mut out = Vec::new();
    let mut idx = vec![0usize; g.dim()];
    for k in (0..=g.n_steps()).step_by(stride) {
        for lin in 0..g.nodes_per_slice() {
            g.multi_index(lin, &mut idx);
            if idx.iter().any(|i| i % stride != 0) {
                continue;
            }
            g.point(lin, &mut x);
            let v = Point::new(x.clone(), g.time(k));
            if Cylinder::standard(v.clone(), r0)?.fits_in(g) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

fn extract(path: &std::path::Path, ex: &ExtractArgs) -> anyhow::Result<PointSet> {
    let p = required("p", ex.p)?;
    let eta = required("eta", ex.eta)?;
    let rho_min = required("rho-min", ex.rho_min)?;
    let field = load_field(path)?;
    let radii = extraction_radii(ex.r0, rho_min)?;
    let candidates = vertices(&field, ex.r0, ex.stride)?;
    if candidates.is_empty() {
        bail!(Error::InvalidArgument(format!(
            "no node admits a cylinder of radius {} inside the grid",
            ex.r0
        )));
    }
    let g = grad_log(&field);
    let curves = candidates
        .par_iter()
        .map(|v| indicator_curve(&g, v, p, &radii, ex.exploratory))
        .collect::<logdiff::Result<Vec<_>>>()
        .context("indicator curves")?;
    eprintln!("scanned {} vertices over {} radii", curves.len(), radii.len());
    Ok(extract_so(&curves, eta, rho_min)?)
}

pub fn hausdorff(args: HausdorffArgs) -> anyhow::Result<()> {
    let set = match (&args.points, &args.field) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            PointSet::from_csv(&text)?
        }
        (None, Some(path)) => extract(path, &args.extract)?,
        (None, None) => bail!(Error::InvalidArgument("either --points or --field is required".into())),
    };
    let mut prov = Provenance::new("hausdorff", &args)?;
    let deltas = &args.deltas.0;
    if deltas.is_empty() {
        bail!(Error::InvalidArgument("--deltas needs at least one value".into()));
    }

    let mut table = CsvTable::new(["delta", "r", "cylinders", "premeasure_bound"]);
    let covers = if set.is_empty() {
        Vec::new()
    } else {
        premeasure_ladder(&set, args.k, deltas, args.strategy.into())?
    };
    for c in &covers {
        table.push([c.delta, c.delta / 2.0, c.count() as f64, c.value])?;
    }
    output::write(&args.out, table.render().as_bytes())?;
    prov.output(&args.out);

    if let Some(path) = &args.extract.points_out {
        output::write(path, set.to_csv().as_bytes())?;
        prov.output(path);
    }
    if let Some(path) = &args.cover_out {
        let smallest = covers.iter().min_by(|a, b| a.delta.total_cmp(&b.delta));
        let csv = match smallest {
            Some(c) => c.to_csv(set.dim()),
            None => logdiff::hausdorff::CoverEstimate::<f64> {
                k: args.k,
                delta: deltas[0],
                strategy: args.strategy.into(),
                cover: Vec::new(),
                value: 0.0,
            }
            .to_csv(set.dim()),
        };
        output::write(path, csv.as_bytes())?;
        prov.output(path);
    }

    let dimension = if args.dimension && !set.is_empty() {
        Some(parabolic_dimension(&set, deltas)?)
    } else {
        None
    };
    prov.summary(json!({
        "points": set.len(),
        "bounds": covers.iter().map(|c| (c.delta, c.value)).collect::<Vec<_>>(),
        "dimension": dimension.as_ref().map(|d| json!({ "dimension": d.dimension, "r_squared": d.r_squared })),
    }));
    prov.finish()?;

    println!("{} points", set.len());
    for c in &covers {
        println!(
            "delta = {}: {} cylinders, P bound = {:.6e}",
            c.delta,
            c.count(),
            c.value
        );
    }
    if let Some(d) = dimension {
        println!("parabolic dimension ≈ {:.4} (r² = {:.4})", d.dimension, d.r_squared);
    }
    Ok(())
}
