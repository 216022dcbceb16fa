use std::collections::BTreeMap;

use anyhow::bail;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use logdiff::degiorgi::{
    check_lemma41, check_lemma42, smallest_consistent_gamma, DeGiorgiConstants, LemmaParams, LemmaSetup, LemmaStatus,
    LemmaVerdict,
};
use logdiff::report::CsvTable;
use logdiff::{Error, Field, Point};

use super::load_field;
use crate::args::{ConstantsArgs, LemmaArgs};
use crate::config::{self, LemmaChoice, SweepConfig};
use crate::output::{self, Provenance};

struct Case {
    vertex: Point,
    rho: f64,
    xi: f64,
    a: f64,
}

/// Draws vertices on grid nodes such that the hypothesis cylinder fits.
fn draw_cases(field: &Field, cfg: &SweepConfig, seed: u64) -> anyhow::Result<Vec<Case>> {
    let g = field.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(cfg.count);
    for _ in 0..cfg.count {
        let rho = rng.gen_range(cfg.rho[0]..cfg.rho[1]);
        let half = rho / 2.0;
        let mut x = Vec::with_capacity(g.dim());
        for axis in 0..g.dim() {
            let lo = ((half) / g.h() - 1e-9).ceil().max(0.0) as usize;
            let hi = ((g.upper(axis) - g.origin()[axis] - half) / g.h() + 1e-9).floor();
            if hi < lo as f64 {
                bail!(Error::InvalidArgument(format!(
                    "hypothesis radius {rho} does not fit the grid"
                )));
            }
            x.push(g.coord(axis, rng.gen_range(lo..=hi as usize)));
        }
        let k_min = (cfg.theta * rho * rho / g.dt() - 1e-9).ceil().max(0.0) as usize;
        if k_min > g.n_steps() {
            bail!(Error::InvalidArgument(format!(
                "cylinder height θρ² for ρ = {rho} exceeds the time window"
            )));
        }
        let t = g.time(rng.gen_range(k_min..=g.n_steps()));
        let xi = rng.gen_range(cfg.xi[0]..cfg.xi[1]);
        let a = rng.gen_range(cfg.a[0]..cfg.a[1]);
        cases.push(Case {
            vertex: Point::new(x, t),
            rho,
            xi,
            a,
        });
    }
    Ok(cases)
}

fn sweep(field: &Field, cfg: &SweepConfig, cases: &[Case], gamma: f64) -> logdiff::Result<Vec<LemmaVerdict<f64>>> {
    cases
        .iter()
        .map(|c| {
            let setup =
                LemmaSetup::new(c.vertex.clone(), c.rho, c.rho * cfg.con_ratio, cfg.theta, c.xi, c.a).with_gamma(gamma);
            match cfg.lemma {
                LemmaChoice::Lower => check_lemma41(field, &setup, cfg.p),
                LemmaChoice::Upper => check_lemma42(field, &setup, cfg.b),
            }
        })
        .collect()
}

fn status_name(s: LemmaStatus) -> String {
    serde_json::to_value(s)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_else(|| format!("{s:?}"))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn lemma(args: LemmaArgs) -> anyhow::Result<()> {
    let mut cfg: SweepConfig = config::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let field = load_field(&args.field)?;
    let cases = draw_cases(&field, &cfg, cfg.seed)?;
    let verdicts = sweep(&field, &cfg, &cases, cfg.gamma)?;

    let dim = field.grid().dim();
    let mut header: Vec<String> = vec!["case".into()];
    header.extend((0..dim).map(|a| format!("x{a}")));
    header.extend(
        [
            "t",
            "rho",
            "xi",
            "a",
            "status",
            "hypothesis_met",
            "alt_indicator",
            "alt_pointwise",
            "mu_minus",
            "mu_plus",
            "omega",
            "level",
            "measure_fraction",
            "ln_nu",
            "indicator",
            "pointwise_margin",
        ]
        .map(String::from),
    );
    let mut table = CsvTable::new(header);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for (n, (c, v)) in cases.iter().zip(&verdicts).enumerate() {
        *counts.entry(status_name(v.status)).or_default() += 1;
        let mut row = vec![n.to_string()];
        row.extend(c.vertex.x.iter().map(f64::to_string));
        row.extend([
            c.vertex.t.to_string(),
            c.rho.to_string(),
            c.xi.to_string(),
            c.a.to_string(),
            status_name(v.status),
            v.hypothesis_met.to_string(),
            opt(v.alt_indicator),
            v.alt_pointwise.to_string(),
            v.mu_minus.to_string(),
            v.mu_plus.to_string(),
            v.omega.to_string(),
            v.level.to_string(),
            v.measure_fraction.to_string(),
            v.ln_nu.to_string(),
            opt(v.indicator),
            v.pointwise_margin.to_string(),
        ]);
        table.push(row)?;
    }
    output::write(&args.out, table.render().as_bytes())?;

    let smallest = if cfg.gammas.is_empty() {
        None
    } else {
        Some(smallest_consistent_gamma(&cfg.gammas, |g| {
            sweep(&field, &cfg, &cases, g)
        })?)
    };
    let mut prov = Provenance::new("lemma", &json!({ "args": &args, "config": &cfg }))?;
    prov.output(&args.out);
    prov.summary(json!({ "status_counts": counts, "smallest_consistent_gamma": smallest }));
    prov.finish()?;

    let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k} {v}")).collect();
    println!("{} checks at γ = {}: {}", verdicts.len(), cfg.gamma, parts.join(", "));
    match smallest {
        Some(Some(g)) => println!("smallest γ without counterexample: {g}"),
        Some(None) => println!("every listed γ produced a counterexample"),
        None => {}
    }
    Ok(())
}

pub fn constants(args: ConstantsArgs) -> anyhow::Result<()> {
    let params = LemmaParams::new(args.dim, args.p, args.a, args.xi, args.theta, args.omega)
        .with_mu_minus(args.mu_minus)
        .with_b(args.b)
        .with_gamma(args.gamma);
    let c = DeGiorgiConstants::compute(params, args.reduced)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&c)?);
        return Ok(());
    }
    let form = if c.reduced { "reduced" } else { "full" };
    println!("N = {}", args.dim);
    println!("p = {}", args.p);
    println!("beta = {:.6}", c.beta);
    println!("A ({form}) = {:.6e}", c.big_a);
    println!("nu_minus = A^(-1/beta) * 16^(-1/beta^2)");
    println!("  -1/beta = {:.6}", -1.0 / c.beta);
    println!("  -1/beta^2 = {:.6}", -1.0 / (c.beta * c.beta));
    println!("ln nu_minus = {:.6}", c.ln_nu_minus);
    println!("nu_minus = {:.6e}", c.nu_minus);
    println!("nu_plus = {:.6e}", c.nu_plus);
    println!("fgc threshold (C = A, b = 16) = {:.6e}", c.fgc_threshold);
    Ok(())
}
