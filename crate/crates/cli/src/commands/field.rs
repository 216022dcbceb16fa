use anyhow::Context;
use serde_json::json;

use logdiff::explicit::ExplicitSolution;
use logdiff::report::CsvTable;
use logdiff::snapshot::to_bytes;
use logdiff::solver::{run, BoundaryData, ConstantData, FieldData, OracleData, SolverConfig};
use logdiff::Grid;

use super::load_field;
use crate::args::{SampleArgs, SimulateArgs};
use crate::config::{self, DataConfig, SimulateConfig};
use crate::output::{self, Provenance};

pub fn sample_explicit(args: SampleArgs) -> anyhow::Result<()> {
    let sol = ExplicitSolution::new(args.dim, args.lambda, args.extinction)?;
    let t1 = args.t1.unwrap_or(args.extinction);
    let grid = Grid::from_box(args.dim, args.lo, args.hi, args.nodes, args.t0, t1, args.steps)?;
    let field = sol.sample(&grid).context("sampling the explicit solution")?;
    output::write(&args.out, &to_bytes(&field)?)?;

    let mut prov = Provenance::new("sample-explicit", &args)?;
    prov.output(&args.out);
    prov.summary(json!({ "min": field.min(), "max": field.max(), "nodes": field.values().len() }));
    prov.finish()?;
    println!("wrote {} ({} nodes)", args.out.display(), field.values().len());
    Ok(())
}

pub fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let mut cfg: SimulateConfig = config::load(&args.config)?;
    cfg.resolve_paths(&args.config);

    let stored = match &cfg.data {
        DataConfig::Snapshot { path } => Some(load_field(path)?),
        _ => None,
    };
    let grid = match (&cfg.grid, &stored) {
        (Some(g), _) => g.build()?,
        (None, Some(f)) => f.grid().clone(),
        (None, None) => {
            return Err(
                logdiff::Error::InvalidArgument("config needs a grid unless the data is a snapshot".into()).into(),
            )
        }
    };
    let bc: Box<dyn BoundaryData<f64>> = match (&cfg.data, stored) {
        (DataConfig::Constant { value }, _) => Box::new(ConstantData(*value)),
        (DataConfig::Explicit { lambda, extinction }, _) => Box::new(OracleData {
            solution: ExplicitSolution::new(grid.dim(), *lambda, *extinction)?,
            t0: grid.t0(),
        }),
        (DataConfig::Snapshot { .. }, Some(f)) => Box::new(FieldData::new(f)),
        (DataConfig::Snapshot { .. }, None) => unreachable!("snapshot loaded above"),
    };

    let solver = SolverConfig {
        newton_tol: cfg.newton_tol,
        newton_max_iter: cfg.newton_max_iter,
        eps_floor: cfg.eps_floor,
        ..SolverConfig::new(grid.clone())
    };
    let solution = run(&solver, bc.as_ref(), grid.n_steps())?;
    output::write(&args.out, &to_bytes(&solution.field)?)?;

    let mut prov = Provenance::new("simulate", &json!({ "args": &args, "config": &cfg }))?;
    prov.output(&args.out);
    if let Some(path) = &args.report {
        let mut table = CsvTable::new([
            "step",
            "t",
            "newton_iterations",
            "residual",
            "halvings",
            "cg_iterations",
        ]);
        for (k, s) in solution.stats.iter().enumerate() {
            table.push([
                (k + 1).to_string(),
                solution.field.grid().time(k + 1).to_string(),
                s.iterations.to_string(),
                s.residual.to_string(),
                s.halvings.to_string(),
                s.cg_iterations.to_string(),
            ])?;
        }
        output::write(path, table.render().as_bytes())?;
        prov.output(path);
    }
    let max_residual = solution.stats.iter().map(|s| s.residual).fold(0.0, f64::max);
    let newton: usize = solution.stats.iter().map(|s| s.iterations).sum();
    prov.summary(json!({
        "steps": solution.stats.len(),
        "newton_iterations": newton,
        "max_residual": max_residual,
        "min": solution.field.min(),
        "max": solution.field.max(),
    }));
    prov.finish()?;
    println!(
        "wrote {}: {} steps, {newton} Newton iterations, max residual {max_residual:.3e}",
        args.out.display(),
        solution.stats.len()
    );
    Ok(())
}
