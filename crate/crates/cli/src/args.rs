use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "logdiff", version, about = "Numerical laboratory for u_t = Δ ln u")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the explicit extinction solution on a grid and write a snapshot.
    SampleExplicit(SampleArgs),
    /// Integrate the equation from a JSON config and write a snapshot.
    Simulate(SimulateArgs),
    /// Continuity indicator I_{p,r} along a radius ladder, with a power-law fit.
    Diagnose(DiagnoseArgs),
    /// Oscillation over shrinking cylinders, optionally against the modulus bound.
    Osc(OscArgs),
    /// Seeded sweep of the De Giorgi lemma checkers over a snapshot.
    Lemma(LemmaArgs),
    /// Print the De Giorgi constants for one parameter set.
    Constants(ConstantsArgs),
    /// Parabolic covering premeasures of a point set or of an extracted S_o.
    Hausdorff(HausdorffArgs),
    /// Energy and logarithmic inequality audits on one cylinder.
    Audit(AuditArgs),
}

/// `x0,…,x{N−1}@t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Vertex {
    pub x: Vec<f64>,
    pub t: f64,
}

impl FromStr for Vertex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (xs, t) = s
            .split_once('@')
            .ok_or_else(|| format!("expected x0,…,xN@t, got {s:?}"))?;
        let x = parse_list(xs)?;
        let t = t.trim().parse().map_err(|e| format!("bad time {t:?}: {e}"))?;
        Ok(Vertex { x, t })
    }
}

impl Vertex {
    pub fn point(&self) -> logdiff::Point {
        logdiff::Point::new(self.x.clone(), self.t)
    }
}

/// Comma-separated floats.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_list(s).map(FloatList)
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad number {v:?}: {e}")))
        .collect()
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long = "N", default_value_t = 3)]
    #[serde(rename = "N")]
    pub dim: usize,
    #[arg(long)]
    pub lambda: f64,
    /// Extinction time.
    #[arg(long = "T", default_value_t = 1.0)]
    #[serde(rename = "T")]
    pub extinction: f64,
    #[arg(long, default_value_t = 17)]
    pub nodes: usize,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    /// Final time; defaults to the extinction time.
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long, default_value_t = 16)]
    pub steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-step Newton statistics as CSV.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub p: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub vertex: Vertex,
    /// Largest radius of the ladder r0·2^{-k}.
    #[arg(long, default_value_t = 0.5)]
    pub r0: f64,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Allow p ≤ (N+2)/2.
    #[arg(long)]
    pub exploratory: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct OscArgs {
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub vertex: Vertex,
    #[arg(long, default_value_t = 0.5)]
    pub r0: f64,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Fit the modulus bound using I_{p,·}.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    #[arg(long)]
    pub exploratory: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct LemmaArgs {
    #[arg(long)]
    pub field: PathBuf,
    /// JSON sweep configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantsArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub dim: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, default_value_t = 0.5)]
    pub xi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu_minus: f64,
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Use the reduced form of A.
    #[arg(long)]
    pub reduced: bool,
    /// Print the constants as JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Grid,
    Greedy,
}

impl From<Strategy> for logdiff::hausdorff::CoverStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Grid => Self::Grid,
            Strategy::Greedy => Self::Greedy,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct HausdorffArgs {
    /// Point set CSV (header x0,…,t).
    #[arg(long, conflicts_with = "field", required_unless_present = "field")]
    pub points: Option<PathBuf>,
    /// Snapshot from which S_o is extracted.
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub deltas: FloatList,
    #[arg(long, value_enum, default_value_t = Strategy::Grid)]
    pub strategy: Strategy,
    /// Also fit the covering dimension from grid covers on the δ ladder.
    #[arg(long)]
    pub dimension: bool,
    /// Write the cover at the smallest δ.
    #[arg(long)]
    pub cover_out: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub extract: ExtractArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtractArgs {
    #[arg(long, requires = "field")]
    pub p: Option<f64>,
    #[arg(long, requires = "field")]
    pub eta: Option<f64>,
    #[arg(long, requires = "field")]
    pub rho_min: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub r0: f64,
    /// Use every `stride`-th node (in space and time) as a vertex.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long)]
    pub exploratory: bool,
    /// Write the extracted point set.
    #[arg(long, requires = "field")]
    pub points_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AuditArgs {
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub vertex: Vertex,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// Truncation level; defaults to the midpoint of the field's range on the cylinder.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    #[arg(long)]
    pub out: PathBuf,
}
