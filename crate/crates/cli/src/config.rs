use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub fn load<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| logdiff::Error::InvalidArgument(e.to_string()))
        .with_context(|| format!("parsing {}", path.display()))
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    logdiff::Error::InvalidArgument(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "N")]
    pub dim: usize,
    pub nodes: usize,
    pub lo: f64,
    pub hi: f64,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl GridConfig {
    pub fn build(&self) -> anyhow::Result<logdiff::Grid> {
        Ok(logdiff::Grid::from_box(
            self.dim, self.lo, self.hi, self.nodes, self.t0, self.t1, self.steps,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataConfig {
    /// `u ≡ value` initially and on the boundary.
    Constant { value: f64 },
    /// The explicit solution started at the grid's `t0`.
    Explicit {
        lambda: f64,
        #[serde(rename = "T")]
        extinction: f64,
    },
    /// Slice 0 of a stored field as initial data, later slices as boundary
    /// data. Relative paths resolve against the config file's directory.
    Snapshot { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// Required unless the data is a snapshot, whose grid is then reused.
    #[serde(default)]
    pub grid: Option<GridConfig>,
    pub data: DataConfig,
    #[serde(default = "default_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_max_iter")]
    pub newton_max_iter: usize,
    #[serde(default = "default_eps")]
    pub eps_floor: f64,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    50
}
fn default_eps() -> f64 {
    logdiff::geometry::DEFAULT_EPS_FLOOR
}

impl SimulateConfig {
    pub fn resolve_paths(&mut self, config_path: &Path) {
        if let DataConfig::Snapshot { path } = &mut self.data {
            if path.is_relative() {
                if let Some(dir) = config_path.parent() {
                    *path = dir.join(&*path);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaChoice {
    Lower,
    Upper,
}

/// Randomised sweep over vertices, radii and lemma parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub lemma: LemmaChoice,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// Lower lemma only.
    #[serde(default = "default_p")]
    pub p: f64,
    /// Upper lemma only.
    #[serde(default)]
    pub b: f64,
    #[serde(default = "one")]
    pub theta: f64,
    /// Hypothesis radius range `[lo, hi)`.
    pub rho: [f64; 2],
    /// Conclusion radius as a fraction of the hypothesis radius.
    #[serde(default = "quarter")]
    pub con_ratio: f64,
    pub xi: [f64; 2],
    pub a: [f64; 2],
    #[serde(default = "one")]
    pub gamma: f64,
    /// When set, also report the smallest γ in this list with no counterexample.
    #[serde(default)]
    pub gammas: Vec<f64>,
}

fn default_p() -> f64 {
    3.0
}
fn one() -> f64 {
    1.0
}
fn quarter() -> f64 {
    0.25
}

impl SweepConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        ensure!(self.count > 0, invalid("count must be positive"));
        for (name, [lo, hi]) in [("rho", self.rho), ("xi", self.xi), ("a", self.a)] {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                bail!(invalid(format!(
                    "{name} range must satisfy 0 < lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        for (name, [_, hi]) in [("xi", self.xi), ("a", self.a)] {
            ensure!(hi <= 1.0, invalid(format!("{name} range must lie in (0,1)")));
        }
        ensure!(
            self.con_ratio > 0.0 && self.con_ratio <= 1.0,
            invalid(format!("con_ratio must lie in (0,1], got {}", self.con_ratio))
        );
        ensure!(self.theta > 0.0, invalid("theta must be positive"));
        ensure!(self.gamma > 0.0, invalid("gamma must be positive"));
        ensure!(self.gammas.iter().all(|&g| g > 0.0), invalid("gammas must be positive"));
        Ok(())
    }
}
