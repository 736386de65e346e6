//! Scaling experiments. Each is a pure function of its parameter struct
//! (which carries the master seed) and returns an [`ExperimentReport`].
//!
//! Trials run in parallel; every trial draws from its own generator derived
//! from `(seed, trial)` and results are reduced in trial order, so reports
//! are identical across runs and thread counts.

mod degree_tail;
mod energy;
mod green_growth;
mod holder;
mod max_edge;
mod mesh;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{McrtError, Result};
use crate::io::content_hash;
use crate::stats::{LinearFit, Stat};

pub use degree_tail::{degree_tail_experiment, DegreeTailParams};
pub use energy::{energy_comparison_experiment, EnergyParams, TestFunction};
pub use green_growth::{green_growth_experiment, GreenGrowthParams};
pub use holder::{holder_exponent_experiment, HolderParams};
pub use max_edge::{max_edge_scaling_experiment, MaxEdgeParams};
pub use mesh::{mesh_refinement_study, MeshRefinementParams};

pub const SCHEMA_VERSION: u32 = 1;

/// Statistics at one point of an experiment's parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub x: f64,
    pub stats: BTreeMap<String, Stat>,
}

/// Points for a log-log plot of the experiment's main series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plot {
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub name: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    /// Content hash of the canonical parameter JSON.
    pub input_hash: String,
    pub rows: Vec<ReportRow>,
    pub fit: Option<LinearFit>,
    pub summary: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
    pub criterion: String,
    pub passed: bool,
    pub plot: Option<Plot>,
    /// Wall-clock time; kept out of the JSON so reports are byte-reproducible.
    #[serde(skip)]
    pub runtime: Duration,
}

impl ExperimentReport {
    fn start<P: Serialize>(name: &str, params: &P, seed: u64, criterion: &str) -> Result<(Self, Instant)> {
        let parameters = serde_json::to_value(params)?;
        let report = ExperimentReport {
            schema_version: SCHEMA_VERSION,
            name: name.to_string(),
            input_hash: content_hash(&parameters)?,
            parameters,
            seed,
            rows: Vec::new(),
            fit: None,
            summary: BTreeMap::new(),
            checks: BTreeMap::new(),
            criterion: criterion.to_string(),
            passed: false,
            plot: None,
            runtime: Duration::ZERO,
        };
        Ok((report, Instant::now()))
    }

    fn finish(mut self, started: Instant) -> Self {
        self.passed = !self.checks.is_empty() && self.checks.values().all(|&ok| ok);
        self.runtime = started.elapsed();
        self
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
    }

    fn row(&mut self, label: String, x: f64, stats: &[(&str, Stat)]) {
        self.rows.push(ReportRow {
            label,
            x,
            stats: stats.iter().map(|(k, s)| (k.to_string(), *s)).collect(),
        });
    }

    /// Statistic `key` of every row, in row order.
    pub fn series(&self, key: &str) -> Vec<Stat> {
        self.rows.iter().filter_map(|r| r.stats.get(key).copied()).collect()
    }
}

/// Dyadic scale check: `log2(eps)` must be an integer.
fn check_dyadic(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(McrtError::domain("epsilon list is empty"));
    }
    for &e in epsilons {
        let k = e.log2();
        if !(e > 0.0 && e < 1.0) || (k - k.round()).abs() > 1e-9 {
            return Err(McrtError::domain(format!("epsilon {e} is not a dyadic value in (0, 1)")));
        }
    }
    Ok(())
}

fn check_trials(trials: usize, min: usize) -> Result<()> {
    if trials < min {
        return Err(McrtError::domain(format!("need at least {min} trials, got {trials}")));
    }
    Ok(())
}

/// `2^-6, ..., 2^-10`.
pub fn default_epsilons() -> Vec<f64> {
    (6..=10).map(|k| (-(k as f64)).exp2()).collect()
}

fn label_eps(e: f64) -> String {
    format!("eps=2^{}", e.log2().round() as i64)
}

/// One Brownian pair per trial, fine enough (64 steps per cell of the
/// smallest ε) that windows at every ε in the list are cut from it.
fn coupled_path(gamma: f64, horizon: f64, epsilons: &[f64], seed: u64) -> Result<crate::path::PathPair> {
    let finest = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    crate::path::sample_brownian_pair(
        gamma,
        horizon,
        finest / crate::window::DEFAULT_STEPS_PER_CELL as f64,
        seed,
    )
}
