use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_trials, ExperimentReport, Plot};
use crate::error::{McrtError, Result};
use crate::laplace::effective_resistance;
use crate::map::{build_graph, cell_minima, CellMinSeq};
use crate::path::sample_brownian_pair;
use crate::rng::split_seed;
use crate::solver::SolverOptions;
use crate::stats::{linear_fit, Stat};
use crate::window::{central_vertex, DEFAULT_STEPS_PER_CELL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenGrowthParams {
    /// Window sizes in cells (ε = 1), strictly increasing.
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub gamma: f64,
    pub seed: u64,
}

impl Default for GreenGrowthParams {
    fn default() -> Self {
        GreenGrowthParams {
            sizes: (7..=13).map(|k| 1 << k).collect(),
            trials: 50,
            gamma: SQRT_2,
            seed: 1,
        }
    }
}

/// Cells `[start, start + len)` of `cells`.
fn sub_window(cells: &CellMinSeq, start: usize, len: usize) -> Result<CellMinSeq> {
    CellMinSeq::from_minima(
        cells.epsilon,
        cells.min_left[start..start + len].to_vec(),
        cells.min_right[start..start + len].to_vec(),
    )
}

/// Resistances for one path sample. Windows of every size are centred on
/// the same cell, so they are nested and share the same centre vertex.
fn trial(p: &GreenGrowthParams, t: usize) -> Result<Vec<f64>> {
    let largest = *p.sizes.last().expect("validated");
    let path = sample_brownian_pair(
        p.gamma,
        largest as f64,
        1.0 / DEFAULT_STEPS_PER_CELL as f64,
        split_seed(p.seed, t as u64),
    )?;
    let cells = cell_minima(&path, 1.0)?;
    let mid = largest / 2;
    let smallest = p.sizes[0];
    let inner = build_graph(&sub_window(&cells, mid - smallest / 2, smallest)?)?;
    let center = mid - smallest / 2 + central_vertex(&inner)?;
    let opts = SolverOptions::default();
    p.sizes
        .iter()
        .map(|&size| {
            let start = mid - size / 2;
            let graph = build_graph(&sub_window(&cells, start, size)?)?;
            effective_resistance(graph.network(), center - start, &graph.boundary_vertices(), &opts)
        })
        .collect()
}

/// Mean resistance from the centre vertex to the flagged window boundary,
/// regressed on `log N`.
pub fn green_growth_experiment(p: &GreenGrowthParams) -> Result<ExperimentReport> {
    let (mut report, t0) = ExperimentReport::start(
        "green-growth",
        p,
        p.seed,
        "mean resistance increasing in N and slope vs log N positive with 95% CI excluding 0",
    )?;
    check_trials(p.trials, 2)?;
    if p.sizes.len() < 3 || p.sizes[0] < 4 || p.sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(McrtError::domain("sizes must be at least 3 strictly increasing values >= 4"));
    }
    let per_trial: Vec<Vec<f64>> = (0..p.trials)
        .into_par_iter()
        .map(|t| trial(p, t))
        .collect::<Result<_>>()?;
    let mut means = Vec::new();
    let logs: Vec<f64> = p.sizes.iter().map(|&s| (s as f64).ln()).collect();
    for (i, &size) in p.sizes.iter().enumerate() {
        let r: Vec<f64> = per_trial.iter().map(|t| t[i]).collect();
        let s = Stat::from_samples(&r);
        means.push(s.mean);
        report.row(format!("N={size}"), size as f64, &[("resistance", s)]);
    }
    report.check("resistance_positive", per_trial.iter().flatten().all(|&r| r > 0.0));
    report.check(
        "nested_monotone_per_trial",
        per_trial.iter().all(|t| t.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9))),
    );
    report.check("means_increasing", means.windows(2).all(|w| w[1] > w[0]));
    let fit = linear_fit(&logs, &means);
    report.check("slope_positive_ci_excludes_0", fit.is_some_and(|f| f.slope_ci[0] > 0.0));
    report.fit = fit;
    report.plot = Some(Plot {
        x_label: "N".into(),
        y_label: "R_eff".into(),
        x: p.sizes.iter().map(|&s| s as f64).collect(),
        y: means,
    });
    Ok(report.finish(t0))
}
