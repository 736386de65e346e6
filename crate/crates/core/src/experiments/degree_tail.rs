use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_trials, ExperimentReport, Plot};
use crate::error::{McrtError, Result};
use crate::map::{build_graph, cell_minima};
use crate::path::sample_brownian_pair;
use crate::rng::split_seed;
use crate::stats::{linear_fit, Stat};
use crate::window::{central_vertex, DEFAULT_STEPS_PER_CELL};

/// Fewest exceedances a survival point needs to enter the fit.
pub const MIN_EXCEEDANCES: usize = 30;
pub const MIN_R_SQUARED: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeTailParams {
    pub samples: usize,
    /// Cells per window (ε = 1).
    pub window: usize,
    pub gamma: f64,
    pub seed: u64,
}

impl Default for DegreeTailParams {
    fn default() -> Self {
        DegreeTailParams {
            samples: 10_000,
            window: 100,
            gamma: SQRT_2,
            seed: 1,
        }
    }
}

/// Degree of the central unflagged vertex in one ε = 1 window.
fn center_degree(p: &DegreeTailParams, sample: usize) -> Result<usize> {
    let path = sample_brownian_pair(
        p.gamma,
        p.window as f64,
        1.0 / DEFAULT_STEPS_PER_CELL as f64,
        split_seed(p.seed, sample as u64),
    )?;
    let graph = build_graph(&cell_minima(&path, 1.0)?)?;
    Ok(graph.degree(central_vertex(&graph)?))
}

/// Log-survival fit of the central-vertex degree over `k ∈ [3, k_max]`,
/// where `k_max` is the largest `k` with at least 30 samples above it.
pub fn degree_tail_experiment(p: &DegreeTailParams) -> Result<ExperimentReport> {
    let (mut report, t0) = ExperimentReport::start(
        "degree-tail",
        p,
        p.seed,
        "log-survival slope < 0 with 95% CI excluding 0, and R^2 >= 0.95",
    )?;
    check_trials(p.samples, 1000)?;
    if p.window < 3 {
        return Err(McrtError::domain("window needs at least 3 cells for an interior vertex"));
    }
    let degrees: Vec<usize> = (0..p.samples)
        .into_par_iter()
        .map(|i| center_degree(p, i))
        .collect::<Result<_>>()?;
    let n = degrees.len();
    let max_deg = *degrees.iter().max().expect("samples >= 1000");
    let mut exceed = vec![0usize; max_deg + 1];
    for &d in &degrees {
        for slot in exceed.iter_mut().take(d) {
            *slot += 1;
        }
    }
    let (mut ks, mut logs) = (Vec::new(), Vec::new());
    for (k, &c) in exceed.iter().enumerate() {
        report.row(format!("k={k}"), k as f64, &[("survival", Stat::proportion(c, n))]);
        if k >= 3 && c >= MIN_EXCEEDANCES {
            ks.push(k as f64);
            logs.push((c as f64 / n as f64).ln());
        }
    }
    let dstat = Stat::from_samples(&degrees.iter().map(|&d| d as f64).collect::<Vec<_>>());
    report.summary.insert("mean_degree".into(), dstat.mean);
    report.summary.insert("mean_degree_std_err".into(), dstat.std_err);
    report.summary.insert("min_degree".into(), *degrees.iter().min().unwrap() as f64);
    report.summary.insert("max_degree".into(), max_deg as f64);
    report.summary.insert("k_max".into(), ks.last().copied().unwrap_or(f64::NAN));
    report.check("min_degree_at_least_2", degrees.iter().all(|&d| d >= 2));
    report.check("survival_non_increasing", exceed.windows(2).all(|w| w[1] <= w[0]));

    let fit = linear_fit(&ks, &logs);
    report.check("slope_negative_ci_excludes_0", fit.is_some_and(|f| f.slope_ci[1] < 0.0));
    report.check("r_squared_at_least_0.95", fit.is_some_and(|f| f.r_squared >= MIN_R_SQUARED));
    report.fit = fit;
    report.plot = Some(Plot {
        x_label: "k".into(),
        y_label: "P[deg > k]".into(),
        x: ks.clone(),
        y: logs.iter().map(|l| l.exp()).collect(),
    });
    Ok(report.finish(t0))
}
