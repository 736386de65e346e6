use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_dyadic, check_trials, coupled_path, label_eps, ExperimentReport, Plot};
use crate::error::{McrtError, Result};
use crate::rng::split_seed;
use crate::solver::SolverOptions;
use crate::stats::{linear_fit, t_quantile_975, Stat};
use crate::window::MapWindow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEdgeParams {
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub gamma: f64,
    /// Window mass `T`; the window covers `[0, T]`.
    pub horizon: f64,
    pub seed: u64,
}

impl Default for MaxEdgeParams {
    fn default() -> Self {
        MaxEdgeParams {
            epsilons: super::default_epsilons(),
            trials: 20,
            gamma: SQRT_2,
            horizon: 1.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    max_edge: f64,
    diameter_ok: bool,
    crossings: usize,
}

fn measure(window: &MapWindow, opts: &SolverOptions) -> Result<Sample> {
    let emb = window.embed(opts)?;
    let g = &window.graph;
    let interior: Vec<usize> = (0..g.count()).filter(|&v| !g.is_boundary(v)).collect();
    if let Some(&first) = interior.first() {
        if interior.iter().all(|&v| emb.distance(v, first) < 1e-12) && interior.len() > 1 {
            return Err(McrtError::Internal("degenerate embedding: interior collapsed to a point".into()));
        }
    }
    let diameter = emb.boundary_diameter();
    let mut max_edge = 0.0f64;
    let mut diameter_ok = true;
    for e in g.edges() {
        let len = emb.distance(e.u, e.v);
        diameter_ok &= len <= diameter + 1e-9;
        if !g.is_boundary(e.u) && !g.is_boundary(e.v) {
            max_edge = max_edge.max(len);
        }
    }
    if max_edge == 0.0 {
        return Err(McrtError::domain("window has no edge between unflagged vertices"));
    }
    Ok(Sample {
        max_edge,
        diameter_ok,
        crossings: emb.crossing_count(g.network()),
    })
}

/// Largest Tutte-embedded edge among unflagged vertices, regressed on ε in
/// log-log scale. Each trial samples one path and cuts every ε from it, so
/// the exponent is estimated per trial and averaged.
pub fn max_edge_scaling_experiment(p: &MaxEdgeParams) -> Result<ExperimentReport> {
    let (mut report, t0) = ExperimentReport::start(
        "max-edge",
        p,
        p.seed,
        "fitted exponent xi' > 0 with 95% CI excluding 0",
    )?;
    check_dyadic(&p.epsilons)?;
    check_trials(p.trials, 2)?;
    if p.epsilons.len() < 3 {
        return Err(McrtError::domain("need at least 3 epsilon values"));
    }
    let opts = SolverOptions::default();
    let samples: Vec<Vec<Sample>> = (0..p.trials)
        .into_par_iter()
        .map(|t| {
            let path = coupled_path(p.gamma, p.horizon, &p.epsilons, split_seed(p.seed, t as u64))?;
            p.epsilons
                .iter()
                .map(|&e| measure(&MapWindow::from_path(&path, e)?, &opts))
                .collect()
        })
        .collect::<Result<_>>()?;

    let log_eps: Vec<f64> = p.epsilons.iter().map(|e| e.ln()).collect();
    let mut mean_log = Vec::new();
    for (i, &e) in p.epsilons.iter().enumerate() {
        let m: Vec<f64> = samples.iter().map(|s| s[i].max_edge).collect();
        let lm: Vec<f64> = m.iter().map(|x| x.ln()).collect();
        let cr: Vec<f64> = samples.iter().map(|s| s[i].crossings as f64).collect();
        let ls = Stat::from_samples(&lm);
        mean_log.push(ls.mean);
        report.row(
            label_eps(e),
            e,
            &[
                ("max_edge", Stat::from_samples(&m)),
                ("log_max_edge", ls),
                ("crossings", Stat::from_samples(&cr)),
            ],
        );
    }
    let slopes: Vec<f64> = samples
        .iter()
        .map(|s| {
            let y: Vec<f64> = s.iter().map(|x| x.max_edge.ln()).collect();
            linear_fit(&log_eps, &y).map_or(f64::NAN, |f| f.slope)
        })
        .collect();
    let xi = Stat::from_samples(&slopes);
    let half = t_quantile_975(xi.n - 1) * xi.std_err;
    report.summary.insert("xi_prime".into(), xi.mean);
    report.summary.insert("xi_prime_std_err".into(), xi.std_err);
    report.summary.insert("xi_prime_ci_low".into(), xi.mean - half);
    report.summary.insert("xi_prime_ci_high".into(), xi.mean + half);
    report.check("edges_within_boundary_diameter", samples.iter().flatten().all(|s| s.diameter_ok));
    report.check("xi_prime_positive_ci_excludes_0", xi.mean - half > 0.0);
    report.fit = linear_fit(&log_eps, &mean_log);
    report.plot = Some(Plot {
        x_label: "epsilon".into(),
        y_label: "max edge length".into(),
        x: p.epsilons.clone(),
        y: mean_log.iter().map(|l| l.exp()).collect(),
    });
    Ok(report.finish(t0))
}
