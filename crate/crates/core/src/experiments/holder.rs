use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_dyadic, check_trials, coupled_path, label_eps, ExperimentReport, Plot};
use crate::error::{McrtError, Result};
use crate::laplace::harmonic_extend;
use crate::network::Network;
use crate::rng::{rng_from_seed, split_seed, split_seed2};
use crate::solver::SolverOptions;
use crate::stats::{linear_fit, Stat};
use crate::window::MapWindow;

/// Walk lengths `2^0 .. 2^MAX_WALK_LOG2` separate sampled pairs across scales.
pub const MAX_WALK_LOG2: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderParams {
    /// Exponent of the boundary data `|z - 1|^chi`, in `(0, 1]`.
    pub chi: f64,
    pub epsilons: Vec<f64>,
    pub trials: usize,
    /// Vertex pairs sampled per window.
    pub pairs: usize,
    pub gamma: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl Default for HolderParams {
    fn default() -> Self {
        HolderParams {
            chi: 0.5,
            epsilons: vec![1.0 / 128.0, 1.0 / 1024.0],
            trials: 20,
            pairs: 2000,
            gamma: SQRT_2,
            horizon: 1.0,
            seed: 1,
        }
    }
}

fn walk(net: &Network, mut v: usize, steps: usize, rng: &mut impl Rng) -> usize {
    for _ in 0..steps {
        let ends = net.ends(v);
        v = ends[rng.random_range(0..ends.len())];
    }
    v
}

/// Slope of `log |h(x) - h(y)|` on `log max(ε, |Φ(x) - Φ(y)|)` over sampled pairs.
fn window_slope(window: &MapWindow, p: &HolderParams, eps: f64, seed: u64) -> Result<f64> {
    let opts = SolverOptions::default();
    let emb = window.embed(&opts)?;
    let net = window.graph.network();
    let data: BTreeMap<usize, f64> = emb
        .pinned
        .iter()
        .map(|&v| {
            let z = emb.coords[v];
            (v, (z[0] - 1.0).hypot(z[1]).powf(p.chi))
        })
        .collect();
    let h = harmonic_extend(net, &data, &opts)?.values;
    let spread = h.iter().copied().fold(f64::NEG_INFINITY, f64::max) - h.iter().copied().fold(f64::INFINITY, f64::min);
    if spread <= 0.0 {
        return Err(McrtError::domain("boundary data is constant"));
    }
    let mut rng = rng_from_seed(seed);
    let (mut xs, mut ys) = (Vec::with_capacity(p.pairs), Vec::with_capacity(p.pairs));
    for _ in 0..p.pairs {
        let x = rng.random_range(0..net.vertex_count());
        let y = walk(net, x, 1 << rng.random_range(0..=MAX_WALK_LOG2), &mut rng);
        let diff = (h[x] - h[y]).abs();
        if x != y && diff > 0.0 {
            xs.push(emb.distance(x, y).max(eps).ln());
            ys.push(diff.ln());
        }
    }
    linear_fit(&xs, &ys)
        .map(|f| f.slope)
        .ok_or_else(|| McrtError::domain("too few distinct vertex pairs for a fit"))
}

/// Modulus exponent of the harmonic extension of `|z - 1|^chi`, fitted per
/// window and averaged over trials at each ε.
pub fn holder_exponent_experiment(p: &HolderParams) -> Result<ExperimentReport> {
    let (mut report, t0) = ExperimentReport::start(
        "holder",
        p,
        p.seed,
        "xi > 0 (95% CI) at every epsilon, and xi at the first and last epsilon differ by at most the sum of their CI half-widths",
    )?;
    if !(p.chi > 0.0 && p.chi <= 1.0) {
        return Err(McrtError::domain(format!("chi must lie in (0, 1], got {}", p.chi)));
    }
    check_dyadic(&p.epsilons)?;
    check_trials(p.trials, 2)?;
    if p.epsilons.len() < 2 || p.pairs < 10 {
        return Err(McrtError::domain("need at least two epsilon values and 10 pairs"));
    }
    let slopes: Vec<Vec<f64>> = (0..p.trials)
        .into_par_iter()
        .map(|t| {
            let path = coupled_path(p.gamma, p.horizon, &p.epsilons, split_seed(p.seed, t as u64))?;
            p.epsilons
                .iter()
                .enumerate()
                .map(|(i, &e)| {
                    let w = MapWindow::from_path(&path, e)?;
                    window_slope(&w, p, e, split_seed2(p.seed, t as u64, i as u64 + 1))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut stats = Vec::new();
    for (i, &e) in p.epsilons.iter().enumerate() {
        let s = Stat::from_samples(&slopes.iter().map(|t| t[i]).collect::<Vec<_>>());
        report.row(label_eps(e), e, &[("xi", s)]);
        stats.push(s);
    }
    let (a, b) = (stats[0], *stats.last().unwrap());
    let gap = (a.mean - b.mean).abs();
    let allowed = a.ci95_half_width() + b.ci95_half_width();
    report.summary.insert("xi_gap".into(), gap);
    report.summary.insert("xi_gap_allowed".into(), allowed);
    report.check("xi_positive_ci_excludes_0", stats.iter().all(|s| s.mean - s.ci95_half_width() > 0.0));
    report.check("xi_stable_across_epsilon", gap <= allowed);
    report.plot = Some(Plot {
        x_label: "epsilon".into(),
        y_label: "xi".into(),
        x: p.epsilons.clone(),
        y: stats.iter().map(|s| s.mean).collect(),
    });
    Ok(report.finish(t0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_run_and_errors() {
        let p = HolderParams {
            epsilons: vec![1.0 / 16.0, 1.0 / 32.0],
            trials: 3,
            pairs: 200,
            ..Default::default()
        };
        let r = holder_exponent_experiment(&p).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(holder_exponent_experiment(&HolderParams { chi: 0.0, ..p.clone() }).is_err());
        assert!(holder_exponent_experiment(&HolderParams { chi: 1.5, ..p }).is_err());
    }
}
