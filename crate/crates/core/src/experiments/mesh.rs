use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_trials, ExperimentReport, Plot};
use crate::error::{McrtError, Result};
use crate::map::{build_graph, cell_minima, Edge};
use crate::path::{sample_brownian_pair, sample_lattice_walk, PathKind, PathPair};
use crate::rng::{split_seed, split_seed2};
use crate::stats::{linear_fit, Stat};

/// Noise allowance, in combined standard errors, for the decay check.
pub const DECAY_SIGMAS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshRefinementParams {
    pub epsilon: f64,
    pub horizon: f64,
    /// Grid steps per cell at each level; each entry equals or doubles the previous one.
    pub mesh_factors: Vec<usize>,
    pub trials: usize,
    pub gamma: f64,
    pub kind: PathKind,
    pub seed: u64,
}

impl Default for MeshRefinementParams {
    fn default() -> Self {
        MeshRefinementParams {
            epsilon: 1.0 / 16.0,
            horizon: 4.0,
            mesh_factors: vec![8, 16, 32, 64, 128, 256],
            trials: 20,
            gamma: SQRT_2,
            kind: PathKind::Brownian,
            seed: 1,
        }
    }
}

/// `|A Δ B|` for sorted edge lists.
fn symmetric_difference(a: &[Edge], b: &[Edge]) -> usize {
    let (mut i, mut j, mut d) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => (i, d) = (i + 1, d + 1),
            std::cmp::Ordering::Greater => (j, d) = (j + 1, d + 1),
            std::cmp::Ordering::Equal => (i, j) = (i + 1, j + 1),
        }
    }
    d + (a.len() - i) + (b.len() - j)
}

fn base_path(p: &MeshRefinementParams, seed: u64) -> Result<PathPair> {
    let mesh = p.epsilon / p.mesh_factors[0] as f64;
    match p.kind {
        PathKind::Brownian => sample_brownian_pair(p.gamma, p.horizon, mesh, seed),
        PathKind::Lattice => {
            // Exact discrete path read on a grid of spacing `mesh`.
            let steps = (p.horizon / mesh).round() as usize;
            let mut walk = sample_lattice_walk(steps, seed)?;
            walk.mesh = mesh;
            walk.horizon = steps as f64 * mesh;
            Ok(walk)
        }
    }
}

/// Changed-edge fractions between consecutive levels of one refined path.
fn trial(p: &MeshRefinementParams, t: usize) -> Result<Vec<f64>> {
    let mut path = base_path(p, split_seed(p.seed, t as u64))?;
    let mut prev = build_graph(&cell_minima(&path, p.epsilon)?)?;
    let mut out = Vec::new();
    for (k, w) in p.mesh_factors.windows(2).enumerate() {
        if w[1] == 2 * w[0] {
            path = path.refine_midpoint(split_seed2(p.seed, t as u64, k as u64));
        }
        let next = build_graph(&cell_minima(&path, p.epsilon)?)?;
        if next.count() != prev.count() {
            return Err(McrtError::Internal("refinement changed the cell count".into()));
        }
        out.push(symmetric_difference(prev.edges(), next.edges()) as f64 / next.edges().len() as f64);
        prev = next;
    }
    Ok(out)
}

/// Fraction of edges that change each time the grid is refined, for the same
/// underlying path (Lévy midpoint refinement; lattice paths are exact).
pub fn mesh_refinement_study(p: &MeshRefinementParams) -> Result<ExperimentReport> {
    let (mut report, t0) = ExperimentReport::start(
        "mesh-refinement",
        p,
        p.seed,
        "changed-edge fraction non-increasing within 2 standard errors and smaller at the finest level than the coarsest; zero for lattice paths",
    )?;
    check_trials(p.trials, 2)?;
    let f = &p.mesh_factors;
    if f.len() < 2 || f[0] == 0 {
        return Err(McrtError::domain("need at least two positive mesh factors"));
    }
    if let Some(w) = f.windows(2).find(|w| w[1] != w[0] && w[1] != 2 * w[0]) {
        return Err(McrtError::domain(format!(
            "inconsistent refinement: mesh factor {} cannot follow {}",
            w[1], w[0]
        )));
    }
    if !(p.epsilon > 0.0 && p.horizon >= 2.0 * p.epsilon) {
        return Err(McrtError::domain("need epsilon > 0 and at least two cells"));
    }
    let fractions: Vec<Vec<f64>> = (0..p.trials)
        .into_par_iter()
        .map(|t| trial(p, t))
        .collect::<Result<_>>()?;
    let mut stats = Vec::new();
    for (k, w) in f.windows(2).enumerate() {
        let s = Stat::from_samples(&fractions.iter().map(|t| t[k]).collect::<Vec<_>>());
        report.row(format!("{}->{}", w[0], w[1]), w[1] as f64, &[("changed_fraction", s)]);
        stats.push((w[1] == 2 * w[0], w[1], s));
    }
    let halvings: Vec<(usize, Stat)> = stats.iter().filter(|s| s.0).map(|s| (s.1, s.2)).collect();
    report.check("identity_levels_unchanged", stats.iter().filter(|s| !s.0).all(|s| s.2.mean == 0.0));
    match p.kind {
        PathKind::Lattice => {
            report.check("lattice_zero_changes", stats.iter().all(|s| s.2.mean == 0.0));
        }
        PathKind::Brownian => {
            let monotone = halvings.windows(2).all(|w| {
                let (a, b) = (w[0].1, w[1].1);
                b.mean <= a.mean + DECAY_SIGMAS * a.std_err.hypot(b.std_err)
            });
            report.check("non_increasing_within_noise", monotone);
            let decays = halvings.len() >= 2 && halvings.last().unwrap().1.mean < halvings[0].1.mean;
            report.check("finest_below_coarsest", decays || halvings.len() < 2);
            let (x, y): (Vec<f64>, Vec<f64>) = halvings
                .iter()
                .filter(|h| h.1.mean > 0.0)
                .map(|h| ((h.0 as f64).ln(), h.1.mean.ln()))
                .unzip();
            report.fit = linear_fit(&x, &y);
        }
    }
    report.plot = Some(Plot {
        x_label: "steps per cell".into(),
        y_label: "changed edge fraction".into(),
        x: halvings.iter().map(|h| h.0 as f64).collect(),
        y: halvings.iter().map(|h| h.1.mean).collect(),
    });
    Ok(report.finish(t0))
}
