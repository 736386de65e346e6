use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_dyadic, check_trials, coupled_path, label_eps, ExperimentReport, Plot};
use crate::error::{McrtError, Result};
use crate::laplace::{dirichlet_energy, harmonic_extend};
use crate::rng::split_seed;
use crate::solver::SolverOptions;
use crate::stats::{quantile, Stat};
use crate::window::MapWindow;

/// Test functions on the closed unit disk with closed-form Dirichlet energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    ReZ,
    ImZ,
    AbsSq,
    /// `log |z - 2|`, harmonic on the disk.
    RadialLog,
}

impl TestFunction {
    pub fn eval(self, z: [f64; 2]) -> f64 {
        match self {
            TestFunction::ReZ => z[0],
            TestFunction::ImZ => z[1],
            TestFunction::AbsSq => z[0] * z[0] + z[1] * z[1],
            TestFunction::RadialLog => (z[0] - 2.0).hypot(z[1]).ln(),
        }
    }

    /// `∫_D |∇f|²` over the unit disk.
    pub fn continuum_energy(self) -> f64 {
        match self {
            TestFunction::ReZ | TestFunction::ImZ => PI,
            TestFunction::AbsSq => 2.0 * PI,
            TestFunction::RadialLog => PI * (4.0f64 / 3.0).ln(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::ReZ => "re-z",
            TestFunction::ImZ => "im-z",
            TestFunction::AbsSq => "abs-sq",
            TestFunction::RadialLog => "radial-log",
        }
    }
}

impl FromStr for TestFunction {
    type Err = McrtError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "re-z" | "rez" | "re" => Ok(TestFunction::ReZ),
            "im-z" | "imz" | "im" => Ok(TestFunction::ImZ),
            "abs-sq" | "abssq" | "|z|^2" => Ok(TestFunction::AbsSq),
            "radial-log" | "log" => Ok(TestFunction::RadialLog),
            _ => Err(McrtError::domain(format!("unknown test function {s:?}"))),
        }
    }
}

/// Ratio of `q90` values allowed across the ε grid.
pub const Q90_STABILITY_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub function: TestFunction,
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub gamma: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            function: TestFunction::ReZ,
            epsilons: super::default_epsilons(),
            trials: 20,
            gamma: SQRT_2,
            horizon: 1.0,
            seed: 1,
        }
    }
}

/// (harmonic ratio, pointwise ratio) for one window.
fn ratios(window: &MapWindow, f: TestFunction, opts: &SolverOptions) -> Result<(f64, f64)> {
    let emb = window.embed(opts)?;
    let net = window.graph.network();
    let data: BTreeMap<usize, f64> = emb.pinned.iter().map(|&v| (v, f.eval(emb.coords[v]))).collect();
    let h = harmonic_extend(net, &data, opts)?;
    let pointwise: Vec<f64> = emb.coords.iter().map(|&z| f.eval(z)).collect();
    let c = f.continuum_energy();
    Ok((dirichlet_energy(net, &h.values)? / c, dirichlet_energy(net, &pointwise)? / c))
}

/// Discrete energy of the harmonic extension of `f` from the Tutte-embedded
/// boundary, divided by the continuum energy of `f` on the unit disk. The
/// energy of `f` sampled at every embedded vertex is reported alongside.
pub fn energy_comparison_experiment(p: &EnergyParams) -> Result<ExperimentReport> {
    let (mut report, t0) = ExperimentReport::start(
        "energy-comparison",
        p,
        p.seed,
        "90th percentile of discrete/continuum energy ratio finite and within a factor 2 across epsilon",
    )?;
    check_dyadic(&p.epsilons)?;
    check_trials(p.trials, 2)?;
    let opts = SolverOptions::default();
    let samples: Vec<Vec<(f64, f64)>> = (0..p.trials)
        .into_par_iter()
        .map(|t| {
            let path = coupled_path(p.gamma, p.horizon, &p.epsilons, split_seed(p.seed, t as u64))?;
            p.epsilons
                .iter()
                .map(|&e| ratios(&MapWindow::from_path(&path, e)?, p.function, &opts))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut q90 = Vec::new();
    for (i, &e) in p.epsilons.iter().enumerate() {
        let h: Vec<f64> = samples.iter().map(|s| s[i].0).collect();
        let pw: Vec<f64> = samples.iter().map(|s| s[i].1).collect();
        let q = quantile(&h, 0.9);
        q90.push(q);
        report.summary.insert(format!("q90_{}", label_eps(e)), q);
        report.row(
            label_eps(e),
            e,
            &[("ratio", Stat::from_samples(&h)), ("pointwise_ratio", Stat::from_samples(&pw))],
        );
    }
    let lo = q90.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = q90.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report.summary.insert("q90_max_over_min".into(), hi / lo);
    report.check("q90_finite", q90.iter().all(|q| q.is_finite()));
    report.check("q90_stable_within_factor_2", hi <= Q90_STABILITY_FACTOR * lo);
    report.plot = Some(Plot {
        x_label: "epsilon".into(),
        y_label: "q90 energy ratio".into(),
        x: p.epsilons.clone(),
        y: q90,
    });
    Ok(report.finish(t0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_energies() {
        assert_eq!("Re z".parse::<TestFunction>().unwrap(), TestFunction::ReZ);
        assert_eq!("radial_log".parse::<TestFunction>().unwrap(), TestFunction::RadialLog);
        assert!(matches!("sin".parse::<TestFunction>(), Err(McrtError::Domain(_))));
        // 2π ∫_0^1 r / (4 - r²) dr
        let n = 100_000;
        let integral: f64 = (0..n)
            .map(|i| {
                let r = (i as f64 + 0.5) / n as f64;
                r / (4.0 - r * r)
            })
            .sum::<f64>()
            / n as f64;
        assert!((2.0 * PI * integral - TestFunction::RadialLog.continuum_energy()).abs() < 1e-9);
    }

    #[test]
    fn tutte_coordinate_is_its_own_extension() {
        let w = MapWindow::brownian(SQRT_2, 1.0, 1.0 / 32.0, 3).unwrap();
        let (h, pw) = ratios(&w, TestFunction::ReZ, &SolverOptions::default()).unwrap();
        assert!((h - pw).abs() < 1e-8 * h);
    }
}
