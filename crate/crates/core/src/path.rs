//! Correlated Brownian pairs and lattice-walk analogs on a uniform time grid.
//!
//! A [`PathPair`] holds the samples of `(L, R)` at times `0, δ, 2δ, …, T`,
//! normalized so that `L_0 = R_0 = 0`. The Brownian kind has increments
//! that are bivariate Gaussian with variance `δ` per coordinate and
//! correlation `-cos(πγ²/4)`; the lattice kind is a simple random walk on
//! `Z²` read coordinatewise.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{McrtError, Result};
use crate::rng::{rng_from_seed, split_seed};

/// Relative slack when checking that a length is an integer multiple of the mesh.
const GRID_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Brownian,
    Lattice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPair {
    pub gamma: f64,
    pub correlation: f64,
    pub mesh: f64,
    pub horizon: f64,
    pub seed: u64,
    pub kind: PathKind,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// Correlation `-cos(πγ²/4)` of the Brownian pair for LQG parameter `gamma ∈ (0, 2)`.
pub fn bm_correlation(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(McrtError::domain(format!("gamma must lie in (0, 2), got {gamma}")));
    }
    Ok(-(PI * gamma * gamma / 4.0).cos())
}

/// Number of grid steps of size `mesh` in `[0, horizon]`.
pub(crate) fn grid_steps(horizon: f64, mesh: f64) -> Result<usize> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(McrtError::domain(format!("horizon must be positive, got {horizon}")));
    }
    if !(mesh > 0.0 && mesh.is_finite()) {
        return Err(McrtError::domain(format!("mesh must be positive, got {mesh}")));
    }
    let ratio = horizon / mesh;
    let steps = (ratio * (1.0 + GRID_SLACK)).floor();
    if steps < 1.0 {
        return Err(McrtError::domain(format!("mesh {mesh} exceeds horizon {horizon}")));
    }
    Ok(steps as usize)
}

/// Samples a correlated Brownian pair on `[0, horizon]` with step `mesh`.
///
/// Deterministic in `(gamma, horizon, mesh, seed)`.
pub fn sample_brownian_pair(gamma: f64, horizon: f64, mesh: f64, seed: u64) -> Result<PathPair> {
    let correlation = bm_correlation(gamma)?;
    let steps = grid_steps(horizon, mesh)?;
    let mut rng = rng_from_seed(split_seed(seed, 0));
    let scale = mesh.sqrt();
    let ortho = (1.0 - correlation * correlation).max(0.0).sqrt();

    let mut left = Vec::with_capacity(steps + 1);
    let mut right = Vec::with_capacity(steps + 1);
    let (mut l, mut r) = (0.0f64, 0.0f64);
    left.push(l);
    right.push(r);
    for _ in 0..steps {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        l += scale * z1;
        r += scale * (correlation * z1 + ortho * z2);
        left.push(l);
        right.push(r);
    }
    Ok(PathPair {
        gamma,
        correlation,
        mesh,
        horizon: steps as f64 * mesh,
        seed,
        kind: PathKind::Brownian,
        left,
        right,
    })
}

/// Simple random walk on `Z²` with `n` steps, as a path pair of mesh 1.
///
/// The lattice analog corresponds to spanning-tree weighted maps, so the
/// pair is tagged with `γ = √2` and correlation 0.
pub fn sample_lattice_walk(n: usize, seed: u64) -> Result<PathPair> {
    if n < 1 {
        return Err(McrtError::domain("lattice walk needs n >= 1"));
    }
    let mut rng = rng_from_seed(split_seed(seed, 1));
    let mut left = Vec::with_capacity(n + 1);
    let mut right = Vec::with_capacity(n + 1);
    let (mut l, mut r) = (0.0f64, 0.0f64);
    left.push(l);
    right.push(r);
    for _ in 0..n {
        match rng.random_range(0..4u8) {
            0 => l += 1.0,
            1 => l -= 1.0,
            2 => r += 1.0,
            _ => r -= 1.0,
        }
        left.push(l);
        right.push(r);
    }
    Ok(PathPair {
        gamma: SQRT_2,
        correlation: 0.0,
        mesh: 1.0,
        horizon: n as f64,
        seed,
        kind: PathKind::Lattice,
        left,
        right,
    })
}

impl PathPair {
    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    /// Number of grid steps (`len() - 1`).
    pub fn steps(&self) -> usize {
        self.left.len().saturating_sub(1)
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.mesh
    }

    /// Copy with `L` multiplied by `a` and `R` by `b`.
    pub fn scaled(&self, a: f64, b: f64) -> PathPair {
        PathPair {
            left: self.left.iter().map(|v| a * v).collect(),
            right: self.right.iter().map(|v| b * v).collect(),
            ..self.clone()
        }
    }

    /// Halves the mesh by Lévy midpoint refinement.
    ///
    /// Each new midpoint is the average of its neighbours plus an independent
    /// bridge fluctuation of variance `mesh/4` per coordinate, with the pair's
    /// correlation. The original samples are kept, so the refined path is a
    /// consistent finer observation of the same Brownian pair. Lattice paths
    /// are refined by linear interpolation, which leaves every interval
    /// minimum unchanged.
    pub fn refine_midpoint(&self, seed: u64) -> PathPair {
        let n = self.steps();
        let mut left = Vec::with_capacity(2 * n + 1);
        let mut right = Vec::with_capacity(2 * n + 1);
        let mut rng = rng_from_seed(split_seed(seed, 2));
        let sd = (self.mesh / 4.0).sqrt();
        let ortho = (1.0 - self.correlation * self.correlation).max(0.0).sqrt();
        for k in 0..n {
            left.push(self.left[k]);
            right.push(self.right[k]);
            let ml = 0.5 * (self.left[k] + self.left[k + 1]);
            let mr = 0.5 * (self.right[k] + self.right[k + 1]);
            match self.kind {
                PathKind::Brownian => {
                    let z1: f64 = rng.sample(StandardNormal);
                    let z2: f64 = rng.sample(StandardNormal);
                    left.push(ml + sd * z1);
                    right.push(mr + sd * (self.correlation * z1 + ortho * z2));
                }
                PathKind::Lattice => {
                    left.push(ml);
                    right.push(mr);
                }
            }
        }
        left.push(self.left[n]);
        right.push(self.right[n]);
        PathPair {
            mesh: self.mesh / 2.0,
            left,
            right,
            ..self.clone()
        }
    }

    /// Increments `(ΔL, ΔR)` of the path.
    pub fn increments(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.left
            .windows(2)
            .zip(self.right.windows(2))
            .map(|(l, r)| (l[1] - l[0], r[1] - r[0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlation_values() {
        assert!(bm_correlation(SQRT_2).unwrap().abs() < 1e-15);
        assert!((bm_correlation((8.0f64 / 3.0).sqrt()).unwrap() - 0.5).abs() < 1e-12);
        assert!((bm_correlation(1e-6).unwrap() + 1.0).abs() < 1e-9);
        assert!((bm_correlation(2.0 - 1e-9).unwrap() - 1.0).abs() < 1e-6);
        assert!(bm_correlation(0.0).is_err());
        assert!(bm_correlation(2.0).is_err());
        assert!(bm_correlation(f64::NAN).is_err());
    }

    #[test]
    fn correlation_increasing() {
        let mut prev = -1.0;
        for k in 1..200 {
            let c = bm_correlation(k as f64 / 100.0).unwrap();
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn brownian_shape_and_determinism() {
        let p = sample_brownian_pair(1.2, 2.0, 0.01, 5).unwrap();
        assert_eq!(p.len(), 201);
        assert_eq!(p.left[0], 0.0);
        assert_eq!(p.right[0], 0.0);
        let q = sample_brownian_pair(1.2, 2.0, 0.01, 5).unwrap();
        assert_eq!(p, q);
        let r = sample_brownian_pair(1.2, 2.0, 0.01, 6).unwrap();
        assert_ne!(p.left, r.left);
    }

    #[test]
    fn brownian_rejects_bad_grid() {
        assert!(sample_brownian_pair(1.0, 0.0, 0.1, 1).is_err());
        assert!(sample_brownian_pair(1.0, 1.0, -0.1, 1).is_err());
        assert!(sample_brownian_pair(1.0, 1.0, 2.0, 1).is_err());
        assert!(sample_brownian_pair(2.5, 1.0, 0.1, 1).is_err());
    }

    #[test]
    fn lattice_steps_are_unit() {
        let p = sample_lattice_walk(1000, 3).unwrap();
        assert_eq!(p.len(), 1001);
        assert_eq!(p.kind, PathKind::Lattice);
        for (dl, dr) in p.increments() {
            assert_eq!(dl.abs() + dr.abs(), 1.0);
        }
        assert!(sample_lattice_walk(0, 3).is_err());
    }

    #[test]
    fn refinement_keeps_samples() {
        let p = sample_brownian_pair(1.0, 1.0, 0.125, 9).unwrap();
        let q = p.refine_midpoint(1);
        assert_eq!(q.len(), 2 * p.len() - 1);
        assert_eq!(q.mesh, p.mesh / 2.0);
        for k in 0..p.len() {
            assert_eq!(q.left[2 * k], p.left[k]);
            assert_eq!(q.right[2 * k], p.right[k]);
        }
    }
}
