//! Simple random walk on a multigraph.
//!
//! From `v` the walk picks one of the `deg(v)` edge-ends uniformly, so a
//! neighbour joined by `k` parallel edges is chosen with probability
//! `k / deg(v)`. Monte Carlo estimates run trials in parallel, each on its
//! own generator derived from `(seed, trial)`, and reduce in trial order.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{McrtError, Result};
use crate::laplace::{harmonic_extend, Embedding};
use crate::network::Network;
use crate::rng::{rng_from_seed, split_seed};
use crate::solver::{solve_pinned, SolverOptions};
use crate::stats::{wilson_interval, Stat, Z95};

/// Default step budget for hitting-type walks.
pub const DEFAULT_MAX_STEPS: usize = 10_000_000;
/// Vertex cap for the exact return-probability computation.
pub const EXACT_RETURN_MAX_VERTICES: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    HitTarget,
    LeftRegion,
    StepBudget,
}

/// Verdict of a stopping rule at `(vertex, step)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    HitTarget,
    LeftRegion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath {
    pub vertices: Vec<usize>,
    pub stop_reason: StopReason,
    pub steps: usize,
}

#[inline]
fn step<R: Rng>(network: &Network, v: usize, rng: &mut R) -> usize {
    let ends = network.ends(v);
    ends[rng.random_range(0..ends.len())]
}

/// Runs one walk; returns the final vertex, stop reason and step count.
fn run<R: Rng, F: FnMut(usize, usize) -> Control>(
    network: &Network,
    start: usize,
    mut stop: F,
    max_steps: usize,
    rng: &mut R,
    mut record: Option<&mut Vec<usize>>,
) -> (usize, StopReason, usize) {
    let mut v = start;
    let mut steps = 0;
    if let Some(r) = record.as_deref_mut() {
        r.push(v);
    }
    loop {
        match stop(v, steps) {
            Control::HitTarget => return (v, StopReason::HitTarget, steps),
            Control::LeftRegion => return (v, StopReason::LeftRegion, steps),
            Control::Continue => {}
        }
        if steps >= max_steps {
            return (v, StopReason::StepBudget, steps);
        }
        v = step(network, v, rng);
        steps += 1;
        if let Some(r) = record.as_deref_mut() {
            r.push(v);
        }
    }
}

fn check_start(network: &Network, start: usize) -> Result<()> {
    if start >= network.vertex_count() {
        return Err(McrtError::domain(format!("start vertex {start} out of range")));
    }
    if network.degree(start) == 0 {
        return Err(McrtError::domain(format!("start vertex {start} is isolated")));
    }
    Ok(())
}

/// Simulates a walk from `start` until `stop` says so or `max_steps` steps are taken.
pub fn simulate_walk<F: FnMut(usize, usize) -> Control>(
    network: &Network,
    start: usize,
    stop: F,
    max_steps: usize,
    seed: u64,
) -> Result<WalkPath> {
    check_start(network, start)?;
    if max_steps < 1 {
        return Err(McrtError::domain("max_steps must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let mut vertices = Vec::new();
    let (_, stop_reason, steps) = run(network, start, stop, max_steps, &mut rng, Some(&mut vertices));
    Ok(WalkPath {
        vertices,
        stop_reason,
        steps,
    })
}

/// Monte Carlo probability estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    /// 95% Wilson interval.
    pub ci: [f64; 2],
    pub trials: usize,
    pub successes: usize,
    /// Trials stopped by the step budget (counted as failures).
    pub budget_exhausted: usize,
    pub seed: u64,
}

impl Estimate {
    fn from_counts(successes: usize, trials: usize, budget_exhausted: usize, seed: u64) -> Estimate {
        let s = Stat::proportion(successes, trials);
        Estimate {
            mean: s.mean,
            std_err: s.std_err,
            ci: wilson_interval(successes, trials, Z95),
            trials,
            successes,
            budget_exhausted,
            seed,
        }
    }
}

/// Per-trial outcome record, as written to trial logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub outcome: StopReason,
    pub steps: usize,
}

/// Role of a vertex in a hitting problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Free,
    Target,
    Exit,
}

/// Walks from `start` until a target or exit vertex; trial `t` uses `split_seed(seed, t)`.
pub fn hitting_trials(
    network: &Network,
    start: usize,
    roles: &[Role],
    trials: usize,
    seed: u64,
    max_steps: usize,
) -> Result<Vec<TrialOutcome>> {
    check_start(network, start)?;
    if roles.len() != network.vertex_count() {
        return Err(McrtError::domain("role table does not match vertex count"));
    }
    Ok((0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(split_seed(seed, t as u64));
            let stop = |v: usize, _| match roles[v] {
                Role::Target => Control::HitTarget,
                Role::Exit => Control::LeftRegion,
                Role::Free => Control::Continue,
            };
            let (_, outcome, steps) = run(network, start, stop, max_steps, &mut rng, None);
            TrialOutcome { trial: t, outcome, steps }
        })
        .collect())
}

pub fn summarize(outcomes: &[TrialOutcome], seed: u64) -> Estimate {
    let successes = outcomes.iter().filter(|o| o.outcome == StopReason::HitTarget).count();
    let exhausted = outcomes.iter().filter(|o| o.outcome == StopReason::StepBudget).count();
    Estimate::from_counts(successes, outcomes.len(), exhausted, seed)
}

/// Monte Carlo probability of reaching a target before an exit vertex.
pub fn hitting_probability(
    network: &Network,
    start: usize,
    roles: &[Role],
    trials: usize,
    seed: u64,
) -> Result<Estimate> {
    let outcomes = hitting_trials(network, start, roles, trials, seed, DEFAULT_MAX_STEPS)?;
    Ok(summarize(&outcomes, seed))
}

/// Exact hitting probabilities: harmonic with value 1 on targets and 0 on exits.
pub fn exact_hitting_probabilities(network: &Network, roles: &[Role], opts: &SolverOptions) -> Result<Vec<f64>> {
    let data: BTreeMap<usize, f64> = roles
        .iter()
        .enumerate()
        .filter_map(|(v, r)| match r {
            Role::Target => Some((v, 1.0)),
            Role::Exit => Some((v, 0.0)),
            Role::Free => None,
        })
        .collect();
    Ok(harmonic_extend(network, &data, opts)?.values)
}

/// Monte Carlo mean number of steps until the walk from `start` leaves `region`.
pub fn exit_time_mc(
    network: &Network,
    start: usize,
    region: &[bool],
    trials: usize,
    seed: u64,
) -> Result<Stat> {
    let roles: Vec<Role> = region.iter().map(|&inside| if inside { Role::Free } else { Role::Exit }).collect();
    let outcomes = hitting_trials(network, start, &roles, trials, seed, DEFAULT_MAX_STEPS)?;
    if outcomes.iter().any(|o| o.outcome == StopReason::StepBudget) {
        return Err(McrtError::Resource("exit-time walk exceeded its step budget".into()));
    }
    let steps: Vec<f64> = outcomes.iter().map(|o| o.steps as f64).collect();
    Ok(Stat::from_samples(&steps))
}

/// Exact expected exit times from `region`: `(D - A) t = deg` on the region, 0 outside.
pub fn expected_exit_times(network: &Network, region: &[bool], opts: &SolverOptions) -> Result<Vec<f64>> {
    if region.len() != network.vertex_count() {
        return Err(McrtError::domain("region mask does not match vertex count"));
    }
    let pinned: Vec<Option<f64>> = region.iter().map(|&inside| if inside { None } else { Some(0.0) }).collect();
    let source: Vec<f64> = (0..network.vertex_count()).map(|v| network.degree(v) as f64).collect();
    solve_pinned(network, &pinned, Some(&source), opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnMethod {
    /// Repeated sparse products with the transition matrix; refuses graphs above `max_vertices`.
    Exact { max_vertices: usize },
    MonteCarlo { trials: usize, seed: u64 },
}

impl ReturnMethod {
    pub fn exact() -> Self {
        ReturnMethod::Exact {
            max_vertices: EXACT_RETURN_MAX_VERTICES,
        }
    }
}

/// `P^k 1_v` evaluated at `v` for `k = 1..=n`.
pub fn return_probability_series(network: &Network, v: usize, n: usize, max_vertices: usize) -> Result<Vec<f64>> {
    check_start(network, v)?;
    let size = network.vertex_count();
    if size > max_vertices {
        return Err(McrtError::Resource(format!(
            "exact return probability limited to {max_vertices} vertices, graph has {size}"
        )));
    }
    let inv_deg: Vec<f64> = (0..size).map(|x| 1.0 / network.degree(x).max(1) as f64).collect();
    let mut f = vec![0.0; size];
    f[v] = 1.0;
    let mut next = vec![0.0; size];
    let mut out = Vec::with_capacity(n);
    let apply = |f: &[f64], x: usize| -> f64 { network.ends(x).iter().map(|&y| f[y]).sum::<f64>() * inv_deg[x] };
    for _ in 0..n {
        if size >= 20_000 {
            next.par_iter_mut().enumerate().for_each(|(x, out)| *out = apply(&f, x));
        } else {
            for (x, out) in next.iter_mut().enumerate() {
                *out = apply(&f, x);
            }
        }
        std::mem::swap(&mut f, &mut next);
        out.push(f[v]);
    }
    Ok(out)
}

/// Probability that the walk from `v` is back at `v` after exactly `n` steps.
pub fn return_probability(network: &Network, v: usize, n: usize, method: ReturnMethod) -> Result<Stat> {
    if n < 1 {
        return Err(McrtError::domain("n must be at least 1"));
    }
    match method {
        ReturnMethod::Exact { max_vertices } => {
            let series = return_probability_series(network, v, n, max_vertices)?;
            Ok(Stat {
                mean: series[n - 1],
                std_err: 0.0,
                n: 0,
            })
        }
        ReturnMethod::MonteCarlo { trials, seed } => {
            check_start(network, v)?;
            let hits: usize = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = rng_from_seed(split_seed(seed, t as u64));
                    let mut x = v;
                    for _ in 0..n {
                        x = step(network, x, &mut rng);
                    }
                    usize::from(x == v)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            Ok(Stat::proportion(hits, trials))
        }
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn dist_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Euclidean distance from `p` to the polyline `curve`.
pub fn dist_to_curve(p: [f64; 2], curve: &[[f64; 2]]) -> f64 {
    if curve.len() == 1 {
        return dist(p, curve[0]);
    }
    curve
        .windows(2)
        .map(|s| dist_to_segment(p, s[0], s[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Start vertex and vertex roles of a hitting problem in an embedded map.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingProblem {
    pub starts: Vec<usize>,
    pub roles: Vec<Role>,
}

/// Curve-following problem: from the vertex nearest the curve's start, reach
/// the ball of radius `r_big` about the curve's end before leaving the
/// `r_big`-neighbourhood of the curve. Pinned boundary vertices always count
/// as having left.
pub fn curve_follow_problem(
    embedding: &Embedding,
    curve: &[[f64; 2]],
    r_small: f64,
    r_big: f64,
) -> Result<HittingProblem> {
    if curve.is_empty() {
        return Err(McrtError::domain("curve has no points"));
    }
    if !(r_small > 0.0 && r_small < r_big) {
        return Err(McrtError::domain(format!("need 0 < r_small < r_big, got {r_small}, {r_big}")));
    }
    if let Some(p) = curve.iter().find(|&&p| !embedding.contains(p, 0.0)) {
        return Err(McrtError::domain(format!("curve point {p:?} lies outside the embedded window")));
    }
    let start = embedding.nearest_vertex(curve[0]);
    if dist(embedding.coords[start], curve[0]) > r_small {
        return Err(McrtError::domain("no vertex within r_small of the curve start"));
    }
    let end = *curve.last().expect("non-empty");
    let mut pinned = vec![false; embedding.coords.len()];
    for &v in &embedding.pinned {
        pinned[v] = true;
    }
    let roles = embedding
        .coords
        .iter()
        .enumerate()
        .map(|(v, &c)| {
            if dist(c, end) < r_big {
                Role::Target
            } else if pinned[v] || dist_to_curve(c, curve) >= r_big {
                Role::Exit
            } else {
                Role::Free
            }
        })
        .collect();
    Ok(HittingProblem { starts: vec![start], roles })
}

pub fn curve_follow_probability(
    network: &Network,
    embedding: &Embedding,
    curve: &[[f64; 2]],
    r_small: f64,
    r_big: f64,
    trials: usize,
    seed: u64,
) -> Result<(HittingProblem, Estimate)> {
    let problem = curve_follow_problem(embedding, curve, r_small, r_big)?;
    let est = hitting_probability(network, problem.starts[0], &problem.roles, trials, seed)?;
    Ok((problem, est))
}

/// Annulus problem about `center`: starts in `B_{4sr}`, targets in the closed
/// ball `B_{sr}`, exits at distance at least `r` or on the pinned boundary.
pub fn annulus_problem(embedding: &Embedding, center: [f64; 2], s: f64, r: f64) -> Result<HittingProblem> {
    if !(s > 0.0 && s <= 0.1) {
        return Err(McrtError::domain(format!("s must lie in (0, 1/10], got {s}")));
    }
    if r.is_nan() || r <= 0.0 {
        return Err(McrtError::domain("r must be positive"));
    }
    if !embedding.contains(center, r) {
        return Err(McrtError::domain(format!(
            "annulus of outer radius {r} about {center:?} is not inside the window"
        )));
    }
    let mut pinned = vec![false; embedding.coords.len()];
    for &v in &embedding.pinned {
        pinned[v] = true;
    }
    let inner = s * r;
    let starts: Vec<usize> = (0..embedding.coords.len())
        .filter(|&v| dist(embedding.coords[v], center) < 4.0 * inner)
        .collect();
    if starts.is_empty() {
        return Err(McrtError::domain("no vertex embedded in the start ball"));
    }
    let roles = embedding
        .coords
        .iter()
        .enumerate()
        .map(|(v, &c)| {
            let d = dist(c, center);
            if d <= inner {
                Role::Target
            } else if pinned[v] || d >= r {
                Role::Exit
            } else {
                Role::Free
            }
        })
        .collect();
    Ok(HittingProblem { starts, roles })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusEstimate {
    pub per_start: Vec<(usize, Estimate)>,
    /// Estimate at the start with the smallest mean.
    pub min: Estimate,
    pub pooled: Estimate,
}

/// At most `max_starts` starts, evenly spaced through the sorted start list.
pub fn thin_starts(starts: &[usize], max_starts: usize) -> Vec<usize> {
    if starts.len() <= max_starts {
        return starts.to_vec();
    }
    (0..max_starts).map(|i| starts[i * starts.len() / max_starts]).collect()
}

/// Crossing probability of the annulus, estimated from up to `max_starts` starts.
#[allow(clippy::too_many_arguments)]
pub fn annulus_crossing_probability(
    network: &Network,
    embedding: &Embedding,
    center: [f64; 2],
    s: f64,
    r: f64,
    trials: usize,
    seed: u64,
    max_starts: usize,
) -> Result<(HittingProblem, AnnulusEstimate)> {
    let problem = annulus_problem(embedding, center, s, r)?;
    let starts = thin_starts(&problem.starts, max_starts.max(1));
    let mut per_start = Vec::with_capacity(starts.len());
    let (mut succ, mut total, mut exhausted) = (0, 0, 0);
    for (i, &v) in starts.iter().enumerate() {
        let e = hitting_probability(network, v, &problem.roles, trials, split_seed(seed, i as u64))?;
        succ += e.successes;
        total += e.trials;
        exhausted += e.budget_exhausted;
        per_start.push((v, e));
    }
    let min = per_start
        .iter()
        .map(|p| p.1)
        .min_by(|a, b| a.mean.total_cmp(&b.mean))
        .expect("non-empty starts");
    let pooled = Estimate::from_counts(succ, total, exhausted, seed);
    Ok((problem, AnnulusEstimate { per_start, min, pooled }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_move_on_double_edge() {
        let g = Network::from_edges(2, &[(0, 1, 2)]).unwrap();
        let w = simulate_walk(&g, 0, |_, s| if s >= 5 { Control::HitTarget } else { Control::Continue }, 100, 1)
            .unwrap();
        assert_eq!(w.vertices, vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(w.stop_reason, StopReason::HitTarget);
    }

    #[test]
    fn budget_and_errors() {
        let g = Network::from_edges(3, &[(0, 1, 1)]).unwrap();
        let w = simulate_walk(&g, 0, |_, _| Control::Continue, 10, 1).unwrap();
        assert_eq!(w.stop_reason, StopReason::StepBudget);
        assert_eq!(w.steps, 10);
        assert_eq!(w.vertices.len(), 11);
        assert!(simulate_walk(&g, 2, |_, _| Control::Continue, 10, 1).is_err());
        assert!(simulate_walk(&g, 0, |_, _| Control::Continue, 0, 1).is_err());
    }

    #[test]
    fn triangle_return() {
        let g = Network::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let p2 = return_probability(&g, 0, 2, ReturnMethod::exact()).unwrap();
        assert!((p2.mean - 0.5).abs() < 1e-15);
        let p1 = return_probability(&g, 0, 1, ReturnMethod::exact()).unwrap();
        assert_eq!(p1.mean, 0.0);
        let cap = ReturnMethod::Exact { max_vertices: 2 };
        assert!(matches!(return_probability(&g, 0, 2, cap), Err(McrtError::Resource(_))));
    }

    #[test]
    fn deterministic_trials() {
        let g = Network::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let roles = [Role::Exit, Role::Free, Role::Free, Role::Target];
        let a = hitting_trials(&g, 1, &roles, 200, 9, 1000).unwrap();
        let b = hitting_trials(&g, 1, &roles, 200, 9, 1000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exact_exit_times_on_path() {
        // from the middle of 0-1-2-3-4 with exits at the ends: k (4 - k) = 4
        let g = Network::from_edges(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)]).unwrap();
        let region = [false, true, true, true, false];
        let t = expected_exit_times(&g, &region, &SolverOptions::default()).unwrap();
        assert!((t[2] - 4.0).abs() < 1e-12);
        assert!((t[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn curve_distance() {
        let c = [[0.0, 0.0], [1.0, 0.0]];
        assert!((dist_to_curve([0.5, 0.3], &c) - 0.3).abs() < 1e-15);
        assert!((dist_to_curve([2.0, 0.0], &c) - 1.0).abs() < 1e-15);
    }
}
