mod common;

use std::collections::BTreeMap;

use mcrt::solver::SolverOptions;
use mcrt::walk::{
    exact_hitting_probabilities, exit_time_mc, expected_exit_times, hitting_trials, return_probability,
    return_probability_series, simulate_walk, Control, ReturnMethod, Role,
};

use common::{absorption_probabilities, brownian_window, dense_return_series, lattice_window, mean_exit_times};

#[test]
fn transition_frequencies_follow_multiplicities() {
    let g = brownian_window(60, 1.4, 3);
    let net = g.network();
    let v = (0..g.count()).max_by_key(|&v| (net.degree(v), std::cmp::Reverse(v))).unwrap();
    let steps = 100_000;
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seen = 0;
    // Count moves out of v along one long walk.
    let mut prev = usize::MAX;
    simulate_walk(
        net,
        v,
        |x, _| {
            if prev == v {
                *counts.entry(x).or_default() += 1;
                seen += 1;
            }
            prev = x;
            if seen >= steps {
                Control::HitTarget
            } else {
                Control::Continue
            }
        },
        usize::MAX,
        11,
    )
    .unwrap();
    let deg = net.degree(v) as f64;
    for (w, c) in net.neighbors(v) {
        let p = c as f64 / deg;
        let got = counts.get(&w).copied().unwrap_or(0) as f64 / seen as f64;
        let sigma = (p * (1.0 - p) / seen as f64).sqrt();
        assert!((got - p).abs() < 3.0 * sigma + 1e-12, "w={w} p={p} got={got}");
    }
}

#[test]
fn long_run_traversals_are_reversible() {
    let g = lattice_window(40, 4, 5);
    let net = g.network();
    let mut forward: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut occupation = vec![0usize; g.count()];
    let total = 400_000;
    let mut prev = None;
    simulate_walk(
        net,
        0,
        |x, s| {
            occupation[x] += 1;
            if let Some(p) = prev {
                *forward.entry((p, x)).or_default() += 1;
            }
            prev = Some(x);
            if s >= total {
                Control::HitTarget
            } else {
                Control::Continue
            }
        },
        usize::MAX,
        2,
    )
    .unwrap();
    for &(u, w, _) in net.pairs() {
        let a = forward.get(&(u, w)).copied().unwrap_or(0) as f64;
        let b = forward.get(&(w, u)).copied().unwrap_or(0) as f64;
        // Counts in the two directions differ by at most one per excursion;
        // a 3σ bound on the Poisson-like difference covers it.
        assert!((a - b).abs() <= 3.0 * (a + b).sqrt() + 1.0, "edge ({u},{w}) {a} vs {b}");
    }
    // Occupation is proportional to degree.
    let two_e: f64 = (0..g.count()).map(|v| net.degree(v) as f64).sum();
    let (x, y) = (0, g.count() / 2);
    let px = occupation[x] as f64 / (total + 1) as f64;
    let py = occupation[y] as f64 / (total + 1) as f64;
    let want = net.degree(x) as f64 / net.degree(y) as f64;
    assert!(((px / py) - want).abs() / want < 0.1, "{px} {py} {want} {two_e}");
}

#[test]
fn exact_return_series_matches_matrix_powers() {
    let g = brownian_window(100, 1.9, 8);
    let v = g.count() / 2;
    let got = return_probability_series(g.network(), v, 50, 1000).unwrap();
    let want = dense_return_series(g.network(), v, 50);
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(got[0], 0.0);
}

#[test]
fn monte_carlo_return_agrees_with_exact() {
    let g = brownian_window(100, 1.4, 21);
    let v = g.count() / 2;
    let n = 50;
    let exact = return_probability(g.network(), v, n, ReturnMethod::exact()).unwrap().mean;
    let trials = 40_000;
    let mc = return_probability(g.network(), v, n, ReturnMethod::MonteCarlo { trials, seed: 4 }).unwrap();
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((mc.mean - exact).abs() < 3.0 * sigma, "{} vs {exact}", mc.mean);
}

#[test]
fn hitting_and_exit_agree_with_absorbing_chain() {
    let g = brownian_window(200, 1.4, 17);
    let net = g.network();
    let n = g.count();
    let target: Vec<bool> = (0..n).map(|v| v % 23 == 5 && !g.is_boundary(v)).collect();
    let exit = g.boundary_flags().to_vec();
    let roles: Vec<Role> = (0..n)
        .map(|v| if target[v] { Role::Target } else if exit[v] { Role::Exit } else { Role::Free })
        .collect();
    let want = absorption_probabilities(net, &target, &exit);
    let solved = exact_hitting_probabilities(net, &roles, &SolverOptions::default()).unwrap();
    for v in 0..n {
        assert!((solved[v] - want[v]).abs() < 1e-8);
    }
    let start = mcrt::window::central_vertex(&g).unwrap();
    let trials = 4000;
    let outcomes = hitting_trials(net, start, &roles, trials, 99, 1_000_000);
    let outcomes = outcomes.unwrap();
    let est = mcrt::walk::summarize(&outcomes, 99);
    let p = want[start];
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((est.mean - p).abs() < 3.0 * sigma.max(1e-3), "{} vs {p}", est.mean);

    let region: Vec<bool> = exit.iter().map(|&b| !b).collect();
    let times = expected_exit_times(net, &region, &SolverOptions::default()).unwrap();
    let oracle = mean_exit_times(net, &region);
    for v in 0..n {
        assert!((times[v] - oracle[v]).abs() <= 1e-8 * oracle[v].max(1.0));
    }
    let mc = exit_time_mc(net, start, &region, trials, 5).unwrap();
    assert!((mc.mean - oracle[start]).abs() < 3.0 * mc.std_err, "{} vs {}", mc.mean, oracle[start]);
}

#[test]
fn trials_are_reproducible_from_seed_and_index() {
    let g = brownian_window(80, 1.4, 2);
    let roles: Vec<Role> = (0..g.count())
        .map(|v| if g.is_boundary(v) { Role::Exit } else { Role::Free })
        .collect();
    let start = mcrt::window::central_vertex(&g).unwrap();
    let a = hitting_trials(g.network(), start, &roles, 64, 7, 10_000).unwrap();
    let b = hitting_trials(g.network(), start, &roles, 64, 7, 10_000).unwrap();
    assert_eq!(a.len(), 64);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.trial, x.outcome, x.steps), (y.trial, y.outcome, y.steps));
    }
    let c = hitting_trials(g.network(), start, &roles, 32, 7, 10_000).unwrap();
    for (x, y) in a.iter().zip(&c) {
        assert_eq!((x.trial, x.outcome, x.steps), (y.trial, y.outcome, y.steps));
    }
}
