//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the solver, the stack-based builder or the walk code
//! of the library; the oracles work from raw minima and dense matrices.

#![allow(dead_code)]

use std::collections::BTreeSet;

use mcrt::map::{build_graph, cell_minima, MatedCrtGraph, Side};
use mcrt::network::Network;
use mcrt::path::{sample_brownian_pair, sample_lattice_walk};
use nalgebra::{DMatrix, DVector};

/// `(value, index)` order on one minima sequence.
fn lower(m: &[f64], a: usize, b: usize) -> bool {
    (m[a], a) < (m[b], b)
}

/// All-pairs transcription of the adjacency rule: `i < j` are joined on a
/// side when both of their minima lie below every intermediate minimum.
/// Consecutive cells are always joined, recorded once on `L`.
pub fn brute_edges(min_left: &[f64], min_right: &[f64]) -> BTreeSet<(usize, usize, Side)> {
    let n = min_left.len();
    let mut out = BTreeSet::new();
    for i in 0..n.saturating_sub(1) {
        out.insert((i, i + 1, Side::L));
    }
    for (side, m) in [(Side::L, min_left), (Side::R, min_right)] {
        for i in 0..n {
            for j in i + 2..n {
                let visible = (i + 1..j).all(|k| lower(m, i, k) && lower(m, j, k));
                if visible {
                    out.insert((i, j, side));
                }
            }
        }
    }
    out
}

pub fn edge_set(graph: &MatedCrtGraph) -> BTreeSet<(usize, usize, Side)> {
    graph.edges().iter().map(|e| (e.u, e.v, e.side)).collect()
}

/// A Brownian window of about `cells` cells at ε = 1 (mesh 1/8).
pub fn brownian_window(cells: usize, gamma: f64, seed: u64) -> MatedCrtGraph {
    let pair = sample_brownian_pair(gamma, cells as f64, 1.0 / 8.0, seed).unwrap();
    build_graph(&cell_minima(&pair, 1.0).unwrap()).unwrap()
}

/// A lattice-walk window with `steps_per_cell` walk steps per cell.
pub fn lattice_window(cells: usize, steps_per_cell: usize, seed: u64) -> MatedCrtGraph {
    let pair = sample_lattice_walk(cells * steps_per_cell, seed).unwrap();
    build_graph(&cell_minima(&pair, steps_per_cell as f64).unwrap()).unwrap()
}

/// Transition matrix `P[u][w] = c_uw / deg(u)`.
pub fn transition_matrix(network: &Network) -> DMatrix<f64> {
    let n = network.vertex_count();
    let mut p = DMatrix::zeros(n, n);
    for &(u, w, c) in network.pairs() {
        p[(u, w)] += c as f64 / network.degree(u) as f64;
        p[(w, u)] += c as f64 / network.degree(w) as f64;
    }
    p
}

/// Fundamental matrix `(I - P_UU)^{-1}` of the chain killed on `absorbing`,
/// with the list of transient vertices giving its row order.
pub fn fundamental_matrix(network: &Network, absorbing: &[bool]) -> (Vec<usize>, DMatrix<f64>) {
    let p = transition_matrix(network);
    let free: Vec<usize> = (0..network.vertex_count()).filter(|&v| !absorbing[v]).collect();
    let k = free.len();
    let mut a = DMatrix::identity(k, k);
    for (r, &u) in free.iter().enumerate() {
        for (c, &w) in free.iter().enumerate() {
            a[(r, c)] -= p[(u, w)];
        }
    }
    let inv = a.lu().try_inverse().expect("killed chain is transient");
    (free, inv)
}

/// Expected visits to `v` from `v` before absorption.
pub fn expected_visits(network: &Network, v: usize, absorbing: &[bool]) -> f64 {
    let (free, g) = fundamental_matrix(network, absorbing);
    let r = free.iter().position(|&u| u == v).expect("v is transient");
    g[(r, r)]
}

/// Probability of entering `target` before `exit`, for every vertex.
pub fn absorption_probabilities(network: &Network, target: &[bool], exit: &[bool]) -> Vec<f64> {
    let n = network.vertex_count();
    let absorbing: Vec<bool> = (0..n).map(|v| target[v] || exit[v]).collect();
    let (free, g) = fundamental_matrix(network, &absorbing);
    let p = transition_matrix(network);
    let step_in = DVector::from_iterator(
        free.len(),
        free.iter().map(|&u| (0..n).filter(|&w| target[w]).map(|w| p[(u, w)]).sum::<f64>()),
    );
    let h = g * step_in;
    let mut out: Vec<f64> = (0..n).map(|v| if target[v] { 1.0 } else { 0.0 }).collect();
    for (r, &u) in free.iter().enumerate() {
        out[u] = h[r];
    }
    out
}

/// Expected number of steps to leave `region`, for every vertex.
pub fn mean_exit_times(network: &Network, region: &[bool]) -> Vec<f64> {
    let absorbing: Vec<bool> = region.iter().map(|&r| !r).collect();
    let (free, g) = fundamental_matrix(network, &absorbing);
    let t = g * DVector::from_element(free.len(), 1.0);
    let mut out = vec![0.0; network.vertex_count()];
    for (r, &u) in free.iter().enumerate() {
        out[u] = t[r];
    }
    out
}

/// `P^n(v, v)` for `n = 1..=steps` by repeated dense multiplication.
pub fn dense_return_series(network: &Network, v: usize, steps: usize) -> Vec<f64> {
    let p = transition_matrix(network);
    let n = network.vertex_count();
    let mut row = DVector::zeros(n);
    row[v] = 1.0;
    let pt = p.transpose();
    (0..steps)
        .map(|_| {
            row = &pt * &row;
            row[v]
        })
        .collect()
}

pub fn relative_error(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}
