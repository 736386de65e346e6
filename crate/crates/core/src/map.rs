//! The ε-mated-CRT graph of a path pair.
//!
//! Vertex `i` (0-based) owns the time interval `[iε, (i+1)ε]`. Two vertices
//! `i < j` are joined by an `L`-edge when the larger of their `L` cell
//! minima does not exceed the infimum of `L` between them, i.e. the minimum
//! of the intermediate cell minima; likewise for `R`. Adjacency therefore
//! reduces to a "valley visibility" relation on the two sequences of cell
//! minima, which a monotone stack enumerates in linear time.
//!
//! Cell minima are compared by `(value, index)`. Grid minima tie whenever
//! two neighbouring cells attain their minimum at the shared endpoint (and
//! constantly for lattice walks); the index tie-break acts as an
//! infinitesimal perturbation, so the resulting graph is always a subgraph
//! of the non-strict relation and carries the planar triangulation structure.

use serde::{Deserialize, Serialize};

use crate::error::{McrtError, Result};
use crate::network::Network;
use crate::path::{PathKind, PathPair};

/// Relative slack when matching `epsilon` to a whole number of grid steps.
const CELL_SLACK: f64 = 1e-6;

/// Minimum number of grid steps per cell for Brownian input.
pub const MIN_STEPS_PER_CELL: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct CellMinSeq {
    pub epsilon: f64,
    pub min_left: Vec<f64>,
    pub min_right: Vec<f64>,
    /// Earliest grid time at which each cell minimum is attained.
    pub argmin_left: Vec<f64>,
    pub argmin_right: Vec<f64>,
}

impl CellMinSeq {
    pub fn count(&self) -> usize {
        self.min_left.len()
    }

    /// Cell minima given directly, e.g. for worked examples.
    pub fn from_minima(epsilon: f64, min_left: Vec<f64>, min_right: Vec<f64>) -> Result<Self> {
        if min_left.len() != min_right.len() {
            return Err(McrtError::domain("L and R minima differ in length"));
        }
        if min_left.iter().chain(&min_right).any(|v| !v.is_finite()) {
            return Err(McrtError::domain("cell minima must be finite"));
        }
        let times: Vec<f64> = (0..min_left.len()).map(|i| i as f64 * epsilon).collect();
        Ok(CellMinSeq {
            epsilon,
            min_left,
            min_right,
            argmin_left: times.clone(),
            argmin_right: times,
        })
    }

    pub fn minima(&self, side: Side) -> &[f64] {
        match side {
            Side::L => &self.min_left,
            Side::R => &self.min_right,
        }
    }
}

/// Number of grid steps per cell of size `epsilon`.
fn steps_per_cell(path: &PathPair, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(McrtError::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let ratio = epsilon / path.mesh;
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > CELL_SLACK * k {
        return Err(McrtError::domain(format!(
            "epsilon {epsilon} is not a whole number of mesh steps ({})",
            path.mesh
        )));
    }
    let k = k as usize;
    if path.kind == PathKind::Brownian && k < MIN_STEPS_PER_CELL {
        return Err(McrtError::domain(format!(
            "epsilon {epsilon} must be at least {MIN_STEPS_PER_CELL} x mesh {}",
            path.mesh
        )));
    }
    if k > path.steps() {
        return Err(McrtError::domain(format!("epsilon {epsilon} exceeds horizon {}", path.horizon)));
    }
    Ok(k)
}

/// Minimum of each coordinate over the grid samples of every cell, endpoints inclusive.
pub fn cell_minima(path: &PathPair, epsilon: f64) -> Result<CellMinSeq> {
    let k = steps_per_cell(path, epsilon)?;
    let count = path.steps() / k;
    let window_min = |samples: &[f64], cell: usize| -> (f64, f64) {
        let start = cell * k;
        let mut best = start;
        for t in start + 1..=start + k {
            if samples[t] < samples[best] {
                best = t;
            }
        }
        (samples[best], path.time(best))
    };
    let (min_left, argmin_left) = (0..count).map(|c| window_min(&path.left, c)).unzip();
    let (min_right, argmin_right) = (0..count).map(|c| window_min(&path.right, c)).unzip();
    Ok(CellMinSeq {
        epsilon,
        min_left,
        min_right,
        argmin_left,
        argmin_right,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::L => "L",
            Side::R => "R",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = McrtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" => Ok(Side::L),
            "R" => Ok(Side::R),
            other => Err(McrtError::Parse(format!("unknown side {other:?}"))),
        }
    }
}

/// One edge record; `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub side: Side,
}

/// `a` precedes `b` in the `(value, index)` order.
#[inline]
pub fn cell_below(m: &[f64], a: usize, b: usize) -> bool {
    m[a] < m[b] || (m[a] == m[b] && a < b)
}

/// Non-consecutive visibility pairs `(i, j)`, `j > i + 1`, of one minima sequence.
///
/// For each `j`, the stack holds the right-to-left minima of the prefix.
/// Every entry popped by `j` sees `j`, as does the first entry left in place;
/// no other earlier index can.
pub fn visibility_pairs(m: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(m.len());
    let mut stack: Vec<usize> = Vec::with_capacity(64);
    for j in 0..m.len() {
        while let Some(&top) = stack.last() {
            if cell_below(m, j, top) {
                stack.pop();
                if top + 1 < j {
                    out.push((top, j));
                }
            } else {
                break;
            }
        }
        if let Some(&top) = stack.last() {
            if top + 1 < j {
                out.push((top, j));
            }
        }
        stack.push(j);
    }
    out
}

/// Running minima flags from the left and from the right.
fn running_extremes(m: &[f64], flags: &mut [bool]) {
    let mut best: Option<usize> = None;
    for (i, flag) in flags.iter_mut().enumerate() {
        if best.is_none_or(|b| cell_below(m, i, b)) {
            *flag = true;
            best = Some(i);
        }
    }
    best = None;
    for (i, flag) in flags.iter_mut().enumerate().rev() {
        if best.is_none_or(|b| cell_below(m, i, b)) {
            *flag = true;
            best = Some(i);
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatedCrtGraph {
    count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, Side)>>,
    boundary: Vec<bool>,
    network: Network,
}

impl PartialEq for MatedCrtGraph {
    fn eq(&self, other: &Self) -> bool {
        self.count == other.count && self.edges == other.edges && self.boundary == other.boundary
    }
}

impl MatedCrtGraph {
    /// Assembles a graph from edge records, checking the multiplicity rules.
    pub fn from_parts(count: usize, mut edges: Vec<Edge>, boundary: Vec<bool>) -> Result<Self> {
        if boundary.len() != count {
            return Err(McrtError::domain("boundary flags do not match vertex count"));
        }
        for e in &edges {
            if e.u >= e.v || e.v >= count {
                return Err(McrtError::domain(format!("invalid edge ({}, {})", e.u, e.v)));
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(McrtError::domain("duplicate (pair, side) edge record"));
        }
        let mut adjacency = vec![Vec::new(); count];
        for e in &edges {
            adjacency[e.u].push((e.v, e.side));
            adjacency[e.v].push((e.u, e.side));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let records: Vec<(usize, usize, u32)> = edges.iter().map(|e| (e.u, e.v, 1)).collect();
        let network = Network::from_edges(count, &records)?;
        Ok(MatedCrtGraph {
            count,
            edges,
            adjacency,
            boundary,
            network,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Edge records sorted by `(u, v, side)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn adjacency(&self, v: usize) -> &[(usize, Side)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.count).filter(|&v| self.boundary[v]).collect()
    }

    /// Multiplicity-weighted view used by solvers and walks.
    pub fn network(&self) -> &Network {
        &self.network
    }
}

/// Builds the mated-CRT graph from cell minima.
///
/// Consecutive cells get a single `L`-edge. A non-consecutive pair gets one
/// edge per side on which it is visible, so at most two.
pub fn build_graph(cells: &CellMinSeq) -> Result<MatedCrtGraph> {
    let n = cells.count();
    if n < 2 {
        return Err(McrtError::domain(format!("need at least 2 cells, got {n}")));
    }
    let mut edges: Vec<Edge> = (0..n - 1).map(|i| Edge { u: i, v: i + 1, side: Side::L }).collect();
    for side in [Side::L, Side::R] {
        edges.extend(
            visibility_pairs(cells.minima(side))
                .into_iter()
                .map(|(u, v)| Edge { u, v, side }),
        );
    }
    let mut boundary = vec![false; n];
    running_extremes(&cells.min_left, &mut boundary);
    running_extremes(&cells.min_right, &mut boundary);
    boundary[0] = true;
    boundary[n - 1] = true;
    MatedCrtGraph::from_parts(n, edges, boundary)
}

/// Whether rescaling `L` by `a` and `R` by `b` leaves the graph unchanged.
pub fn scale_check(path: &PathPair, a: f64, b: f64, epsilon: f64) -> Result<bool> {
    if !(a > 0.0 && b > 0.0) {
        return Err(McrtError::domain("scale factors must be positive"));
    }
    let base = build_graph(&cell_minima(path, epsilon)?)?;
    let scaled = build_graph(&cell_minima(&path.scaled(a, b), epsilon)?)?;
    Ok(base == scaled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::sample_brownian_pair;

    fn path_from(left: Vec<f64>, mesh: f64) -> PathPair {
        let right = vec![0.0; left.len()];
        PathPair {
            gamma: std::f64::consts::SQRT_2,
            correlation: 0.0,
            mesh,
            horizon: (left.len() - 1) as f64 * mesh,
            seed: 0,
            kind: PathKind::Lattice,
            left,
            right,
        }
    }

    #[test]
    fn cell_minima_worked_example() {
        let p = path_from(vec![0.0, -1.0, 0.5, 0.2, -0.3, 0.1, 0.4], 0.5);
        let c = cell_minima(&p, 1.0).unwrap();
        assert_eq!(c.min_left, vec![-1.0, -0.3, -0.3]);
        assert_eq!(c.argmin_left, vec![0.5, 2.0, 2.0]);
    }

    #[test]
    fn cell_minima_constant_path() {
        let p = path_from(vec![0.0; 17], 0.125);
        let c = cell_minima(&p, 1.0).unwrap();
        assert_eq!(c.min_left, vec![0.0, 0.0]);
    }

    #[test]
    fn cell_minima_preconditions() {
        let p = sample_brownian_pair(1.0, 1.0, 0.01, 1).unwrap();
        assert!(cell_minima(&p, 0.05).is_err()); // 5 steps per cell
        assert!(cell_minima(&p, 0.105).is_err()); // not a grid multiple
        assert!(cell_minima(&p, 2.0).is_err());
        assert_eq!(cell_minima(&p, 0.1).unwrap().count(), 10);
    }

    #[test]
    fn visibility_single_side_example() {
        let m = [3.0, 1.0, 4.0, 1.5, 5.0];
        assert_eq!(visibility_pairs(&m), vec![(1, 3)]);
    }

    #[test]
    fn strictly_increasing_has_no_long_edges() {
        let m: Vec<f64> = (0..10).map(f64::from).collect();
        assert!(visibility_pairs(&m).is_empty());
        let valley: Vec<f64> = (0..10).map(|i| if i == 0 || i == 9 { 0.0 } else { 5.0 + i as f64 }).collect();
        assert!(visibility_pairs(&valley).contains(&(0, 9)));
    }

    #[test]
    fn double_edge_example() {
        let cells = CellMinSeq::from_minima(1.0, vec![1.0, 5.0, 2.0], vec![2.0, 7.0, 1.0]).unwrap();
        let g = build_graph(&cells).unwrap();
        assert_eq!(g.network().multiplicity(0, 2), 2);
        assert_eq!(g.network().multiplicity(0, 1), 1);
        assert_eq!(g.degree(0), 3);
    }

    #[test]
    fn boundary_flags_mark_running_minima() {
        let cells = CellMinSeq::from_minima(1.0, vec![3.0, 1.0, 4.0, 1.5, 5.0], vec![0.0, 1.0, 2.0, 1.5, 0.5]).unwrap();
        let g = build_graph(&cells).unwrap();
        // L: 0,1 from the left; 4,3,1 from the right. R: 0 and 4.
        assert_eq!(g.boundary_flags(), &[true, true, false, true, true]);
    }

    #[test]
    fn too_few_cells() {
        let cells = CellMinSeq::from_minima(1.0, vec![1.0], vec![1.0]).unwrap();
        assert!(build_graph(&cells).is_err());
    }

    #[test]
    fn scale_invariance_examples() {
        let p = sample_brownian_pair(1.3, 4.0, 1.0 / 64.0, 11).unwrap();
        assert!(scale_check(&p, 1.0, 1.0, 0.25).unwrap());
        assert!(scale_check(&p, 1e3, 1e-3, 0.25).unwrap());
        assert!(scale_check(&p, 0.0, 1.0, 0.25).is_err());
    }

    #[test]
    fn consecutive_vertices_adjacent() {
        let p = sample_brownian_pair(0.9, 8.0, 1.0 / 64.0, 2).unwrap();
        let g = build_graph(&cell_minima(&p, 0.125).unwrap()).unwrap();
        for i in 0..g.count() - 1 {
            assert!(g.edges().contains(&Edge { u: i, v: i + 1, side: Side::L }));
            assert!(!g.edges().contains(&Edge { u: i, v: i + 1, side: Side::R }));
        }
    }
}
