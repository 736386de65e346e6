//! Discrete potential theory on multigraphs.
//!
//! Parallel edges act as conductances equal to their multiplicity, so a
//! double edge has conductance 2 in every quantity below: harmonic
//! extensions, Dirichlet energy, effective resistance, the Green's function
//! on the diagonal and the Tutte embedding.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::{McrtError, Result};
use crate::map::MatedCrtGraph;
use crate::network::Network;
use crate::planar::PlanarStructure;
use crate::solver::{check_pinned_reachable, mean_value_residual, solve_pinned, SolverOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution {
    pub values: Vec<f64>,
    /// Pinned vertices, sorted.
    pub boundary: Vec<usize>,
    /// Sup-norm mean-value defect over the free vertices.
    pub residual: f64,
    pub tolerance: f64,
}

impl HarmonicSolution {
    /// Free values lie within `[min, max]` of the pinned values, up to the tolerance.
    pub fn satisfies_maximum_principle(&self) -> bool {
        let (lo, hi) = self
            .boundary
            .iter()
            .map(|&v| self.values[v])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        let slack = self.tolerance.max(f64::EPSILON * hi.abs().max(lo.abs()));
        self.values.iter().all(|&x| x >= lo - slack && x <= hi + slack)
    }
}

fn pinned_vector(n: usize, boundary_values: &BTreeMap<usize, f64>) -> Result<Vec<Option<f64>>> {
    if boundary_values.is_empty() {
        return Err(McrtError::domain("boundary set is empty"));
    }
    let mut pinned = vec![None; n];
    for (&v, &value) in boundary_values {
        if v >= n {
            return Err(McrtError::domain(format!("boundary vertex {v} out of range")));
        }
        if !value.is_finite() {
            return Err(McrtError::domain(format!("boundary value at {v} is not finite")));
        }
        pinned[v] = Some(value);
    }
    Ok(pinned)
}

/// Harmonic extension of `boundary_values` to the remaining vertices.
pub fn harmonic_extend(
    network: &Network,
    boundary_values: &BTreeMap<usize, f64>,
    opts: &SolverOptions,
) -> Result<HarmonicSolution> {
    let pinned = pinned_vector(network.vertex_count(), boundary_values)?;
    let first = *boundary_values.values().next().expect("non-empty");
    let values = if boundary_values.values().all(|&x| x == first) {
        // constants are harmonic; only uniqueness needs checking
        check_pinned_reachable(network, &pinned)?;
        vec![first; network.vertex_count()]
    } else {
        solve_pinned(network, &pinned, None, opts)?
    };
    let residual = mean_value_residual(network, &pinned, None, &values);
    if residual > opts.tolerance {
        return Err(McrtError::Internal(format!(
            "harmonic residual {residual:e} exceeds tolerance {:e}",
            opts.tolerance
        )));
    }
    Ok(HarmonicSolution {
        values,
        boundary: boundary_values.keys().copied().collect(),
        residual,
        tolerance: opts.tolerance,
    })
}

/// Sum over edges, with multiplicity, of squared value differences.
pub fn dirichlet_energy(network: &Network, values: &[f64]) -> Result<f64> {
    if values.len() != network.vertex_count() {
        return Err(McrtError::domain(format!(
            "expected {} values, got {}",
            network.vertex_count(),
            values.len()
        )));
    }
    Ok(network
        .pairs()
        .iter()
        .map(|&(u, v, k)| {
            let d = values[u] - values[v];
            k as f64 * d * d
        })
        .sum())
}

/// Unit-potential function: 1 at `source`, 0 on `sink`, harmonic elsewhere.
///
/// Vertices outside the component of `source` are pinned to 0; they share
/// no edge with it and so do not affect the energy.
pub fn unit_potential(
    network: &Network,
    source: usize,
    sink: &[usize],
    opts: &SolverOptions,
) -> Result<HarmonicSolution> {
    let n = network.vertex_count();
    if source >= n || sink.iter().any(|&s| s >= n) {
        return Err(McrtError::domain("terminal vertex out of range"));
    }
    if sink.is_empty() {
        return Err(McrtError::domain("sink set is empty"));
    }
    if sink.contains(&source) {
        return Err(McrtError::domain(format!("source {source} belongs to the sink")));
    }
    let comp = network.components();
    if !sink.iter().any(|&s| comp[s] == comp[source]) {
        return Err(McrtError::Unsolvable(format!("sink is unreachable from {source}")));
    }
    let mut data: BTreeMap<usize, f64> = (0..n).filter(|&v| comp[v] != comp[source]).map(|v| (v, 0.0)).collect();
    data.extend(sink.iter().map(|&s| (s, 0.0)));
    data.insert(source, 1.0);
    harmonic_extend(network, &data, opts)
}

/// Effective resistance between `source` and the set `sink`.
pub fn effective_resistance(network: &Network, source: usize, sink: &[usize], opts: &SolverOptions) -> Result<f64> {
    let h = unit_potential(network, source, sink, opts)?;
    Ok(1.0 / dirichlet_energy(network, &h.values)?)
}

/// Expected visits to `v` by the walk from `v` before hitting `absorbing`,
/// as `deg(v) · R_eff(v, absorbing)`.
pub fn green_diag(network: &Network, v: usize, absorbing: &[usize], opts: &SolverOptions) -> Result<f64> {
    if absorbing.is_empty() {
        return Err(McrtError::domain("absorbing set is empty; the Green's function is infinite"));
    }
    let r = effective_resistance(network, v, absorbing, opts)?;
    Ok(network.degree(v) as f64 * r)
}

/// Exit distribution on `boundary` of the walk started at `center`.
///
/// One solve of `(D - A) g = 1_center` with `g = 0` on the boundary gives
/// `g(u) = Gr(center, u) / deg(u)`, and the walk leaves through `b` with
/// probability `Σ_u c_ub g(u)`.
pub fn harmonic_measure(network: &Network, center: usize, boundary: &[usize], opts: &SolverOptions) -> Result<Vec<f64>> {
    let n = network.vertex_count();
    if center >= n || boundary.iter().any(|&b| b >= n) {
        return Err(McrtError::domain("vertex out of range"));
    }
    if boundary.is_empty() {
        return Err(McrtError::domain("boundary set is empty"));
    }
    if let Some(i) = boundary.iter().position(|&b| b == center) {
        let mut h = vec![0.0; boundary.len()];
        h[i] = 1.0;
        return Ok(h);
    }
    let comp = network.components();
    let mut pinned: Vec<Option<f64>> = (0..n).map(|v| (comp[v] != comp[center]).then_some(0.0)).collect();
    for &b in boundary {
        pinned[b] = Some(0.0);
    }
    let mut source = vec![0.0; n];
    source[center] = 1.0;
    let g = solve_pinned(network, &pinned, Some(&source), opts)?;
    Ok(boundary
        .iter()
        .map(|&b| {
            network
                .neighbors(b)
                .filter(|&(u, _)| pinned[u].is_none())
                .map(|(u, c)| c as f64 * g[u])
                .sum()
        })
        .collect())
}

/// Points on the unit circle whose arcs are proportional to `weights`, each
/// point at the middle of its arc. A share `floor` of the circle is spread
/// evenly so that zero weights still give distinct points.
pub fn weighted_circle_positions(weights: &[f64], floor: f64) -> Vec<[f64; 2]> {
    let k = weights.len() as f64;
    let total: f64 = weights.iter().sum();
    let mut start = 0.0;
    weights
        .iter()
        .map(|&w| {
            let share = (1.0 - floor) * w / total + floor / k;
            let t = TAU * (start + share / 2.0);
            start += share;
            [t.cos(), t.sin()]
        })
        .collect()
}

/// Planar coordinates of every vertex with a pinned convex boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub coords: Vec<[f64; 2]>,
    /// Boundary cycle, in polygon order.
    pub pinned: Vec<usize>,
    pub pinned_positions: Vec<[f64; 2]>,
    /// Largest mean-value defect over the two coordinates.
    pub residual: f64,
}

impl Embedding {
    pub fn distance(&self, u: usize, v: usize) -> f64 {
        let (a, b) = (self.coords[u], self.coords[v]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    pub fn x(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c[0]).collect()
    }

    pub fn y(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c[1]).collect()
    }

    /// Whether `p` lies inside the pinned polygon at distance at least `margin` from its sides.
    pub fn contains(&self, p: [f64; 2], margin: f64) -> bool {
        polygon_inner_distance(&self.pinned_positions, p).is_some_and(|d| d >= margin)
    }

    /// Largest distance between two pinned positions.
    pub fn boundary_diameter(&self) -> f64 {
        let pts = &self.pinned_positions;
        let mut best = 0.0f64;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.max((pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]));
            }
        }
        best
    }

    /// Nearest vertex to `p`; ties go to the smallest index.
    pub fn nearest_vertex(&self, p: [f64; 2]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (v, c) in self.coords.iter().enumerate() {
            let d = (c[0] - p[0]).hypot(c[1] - p[1]);
            if d < best.0 {
                best = (d, v);
            }
        }
        best.1
    }

    /// Number of pairs of edges whose segments cross at an interior point.
    pub fn crossing_count(&self, network: &Network) -> usize {
        let mut segs: Vec<(f64, f64, usize, usize)> = network
            .pairs()
            .iter()
            .map(|&(u, v, _)| {
                let (a, b) = (self.coords[u][0], self.coords[v][0]);
                (a.min(b), a.max(b), u, v)
            })
            .collect();
        segs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut count = 0;
        for i in 0..segs.len() {
            let (_, hi, u1, v1) = segs[i];
            for &(lo2, _, u2, v2) in &segs[i + 1..] {
                if lo2 > hi {
                    break;
                }
                if u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2 {
                    continue;
                }
                if segments_cross(self.coords[u1], self.coords[v1], self.coords[u2], self.coords[v2]) {
                    count += 1;
                }
            }
        }
        count
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_cross(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Signed distance from `p` to the sides of a convex polygon; `None` if outside.
pub(crate) fn polygon_inner_distance(poly: &[[f64; 2]], p: [f64; 2]) -> Option<f64> {
    let orientation = polygon_orientation(poly);
    let mut best = f64::INFINITY;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let d = orientation * cross(a, b, p) / len;
        if d < 0.0 {
            return None;
        }
        best = best.min(d);
    }
    Some(best)
}

fn polygon_orientation(poly: &[[f64; 2]]) -> f64 {
    let area2: f64 = (0..poly.len())
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    area2.signum()
}

/// Points in strictly convex position, listed in cyclic order.
fn is_strictly_convex(poly: &[[f64; 2]]) -> bool {
    let k = poly.len();
    if k < 3 {
        return false;
    }
    let sign = cross(poly[0], poly[1], poly[2]).signum();
    if sign == 0.0 {
        return false;
    }
    let turns_ok = (0..k).all(|i| cross(poly[i], poly[(i + 1) % k], poly[(i + 2) % k]) * sign > 0.0);
    // a star polygon also turns consistently; its total winding exceeds one turn
    let winding: f64 = (0..k)
        .map(|i| {
            let (a, b, c) = (poly[i], poly[(i + 1) % k], poly[(i + 2) % k]);
            let u = [b[0] - a[0], b[1] - a[1]];
            let w = [c[0] - b[0], c[1] - b[1]];
            (u[0] * w[1] - u[1] * w[0]).atan2(u[0] * w[0] + u[1] * w[1])
        })
        .sum();
    turns_ok && (winding.abs() - TAU).abs() < 1e-6
}

/// `k` points equally spaced on the unit circle, counterclockwise from `(1, 0)`.
pub fn unit_circle_positions(k: usize) -> Vec<[f64; 2]> {
    (0..k)
        .map(|i| {
            let t = TAU * i as f64 / k as f64;
            [t.cos(), t.sin()]
        })
        .collect()
}

fn embed_pinned(
    network: &Network,
    cycle: &[usize],
    positions: &[[f64; 2]],
    opts: &SolverOptions,
) -> Result<Embedding> {
    let n = network.vertex_count();
    if cycle.len() != positions.len() {
        return Err(McrtError::domain("boundary cycle and positions differ in length"));
    }
    if cycle.len() < 3 {
        return Err(McrtError::domain("boundary cycle needs at least 3 vertices"));
    }
    let mut seen = vec![false; n];
    for &v in cycle {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(McrtError::domain(format!("boundary vertex {v} repeated or out of range")));
        }
    }
    if !is_strictly_convex(positions) {
        return Err(McrtError::domain("boundary positions are not in convex position"));
    }
    let xs: BTreeMap<usize, f64> = cycle.iter().zip(positions).map(|(&v, p)| (v, p[0])).collect();
    let ys: BTreeMap<usize, f64> = cycle.iter().zip(positions).map(|(&v, p)| (v, p[1])).collect();
    let hx = harmonic_extend(network, &xs, opts)?;
    let hy = harmonic_extend(network, &ys, opts)?;
    Ok(Embedding {
        coords: hx.values.iter().zip(&hy.values).map(|(&x, &y)| [x, y]).collect(),
        pinned: cycle.to_vec(),
        pinned_positions: positions.to_vec(),
        residual: hx.residual.max(hy.residual),
    })
}

/// Tutte embedding: `boundary_cycle` pinned to the convex polygon `positions`,
/// every other vertex at the multiplicity-weighted average of its neighbours.
pub fn tutte_embed(
    network: &Network,
    boundary_cycle: &[usize],
    positions: &[[f64; 2]],
    opts: &SolverOptions,
) -> Result<Embedding> {
    let k = boundary_cycle.len();
    for i in 0..k {
        let (a, b) = (boundary_cycle[i], boundary_cycle[(i + 1) % k]);
        if a >= network.vertex_count() || b >= network.vertex_count() || network.multiplicity(a, b) == 0 {
            return Err(McrtError::domain(format!("boundary vertices {a} and {b} are not adjacent")));
        }
    }
    embed_pinned(network, boundary_cycle, positions, opts)
}

/// Tutte embedding of a mated-CRT window with its outer face on the unit circle.
///
/// The outer face of a finite window may revisit a vertex; the pinned cycle
/// lists each outer vertex once, in order of first appearance.
pub fn tutte_embed_window(graph: &MatedCrtGraph, planar: &PlanarStructure, opts: &SolverOptions) -> Result<Embedding> {
    let cycle = planar.outer_boundary_cycle();
    let positions = unit_circle_positions(cycle.len());
    tutte_embed_outer(graph, planar, &cycle, &positions, opts)
}

/// Tutte embedding with an explicit pinned cycle, which must list the
/// distinct outer-face vertices of `planar` in tracing order.
pub fn tutte_embed_outer(
    graph: &MatedCrtGraph,
    planar: &PlanarStructure,
    cycle: &[usize],
    positions: &[[f64; 2]],
    opts: &SolverOptions,
) -> Result<Embedding> {
    if cycle != planar.outer_boundary_cycle().as_slice() {
        return Err(McrtError::domain("boundary cycle is not the outer face of the planar structure"));
    }
    embed_pinned(graph.network(), cycle, positions, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Network {
        Network::from_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap()
    }

    fn single_double() -> Network {
        Network::from_edges(3, &[(0, 1, 1), (1, 2, 2)]).unwrap()
    }

    fn data(pairs: &[(usize, f64)]) -> BTreeMap<usize, f64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn harmonic_measure_on_path() {
        let g = Network::from_edges(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)]).unwrap();
        let opts = SolverOptions::default();
        let h = harmonic_measure(&g, 2, &[0, 4], &opts).unwrap();
        assert!((h[0] - 0.5).abs() < 1e-12 && (h[1] - 0.5).abs() < 1e-12);
        let h = harmonic_measure(&g, 1, &[0, 4], &opts).unwrap();
        assert!((h[0] - 0.75).abs() < 1e-12 && (h[1] - 0.25).abs() < 1e-12);
        assert_eq!(harmonic_measure(&g, 0, &[0, 4], &opts).unwrap(), vec![1.0, 0.0]);
        let p = weighted_circle_positions(&[1.0, 1.0, 2.0], 0.0);
        assert!((p[0][0] - (TAU / 8.0).cos()).abs() < 1e-12);
        assert!((p[2][0] - (TAU * 0.75).cos()).abs() < 1e-12);
    }

    #[test]
    fn midpoint_and_double_edge() {
        let opts = SolverOptions::default();
        let h = harmonic_extend(&path3(), &data(&[(0, 0.0), (2, 1.0)]), &opts).unwrap();
        assert!((h.values[1] - 0.5).abs() < 1e-12);
        let h = harmonic_extend(&single_double(), &data(&[(0, 0.0), (2, 1.0)]), &opts).unwrap();
        assert!((h.values[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(h.satisfies_maximum_principle());
        let e = dirichlet_energy(&single_double(), &h.values).unwrap();
        assert!((e - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_boundary() {
        let h = harmonic_extend(&path3(), &data(&[(0, 3.5), (2, 3.5)]), &SolverOptions::default()).unwrap();
        assert_eq!(h.values, vec![3.5; 3]);
        assert_eq!(dirichlet_energy(&path3(), &h.values).unwrap(), 0.0);
    }

    #[test]
    fn harmonic_errors() {
        let opts = SolverOptions::default();
        assert!(matches!(harmonic_extend(&path3(), &data(&[]), &opts), Err(McrtError::Domain(_))));
        assert!(matches!(
            harmonic_extend(&path3(), &data(&[(0, f64::NAN)]), &opts),
            Err(McrtError::Domain(_))
        ));
        let split = Network::from_edges(4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        assert!(matches!(
            harmonic_extend(&split, &data(&[(0, 0.0), (1, 1.0)]), &opts),
            Err(McrtError::Unsolvable(_))
        ));
        assert!(matches!(
            harmonic_extend(&split, &data(&[(0, 1.0), (1, 1.0)]), &opts),
            Err(McrtError::Unsolvable(_))
        ));
        assert!(dirichlet_energy(&path3(), &[0.0]).is_err());
    }

    #[test]
    fn series_and_parallel() {
        let opts = SolverOptions::default();
        let n = 7;
        let edges: Vec<_> = (0..n).map(|i| (i, i + 1, 1)).collect();
        let line = Network::from_edges(n + 1, &edges).unwrap();
        assert!((effective_resistance(&line, 0, &[n], &opts).unwrap() - n as f64).abs() < 1e-10);
        let pair = Network::from_edges(2, &[(0, 1, 2)]).unwrap();
        assert!((effective_resistance(&pair, 0, &[1], &opts).unwrap() - 0.5).abs() < 1e-12);
        assert!((effective_resistance(&single_double(), 0, &[2], &opts).unwrap() - 1.5).abs() < 1e-12);
        assert!(effective_resistance(&pair, 0, &[0], &opts).is_err());
    }

    #[test]
    fn green_examples() {
        let opts = SolverOptions::default();
        let line = Network::from_edges(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)]).unwrap();
        assert!((green_diag(&line, 2, &[0, 4], &opts).unwrap() - 2.0).abs() < 1e-12);
        let star = Network::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 2)]).unwrap();
        assert!((green_diag(&star, 0, &[1, 2, 3], &opts).unwrap() - 1.0).abs() < 1e-12);
        assert!(green_diag(&star, 0, &[], &opts).is_err());
    }

    #[test]
    fn tutte_centroid_and_wheel() {
        let opts = SolverOptions::default();
        let k4 = Network::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 0, 1), (3, 1, 1), (3, 2, 1)]).unwrap();
        let tri = [[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]];
        let e = tutte_embed(&k4, &[0, 1, 2], &tri, &opts).unwrap();
        assert!((e.coords[3][0] - 1.0).abs() < 1e-12 && (e.coords[3][1] - 1.0).abs() < 1e-12);

        let wheel = Network::from_edges(
            5,
            &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1), (4, 0, 1), (4, 1, 1), (4, 2, 1), (4, 3, 1)],
        )
        .unwrap();
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let e = tutte_embed(&wheel, &[0, 1, 2, 3], &square, &opts).unwrap();
        assert!((e.coords[4][0] - 0.5).abs() < 1e-12 && (e.coords[4][1] - 0.5).abs() < 1e-12);
        assert_eq!(e.crossing_count(&wheel), 0);
        assert!(e.contains([0.5, 0.5], 0.49));
        assert!(!e.contains([1.5, 0.5], 0.0));
    }

    #[test]
    fn tutte_rejects_bad_boundary() {
        let opts = SolverOptions::default();
        let wheel = Network::from_edges(
            5,
            &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1), (4, 0, 1), (4, 1, 1), (4, 2, 1), (4, 3, 1)],
        )
        .unwrap();
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        // 0 and 2 are not adjacent
        assert!(tutte_embed(&wheel, &[0, 2, 1, 3], &square, &opts).is_err());
        let bowtie = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(tutte_embed(&wheel, &[0, 1, 2, 3], &bowtie, &opts).is_err());
    }

    #[test]
    fn crossing_detection() {
        let g = Network::from_edges(4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        let e = Embedding {
            coords: vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]],
            pinned: vec![],
            pinned_positions: vec![],
            residual: 0.0,
        };
        assert_eq!(e.crossing_count(&g), 1);
    }
}
