mod common;

use std::collections::BTreeMap;

use mcrt::io::{read_edge_list, write_edge_list};
use mcrt::laplace::{dirichlet_energy, effective_resistance, green_diag, harmonic_extend};
use mcrt::map::{build_graph, cell_minima, scale_check, CellMinSeq};
use mcrt::path::sample_brownian_pair;
use mcrt::planar::planar_structure;
use mcrt::solver::SolverOptions;
use proptest::prelude::*;

use common::{brute_edges, brownian_window, edge_set, expected_visits};

/// Minima drawn from a small integer range so that ties are frequent.
fn tied_minima() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec((0u8..6).prop_map(f64::from), n),
            prop::collection::vec((0u8..6).prop_map(f64::from), n),
        )
    })
}

fn continuous_minima() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..80).prop_flat_map(|n| {
        (
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn builder_matches_all_pairs_scan_with_ties((l, r) in tied_minima()) {
        let cells = CellMinSeq::from_minima(1.0, l.clone(), r.clone()).unwrap();
        let g = build_graph(&cells).unwrap();
        prop_assert_eq!(edge_set(&g), brute_edges(&l, &r));
    }

    #[test]
    fn builder_matches_all_pairs_scan((l, r) in continuous_minima()) {
        let cells = CellMinSeq::from_minima(1.0, l.clone(), r.clone()).unwrap();
        let g = build_graph(&cells).unwrap();
        prop_assert_eq!(edge_set(&g), brute_edges(&l, &r));
    }

    #[test]
    fn every_graph_is_a_sphere_triangulation((l, r) in tied_minima()) {
        let g = build_graph(&CellMinSeq::from_minima(1.0, l, r).unwrap()).unwrap();
        let p = planar_structure(&g).unwrap();
        prop_assert_eq!(p.euler_characteristic(), 2);
        for f in 0..p.face_count() {
            if f != p.outer_face() {
                prop_assert_eq!(p.faces()[f].len(), 3);
            }
        }
        prop_assert!(g.network().is_connected());
    }

    #[test]
    fn multiplicity_at_most_two((l, r) in tied_minima()) {
        let g = build_graph(&CellMinSeq::from_minima(1.0, l, r).unwrap()).unwrap();
        for &(_, _, c) in g.network().pairs() {
            prop_assert!((1..=2).contains(&c));
        }
        for v in 0..g.count().saturating_sub(1) {
            prop_assert!(g.network().multiplicity(v, v + 1) >= 1);
        }
    }

    #[test]
    fn edge_list_round_trip((l, r) in tied_minima()) {
        let g = build_graph(&CellMinSeq::from_minima(1.0, l, r).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn graph_is_invariant_under_positive_rescaling(seed in 0u64..1000, a in 0.001f64..1000.0, b in 0.001f64..1000.0) {
        let pair = sample_brownian_pair(1.3, 4.0, 1.0 / 256.0, seed).unwrap();
        prop_assert!(scale_check(&pair, a, b, 1.0 / 16.0).unwrap());
    }

    #[test]
    fn refinement_never_raises_minima(seed in 0u64..1000) {
        let coarse = sample_brownian_pair(1.6, 2.0, 1.0 / 64.0, seed).unwrap();
        let fine = coarse.refine_midpoint(seed + 1);
        let a = cell_minima(&coarse, 1.0 / 8.0).unwrap();
        let b = cell_minima(&fine, 1.0 / 8.0).unwrap();
        for i in 0..a.count() {
            prop_assert!(b.min_left[i] <= a.min_left[i]);
            prop_assert!(b.min_right[i] <= a.min_right[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn harmonic_extension_minimizes_energy(
        seed in 0u64..10_000,
        bumps in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let g = brownian_window(120, std::f64::consts::SQRT_2, seed);
        let net = g.network();
        let data: BTreeMap<usize, f64> = g
            .boundary_vertices()
            .into_iter()
            .map(|v| (v, (v as f64 * 0.37).sin()))
            .collect();
        let h = harmonic_extend(net, &data, &SolverOptions::default()).unwrap();
        prop_assert!(h.satisfies_maximum_principle());
        let e0 = dirichlet_energy(net, &h.values).unwrap();
        let mut other = h.values.clone();
        for (k, v) in (0..g.count()).filter(|v| !g.is_boundary(*v)).enumerate() {
            other[v] += bumps[k % bumps.len()] * (1.0 + (v % 3) as f64);
        }
        let e1 = dirichlet_energy(net, &other).unwrap();
        prop_assert!(e1 >= e0 * (1.0 - 1e-12));
    }

    #[test]
    fn energy_is_quadratic_in_boundary_data(seed in 0u64..10_000) {
        let g = brownian_window(80, 1.2, seed);
        let net = g.network();
        let f: BTreeMap<usize, f64> = g.boundary_vertices().into_iter().map(|v| (v, v as f64 / 7.0)).collect();
        let f2: BTreeMap<usize, f64> = f.iter().map(|(&v, &x)| (v, 2.0 * x)).collect();
        let opts = SolverOptions::dense();
        let e1 = dirichlet_energy(net, &harmonic_extend(net, &f, &opts).unwrap().values).unwrap();
        let e2 = dirichlet_energy(net, &harmonic_extend(net, &f2, &opts).unwrap().values).unwrap();
        prop_assert!((e2 - 4.0 * e1).abs() <= 1e-9 * e2.max(1.0));
    }

    #[test]
    fn removing_an_edge_never_lowers_resistance(seed in 0u64..10_000) {
        let g = brownian_window(100, 1.5, seed);
        let net = g.network();
        let sink = g.boundary_vertices();
        let Ok(center) = mcrt::window::central_vertex(&g) else { return Ok(()) };
        let opts = SolverOptions::dense();
        let base = effective_resistance(net, center, &sink, &opts).unwrap();
        // Drop an edge that is not a bridge to the center.
        let &(u, w, _) = net
            .pairs()
            .iter()
            .find(|&&(u, w, _)| u != center && w != center && !(g.is_boundary(u) && g.is_boundary(w)))
            .unwrap_or(&net.pairs()[0]);
        let thinner = net.without_edge(u, w).unwrap();
        if !thinner.is_connected() {
            return Ok(());
        }
        let after = effective_resistance(&thinner, center, &sink, &opts).unwrap();
        prop_assert!(after >= base * (1.0 - 1e-10));
    }

    #[test]
    fn green_diag_matches_fundamental_matrix(seed in 0u64..10_000) {
        let g = brownian_window(150, 1.7, seed);
        let Ok(v) = mcrt::window::central_vertex(&g) else { return Ok(()) };
        let sink = g.boundary_vertices();
        let got = green_diag(g.network(), v, &sink, &SolverOptions::default()).unwrap();
        let want = expected_visits(g.network(), v, g.boundary_flags());
        prop_assert!(common::relative_error(got, want) < 1e-8);
    }
}
