//! A finite window of the mated-CRT map with everything derived from it.

use crate::error::{McrtError, Result};
use crate::laplace::{tutte_embed_window, Embedding};
use crate::map::{build_graph, cell_minima, CellMinSeq, MatedCrtGraph};
use crate::path::{sample_brownian_pair, PathPair};
use crate::planar::{planar_structure, PlanarStructure};
use crate::solver::SolverOptions;

/// Grid steps per cell used when a window samples its own path.
pub const DEFAULT_STEPS_PER_CELL: usize = 64;

#[derive(Debug, Clone)]
pub struct MapWindow {
    pub cells: CellMinSeq,
    pub graph: MatedCrtGraph,
    pub planar: PlanarStructure,
}

impl MapWindow {
    pub fn from_path(path: &PathPair, epsilon: f64) -> Result<Self> {
        let cells = cell_minima(path, epsilon)?;
        let graph = build_graph(&cells)?;
        let planar = planar_structure(&graph)?;
        Ok(MapWindow { cells, graph, planar })
    }

    /// Samples a Brownian pair on `[0, horizon]` with mesh `epsilon / 64` and builds its window.
    pub fn brownian(gamma: f64, horizon: f64, epsilon: f64, seed: u64) -> Result<Self> {
        let path = sample_brownian_pair(gamma, horizon, epsilon / DEFAULT_STEPS_PER_CELL as f64, seed)?;
        Self::from_path(&path, epsilon)
    }

    pub fn count(&self) -> usize {
        self.graph.count()
    }

    /// Tutte embedding with the outer face on the unit circle.
    pub fn embed(&self, opts: &SolverOptions) -> Result<Embedding> {
        tutte_embed_window(&self.graph, &self.planar, opts)
    }

    /// Unflagged vertex closest (in index) to the middle of the window.
    pub fn center_vertex(&self) -> Result<usize> {
        central_vertex(&self.graph)
    }
}

/// Unflagged vertex closest in index to `count / 2`; ties go to the smaller index.
pub fn central_vertex(graph: &MatedCrtGraph) -> Result<usize> {
    let n = graph.count();
    let mid = n / 2;
    (0..=mid.max(n - mid))
        .flat_map(|d| [mid.checked_sub(d), Some(mid + d)])
        .flatten()
        .filter(|&v| v < n)
        .find(|&v| !graph.is_boundary(v))
        .ok_or_else(|| McrtError::domain("window has no interior vertex"))
}
