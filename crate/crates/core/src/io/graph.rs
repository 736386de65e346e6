use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{McrtError, Result};
use crate::map::{Edge, MatedCrtGraph, Side};

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRow {
    i: usize,
    j: usize,
    side: Side,
    is_boundary_i: u8,
    is_boundary_j: u8,
}

/// Edge-list CSV with 1-based vertex indices, one row per edge record.
pub fn write_edge_list<W: Write>(graph: &MatedCrtGraph, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let flag = |v: usize| u8::from(graph.is_boundary(v));
    for e in graph.edges() {
        out.serialize(EdgeRow {
            i: e.u + 1,
            j: e.v + 1,
            side: e.side,
            is_boundary_i: flag(e.u),
            is_boundary_j: flag(e.v),
        })?;
    }
    out.flush()?;
    Ok(())
}

/// Parses an edge list written by [`write_edge_list`]. The vertex count is
/// the largest index; every vertex must appear in some row.
pub fn read_edge_list<R: Read>(r: R) -> Result<MatedCrtGraph> {
    let mut edges = Vec::new();
    let mut flags: Vec<Option<bool>> = Vec::new();
    let mut set_flag = |v: usize, f: u8| -> Result<()> {
        let f = match f {
            0 => false,
            1 => true,
            _ => return Err(McrtError::Parse(format!("boundary flag must be 0 or 1, got {f}"))),
        };
        if flags.len() <= v {
            flags.resize(v + 1, None);
        }
        match flags[v] {
            Some(old) if old != f => Err(McrtError::Parse(format!("conflicting boundary flags for vertex {}", v + 1))),
            _ => {
                flags[v] = Some(f);
                Ok(())
            }
        }
    };
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: EdgeRow = row?;
        if row.i == 0 || row.j == 0 {
            return Err(McrtError::Parse("vertex indices are 1-based".into()));
        }
        let (u, v) = (row.i - 1, row.j - 1);
        set_flag(u, row.is_boundary_i)?;
        set_flag(v, row.is_boundary_j)?;
        edges.push(Edge {
            u: u.min(v),
            v: u.max(v),
            side: row.side,
        });
    }
    let boundary = flags
        .iter()
        .enumerate()
        .map(|(v, f)| f.ok_or_else(|| McrtError::Parse(format!("vertex {} has no edge", v + 1))))
        .collect::<Result<Vec<bool>>>()?;
    MatedCrtGraph::from_parts(boundary.len(), edges, boundary).map_err(|e| McrtError::Parse(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    #[serde(rename = "N")]
    pub n: usize,
    /// Edge records, counting multiplicity.
    #[serde(rename = "E")]
    pub e: usize,
    pub max_degree: usize,
    pub boundary_count: usize,
    pub seed: u64,
    pub gamma: f64,
    pub epsilon: f64,
}

pub fn graph_summary(graph: &MatedCrtGraph, seed: u64, gamma: f64, epsilon: f64) -> GraphSummary {
    GraphSummary {
        n: graph.count(),
        e: graph.edges().len(),
        max_degree: graph.max_degree(),
        boundary_count: graph.boundary_flags().iter().filter(|&&b| b).count(),
        seed,
        gamma,
        epsilon,
    }
}
