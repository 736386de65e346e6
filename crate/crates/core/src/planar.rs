//! Planar map structure of a mated-CRT graph.
//!
//! Vertices sit on a horizontal axis in index order. Consecutive vertices
//! are joined along the axis, `L`-edges are drawn as non-crossing arcs
//! above the axis and `R`-edges as arcs below it. The rotation system
//! records this drawing; faces are recovered by tracing darts.

use crate::error::{McrtError, Result};
use crate::map::{MatedCrtGraph, Side};

#[derive(Debug, Clone)]
pub struct PlanarStructure {
    /// Origin vertex of each dart; dart `2k` runs `u → v` along edge `k`, `2k + 1` back.
    tail: Vec<usize>,
    /// Counterclockwise cyclic order of outgoing darts around each vertex.
    rotation: Vec<Vec<usize>>,
    /// Faces as cyclic dart sequences.
    faces: Vec<Vec<usize>>,
    outer_face: usize,
    vertex_count: usize,
    edge_count: usize,
}

#[inline]
fn twin(d: usize) -> usize {
    d ^ 1
}

/// Angular slot of a dart around its origin, counterclockwise from the
/// axis edge pointing right.
fn rotation_key(from: usize, to: usize, side: Side, consecutive: bool) -> (u8, i64) {
    let j = to as i64;
    match (consecutive, side, to > from) {
        (true, _, true) => (0, 0),
        (false, Side::L, true) => (1, j),
        (false, Side::L, false) => (2, j),
        (true, _, false) => (3, 0),
        (false, Side::R, false) => (4, -j),
        (false, Side::R, true) => (5, -j),
    }
}

impl PlanarStructure {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn outer_face(&self) -> usize {
        self.outer_face
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn dart_tail(&self, d: usize) -> usize {
        self.tail[d]
    }

    pub fn dart_head(&self, d: usize) -> usize {
        self.tail[twin(d)]
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count as i64 + self.faces.len() as i64
    }

    /// Vertices met along face `f`, in tracing order (with repeats).
    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        self.faces[f].iter().map(|&d| self.tail[d]).collect()
    }

    /// Distinct vertices of the outer face in order of first appearance.
    pub fn outer_boundary_cycle(&self) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count];
        self.face_vertices(self.outer_face)
            .into_iter()
            .filter(|&v| !std::mem::replace(&mut seen[v], true))
            .collect()
    }
}

/// Rotation system and faces of the axis/arc drawing of `graph`.
///
/// Fails with an internal error if the traced faces do not give a sphere
/// (`V - E + F = 2`) or an inner face is not a triangle; either would mean
/// the cyclic-order rule is wrong, not that the input is.
pub fn planar_structure(graph: &MatedCrtGraph) -> Result<PlanarStructure> {
    let n = graph.count();
    let edges = graph.edges();
    let mut tail = vec![0usize; 2 * edges.len()];
    let mut keyed: Vec<Vec<((u8, i64), usize)>> = vec![Vec::new(); n];
    for (k, e) in edges.iter().enumerate() {
        let consecutive = e.v == e.u + 1;
        tail[2 * k] = e.u;
        tail[2 * k + 1] = e.v;
        keyed[e.u].push((rotation_key(e.u, e.v, e.side, consecutive), 2 * k));
        keyed[e.v].push((rotation_key(e.v, e.u, e.side, consecutive), 2 * k + 1));
    }
    let rotation: Vec<Vec<usize>> = keyed
        .into_iter()
        .map(|mut list| {
            list.sort_unstable();
            list.into_iter().map(|(_, d)| d).collect()
        })
        .collect();

    // successor of each dart in the rotation at its origin
    let mut succ = vec![0usize; tail.len()];
    for darts in &rotation {
        for (i, &d) in darts.iter().enumerate() {
            succ[d] = darts[(i + 1) % darts.len()];
        }
    }

    let mut face_of = vec![usize::MAX; tail.len()];
    let mut faces = Vec::new();
    for start in 0..tail.len() {
        if face_of[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut face = Vec::new();
        let mut d = start;
        loop {
            if face_of[d] != usize::MAX {
                return Err(McrtError::Internal(format!("dart {d} traced twice")));
            }
            face_of[d] = id;
            face.push(d);
            d = succ[twin(d)];
            if d == start {
                break;
            }
        }
        faces.push(face);
    }

    // At vertex 0 the unbounded region lies between the outermost upper
    // dart (or the axis dart) and the first lower dart.
    let rot0 = &rotation[0];
    let last_upper = rot0
        .iter()
        .rposition(|&d| {
            let k = d / 2;
            edges[k].v == edges[k].u + 1 || edges[k].side == Side::L
        })
        .ok_or_else(|| McrtError::Internal("vertex 0 has no axis edge".into()))?;
    let outer_face = face_of[twin(rot0[last_upper])];

    let planar = PlanarStructure {
        tail,
        rotation,
        faces,
        outer_face,
        vertex_count: n,
        edge_count: edges.len(),
    };
    let chi = planar.euler_characteristic();
    if chi != 2 {
        return Err(McrtError::Internal(format!("Euler characteristic {chi}, expected 2")));
    }
    for (f, face) in planar.faces.iter().enumerate() {
        if f != outer_face && face.len() != 3 {
            return Err(McrtError::Internal(format!("inner face {f} has {} corners", face.len())));
        }
    }
    Ok(planar)
}
