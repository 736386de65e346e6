//! Undirected multigraph with integer edge multiplicities.
//!
//! This is the common substrate for the potential theory and the random
//! walk. A pair joined by `k` parallel edges is stored once with weight
//! `k`; it acts as a conductance `k` in the Laplacian and as `k` equally
//! likely edge-ends for the walk.

use crate::error::{McrtError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n: usize,
    /// Simple pairs `(u, v, multiplicity)` with `u < v`, sorted.
    pairs: Vec<(usize, usize, u32)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<u32>,
    /// Edge-ends with multiplicity expanded, so a uniform pick is a walk step.
    end_offsets: Vec<usize>,
    ends: Vec<usize>,
}

impl Network {
    /// Builds a network from edge records `(u, v, multiplicity)`.
    ///
    /// Records for the same unordered pair are merged by adding multiplicities.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(edges.len());
        for &(u, v, k) in edges {
            if u >= n || v >= n {
                return Err(McrtError::domain(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(McrtError::domain(format!("self-loop at vertex {u}")));
            }
            if k == 0 {
                continue;
            }
            pairs.push((u.min(v), u.max(v), k));
        }
        pairs.sort_unstable();
        let mut merged: Vec<(usize, usize, u32)> = Vec::with_capacity(pairs.len());
        for p in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == p.0 && last.1 == p.1 => last.2 += p.2,
                _ => merged.push(p),
            }
        }

        let mut count = vec![0usize; n + 1];
        let mut end_count = vec![0usize; n + 1];
        for &(u, v, k) in &merged {
            count[u + 1] += 1;
            count[v + 1] += 1;
            end_count[u + 1] += k as usize;
            end_count[v + 1] += k as usize;
        }
        for i in 0..n {
            count[i + 1] += count[i];
            end_count[i + 1] += end_count[i];
        }
        let mut neighbors = vec![0usize; count[n]];
        let mut weights = vec![0u32; count[n]];
        let mut ends = vec![0usize; end_count[n]];
        let mut fill = count.clone();
        let mut end_fill = end_count.clone();
        for &(u, v, k) in &merged {
            for (a, b) in [(u, v), (v, u)] {
                neighbors[fill[a]] = b;
                weights[fill[a]] = k;
                fill[a] += 1;
                for _ in 0..k {
                    ends[end_fill[a]] = b;
                    end_fill[a] += 1;
                }
            }
        }
        Ok(Network {
            n,
            pairs: merged,
            offsets: count,
            neighbors,
            weights,
            end_offsets: end_count,
            ends,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.pairs.iter().map(|p| p.2 as usize).sum()
    }

    pub fn pairs(&self) -> &[(usize, usize, u32)] {
        &self.pairs
    }

    /// Distinct neighbours of `v` with their multiplicities.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.neighbors[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    /// Edge-ends at `v`, one entry per parallel edge.
    pub fn ends(&self, v: usize) -> &[usize] {
        &self.ends[self.end_offsets[v]..self.end_offsets[v + 1]]
    }

    /// Degree of `v` counted with multiplicity.
    pub fn degree(&self, v: usize) -> usize {
        self.end_offsets[v + 1] - self.end_offsets[v]
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        self.neighbors(u).find(|&(w, _)| w == v).map_or(0, |(_, k)| k)
    }

    /// Copy with the pair `{u, v}` losing one parallel edge.
    pub fn without_edge(&self, u: usize, v: usize) -> Result<Network> {
        let (a, b) = (u.min(v), u.max(v));
        let mut found = false;
        let edges: Vec<_> = self
            .pairs
            .iter()
            .map(|&(x, y, k)| {
                if x == a && y == b {
                    found = true;
                    (x, y, k - 1)
                } else {
                    (x, y, k)
                }
            })
            .collect();
        if !found {
            return Err(McrtError::domain(format!("no edge between {u} and {v}")));
        }
        Network::from_edges(self.n, &edges)
    }

    /// Connected-component label per vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for (w, _) in self.neighbors(v) {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }
}
