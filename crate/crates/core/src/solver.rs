//! Linear solves for the graph Laplacian restricted to unpinned vertices.
//!
//! Solves `deg(u) x_u - Σ_w c_uw x_w = s_u` for every free vertex `u`, with
//! pinned vertices contributing known values. Small systems use a dense
//! Cholesky factorization; larger ones use conjugate gradients with a
//! Jacobi preconditioner, stopped on the scaled sup-norm residual
//! `max_u |r_u| / deg(u)`, which is exactly the mean-value defect.

use nalgebra::{DMatrix, DVector};

use crate::error::{McrtError, Result};
use crate::network::Network;

/// Default sup-norm bound on the mean-value residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Free-vertex count below which the dense factorization is used.
pub const DEFAULT_DENSE_THRESHOLD: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub dense_threshold: usize,
    /// Iteration cap for CG; `None` means `10 n + 1000`.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: DEFAULT_TOLERANCE,
            dense_threshold: DEFAULT_DENSE_THRESHOLD,
            max_iterations: None,
        }
    }
}

impl SolverOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        SolverOptions {
            tolerance,
            ..Self::default()
        }
    }

    /// Forces the iterative path regardless of size.
    pub fn iterative() -> Self {
        SolverOptions {
            dense_threshold: 0,
            ..Self::default()
        }
    }

    /// Forces the dense path regardless of size.
    pub fn dense() -> Self {
        SolverOptions {
            dense_threshold: usize::MAX,
            ..Self::default()
        }
    }
}

/// Free-vertex system in compressed form.
struct Reduced {
    free: Vec<usize>,
    diag: Vec<f64>,
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    rhs: Vec<f64>,
}

impl Reduced {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.free.len() {
            let mut acc = self.diag[i] * x[i];
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc -= self.vals[k] * x[self.cols[k]];
            }
            out[i] = acc;
        }
    }

    fn scaled_sup(&self, r: &[f64]) -> f64 {
        r.iter().zip(&self.diag).map(|(ri, d)| ri.abs() / d).fold(0.0, f64::max)
    }
}

/// Every free vertex must reach a pinned one.
pub(crate) fn check_pinned_reachable(network: &Network, pinned: &[Option<f64>]) -> Result<()> {
    let n = network.vertex_count();
    let mut seen: Vec<bool> = pinned.iter().map(Option::is_some).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| seen[v]).collect();
    while let Some(v) = stack.pop() {
        for (w, _) in network.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    match seen.iter().position(|&s| !s) {
        Some(v) => Err(McrtError::Unsolvable(format!(
            "vertex {v} lies in a component with no pinned vertex"
        ))),
        None => Ok(()),
    }
}

fn reduce(network: &Network, pinned: &[Option<f64>], source: Option<&[f64]>) -> Reduced {
    let n = network.vertex_count();
    let mut index = vec![usize::MAX; n];
    let free: Vec<usize> = (0..n).filter(|&v| pinned[v].is_none()).collect();
    for (i, &v) in free.iter().enumerate() {
        index[v] = i;
    }
    let mut diag = Vec::with_capacity(free.len());
    let mut row_offsets = Vec::with_capacity(free.len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut rhs = Vec::with_capacity(free.len());
    row_offsets.push(0);
    for &v in &free {
        let mut b = source.map_or(0.0, |s| s[v]);
        for (w, c) in network.neighbors(v) {
            let c = c as f64;
            match pinned[w] {
                Some(value) => b += c * value,
                None => {
                    cols.push(index[w]);
                    vals.push(c);
                }
            }
        }
        diag.push(network.degree(v) as f64);
        rhs.push(b);
        row_offsets.push(cols.len());
    }
    Reduced {
        free,
        diag,
        row_offsets,
        cols,
        vals,
        rhs,
    }
}

fn solve_dense(sys: &Reduced) -> Result<Vec<f64>> {
    let m = sys.free.len();
    let mut a = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        a[(i, i)] = sys.diag[i];
        for k in sys.row_offsets[i]..sys.row_offsets[i + 1] {
            a[(i, sys.cols[k])] -= sys.vals[k];
        }
    }
    let chol = a
        .cholesky()
        .ok_or_else(|| McrtError::Unsolvable("reduced Laplacian is not positive definite".into()))?;
    Ok(chol.solve(&DVector::from_column_slice(&sys.rhs)).as_slice().to_vec())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve_cg(sys: &Reduced, opts: &SolverOptions) -> Result<Vec<f64>> {
    let m = sys.free.len();
    let max_iter = opts.max_iterations.unwrap_or(10 * m + 1000);
    let target = 0.25 * opts.tolerance;
    let mut x = vec![0.0; m];
    let mut r = sys.rhs.clone();
    let mut ap = vec![0.0; m];
    let mut iterations = 0usize;

    // Restart from the true residual whenever the recursive one claims convergence.
    loop {
        sys.apply(&x, &mut ap);
        for i in 0..m {
            r[i] = sys.rhs[i] - ap[i];
        }
        if sys.scaled_sup(&r) <= target {
            return Ok(x);
        }
        if iterations >= max_iter {
            return Err(McrtError::Internal(format!(
                "conjugate gradients did not reach residual {} in {max_iter} iterations",
                opts.tolerance
            )));
        }
        let mut z: Vec<f64> = r.iter().zip(&sys.diag).map(|(ri, d)| ri / d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            iterations += 1;
            sys.apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            for i in 0..m {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if sys.scaled_sup(&r) <= 0.5 * target {
                break;
            }
            for i in 0..m {
                z[i] = r[i] / sys.diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..m {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
}

/// Solves for all vertex values given pinned values and an optional source term.
pub(crate) fn solve_pinned(
    network: &Network,
    pinned: &[Option<f64>],
    source: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    check_pinned_reachable(network, pinned)?;
    let sys = reduce(network, pinned, source);
    let free_values = if sys.free.is_empty() {
        Vec::new()
    } else if sys.free.len() < opts.dense_threshold {
        solve_dense(&sys)?
    } else {
        solve_cg(&sys, opts)?
    };
    let mut values: Vec<f64> = pinned.iter().map(|p| p.unwrap_or(0.0)).collect();
    for (i, &v) in sys.free.iter().enumerate() {
        values[v] = free_values[i];
    }
    Ok(values)
}

/// `max_u |x_u - (Σ_w c_uw x_w + s_u) / deg(u)|` over free vertices.
pub(crate) fn mean_value_residual(
    network: &Network,
    pinned: &[Option<f64>],
    source: Option<&[f64]>,
    values: &[f64],
) -> f64 {
    (0..network.vertex_count())
        .filter(|&v| pinned[v].is_none())
        .map(|v| {
            let deg = network.degree(v) as f64;
            let sum: f64 = network.neighbors(v).map(|(w, c)| c as f64 * values[w]).sum();
            let s = source.map_or(0.0, |s| s[v]);
            (values[v] - (sum + s) / deg).abs()
        })
        .fold(0.0, f64::max)
}
