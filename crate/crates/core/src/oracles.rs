//! Reference computations used to cross-check the nonlinear power method:
//! a dense Perron eigenvector solver for the linear model, the edge-wise
//! tensor eigenvector residual for uniform hypergraphs, and closed-form
//! predictions on sunflower hypergraphs.

use serde::Serialize;
use thiserror::Error;

use crate::hypergraph::{Hypergraph, HypergraphError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("sunflower needs at least one petal")]
    NoPetals,
    #[error("petal {petal} has size {size}; petals need at least 2 nodes including the core")]
    PetalTooSmall { petal: usize, size: usize },
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("matrix has a negative or non-finite entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("power iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("power iteration collapsed to the zero vector")]
    ZeroVector,
    #[error("hypergraph is not uniform")]
    NotUniform,
    #[error("tensor residual requires unit node weights")]
    NonUnitNodeWeights,
    #[error("vector must be strictly positive with one entry per node")]
    BadVector,
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// Petal sizes of a sunflower hypergraph, each counting the shared core.
#[derive(Debug, Clone, PartialEq)]
pub struct SunflowerSpec {
    petal_sizes: Vec<usize>,
}

impl SunflowerSpec {
    pub fn new(petal_sizes: Vec<usize>) -> Result<Self, OracleError> {
        if petal_sizes.is_empty() {
            return Err(OracleError::NoPetals);
        }
        if let Some((petal, &size)) = petal_sizes.iter().enumerate().find(|(_, &s)| s < 2) {
            return Err(OracleError::PetalTooSmall { petal, size });
        }
        Ok(SunflowerSpec { petal_sizes })
    }

    /// `r` petals of `size` nodes each.
    pub fn uniform(petals: usize, size: usize) -> Result<Self, OracleError> {
        Self::new(vec![size; petals])
    }

    pub fn petal_sizes(&self) -> &[usize] {
        &self.petal_sizes
    }

    pub fn petals(&self) -> usize {
        self.petal_sizes.len()
    }

    /// Node ids belonging only to petal `i` (the core excluded).
    pub fn petal_nodes(&self, i: usize) -> std::ops::Range<usize> {
        let start = 1 + self.petal_sizes[..i].iter().map(|s| s - 1).sum::<usize>();
        start..start + self.petal_sizes[i] - 1
    }
}

/// Sunflower with core node 0; petal `i` adds `size_i - 1` fresh nodes. All
/// weights are 1.
pub fn generate_sunflower(spec: &SunflowerSpec) -> Hypergraph {
    let edges = (0..spec.petals()).map(|i| {
        let mut members = vec![0];
        members.extend(spec.petal_nodes(i));
        (members, 1.0)
    });
    Hypergraph::from_edges(edges, None).expect("sunflower specs are valid by construction")
}

/// Predicted core-to-petal node score ratio `r^beta` on a uniform unweighted
/// sunflower with `r` petals when `g` is homogeneous of degree `beta`.
pub fn sunflower_ratio(r: usize, beta: f64) -> f64 {
    (r as f64).powf(beta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronPair {
    /// Positive, l2-normalized dominant eigenvector.
    pub vector: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Diagonal shift added after a period-two oscillation was detected;
    /// zero when the plain iteration converged. `value` is already unshifted.
    pub shift: f64,
}

const PERRON_TOL: f64 = 1e-12;
const PERRON_MAX_ITER: usize = 200_000;

fn matvec(matrix: &[Vec<f64>], v: &[f64], shift: f64, out: &mut [f64]) {
    for ((slot, row), vi) in out.iter_mut().zip(matrix).zip(v) {
        *slot = row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() + shift * vi;
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

fn l2_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(s, t)| (s - t) * (s - t))
        .sum::<f64>()
        .sqrt()
}

/// Dominant eigenpair of a dense nonnegative irreducible matrix by plain power
/// iteration from the all-ones vector, stopping at relative change `1e-12`.
///
/// If the iterates start alternating between two vectors (a periodic matrix),
/// the iteration restarts on `M + s I` with `s` equal to the largest entry.
pub fn dense_perron(matrix: &[Vec<f64>]) -> Result<PerronPair, OracleError> {
    let n = matrix.len();
    if n == 0 {
        return Err(OracleError::EmptyMatrix);
    }
    let mut max_entry: f64 = 0.0;
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(OracleError::NotSquare {
                row,
                len: r.len(),
                n,
            });
        }
        for (col, &a) in r.iter().enumerate() {
            if !(a.is_finite() && a >= 0.0) {
                return Err(OracleError::NegativeEntry { row, col });
            }
            max_entry = max_entry.max(a);
        }
    }

    let ones = vec![1.0 / (n as f64).sqrt(); n];
    let mut shift = 0.0;
    let mut iterations = 0;
    let mut v = ones.clone();
    let mut prev = ones.clone();
    let mut next = vec![0.0; n];
    loop {
        if iterations >= PERRON_MAX_ITER {
            return Err(OracleError::NoConvergence { iterations });
        }
        iterations += 1;
        matvec(matrix, &v, shift, &mut next);
        let norm = l2(&next);
        if norm.is_nan() || norm <= 0.0 {
            return Err(OracleError::ZeroVector);
        }
        next.iter_mut().for_each(|t| *t /= norm);
        let change = l2_dist(&next, &v);
        if change < PERRON_TOL {
            std::mem::swap(&mut v, &mut next);
            break;
        }
        if shift == 0.0 && change > 1e-6 && l2_dist(&next, &prev) < 1e-9 {
            shift = max_entry;
            v.copy_from_slice(&ones);
            prev.copy_from_slice(&ones);
            continue;
        }
        std::mem::swap(&mut prev, &mut v);
        std::mem::swap(&mut v, &mut next);
    }
    let mut mv = vec![0.0; n];
    matvec(matrix, &v, 0.0, &mut mv);
    Ok(PerronPair {
        value: l2(&mv),
        vector: v,
        iterations,
        shift,
    })
}

/// Right-multiplies a dense matrix by the diagonal matrix `Diag(diag)`.
pub fn scale_columns(matrix: &[Vec<f64>], diag: &[f64]) -> Vec<Vec<f64>> {
    matrix
        .iter()
        .map(|row| row.iter().zip(diag).map(|(a, d)| a * d).collect())
        .collect()
}

/// `(A_H + D_H) N`, whose Perron vector is the linear-model node centrality.
pub fn linear_node_matrix(h: &Hypergraph) -> Vec<Vec<f64>> {
    scale_columns(&h.clique_expansion().dense_with_degrees(), h.node_weights())
}

/// `(A^(e) + Delta) W`, whose Perron vector is the linear-model edge centrality.
pub fn linear_edge_matrix(h: &Hypergraph) -> Vec<Vec<f64>> {
    scale_columns(
        &h.line_graph_expansion().dense_with_degrees(),
        h.edge_weights(),
    )
}

/// Relative residual of the l^p tensor eigenvector equation of the adjacency
/// tensor of a uniform hypergraph with unit node weights.
///
/// With `s_i = sum_{e ∋ i} w(e) prod_{j in e, j != i} x_j`, returns
/// `min_c ||s - c x^p|| / ||s||` (l2), with `c` fitted by least squares. The
/// tensor is never materialized; each edge contributes once per member.
pub fn tensor_z_residual(h: &Hypergraph, x: &[f64], p: f64) -> Result<f64, OracleError> {
    if h.uniform_size().is_none() {
        return Err(OracleError::NotUniform);
    }
    if !h.has_unit_node_weights() {
        return Err(OracleError::NonUnitNodeWeights);
    }
    if x.len() != h.num_nodes() || !x.iter().all(|t| t.is_finite() && *t > 0.0) {
        return Err(OracleError::BadVector);
    }
    let mut s = vec![0.0; h.num_nodes()];
    for (members, &w) in h.edges().iter().zip(h.edge_weights()) {
        for &i in members {
            let others: f64 = members.iter().filter(|&&j| j != i).map(|&j| x[j]).product();
            s[i] += w * others;
        }
    }
    let xp: Vec<f64> = x.iter().map(|t| t.powf(p)).collect();
    let c =
        s.iter().zip(&xp).map(|(a, b)| a * b).sum::<f64>() / xp.iter().map(|b| b * b).sum::<f64>();
    let fitted: Vec<f64> = xp.iter().map(|b| c * b).collect();
    Ok(l2_dist(&s, &fitted) / l2(&s))
}
