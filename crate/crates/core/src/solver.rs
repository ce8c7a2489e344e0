//! Nonlinear power method for the coupled node/edge centrality equations
//!
//! ```text
//! lambda x = g(B W f(y)),   mu y = psi(B^T N phi(x)),   x, y > 0.
//! ```
//!
//! Each sweep replaces `x` by the normalized geometric mean of `x` and its raw
//! update `g(B W f(y))` (and likewise for `y`). The fixed points of the damped
//! map are exactly the positive solutions above, and the averaging removes the
//! period-two oscillation a plain alternating update can get stuck in.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::Hypergraph;
use crate::maps::{CentralityModel, MapError, NonlinearMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("positivity unattainable: node {node} belongs to no edge and g(0) = {image} is not positive")]
    IsolatedNode { node: usize, image: f64 },
    #[error("positivity unattainable: g is undefined at 0 and node {node} belongs to no edge")]
    IsolatedNodeUndefined { node: usize },
    #[error("iteration {iteration}: {source}")]
    Map {
        iteration: usize,
        #[source]
        source: MapError,
    },
    #[error("iteration {iteration}: non-finite value in the {vector} vector at index {index}")]
    NonFinite {
        iteration: usize,
        vector: &'static str,
        index: usize,
    },
    #[error("iteration {iteration}: {vector} vector lost positivity at index {index}")]
    PositivityLost {
        iteration: usize,
        vector: &'static str,
        index: usize,
    },
    #[error("solution vectors have lengths ({got_x}, {got_y}), expected ({n}, {m})")]
    ShapeMismatch {
        n: usize,
        m: usize,
        got_x: usize,
        got_y: usize,
    },
}

/// Vector norm used for normalization and for the stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    #[default]
    L2,
    Linf,
}

impl Norm {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|t| t.abs()).sum(),
            Norm::L2 => v.iter().map(|t| t * t).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |acc, t| acc.max(t.abs())),
        }
    }

    /// `||a - b||`.
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::L1 => a.iter().zip(b).map(|(s, t)| (s - t).abs()).sum(),
            Norm::L2 => a
                .iter()
                .zip(b)
                .map(|(s, t)| (s - t) * (s - t))
                .sum::<f64>()
                .sqrt(),
            Norm::Linf => a
                .iter()
                .zip(b)
                .fold(0.0, |acc, (s, t)| acc.max((s - t).abs())),
        }
    }

    pub fn normalize(self, v: &mut [f64]) {
        let norm = self.of(v);
        for t in v.iter_mut() {
            *t /= norm;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Stop once the summed relative change of `x` and `y` drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub norm: Norm,
    /// Starting vectors `(x0, y0)`; all ones when `None`. They are normalized
    /// before the first sweep, so any positive rescaling gives the same run.
    pub init: Option<(Vec<f64>, Vec<f64>)>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_iter: 1000,
            norm: Norm::L2,
            init: None,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_init(mut self, x0: Vec<f64>, y0: Vec<f64>) -> Self {
        self.init = Some((x0, y0));
        self
    }

    fn validate(&self, n: usize, m: usize) -> Result<(), SolverError> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(SolverError::InvalidOptions(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(SolverError::InvalidOptions(
                "max_iter must be at least 1".into(),
            ));
        }
        if let Some((x0, y0)) = &self.init {
            if x0.len() != n || y0.len() != m {
                return Err(SolverError::InvalidOptions(format!(
                    "initial vectors have lengths ({}, {}), expected ({n}, {m})",
                    x0.len(),
                    y0.len()
                )));
            }
            if !x0.iter().chain(y0).all(|t| t.is_finite() && *t > 0.0) {
                return Err(SolverError::InvalidOptions(
                    "initial vectors must be strictly positive and finite".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Converged (or last) iterate of the nonlinear power method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralitySolution {
    /// Node centralities, `||x|| = 1`.
    pub x: Vec<f64>,
    /// Edge centralities, `||y|| = 1`.
    pub y: Vec<f64>,
    /// `||g(B W f(y))||` at the returned iterate.
    pub lambda: f64,
    /// `||psi(B^T N phi(x))||` at the returned iterate.
    pub mu: f64,
    pub norm: Norm,
    pub iterations: usize,
    pub converged: bool,
    /// Summed relative change after each sweep.
    pub change_history: Vec<f64>,
}

/// Which existence/uniqueness regime a model falls into on a given hypergraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `rho < 1`: unique solution, linear convergence.
    P1,
    /// `rho = 1`, positive maps, connected incidence graph: unique solution.
    P2,
    /// Not covered by the homogeneous theory; results are empirical.
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub regime: Regime,
    pub rho: Option<f64>,
    pub connected: bool,
}

const RHO_ONE_TOL: f64 = 1e-12;

pub fn check_conditions(h: &Hypergraph, model: &CentralityModel) -> ConditionReport {
    let rho = model.rho();
    let connected = h.bipartite_connected();
    let all_positive = model.maps().iter().all(NonlinearMap::is_positive);
    let regime = match rho {
        Some(r) if r < 1.0 - RHO_ONE_TOL => Regime::P1,
        Some(r) if (r - 1.0).abs() <= RHO_ONE_TOL && connected && all_positive => Regime::P2,
        _ => Regime::Unverified,
    };
    ConditionReport {
        regime,
        rho,
        connected,
    }
}

/// Scratch buffers for one evaluation of the two raw updates.
struct Updates<'a> {
    h: &'a Hypergraph,
    model: &'a CentralityModel,
    edge_buf: Vec<f64>,
    node_buf: Vec<f64>,
}

impl<'a> Updates<'a> {
    fn new(h: &'a Hypergraph, model: &'a CentralityModel) -> Self {
        Updates {
            h,
            model,
            edge_buf: vec![0.0; h.num_edges()],
            node_buf: vec![0.0; h.num_nodes()],
        }
    }

    /// `out = g(B W f(y))`.
    fn node_update(&mut self, y: &[f64], out: &mut [f64]) -> Result<(), MapError> {
        self.edge_buf.copy_from_slice(y);
        self.model.f.eval_in_place(&mut self.edge_buf)?;
        self.h.apply_bw_into(&self.edge_buf, out);
        self.model.g.eval_in_place(out)
    }

    /// `out = psi(B^T N phi(x))`.
    fn edge_update(&mut self, x: &[f64], out: &mut [f64]) -> Result<(), MapError> {
        self.node_buf.copy_from_slice(x);
        self.model.phi.eval_in_place(&mut self.node_buf)?;
        self.h.apply_btn_into(&self.node_buf, out);
        self.model.psi.eval_in_place(out)
    }
}

fn check_vector(v: &[f64], iteration: usize, vector: &'static str) -> Result<(), SolverError> {
    for (index, &t) in v.iter().enumerate() {
        if !t.is_finite() {
            return Err(SolverError::NonFinite {
                iteration,
                vector,
                index,
            });
        }
        if t <= 0.0 {
            return Err(SolverError::PositivityLost {
                iteration,
                vector,
                index,
            });
        }
    }
    Ok(())
}

fn check_isolated(h: &Hypergraph, model: &CentralityModel) -> Result<(), SolverError> {
    let Some(&node) = h.isolated_nodes().first() else {
        return Ok(());
    };
    match model.g.eval_scalar(0.0) {
        Ok(image) if image > 0.0 => Ok(()),
        Ok(image) => Err(SolverError::IsolatedNode { node, image }),
        Err(_) => Err(SolverError::IsolatedNodeUndefined { node }),
    }
}

/// Runs the nonlinear power method.
///
/// Stops when `||x' - x|| / ||x'|| + ||y' - y|| / ||y'|| < tol` or after
/// `max_iter` sweeps; in the latter case the last iterate is returned with
/// `converged = false`. Hypergraphs with isolated nodes are rejected up front
/// whenever `g(0)` is not positive, since such a node's score would be zero.
pub fn npm_solve(
    h: &Hypergraph,
    model: &CentralityModel,
    opts: &SolverOptions,
) -> Result<CentralitySolution, SolverError> {
    let (n, m) = (h.num_nodes(), h.num_edges());
    opts.validate(n, m)?;
    check_isolated(h, model)?;

    let norm = opts.norm;
    let (mut x, mut y) = match &opts.init {
        Some((x0, y0)) => (x0.clone(), y0.clone()),
        None => (vec![1.0; n], vec![1.0; m]),
    };
    norm.normalize(&mut x);
    norm.normalize(&mut y);

    let mut updates = Updates::new(h, model);
    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; m];
    let mut x_next = vec![0.0; n];
    let mut y_next = vec![0.0; m];
    let mut history = Vec::new();
    let mut converged = false;

    for iteration in 1..=opts.max_iter {
        let map_err = |source| SolverError::Map { iteration, source };
        updates.node_update(&y, &mut gx).map_err(map_err)?;
        updates.edge_update(&x, &mut gy).map_err(map_err)?;
        for ((next, cur), upd) in x_next.iter_mut().zip(&x).zip(&gx) {
            *next = (cur * upd).sqrt();
        }
        for ((next, cur), upd) in y_next.iter_mut().zip(&y).zip(&gy) {
            *next = (cur * upd).sqrt();
        }
        norm.normalize(&mut x_next);
        norm.normalize(&mut y_next);
        check_vector(&x_next, iteration, "node")?;
        check_vector(&y_next, iteration, "edge")?;

        let change = norm.distance(&x_next, &x) / norm.of(&x_next)
            + norm.distance(&y_next, &y) / norm.of(&y_next);
        std::mem::swap(&mut x, &mut x_next);
        std::mem::swap(&mut y, &mut y_next);
        history.push(change);
        if !change.is_finite() {
            return Err(SolverError::NonFinite {
                iteration,
                vector: "change",
                index: 0,
            });
        }
        if change < opts.tol {
            converged = true;
            break;
        }
    }

    let final_iteration = history.len();
    let map_err = |source| SolverError::Map {
        iteration: final_iteration,
        source,
    };
    updates.node_update(&y, &mut gx).map_err(map_err)?;
    updates.edge_update(&x, &mut gy).map_err(map_err)?;

    Ok(CentralitySolution {
        lambda: norm.of(&gx),
        mu: norm.of(&gy),
        x,
        y,
        norm,
        iterations: final_iteration,
        converged,
        change_history: history,
    })
}

/// Relative residuals of the two centrality equations at `sol`:
///
/// ```text
/// res_x = ||lambda x - g(B W f(y))|| / ||lambda x||
/// res_y = ||mu y - psi(B^T N phi(x))|| / ||mu y||
/// ```
pub fn residual(
    h: &Hypergraph,
    model: &CentralityModel,
    sol: &CentralitySolution,
) -> Result<(f64, f64), SolverError> {
    let (n, m) = (h.num_nodes(), h.num_edges());
    if sol.x.len() != n || sol.y.len() != m {
        return Err(SolverError::ShapeMismatch {
            n,
            m,
            got_x: sol.x.len(),
            got_y: sol.y.len(),
        });
    }
    let mut updates = Updates::new(h, model);
    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; m];
    let map_err = |source| SolverError::Map {
        iteration: sol.iterations,
        source,
    };
    updates.node_update(&sol.y, &mut gx).map_err(map_err)?;
    updates.edge_update(&sol.x, &mut gy).map_err(map_err)?;

    let norm = sol.norm;
    let scaled_x: Vec<f64> = sol.x.iter().map(|t| sol.lambda * t).collect();
    let scaled_y: Vec<f64> = sol.y.iter().map(|t| sol.mu * t).collect();
    Ok((
        norm.distance(&scaled_x, &gx) / norm.of(&scaled_x),
        norm.distance(&scaled_y, &gy) / norm.of(&scaled_y),
    ))
}

const MIN_RATE_HISTORY: usize = 5;

/// Least-squares slope of `ln(change)` against the iteration index over the
/// second half of the change history (at least five points). `exp(slope)` is
/// the observed per-iteration contraction factor.
///
/// `None` when the history is shorter than five sweeps or the tail contains a
/// zero change.
pub fn convergence_rate(sol: &CentralitySolution) -> Option<f64> {
    let history = &sol.change_history;
    if history.len() < MIN_RATE_HISTORY {
        return None;
    }
    let tail_len = (history.len() / 2).max(MIN_RATE_HISTORY);
    let start = history.len() - tail_len;
    let tail = &history[start..];
    if tail.iter().any(|&c| !c.is_finite() || c <= 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .enumerate()
        .map(|(k, c)| ((start + k) as f64, c.ln()))
        .collect();
    let count = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_l = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let cov: f64 = pts.iter().map(|(t, l)| (t - mean_t) * (l - mean_l)).sum();
    let var: f64 = pts.iter().map(|(t, _)| (t - mean_t) * (t - mean_t)).sum();
    Some(cov / var)
}

/// `exp` of [`convergence_rate`].
pub fn contraction_factor(sol: &CentralitySolution) -> Option<f64> {
    convergence_rate(sol).map(f64::exp)
}
