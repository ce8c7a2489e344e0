//! Mutually reinforcing node and hyperedge centralities for weighted
//! hypergraphs.
//!
//! Node scores `x` and hyperedge scores `y` are the positive solution of
//!
//! ```text
//! lambda x = g(B W f(y))
//! mu y     = psi(B^T N phi(x))
//! ```
//!
//! where `B` is the incidence matrix, `W` and `N` hold edge and node weights,
//! and `f, g, phi, psi` act entrywise. Choosing all four maps as the identity
//! gives eigenvector centrality of the clique expansion and of the line graph;
//! other choices give multiplicative (`logexp`) or max-like (`max`) scores.
//!
//! ```
//! use hypercent::{npm_solve, CentralityModel, Hypergraph, SolverOptions};
//!
//! let h = Hypergraph::from_edges(vec![(vec![0, 1, 2], 1.0), (vec![2, 3], 1.0)], None).unwrap();
//! let sol = npm_solve(&h, &CentralityModel::linear(), &SolverOptions::default()).unwrap();
//! assert!(sol.converged);
//! assert!(sol.x[2] > sol.x[0]);
//! ```

pub mod generate;
pub mod hypergraph;
pub mod io;
pub mod maps;
pub mod oracles;
pub mod rank;
pub mod solver;

pub use hypergraph::{Hypergraph, HypergraphError, HypergraphStats, WeightedGraph};
pub use maps::{CentralityModel, Homogeneity, MapError, NonlinearMap};
pub use solver::{
    check_conditions, contraction_factor, convergence_rate, npm_solve, residual,
    CentralitySolution, ConditionReport, Norm, Regime, SolverError, SolverOptions,
};
