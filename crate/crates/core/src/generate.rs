//! Seeded random hypergraphs for tests, benchmarks and the CLI.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hypergraph::Hypergraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("invalid random hypergraph parameters: {0}")]
    InvalidSpec(String),
    #[error("no connected instance found after {0} attempts")]
    Exhausted(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub nodes: usize,
    pub edges: usize,
    pub min_size: usize,
    pub max_size: usize,
    /// Draw edge weights uniformly from `[0.5, 2)` instead of using 1.
    pub random_edge_weights: bool,
    /// Draw node weights uniformly from `[0.5, 2)` instead of using 1.
    pub random_node_weights: bool,
}

impl RandomSpec {
    pub fn new(nodes: usize, edges: usize) -> Self {
        RandomSpec {
            nodes,
            edges,
            min_size: 2,
            max_size: 4.min(nodes.max(2)),
            random_edge_weights: false,
            random_node_weights: false,
        }
    }

    /// Every edge has exactly `k` members.
    pub fn uniform(mut self, k: usize) -> Self {
        self.min_size = k;
        self.max_size = k;
        self
    }

    pub fn sizes(mut self, min: usize, max: usize) -> Self {
        self.min_size = min;
        self.max_size = max;
        self
    }

    pub fn weighted(mut self) -> Self {
        self.random_edge_weights = true;
        self.random_node_weights = true;
        self
    }

    fn validate(&self) -> Result<(), GenerateError> {
        if self.nodes == 0 || self.edges == 0 {
            return Err(GenerateError::InvalidSpec(
                "need at least one node and one edge".into(),
            ));
        }
        if self.min_size == 0 || self.min_size > self.max_size || self.max_size > self.nodes {
            return Err(GenerateError::InvalidSpec(format!(
                "edge sizes {}..={} do not fit {} nodes",
                self.min_size, self.max_size, self.nodes
            )));
        }
        Ok(())
    }
}

/// Deterministic generator used across the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws `spec.edges` edges with sizes uniform in `min_size..=max_size` and
/// members chosen without replacement. Duplicate edges merge, so the result
/// may have fewer edges than requested.
pub fn random_hypergraph<R: Rng>(
    spec: &RandomSpec,
    rng: &mut R,
) -> Result<Hypergraph, GenerateError> {
    spec.validate()?;
    let edges: Vec<(Vec<usize>, f64)> = (0..spec.edges)
        .map(|_| {
            let size = rng.gen_range(spec.min_size..=spec.max_size);
            let members = index::sample(rng, spec.nodes, size).into_vec();
            let w = if spec.random_edge_weights {
                rng.gen_range(0.5..2.0)
            } else {
                1.0
            };
            (members, w)
        })
        .collect();
    let node_weights = spec
        .random_node_weights
        .then(|| (0..spec.nodes).map(|_| rng.gen_range(0.5..2.0)).collect());
    Ok(Hypergraph::with_nodes(spec.nodes, edges, node_weights).expect("generated edges are valid"))
}

const MAX_ATTEMPTS: usize = 10_000;

/// Like [`random_hypergraph`], redrawing until the node/edge incidence graph
/// is connected and no edges merged.
pub fn random_connected_hypergraph<R: Rng>(
    spec: &RandomSpec,
    rng: &mut R,
) -> Result<Hypergraph, GenerateError> {
    spec.validate()?;
    for _ in 0..MAX_ATTEMPTS {
        let h = random_hypergraph(spec, rng)?;
        if h.num_edges() == spec.edges && h.bipartite_connected() {
            return Ok(h);
        }
    }
    Err(GenerateError::Exhausted(MAX_ATTEMPTS))
}
