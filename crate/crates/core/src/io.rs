//! Reading and writing hypergraphs and centrality results.
//!
//! Two hyperedge formats are understood:
//!
//! * **edge list**: one hyperedge per line, members separated by whitespace or
//!   commas, with an optional `weight:` prefix (default weight 1). Blank lines
//!   and lines starting with `#` are skipped.
//! * **simplex stream**: a pair of files holding one integer per line, the
//!   first giving the number of vertices of each simplex and the second the
//!   concatenated vertex lists.
//!
//! In both cases repeated hyperedges are merged and their weights summed, so
//! an unweighted file yields occurrence counts. Node labels are arbitrary
//! tokens, mapped to dense ids in order of first appearance.
//!
//! Node weights may be given in a separate file of `label weight` lines; nodes
//! not listed keep weight 1.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Hypergraph, HypergraphError};
use crate::maps::CentralityModel;
use crate::solver::{CentralitySolution, ConditionReport, Norm, SolverOptions};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("no hyperedges found")]
    Empty,
    #[error("nverts sums to {expected} but the simplex file has {got} entries")]
    LengthMismatch { expected: usize, got: usize },
    #[error("node weight given for unknown label {label:?} (line {line})")]
    UnknownLabel { line: usize, label: String },
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error("invalid solution file: {0}")]
    Json(#[from] serde_json::Error),
}

impl IngestError {
    fn io(path: &Path, source: io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Bijection between external node labels and dense ids `0..len`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMap {
    labels: Vec<String>,
    ids: HashMap<String, usize>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Labels `"0"`, `"1"`, ... for `n` nodes.
    pub fn identity(n: usize) -> Self {
        Self::from_labels((0..n).map(|i| i.to_string())).expect("numeric labels are distinct")
    }

    /// `None` if a label repeats.
    pub fn from_labels<I, S>(labels: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut map = LabelMap::new();
        for label in labels {
            let label = label.into();
            if map.ids.contains_key(&label) {
                return None;
            }
            map.intern(&label);
        }
        Some(map)
    }

    /// Id of `label`, assigning the next free id if it is new.
    pub fn intern(&mut self, label: &str) -> usize {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.ids.get(label).copied()
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Optional `label weight` file for node weights.
    pub node_weights: Option<PathBuf>,
}

fn open(path: &Path) -> Result<BufReader<fs::File>, IngestError> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|e| IngestError::io(path, e))
}

fn parse_weight(token: &str, line: usize) -> Result<f64, IngestError> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| IngestError::Malformed {
            line,
            message: format!("invalid weight {:?}", token.trim()),
        })
}

/// Edges as `(members, weight)` pairs before duplicate merging.
pub type RawEdges = Vec<(Vec<usize>, f64)>;

/// Parses the edge-list format from any reader. Returns the raw
/// (unaggregated) edges along with the label map.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<(RawEdges, LabelMap), IngestError> {
    let mut labels = LabelMap::new();
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| IngestError::Malformed {
            line: lineno,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (weight, body) = match trimmed.split_once(':') {
            Some((w, rest)) => (parse_weight(w, lineno)?, rest),
            None => (1.0, trimmed),
        };
        if !(weight.is_finite() && weight > 0.0) {
            return Err(IngestError::Malformed {
                line: lineno,
                message: format!("edge weight must be positive, got {weight}"),
            });
        }
        let members: Vec<usize> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| labels.intern(t))
            .collect();
        if members.is_empty() {
            return Err(IngestError::Malformed {
                line: lineno,
                message: "edge has no members".into(),
            });
        }
        edges.push((members, weight));
    }
    if edges.is_empty() {
        return Err(IngestError::Empty);
    }
    Ok((edges, labels))
}

/// Parses `label weight` lines into a weight vector over `labels`.
pub fn parse_node_weights<R: BufRead>(
    reader: R,
    labels: &LabelMap,
) -> Result<Vec<f64>, IngestError> {
    let mut weights = vec![1.0; labels.len()];
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| IngestError::Malformed {
            line: lineno,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(label), Some(w), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(IngestError::Malformed {
                line: lineno,
                message: "expected `label weight`".into(),
            });
        };
        let w = parse_weight(w, lineno)?;
        if !(w.is_finite() && w > 0.0) {
            return Err(IngestError::Malformed {
                line: lineno,
                message: format!("node weight must be positive, got {w}"),
            });
        }
        let id = labels.id(label).ok_or_else(|| IngestError::UnknownLabel {
            line: lineno,
            label: label.to_owned(),
        })?;
        weights[id] = w;
    }
    Ok(weights)
}

/// Loads an edge-list file (and optional node-weight file).
pub fn load_hyperedge_list(
    path: &Path,
    options: &LoadOptions,
) -> Result<(Hypergraph, LabelMap), IngestError> {
    let (edges, labels) = parse_edge_list(open(path)?).map_err(|e| with_path(e, path))?;
    let node_weights = match &options.node_weights {
        Some(p) => Some(parse_node_weights(open(p)?, &labels).map_err(|e| with_path(e, p))?),
        None => None,
    };
    let h = Hypergraph::with_nodes(labels.len(), edges, node_weights)?;
    Ok((h, labels))
}

fn with_path(err: IngestError, path: &Path) -> IngestError {
    match err {
        IngestError::Malformed { line, message } => IngestError::Malformed {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

fn read_integers<R: BufRead>(reader: R, path: &Path) -> Result<Vec<String>, IngestError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| IngestError::io(path, e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if t.parse::<u64>().is_err() {
            return Err(IngestError::Malformed {
                line: idx + 1,
                message: format!(
                    "{}: expected a non-negative integer, got {t:?}",
                    path.display()
                ),
            });
        }
        out.push(t.to_owned());
    }
    Ok(out)
}

/// Builds hyperedges from simplex-stream data: `nverts[s]` consecutive entries
/// of `simplices` form simplex `s`. Timestamps, if any, are not read.
pub fn simplices_to_edges(
    nverts: &[usize],
    simplices: &[String],
) -> Result<(RawEdges, LabelMap), IngestError> {
    let expected: usize = nverts.iter().sum();
    if expected != simplices.len() {
        return Err(IngestError::LengthMismatch {
            expected,
            got: simplices.len(),
        });
    }
    let mut labels = LabelMap::new();
    let mut edges = Vec::with_capacity(nverts.len());
    let mut offset = 0;
    for (s, &k) in nverts.iter().enumerate() {
        if k == 0 {
            return Err(IngestError::Malformed {
                line: s + 1,
                message: "simplex with zero vertices".into(),
            });
        }
        let members = simplices[offset..offset + k]
            .iter()
            .map(|l| labels.intern(l))
            .collect();
        offset += k;
        edges.push((members, 1.0));
    }
    if edges.is_empty() {
        return Err(IngestError::Empty);
    }
    Ok((edges, labels))
}

/// Loads an `nverts` / `simplices` file pair.
pub fn load_simplex_stream(
    nverts_path: &Path,
    simplices_path: &Path,
) -> Result<(Hypergraph, LabelMap), IngestError> {
    let nverts = read_integers(open(nverts_path)?, nverts_path)?
        .iter()
        .map(|s| s.parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| IngestError::Malformed {
            line: 0,
            message: e.to_string(),
        })?;
    let simplices = read_integers(open(simplices_path)?, simplices_path)?;
    let (edges, labels) = simplices_to_edges(&nverts, &simplices)?;
    let h = Hypergraph::with_nodes(labels.len(), edges, None)?;
    Ok((h, labels))
}

/// Outcome of [`prune_isolated`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneReport {
    pub removed: Vec<String>,
}

/// Drops nodes that belong to no edge and renumbers the others densely,
/// preserving their relative order.
pub fn prune_isolated(h: &Hypergraph, labels: &LabelMap) -> (Hypergraph, LabelMap, PruneReport) {
    let isolated = h.isolated_nodes();
    if isolated.is_empty() {
        return (h.clone(), labels.clone(), PruneReport { removed: vec![] });
    }
    let (pruned, kept) = h.without_isolated();
    let new_labels = LabelMap::from_labels(kept.iter().map(|&i| labels.label(i).to_owned()))
        .expect("labels stay distinct");
    let removed = isolated
        .iter()
        .map(|&i| labels.label(i).to_owned())
        .collect();
    (pruned, new_labels, PruneReport { removed })
}

/// Writes `h` in the edge-list format (`weight: members...`), one edge per line.
pub fn write_hyperedge_list<W: Write>(
    mut out: W,
    h: &Hypergraph,
    labels: &LabelMap,
) -> io::Result<()> {
    for (members, w) in h.edges().iter().zip(h.edge_weights()) {
        write!(out, "{w}:")?;
        for &i in members {
            write!(out, " {}", labels.label(i))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes `label weight` lines for nodes whose weight is not 1.
pub fn write_node_weights<W: Write>(
    mut out: W,
    h: &Hypergraph,
    labels: &LabelMap,
) -> io::Result<()> {
    for (i, &w) in h.node_weights().iter().enumerate() {
        if w != 1.0 {
            writeln!(out, "{} {w}", labels.label(i))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// solution documents

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionsRecord {
    pub tol: f64,
    pub max_iter: usize,
    pub norm: Norm,
}

impl From<&SolverOptions> for OptionsRecord {
    fn from(o: &SolverOptions) -> Self {
        OptionsRecord {
            tol: o.tol,
            max_iter: o.max_iter,
            norm: o.norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeScore {
    pub label: String,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_normalized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeScore {
    pub members: Vec<String>,
    pub weight: f64,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_normalized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub regime: String,
    pub rho: Option<f64>,
    pub connected: bool,
}

impl From<&ConditionReport> for ConditionRecord {
    fn from(r: &ConditionReport) -> Self {
        ConditionRecord {
            regime: format!("{:?}", r.regime),
            rho: r.rho,
            connected: r.connected,
        }
    }
}

/// JSON document describing one centrality computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub model: CentralityModel,
    pub options: OptionsRecord,
    pub lambda: f64,
    pub mu: f64,
    pub converged: bool,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ConditionRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<[f64; 2]>,
    pub nodes: Vec<NodeScore>,
    pub edges: Vec<EdgeScore>,
}

/// Divides every entry by the largest one.
pub fn max_normalized(v: &[f64]) -> Vec<f64> {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    v.iter().map(|t| t / max).collect()
}

impl SolutionDocument {
    pub fn new(
        h: &Hypergraph,
        labels: &LabelMap,
        model: &CentralityModel,
        options: &SolverOptions,
        sol: &CentralitySolution,
        with_max_normalized: bool,
    ) -> Self {
        let scaled_x = with_max_normalized.then(|| max_normalized(&sol.x));
        let scaled_y = with_max_normalized.then(|| max_normalized(&sol.y));
        let nodes = sol
            .x
            .iter()
            .enumerate()
            .map(|(i, &score)| NodeScore {
                label: labels.label(i).to_owned(),
                score,
                max_normalized: scaled_x.as_ref().map(|s| s[i]),
            })
            .collect();
        let edges = sol
            .y
            .iter()
            .enumerate()
            .map(|(e, &score)| EdgeScore {
                members: h
                    .edge(e)
                    .iter()
                    .map(|&i| labels.label(i).to_owned())
                    .collect(),
                weight: h.edge_weights()[e],
                score,
                max_normalized: scaled_y.as_ref().map(|s| s[e]),
            })
            .collect();
        SolutionDocument {
            model: model.clone(),
            options: options.into(),
            lambda: sol.lambda,
            mu: sol.mu,
            converged: sol.converged,
            iterations: sol.iterations,
            conditions: None,
            residuals: None,
            nodes,
            edges,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution documents always serialize")
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, IngestError> {
        Ok(serde_json::from_reader(reader)?)
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        Self::from_reader(open(path)?)
    }

    pub fn node_scores(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.score).collect()
    }

    pub fn node_labels(&self) -> Vec<&str> {
        self.nodes.iter().map(|n| n.label.as_str()).collect()
    }
}

/// Node scores of `other` reordered to follow the node order of `reference`.
/// `None` if the two documents do not cover the same node labels.
pub fn align_node_scores(
    reference: &SolutionDocument,
    other: &SolutionDocument,
) -> Option<Vec<f64>> {
    if reference.nodes.len() != other.nodes.len() {
        return None;
    }
    let index: HashMap<&str, f64> = other
        .nodes
        .iter()
        .map(|n| (n.label.as_str(), n.score))
        .collect();
    if index.len() != other.nodes.len() {
        return None;
    }
    reference
        .nodes
        .iter()
        .map(|n| index.get(n.label.as_str()).copied())
        .collect()
}

fn edge_key(members: &[String]) -> Vec<String> {
    let mut key = members.to_vec();
    key.sort();
    key
}

/// Edge scores of `other` reordered to follow the edge order of `reference`.
pub fn align_edge_scores(
    reference: &SolutionDocument,
    other: &SolutionDocument,
) -> Option<Vec<f64>> {
    if reference.edges.len() != other.edges.len() {
        return None;
    }
    let index: HashMap<Vec<String>, f64> = other
        .edges
        .iter()
        .map(|e| (edge_key(&e.members), e.score))
        .collect();
    if index.len() != other.edges.len() {
        return None;
    }
    reference
        .edges
        .iter()
        .map(|e| index.get(&edge_key(&e.members)).copied())
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|t| t.to_string()).unwrap_or_default()
}

/// CSV of similarity curves: `k,isim,kendall,spearman`; undefined
/// correlations are left empty.
pub fn write_curves_csv<W: Write>(
    mut out: W,
    curve: &[crate::rank::SimilarityPoint],
) -> io::Result<()> {
    writeln!(out, "k,isim,kendall,spearman")?;
    for p in curve {
        writeln!(
            out,
            "{},{},{},{}",
            p.k,
            p.isim,
            opt(p.kendall),
            opt(p.spearman)
        )?;
    }
    Ok(())
}

/// CSV pairing the scores of two solutions over the same nodes and edges:
/// `kind,id,weight,score_a,score_b,scaled_a,scaled_b`, where `scaled_*` are
/// max-normalized scores and `weight` is the edge weight (empty for nodes).
pub fn write_scatter_csv<W: Write>(
    mut out: W,
    a: &SolutionDocument,
    b: &SolutionDocument,
) -> Result<(), ScatterError> {
    let nodes_b = align_node_scores(a, b).ok_or(ScatterError::NodeMismatch)?;
    let edges_b = align_edge_scores(a, b).ok_or(ScatterError::EdgeMismatch)?;
    let nodes_a = a.node_scores();
    let edges_a: Vec<f64> = a.edges.iter().map(|e| e.score).collect();
    let (sna, snb) = (max_normalized(&nodes_a), max_normalized(&nodes_b));
    let (sea, seb) = (max_normalized(&edges_a), max_normalized(&edges_b));
    writeln!(out, "kind,id,weight,score_a,score_b,scaled_a,scaled_b")?;
    for (i, node) in a.nodes.iter().enumerate() {
        writeln!(
            out,
            "node,{},,{},{},{},{}",
            csv_field(&node.label),
            nodes_a[i],
            nodes_b[i],
            sna[i],
            snb[i]
        )?;
    }
    for (e, edge) in a.edges.iter().enumerate() {
        writeln!(
            out,
            "edge,{},{},{},{},{},{}",
            csv_field(&edge.members.join(" ")),
            edge.weight,
            edges_a[e],
            edges_b[e],
            sea[e],
            seb[e]
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

#[derive(Debug, Error)]
pub enum ScatterError {
    #[error("the two solutions cover different node sets")]
    NodeMismatch,
    #[error("the two solutions cover different edge sets")]
    EdgeMismatch,
    #[error(transparent)]
    Io(#[from] io::Error),
}
