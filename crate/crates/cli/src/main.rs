//! `hypercent`: node and hyperedge centralities from the command line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypercent::generate::{random_connected_hypergraph, seeded_rng, RandomSpec};
use hypercent::io::{
    align_node_scores, load_hyperedge_list, load_simplex_stream, write_curves_csv,
    write_hyperedge_list, write_scatter_csv, ConditionRecord, IngestError, LabelMap, LoadOptions,
    SolutionDocument,
};
use hypercent::oracles::{
    dense_perron, generate_sunflower, linear_edge_matrix, linear_node_matrix, tensor_z_residual,
    SunflowerSpec,
};
use hypercent::rank::similarity_curves;
use hypercent::{
    check_conditions, npm_solve, residual, CentralityModel, Hypergraph, Norm, SolverError,
    SolverOptions,
};

const EXIT_NO_CONVERGENCE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hypercent",
    version,
    about = "Node and hyperedge centrality for weighted hypergraphs"
)]
struct Cli {
    /// Print errors to stderr as a JSON object.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for node and edge centralities and write a solution JSON.
    Compute(ComputeArgs),
    /// Similarity curves (isim, Kendall, Spearman) between two solutions.
    Compare(CompareArgs),
    /// Paired node and edge scores of two solutions, as CSV.
    Scatter(PairArgs),
    /// Write a sunflower or seeded random hypergraph.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Cross-check the solver against the dense linear oracle and the tensor residual.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelName {
    Linear,
    Logexp,
    Max,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormName {
    L1,
    L2,
    Linf,
}

impl From<NormName> for Norm {
    fn from(n: NormName) -> Self {
        match n {
            NormName::L1 => Norm::L1,
            NormName::L2 => Norm::L2,
            NormName::Linf => Norm::Linf,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Edge-list file, or an `nverts` file followed by a `simplices` file.
    #[arg(long, required = true, num_args = 1..=2)]
    input: Vec<PathBuf>,
    /// `label weight` lines; only valid with an edge-list input.
    #[arg(long)]
    node_weights: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "linear")]
    model: ModelName,
    /// Exponent of the log-exp model.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Exponent of the max model.
    #[arg(long, default_value_t = 10.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "l2")]
    norm: NormName,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Solution JSON path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also record max-normalized scores.
    #[arg(long)]
    max_normalize: bool,
}

#[derive(Args)]
struct PairArgs {
    /// Two solution JSON files; the first is the reference.
    #[arg(long, required = true, num_args = 1..=2)]
    input: Vec<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Largest k of the curves; defaults to the number of nodes.
    #[arg(long)]
    topk: Option<usize>,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Petal sizes count the shared core node.
    Sunflower {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Connected hypergraph with edge sizes drawn from `min-size..=max-size`.
    Random {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        min_size: usize,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        /// Draw edge weights from [0.5, 2) instead of using 1.
        #[arg(long)]
        weighted: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Exponent for the tensor residual of the log-exp model.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    kind: &'static str,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            kind: "input",
            message: message.into(),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::InvalidOptions(_) => CliError::input(e.to_string()),
            _ => CliError {
                code: EXIT_PRECONDITION,
                kind: "precondition",
                message: e.to_string(),
            },
        }
    }
}

fn io_error(path: Option<&Path>, e: io::Error) -> CliError {
    match path {
        Some(p) => CliError::input(format!("{}: {e}", p.display())),
        None => CliError::input(e.to_string()),
    }
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| io_error(Some(p), e)),
        None => io::stdout().write_all(bytes).map_err(|e| io_error(None, e)),
    }
}

fn load_input(args: &InputArgs) -> Result<(Hypergraph, LabelMap), CliError> {
    match args.input.as_slice() {
        [edges] => {
            let opts = LoadOptions {
                node_weights: args.node_weights.clone(),
            };
            Ok(load_hyperedge_list(edges, &opts)?)
        }
        [nverts, simplices] => {
            if args.node_weights.is_some() {
                return Err(CliError::input("--node-weights needs an edge-list input"));
            }
            Ok(load_simplex_stream(nverts, simplices)?)
        }
        _ => Err(CliError::input("expected one or two --input paths")),
    }
}

fn build_model(args: &ModelArgs) -> Result<CentralityModel, CliError> {
    let model = match args.model {
        ModelName::Linear => Ok(CentralityModel::linear()),
        ModelName::Logexp => CentralityModel::log_exp(args.p),
        ModelName::Max => CentralityModel::max(args.alpha),
    };
    model.map_err(|e| CliError::input(e.to_string()))
}

fn cmd_compute(args: &ComputeArgs) -> Result<u8, CliError> {
    let (h, labels) = load_input(&args.input)?;
    let model = build_model(&args.model)?;
    let opts = SolverOptions::default()
        .with_tol(args.model.tol)
        .with_max_iter(args.model.max_iter)
        .with_norm(args.model.norm.into());

    let report = check_conditions(&h, &model);
    let rho = report
        .rho
        .map_or("undefined".to_string(), |r| r.to_string());
    eprintln!(
        "model {}: regime {:?}, rho {rho}, incidence graph {}",
        model.name,
        report.regime,
        if report.connected {
            "connected"
        } else {
            "disconnected"
        }
    );

    let sol = npm_solve(&h, &model, &opts)?;
    let (rx, ry) = residual(&h, &model, &sol)?;
    eprintln!(
        "{} after {} iterations; residuals x {rx:.3e}, y {ry:.3e}",
        if sol.converged {
            "converged"
        } else {
            "not converged"
        },
        sol.iterations
    );

    let mut doc = SolutionDocument::new(&h, &labels, &model, &opts, &sol, args.max_normalize);
    doc.conditions = Some(ConditionRecord::from(&report));
    doc.residuals = Some([rx, ry]);
    let mut json = doc.to_json();
    json.push('\n');
    emit(args.output.as_deref(), json.as_bytes())?;
    Ok(if sol.converged {
        0
    } else {
        EXIT_NO_CONVERGENCE
    })
}

fn load_pair(args: &PairArgs) -> Result<(SolutionDocument, SolutionDocument), CliError> {
    if args.input.len() != 2 {
        return Err(CliError::input(
            "expected exactly two --input solution files",
        ));
    }
    Ok((
        SolutionDocument::load(&args.input[0])?,
        SolutionDocument::load(&args.input[1])?,
    ))
}

fn cmd_compare(args: &CompareArgs) -> Result<u8, CliError> {
    let (a, b) = load_pair(&args.pair)?;
    let other = align_node_scores(&a, &b)
        .ok_or_else(|| CliError::input("the two solutions cover different node sets"))?;
    let k = args.topk.unwrap_or(a.nodes.len());
    let curve = similarity_curves(&a.node_scores(), &other, k)
        .map_err(|e| CliError::input(e.to_string()))?;
    let mut out = Vec::new();
    write_curves_csv(&mut out, &curve).map_err(|e| io_error(None, e))?;
    emit(args.pair.output.as_deref(), &out)?;
    Ok(0)
}

fn cmd_scatter(args: &PairArgs) -> Result<u8, CliError> {
    let (a, b) = load_pair(args)?;
    let mut out = Vec::new();
    write_scatter_csv(&mut out, &a, &b).map_err(|e| CliError::input(e.to_string()))?;
    emit(args.output.as_deref(), &out)?;
    Ok(0)
}

fn cmd_generate(kind: &GenerateKind) -> Result<u8, CliError> {
    let (h, output) = match kind {
        GenerateKind::Sunflower { sizes, output } => {
            let spec =
                SunflowerSpec::new(sizes.clone()).map_err(|e| CliError::input(e.to_string()))?;
            (generate_sunflower(&spec), output)
        }
        GenerateKind::Random {
            nodes,
            edges,
            seed,
            min_size,
            max_size,
            weighted,
            output,
        } => {
            let mut spec = RandomSpec::new(*nodes, *edges).sizes(*min_size, *max_size);
            spec.random_edge_weights = *weighted;
            let h = random_connected_hypergraph(&spec, &mut seeded_rng(*seed))
                .map_err(|e| CliError::input(e.to_string()))?;
            (h, output)
        }
    };
    let mut out = Vec::new();
    write_hyperedge_list(&mut out, &h, &LabelMap::identity(h.num_nodes()))
        .map_err(|e| io_error(None, e))?;
    emit(output.as_deref(), &out)?;
    Ok(0)
}

fn cmd_oracle(args: &OracleArgs) -> Result<u8, CliError> {
    let (h, _) = load_input(&args.input)?;
    let opts = SolverOptions::default()
        .with_tol(1e-12)
        .with_max_iter(100_000);
    let sol = npm_solve(&h, &CentralityModel::linear(), &opts)?;
    let nodes =
        dense_perron(&linear_node_matrix(&h)).map_err(|e| CliError::input(e.to_string()))?;
    let edges =
        dense_perron(&linear_edge_matrix(&h)).map_err(|e| CliError::input(e.to_string()))?;
    let dist = |a: &[f64], b: &[f64]| {
        let na = a.iter().map(|t| t * t).sum::<f64>().sqrt();
        a.iter()
            .zip(b)
            .map(|(s, t)| (s / na - t).abs())
            .fold(0.0, f64::max)
    };

    let mut report = serde_json::json!({
        "linear": {
            "converged": sol.converged,
            "iterations": sol.iterations,
            "node_distance": dist(&sol.x, &nodes.vector),
            "edge_distance": dist(&sol.y, &edges.vector),
            "node_perron": nodes,
            "edge_perron": edges,
        }
    });
    if h.uniform_size().is_some() && h.has_unit_node_weights() {
        let model = CentralityModel::log_exp(args.p).map_err(|e| CliError::input(e.to_string()))?;
        let tensor = match npm_solve(&h, &model, &opts) {
            Ok(le) => serde_json::json!({
                "converged": le.converged,
                "iterations": le.iterations,
                "residual": tensor_z_residual(&h, &le.x, args.p).ok(),
            }),
            Err(e) => serde_json::json!({ "error": e.to_string() }),
        };
        report["tensor"] = tensor;
    }
    let mut text = serde_json::to_string_pretty(&report).expect("oracle report serializes");
    text.push('\n');
    emit(args.output.as_deref(), text.as_bytes())?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Scatter(a) => cmd_scatter(a),
        Command::Generate { kind } => cmd_generate(kind),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let json = std::env::args().any(|a| a == "--json-errors");
            if json {
                let msg = serde_json::json!({ "error": "usage", "code": EXIT_INPUT, "message": e.to_string() });
                eprintln!("{msg}");
            } else {
                let _ = e.print();
            }
            return ExitCode::from(EXIT_INPUT);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            if cli.json_errors {
                let msg = serde_json::json!({ "error": err.kind, "code": err.code, "message": err.message });
                eprintln!("{msg}");
            } else {
                eprintln!("error: {}", err.message);
            }
            ExitCode::from(err.code)
        }
    }
}
