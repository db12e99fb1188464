//! Thin command-line front end over the library. Each subcommand loads or
//! generates a graph set, runs one library operation, and emits versioned
//! JSON to stdout or `--output`.
//!
//! Exit codes: 0 success, 2 input/validation error, 3 solver non-convergence.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use graphdist::error::Error;
use graphdist::graphs::{generate_graph, load_graph_set, GraphModel, GraphSet};
use graphdist::linalg::NormKind;
use graphdist::metriclab::{
    check_n_metric_axioms, estimate_c_constant, estimate_diameter, DistanceMethod, PairwiseMethod,
};
use graphdist::multidist::{
    fermat_bruteforce, fermat_spectral, galign_bruteforce, galign_spectral, CenterSpace,
    MultiDistanceResult, Witness,
};
use graphdist::pscore::{sb_distance_exact, sb_distance_relaxed, Alignment, BiasMatrix};
use graphdist::relax::{d_cg, d_scg, SolverConfig};

#[derive(Parser)]
#[command(name = "graphdist", version, about = "Multi-graph distance toolkit")]
struct Cli {
    /// Worker threads for parallel trials (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Primal and dual residual tolerance for the splitting solvers.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    #[arg(long, default_value_t = 20_000)]
    max_iter: usize,

    /// Initial penalty parameter.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            rho: self.rho,
            tol_primal: self.tol,
            tol_dual: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise alignment distance between two graphs of a set.
    Dist {
        #[arg(long)]
        input: PathBuf,
        /// Two comma-separated graph indices, e.g. `0,1`.
        #[arg(long)]
        pair: String,
        /// `exact` (brute force) or `relaxed` (doubly stochastic splitting).
        #[arg(long, default_value = "exact")]
        method: String,
        #[arg(long, default_value = "frobenius")]
        norm: String,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Multi-way distance over the whole set.
    Multidist {
        #[arg(long)]
        input: PathBuf,
        /// One of: galign-bruteforce, galign-spectral, fermat-spectral,
        /// fermat-bruteforce, scg, cg.
        #[arg(long)]
        method: String,
        #[arg(long, default_value = "frobenius")]
        norm: String,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Randomized metric-axiom suite for one distance method.
    Props {
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Per-inequality tolerance.
        #[arg(long = "check-tol", default_value_t = 1e-8)]
        check_tol: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Empirical best constant for the scaled triangle inequality.
    Cprop {
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Exact and sampled diameter of a graph set.
    Diameter {
        #[arg(long)]
        input: PathBuf,
        /// `spectral` or `exact`.
        #[arg(long, default_value = "spectral")]
        method: String,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a random graph set and write it as a set file.
    Gen {
        /// One of: erdos-renyi, barabasi-albert, power-law-tree, regular,
        /// small-world, empty, complete, path, cycle, star.
        #[arg(long)]
        model: String,
        #[arg(long)]
        m: usize,
        /// Number of graphs.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Comma-separated model parameters, e.g. `p=0.3` or `k=2,p=0.1`.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let output = cli.output.clone();
    match run(cli.command) {
        Ok(value) => {
            let text = serde_json::to_string_pretty(&value).expect("JSON serialization");
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text + "\n") {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => println!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NonConvergence { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<Value, Error> {
    match command {
        Command::Dist {
            input,
            pair,
            method,
            norm,
            solver,
        } => cmd_dist(&input, &pair, &method, &norm, &solver.config()),
        Command::Multidist {
            input,
            method,
            norm,
            solver,
        } => cmd_multidist(&input, &method, &norm, &solver.config()),
        Command::Props {
            method,
            n,
            m,
            trials,
            check_tol,
            solver,
        } => {
            let method: DistanceMethod = method.parse()?;
            let report =
                check_n_metric_axioms(method, n, m, trials, solver.seed, check_tol, &solver.config())?;
            Ok(json!({
                "schema": 1,
                "command": "props",
                "report": report,
            }))
        }
        Command::Cprop {
            method,
            n,
            m,
            trials,
            solver,
        } => {
            let method: DistanceMethod = method.parse()?;
            let estimate = estimate_c_constant(method, n, m, trials, solver.seed, &solver.config())?;
            Ok(json!({
                "schema": 1,
                "command": "cprop",
                "estimate": estimate,
            }))
        }
        Command::Diameter {
            input,
            method,
            budget,
            seed,
        } => {
            let gs = load_graph_set(&input)?;
            let method: PairwiseMethod = method.parse()?;
            let estimate = estimate_diameter(&gs, method, budget, seed)?;
            Ok(json!({
                "schema": 1,
                "command": "diameter",
                "estimate": estimate,
            }))
        }
        Command::Gen {
            model,
            m,
            count,
            params,
            seed,
        } => {
            let model: GraphModel = model.parse()?;
            let params = parse_params(&params)?;
            let graphs = (0..count)
                .map(|k| generate_graph(model, m, &params, seed.wrapping_add(k as u64)))
                .collect::<Result<Vec<_>, _>>()?;
            let gs = GraphSet::from_graphs(graphs)?;
            let text = graphdist::graphs::graph_set_to_json(&gs)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn cmd_dist(
    input: &PathBuf,
    pair: &str,
    method: &str,
    norm: &str,
    cfg: &SolverConfig,
) -> Result<Value, Error> {
    let gs = load_graph_set(input)?;
    let (i, j) = parse_pair(pair)?;
    let a = gs.get(i)?;
    let b = gs.get(j)?;
    let norm: NormKind = norm.parse()?;
    let bias = BiasMatrix::zero(gs.node_count());
    let (value, alignment) = match method {
        "exact" => sb_distance_exact(a, b, &bias, norm)?,
        "relaxed" => sb_distance_relaxed(a, b, &bias, norm, cfg)?,
        other => {
            return Err(Error::InvalidParams(format!(
                "unknown pairwise method '{other}' (expected exact or relaxed)"
            )))
        }
    };
    Ok(json!({
        "schema": 1,
        "command": "dist",
        "method": method,
        "pair": [i, j],
        "value": value,
        "alignment": matrix_rows(alignment.matrix()),
    }))
}

fn cmd_multidist(
    input: &PathBuf,
    method: &str,
    norm: &str,
    cfg: &SolverConfig,
) -> Result<Value, Error> {
    let gs = load_graph_set(input)?;
    let norm: NormKind = norm.parse()?;
    let method: DistanceMethod = method.parse()?;
    match method {
        DistanceMethod::Scg | DistanceMethod::Cg => {
            let result = if method == DistanceMethod::Scg {
                d_scg(&gs, norm, cfg)?
            } else {
                d_cg(&gs, norm, cfg)?
            };
            Ok(json!({
                "schema": 1,
                "command": "multidist",
                "method": method,
                "value": result.value,
                "diagnostics": {
                    "iterations": result.diagnostics.iterations,
                    "primal_residual": result.diagnostics.primal_residual,
                    "dual_residual": result.diagnostics.dual_residual,
                    "min_eigenvalue": result.diagnostics.min_eigenvalue,
                    "nuclear_norm": result.diagnostics.nuclear_norm,
                    "converged": result.diagnostics.converged,
                },
            }))
        }
        DistanceMethod::GalignBruteforce => {
            multidist_json(method, galign_bruteforce(&gs, norm)?)
        }
        DistanceMethod::GalignSpectral => multidist_json(method, galign_spectral(&gs)?),
        DistanceMethod::FermatSpectral => multidist_json(method, fermat_spectral(&gs, 1e-10)?),
        DistanceMethod::FermatBruteforce => {
            multidist_json(method, fermat_bruteforce(&gs, CenterSpace::BinaryGraphs, norm)?)
        }
    }
}

fn multidist_json(method: DistanceMethod, result: MultiDistanceResult) -> Result<Value, Error> {
    let witness = match &result.witness {
        None => Value::Null,
        Some(Witness::Tuple(t)) => json!({
            "kind": "tuple",
            "q_factors": t.q_factors().iter().map(alignment_rows).collect::<Vec<_>>(),
        }),
        Some(Witness::Center {
            center, alignments, ..
        }) => json!({
            "kind": "center",
            "center": matrix_rows(center.entries()),
            "alignments": alignments.iter().map(alignment_rows).collect::<Vec<_>>(),
        }),
    };
    Ok(json!({
        "schema": 1,
        "command": "multidist",
        "method": method,
        "value": result.value,
        "witness": witness,
    }))
}

fn alignment_rows(a: &Alignment) -> Vec<Vec<f64>> {
    matrix_rows(a.matrix())
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn parse_pair(text: &str) -> Result<(usize, usize), Error> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidParams(format!(
            "expected two comma-separated indices, got '{text}'"
        )));
    }
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidParams(format!("invalid index '{s}'")))
    };
    Ok((parse(parts[0])?, parse(parts[1])?))
}

fn parse_params(text: &str) -> Result<BTreeMap<String, f64>, Error> {
    let mut params = BTreeMap::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidParams(format!("expected key=value, got '{item}'")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("invalid number '{value}'")))?;
        params.insert(key.trim().to_string(), value);
    }
    Ok(params)
}
