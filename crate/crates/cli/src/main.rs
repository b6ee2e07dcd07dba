use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use decay_cli::check::{flipped_binomial_sign_farness, run_check, CheckOptions, FarnessFn};
use decay_cli::commands::{self, grid_from, open_output, OutputFormat};
use decay_cli::config::{ConfigFile, SimulateConfig, SimulateOverrides};
use decay_cli::error::{EXIT_OK, EXIT_USAGE};
use decay_cli::io::{read_graph, GraphFormat};
use decay_cli::{CliError, CliResult};
use decay_core::centrality::higher_order_farness;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "decaycent", version = commands::version(), about = "Decay, degree and closeness centrality on undirected graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-node degree, farness, closeness and decay centrality.
    Compute(ComputeArgs),
    /// Every comparator and sufficient-condition checker for one node pair.
    Compare(CompareArgs),
    /// Monte-Carlo experiment on connected G(n,p) graphs.
    Simulate(SimulateArgs),
    /// Randomized self-check of the library against brute-force oracles.
    Check(CheckArgs),
}

#[derive(Args, Serialize)]
struct GraphInput {
    /// Graph file: edge list (`n m`, then `u v` lines) or JSON (`{"n", "edges"}`).
    graph: PathBuf,
    /// File format; inferred from the extension when omitted.
    #[arg(long = "graph-format", value_enum)]
    #[serde(skip)]
    graph_format: Option<GraphFormat>,
}

#[derive(Args, Serialize)]
struct ComputeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: GraphInput,
    /// Decay parameters, comma separated, each in (0, 1).
    #[arg(long, value_delimiter = ',', conflicts_with = "grid_points")]
    delta: Option<Vec<f64>>,
    /// Evenly spaced grid of k/(points+1); default 99 points.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Report format.
    #[arg(long, value_enum, default_value = "csv")]
    #[serde(skip)]
    format: OutputFormat,
    /// Include distance profiles and higher-order farness/closeness (JSON).
    #[arg(long)]
    full: bool,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CompareArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: GraphInput,
    /// First node (0-based).
    #[arg(long)]
    i: usize,
    /// Second node (0-based).
    #[arg(long)]
    j: usize,
    /// Points of the sampled decay-difference curve.
    #[arg(long, default_value_t = 99)]
    curve_points: usize,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// `key = value` file with any of: n, p, trials, seed, max_rejects,
    /// grid_points, workers, out_dir. Flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of nodes.
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability in (0, 1].
    #[arg(long)]
    p: Option<f64>,
    /// Number of trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed; required (flag or config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size; the grid is k/(points+1). Default 99.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Output directory for records.csv, aggregate.csv and summary.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads. Results do not depend on this. Default 1.
    #[arg(long)]
    workers: Option<usize>,
    /// Disconnected draws allowed per trial before it is reported as failed.
    #[arg(long)]
    max_rejects: Option<u64>,
}

#[derive(Args)]
struct CheckArgs {
    /// Largest graph size; sizes cycle through min(5, n-max)..=n-max.
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    /// Number of random connected graphs.
    #[arg(long, default_value_t = 200)]
    graphs: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Swap in a known-faulty farness computation to exercise the suite.
    #[arg(long, hide = true, value_parser = ["flip-binomial-sign"])]
    mutant: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Echo<'a, T: Serialize> {
    command: &'static str,
    #[serde(flatten)]
    args: &'a T,
    graph_format: Option<&'static str>,
}

fn format_name(f: Option<GraphFormat>) -> Option<&'static str> {
    f.map(|f| match f {
        GraphFormat::EdgeList => "edge-list",
        GraphFormat::Json => "json",
    })
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compute(args) => {
            let grid = grid_from(args.delta.clone(), args.grid_points)?;
            let g = read_graph(&args.input.graph, args.input.graph_format)?;
            let echo = Echo {
                command: "compute",
                args: &args,
                graph_format: format_name(args.input.graph_format),
            };
            let mut out = open_output(args.out.as_deref())?;
            commands::compute(&g, &grid, args.format, args.full, &echo, &mut out)?;
            out.flush().map_err(|e| CliError::io("<output>", e))
        }
        Command::Compare(args) => {
            let grid = grid_from(None, Some(args.curve_points))?;
            let g = read_graph(&args.input.graph, args.input.graph_format)?;
            let echo = Echo {
                command: "compare",
                args: &args,
                graph_format: format_name(args.input.graph_format),
            };
            let mut out = open_output(args.out.as_deref())?;
            commands::compare(&g, args.i, args.j, &grid, &echo, &mut out)?;
            out.flush().map_err(|e| CliError::io("<output>", e))
        }
        Command::Simulate(args) => {
            let file = match &args.config {
                Some(path) => ConfigFile::load(path)?,
                None => ConfigFile::default(),
            };
            let config = SimulateConfig::resolve(
                SimulateOverrides {
                    n: args.n,
                    p: args.p,
                    trials: args.trials,
                    seed: args.seed,
                    max_rejects: args.max_rejects,
                    grid_points: args.grid_points,
                    workers: args.workers,
                    out_dir: args.out_dir,
                },
                &file,
            )?;
            let outcome = commands::simulate(&config)?;
            let s = &outcome.summary;
            eprintln!(
                "{} of {} trials completed; wrote {}",
                s.trials_completed,
                s.trials_requested,
                outcome
                    .files
                    .iter()
                    .map(|p| p.display().to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            if !outcome.failures.is_empty() {
                eprintln!(
                    "{} trials exceeded max_rejects = {} and were excluded (see summary.json)",
                    outcome.failures.len(),
                    config.max_rejects
                );
            }
            if s.trials_completed == 0 && s.trials_requested > 0 {
                return Err(CliError::Data("no trial produced a connected graph".into()));
            }
            Ok(())
        }
        Command::Check(args) => {
            let farness: FarnessFn = match args.mutant.as_deref() {
                Some("flip-binomial-sign") => flipped_binomial_sign_farness,
                _ => higher_order_farness,
            };
            let opts = CheckOptions {
                n_max: args.n_max,
                graphs: args.graphs,
                seed: args.seed,
                mutant: args.mutant.clone(),
            };
            let report = run_check(&opts, farness)?;
            #[derive(Serialize)]
            struct CheckFile<'a> {
                version: &'static str,
                command: &'static str,
                config: &'a CheckOptions,
                conventions: commands::Conventions,
                passed: bool,
                #[serde(flatten)]
                report: &'a decay_cli::check::CheckReport,
            }
            let mut out = open_output(args.out.as_deref())?;
            serde_json::to_writer_pretty(
                &mut out,
                &CheckFile {
                    version: commands::version(),
                    command: "check",
                    config: &opts,
                    conventions: commands::CONVENTIONS,
                    passed: report.failures() == 0,
                    report: &report,
                },
            )?;
            writeln!(out)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<output>", e))?;
            for p in report.properties.iter().filter(|p| !p.passed) {
                eprintln!("FAILED {} ({} cases)", p.name, p.cases);
            }
            match report.failures() {
                0 => Ok(()),
                k => Err(CliError::CheckFailed(k)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK } as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
