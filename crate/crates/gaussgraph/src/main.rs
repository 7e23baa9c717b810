use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gaussgraph::commands::{self, CmdError, Output, Settings};
use gaussgraph::export::{Format, DEFAULT_EDGE_THRESHOLD};

#[derive(Parser)]
#[command(
    name = "gaussgraph",
    version,
    about = "Graph diagnostics and GLU reduction for pure Gaussian states"
)]
struct Cli {
    /// Purity tolerance for input states and success tolerance of the reducer.
    #[arg(long, global = true, env = "GAUSSGRAPH_TOL", default_value_t = 1e-8)]
    tol: f64,
    /// Worker threads when several input files are given.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the vacuum through a circuit file and write the state.
    Build {
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Read squeeze parameters as dB of quadrature variance, r = dB·ln10/20.
        #[arg(long)]
        db: bool,
    },
    /// Export the complex graph Z = V + iU of a state.
    Graph {
        state: PathBuf,
        #[arg(long, default_value = "dot")]
        format: Format,
        /// Entries at or below this magnitude are not drawn.
        #[arg(long, default_value_t = DEFAULT_EDGE_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report determinants, the irreducibility criterion and PPT eigenvalues.
    Diagnose {
        #[arg(required = true)]
        states: Vec<PathBuf>,
    },
    /// Search for GLUs that make U diagonal; writes <stem>.reduced.json and <stem>.glus.json.
    Reduce {
        #[arg(required = true)]
        states: Vec<PathBuf>,
        /// Directory for output files (defaults to each input's directory).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 4096)]
        max_branches: usize,
    },
    /// Check that a GLU file diagonalises U without changing block determinants.
    Verify { state: PathBuf, glus: PathBuf },
}

fn run(cli: Cli) -> Result<Output, CmdError> {
    let settings = Settings {
        tol: cli.tol,
        jobs: cli.jobs,
        ..Settings::default()
    };
    match cli.command {
        Command::Build { circuit, out, db } => commands::build(&circuit, out.as_deref(), db),
        Command::Graph {
            state,
            format,
            threshold,
            out,
        } => commands::graph(&state, format, threshold, out.as_deref(), settings.tol),
        Command::Diagnose { states } => commands::diagnose(&states, &settings),
        Command::Reduce {
            states,
            out,
            max_branches,
        } => commands::reduce_files(
            &states,
            out.as_deref(),
            &Settings {
                max_branches,
                ..settings
            },
        ),
        Command::Verify { state, glus } => commands::verify(&state, &glus, &settings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            if out.code == gaussgraph::report::EXIT_VERIFY {
                if let Some(name) = serde_json::from_str::<serde_json::Value>(&out.stdout)
                    .ok()
                    .and_then(|v| v["violation"].as_str().map(String::from))
                {
                    eprintln!("error: invariant `{name}` violated");
                }
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
