mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use balanced_jdm::enumerate::DEFAULT_BFS_CAP;
use balanced_jdm::pipeline::DEFAULT_MATRIX_CAP;
use balanced_jdm::spectra::DEFAULT_EXACT_CAP;

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_NOT_GRAPHICAL: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

/// Balanced joint-degree-matrix realizations: construction, sampling and exact chain analysis.
#[derive(Debug, Parser)]
#[command(name = "jdm", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Include wall-clock time in the manifest (outputs are then no longer byte-stable).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theta {
    /// `2 J_ii / n_i` on the diagonal.
    Consistent,
    /// `J_ii / n_i` on the diagonal.
    Literal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graphicality report, class sizes and the average-degree table.
    Check {
        jdm: PathBuf,
        #[arg(long, value_enum, default_value_t = Theta::Consistent)]
        theta: Theta,
    },
    /// Deterministic balanced realization.
    Construct {
        jdm: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the restricted-swap chain and write thinned samples.
    Sample(SampleArgs),
    /// List every balanced realization.
    Enumerate {
        jdm: PathBuf,
        /// Use the backtracking oracle instead of the chain BFS.
        #[arg(long)]
        brute_force: bool,
        #[arg(long, default_value_t = DEFAULT_BFS_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrum, conductance and bounds of the enumerated chain.
    Analyze(AnalyzeArgs),
    /// Run every check on one instance; exit 1 on any violation.
    Verify(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub jdm: PathBuf,
    #[arg(long)]
    pub steps: u64,
    #[arg(long, default_value_t = 0)]
    pub burnin: u64,
    #[arg(long, default_value_t = 1)]
    pub thin: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Start from this realization instead of the constructed one.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Directory for numbered realization files and manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub jdm: PathBuf,
    #[arg(long, env = "JDM_EXACT_CAP", default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
    #[arg(long, default_value_t = DEFAULT_BFS_CAP)]
    pub cap: usize,
    #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
    pub matrix_cap: usize,
    /// Total-variation curve from state START for T_MAX steps.
    #[arg(long, num_args = 2, value_names = ["START", "T_MAX"])]
    pub tv: Option<Vec<usize>>,
    /// CSV destination for the TV curve.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
