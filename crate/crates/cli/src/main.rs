//! `pinvkit`: batch front end for the pinvkit-core pseudoinverse routines.
//!
//! Exit codes: 0 verified, 1 unreadable input or bad arguments, 2 a
//! residual check failed, 3 a precondition of the chosen method failed.

mod commands;
mod files;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use pinvkit_core::io::parse_complex;
use pinvkit_core::tolerance::UNIT_ROUNDOFF;
use pinvkit_core::{Tolerance, C64};

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Residual(String),
    Precondition(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Residual(_) => 2,
            CliError::Precondition(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) | CliError::Residual(m) | CliError::Precondition(m) => f.write_str(m),
        }
    }
}

impl From<pinvkit_core::Error> for CliError {
    fn from(e: pinvkit_core::Error) -> Self {
        use pinvkit_core::Error as E;
        match e {
            E::Parse(_) | E::NonFinite { .. } | E::InvalidShape { .. } => CliError::Parse(e.to_string()),
            E::Invariant(_) => CliError::Residual(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

fn complex_arg(s: &str) -> Result<C64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "pinvkit", version, about = "Structured Moore-Penrose pseudoinverses with self-verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Relative singular-value cutoff (default: machine epsilon).
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,

    /// Absolute residual bound, scaled by max(1, ‖A‖_F) where applicable.
    #[arg(long, global = true, env = "PINVKIT_TOL_RESIDUAL")]
    pub tol_residual: Option<f64>,

    /// Output file (for `gen`, a directory). Without it the result goes to
    /// stdout and the report to stderr.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Human-readable report instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pseudoinverse of a matrix file (JSON or CSV).
    Pinv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = PinvMethod::Svd)]
        method: PinvMethod,
        /// Complementary matrix B for `--method pair`.
        #[arg(long)]
        aux: Option<PathBuf>,
    },
    /// Pseudoinverse of a circulant given by its first row.
    Circ {
        /// Comma-separated complex literals, e.g. "1,-1+2i,0".
        #[arg(long, allow_hyphen_values = true)]
        gen: Option<String>,
        /// Circulant JSON file `{"n", "gen"}` or a generator line.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CircMethod::Spectral)]
        method: CircMethod,
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        alpha: Option<C64>,
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        beta: Option<C64>,
        /// two-term: 1-based position of alpha; block: run length.
        #[arg(long)]
        k: Option<usize>,
        /// block: number of repetitions.
        #[arg(long)]
        q: Option<usize>,
        /// two-term without a generator: matrix order.
        #[arg(long)]
        n: Option<usize>,
        /// Write the full pseudoinverse matrix instead of its generator.
        #[arg(long)]
        materialize: bool,
    },
    /// Distance-matrix pseudoinverse of a zero-weight-sum tree (edge CSV `i,j,w`).
    Tree {
        #[arg(long)]
        input: PathBuf,
        /// Rank-one completion weight; defaults to 2/(τᵗLτ) or 1.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
    },
    /// Distance-matrix pseudoinverse of the odd wheel on n vertices.
    Wheel {
        #[arg(long)]
        n: usize,
    },
    /// Penrose and characterization residuals of a candidate X for A.
    Verify {
        /// Matrix A.
        #[arg(long)]
        input: PathBuf,
        /// Candidate pseudoinverse X.
        #[arg(long)]
        aux: PathBuf,
    },
    /// Write seeded test instances into the `--output` directory.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// sum-family: number of members.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Member ranks for sum-family and rank-additive-pair.
        #[arg(long, value_delimiter = ',')]
        ranks: Vec<usize>,
        /// random-matrix: rank of a low-rank product.
        #[arg(long)]
        rank: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PinvMethod {
    Svd,
    Normal,
    RankCompletion,
    Pair,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircMethod {
    Spectral,
    TwoTerm,
    ZeroSum,
    Block,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    SumFamily,
    ZeroSumTree,
    RankAdditivePair,
    RandomMatrix,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let start = Instant::now();
    let tol = Tolerance::new(
        cli.tol_rank.unwrap_or(UNIT_ROUNDOFF),
        cli.tol_residual.unwrap_or(Tolerance::default().residual_abs),
    )
    .map_err(|e| CliError::Parse(e.to_string()))?;

    let mut outcome = commands::dispatch(&cli, &tol)?;
    let product_on_stdout = match (&outcome.product, &cli.output) {
        (Some(text), Some(path)) => {
            files::write_atomic(path, text, &mut outcome.report.outputs)?;
            false
        }
        (Some(text), None) => {
            print!("{text}");
            true
        }
        (None, _) => false,
    };
    outcome.report.wall_time = start.elapsed();
    let rendered = if cli.pretty {
        outcome.report.to_table()
    } else {
        report::render(&outcome.report.to_value(), false)
    };
    if product_on_stdout {
        eprint!("{rendered}");
    } else {
        print!("{rendered}");
    }
    Ok(if outcome.report.pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
