//! Command-line front end for jetcalc model files.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
pub mod model;
pub mod report;

pub use model::{parse_model, ModelFile};
pub use report::{NamedExpr, Report, Residual};

#[derive(Debug)]
pub enum CliError {
    Core(jetcalc::Error),
    Model { line: usize, msg: String },
    Io { path: PathBuf, msg: String },
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Model { line: 0, msg } => write!(f, "model: {msg}"),
            CliError::Model { line, msg } => write!(f, "model line {line}: {msg}"),
            CliError::Io { path, msg } => write!(f, "cannot read {}: {msg}", path.display()),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<jetcalc::Error> for CliError {
    fn from(e: jetcalc::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "jetcalc",
    version,
    about = "Exact variational calculus on jet bundles"
)]
pub struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for the parallel checks (default 1).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FormArgs {
    /// Form degree; defaults to the command's natural degree.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Coefficients on dx^I for increasing I in lexicographic order.
    #[arg(required = true)]
    pub coeffs: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Euler operator components of a density.
    Euler { model: PathBuf, expr: String },
    /// Horizontal differential of a form (a function by default).
    Dh {
        model: PathBuf,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Total derivative along one base direction.
    Td {
        model: PathBuf,
        direction: String,
        expr: String,
    },
    /// Bracket density omega^{ab} E_a(P) E_b(Q).
    L2 {
        model: PathBuf,
        p: String,
        q: String,
    },
    /// l3 of three densities (n = 1).
    L3 {
        model: PathBuf,
        p: String,
        q: String,
        r: String,
    },
    /// Jacobiator density of three densities.
    Jacobiator {
        model: PathBuf,
        p: String,
        q: String,
        r: String,
    },
    /// Solve D_x g = h (n = 1).
    InvertDx { model: PathBuf, expr: String },
    /// Average a form (a density by default) over a finite group.
    Average {
        model: PathBuf,
        group: String,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Verification checks; exit status 1 when a check fails.
    #[command(subcommand)]
    Check(Check),
}

#[derive(Debug, Subcommand)]
pub enum Check {
    /// Cyclic Poisson-tensor condition on omega.
    Poisson { model: PathBuf },
    /// Covariance of omega under an automorphism.
    Covariance { model: PathBuf, auto: String },
    /// The induced map preserves the bracket of P and Q up to a divergence.
    Canonical {
        model: PathBuf,
        auto: String,
        p: String,
        q: String,
    },
    /// A form (a density by default) is fixed by every group element.
    Invariance {
        model: PathBuf,
        group: String,
        #[command(flatten)]
        form: FormArgs,
    },
    /// The bracket of two invariant densities is invariant.
    Closure {
        model: PathBuf,
        group: String,
        p: String,
        q: String,
    },
    /// sh-Lie relations on explicit triples, or on seeded random samples.
    Shlie {
        model: PathBuf,
        /// Explicit densities, taken three at a time.
        triples: Vec<String>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Transformation law of the Euler operator under an automorphism.
    ElTransform {
        model: PathBuf,
        auto: String,
        p: String,
    },
    /// Pullback commutes with d_H on a form (a function by default).
    Commute {
        model: PathBuf,
        auto: String,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Euler operators of the sigma-model Lagrangian.
    SigmaEuler { model: PathBuf },
    /// Gauge covariance and Lagrangian invariance for an orthogonal matrix.
    SigmaInvariance {
        model: PathBuf,
        /// Rational orthogonal matrix, e.g. "[[3/5,-4/5,0],[4/5,3/5,0],[0,0,1]]".
        #[arg(long)]
        matrix: String,
    },
}

/// Exit status and captured output streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let threads = cli.jobs.unwrap_or(1).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => return error_outcome(CliError::Usage(e.to_string())),
    };
    match pool.install(|| commands::dispatch(&cli.command)) {
        Ok(report) => Outcome {
            code: report.exit_code(),
            stdout: if cli.json {
                report.to_json()
            } else {
                report.to_text()
            },
            stderr: String::new(),
        },
        Err(e) => error_outcome(e),
    }
}

fn error_outcome(e: CliError) -> Outcome {
    Outcome {
        code: 2,
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    }
}
