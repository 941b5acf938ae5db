//! Command-line front end for the `adgreedy` library.
//!
//! Exit codes: `0` when a command runs to completion, `1` on runtime
//! failures (I/O, solver errors, a failed equivalence check), `2` on usage
//! errors (bad flags or values outside a module's preconditions).

mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{gain_percent, format_gain};

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "adgreedy", version, about = "Alternating-direction greedy sparse recovery")]
#[command(args_override_self = true)]
pub struct Cli {
    /// TOML file whose keys mirror the flags; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one seeded random instance and print the result as JSON.
    Solve(SolveArgs),
    /// Sweep sparsity levels and write exact-recovery rates to a report.
    Curve(CurveArgs),
    /// Print critical sparsities and relative gains between algorithm pairs.
    Critical(CriticalArgs),
    /// Check the recursion-free ADMM and IAD updates against their recursions.
    Equivalence(EquivalenceArgs),
    /// Evaluate convergence constants and error bounds.
    Theory(TheoryArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// One of iht, niht, htp, iad, niad, adp.
    #[arg(long)]
    pub algorithm: String,
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Sparsity of the signal and of the iterates.
    #[arg(long)]
    pub s: usize,
    /// Step size for iht and iad.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Memory parameter for iad, niad and adp.
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// cars or gaussian.
    #[arg(long, default_value = "gaussian")]
    pub signal: String,
    #[arg(long, default_value_t = 400)]
    pub max_iters: usize,
    /// Relative residual at which the solver stops.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

/// Sweep settings shared by `curve` and `critical`.
#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma list; iht and iad take a step size suffix such as iht:0.333333.
    #[arg(long, default_value = "iht:1,iad:1,iht:0.333333,iad:0.333333,niht,niad,htp,adp")]
    pub algorithms: String,
    #[arg(long, default_value_t = 1)]
    pub s_min: usize,
    #[arg(long, default_value_t = 60)]
    pub s_max: usize,
    /// Trials per sparsity level.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// cars or gaussian.
    #[arg(long, default_value = "cars")]
    pub signal: String,
    #[arg(long, default_value_t = 400)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Stop an algorithm's sweep after the first sparsity whose rate is below this.
    #[arg(long)]
    pub stop_below: Option<f64>,
    /// Worker threads [default: all available cores].
    #[arg(long, env = "ADGREEDY_THREADS")]
    pub threads: Option<usize>,
    /// Suppress progress lines on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Report file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    pub format: String,
    /// Reuse curves already present in an existing JSON report with the same settings.
    #[arg(long)]
    pub resume: bool,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    /// Existing CSV or JSON report; without it a sweep is run.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Comma list of old/new pairs.
    #[arg(long, default_value = "iht:1/iad:1,iht:0.333333/iad:0.333333,niht/niad,htp/adp")]
    pub pairs: String,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Args)]
pub struct EquivalenceArgs {
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    /// Sparsity of the test signals and of the IAD iterates.
    #[arg(long, default_value_t = 3)]
    pub s: usize,
    /// Magnitude scale of the signal nonzeros.
    #[arg(long, default_value_t = 3.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 8)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    /// Largest deviation accepted on conclusive runs.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// iad, niad or adp.
    #[arg(long)]
    pub algorithm: String,
    /// Restricted isometry constant of order 3s, in [0, 1).
    #[arg(long)]
    pub delta3s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    /// Iteration at which to evaluate the error bound (k >= 2).
    #[arg(long)]
    pub k: Option<usize>,
    /// Start error ||x(0) - x||.
    #[arg(long)]
    pub x0_err: Option<f64>,
    /// Noise norm ||e'||.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Smallest nonzero magnitude of the signal; enables the iteration count.
    #[arg(long)]
    pub x_min: Option<f64>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Output goes to `out`, progress and
/// diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::merge_config_args(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                }
                CliError::Runtime(inner) => {
                    let _ = writeln!(err, "error: {inner:#}");
                }
            }
            e.exit_code()
        }
    }
}
