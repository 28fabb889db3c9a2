//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime or solver failure (including a failed
//! `verify`), 2 usage error.

mod commands;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::ScsError;

pub use verify::{run_verify, VerifyOutcome, VerifyRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "snapcs", version, about = "Snapshot compressive sensing experiments")]
pub struct Cli {
    /// Worker threads; 1 runs everything serially.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate masks and a (noisy) snapshot measurement of a video.
    Simulate(SimulateArgs),
    /// Reconstruct a video from masks and a measurement.
    Recover(RecoverArgs),
    /// Compare a reconstruction with ground truth.
    Evaluate(EvaluateArgs),
    /// Run a Monte Carlo bound check and write its report.
    Verify(VerifyArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhantomName {
    #[value(alias = "moving_square")]
    MovingSquare,
    #[value(alias = "shifting_sparse")]
    ShiftingSparse,
    Constant,
    /// A codeword of the toy code (see the --toy-* flags).
    Toy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaskName {
    Gaussian,
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodecName {
    Toy,
    Dct3d,
    Nls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverName {
    Pgd,
    Gap,
    Csp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitName {
    Zero,
    Backprojection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Psi2,
    Bernstein,
    CspEvents,
    CspNoisy,
    Contraction,
    CorollaryB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IterativeSolver {
    Pgd,
    Gap,
}

/// The enumerable quantized sparse code: `k` non-zeros per frame at
/// `2^bits` levels on `[−ρ/2, ρ/2]`, frame permutations drawn from the seed.
#[derive(Debug, Clone, Args)]
pub struct ToyArgs {
    #[arg(long, default_value_t = 1)]
    pub toy_k: usize,
    #[arg(long, default_value_t = 2)]
    pub toy_bits: u32,
    #[arg(long, default_value_t = 2.0)]
    pub toy_rho: f64,
    #[arg(long, default_value_t = 0)]
    pub toy_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub phantom: Option<PhantomName>,
    /// SCSX file, PGM file, directory of PGMs or a glob.
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long, value_enum, default_value_t = MaskName::Gaussian)]
    pub mask: MaskName,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Square edge of the moving-square phantom.
    #[arg(long, default_value_t = 8)]
    pub square_size: usize,
    /// Pixels the square moves per frame.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Non-zeros per frame of the shifting-sparse phantom.
    #[arg(long, default_value_t = 4)]
    pub sparsity: usize,
    /// Constant level, or the square brightness (default 0.5 and 1).
    #[arg(long)]
    pub value: Option<f64>,
    #[command(flatten)]
    pub toy: ToyArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RecoverArgs {
    #[arg(long)]
    pub masks: PathBuf,
    #[arg(long)]
    pub measurement: PathBuf,
    #[arg(long, value_enum, default_value_t = CodecName::Nls)]
    pub codec: CodecName,
    #[arg(long, value_enum, default_value_t = SolverName::Gap)]
    pub solver: SolverName,
    /// Step size; defaults to 2/B for pgd and 2 for gap.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Line-search the step at every iteration.
    #[arg(long)]
    pub adaptive: bool,
    #[arg(long, default_value_t = crate::solvers::DEFAULT_MAX_ITERS)]
    pub iters: usize,
    /// Stop once the residual norm drops to this value.
    #[arg(long, default_value_t = crate::solvers::DEFAULT_RESIDUAL_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = InitName::Zero)]
    pub init: InitName,
    /// Ground truth (SCSX) for error traces and PSNR.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub dct_block: usize,
    #[arg(long, default_value_t = 0.125)]
    pub keep_fraction: f64,
    #[arg(long, default_value_t = 8)]
    pub nls_block: usize,
    #[arg(long, default_value_t = 4)]
    pub nls_stride: usize,
    #[arg(long, default_value_t = 16)]
    pub nls_group: usize,
    #[arg(long, default_value_t = 20)]
    pub nls_window: usize,
    /// Coefficients kept per group (default p_x·p_y·B).
    #[arg(long)]
    pub nls_keep: Option<usize>,
    /// Also save the NLS code of the reconstruction as SCSC.
    #[arg(long)]
    pub save_code: bool,
    #[command(flatten)]
    pub toy: ToyArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub recon: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Per-frame PSNR CSV; the overall figures go to `<out>.summary.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub experiment: ExperimentName,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Solver for `contraction`.
    #[arg(long, value_enum, default_value_t = IterativeSolver::Gap)]
    pub solver: IterativeSolver,
    /// Noise levels for `contraction` and `csp-noisy`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sigma: Vec<f64>,
    /// Vector length for `bernstein`.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Redirect outputs here instead of the recorded location.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Runtime(ScsError),
}

impl From<ScsError> for CliError {
    fn from(e: ScsError) -> Self {
        CliError::Runtime(e)
    }
}

pub(crate) type CliResult<T> = std::result::Result<T, CliError>;

/// The command line minus the program name and any `--threads` option,
/// which never changes outputs.
fn recorded_args(args: &[OsString]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned());
    while let Some(a) = it.next() {
        if a == "--threads" {
            it.next();
        } else if !a.starts_with("--threads=") {
            out.push(a);
        }
    }
    out
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let recorded = recorded_args(&args);
    let outcome = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli.command, &recorded, cli.threads)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} threads: {e}"))),
        },
        None => commands::dispatch(&cli.command, &recorded, None),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
