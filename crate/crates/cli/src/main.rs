//! `permix`: matrices, spectra, worst-case searches and verification suites
//! for interval maps composed with interval-exchange permutations.

mod commands;
mod select;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permix::Error;

#[derive(Debug, Parser)]
#[command(name = "permix", version, about = "Mixing rates of interval maps composed with permutations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for searches and sampling (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// The map `g = sigma o f` on `N` cells.
#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    /// Number of branches of `f`.
    #[arg(long)]
    pub m: Option<usize>,

    /// Number of cells of the partition.
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,

    /// Slope signature such as "+-+", or one of sf, zigzag, inverted-zigzag (needs --m).
    #[arg(long)]
    pub signature: Option<String>,

    /// One-based cell images such as "1,3,2" (default: identity).
    #[arg(long)]
    pub perm: Option<String>,
}

/// How `worst` and `survey` search the permutation group.
#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// all, or mixing_only to skip compositions that are not topologically mixing.
    #[arg(long, default_value = "all")]
    pub mode: String,

    /// exhaustive, sampled or symmetric_shortcut (default: exhaustive for N <= 7, else sampled).
    #[arg(long)]
    pub strategy: Option<String>,

    /// Permutations drawn by the sampled strategy.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,

    /// Seed of the sampled strategy.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    /// `A(g, N)`, the reduced Markov matrix.
    Reduced,
    /// `B(g, N)`, the Markov matrix on the fine partition of `Nm` cells.
    Fine,
    /// `P(sigma)`.
    Permutation,
    /// `Q(sigma)` with `m x m` blocks.
    BlockPermutation,
    /// The anti-diagonal identity of order N.
    BackwardsIdentity,
    /// The symmetric circulant `C(m, N)`.
    Circulant,
    /// `C(m, N) + C(m, N) J`.
    FoldedCirculant,
    /// Row-permuted tent matrix for odd N.
    TentWitness,
    /// The doubled matrix of order 2N.
    Doubled,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a matrix as CSV: `n=<order>,rowsum=<c>` then one line per row.
    Matrix {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_enum, default_value_t = MatrixKind::Reduced)]
        kind: MatrixKind,
    },
    /// Print every eigenvalue of a matrix, leading one included.
    Spectrum {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_enum, default_value_t = MatrixKind::Reduced)]
        kind: MatrixKind,
    },
    /// Mixing rate of `g = sigma o f` and whether `g` is topologically mixing.
    Rate {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Worst mixing rate of `f` over permutations of N cells.
    Worst {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Worst mixing rates over a grid of (m, N) and signatures.
    Survey {
        /// Branch counts: a list "2,3" or a range "2..5".
        #[arg(long, default_value = "2..4")]
        m: String,
        /// Cell counts: a list or a range; values below m are skipped.
        #[arg(long = "N", value_name = "N", default_value = "2..7")]
        n: String,
        /// Signatures: a list of "+-" strings or sf, zigzag, inverted-zigzag; or all, orbits.
        #[arg(long, default_value = "sf,zigzag")]
        signature: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Nonleading eigenvalues of every topologically mixing tent composition on odd N cells.
    Region {
        #[arg(long = "N", value_name = "N")]
        n: usize,
    },
    /// Exact and Monte Carlo correlations of two step observables.
    Correlate {
        #[command(flatten)]
        map: MapArgs,
        /// Largest lag.
        #[arg(long, default_value_t = 30)]
        nmax: usize,
        /// Monte Carlo samples per lag; 0 disables the Monte Carlo column.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Monte Carlo seed; lag n uses seed + n.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Values of phi on equal cells, or "eigen" for the subleading eigenvector.
        #[arg(long, default_value = "eigen")]
        phi: String,
        /// Values of psi on equal cells, or "eigen"; defaults to phi.
        #[arg(long)]
        psi: Option<String>,
    },
    /// Run a verification suite and report one line per criterion.
    Verify {
        /// closed-form, degeneracy, tent, circulant, appendix, asymptotic, bounds, correlation or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

/// Failures and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Verification(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Core(Error::Capacity { .. }) => 3,
            Failure::Core(Error::Domain(_) | Error::Precondition(_) | Error::Parse(_) | Error::ColumnBlock { .. }) => 2,
            Failure::Core(Error::NoConvergence(_) | Error::Io(_)) => 1,
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut sink: Box<dyn Write + Send> = match &cli.output.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    let format = cli.output.format;
    let result = match cli.output.workers {
        None => commands::execute(cli.command, format, &mut sink),
        Some(0) => Err(Error::Precondition("--workers must be at least 1".into()).into()),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Failure::Core(Error::Io(e.to_string())))?
            .install(|| commands::execute(cli.command, format, &mut sink)),
    };
    sink.flush()?;
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed pipe downstream (`permix ... | head`) is not an error
        Err(Failure::Core(Error::Io(msg))) if msg.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Core(e) => eprintln!("permix: {e}"),
                Failure::Verification(n) => eprintln!("permix: {n} criterion(s) failed"),
            }
            ExitCode::from(failure.code())
        }
    }
}
