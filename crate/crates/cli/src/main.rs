//! `hartman`: command-line front end for the hartman-core pipelines.
//!
//! Exit codes: 0 on success, 2 on validation or I/O errors, 3 when
//! `--strict` is set and a result is undecided or only numerically certified.

mod commands;
mod source;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use source::SourceArgs;

#[derive(Parser, Debug)]
#[command(name = "hartman", version, about = "Hartman measurable sequences: means, spectra, distances, Fejer and Weil operators, reconstruction")]
struct Cli {
    /// Worker threads for the parallel sweeps.
    #[arg(long, global = true, env = "HARTMAN_THREADS")]
    threads: Option<usize>,
    /// Exit with status 3 on undecided or uncertified results.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the samples of a sequence on [-N, N] as CSV.
    Generate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long = "N", default_value_t = 100_000)]
        radius: i64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Cesaro mean over [-N, N], and the exact mean for exact realizations.
    Mean {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        window: Window,
    },
    /// Fourier-Bohr coefficient at one frequency.
    Coeff {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        window: Window,
        /// Frequency: `p/q`, a decimal, or `quadratic:a,b,c,d`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Spectrum scan and the induced subgroup, as JSON.
    Spectrum {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        window: Window,
        #[arg(long, default_value_t = 1e-3)]
        theta: f64,
    },
    /// Distance profile `g,value` over |g| <= G as CSV.
    Distance {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        window: Window,
        #[arg(long = "G", default_value_t = 1000)]
        g_window: i64,
    },
    /// Members of the filter set at level eps.
    FilterSet {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        window: Window,
        #[arg(long = "G", default_value_t = 1000)]
        g_window: i64,
        #[arg(long)]
        eps: f64,
    },
    /// Envelope test for a character in Sub(phi).
    SubgroupTest {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        window: Window,
        #[arg(long = "G", default_value_t = 1000)]
        g_window: i64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Also write `delta,envelope` rows to this file.
        #[arg(long)]
        envelope_csv: Option<std::path::PathBuf>,
    },
    /// Fejer mean of a step function given as JSON.
    Fejer {
        /// Step function JSON file.
        #[arg(long)]
        step: std::path::PathBuf,
        /// Fejer order n.
        #[arg(long, default_value_t = 64)]
        n: u64,
        /// Grid points per axis for the norm estimates.
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Aperiodization of a step function given as JSON.
    Aperiodize {
        #[arg(long)]
        step: std::path::PathBuf,
    },
    /// Recover the compactification and a realization from samples.
    Reconstruct {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        window: Window,
        #[arg(long, default_value_t = 1e-3)]
        theta: f64,
        #[arg(long, default_value_t = 256)]
        order: u64,
        /// Generators of a reference subgroup to compare against, e.g.
        /// `--compare quadratic:-1,1,2,1`.
        #[arg(long, num_args = 1.., allow_hyphen_values = true)]
        compare: Vec<String>,
    },
    /// Run a built-in check over the seeded corpus.
    Verify {
        #[arg(long, value_enum)]
        suite: commands::Suite,
        #[arg(long, default_value_t = hartman_core::corpus::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Window {
    /// Window radius; defaults to the full window of a CSV input, else 100000.
    #[arg(long = "N")]
    pub radius: Option<i64>,
}

/// Failure kinds mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Undecided(String),
}

impl From<hartman_core::Error> for Failure {
    fn from(e: hartman_core::Error) -> Self {
        match e {
            hartman_core::Error::Undecided(_) | hartman_core::Error::Uncertified(_) => {
                Failure::Undecided(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

/// What a command produced: text for stdout, and whether the result is
/// fully decided.
pub struct Output {
    pub text: String,
    pub decided: bool,
}

fn run(cli: Cli) -> Result<Output, Failure> {
    use Command::*;
    match cli.command {
        Generate { source, radius, out } => commands::generate(&source, radius, out.as_deref()),
        Mean { source, window } => commands::mean(&source, window),
        Coeff { source, window, alpha } => commands::coeff(&source, window, &alpha),
        Spectrum { source, window, theta } => commands::spectrum(&source, window, theta),
        Distance { source, window, g_window } => commands::distance(&source, window, g_window),
        FilterSet { source, window, g_window, eps } => commands::filter_set(&source, window, g_window, eps),
        SubgroupTest { source, window, g_window, alpha, envelope_csv } => {
            commands::subgroup_test(&source, window, g_window, &alpha, envelope_csv.as_deref())
        }
        Fejer { step, n, grid } => commands::fejer(&step, n, grid),
        Aperiodize { step } => commands::aperiodize(&step),
        Reconstruct { source, window, theta, order, compare } => {
            commands::reconstruct(&source, window, theta, order, &compare)
        }
        Verify { suite, seed } => commands::verify(suite, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let strict = cli.strict;
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            if strict && !out.decided {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Undecided(msg)) => {
            eprintln!("undecided: {msg}");
            ExitCode::from(if strict { 3 } else { 2 })
        }
    }
}
