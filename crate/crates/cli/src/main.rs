//! `twomeans` — two-sample mean tests, Monte Carlo studies and batch runs.
//!
//! Exit codes: 0 success, 1 validation error, 2 solver failure, 3 I/O
//! error. Failures print `error[Name]: message` on stderr with a stable
//! error name for scripting.

mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use twomeans::Error;

#[derive(Parser)]
#[command(
    name = "twomeans",
    about = "Two-sample mean hypothesis tests with t/chi-square/bootstrap/exact calibrations",
    version
)]
struct Cli {
    /// Worker threads (default: available parallelism). Results are
    /// identical for any setting.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one test on two samples (files with one value per line, or
    /// inline comma-separated values).
    Test {
        /// welch, wmw, el or eel.
        #[arg(long)]
        method: String,
        /// t, chisq, normal, boot or exact (validity depends on method).
        #[arg(long)]
        cal: String,
        /// Bootstrap resamples.
        #[arg(long = "B", default_value_t = 499)]
        b: usize,
        #[arg(long, env = "TWOMEANS_SEED", default_value_t = 0)]
        seed: u64,
        /// Cap on exact enumeration (splits / pmf table entries).
        #[arg(long, default_value_t = 1_000_000)]
        cap: u128,
        /// Inline first sample, e.g. --x 1,2,3 (alternative to a file).
        #[arg(long)]
        x: Option<String>,
        /// Inline second sample.
        #[arg(long)]
        y: Option<String>,
        /// Sample files: one value per line.
        #[arg(value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Type I error study: rejection rates with size-band verdicts and
    /// quantile-divergence diagnostics, written as TSV + JSON.
    Simulate {
        /// Comma-separated scenario ids (a..l), or `all`.
        #[arg(long, default_value = "a")]
        scenarios: String,
        /// Size pairs, e.g. `20,30;30,50`.
        #[arg(long, default_value = "20,30;20,40;30,40;30,50;50,100")]
        sizes: String,
        /// Comma-separated method:calibration pairs, or `all` for the full
        /// study grid.
        #[arg(long, default_value = "all")]
        methods: String,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, env = "TWOMEANS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long = "B", default_value_t = 499)]
        b: usize,
        /// Scenario override file (required for scenarios h and j).
        #[arg(long)]
        overrides: Option<PathBuf>,
        /// Run the full golden grid: unambiguous scenarios, the five study
        /// size pairs, every method/calibration.
        #[arg(long, default_value_t = false)]
        golden: bool,
        /// Output directory for report files.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Human-readable table on stdout instead of TSV.
        #[arg(long, default_value_t = false)]
        pretty: bool,
    },
    /// Power study over a grid of location shifts applied to sample 2.
    Power {
        #[arg(long, default_value = "a")]
        scenarios: String,
        #[arg(long, default_value = "50,100")]
        sizes: String,
        /// Defaults to the bootstrap-calibrated trio.
        #[arg(long, default_value = "welch:boot,el:boot,eel:boot")]
        methods: String,
        /// Comma-separated shifts; default is 16 steps over 0..1.5·σ̂ where
        /// σ̂ is the sample SD of a seeded draw from sample 2.
        #[arg(long)]
        deltas: Option<String>,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, env = "TWOMEANS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long = "B", default_value_t = 499)]
        b: usize,
        #[arg(long)]
        overrides: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = false)]
        pretty: bool,
    },
    /// Row-wise tests of a delimited wide matrix between two groups.
    Batch {
        /// Matrix file: header of column ids, one feature per row.
        #[arg(long)]
        matrix: PathBuf,
        /// Label sidecar: `column_id<TAB>group`, exactly two groups.
        #[arg(long)]
        labels: PathBuf,
        /// welch, el or eel.
        #[arg(long, default_value = "welch")]
        method: String,
        #[arg(long, default_value = "t")]
        cal: String,
        #[arg(long = "B", default_value_t = 499)]
        b: usize,
        #[arg(long, env = "TWOMEANS_SEED", default_value_t = 0)]
        seed: u64,
        /// Results TSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Timing comparison of methods over a matrix (real or synthetic).
    Bench {
        /// Synthetic null matrix: rows,n_x,n_y.
        #[arg(long)]
        synthetic: Option<String>,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Comma-separated methods; bare names take their study default
        /// calibration (welch → t, el/eel → chisq), or use method:cal.
        #[arg(long, default_value = "welch,eel,el")]
        methods: String,
        /// Default calibration override for bare method names.
        #[arg(long)]
        cal: Option<String>,
        #[arg(long = "B", default_value_t = 499)]
        b: usize,
        #[arg(long, env = "TWOMEANS_SEED", default_value_t = 0)]
        seed: u64,
        /// Timing TSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::ParseError { .. } => 3,
        e if e.is_solver_failure() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error[Validation]: could not size thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Test {
            method,
            cal,
            b,
            seed,
            cap,
            x,
            y,
            files,
        } => commands::run_test(&method, &cal, b, seed, cap, x, y, files),
        Command::Simulate {
            scenarios,
            sizes,
            methods,
            reps,
            alpha,
            seed,
            b,
            overrides,
            golden,
            out_dir,
            pretty,
        } => commands::run_simulate(commands::SimulateArgs {
            scenarios,
            sizes,
            methods,
            reps,
            alpha,
            seed,
            b,
            overrides,
            golden,
            out_dir,
            pretty,
        }),
        Command::Power {
            scenarios,
            sizes,
            methods,
            deltas,
            reps,
            alpha,
            seed,
            b,
            overrides,
            out_dir,
            pretty,
        } => commands::run_power(commands::PowerArgs {
            scenarios,
            sizes,
            methods,
            deltas,
            reps,
            alpha,
            seed,
            b,
            overrides,
            out_dir,
            pretty,
        }),
        Command::Batch {
            matrix,
            labels,
            method,
            cal,
            b,
            seed,
            out,
        } => commands::run_batch(matrix, labels, &method, &cal, b, seed, out),
        Command::Bench {
            synthetic,
            matrix,
            labels,
            methods,
            cal,
            b,
            seed,
            out,
        } => commands::run_bench(synthetic, matrix, labels, &methods, cal.as_deref(), b, seed, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.name(), e);
            ExitCode::from(exit_code_for(&e))
        }
    }
}
