//! `critlab`: command-line driver for the experiments.
//!
//! Exit codes: 0 on success, 2 for a bad config or arguments, 3 when more
//! trials failed than the failure budget allows, 1 for anything else.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use critlab::circle::DEFAULT_TAIL_TOL;
use critlab::classic::perturbation_demo;
use critlab::csvio;
use critlab::experiment::{
    aggregate, circle_batch, classic_batch, gaf_batch, read_jsonl, run_experiment, ExperimentConfig, ExperimentError,
};
use critlab::measures::sample_roots;
use critlab::metrics::prohorov_distance;
use critlab::mp::MIN_PRECISION;
use critlab::polyroots::{critical_points, RootPolynomial};
use critlab::seed::split;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "critlab", version, about = "Critical points of random polynomials")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides `master_seed` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Starting working precision in bits.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// Output file, or directory for `run`. Standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full experiment described by --config.
    Run,
    /// Draw roots from the config's measure and write them as CSV.
    Sample {
        /// Number of roots (default: the first of `n_values`).
        #[arg(long)]
        n: Option<usize>,
        /// Trial index used in the seed split.
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Critical points of the polynomial with the roots in a CSV file.
    CriticalPoints { roots: PathBuf },
    /// Prohorov distance between two point sets (uniform weights unless
    /// a `weight` column is present).
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Critical points inside the disk of radius rho for roots uniform on
    /// the unit circle, against the limiting count law.
    CircleStats {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Highest recorded coefficient index.
        #[arg(long, default_value_t = 4)]
        coefficients: usize,
        /// Only compute the coefficients.
        #[arg(long)]
        coefficients_only: bool,
        #[arg(long, default_value_t = 0.05)]
        failure_budget: f64,
    },
    /// Zeros of the Gaussian power series inside the disk of radius rho.
    GafZeros {
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
        tail_tol: f64,
    },
    /// Marden, interlacing, Jensen and Gauss-Lucas over random inputs.
    ClassicChecks {
        #[arg(long, default_value_t = 1000)]
        triangles: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [10, 50, 200])]
        n_values: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Critical points of z^n - 1 as one root slides onto its neighbour.
    PerturbDemo {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Aggregate JSON-lines trial reports into a summary.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Other(_) => 1,
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(e) => Failure::Usage(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn other(e: impl std::fmt::Display) -> Failure {
    Failure::Other(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(m) | Failure::Budget(m) | Failure::Other(m)) = &f;
            eprintln!("critlab: {m}");
            ExitCode::from(f.code())
        }
    }
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| other(format!("{}: {e}", dir.display())))?;
            }
            let f = File::create(path).map_err(|e| other(format!("{}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(other)?;
    writeln!(w).and_then(|_| w.flush()).map_err(other)
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| other(format!("{}: {e}", path.display())))
}

fn load_config(g: &Global) -> Result<ExperimentConfig, Failure> {
    let path = g.config.as_ref().ok_or_else(|| usage("--config is required"))?;
    let mut config = ExperimentConfig::from_path(path).map_err(usage)?;
    if let Some(seed) = g.seed {
        config.master_seed = seed;
    }
    if let Some(bits) = g.precision_bits {
        config.precision_bits = bits;
    }
    config.validate().map_err(usage)?;
    Ok(config)
}

fn precision(g: &Global) -> Result<u32, Failure> {
    let bits = g.precision_bits.unwrap_or(MIN_PRECISION);
    if bits < MIN_PRECISION {
        return Err(usage(format!("--precision-bits must be at least {MIN_PRECISION}")));
    }
    Ok(bits)
}

fn check_budget(failed: usize, total: usize, budget: f64) -> Result<(), Failure> {
    if failed as f64 > budget * total as f64 {
        return Err(Failure::Budget(format!("{failed} of {total} trials failed")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let out = g.out.as_deref();
    match cli.command {
        Command::Run => {
            let mut config = load_config(g)?;
            if let Some(dir) = &g.out {
                config.output_dir = dir.clone();
            }
            let summary = run_experiment(&config, g.threads)?;
            eprintln!("wrote {}", config.output_dir.display());
            check_budget(summary.failed_trials, summary.total_trials, config.failure_budget)
        }
        Command::Sample { n, trial } => {
            let config = load_config(g)?;
            let n = n.unwrap_or(config.n_values[0]);
            let sample = sample_roots(&config.measure, n, split(config.master_seed, n as u64, trial)).map_err(usage)?;
            csvio::write_points(output(out)?, &sample.roots).map_err(other)
        }
        Command::CriticalPoints { roots } => {
            let roots = csvio::read_points(open(&roots)?).map_err(usage)?;
            let poly = RootPolynomial::new(&roots, precision(g)?).map_err(usage)?;
            let cps = critical_points(&poly).map_err(|e| Failure::Budget(e.to_string()))?;
            csvio::write_critical_points(output(out)?, &cps).map_err(other)
        }
        Command::Compare { a, b, tol } => {
            let mu = csvio::read_measure(open(&a)?).map_err(usage)?;
            let nu = csvio::read_measure(open(&b)?).map_err(usage)?;
            let d = prohorov_distance(&mu, &nu, tol).map_err(usage)?;
            let mut w = output(out)?;
            writeln!(w, "{}", csvio::format_number(d)).and_then(|_| w.flush()).map_err(other)
        }
        Command::CircleStats { n, rho, trials, coefficients, coefficients_only, failure_budget } => {
            if trials == 0 {
                return Err(usage("--trials must be at least 1"));
            }
            let batch = circle_batch(
                n,
                rho,
                coefficients,
                trials,
                g.seed.unwrap_or(0),
                precision(g)?,
                !coefficients_only,
                g.threads,
            )?;
            let summary = batch.summary().map_err(usage)?;
            write_json(out, &summary)?;
            check_budget(batch.failed, trials, failure_budget)
        }
        Command::GafZeros { rho, trials, tail_tol } => {
            if trials == 0 {
                return Err(usage("--trials must be at least 1"));
            }
            let batch = gaf_batch(rho, tail_tol, trials, g.seed.unwrap_or(0), g.threads)?;
            if batch.counts.is_empty() {
                return Err(usage(format!("every trial failed (rho = {rho})")));
            }
            write_json(out, &batch.summary()?)
        }
        Command::ClassicChecks { triangles, n_values, trials } => {
            let summary = classic_batch(triangles, &n_values, trials, g.seed.unwrap_or(0), precision(g)?, g.threads)?;
            write_json(out, &summary)
        }
        Command::PerturbDemo { n, steps } => {
            let demo = perturbation_demo(n, steps, precision(g)?, g.seed.unwrap_or(0)).map_err(usage)?;
            csvio::write_table(output(out)?, &["fraction", "max_modulus"], demo.iter().map(|s| vec![s.fraction, s.max_modulus]))
                .map_err(other)
        }
        Command::Report { files } => {
            let config = load_config(g)?;
            let mut reports = Vec::new();
            for f in &files {
                reports.extend(read_jsonl(f)?);
            }
            let summary = aggregate(&config, &reports);
            write_json(out, &summary)?;
            check_budget(summary.failed_trials, summary.total_trials, config.failure_budget)
        }
    }
}
