//! Seeded, parallel batches of trials and their reports.
//!
//! Every job `(n, trial)` draws its roots from `split(master_seed, n, trial)`
//! and is otherwise pure, so results do not depend on the thread count or
//! on scheduling. Reports are collected in job order before anything is
//! written.

mod config;
mod report;

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig};
pub use report::{aggregate, coefficient_stats, count_summary, CoefficientStats, CountSummary, NSummary, Stats, Summary, Thresholds};

use crate::circle::{power_sum_coefficients, CoefficientVector};
use crate::classic::{gauss_lucas_check, HullCheck};
use crate::csvio::{self, CsvError};
use crate::measures::{sample_roots, MeasureSpec};
use crate::metrics::{pairing_report, prohorov_distance, DiscreteMeasure, PairingReport};
use crate::polyroots::{critical_points, CriticalPointSet, RootPolynomial};
use crate::seed::split;

/// Bins of the per-trial critical-point modulus histogram.
pub const MODULUS_BINS: usize = 20;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("{path}:{line}: {source}")]
    Json { path: String, line: usize, source: serde_json::Error },
    #[error("thread pool: {0}")]
    Threads(String),
    #[error("reference sample: {0}")]
    Reference(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.display().to_string(), source }
}

/// Outcome of one trial. Fields that a failed trial could not compute are
/// absent, and `error` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialReport {
    pub trial_index: usize,
    pub n: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prohorov_to_reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pairing: Option<PairingReport>,
    /// Critical points with `|z| < rho`.
    #[serde(rename = "N_rho", skip_serializing_if = "Option::is_none", default)]
    pub n_rho: Option<usize>,
    /// `a_{n,0..=k}`, for roots on the unit circle only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coefficients: Option<CoefficientVector>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gauss_lucas: Option<HullCheck>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modulus_histogram: Option<Vec<u64>>,
    /// Wall-clock milliseconds.
    pub timing: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub precision_used: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl TrialReport {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Modulus up to which the histogram bins run; larger moduli land in the
/// last bin.
pub fn histogram_range(spec: &MeasureSpec) -> f64 {
    match spec {
        MeasureSpec::ComplexGaussian { mean, scale } => mean.norm() + 3.0 * scale,
        other => other.support_radius().unwrap_or(1.0).max(f64::MIN_POSITIVE),
    }
}

fn is_unit_circle(spec: &MeasureSpec) -> bool {
    matches!(spec, MeasureSpec::UniformCircle { radius } if *radius == 1.0)
}

/// The shared target of the Prohorov comparisons.
pub fn reference_measure(config: &ExperimentConfig) -> Result<DiscreteMeasure, ExperimentError> {
    let sample = sample_roots(&config.measure, config.reference_sample_size, split(config.master_seed, 0, 0))
        .map_err(|e| ExperimentError::Reference(e.to_string()))?;
    DiscreteMeasure::uniform(&sample.roots).map_err(|e| ExperimentError::Reference(e.to_string()))
}

/// Run one job. The critical points are returned too, for the plot files.
pub fn run_trial(
    config: &ExperimentConfig,
    reference: &DiscreteMeasure,
    n: usize,
    trial_index: usize,
) -> (TrialReport, Option<CriticalPointSet>) {
    let start = Instant::now();
    let seed = split(config.master_seed, n as u64, trial_index as u64);
    let mut report = TrialReport {
        trial_index,
        n,
        seed,
        prohorov_to_reference: None,
        pairing: None,
        n_rho: None,
        coefficients: None,
        gauss_lucas: None,
        modulus_histogram: None,
        timing: 0.0,
        precision_used: None,
        error: None,
    };
    let result = (|| -> Result<CriticalPointSet, String> {
        let sample = sample_roots(&config.measure, n, seed).map_err(|e| e.to_string())?;
        if is_unit_circle(&config.measure) {
            report.coefficients = Some(power_sum_coefficients(&sample.roots, config.coefficients).map_err(|e| e.to_string())?);
        }
        let poly = RootPolynomial::new(&sample.roots, config.precision_bits).map_err(|e| e.to_string())?;
        let cps = critical_points(&poly).map_err(|e| e.to_string())?;
        report.precision_used = Some(cps.precision_bits);
        report.gauss_lucas = Some(gauss_lucas_check(&sample.roots, &cps.points));
        report.n_rho = Some(cps.points.iter().filter(|z| z.norm() < config.rho).count());
        report.pairing = Some(pairing_report(&sample.roots, &cps, config.c).map_err(|e| e.to_string())?);
        let range = histogram_range(&config.measure);
        let mut hist = vec![0u64; MODULUS_BINS];
        for z in &cps.points {
            hist[((z.norm() / range * MODULUS_BINS as f64) as usize).min(MODULUS_BINS - 1)] += 1;
        }
        report.modulus_histogram = Some(hist);
        let empirical = DiscreteMeasure::uniform(&cps.points).map_err(|e| e.to_string())?;
        report.prohorov_to_reference =
            Some(prohorov_distance(&empirical, reference, config.prohorov_tol).map_err(|e| e.to_string())?);
        Ok(cps)
    })();
    let cps = match result {
        Ok(cps) => Some(cps),
        Err(e) => {
            report.error = Some(e);
            None
        }
    };
    // Strictly positive even on coarse clocks.
    report.timing = (start.elapsed().as_secs_f64() * 1e3).max(1e-6);
    (report, cps)
}

/// Run `f` on a pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder.build().map_err(|e| ExperimentError::Threads(e.to_string()))?;
    Ok(pool.install(f))
}

/// All trial reports of `config`, in `(n_values order, trial)` order.
pub fn run_trials(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<(Vec<TrialReport>, Vec<(usize, Option<CriticalPointSet>)>), ExperimentError> {
    config.validate()?;
    let reference = reference_measure(config)?;
    let jobs: Vec<(usize, usize)> =
        config.n_values.iter().flat_map(|&n| (0..config.trials).map(move |t| (n, t))).collect();
    let results: Vec<(TrialReport, Option<CriticalPointSet>)> =
        with_threads(threads, || jobs.par_iter().map(|&(n, t)| run_trial(config, &reference, n, t)).collect())?;
    let mut reports = Vec::with_capacity(results.len());
    let mut first = Vec::new();
    for (report, cps) in results {
        if report.trial_index == 0 {
            first.push((report.n, cps));
        }
        reports.push(report);
    }
    Ok((reports, first))
}

/// Run all trials, aggregate them, and write into `config.output_dir`:
///
/// * `trials.jsonl`: one [`TrialReport`] per line;
/// * `summary.json`: the [`Summary`];
/// * `scatter_n{n}.csv`: critical points of trial 0 for each `n`;
/// * `modulus_histogram.csv`: pooled modulus histograms;
/// * `prohorov_vs_n.csv`: median Prohorov distance per `n`.
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<Summary, ExperimentError> {
    let (reports, first) = run_trials(config, threads)?;
    let summary = aggregate(config, &reports);
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_jsonl(&dir.join("trials.jsonl"), &reports)?;
    for (n, cps) in &first {
        if let Some(cps) = cps {
            let path = dir.join(format!("scatter_n{n}.csv"));
            csvio::write_critical_points(create(&path)?, cps)?;
        }
    }
    write_summary_files(config, &summary)?;
    Ok(summary)
}

fn create(path: &Path) -> Result<BufWriter<File>, ExperimentError> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

/// `summary.json` and the aggregate plot tables.
pub fn write_summary_files(config: &ExperimentConfig, summary: &Summary) -> Result<(), ExperimentError> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join("summary.json");
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, summary).map_err(|source| ExperimentError::Json { path: path.display().to_string(), line: 0, source })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(io_err(&path))?;

    let range = histogram_range(&config.measure);
    let mut header = vec!["n".to_string()];
    header.extend((0..MODULUS_BINS).map(|b| format!("bin{b}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = summary.per_n.iter().map(|s| {
        let mut row = vec![s.n as f64];
        row.extend(s.modulus_histogram.iter().map(|&c| c as f64));
        row
    });
    let path = dir.join("modulus_histogram.csv");
    csvio::write_table(create(&path)?, &header_refs, rows)?;
    let path = dir.join("modulus_bins.csv");
    csvio::write_table(
        create(&path)?,
        &["lo", "hi"],
        (0..MODULUS_BINS).map(|b| vec![range * b as f64 / MODULUS_BINS as f64, range * (b + 1) as f64 / MODULUS_BINS as f64]),
    )?;
    let path = dir.join("prohorov_vs_n.csv");
    csvio::write_table(
        create(&path)?,
        &["n", "median", "mean", "std_error"],
        summary.per_n.iter().map(|s| vec![s.n as f64, s.prohorov.median, s.prohorov.mean, s.prohorov.std_error]),
    )?;
    Ok(())
}

pub fn write_jsonl(path: &Path, reports: &[TrialReport]) -> Result<(), ExperimentError> {
    let mut w = create(path)?;
    for r in reports {
        let line = serde_json::to_string(r).map_err(|source| ExperimentError::Json { path: path.display().to_string(), line: 0, source })?;
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_jsonl(path: &Path) -> Result<Vec<TrialReport>, ExperimentError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| ExperimentError::Json {
            path: path.display().to_string(),
            line: i + 1,
            source,
        })?);
    }
    Ok(out)
}

/// Copy of `reports` as JSON values with the timing fields removed, for
/// determinism comparisons.
pub fn without_timing(reports: &[TrialReport]) -> Vec<TrialReport> {
    reports.iter().cloned().map(|mut r| {
        r.timing = 0.0;
        r
    }).collect()
}

/// Count of critical points per trial in `B_rho` for `n` circle roots, and
/// the coefficient vectors: the inputs of the count-law and CLT checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleBatch {
    pub n: usize,
    pub rho: f64,
    pub n_rho: Vec<usize>,
    pub coefficients: Vec<CoefficientVector>,
    pub failed: usize,
    pub precision_max: u32,
}

/// `trials` circle trials with seeds `split(master_seed, n, t)`. With
/// `critical_points == false` only the coefficients are computed.
pub fn circle_batch(
    n: usize,
    rho: f64,
    k: usize,
    trials: usize,
    master_seed: u64,
    precision_bits: u32,
    critical_points: bool,
    threads: Option<usize>,
) -> Result<CircleBatch, ExperimentError> {
    let results: Vec<Result<(Option<usize>, CoefficientVector, u32), String>> = with_threads(threads, || {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = split(master_seed, n as u64, t as u64);
                if critical_points {
                    let tr = crate::circle::circle_trial(n, rho, k, precision_bits, seed).map_err(|e| e.to_string())?;
                    Ok((Some(tr.n_rho), tr.coefficients, tr.precision_used))
                } else {
                    let s = sample_roots(&MeasureSpec::UniformCircle { radius: 1.0 }, n, seed).map_err(|e| e.to_string())?;
                    let a = power_sum_coefficients(&s.roots, k).map_err(|e| e.to_string())?;
                    Ok((None, a, 0))
                }
            })
            .collect()
    })?;
    let mut batch = CircleBatch { n, rho, n_rho: Vec::new(), coefficients: Vec::new(), failed: 0, precision_max: 0 };
    for r in results {
        match r {
            Ok((count, a, bits)) => {
                batch.n_rho.extend(count);
                batch.coefficients.push(a);
                batch.precision_max = batch.precision_max.max(bits);
            }
            Err(_) => batch.failed += 1,
        }
    }
    Ok(batch)
}

impl CircleBatch {
    /// Counts against the limiting law, and coefficient moments.
    pub fn summary(&self) -> Result<CircleSummary, ExperimentError> {
        let law = crate::circle::count_law(self.rho, crate::circle::DEFAULT_TAIL_TOL)
            .map_err(|e| ExperimentError::Reference(e.to_string()))?;
        let counts: Vec<f64> = self.n_rho.iter().map(|&k| k as f64).collect();
        let vecs: Vec<&CoefficientVector> = self.coefficients.iter().collect();
        Ok(CircleSummary {
            n: self.n,
            rho: self.rho,
            trials: self.coefficients.len() + self.failed,
            failed: self.failed,
            precision_max: self.precision_max,
            count_law: (!counts.is_empty()).then(|| count_summary(&law, &counts)),
            law_pmf: law.pmf,
            coefficients: coefficient_stats(&vecs),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSummary {
    pub n: usize,
    pub rho: f64,
    pub trials: usize,
    pub failed: usize,
    pub precision_max: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub count_law: Option<CountSummary>,
    pub law_pmf: Vec<f64>,
    pub coefficients: Vec<CoefficientStats>,
}

/// Zero counts and moduli of `trials` Gaussian power series in `B_rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GafBatch {
    pub rho: f64,
    pub counts: Vec<usize>,
    pub moduli: Vec<f64>,
    pub near_boundary: usize,
    pub failed: usize,
}

impl GafBatch {
    pub fn summary(&self) -> Result<GafSummary, ExperimentError> {
        let counts: Vec<f64> = self.counts.iter().map(|&k| k as f64).collect();
        let count = Stats::of(&counts);
        let expected = crate::circle::gaf_expected_count(self.rho);
        let chi = crate::circle::radial_chi_square(&self.moduli, self.rho, GAF_BINS)
            .map_err(|e| ExperimentError::Reference(e.to_string()))?;
        Ok(GafSummary {
            rho: self.rho,
            trials: self.counts.len() + self.failed,
            failed: self.failed,
            expected_count: expected,
            count,
            z_score: (count.std_error > 0.0).then(|| (count.mean - expected).abs() / count.std_error),
            chi_square: chi,
            near_boundary: self.near_boundary,
        })
    }
}

/// Radial bins of the GAF chi-square test.
pub const GAF_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GafSummary {
    pub rho: f64,
    pub trials: usize,
    pub failed: usize,
    pub expected_count: f64,
    pub count: Stats,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z_score: Option<f64>,
    pub chi_square: crate::circle::ChiSquare,
    pub near_boundary: usize,
}

pub fn gaf_batch(rho: f64, tail_tol: f64, trials: usize, master_seed: u64, threads: Option<usize>) -> Result<GafBatch, ExperimentError> {
    let results: Vec<Result<crate::circle::GafSample, String>> = with_threads(threads, || {
        (0..trials)
            .into_par_iter()
            .map(|t| crate::circle::sample_gaf_zeros(rho, tail_tol, split(master_seed, 0, t as u64 + 1)).map_err(|e| e.to_string()))
            .collect()
    })?;
    let mut batch = GafBatch { rho, counts: Vec::new(), moduli: Vec::new(), near_boundary: 0, failed: 0 };
    for r in results {
        match r {
            Ok(s) => {
                batch.counts.push(s.zeros_in_b_rho.len());
                batch.moduli.extend(s.zeros_in_b_rho.iter().map(|z: &Complex64| z.norm()));
                batch.near_boundary += s.near_boundary;
            }
            Err(_) => batch.failed += 1,
        }
    }
    Ok(batch)
}

/// Outcome of the classical-theorem checks over random configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicSummary {
    pub triangles: usize,
    /// Largest focus-to-critical-point distance over all triangles.
    pub marden_max_deviation: f64,
    pub marden_failures: usize,
    /// `(n, trials, passed)` for real roots uniform on `[0, 1]`.
    pub interlacing: Vec<(usize, usize, usize)>,
    /// `(n, trials, passed)` for conjugate-closed roots in the unit disk.
    pub jensen: Vec<(usize, usize, usize)>,
    /// Trials across all families above, each checked against its hull.
    pub gauss_lucas_trials: usize,
    pub gauss_lucas_violations: usize,
    pub worst_hull_violation: f64,
}

fn random_triangle(seed: u64) -> [Complex64; 3] {
    use rand::Rng;
    let mut rng = crate::seed::rng(seed);
    loop {
        let z: [Complex64; 3] =
            std::array::from_fn(|_| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)));
        let area = ((z[1] - z[0]).conj() * (z[2] - z[0])).im;
        if area.abs() > 1e-3 {
            return z;
        }
    }
}

/// Marden over `triangles` random triangles in `[-1, 1]^2`, interlacing and
/// Jensen over `trials` samples of each size in `n_values`, and Gauss-Lucas
/// over all of them.
pub fn classic_batch(
    triangles: usize,
    n_values: &[usize],
    trials: usize,
    master_seed: u64,
    precision_bits: u32,
    threads: Option<usize>,
) -> Result<ClassicSummary, ExperimentError> {
    use crate::classic::{interlacing_check, jensen_check, marden_check};
    let marden: Vec<Option<f64>> = with_threads(threads, || {
        (0..triangles)
            .into_par_iter()
            .map(|t| marden_check(random_triangle(split(master_seed, 3, t as u64)), precision_bits).ok().map(|r| r.max_deviation))
            .collect()
    })?;
    let segment = MeasureSpec::UniformSegment { a: Complex64::new(0.0, 0.0), b: Complex64::new(1.0, 0.0) };
    let disk = MeasureSpec::UniformDisk { radius: 1.0 };
    // (family, n, passed, hull check) per job; family 0 is interlacing.
    let jobs: Vec<(usize, usize, usize)> = n_values
        .iter()
        .flat_map(|&n| (0..2).flat_map(move |fam| (0..trials).map(move |t| (fam, n, t))))
        .collect();
    let results: Vec<(usize, usize, bool, Option<HullCheck>)> = with_threads(threads, || {
        jobs.par_iter()
            .map(|&(fam, n, t)| {
                let run = || -> Option<(bool, HullCheck)> {
                    let roots = if fam == 0 {
                        sample_roots(&segment, n, split(master_seed, n as u64, t as u64)).ok()?.roots
                    } else {
                        let half = sample_roots(&disk, n / 2, split(master_seed ^ 1, n as u64, t as u64)).ok()?.roots;
                        let mut roots = half.clone();
                        roots.extend(half.iter().map(|z| z.conj()));
                        roots
                    };
                    let cps = critical_points(&RootPolynomial::new(&roots, precision_bits).ok()?).ok()?;
                    let passed = if fam == 0 { interlacing_check(&roots, &cps.points) } else { jensen_check(&roots, &cps.points) };
                    Some((passed.unwrap_or(false), gauss_lucas_check(&roots, &cps.points)))
                };
                match run() {
                    Some((passed, hull)) => (fam, n, passed, Some(hull)),
                    None => (fam, n, false, None),
                }
            })
            .collect()
    })?;
    let tally = |fam: usize| -> Vec<(usize, usize, usize)> {
        n_values
            .iter()
            .map(|&n| {
                let passed = results.iter().filter(|r| r.0 == fam && r.1 == n && r.2).count();
                (n, trials, passed)
            })
            .collect()
    };
    let hulls: Vec<&HullCheck> = results.iter().filter_map(|r| r.3.as_ref()).collect();
    Ok(ClassicSummary {
        triangles,
        marden_max_deviation: marden.iter().flatten().fold(0.0, |a: f64, &b| a.max(b)),
        marden_failures: marden.iter().filter(|m| m.is_none()).count(),
        interlacing: tally(0),
        jensen: tally(1),
        gauss_lucas_trials: results.len(),
        gauss_lucas_violations: results.len() - hulls.iter().filter(|h| h.contained).count(),
        worst_hull_violation: hulls.iter().map(|h| h.worst_violation).fold(f64::NEG_INFINITY, f64::max),
    })
}
