//! Aggregation of trial reports into a summary.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::statistics::{Data, Median, Statistics};

use super::{ExperimentConfig, TrialReport, MODULUS_BINS};
use crate::circle::{count_law, CoefficientVector, CountLaw, DEFAULT_TAIL_TOL};
use crate::measures::MeasureSpec;
use crate::polyroots::tau_cert;

/// Location and spread of a batch of numbers; all zero for an empty batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(xs: &[f64]) -> Self {
        let count = xs.len();
        if count == 0 {
            return Stats { count, mean: 0.0, median: 0.0, std_error: 0.0, min: 0.0, max: 0.0 };
        }
        let sd = if count > 1 { xs.std_dev() } else { 0.0 };
        Stats {
            count,
            mean: xs.mean(),
            median: Data::new(xs.to_vec()).median(),
            std_error: sd / (count as f64).sqrt(),
            min: xs.min(),
            max: xs.max(),
        }
    }
}

/// Observed `N_rho` against the limiting count law (unit circle only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSummary {
    pub expected_mean: f64,
    pub observed: Stats,
    /// `|observed mean - expected mean|` in standard errors; absent when
    /// the standard error is zero.
    pub z_score: Option<f64>,
    pub tv_distance: f64,
    /// `histogram[k]` trials had `N_rho = k`.
    pub histogram: Vec<u64>,
}

/// Moments of `a_{n,r}` over trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientStats {
    pub r: usize,
    pub mean_re: f64,
    pub mean_im: f64,
    pub var_re: f64,
    pub var_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: usize,
    pub trials: usize,
    pub failed: usize,
    pub prohorov: Stats,
    pub matched_fraction: Stats,
    #[serde(rename = "N_rho")]
    pub n_rho: Stats,
    pub gauss_lucas_violations: usize,
    pub max_precision_used: u32,
    /// Pooled over trials, bins as in `modulus_bins.csv`.
    pub modulus_histogram: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub count_law: Option<CountSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub coefficients: Vec<CoefficientStats>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub failure_budget: f64,
    /// Certification threshold at the configured starting precision.
    pub tau: f64,
    pub prohorov_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub measure: MeasureSpec,
    pub master_seed: u64,
    pub trials: usize,
    pub rho: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub thresholds: Thresholds,
    pub per_n: Vec<NSummary>,
    pub total_trials: usize,
    pub failed_trials: usize,
    pub gauss_lucas_violations: usize,
    pub budget_exceeded: bool,
}

/// Compare observed counts with `law`.
pub fn count_summary(law: &CountLaw, counts: &[f64]) -> CountSummary {
    let observed = Stats::of(counts);
    let mut histogram = vec![0u64; counts.iter().fold(0.0f64, |a, &b| a.max(b)) as usize + 1];
    for &k in counts {
        histogram[k as usize] += 1;
    }
    let expected_mean = law.mean();
    CountSummary {
        expected_mean,
        z_score: (observed.std_error > 0.0).then(|| (observed.mean - expected_mean).abs() / observed.std_error),
        tv_distance: law.tv_distance(&histogram),
        observed,
        histogram,
    }
}

/// Per-`r` moments over a batch of coefficient vectors.
pub fn coefficient_stats(vecs: &[&CoefficientVector]) -> Vec<CoefficientStats> {
    let Some(first) = vecs.first() else {
        return Vec::new();
    };
    (0..first.entries.len())
        .map(|r| {
            let re: Vec<f64> = vecs.iter().filter_map(|v| v.entries.get(r)).map(|a| a.re).collect();
            let im: Vec<f64> = vecs.iter().filter_map(|v| v.entries.get(r)).map(|a| a.im).collect();
            let var = |xs: &[f64]| if xs.len() > 1 { xs.variance() } else { 0.0 };
            CoefficientStats { r, mean_re: re.as_slice().mean(), mean_im: im.as_slice().mean(), var_re: var(&re), var_im: var(&im) }
        })
        .collect()
}

/// Summarize `reports`. The result depends only on the multiset of reports
/// (they are sorted by `(n, trial)` first) and ignores timings.
pub fn aggregate(config: &ExperimentConfig, reports: &[TrialReport]) -> Summary {
    let mut by_n: BTreeMap<usize, Vec<&TrialReport>> = config.n_values.iter().map(|&n| (n, Vec::new())).collect();
    for r in reports {
        by_n.entry(r.n).or_default().push(r);
    }
    let law = match config.measure {
        MeasureSpec::UniformCircle { radius } if radius == 1.0 => count_law(config.rho, DEFAULT_TAIL_TOL).ok(),
        _ => None,
    };
    let mut per_n = Vec::new();
    for (n, mut rs) in by_n {
        rs.sort_by_key(|r| r.trial_index);
        let ok: Vec<&TrialReport> = rs.iter().copied().filter(|r| !r.failed()).collect();
        let collect = |f: &dyn Fn(&TrialReport) -> Option<f64>| -> Vec<f64> { ok.iter().filter_map(|r| f(r)).collect() };
        let mut modulus_histogram = vec![0u64; MODULUS_BINS];
        for h in ok.iter().filter_map(|r| r.modulus_histogram.as_ref()) {
            for (acc, c) in modulus_histogram.iter_mut().zip(h) {
                *acc += c;
            }
        }
        let n_rho_values = collect(&|r| r.n_rho.map(|k| k as f64));
        let count_summary = law.as_ref().filter(|_| !n_rho_values.is_empty()).map(|law| count_summary(law, &n_rho_values));
        let vecs: Vec<&CoefficientVector> = ok.iter().filter_map(|r| r.coefficients.as_ref()).collect();
        let coefficients = coefficient_stats(&vecs);
        per_n.push(NSummary {
            n,
            trials: rs.len(),
            failed: rs.len() - ok.len(),
            prohorov: Stats::of(&collect(&|r| r.prohorov_to_reference)),
            matched_fraction: Stats::of(&collect(&|r| r.pairing.as_ref().map(|p| p.matched_fraction()))),
            n_rho: Stats::of(&n_rho_values),
            gauss_lucas_violations: ok.iter().filter(|r| r.gauss_lucas.as_ref().is_some_and(|g| !g.contained)).count(),
            max_precision_used: ok.iter().filter_map(|r| r.precision_used).max().unwrap_or(0),
            modulus_histogram,
            count_law: count_summary,
            coefficients,
        });
    }
    let total_trials = reports.len();
    let failed_trials = reports.iter().filter(|r| r.failed()).count();
    Summary {
        measure: config.measure.clone(),
        master_seed: config.master_seed,
        trials: config.trials,
        rho: config.rho,
        c: config.c,
        thresholds: Thresholds {
            failure_budget: config.failure_budget,
            tau: tau_cert(config.precision_bits),
            prohorov_tol: config.prohorov_tol,
        },
        gauss_lucas_violations: per_n.iter().map(|s| s.gauss_lucas_violations).sum(),
        per_n,
        total_trials,
        failed_trials,
        budget_exceeded: total_trials > 0 && failed_trials as f64 > config.failure_budget * total_trials as f64,
    }
}
