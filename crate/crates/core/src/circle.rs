//! Roots on the unit circle.
//!
//! For `f_n` with IID uniform roots on `|z| = 1`, the critical points inside
//! `B_rho` (`rho < 1`) are the zeros of `f_n'/f_n = -sum_r sqrt(n) a_{nr} z^r`
//! with `a_{nr} = n^{-1/2} sum_j X_j^{-r-1}`. The `a_{nr}` are asymptotically
//! IID standard complex normal, so the limit is the zero set of the Gaussian
//! power series `sum Y_j z^j`, whose count in `B_rho` is a sum of independent
//! Bernoullis with means `rho^{2k}`.

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::measures::{sample_roots, MeasureSpec};
use crate::polyroots::{critical_points, polynomial_zeros, RootPolynomial, SolverError};
use crate::summation::ComplexSum;

/// Default truncation tolerance for [`count_law`] and [`sample_gaf_zeros`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// How far `|X|` may be from 1 for [`power_sum_coefficients`].
pub const CIRCLE_TOL: f64 = 1e-12;

/// Number of bins in the modulus histogram of a [`CircleTrial`].
pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircleError {
    #[error("root {index} has modulus {modulus}, not on the unit circle")]
    OffCircle { index: usize, modulus: f64 },
    #[error("rho must lie in (0, 1), got {0}")]
    Rho(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

fn check_rho(rho: f64) -> Result<(), CircleError> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(CircleError::Rho(rho))
    }
}

/// `a_{n,0..=k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub n: usize,
    pub k: usize,
    pub entries: Vec<Complex64>,
}

/// `a_{nr} = n^{-1/2} sum_j X_j^{-r-1}` for `r = 0..=k`.
///
/// Powers are taken as `exp(-i (r+1) theta_j)` from the argument of each
/// root, so they stay exactly on the circle.
pub fn power_sum_coefficients(roots: &[Complex64], k: usize) -> Result<CoefficientVector, CircleError> {
    if roots.is_empty() {
        return Err(CircleError::InvalidArgument("no roots".into()));
    }
    for (index, x) in roots.iter().enumerate() {
        let modulus = x.norm();
        if !((modulus - 1.0).abs() <= CIRCLE_TOL) {
            return Err(CircleError::OffCircle { index, modulus });
        }
    }
    let thetas: Vec<f64> = roots.iter().map(|x| x.arg()).collect();
    let scale = 1.0 / (roots.len() as f64).sqrt();
    let entries = (0..=k)
        .map(|r| {
            let m = (r + 1) as f64;
            let s: ComplexSum = thetas.iter().map(|t| Complex64::from_polar(1.0, -m * t)).collect();
            s.value() * scale
        })
        .collect();
    Ok(CoefficientVector { n: roots.len(), k, entries })
}

/// Law of a sum of independent Bernoullis with means `rho^{2k}`, `k >= 1`,
/// truncated where the remaining means sum to less than the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountLaw {
    pub rho: f64,
    pub means: Vec<f64>,
    pub pmf: Vec<f64>,
}

impl CountLaw {
    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    /// Total variation distance to an empirical pmf (counts indexed by value).
    pub fn tv_distance(&self, counts: &[u64]) -> f64 {
        let total: u64 = counts.iter().sum();
        let len = self.pmf.len().max(counts.len());
        0.5 * (0..len)
            .map(|k| {
                let p = self.pmf.get(k).copied().unwrap_or(0.0);
                let q = counts.get(k).map_or(0.0, |&c| c as f64 / total as f64);
                (p - q).abs()
            })
            .sum::<f64>()
    }
}

/// Distribution of the number of successes of independent Bernoullis.
pub fn poisson_binomial(means: &[f64]) -> Vec<f64> {
    let mut pmf = vec![1.0];
    for &p in means {
        let mut next = vec![0.0; pmf.len() + 1];
        for (k, &q) in pmf.iter().enumerate() {
            next[k] += q * (1.0 - p);
            next[k + 1] += q * p;
        }
        pmf = next;
    }
    pmf
}

pub fn count_law(rho: f64, tail_tol: f64) -> Result<CountLaw, CircleError> {
    check_rho(rho)?;
    if !(tail_tol > 0.0) {
        return Err(CircleError::InvalidArgument(format!("tail_tol = {tail_tol}")));
    }
    let q = rho * rho;
    let mut means = vec![q];
    // Stop at the smallest K with rho^{2(K+1)} / (1 - rho^2) < tail_tol.
    while means.last().unwrap() * q / (1.0 - q) >= tail_tol {
        means.push(means.last().unwrap() * q);
    }
    let pmf = poisson_binomial(&means);
    Ok(CountLaw { rho, means, pmf })
}

/// Expected number of Gaussian-power-series zeros in `B_r`: the integral of
/// the one-point intensity `pi^{-1} (1 - |z|^2)^{-2}`.
pub fn gaf_expected_count(r: f64) -> f64 {
    let q = r * r;
    q / (1.0 - q)
}

/// Distribution function of the modulus of a zero conditioned on `B_rho`.
pub fn gaf_radial_cdf(r: f64, rho: f64) -> f64 {
    (gaf_expected_count(r.clamp(0.0, rho)) / gaf_expected_count(rho)).clamp(0.0, 1.0)
}

/// Zeros of a truncated Gaussian power series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GafSample {
    pub coefficients: Vec<Complex64>,
    pub zeros_in_b_rho: Vec<Complex64>,
    pub rho: f64,
    #[serde(rename = "M")]
    pub m: usize,
    /// Zeros whose position could move across `|z| = rho` under the
    /// truncated tail.
    pub near_boundary: usize,
}

/// Smallest `M` with `rho^{M+1} / (1 - rho) < tail_tol`.
pub fn gaf_degree(rho: f64, tail_tol: f64) -> usize {
    let mut m = 0;
    while rho.powi(m as i32 + 1) / (1.0 - rho) >= tail_tol {
        m += 1;
    }
    m
}

/// Standard complex normal: independent real and imaginary parts of
/// variance 1/2, so `E|Y|^2 = 1`.
pub fn standard_complex_normal(rng: &mut impl rand::Rng) -> Complex64 {
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    Complex64::new(normal.sample(rng), normal.sample(rng))
}

pub fn sample_gaf_zeros(rho: f64, tail_tol: f64, seed: u64) -> Result<GafSample, CircleError> {
    check_rho(rho)?;
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(CircleError::InvalidArgument(format!("tail_tol = {tail_tol}")));
    }
    let m = gaf_degree(rho, tail_tol);
    let mut rng = crate::seed::rng(seed);
    let coefficients: Vec<Complex64> = (0..=m).map(|_| standard_complex_normal(&mut rng)).collect();
    gaf_zeros_of(coefficients, rho, tail_tol)
}

/// Zeros inside `B_rho` of the polynomial with the given coefficients.
pub fn gaf_zeros_of(coefficients: Vec<Complex64>, rho: f64, tail_tol: f64) -> Result<GafSample, CircleError> {
    check_rho(rho)?;
    let m = coefficients.len().saturating_sub(1);
    let zeros = polynomial_zeros(&coefficients, 53)?;
    let biggest = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut inside = Vec::new();
    let mut near_boundary = 0;
    for z in zeros.zeros {
        if z.norm() >= rho {
            continue;
        }
        // The tail moves a simple zero by about |tail| / |p'(z)|.
        let dp: Complex64 = coefficients.iter().enumerate().skip(1).map(|(k, c)| c * k as f64 * z.powu(k as u32 - 1)).sum();
        let shift = tail_tol * biggest / dp.norm();
        if rho - z.norm() <= shift {
            near_boundary += 1;
        }
        inside.push(z);
    }
    Ok(GafSample { coefficients, zeros_in_b_rho: inside, rho, m, near_boundary })
}

/// Pearson chi-square test of zero moduli against [`gaf_radial_cdf`] on
/// `bins` equal-probability bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

pub fn radial_chi_square(moduli: &[f64], rho: f64, bins: usize) -> Result<ChiSquare, CircleError> {
    check_rho(rho)?;
    if bins < 2 || moduli.is_empty() {
        return Err(CircleError::InvalidArgument("need two bins and a nonempty sample".into()));
    }
    let mut counts = vec![0u64; bins];
    for &r in moduli {
        let u = gaf_radial_cdf(r, rho);
        counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = moduli.len() as f64 / bins as f64;
    let statistic = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = bins - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| CircleError::InvalidArgument(e.to_string()))?;
    Ok(ChiSquare { statistic, dof, p_value: 1.0 - dist.cdf(statistic) })
}

/// One circle experiment: `n` uniform roots on the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleTrial {
    pub n: usize,
    /// Critical points with `|z| < rho`.
    #[serde(rename = "N_rho")]
    pub n_rho: usize,
    pub critical_point_count: usize,
    pub coefficients: CoefficientVector,
    /// Counts of critical-point moduli on [`HISTOGRAM_BINS`] equal bins of
    /// `[0, 1]`.
    pub modulus_histogram: Vec<u64>,
    pub precision_used: u32,
}

pub fn circle_trial(n: usize, rho: f64, k: usize, precision_bits: u32, seed: u64) -> Result<CircleTrial, CircleError> {
    check_rho(rho)?;
    if n < 2 {
        return Err(CircleError::InvalidArgument(format!("n = {n} < 2")));
    }
    let sample = sample_roots(&MeasureSpec::UniformCircle { radius: 1.0 }, n, seed)
        .map_err(|e| CircleError::InvalidArgument(e.to_string()))?;
    let coefficients = power_sum_coefficients(&sample.roots, k)?;
    let cps = critical_points(&RootPolynomial::new(&sample.roots, precision_bits)?)?;
    let mut modulus_histogram = vec![0u64; HISTOGRAM_BINS];
    for z in &cps.points {
        let b = ((z.norm() * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
        modulus_histogram[b] += 1;
    }
    Ok(CircleTrial {
        n,
        n_rho: cps.points.iter().filter(|z| z.norm() < rho).count(),
        critical_point_count: cps.len(),
        coefficients,
        modulus_histogram,
        precision_used: cps.precision_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn power_sums_of_simple_configurations() {
        let a = power_sum_coefficients(&[c(1.0, 0.0)], 2).unwrap();
        assert_eq!(a.entries, vec![c(1.0, 0.0); 3]);
        let n = 12;
        let roots = RootPolynomial::roots_of_unity(n, 53).unwrap().roots_c64();
        let a = power_sum_coefficients(&roots, 2 * n).unwrap();
        for (r, e) in a.entries.iter().enumerate() {
            if (r + 1) % n == 0 {
                assert!((e - c((n as f64).sqrt(), 0.0)).norm() < 1e-13, "r={r}: {e}");
            } else {
                assert!(e.norm() < 1e-13, "r={r}: {e}");
            }
        }
        assert!(matches!(power_sum_coefficients(&[c(1.0, 0.1)], 1), Err(CircleError::OffCircle { index: 0, .. })));
        assert!(power_sum_coefficients(&[], 1).is_err());
    }

    #[test]
    fn count_law_at_one_half() {
        let law = count_law(0.5, DEFAULT_TAIL_TOL).unwrap();
        assert!((law.mean() - 1.0 / 3.0).abs() < DEFAULT_TAIL_TOL);
        assert!((law.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(law.means.windows(2).all(|w| w[1] < w[0]));
        // Truncated product with its own tail bound.
        let p0: f64 = (1..200).map(|k| 1.0 - 0.25f64.powi(k)).product();
        assert!((law.pmf[0] - p0).abs() < 1e-8);
        // Mean of the truncated law is the finite geometric sum.
        let kk = law.means.len() as i32;
        let finite = (1.0 - 0.25f64.powi(kk)) / 3.0;
        assert!((law.mean() - finite).abs() < 1e-15);
        assert!(count_law(1.0, 1e-8).is_err());
        assert!(count_law(0.0, 1e-8).is_err());
    }

    #[test]
    fn count_law_concentrates_at_zero_for_small_rho() {
        let law = count_law(1e-4, DEFAULT_TAIL_TOL).unwrap();
        assert!(law.pmf[0] > 1.0 - 1e-7);
    }

    #[test]
    fn poisson_binomial_matches_enumeration() {
        let means = [0.1, 0.5, 0.9, 0.33];
        let pmf = poisson_binomial(&means);
        let mut brute = [0.0; 5];
        for mask in 0u32..16 {
            let p: f64 = (0..4).map(|i| if mask >> i & 1 == 1 { means[i] } else { 1.0 - means[i] }).product();
            brute[mask.count_ones() as usize] += p;
        }
        for (a, b) in pmf.iter().zip(brute) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn tv_distance_examples() {
        let law = CountLaw { rho: 0.5, means: vec![0.5], pmf: vec![0.5, 0.5] };
        assert_eq!(law.tv_distance(&[1, 1]), 0.0);
        assert_eq!(law.tv_distance(&[0, 0, 4]), 1.0);
    }

    #[test]
    fn gaf_sample_is_reproducible_and_inside() {
        let a = sample_gaf_zeros(0.5, DEFAULT_TAIL_TOL, 42).unwrap();
        let b = sample_gaf_zeros(0.5, DEFAULT_TAIL_TOL, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.m, gaf_degree(0.5, DEFAULT_TAIL_TOL));
        assert_eq!(a.coefficients.len(), a.m + 1);
        assert!(a.zeros_in_b_rho.iter().all(|z| z.norm() < 0.5));
        assert!(0.5f64.powi(a.m as i32 + 1) / 0.5 < DEFAULT_TAIL_TOL);
        assert!(0.5f64.powi(a.m as i32) / 0.5 >= DEFAULT_TAIL_TOL);
    }

    #[test]
    fn gaf_zero_count_mean() {
        let t = 400;
        let counts: Vec<f64> = (0..t).map(|s| sample_gaf_zeros(0.5, DEFAULT_TAIL_TOL, s).unwrap().zeros_in_b_rho.len() as f64).collect();
        let mean = counts.iter().sum::<f64>() / t as f64;
        let var = counts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1) as f64;
        assert!((mean - 1.0 / 3.0).abs() < 3.0 * (var / t as f64).sqrt(), "{mean}");
    }

    #[test]
    fn radial_cdf_and_chi_square() {
        assert_eq!(gaf_radial_cdf(0.5, 0.5), 1.0);
        assert_eq!(gaf_radial_cdf(0.0, 0.5), 0.0);
        assert!((gaf_expected_count(0.5) - 1.0 / 3.0).abs() < 1e-16);
        // Inverse-CDF sample passes; a uniform-in-radius sample does not.
        let good: Vec<f64> = (0..2000)
            .map(|i| {
                let u = (i as f64 + 0.5) / 2000.0;
                let t = u / 3.0;
                (t / (1.0 + t)).sqrt()
            })
            .collect();
        assert!(radial_chi_square(&good, 0.5, 10).unwrap().p_value > 0.99);
        let bad: Vec<f64> = (0..2000).map(|i| 0.5 * (i as f64 + 0.5) / 2000.0).collect();
        assert!(radial_chi_square(&bad, 0.5, 10).unwrap().p_value < 0.01);
    }

    #[test]
    fn circle_trial_bookkeeping() {
        let t = circle_trial(60, 0.5, 4, 53, 8).unwrap();
        assert_eq!(t.critical_point_count, 59);
        assert_eq!(t.modulus_histogram.iter().sum::<u64>(), 59);
        assert_eq!(t.coefficients.entries.len(), 5);
        assert!(t.coefficients.entries.iter().all(|a| a.norm() <= (60f64).sqrt()));
        assert!(circle_trial(1, 0.5, 4, 53, 8).is_err());
        assert!(circle_trial(10, 1.5, 4, 53, 8).is_err());
    }

    #[test]
    fn outer_fraction_grows_with_n() {
        // Share of critical points with modulus above 0.9.
        let median_frac = |n: usize| {
            let mut f: Vec<f64> = (0..21u64)
                .map(|s| {
                    let t = circle_trial(n, 0.5, 1, 53, s).unwrap();
                    t.modulus_histogram[18..].iter().sum::<u64>() as f64 / (n - 1) as f64
                })
                .collect();
            f.sort_by(f64::total_cmp);
            f[10]
        };
        let (a, b) = (median_frac(50), median_frac(300));
        assert!(b > a, "{a} {b}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn coefficients_bounded_by_sqrt_n(thetas in prop::collection::vec(-3.2f64..3.2, 1..80)) {
            let roots: Vec<Complex64> = thetas.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
            let a = power_sum_coefficients(&roots, 6).unwrap();
            let bound = (roots.len() as f64).sqrt() * (1.0 + 1e-12);
            prop_assert!(a.entries.iter().all(|e| e.norm() <= bound));
        }

        #[test]
        fn gaf_zeros_conjugate_with_coefficients(seed in 0u64..10_000) {
            let a = sample_gaf_zeros(0.5, DEFAULT_TAIL_TOL, seed).unwrap();
            let conj: Vec<Complex64> = a.coefficients.iter().map(|c| c.conj()).collect();
            let b = gaf_zeros_of(conj, 0.5, DEFAULT_TAIL_TOL).unwrap();
            prop_assert_eq!(a.zeros_in_b_rho.len(), b.zeros_in_b_rho.len());
            for z in &a.zeros_in_b_rho {
                let best = b.zeros_in_b_rho.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-10);
            }
        }

        #[test]
        fn count_law_pmf_is_a_distribution(rho in 0.05f64..0.95) {
            let law = count_law(rho, DEFAULT_TAIL_TOL).unwrap();
            prop_assert!(law.pmf.iter().all(|p| *p >= 0.0));
            prop_assert!((law.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let geometric = rho * rho / (1.0 - rho * rho);
            prop_assert!((law.mean() - geometric).abs() < DEFAULT_TAIL_TOL);
        }

        #[test]
        fn circle_critical_points_stay_in_the_disk(seed in 0u64..1000) {
            let s = sample_roots(&MeasureSpec::UniformCircle { radius: 1.0 }, 40, seed).unwrap();
            let cps = critical_points(&RootPolynomial::new(&s.roots, 53).unwrap()).unwrap();
            prop_assert!(cps.points.iter().zip(&cps.error_radii).all(|(z, r)| z.norm() <= 1.0 + r + 1e-12));
        }
    }
}
