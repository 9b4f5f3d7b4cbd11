//! Root distributions: descriptions, sampling, potentials and energy.
//!
//! The potential of a measure is its Cauchy transform
//! `V(z) = integral 1/(z - w) dmu(w)`. Every built-in measure has a closed form
//! for it; the truncated potential, which caps the kernel at modulus `K`, is
//! integrated numerically.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_scaled, integrate_with_breaks, Estimate, QuadratureError};
use crate::seed;
use crate::summation::{ComplexSum, NeumaierSum};

/// Relative tolerance for all numerically integrated potentials.
pub const QUAD_TOL: f64 = 1e-10;

/// Smallest pair budget accepted by [`energy_estimate`].
pub const MIN_ENERGY_PAIRS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("invalid measure: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("potential is singular at {z}")]
    Singular { z: Complex64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub at: Complex64,
    pub weight: f64,
}

/// A probability measure on the complex plane.
///
/// In TOML: `kind = "uniform_disk"`, `radius = 1.0`; complex numbers are
/// written as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    UniformCircle { radius: f64 },
    UniformDisk { radius: f64 },
    UniformSegment { a: Complex64, b: Complex64 },
    Atomic { atoms: Vec<Atom> },
    UniformAnnulus { r_inner: f64, r_outer: f64 },
    /// `mean + scale * Y` with `Y` standard complex normal (`E|Y|^2 = 1`).
    ComplexGaussian { mean: Complex64, scale: f64 },
}

fn positive(name: &str, x: f64) -> Result<(), MeasureError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(MeasureError::InvalidSpec(format!("{name} must be positive and finite, got {x}")))
    }
}

fn finite(name: &str, z: Complex64) -> Result<(), MeasureError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(MeasureError::InvalidSpec(format!("{name} must be finite, got {z}")))
    }
}

impl MeasureSpec {
    pub fn validate(&self) -> Result<(), MeasureError> {
        match self {
            MeasureSpec::UniformCircle { radius } | MeasureSpec::UniformDisk { radius } => {
                positive("radius", *radius)
            }
            MeasureSpec::UniformSegment { a, b } => {
                finite("segment endpoint", *a)?;
                finite("segment endpoint", *b)?;
                if a == b {
                    return Err(MeasureError::InvalidSpec(
                        "segment endpoints must be distinct".into(),
                    ));
                }
                Ok(())
            }
            MeasureSpec::Atomic { atoms } => {
                if atoms.is_empty() {
                    return Err(MeasureError::InvalidSpec("atomic measure has no atoms".into()));
                }
                for atom in atoms {
                    finite("atom", atom.at)?;
                    positive("atom weight", atom.weight)?;
                }
                let total: NeumaierSum = atoms.iter().map(|a| a.weight).collect();
                if (total.value() - 1.0).abs() > 1e-12 {
                    return Err(MeasureError::InvalidSpec(format!(
                        "atom weights sum to {}, not 1",
                        total.value()
                    )));
                }
                Ok(())
            }
            MeasureSpec::UniformAnnulus { r_inner, r_outer } => {
                if !(r_inner.is_finite() && r_outer.is_finite())
                    || *r_inner < 0.0
                    || r_inner >= r_outer
                {
                    return Err(MeasureError::InvalidSpec(format!(
                        "annulus needs 0 <= r_inner < r_outer, got {r_inner}, {r_outer}"
                    )));
                }
                Ok(())
            }
            MeasureSpec::ComplexGaussian { mean, scale } => {
                finite("mean", *mean)?;
                positive("scale", *scale)
            }
        }
    }

    /// Whether the measure has point masses (and so infinite 1-energy).
    pub fn is_atomic(&self) -> bool {
        matches!(self, MeasureSpec::Atomic { .. })
    }

    /// Radius of a disk about the origin holding the support, or `None` for
    /// the Gaussian.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            MeasureSpec::UniformCircle { radius } | MeasureSpec::UniformDisk { radius } => {
                Some(*radius)
            }
            MeasureSpec::UniformSegment { a, b } => Some(a.norm().max(b.norm())),
            MeasureSpec::Atomic { atoms } => {
                Some(atoms.iter().map(|a| a.at.norm()).fold(0.0, f64::max))
            }
            MeasureSpec::UniformAnnulus { r_outer, .. } => Some(*r_outer),
            MeasureSpec::ComplexGaussian { .. } => None,
        }
    }

    /// One draw from the measure.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match self {
            MeasureSpec::UniformCircle { radius } => {
                let theta = 2.0 * PI * rng.random::<f64>();
                Complex64::from_polar(*radius, theta)
            }
            MeasureSpec::UniformDisk { radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                let theta = 2.0 * PI * rng.random::<f64>();
                Complex64::from_polar(r, theta)
            }
            MeasureSpec::UniformSegment { a, b } => {
                let t: f64 = rng.random();
                a + (b - a) * t
            }
            MeasureSpec::Atomic { atoms } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for atom in atoms {
                    acc += atom.weight;
                    if u < acc {
                        return atom.at;
                    }
                }
                atoms[atoms.len() - 1].at
            }
            MeasureSpec::UniformAnnulus { r_inner, r_outer } => {
                let (a2, b2) = (r_inner * r_inner, r_outer * r_outer);
                let r = (a2 + rng.random::<f64>() * (b2 - a2)).sqrt();
                let theta = 2.0 * PI * rng.random::<f64>();
                Complex64::from_polar(r, theta)
            }
            MeasureSpec::ComplexGaussian { mean, scale } => {
                let s = scale * std::f64::consts::FRAC_1_SQRT_2;
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                mean + Complex64::new(s * x, s * y)
            }
        }
    }
}

/// `n` IID roots and the seed that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSample {
    pub roots: Vec<Complex64>,
    pub seed: u64,
    pub spec: MeasureSpec,
}

impl RootSample {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

pub fn sample_roots(spec: &MeasureSpec, n: usize, seed: u64) -> Result<RootSample, MeasureError> {
    spec.validate()?;
    if n == 0 {
        return Err(MeasureError::InvalidArgument("sample size must be at least 1".into()));
    }
    let mut rng = seed::rng(seed);
    let roots = (0..n).map(|_| spec.draw(&mut rng)).collect();
    Ok(RootSample {
        roots,
        seed,
        spec: spec.clone(),
    })
}

/// Cauchy transform `V(z) = integral 1/(z - w) dmu(w)` in closed form.
///
/// Errors with [`MeasureError::Singular`] where the integral does not
/// converge: on an atom, on the circle, on the segment.
pub fn potential(spec: &MeasureSpec, z: Complex64) -> Result<Complex64, MeasureError> {
    spec.validate()?;
    let one = Complex64::new(1.0, 0.0);
    let r = z.norm();
    let v = match spec {
        MeasureSpec::UniformCircle { radius } => {
            if (r - radius).abs() <= 1e-14 * radius {
                return Err(MeasureError::Singular { z });
            }
            if r < *radius {
                Complex64::new(0.0, 0.0)
            } else {
                one / z
            }
        }
        MeasureSpec::UniformDisk { radius } => {
            if r <= *radius {
                z.conj() / (radius * radius)
            } else {
                one / z
            }
        }
        MeasureSpec::UniformAnnulus { r_inner, r_outer } => {
            if r <= *r_inner {
                Complex64::new(0.0, 0.0)
            } else if r >= *r_outer {
                one / z
            } else {
                let frac = (r * r - r_inner * r_inner) / (r_outer * r_outer - r_inner * r_inner);
                frac / z
            }
        }
        MeasureSpec::UniformSegment { a, b } => {
            let len = b - a;
            if segment_distance(z, *a, *b) <= 1e-14 * len.norm() {
                return Err(MeasureError::Singular { z });
            }
            // The path from z-a to z-b avoids 0, so the principal log of the
            // ratio is the continuous one.
            ((z - a) / (z - b)).ln() / len
        }
        MeasureSpec::Atomic { atoms } => {
            let mut acc = ComplexSum::new();
            for atom in atoms {
                let d = z - atom.at;
                if d.re == 0.0 && d.im == 0.0 {
                    return Err(MeasureError::Singular { z });
                }
                acc.add(atom.weight / d);
            }
            acc.value()
        }
        MeasureSpec::ComplexGaussian { mean, scale } => {
            let d = z - mean;
            let r2 = d.norm_sqr();
            if r2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                -(-r2 / (scale * scale)).exp_m1() / d
            }
        }
    };
    Ok(v)
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let len = b - a;
    let t = ((z - a) * len.conj()).re / len.norm_sqr();
    (z - (a + len * t.clamp(0.0, 1.0))).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    /// Monte Carlo mean of `1/|Z - W|`, or `+inf` when divergence was detected.
    pub value: f64,
    pub std_error: f64,
    pub pairs_used: usize,
    pub infinite: bool,
}

/// Largest number of cap doublings examined by the divergence test.
const ENERGY_LEVELS: usize = 24;
/// The first cap is this multiple of the sample median of `1/|Z - W|`.
const ENERGY_BASE: f64 = 4.0;
const ENERGY_GROWTH: f64 = 0.05;
const ENERGY_RUN: usize = 4;

/// Monte Carlo estimate of the 1-energy `E 1/|Z - W|` for independent
/// `Z, W ~ mu`.
///
/// Divergence is detected on the capped means `E min(1/|Z - W|, K)` for
/// `K = K_0, 2 K_0, 4 K_0, ...`: if the capped mean grows by more than 5%
/// on four consecutive doublings the energy is reported infinite. For a
/// finite energy the capped mean settles geometrically fast; a logarithmic
/// divergence keeps adding a fixed amount per doubling. Atomic measures are
/// infinite outright, since `Z = W` with positive probability.
pub fn energy_estimate(
    spec: &MeasureSpec,
    pairs: usize,
    seed: u64,
) -> Result<EnergyEstimate, MeasureError> {
    spec.validate()?;
    if pairs < MIN_ENERGY_PAIRS {
        return Err(MeasureError::InvalidArgument(format!(
            "energy needs at least {MIN_ENERGY_PAIRS} pairs, got {pairs}"
        )));
    }
    if spec.is_atomic() {
        return Ok(EnergyEstimate {
            value: f64::INFINITY,
            std_error: 0.0,
            pairs_used: pairs,
            infinite: true,
        });
    }
    let mut rng = seed::rng(seed);
    let mut xs = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let z = spec.draw(&mut rng);
        let w = spec.draw(&mut rng);
        xs.push(1.0 / (z - w).norm());
    }
    let infinite_pairs = xs.iter().any(|x| x.is_infinite());
    let (mean, std_error) = mean_and_se(&xs);
    let infinite = infinite_pairs || capped_means_diverge(&xs);
    Ok(EnergyEstimate {
        value: if infinite { f64::INFINITY } else { mean },
        std_error: if infinite { 0.0 } else { std_error },
        pairs_used: pairs,
        infinite,
    })
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().copied().collect::<NeumaierSum>().value() / n;
    let ss = xs
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .collect::<NeumaierSum>()
        .value();
    let var = if xs.len() > 1 { ss / (n - 1.0) } else { 0.0 };
    (mean, (var / n).sqrt())
}

fn capped_means_diverge(xs: &[f64]) -> bool {
    let mut sorted: Vec<f64> = xs.to_vec();
    let mid = sorted.len() / 2;
    let (_, median, _) = sorted.select_nth_unstable_by(mid, f64::total_cmp);
    let mut cap = ENERGY_BASE * *median;
    let capped = |k: f64| xs.iter().map(|x| x.min(k)).collect::<NeumaierSum>().value();
    let mut prev = capped(cap);
    let mut run = 0;
    for _ in 0..ENERGY_LEVELS {
        cap *= 2.0;
        let next = capped(cap);
        if next > prev * (1.0 + ENERGY_GROWTH) {
            run += 1;
            if run >= ENERGY_RUN {
                return true;
            }
        } else {
            run = 0;
        }
        prev = next;
    }
    false
}

/// The truncated kernel `phi^{K,z}(w) = (1/(z-w)) |z-w| / max(|z-w|, 1/K)`.
///
/// At `w = z` the formula is `0/0`; we take the value `K` (real, positive),
/// which keeps `|phi|` continuous and capped at `K`.
pub fn truncated_kernel(z: Complex64, w: Complex64, k: f64) -> Complex64 {
    let d = z - w;
    let r = d.norm();
    if r == 0.0 {
        return Complex64::new(k, 0.0);
    }
    d.conj() / (r * r.max(1.0 / k))
}

/// `integral phi^{K,z}(w) dmu(w)`.
///
/// Atomic measures are summed exactly. On the circle and the segment the
/// kernel is integrated directly, split at its kinks (`|z - w| = 1/K`). For
/// the measures with a density, `phi` differs from `1/(z - w)` only on the
/// ball `B(z, 1/K)`, so the result is the closed-form potential plus an
/// integral over that ball in polar coordinates about `z`, where the
/// integrand is bounded.
pub fn truncated_potential(spec: &MeasureSpec, z: Complex64, k: f64) -> Result<Complex64, MeasureError> {
    spec.validate()?;
    if !(k.is_finite() && k > 0.0) {
        return Err(MeasureError::InvalidArgument(format!("K must be positive, got {k}")));
    }
    let kernel = |w: Complex64| {
        let v = truncated_kernel(z, w, k);
        assert!(v.norm() <= k * (1.0 + 1e-12), "truncated kernel exceeds K");
        v
    };
    let v = match spec {
        MeasureSpec::Atomic { atoms } => atoms
            .iter()
            .map(|a| a.weight * kernel(a.at))
            .collect::<ComplexSum>()
            .value(),
        MeasureSpec::UniformCircle { radius } => circle_average(z, *radius, k, &kernel)?,
        MeasureSpec::UniformSegment { a, b } => segment_average(z, *a, *b, k, &kernel)?,
        MeasureSpec::UniformDisk { radius } => {
            let dens = 1.0 / (PI * radius * radius);
            let density = |w: Complex64| if w.norm() <= *radius { dens } else { 0.0 };
            potential(spec, z)? + ball_correction(z, k, &kernel, density, &[*radius])?
        }
        MeasureSpec::UniformAnnulus { r_inner, r_outer } => {
            let dens = 1.0 / (PI * (r_outer * r_outer - r_inner * r_inner));
            let density = |w: Complex64| {
                let r = w.norm();
                if r >= *r_inner && r <= *r_outer {
                    dens
                } else {
                    0.0
                }
            };
            potential(spec, z)? + ball_correction(z, k, &kernel, density, &[*r_inner, *r_outer])?
        }
        MeasureSpec::ComplexGaussian { mean, scale } => {
            let s2 = scale * scale;
            let density = |w: Complex64| (-(w - mean).norm_sqr() / s2).exp() / (PI * s2);
            potential(spec, z)? + ball_correction(z, k, &kernel, density, &[])?
        }
    };
    Ok(v)
}

/// Mean of `f` over the circle of radius `s` about the origin, where `f` has
/// a kink at distance `1/K` from `z`.
fn circle_average<F>(z: Complex64, s: f64, k: f64, f: &F) -> Result<Complex64, MeasureError>
where
    F: Fn(Complex64) -> Complex64,
{
    let rho = z.norm();
    let alpha = if rho > 0.0 { z.arg() } else { 0.0 };
    let mut breaks = vec![alpha - PI, alpha, alpha + PI];
    if let Some(beta) = triangle_angle(rho, s, 1.0 / k) {
        breaks.push(alpha - beta);
        breaks.push(alpha + beta);
    }
    let v = integrate_with_breaks(|t| f(Complex64::from_polar(s, t)), &breaks, QUAD_TOL)?;
    Ok(v / (2.0 * PI))
}

fn segment_average<F>(
    z: Complex64,
    a: Complex64,
    b: Complex64,
    k: f64,
    f: &F,
) -> Result<Complex64, MeasureError>
where
    F: Fn(Complex64) -> Complex64,
{
    let len = b - a;
    let l2 = len.norm_sqr();
    let t_star = ((z - a) * len.conj()).re / l2;
    let perp = (z - (a + len * t_star)).norm();
    let mut breaks = vec![0.0, 1.0];
    let mut push = |t: f64| {
        if t > 0.0 && t < 1.0 {
            breaks.push(t);
        }
    };
    push(t_star);
    let inv_k = 1.0 / k;
    if perp < inv_k {
        let h = (inv_k * inv_k - perp * perp).sqrt() / l2.sqrt();
        push(t_star - h);
        push(t_star + h);
    }
    Ok(integrate_with_breaks(|t| f(a + len * t), &breaks, QUAD_TOL)?)
}

/// Angle between sides `a` and `b` of the triangle with sides `a, b, c`,
/// or `None` if no proper triangle exists.
///
/// Kahan's ordering of the Heron product keeps nearly flat triangles, where
/// `acos` of the cosine rule loses half the digits, accurate.
fn triangle_angle(a: f64, b: f64, c: f64) -> Option<f64> {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [x, y, z] = s;
    let p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    if !(p > 0.0) {
        return None;
    }
    Some(p.sqrt().atan2(a * a + b * b - c * c))
}

/// `integral_{B(z, 1/K)} (phi(w) - 1/(z - w)) density(w) dA(w)`.
///
/// In polar coordinates `w = z + r e^{i psi}` the factor `r` of the area
/// element cancels the pole, leaving a bounded integrand. `boundaries` are
/// the radii of circles about the origin where `density` jumps; the angular
/// integral is split where they cross the circle `|w - z| = r`.
fn ball_correction<F, D>(
    z: Complex64,
    k: f64,
    f: &F,
    density: D,
    boundaries: &[f64],
) -> Result<Complex64, MeasureError>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> f64,
{
    let rho = z.norm();
    let alpha = if rho > 0.0 { z.arg() } else { 0.0 };
    let inv_k = 1.0 / k;
    let angular = |r: f64| -> Result<Estimate, QuadratureError> {
        let mut breaks = vec![0.0, 2.0 * PI];
        for &big_r in boundaries {
            // The angle at z between the directions to 0 and to w.
            if let Some(gamma) = triangle_angle(rho, r, big_r) {
                breaks.push((alpha + PI + gamma).rem_euclid(2.0 * PI));
                breaks.push((alpha + PI - gamma).rem_euclid(2.0 * PI));
            }
        }
        integrate_scaled(
            |psi| {
                let u = Complex64::from_polar(1.0, psi);
                let w = z + u * r;
                let dens = density(w);
                if dens == 0.0 {
                    return (Complex64::new(0.0, 0.0), 0.0);
                }
                // r / (z - w) = -1/u exactly.
                let v = (f(w) * r + u.conj()) * dens;
                (v, v.norm())
            },
            &breaks,
            QUAD_TOL,
        )
    };
    let mut radial_breaks = vec![0.0, inv_k];
    for &big_r in boundaries {
        for b in [(rho - big_r).abs(), rho + big_r] {
            if b > 0.0 && b < inv_k {
                radial_breaks.push(b);
            }
        }
    }
    let mut err = None;
    // The angular integrals cancel heavily; budget against their |.| mass.
    let e = integrate_scaled(
        |r| match angular(r) {
            Ok(e) => (e.value, e.scale),
            Err(e) => {
                err.get_or_insert(e);
                (Complex64::new(0.0, 0.0), 0.0)
            }
        },
        &radial_breaks,
        QUAD_TOL,
    )?;
    match err {
        Some(e) => Err(e.into()),
        None => Ok(e.value),
    }
}
