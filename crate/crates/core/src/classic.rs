//! Checks of the classical geometric facts about critical points on small
//! exact cases: Gauss–Lucas, interlacing, Jensen disks, Marden's theorem,
//! and the instability of `z^n - 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{convex_hull, diameter, hull_signed_distance};
use crate::mp::Mpc;
use crate::polyroots::{critical_points, RootPolynomial, SolverError};

/// Relative tolerance for the hull and disk containment checks.
pub const HULL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicError {
    #[error("root {index} is not real: {value}")]
    NotReal { index: usize, value: Complex64 },
    #[error("roots are not closed under conjugation: {0} has no partner")]
    NotConjugateClosed(Complex64),
    #[error("points are collinear")]
    Collinear,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullCheck {
    pub contained: bool,
    /// Largest signed distance from a critical point to the hull
    /// (negative inside).
    pub worst_violation: f64,
}

/// Do the critical points lie in the convex hull of the roots, within
/// `HULL_TOL * diameter`?
pub fn gauss_lucas_check(roots: &[Complex64], cps: &[Complex64]) -> HullCheck {
    let hull = convex_hull(roots);
    let tol = HULL_TOL * diameter(roots);
    let worst_violation = cps.iter().map(|z| hull_signed_distance(&hull, *z)).fold(f64::NEG_INFINITY, f64::max);
    HullCheck { contained: worst_violation <= tol, worst_violation }
}

fn real_scale(points: &[Complex64]) -> f64 {
    points.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

/// For real roots: one critical point strictly between each pair of
/// neighbouring distinct roots, and `m - 1` at each root of multiplicity
/// `m`. Points within the tolerance of a repeated root count toward it.
pub fn interlacing_check(roots: &[Complex64], cps: &[Complex64]) -> Result<bool, ClassicError> {
    let tol = HULL_TOL * real_scale(roots);
    if let Some((index, value)) = roots.iter().enumerate().find(|(_, z)| z.im.abs() > tol) {
        return Err(ClassicError::NotReal { index, value: *value });
    }
    if roots.is_empty() {
        return Err(ClassicError::InvalidArgument("no roots".into()));
    }
    if cps.len() + 1 != roots.len() || cps.iter().any(|z| z.im.abs() > tol) {
        return Ok(false);
    }
    let mut xs: Vec<f64> = roots.iter().map(|z| z.re).collect();
    xs.sort_by(f64::total_cmp);
    let mut distinct: Vec<(f64, usize)> = Vec::new();
    for x in xs {
        match distinct.last_mut() {
            Some((y, m)) if *y == x => *m += 1,
            _ => distinct.push((x, 1)),
        }
    }
    let mut at_root = vec![0usize; distinct.len()];
    let mut between = vec![0usize; distinct.len().saturating_sub(1)];
    for z in cps {
        let x = z.re;
        // Index of the first distinct root >= x.
        let i = distinct.partition_point(|(y, _)| *y < x);
        let near = [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < distinct.len() && distinct[j].1 > 1 && (distinct[j].0 - x).abs() <= tol)
            .find(|&j| at_root[j] + 1 < distinct[j].1);
        if let Some(j) = near {
            at_root[j] += 1;
        } else if i == 0 || i == distinct.len() {
            return Ok(false);
        } else if distinct[i].0 == x {
            // On a simple root: borderline, credit whichever side is short.
            let j = if i < between.len() && between[i] == 0 { i } else { i - 1 };
            between[j] += 1;
        } else {
            between[i - 1] += 1;
        }
    }
    Ok(at_root.iter().zip(&distinct).all(|(&c, &(_, m))| c == m - 1) && between.iter().all(|&c| c == 1))
}

/// For a real polynomial: every non-real critical point lies in a disk
/// whose diameter joins a conjugate pair of roots.
pub fn jensen_check(roots: &[Complex64], cps: &[Complex64]) -> Result<bool, ClassicError> {
    let scale = real_scale(roots);
    let tol = HULL_TOL * scale;
    // Pair roots with their conjugates.
    let mut upper: Vec<Complex64> = roots.iter().copied().filter(|z| z.im > tol).collect();
    let mut lower: Vec<Complex64> = roots.iter().map(|z| z.conj()).filter(|z| z.im > tol).collect();
    let key = |a: &Complex64, b: &Complex64| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
    upper.sort_by(key);
    lower.sort_by(key);
    if upper.len() != lower.len() {
        let z = if upper.len() > lower.len() { upper[lower.len()] } else { lower[upper.len()].conj() };
        return Err(ClassicError::NotConjugateClosed(z));
    }
    for (a, b) in upper.iter().zip(&lower) {
        if (a - b).norm() > tol {
            return Err(ClassicError::NotConjugateClosed(*a));
        }
    }
    Ok(cps.iter().filter(|z| z.im.abs() > tol).all(|z| {
        upper.iter().any(|a| {
            let centre = Complex64::new(a.re, 0.0);
            (z - centre).norm() <= a.im + tol
        })
    }))
}

/// The Steiner inellipse of a triangle, from the triangle alone.
///
/// The triangle is the image of the equilateral triangle on the cube roots
/// of unity under `w -> g + A w + B conj(w)`; the inellipse is the image of
/// that triangle's incircle `|w| = 1/2`, so it is traced by
/// `g + (A e^{it} + B e^{-it}) / 2`, with semi-axes `(|A| +- |B|)/2` and
/// foci `g +- sqrt(A B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteinerInellipse {
    pub center: Complex64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub foci: [Complex64; 2],
    /// Largest distance between a side midpoint and the ellipse point that
    /// should touch it, and largest sine of the angle between the side and
    /// the ellipse tangent there.
    pub tangency_error: f64,
}

pub fn steiner_inellipse(z: [Complex64; 3]) -> Result<SteinerInellipse, ClassicError> {
    let scale = (z[0] - z[1]).norm().max((z[1] - z[2]).norm()).max((z[2] - z[0]).norm());
    let area2 = ((z[1] - z[0]).conj() * (z[2] - z[0])).im;
    if !(area2.abs() > 1e-12 * scale * scale) {
        return Err(ClassicError::Collinear);
    }
    let g = (z[0] + z[1] + z[2]) / 3.0;
    let omega: [Complex64; 3] = [0.0, 1.0, 2.0].map(|k: f64| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k / 3.0));
    let a = (0..3).map(|k| (z[k] - g) * omega[k].conj()).sum::<Complex64>() / 3.0;
    let b = (0..3).map(|k| (z[k] - g) * omega[k]).sum::<Complex64>() / 3.0;
    let point = |w: Complex64| g + (a * w + b * w.conj()) * 0.5;
    let tangent = |w: Complex64| Complex64::i() * (a * w - b * w.conj());
    // The incircle touches the side opposite vertex k at -omega^k / 2.
    let mut tangency_error: f64 = 0.0;
    for k in 0..3 {
        let w = -omega[k];
        let mid = (z[(k + 1) % 3] + z[(k + 2) % 3]) * 0.5;
        tangency_error = tangency_error.max((point(w) - mid).norm() / scale);
        let side = z[(k + 2) % 3] - z[(k + 1) % 3];
        let t = tangent(w);
        tangency_error = tangency_error.max((side.conj() * t).im.abs() / (side.norm() * t.norm()));
    }
    let f = (a * b).sqrt();
    Ok(SteinerInellipse {
        center: g,
        semi_major: 0.5 * (a.norm() + b.norm()),
        semi_minor: 0.5 * (a.norm() - b.norm()).abs(),
        foci: [g + f, g - f],
        tangency_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MardenReport {
    pub foci: [Complex64; 2],
    pub critical_points: [Complex64; 2],
    /// Largest distance between a focus and its matched critical point.
    pub max_deviation: f64,
}

/// Compare the foci of the Steiner inellipse with the critical points of
/// `(z - z1)(z - z2)(z - z3)` computed at `precision_bits`.
pub fn marden_check(z: [Complex64; 3], precision_bits: u32) -> Result<MardenReport, ClassicError> {
    let ellipse = steiner_inellipse(z)?;
    let cps = critical_points(&RootPolynomial::new(&z, precision_bits)?)?;
    let p = [cps.points[0], cps.points[1]];
    let f = ellipse.foci;
    let straight = (f[0] - p[0]).norm().max((f[1] - p[1]).norm());
    let crossed = (f[0] - p[1]).norm().max((f[1] - p[0]).norm());
    Ok(MardenReport { foci: f, critical_points: p, max_deviation: straight.min(crossed) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationStep {
    /// How far the moving root has travelled towards its neighbour.
    pub fraction: f64,
    pub max_modulus: f64,
}

/// Critical points of `z^n - 1` while root `j = seed mod n` slides along the
/// circle to its neighbour `j + 1`, at `steps + 1` evenly spaced fractions.
///
/// At fraction 0 all critical points sit at the origin; at fraction 1 the
/// double root is itself a critical point on the unit circle.
pub fn perturbation_demo(n: usize, steps: usize, precision_bits: u32, seed: u64) -> Result<Vec<PerturbationStep>, ClassicError> {
    if n < 3 {
        return Err(ClassicError::InvalidArgument(format!("n = {n} < 3")));
    }
    if steps == 0 {
        return Err(ClassicError::InvalidArgument("steps = 0".into()));
    }
    let j = (seed % n as u64) as usize;
    (0..=steps)
        .map(|s| {
            let fraction = s as f64 / steps as f64;
            let roots: Vec<Mpc> = (0..n)
                .map(|k| {
                    let t = if k == j { k as f64 + fraction } else { k as f64 };
                    Mpc::turn(precision_bits, t, n as u64)
                })
                .collect();
            let cps = critical_points(&RootPolynomial::from_mp(roots, precision_bits)?)?;
            let max_modulus = cps.points.iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok(PerturbationStep { fraction, max_modulus })
        })
        .collect()
}
