//! Aberth–Ehrlich simultaneous iteration, generic over the scalar type.
//!
//! The driver only needs the Newton ratio `q'/q` of the target function at a
//! point; the Aberth correction
//! `w_i = 1 / (q'/q(z_i) - sum_{j != i} 1/(z_i - z_j))` then makes the
//! estimates repel each other so that all zeros are found at once.
//! Updates are Gauss–Seidel (each new estimate is used immediately), in
//! index order, so a run is deterministic.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::mp::ComplexField;

/// Outcome of [`iterate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sweeps {
    pub converged: bool,
    pub sweeps: usize,
}

/// Run Aberth sweeps until every correction is at most `tol` in modulus.
///
/// `ratio(z)` returns `q'(z)/q(z)`, or `None` when `z` sits on a pole of
/// the ratio (a zero of the denominator we divided out); such an estimate is
/// nudged by `tol` and retried. A non-finite ratio means `q(z) = 0` exactly.
/// An estimate whose correction fell below `tol`
/// is frozen, but still repels the others.
pub fn iterate<T, F>(ratio: F, z: &mut [T], tol: f64, max_sweeps: usize) -> Sweeps
where
    T: ComplexField,
    F: Fn(&T) -> Option<T>,
{
    let d = z.len();
    let mut done = vec![false; d];
    for sweep in 1..=max_sweeps {
        let mut all = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let Some(r) = ratio(&z[i]) else {
                let nudge = z[i].lift(Complex64::new(tol, 0.5 * tol));
                z[i] = z[i].add(&nudge);
                all = false;
                continue;
            };
            if !r.is_finite() {
                // q vanishes exactly at z_i.
                done[i] = true;
                continue;
            }
            let mut repel = z[i].zero_like();
            for j in 0..d {
                if j == i {
                    continue;
                }
                let diff = z[i].sub(&z[j]);
                if !diff.is_zero() {
                    repel = repel.add(&diff.recip());
                }
            }
            let denom = r.sub(&repel);
            if denom.is_zero() || !denom.is_finite() {
                all = false;
                continue;
            }
            let w = denom.recip();
            z[i] = z[i].sub(&w);
            if w.abs_f64() <= tol {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            return Sweeps { converged: true, sweeps: sweep };
        }
    }
    Sweeps { converged: false, sweeps: max_sweeps }
}

/// `d` starting points on the circle `|z - center| = radius`.
///
/// The angles are offset by a fixed irrational step so that no start lies on
/// a symmetry axis of a symmetric root configuration.
pub fn initial_points(center: Complex64, radius: f64, d: usize) -> Vec<Complex64> {
    const OFFSET: f64 = 0.411;
    const JITTER: f64 = 0.618_033_988_749_895;
    (0..d)
        .map(|j| {
            let jitter = 0.25 * ((j as f64 * JITTER).fract() - 0.5);
            let theta = 2.0 * PI * (j as f64 + jitter) / d as f64 + OFFSET;
            center + Complex64::from_polar(radius, theta)
        })
        .collect()
}
