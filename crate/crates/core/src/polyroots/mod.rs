//! Polynomials in root form and their critical points.
//!
//! `f(z) = prod_j (z - X_j)` is never expanded for the solve. Its critical
//! points are the zeros of the log-derivative
//! `f'/f = sum_a m_a / (z - Y_a)` over the distinct roots `Y_a` (with
//! multiplicities `m_a`), together with `m_a - 1` copies of every repeated
//! root. The rational function is evaluated term by term, which stays
//! accurate where the expanded coefficients of `f'` would have lost every
//! digit (roots on a circle, say).
//!
//! The solve runs Aberth iteration in `f64` first, then polishes in MPFR
//! at the working precision and certifies every point at twice that
//! precision. Failed certification doubles the precision, up to
//! [`MAX_ESCALATIONS`] times.

mod aberth;
mod dd;
mod expand;

use std::cmp::Ordering;

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mp::{ComplexField, Mpc, MIN_PRECISION};
use crate::summation::ComplexSum;
use dd::Dd;

pub use aberth::{initial_points, iterate, Sweeps};
pub use expand::{differentiate, expand_roots};

pub const MAX_ESCALATIONS: u32 = 8;
const F64_SWEEPS: usize = 2000;
const MP_SWEEPS: usize = 200;
/// Taylor coefficients examined before deciding there is no zero cluster.
const FIRST_ORDER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("polynomial must have degree at least {min}, got {n}")]
    Degree { n: usize, min: usize },
    #[error("precision must be at least {MIN_PRECISION} bits, got {0}")]
    Precision(u32),
    #[error("non-finite root at index {0}")]
    NonFinite(usize),
    #[error("evaluation point coincides with root {index}")]
    Pole { index: usize },
    #[error("no convergence at {precision_bits} bits; worst residual {worst_residual:e}")]
    NonConvergence { worst_residual: f64, precision_bits: u32 },
    #[error("critical point {point} lies within {margin:e} of the circle boundary")]
    Indeterminate { point: Complex64, margin: f64 },
    #[error("leading coefficient is zero")]
    ZeroLeading,
}

/// `prod_j (z - X_j)` with the roots held at `precision_bits`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootPolynomial {
    roots: Vec<Mpc>,
    precision_bits: u32,
}

/// `max(256, 4n)`: enough headroom for clustered roots without escalation in
/// all cases we have met.
pub fn default_precision(n: usize) -> u32 {
    256.max(4 * n as u32)
}

impl RootPolynomial {
    pub fn new(roots: &[Complex64], precision_bits: u32) -> Result<Self, SolverError> {
        let mp = roots.iter().map(|r| Mpc::from_c64(precision_bits.max(MIN_PRECISION), *r)).collect();
        Self::from_mp(mp, precision_bits)
    }

    pub fn from_mp(roots: Vec<Mpc>, precision_bits: u32) -> Result<Self, SolverError> {
        if precision_bits < MIN_PRECISION {
            return Err(SolverError::Precision(precision_bits));
        }
        if roots.is_empty() {
            return Err(SolverError::Degree { n: 0, min: 1 });
        }
        if let Some(i) = roots.iter().position(|r| !r.is_finite()) {
            return Err(SolverError::NonFinite(i));
        }
        let roots = roots.into_iter().map(|r| r.with_prec(precision_bits)).collect();
        Ok(RootPolynomial { roots, precision_bits })
    }

    /// `z^n - 1`, with every root correctly rounded.
    pub fn roots_of_unity(n: usize, precision_bits: u32) -> Result<Self, SolverError> {
        let roots = (0..n as u64)
            .map(|k| Mpc::root_of_unity(precision_bits.max(MIN_PRECISION), k, n as u64))
            .collect();
        Self::from_mp(roots, precision_bits)
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn roots(&self) -> &[Mpc] {
        &self.roots
    }

    pub fn roots_c64(&self) -> Vec<Complex64> {
        self.roots.iter().map(Mpc::to_c64).collect()
    }

    /// Same roots at another precision.
    pub fn with_precision(&self, precision_bits: u32) -> Result<Self, SolverError> {
        Self::from_mp(self.roots.clone(), precision_bits)
    }
}

/// The zeros of `f'`, sorted by `(Re, Im)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointSet {
    pub points: Vec<Complex64>,
    /// `|f'(a)| / (|f(a)| sum_j 1/|a - X_j|)`, evaluated at twice the
    /// working precision; zero for points placed exactly at repeated roots.
    pub residuals: Vec<f64>,
    /// Newton step length `|g(a)/g'(a)|` of `g = f'/f`, scaled by the number
    /// of points at the same location: the uncertainty of each point.
    pub error_radii: Vec<f64>,
    pub precision_bits: u32,
    /// Certification threshold the residuals were checked against.
    pub tau: f64,
}

impl CriticalPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn worst_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Certification threshold at `bits` of working precision: `2^(-bits/4)`.
pub fn tau_cert(bits: u32) -> f64 {
    (-(bits as f64) / 4.0).exp2()
}

/// `sum_j 1/(z - X_j)` at the polynomial's precision.
pub fn eval_log_derivative(p: &RootPolynomial, z: Complex64) -> Result<Complex64, SolverError> {
    let z = Mpc::from_c64(p.precision_bits, z);
    Ok(eval_log_derivative_mp(p, &z, p.precision_bits)?.to_c64())
}

/// `sum_j 1/(z - X_j)` at `prec` bits.
pub fn eval_log_derivative_mp(p: &RootPolynomial, z: &Mpc, prec: u32) -> Result<Mpc, SolverError> {
    let z = z.with_prec(prec);
    let mut acc = Mpc::zero(prec);
    let mut d = Mpc::zero(prec);
    for (index, r) in p.roots.iter().enumerate() {
        d.assign_sub(&z, r);
        if d.is_zero() {
            return Err(SolverError::Pole { index });
        }
        acc.add_assign_ref(&d.recip());
    }
    Ok(acc)
}

/// Monomial coefficients of `f'`, lowest degree first.
pub fn derivative_coefficients(p: &RootPolynomial) -> Vec<Mpc> {
    differentiate(&expand_roots(&p.roots, p.precision_bits))
}

pub fn derivative_coefficients_c64(p: &RootPolynomial) -> Vec<Complex64> {
    derivative_coefficients(p).iter().map(Mpc::to_c64).collect()
}

/// Distinct roots with their multiplicities.
struct Atoms {
    pos: Vec<Mpc>,
    mult: Vec<f64>,
}

/// Merge roots closer than `2^(-prec/2) * max(1, max|X|)`.
fn merge_roots(p: &RootPolynomial) -> Atoms {
    let c64 = p.roots_c64();
    let scale = c64.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let delta = (-(p.precision_bits as f64) / 2.0).exp2() * scale;
    let n = c64.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| c64[i].re.total_cmp(&c64[j].re).then(c64[i].im.total_cmp(&c64[j].im)));
    // Union-find over pairs within delta; a sweep on Re keeps this near-linear.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for a in 0..n {
        let i = order[a];
        for &j in &order[a + 1..] {
            if c64[j].re - c64[i].re > delta {
                break;
            }
            let close = if delta < 1e-300 {
                p.roots[i] == p.roots[j]
            } else {
                p.roots[i].sub(&p.roots[j]).abs_f64() < delta
            };
            if close {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut pos = Vec::new();
    let mut mult = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = pos.len();
            pos.push(p.roots[r].clone());
            mult.push(0.0);
        }
        mult[slot[r]] += 1.0;
    }
    Atoms { pos, mult }
}

/// `(g, g', sum 1/(z - Y_a))` for `g = sum m_a/(z - Y_a)`, or `None` on a pole.
fn log_terms<T: ComplexField>(pos: &[T], mult: &[f64], z: &T) -> Option<(T, T, T)> {
    let mut g = z.zero_like();
    let mut gp = z.zero_like();
    let mut pp = z.zero_like();
    for (y, &m) in pos.iter().zip(mult) {
        let d = z.sub(y);
        if d.is_zero() {
            return None;
        }
        let u = d.recip();
        let mu = u.mul_real(m);
        gp = gp.sub(&mu.mul(&u));
        g = g.add(&mu);
        pp = pp.add(&u);
    }
    Some((g, gp, pp))
}

/// Newton ratio `q'/q` of the numerator `q = g * prod (z - Y_a)`, with `fixed`
/// known zeros at `center` divided out.
fn numerator_ratio<T: ComplexField>(
    pos: &[T],
    mult: &[f64],
    center: &T,
    fixed: usize,
    z: &T,
) -> Option<T> {
    let (g, gp, pp) = log_terms(pos, mult, z)?;
    let mut r = gp.div(&g).add(&pp);
    if fixed > 0 {
        let d = z.sub(center);
        if d.is_zero() {
            return None;
        }
        r = r.sub(&d.recip().mul_real(fixed as f64));
    }
    Some(r)
}

/// Number of leading Taylor coefficients of the numerator about `c` that
/// vanish to working precision: the multiplicity of `c` as a critical point
/// of a cluster-free configuration such as `z^n - 1`.
///
/// Also returns a radius bounding where those zeros can be given the
/// rounding-level uncertainty of the vanishing coefficients (Fujiwara's
/// bound applied to the truncated Taylor polynomial).
fn centre_multiplicity(atoms: &Atoms, c: &Mpc, prec: u32) -> (usize, f64) {
    let k = atoms.pos.len();
    let max_order = k - 1;
    let ulp = (-(prec as f64)).exp2();
    let slack = 16.0 * (k as f64 + 1.0) * ulp;
    let count = |order: usize| -> (usize, f64) {
        let (q, bound) = expand::centred_numerator(&atoms.pos, &atoms.mult, c, order, prec);
        let mut tols = Vec::new();
        for (qj, bj) in q.iter().zip(&bound).take(order.min(max_order)) {
            let tol = Float::with_val(64, bj * slack);
            if Float::with_val(64, qj.abs()) <= tol {
                tols.push(tol);
            } else {
                break;
            }
        }
        let t = tols.len();
        if t == 0 {
            return (0, 0.0);
        }
        // log2 of 2 * max_j (tol_j / |q_t|)^(1/(t-j)).
        let lead = q[t].log2_abs();
        let log_r = tols
            .iter()
            .enumerate()
            .map(|(j, tol)| {
                let (m, e) = tol.to_f64_exp();
                (m.log2() + e as f64 - lead) / (t - j) as f64
            })
            .fold(f64::NEG_INFINITY, f64::max);
        (t, 2.0 * log_r.exp2())
    };
    let first = FIRST_ORDER.min(max_order);
    let (t, r) = count(first);
    if t == first && first < max_order {
        count(max_order)
    } else {
        (t, r)
    }
}

struct Certificate {
    residual: f64,
    radius: f64,
}

/// Residual and Newton radius of each point, at `prec` bits.
fn certify(atoms: &Atoms, points: &[Mpc], prec: u32) -> Vec<Certificate> {
    if prec <= 2 * MIN_PRECISION && points.iter().chain(&atoms.pos).all(Mpc::is_c64) {
        return certify_dd(atoms, points);
    }
    certify_mp(atoms, points, prec)
}

fn certify_mp(atoms: &Atoms, points: &[Mpc], prec: u32) -> Vec<Certificate> {
    let pos: Vec<Mpc> = atoms.pos.iter().map(|y| y.with_prec(prec)).collect();
    points
        .iter()
        .map(|a| {
            let a = a.with_prec(prec);
            let mut g = Mpc::zero(prec);
            let mut gp = Mpc::zero(prec);
            let mut denom = Float::new(prec);
            for (y, &m) in pos.iter().zip(&atoms.mult) {
                let d = a.sub(y);
                if d.is_zero() {
                    return Certificate { residual: f64::INFINITY, radius: f64::INFINITY };
                }
                let u = d.recip();
                let mu = u.mul_real(m);
                denom += Float::with_val(prec, mu.abs());
                gp = gp.sub(&mu.mul(&u));
                g.add_assign_ref(&mu);
            }
            let residual = Float::with_val(prec, g.abs() / &denom).to_f64();
            let radius = if g.is_zero() { 0.0 } else { g.div(&gp).abs_f64() };
            Certificate { residual, radius }
        })
        .collect()
}

/// [`certify`] in double-double arithmetic, for inputs that are exact
/// doubles. Only `g` needs the extra width; the scale and radius are f64.
fn certify_dd(atoms: &Atoms, points: &[Mpc]) -> Vec<Certificate> {
    let pos: Vec<Complex64> = atoms.pos.iter().map(Mpc::to_c64).collect();
    points
        .iter()
        .map(|a| {
            let a = a.to_c64();
            let (mut g_re, mut g_im) = (Dd::ZERO, Dd::ZERO);
            let mut gp = Complex64::new(0.0, 0.0);
            let mut denom = 0.0;
            for (y, &m) in pos.iter().zip(&atoms.mult) {
                let (d_re, d_im) = (Dd::diff(a.re, y.re), Dd::diff(a.im, y.im));
                if d_re.hi == 0.0 && d_im.hi == 0.0 {
                    return Certificate { residual: f64::INFINITY, radius: f64::INFINITY };
                }
                // m/d = m conj(d)/|d|^2
                let s = Dd::from(m) / (d_re * d_re + d_im * d_im);
                let (u_re, u_im) = (d_re * s, -(d_im * s));
                let u = Complex64::new(u_re.to_f64(), u_im.to_f64());
                denom += u.norm();
                gp -= u * u / m;
                g_re = g_re + u_re;
                g_im = g_im + u_im;
            }
            let g = Complex64::new(g_re.to_f64(), g_im.to_f64());
            let residual = g.norm() / denom;
            let radius = if g == Complex64::new(0.0, 0.0) { 0.0 } else { (g / gp).norm() };
            Certificate { residual, radius }
        })
        .collect()
}

/// The `n - 1` critical points of `p`, certified.
pub fn critical_points(p: &RootPolynomial) -> Result<CriticalPointSet, SolverError> {
    let n = p.degree();
    if n < 2 {
        return Err(SolverError::Degree { n, min: 2 });
    }
    let prec0 = p.precision_bits;
    let atoms = merge_roots(p);
    let k = atoms.pos.len();

    let mut points: Vec<Complex64> = Vec::with_capacity(n - 1);
    let mut residuals = Vec::with_capacity(n - 1);
    let mut radii = Vec::with_capacity(n - 1);
    for (y, &m) in atoms.pos.iter().zip(&atoms.mult) {
        for _ in 1..(m as usize) {
            points.push(y.to_c64());
            residuals.push(0.0);
            radii.push(0.0);
        }
    }
    if k == 1 {
        return Ok(finish(points, residuals, radii, prec0));
    }

    // Centroid of the roots: the only place a multiple zero of g is cheap to spot.
    let mut centre = Mpc::zero(prec0);
    for (y, &m) in atoms.pos.iter().zip(&atoms.mult) {
        let mut t = y.clone();
        t.mul_real_assign(m);
        centre.add_assign_ref(&t);
    }
    centre.mul_real_assign(1.0 / n as f64);
    let (fixed, fixed_radius) = centre_multiplicity(&atoms, &centre, prec0);
    let solved = match solve_free(&atoms, &centre, fixed, fixed_radius, prec0) {
        // A coincidental near-zero at the centroid that does not certify:
        // solve again without it.
        Err(_) if fixed > 0 => solve_free(&atoms, &centre, 0, 0.0, prec0),
        other => other,
    }?;
    points.extend(solved.points);
    residuals.extend(solved.residuals);
    radii.extend(solved.radii);
    Ok(finish(points, residuals, radii, solved.precision_bits))
}

struct Solved {
    points: Vec<Complex64>,
    residuals: Vec<f64>,
    radii: Vec<f64>,
    precision_bits: u32,
}

/// Zeros of `g = sum m_a/(z - Y_a)`, with `fixed` of them taken to sit at
/// `centre`.
fn solve_free(atoms: &Atoms, centre: &Mpc, fixed: usize, fixed_radius: f64, prec0: u32) -> Result<Solved, SolverError> {
    let k = atoms.pos.len();
    let free = k - 1 - fixed;
    let centre64 = centre.to_c64();

    let pos64: Vec<Complex64> = atoms.pos.iter().map(Mpc::to_c64).collect();
    let spread = pos64.iter().map(|y| (y - centre64).norm()).fold(0.0, f64::max);
    let mut z64 = initial_points(centre64, spread, free);
    let tol64 = (-44.0f64).exp2() * spread;
    let f64_run = iterate(
        |z: &Complex64| numerator_ratio(&pos64, &atoms.mult, &centre64, fixed, z),
        &mut z64,
        tol64,
        F64_SWEEPS,
    );

    let mut prec = prec0;
    let mut estimates: Vec<Mpc> = z64.iter().map(|z| Mpc::from_c64(prec, *z)).collect();
    let mut worst = f64::INFINITY;
    for escalation in 0..=MAX_ESCALATIONS {
        if prec > MIN_PRECISION || !f64_run.converged || escalation > 0 {
            let pos: Vec<Mpc> = atoms.pos.iter().map(|y| y.with_prec(prec)).collect();
            let c = centre.with_prec(prec);
            for e in estimates.iter_mut() {
                e.set_prec(prec);
            }
            let tol = (-(prec as f64 - 4.0)).exp2() * spread;
            iterate(
                |z: &Mpc| numerator_ratio(&pos, &atoms.mult, &c, fixed, z),
                &mut estimates,
                tol,
                MP_SWEEPS,
            );
        }
        let mut candidates = estimates.clone();
        candidates.extend(std::iter::repeat_n(centre.with_prec(prec), fixed));
        let certs = certify(atoms, &candidates, 2 * prec);
        worst = certs.iter().map(|c| c.residual).fold(0.0, f64::max);
        if certs.iter().all(|c| c.residual <= tau_cert(prec)) {
            let mut radii: Vec<f64> = certs.iter().map(|c| c.radius).collect();
            for r in radii.iter_mut().skip(free) {
                *r = fixed_radius;
            }
            return Ok(Solved {
                points: candidates.iter().map(Mpc::to_c64).collect(),
                residuals: certs.iter().map(|c| c.residual).collect(),
                radii,
                precision_bits: prec,
            });
        }
        prec *= 2;
    }
    Err(SolverError::NonConvergence { worst_residual: worst, precision_bits: prec / 2 })
}

fn cmp_points(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn finish(points: Vec<Complex64>, residuals: Vec<f64>, radii: Vec<f64>, prec: u32) -> CriticalPointSet {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| cmp_points(&points[i], &points[j]));
    CriticalPointSet {
        points: idx.iter().map(|&i| points[i]).collect(),
        residuals: idx.iter().map(|&i| residuals[i]).collect(),
        error_radii: idx.iter().map(|&i| radii[i]).collect(),
        precision_bits: prec,
        tau: tau_cert(prec),
    }
}

/// Number of critical points strictly inside `|z - center| < radius`.
///
/// This is the computable stand-in for the winding-number count of Rouché's
/// theorem, so it refuses to answer when a point's certified position could
/// lie on either side of the circle.
pub fn rouche_ball_count(cps: &CriticalPointSet, center: Complex64, radius: f64) -> Result<usize, SolverError> {
    let mut count = 0;
    for (p, r) in cps.points.iter().zip(&cps.error_radii) {
        let d = (p - center).norm();
        let margin = 2.0 * r;
        if (d - radius).abs() <= margin {
            return Err(SolverError::Indeterminate { point: *p, margin });
        }
        if d < radius {
            count += 1;
        }
    }
    Ok(count)
}

/// Zeros of a polynomial given by monomial coefficients (lowest first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialZeros {
    pub zeros: Vec<Complex64>,
    /// `|p(a)| / sum_k |c_k| |a|^k` at twice the working precision.
    pub residuals: Vec<f64>,
    pub precision_bits: u32,
}

fn horner_ratio<T: ComplexField>(coeffs: &[T], z: &T) -> Option<T> {
    let top = coeffs.len() - 1;
    let mut p = coeffs[top].clone();
    let mut dp = z.zero_like();
    for c in coeffs[..top].iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(c);
    }
    if p.is_zero() {
        // Exact zero: an infinite ratio stops the iteration for this point.
        return Some(z.lift(Complex64::new(f64::INFINITY, 0.0)));
    }
    Some(dp.div(&p))
}

/// All zeros of `sum_k c_k z^k`, certified like [`critical_points`].
///
/// Zero trailing coefficients give exact zeros at the origin.
pub fn polynomial_zeros(coeffs: &[Complex64], precision_bits: u32) -> Result<PolynomialZeros, SolverError> {
    if precision_bits < MIN_PRECISION {
        return Err(SolverError::Precision(precision_bits));
    }
    if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(SolverError::NonFinite(i));
    }
    let Some(top) = coeffs.iter().rposition(|c| c.norm() > 0.0) else {
        return Err(SolverError::ZeroLeading);
    };
    if top == 0 {
        return Err(SolverError::Degree { n: 0, min: 1 });
    }
    let low = coeffs.iter().position(|c| c.norm() > 0.0).unwrap_or(0);
    let mut zeros = vec![Complex64::new(0.0, 0.0); low];
    let mut residuals = vec![0.0; low];
    let trimmed = &coeffs[low..=top];
    let degree = trimmed.len() - 1;
    if degree == 0 {
        return Ok(finish_zeros(zeros, residuals, precision_bits));
    }

    let lead = trimmed[degree];
    let shift = -trimmed[degree - 1] / (lead * degree as f64);
    let radius = (trimmed[0].norm() / lead.norm()).powf(1.0 / degree as f64);
    let mut z64 = initial_points(shift, radius.max(f64::MIN_POSITIVE), degree);
    let scale = z64.iter().map(|z| z.norm()).fold(radius, f64::max);
    let run = iterate(|z: &Complex64| horner_ratio(trimmed, z), &mut z64, (-44.0f64).exp2() * scale, F64_SWEEPS);

    let mut prec = precision_bits;
    let mut estimates: Vec<Mpc> = z64.iter().map(|z| Mpc::from_c64(prec, *z)).collect();
    let mut worst = f64::INFINITY;
    for escalation in 0..=MAX_ESCALATIONS {
        if prec > MIN_PRECISION || !run.converged || escalation > 0 {
            let c: Vec<Mpc> = trimmed.iter().map(|c| Mpc::from_c64(prec, *c)).collect();
            for e in estimates.iter_mut() {
                e.set_prec(prec);
            }
            let tol = (-(prec as f64 - 4.0)).exp2() * scale;
            iterate(|z: &Mpc| horner_ratio(&c, z), &mut estimates, tol, MP_SWEEPS);
        }
        let res = coefficient_residuals(trimmed, &estimates, 2 * prec);
        worst = res.iter().copied().fold(0.0, f64::max);
        if worst <= tau_cert(prec) {
            zeros.extend(estimates.iter().map(Mpc::to_c64));
            residuals.extend(res);
            return Ok(finish_zeros(zeros, residuals, prec));
        }
        prec *= 2;
    }
    Err(SolverError::NonConvergence { worst_residual: worst, precision_bits: prec / 2 })
}

fn coefficient_residuals(coeffs: &[Complex64], points: &[Mpc], prec: u32) -> Vec<f64> {
    let c: Vec<Mpc> = coeffs.iter().map(|c| Mpc::from_c64(prec, *c)).collect();
    points
        .iter()
        .map(|a| {
            let a = a.with_prec(prec);
            let abs_a = a.abs();
            let mut p = c[c.len() - 1].clone();
            let mut bound = Float::with_val(prec, c[c.len() - 1].abs());
            for ck in c[..c.len() - 1].iter().rev() {
                p = p.mul(&a).add(ck);
                bound *= &abs_a;
                bound += Float::with_val(prec, ck.abs());
            }
            Float::with_val(prec, p.abs() / &bound).to_f64()
        })
        .collect()
}

fn finish_zeros(zeros: Vec<Complex64>, residuals: Vec<f64>, prec: u32) -> PolynomialZeros {
    let mut idx: Vec<usize> = (0..zeros.len()).collect();
    idx.sort_by(|&i, &j| cmp_points(&zeros[i], &zeros[j]));
    PolynomialZeros {
        zeros: idx.iter().map(|&i| zeros[i]).collect(),
        residuals: idx.iter().map(|&i| residuals[i]).collect(),
        precision_bits: prec,
    }
}

/// `sum_j 1/(z - X_j)` in `f64` with compensated summation; for callers
/// that hold roots as doubles.
pub fn log_derivative_c64(roots: &[Complex64], z: Complex64) -> Result<Complex64, SolverError> {
    let mut acc = ComplexSum::new();
    for (index, r) in roots.iter().enumerate() {
        let d = z - r;
        if d.re == 0.0 && d.im == 0.0 {
            return Err(SolverError::Pole { index });
        }
        acc.add(1.0 / d);
    }
    Ok(acc.value())
}
