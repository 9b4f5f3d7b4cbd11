//! Adaptive Gauss–Legendre quadrature for complex-valued integrands.
//!
//! Each panel is integrated with a 10-point and a 20-point rule, whose
//! difference is the panel's error estimate. The panel with the largest
//! error is bisected until the summed error is below `rel_tol` times the
//! integral of `|f|` (or of a caller-supplied scale). Measuring against
//! `integral |f|` keeps the test meaningful when the integral itself cancels
//! to zero, and the global budget lets endpoint singularities like `x^-1/2`
//! converge.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::summation::{ComplexSum, NeumaierSum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not converge on [{a}, {b}] after {panels} panels")]
    NoConvergence { a: f64, b: f64, panels: usize },
    #[error("integrand returned a non-finite value at {x}")]
    NonFinite { x: f64 },
}

const LOW_ORDER: usize = 10;
const HIGH_ORDER: usize = 20;
const MAX_PANELS: usize = 200_000;

#[derive(Debug)]
struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Nodes and weights on [-1, 1] by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn rules() -> &'static (Rule, Rule) {
    static RULES: OnceLock<(Rule, Rule)> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(LOW_ORDER), gauss_legendre(HIGH_ORDER)))
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    abs_value: f64,
    error: f64,
}

// Max-heap order on the error estimate.
impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn panel<F>(f: &mut F, a: f64, b: f64) -> Result<Panel, QuadratureError>
where
    F: FnMut(f64) -> (Complex64, f64),
{
    let (low, high) = rules();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |rule: &Rule, with_abs: bool| -> Result<(Complex64, f64), QuadratureError> {
        let mut s = Complex64::new(0.0, 0.0);
        let mut s_abs = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = mid + half * x;
            let (v, scale) = f(t);
            if !(v.re.is_finite() && v.im.is_finite() && scale.is_finite()) {
                return Err(QuadratureError::NonFinite { x: t });
            }
            s += v * *w;
            if with_abs {
                s_abs += scale * w;
            }
        }
        Ok((s * half, s_abs * half.abs()))
    };
    let (coarse, _) = eval(low, false)?;
    let (fine, fine_abs) = eval(high, true)?;
    Ok(Panel {
        a,
        b,
        value: fine,
        abs_value: fine_abs,
        error: (fine - coarse).norm(),
    })
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Complex64, QuadratureError>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_with_breaks(f, &[a, b], rel_tol)
}

/// Integrate over consecutive panels `[p_0, p_1], [p_1, p_2], ...`.
///
/// Put known kinks or peaks of the integrand at the break points; the rule
/// then only has to resolve smooth pieces. Unsorted or repeated points are
/// fine.
pub fn integrate_with_breaks<F>(
    mut f: F,
    points: &[f64],
    rel_tol: f64,
) -> Result<Complex64, QuadratureError>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_scaled(
        |x| {
            let v = f(x);
            (v, v.norm())
        },
        points,
        rel_tol,
    )
    .map(|e| e.value)
}

/// Result of [`integrate_scaled`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    /// Integral of the scale function.
    pub scale: f64,
}

/// Like [`integrate_with_breaks`], but `f` returns `(value, scale)` and the
/// error budget is measured against the integral of `scale` instead of
/// `|value|`.
///
/// Use this when the values themselves are results of cancelling
/// computations (an inner integral, say) whose size says nothing about
/// their rounding error; `scale` should bound that error's source, e.g. the
/// inner integral of `|f|`.
pub fn integrate_scaled<F>(
    mut f: F,
    points: &[f64],
    rel_tol: f64,
) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> (Complex64, f64),
{
    let rel_tol = rel_tol.max(32.0 * f64::EPSILON);
    let mut pts: Vec<f64> = points.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            scale: 0.0,
        });
    }
    let mut heap = BinaryHeap::new();
    let (mut err_sum, mut abs_sum) = (NeumaierSum::new(), NeumaierSum::new());
    for w in pts.windows(2) {
        let p = panel(&mut f, w[0], w[1])?;
        err_sum.add(p.error);
        abs_sum.add(p.abs_value);
        heap.push(p);
    }
    let mut panels = heap.len();
    loop {
        if err_sum.value() <= rel_tol * abs_sum.value() {
            break;
        }
        let worst = heap.pop().expect("heap holds every panel");
        let (a, b) = (worst.a, worst.b);
        let m = 0.5 * (a + b);
        if panels >= MAX_PANELS || !(a < m && m < b) {
            return Err(QuadratureError::NoConvergence { a, b, panels });
        }
        let left = panel(&mut f, a, m)?;
        let right = panel(&mut f, m, b)?;
        err_sum.add(left.error + right.error - worst.error);
        abs_sum.add(left.abs_value + right.abs_value - worst.abs_value);
        heap.push(left);
        heap.push(right);
        panels += 1;
    }
    // Sum in position order so the result does not depend on heap layout.
    let mut done = heap.into_vec();
    done.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = ComplexSum::new();
    let mut scale = NeumaierSum::new();
    for p in &done {
        value.add(p.value);
        scale.add(p.abs_value);
    }
    Ok(Estimate {
        value: value.value(),
        scale: scale.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials_exactly() {
        let (low, high) = rules();
        for (rule, order) in [(low, LOW_ORDER), (high, HIGH_ORDER)] {
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14);
            // x^(2n-2) integrates to 2/(2n-1) on [-1, 1].
            let k = 2 * order - 2;
            let q: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(k as i32))
                .sum();
            assert!((q - 2.0 / (k as f64 + 1.0)).abs() < 1e-13, "order {order}: {q}");
        }
    }

    #[test]
    fn smooth_integrals() {
        let v = integrate(|x| Complex64::new(x.sin(), x.exp()), 0.0, 3.0, 1e-12).unwrap();
        assert!((v.re - (1.0 - 3f64.cos())).abs() < 1e-12);
        assert!((v.im - (3f64.exp() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn kink_and_endpoint_singularity() {
        let v = integrate(|x| Complex64::new((x - 0.3).abs(), 0.0), 0.0, 1.0, 1e-12).unwrap();
        assert!((v.re - (0.045 + 0.245)).abs() < 1e-11);
        // Integrable singularity at 0: integral of x^(-1/2) on [0,1] is 2.
        let v = integrate(|x| Complex64::new(x.powf(-0.5), 0.0), 0.0, 1.0, 1e-10).unwrap();
        assert!((v.re - 2.0).abs() < 1e-7, "{}", v.re);
    }

    #[test]
    fn cancelling_integral_is_zero() {
        let tau = 2.0 * std::f64::consts::PI;
        let v = integrate(|t| Complex64::from_polar(1.0, t), 0.0, tau, 1e-12).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn non_finite_is_reported() {
        // Not integrable at 0.3.
        let err = integrate(|x| Complex64::new(1.0 / (x - 0.3), 0.0), 0.0, 1.0, 1e-10);
        assert!(err.is_err());
        let err = integrate(|x| Complex64::new(x.ln(), 0.0), -1.0, 1.0, 1e-10);
        assert!(matches!(err, Err(QuadratureError::NonFinite { .. })));
    }
}
