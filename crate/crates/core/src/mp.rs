//! Multiprecision complex arithmetic on top of MPFR floats.
//!
//! [`Mpc`] keeps both components at one precision. The [`ComplexField`] trait
//! lets the iterative solvers run unchanged on `Complex64` (53 bits) and on
//! `Mpc` at any precision.

use std::fmt;

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Assign, Float};

/// Smallest precision accepted anywhere in the crate (an IEEE double).
pub const MIN_PRECISION: u32 = 53;

#[derive(Clone, PartialEq)]
pub struct Mpc {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for Mpc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mpc({:e}, {:e})", self.re.to_f64(), self.im.to_f64())
    }
}

impl Mpc {
    pub fn zero(prec: u32) -> Self {
        Mpc {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_c64(prec: u32, z: Complex64) -> Self {
        Mpc {
            re: Float::with_val(prec, z.re),
            im: Float::with_val(prec, z.im),
        }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        let mut out = Mpc { re, im };
        out.set_prec(prec);
        out
    }

    /// `exp(2 pi i k / n)` rounded to `prec` bits.
    pub fn root_of_unity(prec: u32, k: u64, n: u64) -> Self {
        assert!(n > 0, "root of unity of order zero");
        Self::turn(prec, (k % n) as f64, n)
    }

    /// `exp(2 pi i t / n)` rounded to `prec` bits; `t` is taken as exact.
    pub fn turn(prec: u32, t: f64, n: u64) -> Self {
        assert!(n > 0, "turn of order zero");
        // Work slightly above the target so the final rounding dominates.
        let work = prec + 32;
        let mut angle = Float::with_val(work, Constant::Pi);
        angle *= 2u32;
        angle *= Float::with_val(work, t);
        angle /= n;
        let mut cos = Float::new(work);
        angle.sin_cos_mut(&mut cos);
        Mpc {
            re: Float::with_val(prec, &cos),
            im: Float::with_val(prec, &angle),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn set_prec(&mut self, prec: u32) {
        self.re.set_prec(prec);
        self.im.set_prec(prec);
    }

    /// Copy at a different precision (exact when widening).
    pub fn with_prec(&self, prec: u32) -> Self {
        Mpc {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Whether both components are exactly representable as finite doubles.
    pub fn is_c64(&self) -> bool {
        let z = self.to_c64();
        z.re.is_finite() && z.im.is_finite() && self.re == z.re && self.im == z.im
    }

    pub fn conj(&self) -> Self {
        Mpc {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut out = Float::with_val(self.prec(), self.re.square_ref());
        out += Float::with_val(self.prec(), self.im.square_ref());
        out
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// `self = a - b`, reusing the allocation.
    pub fn assign_sub(&mut self, a: &Mpc, b: &Mpc) {
        self.re.assign(&a.re - &b.re);
        self.im.assign(&a.im - &b.im);
    }

    pub fn add_assign_ref(&mut self, other: &Mpc) {
        self.re += &other.re;
        self.im += &other.im;
    }

    pub fn mul_real_assign(&mut self, r: f64) {
        self.re *= r;
        self.im *= r;
    }
}

/// The operations the solvers need from a complex scalar.
///
/// Binary operations take the precision of `self`; constants are lifted to
/// the precision of the value they are created from.
pub trait ComplexField: Clone + fmt::Debug + Send + Sync {
    fn lift(&self, z: Complex64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn mul_real(&self, r: f64) -> Self;
    fn recip(&self) -> Self;
    fn abs_f64(&self) -> f64;
    /// `log2 |self|`, valid far outside the `f64` exponent range.
    fn log2_abs(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn is_finite(&self) -> bool;
    fn to_c64(&self) -> Complex64;
    fn precision(&self) -> u32;

    fn zero_like(&self) -> Self {
        self.lift(Complex64::new(0.0, 0.0))
    }
}

impl ComplexField for Complex64 {
    #[inline]
    fn lift(&self, z: Complex64) -> Self {
        z
    }
    #[inline]
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    #[inline]
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    #[inline]
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    #[inline]
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    #[inline]
    fn mul_real(&self, r: f64) -> Self {
        self * r
    }
    #[inline]
    fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Complex64::new(self.re / d, -self.im / d)
    }
    #[inline]
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
    fn log2_abs(&self) -> f64 {
        self.norm().log2()
    }
    #[inline]
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    #[inline]
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    #[inline]
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn precision(&self) -> u32 {
        MIN_PRECISION
    }
}

impl ComplexField for Mpc {
    fn lift(&self, z: Complex64) -> Self {
        Mpc::from_c64(self.prec(), z)
    }

    fn add(&self, other: &Self) -> Self {
        let p = self.prec();
        Mpc {
            re: Float::with_val(p, &self.re + &other.re),
            im: Float::with_val(p, &self.im + &other.im),
        }
    }

    fn sub(&self, other: &Self) -> Self {
        let p = self.prec();
        Mpc {
            re: Float::with_val(p, &self.re - &other.re),
            im: Float::with_val(p, &self.im - &other.im),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let p = self.prec();
        let mut re = Float::with_val(p, &self.re * &other.re);
        re -= Float::with_val(p, &self.im * &other.im);
        let mut im = Float::with_val(p, &self.re * &other.im);
        im += Float::with_val(p, &self.im * &other.re);
        Mpc { re, im }
    }

    fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    fn mul_real(&self, r: f64) -> Self {
        let p = self.prec();
        Mpc {
            re: Float::with_val(p, &self.re * r),
            im: Float::with_val(p, &self.im * r),
        }
    }

    fn recip(&self) -> Self {
        let p = self.prec();
        let d = self.norm_sqr();
        Mpc {
            re: Float::with_val(p, &self.re / &d),
            im: -Float::with_val(p, &self.im / &d),
        }
    }

    fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        // Mantissa/exponent split so huge exponents survive.
        let (m, e) = self.abs().to_f64_exp();
        m.log2() + e as f64
    }

    fn is_zero(&self) -> bool {
        Mpc::is_zero(self)
    }

    fn is_finite(&self) -> bool {
        Mpc::is_finite(self)
    }

    fn to_c64(&self) -> Complex64 {
        Mpc::to_c64(self)
    }

    fn precision(&self) -> u32 {
        self.prec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity_have_unit_modulus() {
        for n in [3u64, 7, 64] {
            for k in 0..n {
                let w = Mpc::root_of_unity(256, k, n);
                let err = Float::with_val(256, w.abs() - 1u32).abs().to_f64();
                assert!(err < 1e-75, "n={n} k={k} err={err}");
            }
        }
        let w = Mpc::root_of_unity(256, 1, 4);
        assert!(w.re.to_f64().abs() < 1e-76);
        assert_eq!(w.im.to_f64(), 1.0);
    }

    #[test]
    fn field_ops_agree_between_backends() {
        let a = Complex64::new(0.3, -1.7);
        let b = Complex64::new(-2.5, 0.25);
        let ma = Mpc::from_c64(200, a);
        let mb = Mpc::from_c64(200, b);
        let pairs = [
            (ma.add(&mb).to_c64(), a + b),
            (ma.sub(&mb).to_c64(), a - b),
            (ma.mul(&mb).to_c64(), a * b),
            (ma.div(&mb).to_c64(), a / b),
            (ma.recip().to_c64(), 1.0 / a),
        ];
        for (m, f) in pairs {
            assert!((m - f).norm() < 1e-15 * f.norm().max(1.0), "{m} vs {f}");
        }
        assert!((ma.log2_abs() - a.norm().log2()).abs() < 1e-14);
    }

    #[test]
    fn log2_abs_survives_tiny_values() {
        let mut x = Mpc::from_c64(128, Complex64::new(1.0, 0.0));
        x.re >>= 5000;
        assert!((x.log2_abs() + 5000.0).abs() < 1e-12);
        assert_eq!(x.abs_f64(), 0.0);
    }
}
