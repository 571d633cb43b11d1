//! Scalar abstraction shared by expression evaluation and Taylor arithmetic.
//!
//! Expressions and symbols are evaluated over `f64`, `Complex64` (contour
//! integrals in the complex x-plane), double-double reals (high-precision
//! residual checks) and truncated Taylor series of any of these.

use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Number:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn powf(self, p: f64) -> Self;
    /// Magnitude of the leading (constant) part, used for pivot and
    /// convergence checks in generic code.
    fn magnitude(self) -> f64;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn sqrt(self) -> Self {
        self.powf(0.5)
    }
    fn scale(self, s: f64) -> Self {
        self * Self::from_f64(s)
    }
    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            k >>= 1;
            if k > 0 {
                base = base * base;
            }
        }
        acc
    }
}

impl Number for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Number for Complex64 {
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn powf(self, p: f64) -> Self {
        Complex64::powf(self, p)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving roughly 32
/// significant digits for the four field operations and `sqrt`.
///
/// Transcendental functions fall back to `f64` accuracy except at the
/// exact points (exp 0, ln 1, 1^p) the Taylor recurrences hit when a
/// series is normalized to a unit constant term.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        let e = e + (self.hi * y.lo + self.lo * y.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::from(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::from(q2);
        let q3 = r.hi / y.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from(q3)
    }
}

impl Number for Dd {
    fn from_f64(v: f64) -> Self {
        Dd::from(v)
    }
    fn exp(self) -> Self {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::from(1.0);
        }
        Dd::from(self.to_f64().exp())
    }
    fn ln(self) -> Self {
        if self.hi == 1.0 && self.lo == 0.0 {
            return Dd::from(0.0);
        }
        // one Newton step on exp(y) = x restores most of the lost digits
        let y = Dd::from(self.to_f64().ln());
        let ey = Dd::from(y.to_f64().exp());
        y + (self - ey) / ey
    }
    fn sin(self) -> Self {
        Dd::from(self.to_f64().sin())
    }
    fn cos(self) -> Self {
        Dd::from(self.to_f64().cos())
    }
    fn powf(self, p: f64) -> Self {
        if self.hi == 1.0 && self.lo == 0.0 {
            return Dd::from(1.0);
        }
        if p == 0.5 {
            return self.sqrt();
        }
        if p == p.trunc() && p.abs() < 64.0 {
            return self.powi(p as i32);
        }
        Dd::from(self.to_f64().powf(p))
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::from(self.hi.sqrt());
        }
        let s = Dd::from(self.hi.sqrt());
        s + (self - s * s) / (s * Dd::from(2.0))
    }
    fn magnitude(self) -> f64 {
        self.to_f64().abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_recovers_digits_lost_in_f64() {
        let third = Dd::from(1.0) / Dd::from(3.0);
        let back = third * Dd::from(3.0) - Dd::from(1.0);
        assert!(back.to_f64().abs() < 1e-31);
        let big = Dd::from(1e16) + Dd::from(1.0) - Dd::from(1e16);
        assert_eq!(big.to_f64(), 1.0);
    }

    #[test]
    fn dd_sqrt_is_double_double_accurate() {
        let two = Dd::from(2.0);
        let r = two.sqrt();
        assert!((r * r - two).to_f64().abs() < 1e-30);
    }

    #[test]
    fn powi_handles_negative_exponents() {
        assert!((2.0f64.powi(-3) - 0.125).abs() < 1e-16);
        assert!((Number::powi(3.0f64, 5) - 243.0).abs() < 1e-12);
    }
}
