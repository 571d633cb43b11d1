//! Truncated Taylor series `sum_k c[k] t^k`, k < N, over any `Number`.
//!
//! Used as forward-mode jets for high-order derivatives of symbols and as
//! the coefficient algebra for the Airy normal-form series.

use crate::number::Number;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug)]
pub struct Taylor<T: Number, const N: usize> {
    pub c: [T; N],
}

impl<T: Number, const N: usize> Taylor<T, N> {
    pub fn constant(v: T) -> Self {
        let mut c = [T::zero(); N];
        c[0] = v;
        Taylor { c }
    }

    /// The jet of the identity at `v`: `v + t`.
    pub fn variable(v: T) -> Self {
        let mut c = [T::zero(); N];
        c[0] = v;
        if N > 1 {
            c[1] = T::one();
        }
        Taylor { c }
    }

    pub fn from_coeffs(c: [T; N]) -> Self {
        Taylor { c }
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    /// k-th derivative at the expansion point, `k! c[k]`.
    pub fn derivative(&self, k: usize) -> T {
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.c[k].scale(f)
    }

    /// Horner evaluation at offset `t`.
    pub fn eval(&self, t: T) -> T {
        let mut acc = T::zero();
        for k in (0..N).rev() {
            acc = acc * t + self.c[k];
        }
        acc
    }

    /// Formal derivative, truncated to the same length.
    pub fn diff(&self) -> Self {
        let mut c = [T::zero(); N];
        for k in 1..N {
            c[k - 1] = self.c[k].scale(k as f64);
        }
        Taylor { c }
    }

    /// Map coefficients `c[k] -> c[k] * w(k)`.
    pub fn weighted(&self, w: impl Fn(usize) -> f64) -> Self {
        let mut c = self.c;
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = ck.scale(w(k));
        }
        Taylor { c }
    }

    /// Series of `self / t`; requires a vanishing constant term.
    pub fn shift_down(&self) -> Self {
        let mut c = [T::zero(); N];
        c[..(N - 1)].copy_from_slice(&self.c[1..]);
        Taylor { c }
    }

    /// `self^(num/den)` for a series with unit constant term, with the
    /// recurrence weights formed in `T` so that no rounding of the
    /// exponent enters.
    pub fn pow_rational(&self, num: i32, den: i32) -> Self {
        let a = self.c;
        let mut b = [T::zero(); N];
        b[0] = a[0].powf(num as f64 / den as f64);
        let den_t = T::from_f64(den as f64);
        for k in 1..N {
            let mut acc = T::zero();
            for j in 1..=k {
                let w = T::from_f64((num as i64 * j as i64 - den as i64 * (k - j) as i64) as f64) / den_t;
                acc = acc + w * a[j] * b[k - j];
            }
            b[k] = acc / a[0].scale(k as f64);
        }
        Taylor { c: b }
    }

    /// Series of `self * t`, dropping the top coefficient.
    pub fn shift_up(&self) -> Self {
        let mut c = [T::zero(); N];
        c[1..].copy_from_slice(&self.c[..(N - 1)]);
        Taylor { c }
    }
}

impl<T: Number, const N: usize> Add for Taylor<T, N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        for k in 0..N {
            c[k] = c[k] + o.c[k];
        }
        Taylor { c }
    }
}

impl<T: Number, const N: usize> Sub for Taylor<T, N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut c = self.c;
        for k in 0..N {
            c[k] = c[k] - o.c[k];
        }
        Taylor { c }
    }
}

impl<T: Number, const N: usize> Neg for Taylor<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut c = self.c;
        for ck in c.iter_mut() {
            *ck = -*ck;
        }
        Taylor { c }
    }
}

impl<T: Number, const N: usize> Mul for Taylor<T, N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [T::zero(); N];
        for i in 0..N {
            for j in 0..(N - i) {
                c[i + j] = c[i + j] + self.c[i] * o.c[j];
            }
        }
        Taylor { c }
    }
}

impl<T: Number, const N: usize> Div for Taylor<T, N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let mut c = [T::zero(); N];
        let b0 = o.c[0];
        for k in 0..N {
            let mut acc = self.c[k];
            for i in 1..=k {
                acc = acc - o.c[i] * c[k - i];
            }
            c[k] = acc / b0;
        }
        Taylor { c }
    }
}

impl<T: Number, const N: usize> Number for Taylor<T, N> {
    fn from_f64(v: f64) -> Self {
        Taylor::constant(T::from_f64(v))
    }

    fn exp(self) -> Self {
        let a = self.c;
        let mut e = [T::zero(); N];
        e[0] = a[0].exp();
        for k in 1..N {
            let mut acc = T::zero();
            for i in 1..=k {
                acc = acc + a[i].scale(i as f64) * e[k - i];
            }
            e[k] = acc.scale(1.0 / k as f64);
        }
        Taylor { c: e }
    }

    fn ln(self) -> Self {
        let a = self.c;
        let mut l = [T::zero(); N];
        l[0] = a[0].ln();
        for k in 1..N {
            let mut acc = T::zero();
            for i in 1..k {
                acc = acc + l[i].scale(i as f64) * a[k - i];
            }
            l[k] = (a[k] - acc.scale(1.0 / k as f64)) / a[0];
        }
        Taylor { c: l }
    }

    fn sin(self) -> Self {
        sin_cos(self).0
    }

    fn cos(self) -> Self {
        sin_cos(self).1
    }

    fn powf(self, p: f64) -> Self {
        if p == p.trunc() && p.abs() <= 64.0 {
            return self.powi(p as i32);
        }
        let a = self.c;
        let mut b = [T::zero(); N];
        b[0] = a[0].powf(p);
        for k in 1..N {
            let mut acc = T::zero();
            for j in 1..=k {
                let w = p * j as f64 - (k - j) as f64;
                acc = acc + a[j].scale(w) * b[k - j];
            }
            b[k] = acc / a[0].scale(k as f64);
        }
        Taylor { c: b }
    }

    fn magnitude(self) -> f64 {
        self.c[0].magnitude()
    }
}

fn sin_cos<T: Number, const N: usize>(x: Taylor<T, N>) -> (Taylor<T, N>, Taylor<T, N>) {
    let a = x.c;
    let mut s = [T::zero(); N];
    let mut c = [T::zero(); N];
    s[0] = a[0].sin();
    c[0] = a[0].cos();
    for k in 1..N {
        let mut ds = T::zero();
        let mut dc = T::zero();
        for i in 1..=k {
            let ia = a[i].scale(i as f64);
            ds = ds + ia * c[k - i];
            dc = dc + ia * s[k - i];
        }
        s[k] = ds.scale(1.0 / k as f64);
        c[k] = (-dc).scale(1.0 / k as f64);
    }
    (Taylor { c: s }, Taylor { c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type J = Taylor<f64, 8>;

    #[test]
    fn exp_of_variable_gives_factorial_coefficients() {
        let e = J::variable(0.0).exp();
        let mut f = 1.0;
        for k in 0..8 {
            if k > 0 {
                f *= k as f64;
            }
            assert!((e.c[k] - 1.0 / f).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_of_polynomial() {
        let x = J::variable(2.0);
        let p = x * x * x;
        assert!((p.derivative(1) - 12.0).abs() < 1e-12);
        assert!((p.derivative(2) - 12.0).abs() < 1e-12);
        assert!((p.derivative(3) - 6.0).abs() < 1e-12);
        assert!(p.derivative(4).abs() < 1e-12);
    }

    #[test]
    fn rational_power_is_exact_in_double_double() {
        use crate::number::Dd;
        let mut c = [Dd::from(0.0); 16];
        c[0] = Dd::from(1.0);
        c[1] = Dd::from(0.3);
        c[2] = Dd::from(-0.7);
        let x = Taylor::from_coeffs(c);
        let y = x.pow_rational(2, 3);
        let back = y * y * y - x * x;
        for k in 0..16 {
            assert!(back.c[k].to_f64().abs() < 1e-29, "{k}: {:?}", back.c[k]);
        }
    }

    proptest! {
        #[test]
        fn ln_inverts_exp(a in -2.0f64..2.0, b in -1.0f64..1.0) {
            let mut c = [0.0; 8];
            c[0] = a;
            c[1] = b;
            c[2] = 0.3 * b;
            let x = J::from_coeffs(c);
            let y = x.exp().ln();
            for k in 0..8 {
                prop_assert!((y.c[k] - x.c[k]).abs() < 1e-12);
            }
        }

        #[test]
        fn sin_cos_satisfy_pythagoras(a in -3.0f64..3.0, b in -1.0f64..1.0) {
            let x = J::from_coeffs([a, b, 0.2, -0.1, 0.0, 0.05, 0.0, 0.0]);
            let one = x.sin() * x.sin() + x.cos() * x.cos();
            prop_assert!((one.c[0] - 1.0).abs() < 1e-13);
            for k in 1..8 {
                prop_assert!(one.c[k].abs() < 1e-12);
            }
        }

        #[test]
        fn fractional_power_composes(a in 0.5f64..3.0, b in -1.0f64..1.0) {
            let x = J::from_coeffs([a, b, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0]);
            let y = x.powf(1.5).powf(2.0 / 3.0);
            for k in 0..8 {
                prop_assert!((y.c[k] - x.c[k]).abs() < 1e-10);
            }
        }

        #[test]
        fn division_inverts_multiplication(a in 0.5f64..2.0, b in -1.0f64..1.0) {
            let x = J::from_coeffs([a, b, 0.3, -0.2, 0.0, 0.0, 0.0, 0.1]);
            let y = J::from_coeffs([1.0 + a, 0.5, b, 0.0, 0.0, 0.0, 0.0, 0.0]);
            let z = (x * y) / y;
            for k in 0..8 {
                prop_assert!((z.c[k] - x.c[k]).abs() < 1e-11);
            }
        }
    }
}
