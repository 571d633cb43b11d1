//! Chebyshev-Lobatto grids with spectral interpolation and cumulative
//! integration.

use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct ChebGrid {
    pub a: f64,
    pub b: f64,
    /// Ascending nodes, `points[0] = a`, `points[n-1] = b`.
    pub points: Vec<f64>,
}

impl ChebGrid {
    pub fn new(a: f64, b: f64, n: usize) -> Self {
        assert!(n >= 2, "Chebyshev grid needs at least two points");
        let m = (n - 1) as f64;
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        let points = (0..n)
            .map(|k| c - r * (PI * k as f64 / m).cos())
            .collect();
        ChebGrid { a, b, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Chebyshev coefficients `f = sum a_j T_j(t)`, `t = (2x - a - b)/(b - a)`.
    pub fn coefficients(&self, values: &[f64]) -> Vec<f64> {
        let n = self.points.len();
        assert_eq!(values.len(), n);
        let m = n - 1;
        // ascending points correspond to t_k = -cos(pi k/m) = cos(pi (m-k)/m)
        let f_desc: Vec<f64> = values.iter().rev().copied().collect();
        let mut a = vec![0.0; n];
        for (j, aj) in a.iter_mut().enumerate() {
            let mut s = 0.0;
            for (k, fk) in f_desc.iter().enumerate() {
                let w = if k == 0 || k == m { 0.5 } else { 1.0 };
                s += w * fk * (PI * (j * k) as f64 / m as f64).cos();
            }
            *aj = 2.0 * s / m as f64;
        }
        a[0] *= 0.5;
        a[m] *= 0.5;
        a
    }

    /// Evaluate a coefficient vector at `x` by Clenshaw recurrence.
    pub fn eval(&self, coeffs: &[f64], x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + coeffs[0]
    }

    /// Coefficients of the antiderivative vanishing at `a`.
    pub fn integral_coefficients(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = coeffs.len();
        let get = |j: usize| if j < n { coeffs[j] } else { 0.0 };
        let mut big = vec![0.0; n + 1];
        big[1] = get(0) - 0.5 * get(2);
        for (j, bj) in big.iter_mut().enumerate().skip(2) {
            *bj = (get(j - 1) - get(j + 1)) / (2.0 * j as f64);
        }
        let at_minus_one: f64 = big
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, v)| if j % 2 == 0 { *v } else { -*v })
            .sum();
        big[0] = -at_minus_one;
        let r = 0.5 * (self.b - self.a);
        big.iter_mut().for_each(|v| *v *= r);
        big
    }

    /// `F(x_k) = int_a^{x_k} f` at every node.
    pub fn cumulative_integral(&self, values: &[f64]) -> Vec<f64> {
        let ic = self.integral_coefficients(&self.coefficients(values));
        self.points.iter().map(|&x| self.eval(&ic, x)).collect()
    }

    /// Antiderivative of the interpolant of `values`, vanishing at `a`.
    pub fn antiderivative(&self, values: &[f64]) -> impl Fn(f64) -> f64 + '_ {
        let ic = self.integral_coefficients(&self.coefficients(values));
        move |x| self.eval(&ic, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_and_integrates_exponential() {
        let g = ChebGrid::new(-0.5, 2.0, 33);
        let v: Vec<f64> = g.points.iter().map(|x| x.exp()).collect();
        let c = g.coefficients(&v);
        assert!((g.eval(&c, 1.234) - 1.234f64.exp()).abs() < 1e-13);
        let cum = g.cumulative_integral(&v);
        for (x, f) in g.points.iter().zip(&cum) {
            assert!((f - (x.exp() - (-0.5f64).exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn nodes_are_ascending_with_exact_ends() {
        let g = ChebGrid::new(1.0, 3.0, 9);
        assert_eq!(g.points[0], 1.0);
        assert!((g.points[8] - 3.0).abs() < 1e-15);
        assert!(g.points.windows(2).all(|w| w[0] < w[1]));
    }
}
