//! Reference spectra from a Fourier discretization on a periodic grid.
//!
//! For a separable total symbol `g(xi) + f(x) xi + V(x)` (all orders in
//! `h` summed) the operator matrix on `x_j = c - L + 2 L j / N` is
//!
//! `P_jl = K_jl + (f_j + f_l)/2 * X_jl + V_j delta_jl`
//!
//! where `K` and `X` are the circulant matrices of `g(h k)` and `h k` over
//! the discrete wave numbers `k`. The Nyquist mode is dropped from `X` so
//! that it stays Hermitian.

use crate::error::{Result, SemiquantError};
use crate::orbit::locate_well;
use crate::symbol::{SeparableTerm, SymbolFamily};
use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub points: usize,
    pub half_length: f64,
    pub center: f64,
}

impl GridSpec {
    pub fn new(points: usize, half_length: f64) -> Self {
        GridSpec {
            points,
            half_length,
            center: 0.0,
        }
    }

    pub fn centered(self, center: f64) -> Self {
        GridSpec { center, ..self }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.points)
            .map(|j| self.center - self.half_length + dx * j as f64)
            .collect()
    }

    /// Wave numbers in FFT order.
    fn wave_numbers(&self) -> Vec<f64> {
        let n = self.points as i64;
        (0..n)
            .map(|m| {
                let s = if m < n / 2 { m } else { m - n };
                PI * s as f64 / self.half_length
            })
            .collect()
    }
}

/// Discretized `p^w(x, hD)` for one `h`.
pub struct GridOperator {
    pub h: f64,
    pub grid: GridSpec,
    nodes: Vec<f64>,
    kinetic_symbol: Vec<f64>,
    momentum_symbol: Vec<f64>,
    drift: Vec<f64>,
    potential: Vec<f64>,
}

fn combined_terms(sym: &SymbolFamily) -> Result<[&SeparableTerm; 3]> {
    let get = |j| {
        sym.separable(j).ok_or_else(|| {
            SemiquantError::Unsupported(format!(
                "grid discretization needs separable terms (`{}`, p{j})",
                sym.name
            ))
        })
    };
    Ok([get(0)?, get(1)?, get(2)?])
}

impl GridOperator {
    pub fn new(sym: &SymbolFamily, h: f64, grid: GridSpec) -> Result<Self> {
        if grid.points < 8 || grid.points % 2 != 0 {
            return Err(SemiquantError::InvalidArgument(format!(
                "grid size {} must be even and at least 8",
                grid.points
            )));
        }
        if !(grid.half_length > 0.0 && h > 0.0) {
            return Err(SemiquantError::InvalidArgument(
                "grid length and h must be positive".into(),
            ));
        }
        let terms = combined_terms(sym)?;
        let weights = [1.0, h, h * h];
        let nodes = grid.nodes();
        let ks = grid.wave_numbers();
        let nyquist = grid.points / 2;
        let sum = |f: &dyn Fn(&SeparableTerm) -> f64| -> f64 {
            terms.iter().zip(weights).map(|(t, w)| w * f(t)).sum()
        };
        let kinetic_symbol: Vec<f64> = ks.iter().map(|&k| sum(&|t| t.kinetic.eval(h * k))).collect();
        let momentum_symbol: Vec<f64> = ks
            .iter()
            .enumerate()
            .map(|(m, &k)| if m == nyquist { 0.0 } else { h * k })
            .collect();
        let drift: Vec<f64> = nodes.iter().map(|&x| sum(&|t| t.drift.eval(x))).collect();
        let potential: Vec<f64> = nodes.iter().map(|&x| sum(&|t| t.potential.eval(x))).collect();
        for v in kinetic_symbol.iter().chain(&drift).chain(&potential) {
            if !v.is_finite() {
                return Err(SemiquantError::NonFinite("grid operator coefficients".into()));
            }
        }
        Ok(GridOperator {
            h,
            grid,
            nodes,
            kinetic_symbol,
            momentum_symbol,
            drift,
            potential,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn has_drift(&self) -> bool {
        self.drift.iter().any(|&f| f != 0.0)
    }

    /// Multiplier `sigma(k)` applied in Fourier space.
    fn fourier_multiply(&self, u: &[C], sigma: &[f64]) -> Vec<C> {
        let n = u.len();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut buf = u.to_vec();
        fwd.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(sigma) {
            *b *= *s / n as f64;
        }
        inv.process(&mut buf);
        buf
    }

    /// Grid values `u(x_j)` mapped to `(P u)(x_j)`.
    pub fn apply(&self, u: &[C]) -> Vec<C> {
        assert_eq!(u.len(), self.nodes.len());
        let mut out = self.fourier_multiply(u, &self.kinetic_symbol);
        if self.has_drift() {
            let xu = self.fourier_multiply(u, &self.momentum_symbol);
            let fu: Vec<C> = u.iter().zip(&self.drift).map(|(a, f)| a * f).collect();
            let xfu = self.fourier_multiply(&fu, &self.momentum_symbol);
            for j in 0..u.len() {
                out[j] += 0.5 * (self.drift[j] * xu[j] + xfu[j]);
            }
        }
        for (o, (a, v)) in out.iter_mut().zip(u.iter().zip(&self.potential)) {
            *o += a * v;
        }
        out
    }

    /// First column of the circulant matrix of a Fourier multiplier.
    fn circulant(&self, sigma: &[f64]) -> Vec<C> {
        let n = sigma.len();
        let mut delta = vec![C::new(0.0, 0.0); n];
        delta[0] = C::new(1.0, 0.0);
        self.fourier_multiply(&delta, sigma)
    }

    /// Dense Hermitian matrix of the operator.
    pub fn matrix(&self) -> DMatrix<C> {
        let n = self.nodes.len();
        let k = self.circulant(&self.kinetic_symbol);
        let x = self.circulant(&self.momentum_symbol);
        DMatrix::from_fn(n, n, |j, l| {
            let d = (j + n - l) % n;
            let mut v = k[d] + 0.5 * (self.drift[j] + self.drift[l]) * x[d];
            if j == l {
                v += self.potential[j];
            }
            v
        })
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = if self.has_drift() {
            self.matrix().symmetric_eigenvalues().iter().copied().collect()
        } else {
            let n = self.nodes.len();
            let k = self.circulant(&self.kinetic_symbol);
            let m = DMatrix::from_fn(n, n, |j, l| {
                let v = k[(j + n - l) % n].re;
                if j == l { v + self.potential[j] } else { v }
            });
            m.symmetric_eigenvalues().iter().copied().collect()
        };
        ev.sort_by(f64::total_cmp);
        ev
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceSpectrum {
    pub h: f64,
    pub grid: GridSpec,
    pub interval: (f64, f64),
    pub eigenvalues: Vec<f64>,
    /// Largest change of the listed eigenvalues under `N -> 2N` and
    /// `L -> 1.25 L`.
    pub certificate: Option<f64>,
}

fn in_interval(ev: &[f64], (lo, hi): (f64, f64)) -> Vec<f64> {
    ev.iter().copied().filter(|e| *e >= lo && *e <= hi).collect()
}

fn max_shift(base: &[f64], other: &[f64]) -> f64 {
    base.iter()
        .map(|e| {
            other
                .iter()
                .map(|o| (o - e).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Grid centered at the bottom (or top) of the symbol's well.
pub fn default_grid(sym: &SymbolFamily, points: usize, half_length: f64) -> Result<GridSpec> {
    let center = locate_well(sym).map(|w| w.x).unwrap_or(0.0);
    Ok(GridSpec::new(points, half_length).centered(center))
}

pub fn reference_spectrum(
    sym: &SymbolFamily,
    h: f64,
    interval: (f64, f64),
    grid: GridSpec,
    certify: bool,
) -> Result<ReferenceSpectrum> {
    let base = in_interval(&GridOperator::new(sym, h, grid)?.eigenvalues(), interval);
    let certificate = if certify {
        let finer = GridSpec {
            points: 2 * grid.points,
            ..grid
        };
        let longer = GridSpec {
            half_length: 1.25 * grid.half_length,
            ..grid
        };
        let mut worst: f64 = 0.0;
        for g in [finer, longer] {
            let ev = GridOperator::new(sym, h, g)?.eigenvalues();
            worst = worst.max(max_shift(&base, &ev));
        }
        Some(worst)
    } else {
        None
    };
    Ok(ReferenceSpectrum {
        h,
        grid,
        interval,
        eigenvalues: base,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    #[test]
    fn harmonic_grid_levels() {
        let s = SymbolFamily::harmonic();
        let r = reference_spectrum(&s, 0.1, (0.0, 1.0), GridSpec::new(256, 8.0), true).unwrap();
        assert_eq!(r.eigenvalues.len(), 5);
        for (k, e) in r.eigenvalues.iter().enumerate() {
            assert!((e - (2 * k + 1) as f64 * 0.1).abs() < 1e-10);
        }
        assert!(r.certificate.unwrap() < 1e-10);
    }

    #[test]
    fn apply_matches_matrix() {
        let s = SymbolFamily::tilted(Expr::parse("0.5 + 0.2*x").unwrap(), Expr::parse("x^2").unwrap());
        let op = GridOperator::new(&s, 0.2, GridSpec::new(32, 3.0)).unwrap();
        let u: Vec<C> = op
            .nodes()
            .iter()
            .map(|&x| C::new((-x * x).exp(), 0.3 * x * (-x * x).exp()))
            .collect();
        let m = op.matrix();
        let direct = op.apply(&u);
        for j in 0..u.len() {
            let row: C = (0..u.len()).map(|l| m[(j, l)] * u[l]).sum();
            assert!((row - direct[j]).norm() < 1e-12);
        }
        for j in 0..u.len() {
            for l in 0..u.len() {
                assert!((m[(j, l)] - m[(l, j)].conj()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn drift_is_a_gauge_for_constant_f() {
        // xi^2 + 2 a xi + x^2 = (xi + a)^2 + x^2 - a^2 on a periodic grid
        // with a commensurate with the lattice of momenta
        let h = 0.1;
        let l = 6.0;
        let a = h * PI / l * 3.0;
        let s = SymbolFamily::tilted(Expr::constant(2.0 * a), Expr::parse("x^2").unwrap());
        let r = reference_spectrum(&s, h, (-1.0, 0.5), GridSpec::new(256, l), false).unwrap();
        for (k, e) in r.eigenvalues.iter().enumerate() {
            assert!((e - ((2 * k + 1) as f64 * h - a * a)).abs() < 1e-9, "{e}");
        }
    }
}
