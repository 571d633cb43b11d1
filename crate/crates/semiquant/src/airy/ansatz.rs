//! Least-squares test of the oscillatory Airy ansatz against a numerical
//! solution of `u'' = eta^2 Q(x~, eta) u` that decays on the right.
//!
//! On the oscillating side the decaying solution is matched by
//! `c+ F+ + c- F-` with
//! `F+- = (r')^-1/2 |r|^-1/4 (-R2 -+ i R1) exp(+- i zeta)`,
//! `zeta = (2/(3h)) |r|^(3/2)`. For `Ai` itself `c+/c- = i`, so the
//! phase error is `|arg(c+/c-) - pi/2|`.

use super::special::{oscillatory_asymptotics, R_COEFFS};
use super::transport::{PotentialSeries, TransportCoefficients};
use crate::error::{Result, SemiquantError};
use crate::numerics::ode::gbs_step;
use crate::taylor::Taylor;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Decay exponent `eta int sqrt(Q)` at the starting point of the
/// integration.
pub const START_DECAY: f64 = 25.0;
/// Largest accepted condition number of the fit matrix.
pub const MAX_CONDITION: f64 = 1e8;
const GBS_LEVELS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnsatzOptions {
    pub window: (f64, f64),
    pub points: usize,
}

impl Default for AnsatzOptions {
    fn default() -> Self {
        AnsatzOptions {
            window: (-0.8, -0.4),
            points: 400,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AnsatzFit {
    pub h: f64,
    pub phase_error: f64,
    /// Relative least-squares residual with the full `R1`, `R2`.
    pub residual: f64,
    /// Same with the first correction of `R2` removed.
    pub ablated_residual: f64,
    pub c_plus: (f64, f64),
    pub c_minus: (f64, f64),
    pub condition: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnsatzReport {
    pub options: AnsatzOptions,
    pub fits: Vec<AnsatzFit>,
    /// Phase errors strictly decrease as `h` decreases.
    pub monotone: bool,
}

impl AnsatzReport {
    pub fn fit_at(&self, h: f64) -> Option<&AnsatzFit> {
        self.fits.iter().find(|f| (f.h - h).abs() <= 1e-12 * h)
    }
}

fn q_and_slope(ps: &PotentialSeries, x: f64, eta: f64) -> (f64, f64) {
    let j = ps.total(Taylor::<f64, 2>::variable(x), Taylor::constant(eta));
    (j.c[0], j.c[1])
}

/// Point to the right of the turning point where the decaying solution
/// has dropped by `exp(-START_DECAY)`.
fn start_point(ps: &PotentialSeries, eta: f64) -> Result<f64> {
    let dx = 1e-3;
    let mut x: f64 = 0.0;
    let mut decay = 0.0;
    while decay < START_DECAY {
        let q = ps.total(x + 0.5 * dx, eta);
        if !(q > 0.0) {
            return Err(SemiquantError::InvalidArgument(format!(
                "Q is not positive at x~ = {} on the decaying side",
                x + 0.5 * dx
            )));
        }
        decay += eta * q.sqrt() * dx;
        x += dx;
        if x > 20.0 {
            return Err(SemiquantError::no_convergence("decaying-side start point"));
        }
    }
    Ok(x)
}

/// Samples of the decaying solution at `xs` (descending order).
fn decaying_solution(ps: &PotentialSeries, h: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let eta = 1.0 / h;
    let start = start_point(ps, eta)?;
    let (q, dq) = q_and_slope(ps, start, eta);
    let log_slope = -eta * q.sqrt() - dq / (4.0 * q);
    let rhs = |x: f64, y: &[f64; 2]| [y[1], eta * eta * ps.total(x, eta) * y[0]];
    let max_step = 0.25 * h;
    let mut y = [1.0, log_slope];
    let mut x = start;
    let mut out = Vec::with_capacity(xs.len());
    for &target in xs {
        let steps = ((x - target) / max_step).ceil().max(1.0) as usize;
        let dx = (target - x) / steps as f64;
        for k in 0..steps {
            y = gbs_step(&rhs, x + k as f64 * dx, &y, dx, GBS_LEVELS).0;
        }
        x = target;
        if !y[0].is_finite() {
            return Err(SemiquantError::NonFinite("decaying solution".into()));
        }
        out.push(y[0]);
    }
    Ok(out)
}

/// Basis values `(F+, F-)` at `x~`.
fn basis(tc: &TransportCoefficients, x: f64, h: f64, ablate: bool) -> Result<(C, C)> {
    let (r, dr) = tc.r_tilde(x, h)?;
    if !(r < 0.0 && dr > 0.0) {
        return Err(SemiquantError::InvalidArgument(format!(
            "fit point x~ = {x} is not on the oscillating side"
        )));
    }
    let (r1, mut r2, phase) = oscillatory_asymptotics(r, h);
    if ablate {
        let (num, den) = R_COEFFS[0];
        r2 -= num as f64 / den as f64 * h * r.abs().powf(-1.5);
    }
    let zeta = phase - std::f64::consts::FRAC_PI_4;
    let amp = dr.powf(-0.5) * r.abs().powf(-0.25);
    let e = C::from_polar(1.0, zeta);
    let plus = C::new(-r2, -r1) * e * amp;
    let minus = C::new(-r2, r1) * e.conj() * amp;
    Ok((plus, minus))
}

struct Fit {
    coeffs: [C; 2],
    residual: f64,
    condition: f64,
}

fn least_squares(rows: &[(C, C)], target: &[f64]) -> Result<Fit> {
    let n = rows.len();
    let a = DMatrix::from_fn(n, 2, |i, j| if j == 0 { rows[i].0 } else { rows[i].1 });
    let b = DVector::from_iterator(n, target.iter().map(|&v| C::new(v, 0.0)));
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !(condition < MAX_CONDITION) {
        return Err(SemiquantError::no_convergence(format!(
            "ansatz fit (condition number {condition:e})"
        )));
    }
    let c = svd
        .solve(&b, 0.0)
        .map_err(|e| SemiquantError::no_convergence(format!("ansatz fit: {e}")))?;
    let residual = (&a * &c - &b).norm() / b.norm();
    Ok(Fit {
        coeffs: [c[0], c[1]],
        residual,
        condition,
    })
}

pub fn ansatz_fit(
    ps: &PotentialSeries,
    tc: &TransportCoefficients,
    h: f64,
    options: AnsatzOptions,
) -> Result<AnsatzFit> {
    let (lo, hi) = options.window;
    if !(lo < hi && hi < 0.0 && options.points >= 4) {
        return Err(SemiquantError::InvalidArgument(
            "fit window must be a nondegenerate interval left of the turning point".into(),
        ));
    }
    let n = options.points;
    let xs: Vec<f64> = (0..n)
        .map(|k| hi - (hi - lo) * k as f64 / (n - 1) as f64)
        .collect();
    let mut u = decaying_solution(ps, h, &xs)?;
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    u.iter_mut().for_each(|v| *v /= scale);
    let full: Vec<(C, C)> = xs.iter().map(|&x| basis(tc, x, h, false)).collect::<Result<_>>()?;
    let cut: Vec<(C, C)> = xs.iter().map(|&x| basis(tc, x, h, true)).collect::<Result<_>>()?;
    let fit = least_squares(&full, &u)?;
    let ablated = least_squares(&cut, &u)?;
    let [cp, cm] = fit.coeffs;
    let phase_error = ((cp / cm).arg() - FRAC_PI_2).abs();
    Ok(AnsatzFit {
        h,
        phase_error,
        residual: fit.residual,
        ablated_residual: ablated.residual,
        c_plus: (cp.re, cp.im),
        c_minus: (cm.re, cm.im),
        condition: fit.condition,
    })
}

pub fn ansatz_check(
    ps: &PotentialSeries,
    tc: &TransportCoefficients,
    hs: &[f64],
    options: AnsatzOptions,
) -> Result<AnsatzReport> {
    let mut fits = hs
        .iter()
        .map(|&h| ansatz_fit(ps, tc, h, options))
        .collect::<Result<Vec<_>>>()?;
    fits.sort_by(|a, b| b.h.total_cmp(&a.h));
    let monotone = fits.windows(2).all(|w| w[1].phase_error < w[0].phase_error);
    Ok(AnsatzReport {
        options,
        fits,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    #[test]
    fn linear_potential_recovers_airy_phase() {
        let ps = PotentialSeries::new(Expr::var()).unwrap();
        let tc = TransportCoefficients::build(&ps).unwrap();
        // only the truncation of the oscillatory expansion remains
        let coarse = ansatz_fit(&ps, &tc, 0.05, AnsatzOptions::default()).unwrap();
        let fine = ansatz_fit(&ps, &tc, 0.0125, AnsatzOptions::default()).unwrap();
        assert!(coarse.phase_error < 1e-4, "{coarse:?}");
        assert!(fine.phase_error < 1e-7, "{fine:?}");
        assert!(fine.residual < 1e-7, "{fine:?}");
        let (cp, cm) = (C::new(fine.c_plus.0, fine.c_plus.1), C::new(fine.c_minus.0, fine.c_minus.1));
        assert!((cp - cm.conj()).norm() < 1e-10 * cp.norm());
    }
}
