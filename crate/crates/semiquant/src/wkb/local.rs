//! Laurent expansions at a focal point in the uniformizing variable `v`,
//! `x = x_F - sigma v^2`, where both branches of `xi` are analytic.
//!
//! Finite-part integrals from the focal point are read off these series:
//! the finite-part primitive of `sum c_k v^k` is `sum c_k v^(k+1)/(k+1)`
//! with the `k = -1` term excluded.

use super::contour::follow;
use super::density::{BranchDensities, PointPartials};
use crate::error::{Result, SemiquantError};
use crate::orbit::{branch_xi, Branch, FocalPoint, Side};
use crate::symbol::SymbolFamily;
use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// Sample count on the circle `|v| = r`.
pub const CIRCLE_NODES: usize = 128;
/// `r = RADIUS_FACTOR * sqrt(width)`.
pub const RADIUS_FACTOR: f64 = 0.3;
const LOWEST_POWER: i32 = -8;
const HIGHEST_POWER: i32 = 48;

/// Laurent series `sum_{k=LOWEST..=HIGHEST} c_k v^k`.
#[derive(Clone, Debug)]
pub struct Laurent {
    coeffs: Vec<C>,
}

impl Laurent {
    fn from_samples(samples: &[C], r: f64) -> Laurent {
        let m = samples.len();
        let coeffs = (LOWEST_POWER..=HIGHEST_POWER)
            .map(|k| {
                let mut s = C::new(0.0, 0.0);
                for (j, f) in samples.iter().enumerate() {
                    let theta = 2.0 * PI * j as f64 / m as f64;
                    s += f * C::from_polar(1.0, -(k as f64) * theta);
                }
                s / m as f64 * r.powi(-k)
            })
            .collect();
        Laurent { coeffs }
    }

    pub fn coefficient(&self, k: i32) -> C {
        if (LOWEST_POWER..=HIGHEST_POWER).contains(&k) {
            self.coeffs[(k - LOWEST_POWER) as usize]
        } else {
            C::new(0.0, 0.0)
        }
    }

    pub fn eval(&self, v: f64) -> C {
        (LOWEST_POWER..=HIGHEST_POWER)
            .map(|k| self.coefficient(k) * v.powi(k))
            .sum()
    }

    /// Finite-part primitive vanishing in the finite-part sense at `v = 0`.
    pub fn primitive(&self, v: f64) -> C {
        (LOWEST_POWER..=HIGHEST_POWER)
            .filter(|&k| k != -1)
            .map(|k| self.coefficient(k) * v.powi(k + 1) / (k + 1) as f64)
            .sum()
    }

    fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Expansions of the phase and amplitude densities at one focal point.
#[derive(Clone, Debug)]
pub struct FocalExpansion {
    pub focal: FocalPoint,
    /// `+1` at the right focal point, `-1` at the left one.
    pub sigma: f64,
    pub radius: f64,
    /// `xi dx/dv`, `(p1/beta0) dx/dv` and `T1 dx/dv`.
    pub xi: Laurent,
    pub p1_phase: Laurent,
    pub t1: Laurent,
    /// Constant Laurent coefficient of the bracket term.
    pub bracket_mean: f64,
    /// Constant Laurent coefficient of `d_xi(p1 / d_xi p0)`.
    pub g_mean: f64,
    /// `d_xi^2 p0` at the focal point.
    pub curvature: f64,
}

impl FocalExpansion {
    pub fn new(sym: &SymbolFamily, energy: f64, focal: FocalPoint, other: FocalPoint) -> Result<Self> {
        let p0 = sym.separable(0).ok_or_else(|| {
            SemiquantError::Unsupported(format!("local expansion needs a separable p0 (`{}`)", sym.name))
        })?;
        let sigma = if focal.side == Side::Right { 1.0 } else { -1.0 };
        let curvature = sym.partial(focal.x, focal.xi, 0, 0, 2)?;
        let gradient = sym.partial(focal.x, focal.xi, 0, 1, 0)?;
        let scale = 1.0 + sym.partial(focal.x, focal.xi, 0, 0, 1)?.abs() + gradient.abs();
        if curvature.abs() < 1e-8 * scale {
            return Err(SemiquantError::Unsupported(format!(
                "degenerate focal point of `{}` at x={} (d_xi^2 p0 = {curvature:e})",
                sym.name, focal.x
            )));
        }
        let width = (focal.x - other.x).abs();
        let radius = RADIUS_FACTOR * width.sqrt();
        let (right, left) = match focal.side {
            Side::Right => (focal, other),
            Side::Left => (other, focal),
        };
        let x_of = |v: C| C::new(focal.x, 0.0) - sigma * v * v;
        let start = focal.x - sigma * radius * radius;
        let xi0 = branch_xi(sym, energy, start, Branch::Plus, (&right, &left))?;
        let xi_minus = branch_xi(sym, energy, start, Branch::Minus, (&right, &left))?;

        let m = CIRCLE_NODES;
        let mut samples = vec![[C::new(0.0, 0.0); 5]; m];
        let mut v_prev = C::new(radius, 0.0);
        let mut xi = C::new(xi0, 0.0);
        for (j, slot) in samples.iter_mut().enumerate() {
            let v = C::from_polar(radius, 2.0 * PI * j as f64 / m as f64);
            if j > 0 {
                xi = follow(p0, energy, x_of(v_prev), xi, x_of(v))?;
                v_prev = v;
            }
            if j == m / 2 && (xi - xi_minus).norm() > 1e-8 * (1.0 + xi_minus.abs()) {
                return Err(SemiquantError::no_convergence(format!(
                    "branch exchange at focal point x={}",
                    focal.x
                )));
            }
            let d = BranchDensities::new(&PointPartials::generic(sym, x_of(v), xi)?);
            let jac = -2.0 * sigma * v;
            *slot = [xi * jac, d.p1_phase * jac, d.t1 * jac, d.bracket, d.g];
        }
        let series = |i: usize| {
            let s: Vec<C> = samples.iter().map(|row| row[i]).collect();
            Laurent::from_samples(&s, radius)
        };
        let t1 = series(2);
        let residue = t1.coefficient(-1).norm();
        if residue > 1e-7 * t1.scale().max(1.0) {
            return Err(SemiquantError::Unsupported(format!(
                "logarithmic term in the finite-part integral at x={} (residue {residue:e})",
                focal.x
            )));
        }
        Ok(FocalExpansion {
            focal,
            sigma,
            radius,
            xi: series(0),
            p1_phase: series(1),
            t1,
            bracket_mean: series(3).coefficient(0).re,
            g_mean: series(4).coefficient(0).re,
            curvature,
        })
    }

    /// Uniformizing coordinate of the real point `x` on branch `rho`.
    pub fn v_of(&self, x: f64, branch: Branch) -> f64 {
        branch.sign() * (self.sigma * (self.focal.x - x)).max(0.0).sqrt()
    }

    /// Edge of the zone covered by the expansion.
    pub fn matching_point(&self) -> f64 {
        self.focal.x - self.sigma * self.radius * self.radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_recovers_known_series() {
        let r = 0.4;
        let s: Vec<C> = (0..CIRCLE_NODES)
            .map(|j| {
                let v = C::from_polar(r, 2.0 * PI * j as f64 / CIRCLE_NODES as f64);
                v.powi(-3) * 2.0 + v * 0.5 + 1.0
            })
            .collect();
        let l = Laurent::from_samples(&s, r);
        assert!((l.coefficient(-3) - 2.0).norm() < 1e-12);
        assert!((l.coefficient(0) - 1.0).norm() < 1e-12);
        assert!((l.coefficient(1) - 0.5).norm() < 1e-12);
        let v = 0.3;
        let fp = l.primitive(v).re;
        let expected = -v.powi(-2) + v + 0.25 * v * v;
        assert!((fp - expected).abs() < 1e-11);
    }
}
