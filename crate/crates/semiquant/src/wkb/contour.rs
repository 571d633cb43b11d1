//! Loop integrals around the classically allowed segment, computed on an
//! ellipse in the complex x-plane that encloses both focal points.

use super::density::{BranchDensities, PointPartials};
use crate::error::{Result, SemiquantError};
use crate::orbit::{branch_xi, find_focal_points, Branch};
use crate::symbol::{SeparableTerm, SymbolFamily};
use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// Nodes of the trapezoid rule on the ellipse.
pub const CONTOUR_NODES: usize = 512;
/// Semi-axes of the ellipse relative to the half width of the well.
pub const SEMI_MAJOR: f64 = 1.3;
pub const SEMI_MINOR: f64 = 0.25;
const CLOSURE_TOL: f64 = 1e-8;
const MAX_HALVINGS: u32 = 24;

fn principal(sym: &SymbolFamily) -> Result<&SeparableTerm> {
    sym.separable(0).ok_or_else(|| {
        SemiquantError::Unsupported(format!(
            "complex continuation needs a separable p0 (`{}`)",
            sym.name
        ))
    })
}

fn newton(p0: &SeparableTerm, energy: f64, z: C, guess: C) -> Option<C> {
    let mut xi = guess;
    for _ in 0..40 {
        let (p, _, py) = p0.gradient(z, xi);
        let step = (p - energy) / py;
        xi -= step;
        if !(xi.re.is_finite() && xi.im.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + xi.norm()) {
            return Some(xi);
        }
    }
    let (p, _, py) = p0.gradient(z, xi);
    ((p - energy).norm() <= 1e-13 * (1.0 + energy.abs()) && py.norm() > 0.0).then_some(xi)
}

/// Analytic continuation of a root of `p0(z, xi) = E` from `z0` to `z1`
/// with a tangent predictor and step halving.
pub(crate) fn follow(p0: &SeparableTerm, energy: f64, z0: C, xi0: C, z1: C) -> Result<C> {
    fn go(p0: &SeparableTerm, energy: f64, z0: C, xi0: C, z1: C, depth: u32) -> Result<C> {
        let (_, px, py) = p0.gradient(z0, xi0);
        let pred = xi0 - (z1 - z0) * px / py;
        let accepted = newton(p0, energy, z1, pred)
            .filter(|xi| (xi - pred).norm() <= 0.1 * (pred - xi0).norm() + 1e-4 * (1.0 + xi0.norm()));
        match accepted {
            Some(xi) => Ok(xi),
            None if depth < MAX_HALVINGS => {
                let mid = 0.5 * (z0 + z1);
                let xm = go(p0, energy, z0, xi0, mid, depth + 1)?;
                go(p0, energy, mid, xm, z1, depth + 1)
            }
            None => Err(SemiquantError::no_convergence(format!(
                "branch continuation near z = {z1}"
            ))),
        }
    }
    go(p0, energy, z0, xi0, z1, 0)
}

/// Real parts of `oint xi dz`, `oint p1 / d_xi p0 dz` and `oint T1 dz`,
/// oriented so that the first equals `S0`.
#[derive(Clone, Copy, Debug)]
pub struct LoopIntegrals {
    pub action: f64,
    pub p1_phase: f64,
    pub t1: f64,
    /// Largest imaginary part, a check on the loop.
    pub imaginary: f64,
}

impl LoopIntegrals {
    /// `A_- - A_+ = S0 - h oint p1/beta0 + h^2 oint T1`.
    pub fn phase(&self, h: f64) -> f64 {
        self.action - h * self.p1_phase + h * h * self.t1
    }
}

pub fn loop_integrals(sym: &SymbolFamily, energy: f64) -> Result<LoopIntegrals> {
    let p0 = principal(sym)?;
    let (right, left) = find_focal_points(sym, energy)?;
    let c = 0.5 * (right.x + left.x);
    let half = 0.5 * (right.x - left.x);
    let (a, b) = (SEMI_MAJOR * half, SEMI_MINOR * half);
    let xi_c = branch_xi(sym, energy, c, Branch::Plus, (&right, &left))?;

    // descend from the real axis to the bottom of the ellipse on the
    // Plus branch, which then runs along the lower rim
    let mut z = C::new(c, 0.0);
    let mut xi = C::new(xi_c, 0.0);
    for k in 1..=32 {
        let next = C::new(c, -b * k as f64 / 32.0);
        xi = follow(p0, energy, z, xi, next)?;
        z = next;
    }
    let start_xi = xi;
    let m = CONTOUR_NODES;
    let dtheta = 2.0 * PI / m as f64;
    let mut acc = [C::new(0.0, 0.0); 3];
    for k in 0..m {
        let theta = -0.5 * PI + dtheta * k as f64;
        let zk = C::new(c + a * theta.cos(), b * theta.sin());
        if k > 0 {
            xi = follow(p0, energy, z, xi, zk)?;
            z = zk;
        }
        let dz = C::new(-a * theta.sin(), b * theta.cos()) * dtheta;
        let d = BranchDensities::new(&PointPartials::generic(sym, zk, xi)?);
        acc[0] += xi * dz;
        acc[1] += d.p1_phase * dz;
        acc[2] += d.t1 * dz;
    }
    let end = C::new(c, -b);
    let xi_end = follow(p0, energy, z, xi, end)?;
    if (xi_end - start_xi).norm() > CLOSURE_TOL * (1.0 + start_xi.norm()) {
        return Err(SemiquantError::Unsupported(format!(
            "branch of `{}` does not close around the focal points at E={energy}",
            sym.name
        )));
    }
    let imaginary = acc.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    Ok(LoopIntegrals {
        action: acc[0].re,
        p1_phase: acc[1].re,
        t1: acc[2].re,
        imaginary,
    })
}

/// `A_- - A_+` from the loop integrals.
pub fn gram_phase(sym: &SymbolFamily, energy: f64, h: f64) -> Result<f64> {
    Ok(loop_integrals(sym, energy)?.phase(h))
}
