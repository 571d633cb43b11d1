//! Relative residual `||(P_grid - E) chi u|| / ||chi u||` of a windowed
//! WKB solution on the interior of the allowed segment.

use super::{Base, WkbSolution};
use crate::error::Result;
use crate::reference::{GridOperator, GridSpec};
use crate::symbol::SymbolFamily;
use num_complex::Complex64 as C;
use serde::Serialize;

/// Window support and plateau, as fractions of the width measured from
/// each focal point.
pub const WINDOW_EDGE: f64 = 0.03;
pub const WINDOW_PLATEAU: f64 = 0.12;
/// Fraction of the width excluded at each end when measuring.
pub const MEASURE_MARGIN: f64 = 0.2;

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Smooth cutoff equal to one on the plateau and zero near the focal points.
pub fn window(x: f64, left: f64, right: f64) -> f64 {
    let w = right - left;
    let ramp = |d: f64| smooth_step((d - WINDOW_EDGE * w) / ((WINDOW_PLATEAU - WINDOW_EDGE) * w));
    ramp(x - left) * ramp(right - x)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridResidual {
    pub h: f64,
    pub energy: f64,
    pub residual: f64,
    pub norm: f64,
}

impl GridResidual {
    pub fn relative(&self) -> f64 {
        self.residual / self.norm
    }
}

pub fn grid_residual(
    sym: &SymbolFamily,
    energy: f64,
    h: f64,
    grid: GridSpec,
    base: Base,
) -> Result<GridResidual> {
    let sol = WkbSolution::new(sym, energy)?;
    let (right, left) = sol.focal_points();
    let op = GridOperator::new(sym, h, grid)?;
    let u: Vec<C> = op
        .nodes()
        .iter()
        .map(|&x| {
            let chi = window(x, left.x, right.x);
            if chi == 0.0 {
                Ok(C::new(0.0, 0.0))
            } else {
                Ok(sol.eval(base, x, h)? * chi)
            }
        })
        .collect::<Result<_>>()?;
    let pu = op.apply(&u);
    let w = right.x - left.x;
    let (lo, hi) = (left.x + MEASURE_MARGIN * w, right.x - MEASURE_MARGIN * w);
    let mut residual: f64 = 0.0;
    let mut norm: f64 = 0.0;
    for (j, &x) in op.nodes().iter().enumerate() {
        if x >= lo && x <= hi {
            residual = residual.max((pu[j] - energy * u[j]).norm());
            norm = norm.max(u[j].norm());
        }
    }
    Ok(GridResidual {
        h,
        energy,
        residual,
        norm,
    })
}
