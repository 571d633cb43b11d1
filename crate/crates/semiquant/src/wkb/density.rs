//! Pointwise densities of the WKB construction along a branch
//! `xi = xi_rho(x)` of `p0(x, xi) = E`.

use crate::error::Result;
use crate::number::Number;
use crate::symbol::SymbolFamily;

/// Partials of `p0`, `p1`, `p2` at one point of phase space.
#[derive(Clone, Copy, Debug)]
pub struct PointPartials<T: Number> {
    pub p0x: T,
    pub p0xi: T,
    pub p0xx: T,
    pub p0xxi: T,
    pub p0xixi: T,
    pub p0xixixi: T,
    pub p0xxixixi: T,
    pub p0xxxixi: T,
    pub p0xi4: T,
    pub p1: T,
    pub p1xi: T,
    pub p2: T,
}

impl<T: Number> PointPartials<T> {
    /// Exact partials of a separable symbol over any scalar type.
    pub fn generic(sym: &SymbolFamily, x: T, xi: T) -> Result<Self> {
        let j0 = sym.jet_generic(x, xi, 0)?;
        let j1 = sym.jet_generic(x, xi, 1)?;
        let j2 = sym.jet_generic(x, xi, 2)?;
        Ok(PointPartials {
            p0x: j0.partial(1, 0),
            p0xi: j0.partial(0, 1),
            p0xx: j0.partial(2, 0),
            p0xxi: j0.partial(1, 1),
            p0xixi: j0.partial(0, 2),
            p0xixixi: j0.partial(0, 3),
            p0xxixixi: j0.partial(1, 3),
            p0xxxixi: j0.partial(2, 2),
            p0xi4: j0.partial(0, 4),
            p1: j1.partial(0, 0),
            p1xi: j1.partial(0, 1),
            p2: j2.partial(0, 0),
        })
    }
}

impl PointPartials<f64> {
    /// Real partials through [`SymbolFamily::partial`], custom terms included.
    pub fn real(sym: &SymbolFamily, x: f64, xi: f64) -> Result<Self> {
        let d = |j, a, b| sym.partial(x, xi, j, a, b);
        Ok(PointPartials {
            p0x: d(0, 1, 0)?,
            p0xi: d(0, 0, 1)?,
            p0xx: d(0, 2, 0)?,
            p0xxi: d(0, 1, 1)?,
            p0xixi: d(0, 0, 2)?,
            p0xixixi: d(0, 0, 3)?,
            p0xxixixi: d(0, 1, 3)?,
            p0xxxixi: d(0, 2, 2)?,
            p0xi4: d(0, 0, 4)?,
            p1: sym.eval(x, xi, 1)?,
            p1xi: d(1, 0, 1)?,
            p2: sym.eval(x, xi, 2)?,
        })
    }
}

/// Densities entering phase and amplitude at one point of a branch.
#[derive(Clone, Copy, Debug)]
pub struct BranchDensities<T: Number> {
    /// `beta0 = d_xi p0`.
    pub beta0: T,
    /// `p1 / beta0`, the first-order phase density.
    pub p1_phase: T,
    /// `T1`, the second-order phase density.
    pub t1: T,
    /// Boundary term whose derivative completes `T1` to the amplitude
    /// transport density.
    pub bracket: T,
    /// `d_xi (p1 / d_xi p0)`.
    pub g: T,
}

impl<T: Number> BranchDensities<T> {
    pub fn new(p: &PointPartials<T>) -> Self {
        let half = T::from_f64(0.5);
        let b0 = p.p0xi;
        let b0_2 = b0 * b0;
        let b0_3 = b0_2 * b0;
        let phi2 = -p.p0x / b0;
        let db0 = p.p0xxi + p.p0xixi * phi2;
        let local = (-p.p2 + p.p0xxxixi.scale(1.0 / 8.0) + phi2 * p.p0xxixixi.scale(1.0 / 12.0)
            - phi2 * phi2 * p.p0xi4.scale(1.0 / 24.0))
            / b0;
        let t1 = local - (db0 * db0 * p.p0xixi).scale(1.0 / 8.0) / b0_3
            + (phi2 * db0 * p.p0xixixi).scale(1.0 / 6.0) / b0_2
            + p.p1 / b0_2 * (p.p1xi - p.p1 * p.p0xixi * half / b0);
        let bracket = (phi2 * p.p0xixixi).scale(1.0 / 6.0) / b0 - (db0 * p.p0xixi).scale(0.25) / b0_2;
        BranchDensities {
            beta0: b0,
            p1_phase: p.p1 / b0,
            t1,
            bracket,
            g: (p.p1xi * b0 - p.p1 * p.p0xixi) / b0_2,
        }
    }
}

/// `T1` at a real point `(x, xi)` of the energy curve.
pub fn t1(sym: &SymbolFamily, x: f64, xi: f64) -> Result<f64> {
    Ok(BranchDensities::new(&PointPartials::real(sym, x, xi)?).t1)
}
