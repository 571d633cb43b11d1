//! Second-order WKB solutions on the classically allowed segment.
//!
//! On branch `rho` the solution based at a focal point `F` is
//!
//! `u = sum_rho m_rho |beta0|^(-1/2) exp(i Phi_rho / h) (C0 + h (C1 + D1_rho))`
//!
//! with `Phi_rho = FP int_F^x (xi_rho - h p1/beta0)`, the Maslov factors
//! `m_rho = exp(+-i pi/4)` and `Im D1_rho = C0 (FP int_F^x T1 + B - B_F)`,
//! where `B` is the bracket density and `B_F` its finite part at `F`.
//! Near each focal point the integrals come from Laurent series in the
//! uniformizing variable; in between from a Chebyshev interpolant.

pub mod contour;
pub mod density;
pub mod local;
pub mod residual;

pub use contour::{gram_phase, loop_integrals, LoopIntegrals};
pub use density::{t1, BranchDensities, PointPartials};
pub use local::FocalExpansion;

use crate::error::{Result, SemiquantError};
use crate::numerics::cheb::ChebGrid;
use crate::orbit::{branch_xi, find_focal_points, Branch, FocalPoint};
use crate::symbol::SymbolFamily;
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

/// `C0 = 2^(-1/2)`.
pub const C0: f64 = FRAC_1_SQRT_2;
/// Chebyshev nodes on the segment between the two local zones.
pub const INTERIOR_NODES: usize = 201;
/// Points closer than this fraction of the width to a focal point are
/// rejected by pointwise evaluation.
pub const FOCAL_EXCLUSION: f64 = 1e-3;

/// Focal point a WKB solution is based at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    /// The right focal point `x_E`.
    Right,
    /// The left focal point `x'_E`.
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Density {
    Xi,
    P1Phase,
    T1,
}

impl Density {
    fn index(self) -> usize {
        match self {
            Density::Xi => 0,
            Density::P1Phase => 1,
            Density::T1 => 2,
        }
    }
}

fn branch_index(b: Branch) -> usize {
    match b {
        Branch::Plus => 0,
        Branch::Minus => 1,
    }
}

/// Everything needed to evaluate WKB quantities at one energy.
pub struct WkbSolution<'a> {
    sym: &'a SymbolFamily,
    pub energy: f64,
    pub right: FocalExpansion,
    pub left: FocalExpansion,
    grid: ChebGrid,
    /// Antiderivative coefficients, indexed by branch then density.
    primitives: [[Vec<f64>; 3]; 2],
}

impl<'a> WkbSolution<'a> {
    pub fn new(sym: &'a SymbolFamily, energy: f64) -> Result<Self> {
        let (r, l) = find_focal_points(sym, energy)?;
        let right = FocalExpansion::new(sym, energy, r, l)?;
        let left = FocalExpansion::new(sym, energy, l, r)?;
        let grid = ChebGrid::new(left.matching_point(), right.matching_point(), INTERIOR_NODES);
        let mut primitives: [[Vec<f64>; 3]; 2] = Default::default();
        for branch in [Branch::Plus, Branch::Minus] {
            let mut values = [vec![], vec![], vec![]];
            for &x in &grid.points {
                let xi = branch_xi(sym, energy, x, branch, (&r, &l))?;
                let d = BranchDensities::new(&PointPartials::real(sym, x, xi)?);
                values[0].push(xi);
                values[1].push(d.p1_phase);
                values[2].push(d.t1);
            }
            for (k, vals) in values.iter().enumerate() {
                if vals.iter().any(|v| !v.is_finite()) {
                    return Err(SemiquantError::NonFinite(format!(
                        "WKB density on branch {branch:?} at E={energy}"
                    )));
                }
                primitives[branch_index(branch)][k] =
                    grid.integral_coefficients(&grid.coefficients(vals));
            }
        }
        Ok(WkbSolution {
            sym,
            energy,
            right,
            left,
            grid,
            primitives,
        })
    }

    pub fn symbol(&self) -> &SymbolFamily {
        self.sym
    }

    pub fn focal_points(&self) -> (FocalPoint, FocalPoint) {
        (self.right.focal, self.left.focal)
    }

    pub fn width(&self) -> f64 {
        self.right.focal.x - self.left.focal.x
    }

    fn expansion(&self, base: Base) -> &FocalExpansion {
        match base {
            Base::Right => &self.right,
            Base::Left => &self.left,
        }
    }

    fn series(exp: &FocalExpansion, kind: Density) -> &local::Laurent {
        match kind {
            Density::Xi => &exp.xi,
            Density::P1Phase => &exp.p1_phase,
            Density::T1 => &exp.t1,
        }
    }

    fn interior(&self, branch: Branch, kind: Density, x: f64) -> f64 {
        self.grid
            .eval(&self.primitives[branch_index(branch)][kind.index()], x)
    }

    /// A primitive of the density on the whole segment, stitched from the
    /// local series and the interior interpolant.
    fn stitched(&self, branch: Branch, kind: Density, x: f64) -> f64 {
        for exp in [&self.right, &self.left] {
            let m = exp.matching_point();
            if exp.sigma * (x - m) > 0.0 {
                let s = Self::series(exp, kind);
                return self.interior(branch, kind, m) + s.primitive(exp.v_of(x, branch)).re
                    - s.primitive(exp.v_of(m, branch)).re;
            }
        }
        self.interior(branch, kind, x)
    }

    /// Finite-part value of [`Self::stitched`] at a focal point.
    fn stitched_at_focal(&self, branch: Branch, kind: Density, base: Base) -> f64 {
        let exp = self.expansion(base);
        let m = exp.matching_point();
        self.interior(branch, kind, m) - Self::series(exp, kind).primitive(exp.v_of(m, branch)).re
    }

    fn check_point(&self, x: f64) -> Result<()> {
        let (r, l) = (self.right.focal.x, self.left.focal.x);
        if !(l < x && x < r) {
            return Err(SemiquantError::OutsideWell { x, left: l, right: r });
        }
        let d = (r - x).min(x - l);
        if d < FOCAL_EXCLUSION * self.width() {
            return Err(SemiquantError::FocalProximity(d));
        }
        Ok(())
    }

    /// `FP int_F^x` of a density along a branch.
    pub fn primitive(&self, base: Base, branch: Branch, kind: Density, x: f64) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.stitched(branch, kind, x) - self.stitched_at_focal(branch, kind, base))
    }

    /// `Phi_rho(x) = FP int_F^x xi_rho - h int_F^x p1/beta0`, with the phase
    /// at the base point set to zero on both branches.
    pub fn phase(&self, base: Base, branch: Branch, x: f64, h: f64) -> Result<f64> {
        Ok(self.primitive(base, branch, Density::Xi, x)?
            - h * self.primitive(base, branch, Density::P1Phase, x)?)
    }

    fn densities(&self, branch: Branch, x: f64) -> Result<BranchDensities<f64>> {
        let xi = branch_xi(
            self.sym,
            self.energy,
            x,
            branch,
            (&self.right.focal, &self.left.focal),
        )?;
        Ok(BranchDensities::new(&PointPartials::real(self.sym, x, xi)?))
    }

    /// `b0 = C0 |beta0|^(-1/2) exp(-i int_{x_E}^x p1/beta0)`.
    pub fn amplitude_b0(&self, branch: Branch, x: f64) -> Result<C> {
        let d = self.densities(branch, x)?;
        let q = self.primitive(Base::Right, branch, Density::P1Phase, x)?;
        Ok(C::from_polar(C0 * d.beta0.abs().powf(-0.5), -q))
    }

    /// First-order amplitude correction `D1_rho(x)`, normalized to vanish
    /// at the base point in the finite-part sense.
    pub fn d1(&self, base: Base, branch: Branch, x: f64) -> Result<C> {
        let d = self.densities(branch, x)?;
        let exp = self.expansion(base);
        let j = self.primitive(base, branch, Density::T1, x)? + d.bracket - exp.bracket_mean;
        Ok(C::new(-0.5 * C0 * (d.g - exp.g_mean), C0 * j))
    }

    /// `C1 = -(C0/2) g_F`, the constant completing `Re D1`.
    pub fn c1(&self, base: Base) -> f64 {
        -0.5 * C0 * self.expansion(base).g_mean
    }

    /// Maslov factor of a branch at a base point.
    pub fn maslov(&self, base: Base, branch: Branch) -> C {
        let exp = self.expansion(base);
        let s = exp.sigma * exp.curvature.signum() * branch.sign();
        C::from_polar(1.0, s * FRAC_PI_4)
    }

    /// `(A_+, A_-)`: total phase from the right to the left focal point on
    /// each branch, finite parts included.
    pub fn a_pm(&self, h: f64) -> (f64, f64) {
        let a = |branch: Branch| {
            let diff = |kind| {
                self.stitched_at_focal(branch, kind, Base::Left)
                    - self.stitched_at_focal(branch, kind, Base::Right)
            };
            diff(Density::Xi) - h * diff(Density::P1Phase)
                + h * h * (diff(Density::T1) - self.right.bracket_mean + self.left.bracket_mean)
        };
        (a(Branch::Plus), a(Branch::Minus))
    }

    /// Second-order WKB solution based at `base`.
    pub fn eval(&self, base: Base, x: f64, h: f64) -> Result<C> {
        let mut u = C::new(0.0, 0.0);
        for branch in [Branch::Plus, Branch::Minus] {
            let d = self.densities(branch, x)?;
            let phase = self.phase(base, branch, x, h)?;
            let corr = C::new(C0 + h * self.c1(base), 0.0) + h * self.d1(base, branch, x)?;
            u += self.maslov(base, branch) * d.beta0.abs().powf(-0.5) * C::from_polar(1.0, phase / h) * corr;
        }
        Ok(u)
    }
}

/// `Phi_rho(x)` for one evaluation point.
pub fn phase(sym: &SymbolFamily, energy: f64, base: Base, branch: Branch, x: f64, h: f64) -> Result<f64> {
    WkbSolution::new(sym, energy)?.phase(base, branch, x, h)
}

pub fn amplitude_b0(sym: &SymbolFamily, energy: f64, branch: Branch, x: f64) -> Result<C> {
    WkbSolution::new(sym, energy)?.amplitude_b0(branch, x)
}

pub fn d1(sym: &SymbolFamily, energy: f64, base: Base, branch: Branch, x: f64) -> Result<C> {
    WkbSolution::new(sym, energy)?.d1(base, branch, x)
}

pub fn a_pm(sym: &SymbolFamily, energy: f64, h: f64) -> Result<(f64, f64)> {
    Ok(WkbSolution::new(sym, energy)?.a_pm(h))
}

pub fn wkb_eval(sym: &SymbolFamily, energy: f64, base: Base, x: f64, h: f64) -> Result<C> {
    WkbSolution::new(sym, energy)?.eval(base, x, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionEvaluator;
    use crate::expr::Expr;
    use std::f64::consts::PI;

    #[test]
    fn harmonic_phase_at_center() {
        let s = SymbolFamily::harmonic();
        let p = phase(&s, 1.0, Base::Right, Branch::Plus, 0.0, 0.1).unwrap();
        assert!((p + PI / 4.0).abs() < 1e-12, "{p}");
        let m = phase(&s, 1.0, Base::Right, Branch::Minus, 0.0, 0.1).unwrap();
        assert!((m - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_d1_matches_closed_form() {
        let s = SymbolFamily::harmonic();
        let e = 1.3;
        let w = WkbSolution::new(&s, e).unwrap();
        for &x in &[-0.9, -0.2, 0.0, 0.5, 1.0] {
            let d = w.d1(Base::Right, Branch::Plus, x).unwrap();
            let expected = C0 * x * (6.0 * e - x * x) / (24.0 * e * (e - x * x).powf(1.5));
            assert!((d.im - expected).abs() < 1e-10, "x={x}: {} vs {expected}", d.im);
            assert!(d.re.abs() < 1e-14);
        }
    }

    #[test]
    fn loop_and_finite_part_routes_agree() {
        let syms = [
            SymbolFamily::harmonic(),
            SymbolFamily::schrodinger(Expr::parse("x^4").unwrap()),
            SymbolFamily::schrodinger(Expr::parse("x^2 + 0.2*x^4 + 0.3*x^3").unwrap()),
            SymbolFamily::harper(),
        ];
        for s in &syms {
            let e = if s.name == "harper" { 1.2 } else { 0.8 };
            let li = loop_integrals(s, e).unwrap();
            let (ap, am) = a_pm(s, e, 0.1).unwrap();
            let via_fp = am - ap;
            assert!(
                (via_fp - li.phase(0.1)).abs() < 1e-9,
                "{}: {via_fp} vs {}",
                s.name,
                li.phase(0.1)
            );
        }
    }

    #[test]
    fn loop_integrals_reproduce_actions() {
        let syms = [
            SymbolFamily::schrodinger(Expr::parse("x^4").unwrap()),
            SymbolFamily::harper(),
            SymbolFamily::tilted(Expr::parse("0.3*x").unwrap(), Expr::parse("x^2 + 0.1*x^4").unwrap()),
        ];
        for s in &syms {
            let ev = ActionEvaluator::new(s);
            let e = if s.name == "harper" { 1.1 } else { 0.9 };
            let li = loop_integrals(s, e).unwrap();
            assert!((li.action - ev.s0(e).unwrap()).abs() < 1e-10);
            let s2 = ev.s2(e).unwrap();
            assert!((li.t1 - s2).abs() < 1e-6 * (1.0 + s2.abs()), "{}: {} vs {s2}", s.name, li.t1);
        }
        let lin = SymbolFamily::harmonic().with_p1(crate::symbol::Term::Separable(
            crate::symbol::SeparableTerm::potential(Expr::var()),
        ));
        let li = loop_integrals(&lin, 1.0).unwrap();
        assert!((li.t1 - PI / 4.0).abs() < 1e-10, "{}", li.t1);
    }
}
