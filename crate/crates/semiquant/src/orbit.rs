//! Closed energy curves `{p0 = E}` around a single well: focal points,
//! branch functions and a uniformly sampled time parametrization.
//!
//! All loop integrals downstream are periodic trapezoid sums over the
//! samples of one period along the Hamilton flow `x' = d_xi p0`,
//! `xi' = -d_x p0`.

use crate::error::{Result, SemiquantError};
use crate::numerics::ode::{adaptive_until, gbs_step, uniform_path, DEFAULT_LEVELS};
use crate::numerics::roots::brent;
use crate::symbol::SymbolFamily;
use serde::Serialize;

/// Absolute tolerance on focal-point equations.
pub const TOL_ROOT: f64 = 1e-12;
/// Absolute tolerance on energy conservation and loop closure.
pub const TOL_ORBIT: f64 = 1e-9;
/// Minimum gap between E and the critical value at the well center.
pub const CRITICAL_GAP: f64 = 1e-8;

const MIN_STEPS: usize = 256;
const MAX_STEPS: usize = 8192;
const SCAN_POINTS: usize = 1601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

/// Branch label: `Plus` is the half of the orbit on which the flow moves
/// to the right (`d_xi p0 > 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Anticlockwise,
    Clockwise,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FocalPoint {
    pub x: f64,
    pub xi: f64,
    pub side: Side,
}

/// Critical point of `p0` that the energy curves surround.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Well {
    pub x: f64,
    pub xi: f64,
    pub critical_energy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub energy: f64,
    pub focal_right: FocalPoint,
    pub focal_left: FocalPoint,
    /// `N` samples `(x, xi)` at `t_k = k T / N`, one full period.
    pub points: Vec<[f64; 2]>,
    pub period: f64,
    pub orientation: Orientation,
    pub well: Well,
}

impl Orbit {
    pub fn steps(&self) -> usize {
        self.points.len()
    }

    pub fn dt(&self) -> f64 {
        self.period / self.points.len() as f64
    }

    /// `(t, x, xi)` triples.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let dt = self.dt();
        self.points
            .iter()
            .enumerate()
            .map(move |(k, p)| (k as f64 * dt, p[0], p[1]))
    }

    /// Periodic trapezoid approximation of `int_0^T f(x(t), xi(t)) dt`.
    pub fn integrate(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        self.points.iter().map(|p| f(p[0], p[1])).sum::<f64>() * self.dt()
    }

    /// Fallible variant of [`Orbit::integrate`].
    pub fn try_integrate(&self, mut f: impl FnMut(f64, f64) -> Result<f64>) -> Result<f64> {
        let mut acc = 0.0;
        for p in &self.points {
            acc += f(p[0], p[1])?;
        }
        Ok(acc * self.dt())
    }

    pub fn width(&self) -> f64 {
        self.focal_right.x - self.focal_left.x
    }
}

fn newton_xi_critical(sym: &SymbolFamily, x: f64, seed: f64) -> Result<f64> {
    let mut xi = seed;
    for _ in 0..50 {
        let d1 = sym.partial(x, xi, 0, 0, 1)?;
        if d1.abs() <= TOL_ROOT * 1e-2 {
            return Ok(xi);
        }
        let d2 = sym.partial(x, xi, 0, 0, 2)?;
        if d2 == 0.0 || !d2.is_finite() {
            break;
        }
        let step = d1 / d2;
        xi -= step;
        if step.abs() <= 1e-15 * (1.0 + xi.abs()) {
            return Ok(xi);
        }
    }
    let d1 = sym.partial(x, xi, 0, 0, 1)?;
    if d1.abs() <= TOL_ROOT {
        Ok(xi)
    } else {
        Err(SemiquantError::no_convergence(format!(
            "critical momentum d_xi p0 = 0 at x={x}"
        )))
    }
}

/// Newton iteration on `grad p0 = 0` from the symbol's center hint.
pub fn locate_well(sym: &SymbolFamily) -> Result<Well> {
    let (mut x, mut xi) = sym.center_hint;
    for _ in 0..200 {
        let gx = sym.partial(x, xi, 0, 1, 0)?;
        let gy = sym.partial(x, xi, 0, 0, 1)?;
        if gx.hypot(gy) < 1e-14 {
            break;
        }
        let hxx = sym.partial(x, xi, 0, 2, 0)?;
        let hxy = sym.partial(x, xi, 0, 1, 1)?;
        let hyy = sym.partial(x, xi, 0, 0, 2)?;
        let det = hxx * hyy - hxy * hxy;
        let (dx, dy) = if det.abs() > 1e-300 {
            ((hyy * gx - hxy * gy) / det, (hxx * gy - hxy * gx) / det)
        } else if hxx.abs() > 0.0 && hyy.abs() > 0.0 {
            (gx / hxx, gy / hyy)
        } else {
            return Err(SemiquantError::no_convergence("well center search"));
        };
        x -= dx;
        xi -= dy;
        if !x.is_finite() || !xi.is_finite() {
            return Err(SemiquantError::no_convergence("well center search"));
        }
    }
    let gx = sym.partial(x, xi, 0, 1, 0)?;
    let gy = sym.partial(x, xi, 0, 0, 1)?;
    if gx.hypot(gy) > 1e-8 {
        return Err(SemiquantError::no_convergence("well center search"));
    }
    Ok(Well {
        x,
        xi,
        critical_energy: sym.eval(x, xi, 0)?,
    })
}

/// The two solutions of `{p0 = E, d_xi p0 = 0}` bounding the orbit.
pub fn find_focal_points(sym: &SymbolFamily, energy: f64) -> Result<(FocalPoint, FocalPoint)> {
    let well = locate_well(sym)?;
    focal_points_in(sym, &well, energy)
}

fn focal_points_in(sym: &SymbolFamily, well: &Well, energy: f64) -> Result<(FocalPoint, FocalPoint)> {
    let gap = (energy - well.critical_energy).abs();
    if gap < CRITICAL_GAP {
        return Err(SemiquantError::CriticalEnergy {
            energy,
            critical: well.critical_energy,
            gap,
        });
    }
    let (lo, hi) = sym.window;
    if !(lo < well.x && well.x < hi) {
        return Err(SemiquantError::InvalidArgument(format!(
            "well center x={} lies outside the window [{lo}, {hi}]",
            well.x
        )));
    }
    let residual = |x: f64, xi_c: f64| -> Result<f64> { Ok(sym.eval(x, xi_c, 0)? - energy) };

    let mut roots = Vec::new();
    for side in [Side::Right, Side::Left] {
        let end = if side == Side::Right { hi } else { lo };
        let n = SCAN_POINTS / 2;
        let mut prev_x = well.x;
        let mut prev_xi = well.xi;
        let mut prev_f = residual(prev_x, prev_xi)?;
        let mut found = Vec::new();
        for k in 1..=n {
            let x = well.x + (end - well.x) * k as f64 / n as f64;
            let xi = match newton_xi_critical(sym, x, prev_xi) {
                Ok(v) => v,
                Err(_) => break,
            };
            let f = residual(x, xi)?;
            if f.signum() != prev_f.signum() {
                let seed = prev_xi;
                let mut last_xi = seed;
                let root = brent(
                    |t| match newton_xi_critical(sym, t, seed) {
                        Ok(v) => {
                            last_xi = v;
                            sym.eval(t, v, 0).map(|p| p - energy).unwrap_or(f64::NAN)
                        }
                        Err(_) => f64::NAN,
                    },
                    prev_x.min(x),
                    prev_x.max(x),
                    1e-15,
                )?;
                let xi_root = newton_xi_critical(sym, root, last_xi)?;
                found.push(FocalPoint {
                    x: root,
                    xi: xi_root,
                    side,
                });
            }
            prev_x = x;
            prev_xi = xi;
            prev_f = f;
        }
        roots.push(found);
    }
    let total = roots[0].len() + roots[1].len();
    if roots[0].len() != 1 || roots[1].len() != 1 {
        return Err(SemiquantError::NonConvexOrbit {
            energy,
            found: total,
        });
    }
    let right = roots[0][0];
    let left = roots[1][0];
    for fp in [right, left] {
        let r = (sym.eval(fp.x, fp.xi, 0)? - energy).abs();
        let d = sym.partial(fp.x, fp.xi, 0, 0, 1)?.abs();
        if r > TOL_ROOT * energy.abs().max(1.0) || d > TOL_ROOT {
            return Err(SemiquantError::no_convergence(format!(
                "focal point refinement at x={} (residual {r:e}, d_xi p0 {d:e})",
                fp.x
            )));
        }
    }
    Ok((right, left))
}

/// `xi_rho(x)` solving `p0(x, xi) = E` on the requested branch.
pub fn branch_xi(
    sym: &SymbolFamily,
    energy: f64,
    x: f64,
    branch: Branch,
    focal: (&FocalPoint, &FocalPoint),
) -> Result<f64> {
    let (right, left) = focal;
    if !(left.x < x && x < right.x) {
        return Err(SemiquantError::OutsideWell {
            x,
            left: left.x,
            right: right.x,
        });
    }
    // interpolate the critical momentum between focal points as a seed
    let s = (x - left.x) / (right.x - left.x);
    let seed = left.xi + s * (right.xi - left.xi);
    let xi_c = newton_xi_critical(sym, x, seed)?;
    branch_xi_from(sym, energy, x, branch, xi_c)
}

fn branch_xi_from(sym: &SymbolFamily, energy: f64, x: f64, branch: Branch, xi_c: f64) -> Result<f64> {
    let f = |xi: f64| sym.eval(x, xi, 0).map(|p| p - energy).unwrap_or(f64::NAN);
    let probe = 1e-3 * (1.0 + xi_c.abs());
    let up_velocity = sym.partial(x, xi_c + probe, 0, 0, 1)?;
    let dir = if up_velocity * branch.sign() > 0.0 { 1.0 } else { -1.0 };
    let f_c = f(xi_c);
    let mut step = 1e-2 * (1.0 + xi_c.abs());
    let mut inner = xi_c;
    let mut outer = xi_c + dir * step;
    let mut found = false;
    for _ in 0..80 {
        let fo = f(outer);
        if fo.is_finite() && fo.signum() != f_c.signum() {
            found = true;
            break;
        }
        inner = outer;
        step *= 1.6;
        outer += dir * step;
    }
    if !found {
        return Err(SemiquantError::no_convergence(format!(
            "branch bracket at x={x}, E={energy}"
        )));
    }
    let mut xi = brent(f, inner.min(outer), inner.max(outer), 1e-15)?;
    // Newton polish on the residual
    for _ in 0..3 {
        let r = sym.eval(x, xi, 0)? - energy;
        let d = sym.partial(x, xi, 0, 0, 1)?;
        if d == 0.0 {
            break;
        }
        let dxi = r / d;
        if dxi.abs() > 1e-10 * (1.0 + xi.abs()) {
            break;
        }
        xi -= dxi;
    }
    Ok(xi)
}

/// Rough period scale used for the integration time budget.
fn period_estimate(sym: &SymbolFamily, energy: f64, right: &FocalPoint, left: &FocalPoint) -> Result<f64> {
    let xm = 0.5 * (right.x + left.x);
    let xi = branch_xi(sym, energy, xm, Branch::Plus, (right, left))?;
    let v = sym.partial(xm, xi, 0, 0, 1)?.abs();
    Ok(4.0 * (right.x - left.x) / v.max(1e-12))
}

impl Orbit {
    /// Orbit with the sample count chosen by successive doubling until the
    /// period and the action agree to 1e-12 relative.
    pub fn compute(sym: &SymbolFamily, energy: f64) -> Result<Orbit> {
        let seed = OrbitSeed::new(sym, energy)?;
        let mut steps = MIN_STEPS;
        let mut prev = seed.integrate(sym, steps)?;
        loop {
            let next_steps = steps * 2;
            let next = seed.integrate(sym, next_steps)?;
            let s_prev = action_sum(sym, &prev)?;
            let s_next = action_sum(sym, &next)?;
            let dt = (next.period - prev.period).abs() / next.period;
            let ds = (s_next - s_prev).abs() / s_next.abs().max(1e-300);
            if dt < 1e-12 && ds < 1e-12 {
                return Ok(prev);
            }
            if next_steps >= MAX_STEPS {
                return Ok(next);
            }
            steps = next_steps;
            prev = next;
        }
    }

    /// Orbit with a prescribed number of uniform samples.
    pub fn with_steps(sym: &SymbolFamily, energy: f64, steps: usize) -> Result<Orbit> {
        OrbitSeed::new(sym, energy)?.integrate(sym, steps)
    }

    /// `(1/2) int (x xi' - xi x') dt`; positive for anticlockwise loops.
    pub fn signed_area(&self, sym: &SymbolFamily) -> Result<f64> {
        self.try_integrate(|x, xi| {
            let (_, px, pxi) = sym.gradient0(x, xi)?;
            Ok(0.5 * (x * (-px) - xi * pxi))
        })
    }
}

fn action_sum(sym: &SymbolFamily, orbit: &Orbit) -> Result<f64> {
    orbit.try_integrate(|x, xi| Ok(xi * sym.gradient0(x, xi)?.2))
}

/// Focal points, well data and the Poincare-section crossing time for one
/// energy; reused for every sample count.
struct OrbitSeed {
    energy: f64,
    right: FocalPoint,
    left: FocalPoint,
    well: Well,
    start: [f64; 2],
    period_guess: f64,
}

impl OrbitSeed {
    fn new(sym: &SymbolFamily, energy: f64) -> Result<OrbitSeed> {
        let well = locate_well(sym)?;
        let (right, left) = focal_points_in(sym, &well, energy)?;
        let delta = 1e-3 * (right.x - left.x);
        let xs = right.x - delta;
        let xi0 = branch_xi(sym, energy, xs, Branch::Plus, (&right, &left))?;
        let start = [xs, xi0];
        let budget = 10.0 * period_estimate(sym, energy, &right, &left)?;

        let rhs = hamilton_rhs(sym);
        let mut seen_down = false;
        let h_max = budget / 4000.0;
        let path = adaptive_until(&rhs, 0.0, start, 0.1 * h_max, h_max, 1e-11, budget, |_, a, b| {
            if a[0] >= xs && b[0] < xs {
                seen_down = true;
                false
            } else {
                seen_down && a[0] < xs && b[0] >= xs
            }
        })
        .map_err(|_| SemiquantError::OrbitNotClosed {
            energy,
            detail: format!("no return to the section within time budget {budget:.3e}"),
        })?;
        let n = path.len();
        let (t_a, y_a) = path[n - 2];
        let (t_b, _) = path[n - 1];
        let tau = brent(
            |s| gbs_step(&rhs, t_a, &y_a, s, DEFAULT_LEVELS).0[0] - xs,
            0.0,
            t_b - t_a,
            1e-15,
        )
        .unwrap_or(t_b - t_a);
        Ok(OrbitSeed {
            energy,
            right,
            left,
            well,
            start,
            period_guess: t_a + tau,
        })
    }

    fn integrate(&self, sym: &SymbolFamily, steps: usize) -> Result<Orbit> {
        let rhs = hamilton_rhs(sym);
        let xs = self.start[0];
        let mut period = self.period_guess;
        let mut path = Vec::new();
        let mut converged = false;
        for iter in 0..12 {
            path = uniform_path(&rhs, 0.0, self.start, period, steps, DEFAULT_LEVELS);
            let end = path[steps];
            let g = end[0] - xs;
            let slope = rhs(0.0, &end)[0];
            if slope == 0.0 {
                break;
            }
            let dt = g / slope;
            period -= dt;
            if dt.abs() <= 1e-14 * period || (iter >= 3 && g.abs() < 1e-13) {
                converged = true;
                path = uniform_path(&rhs, 0.0, self.start, period, steps, DEFAULT_LEVELS);
                break;
            }
        }
        if !converged {
            return Err(SemiquantError::OrbitNotClosed {
                energy: self.energy,
                detail: "Newton refinement of the period stalled".into(),
            });
        }
        let end = path[steps];
        let closure = (end[0] - self.start[0]).abs().max((end[1] - self.start[1]).abs());
        if closure > TOL_ORBIT {
            return Err(SemiquantError::OrbitNotClosed {
                energy: self.energy,
                detail: format!("closure error {closure:e}"),
            });
        }
        path.truncate(steps);
        let mut drift = 0.0f64;
        for p in &path {
            drift = drift.max((sym.eval(p[0], p[1], 0)? - self.energy).abs());
        }
        if drift > TOL_ORBIT {
            return Err(SemiquantError::EnergyDrift {
                energy: self.energy,
                drift,
            });
        }
        let mut orbit = Orbit {
            energy: self.energy,
            focal_right: self.right,
            focal_left: self.left,
            points: path,
            period,
            orientation: Orientation::Anticlockwise,
            well: self.well,
        };
        if orbit.signed_area(sym)? < 0.0 {
            orbit.orientation = Orientation::Clockwise;
        }
        Ok(orbit)
    }
}

fn hamilton_rhs(sym: &SymbolFamily) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    move |_t, y| match sym.gradient0(y[0], y[1]) {
        Ok((_, px, pxi)) => [pxi, -px],
        Err(_) => [f64::NAN, f64::NAN],
    }
}
