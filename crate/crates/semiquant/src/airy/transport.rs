//! Power-series solution of the transport hierarchy for
//! `r(x~, eta) = x0 + x1/eta + ... + x4/eta^4`, the change of variable
//! that maps `u'' = eta^2 Q u` to Airy's equation. `r` solves
//!
//! `(r')^2 r - (1/2) eta^-2 {r, x~} = Q0 + Q1/eta + ... + Q4/eta^4`
//!
//! with `{r, x~}` the Schwarzian derivative. Order `eta^-k` of this
//! equation reads `x0' (x0' x_k + 2 x0 x_k') = -Res_k`, where `Res_k` is
//! the order-k residual with `x_k` set to zero. Its unique power-series
//! solution fixes the integration constant at the turning point.
//! Coefficients are carried in double-double precision.

use crate::error::{Result, SemiquantError};
use crate::expr::Expr;
use crate::number::{Dd, Number};
use crate::numerics::cheb::ChebGrid;
use crate::taylor::Taylor;
use serde::Serialize;

/// Storage length of the x~-series.
pub const SERIES_LENGTH: usize = 160;
/// Coefficients at and above this degree are dropped.
pub const KEPT_DEGREE: usize = 136;
/// Highest order in `1/eta`.
pub const ORDERS: usize = 5;
/// Default half width of the transport interval.
pub const DEFAULT_HALF_WIDTH: f64 = 0.8;
/// Default Chebyshev sample count on the transport interval.
pub const DEFAULT_SAMPLES: usize = 129;

pub type Series = Taylor<Dd, SERIES_LENGTH>;
type EtaSeries = Taylor<Series, ORDERS>;

/// `Q(x~, eta) = sum_j Q_j(x~) eta^-j` with `Q0(0) = 0`, `Q0'(0) = 1`.
#[derive(Clone, Debug)]
pub struct PotentialSeries {
    terms: [Expr; ORDERS],
}

fn series_of(e: &Expr) -> Series {
    e.eval(Series::variable(Dd::from(0.0)))
}

impl PotentialSeries {
    pub fn new(q0: Expr) -> Result<Self> {
        let c = series_of(&q0);
        let (c0, c1) = (c.c[0].to_f64(), c.c[1].to_f64());
        if c0.abs() > 1e-14 || (c1 - 1.0).abs() > 1e-14 {
            return Err(SemiquantError::InvalidArgument(format!(
                "Q0 must satisfy Q0(0) = 0 and Q0'(0) = 1 (got {c0:e}, {c1})"
            )));
        }
        let zero = Expr::constant(0.0);
        Ok(PotentialSeries {
            terms: [q0, zero.clone(), zero.clone(), zero.clone(), zero],
        })
    }

    /// Sets `Q_j` for `1 <= j <= 4`.
    pub fn with_term(mut self, j: usize, q: Expr) -> Result<Self> {
        if !(1..ORDERS).contains(&j) {
            return Err(SemiquantError::InvalidArgument(format!("potential order {j} must lie in 1..=4")));
        }
        self.terms[j] = q;
        Ok(self)
    }

    pub fn term(&self, j: usize) -> &Expr {
        &self.terms[j]
    }

    pub fn is_zero(&self, j: usize) -> bool {
        self.terms[j].is_zero()
    }

    /// Taylor coefficient `v_n` of `Q0` at the turning point.
    pub fn v(&self, n: usize) -> f64 {
        series_of(&self.terms[0]).c[n].to_f64()
    }

    /// `Q(x~, eta)` summed over all orders.
    pub fn total<T: Number>(&self, x: T, eta: T) -> T {
        let mut acc = T::zero();
        let mut w = T::one();
        for q in &self.terms {
            acc = acc + q.eval(x) * w;
            w = w / eta;
        }
        acc
    }

    /// Fails if `Q0` vanishes away from the origin on `[-x_max, x_max]`.
    pub fn check_simple_zero(&self, x_max: f64) -> Result<()> {
        let n = 2000;
        for k in 0..=n {
            let x = -x_max + 2.0 * x_max * k as f64 / n as f64;
            if x.abs() < 1e-3 * x_max {
                continue;
            }
            let q = self.terms[0].eval(x);
            if !(q * x > 0.0) {
                return Err(SemiquantError::InvalidArgument(format!(
                    "Q0 changes sign or vanishes at x~ = {x} besides the origin"
                )));
            }
        }
        Ok(())
    }
}

/// Relative size of the last kept terms accepted for `f64` results.
const F64_TAIL: f64 = 1e-18;
/// Same for double-double results.
const DD_TAIL: f64 = 1e-30;

/// Sum of the series at `x`, rejecting points where the last kept terms
/// are not negligible.
fn summed(s: &Series, x: f64, tol: f64) -> Result<Dd> {
    let size = |n: usize| s.c[n].magnitude() * x.abs().powi(n as i32);
    let head = (0..KEPT_DEGREE).map(size).fold(0.0, f64::max);
    let tail = (KEPT_DEGREE - 8..KEPT_DEGREE).map(size).fold(0.0, f64::max);
    if tail > tol * head {
        return Err(SemiquantError::no_convergence(format!(
            "transport series at x~ = {x} (outside its disc of convergence)"
        )));
    }
    Ok(s.eval(Dd::from(x)))
}

fn truncate(s: &mut Series) {
    for c in s.c.iter_mut().skip(KEPT_DEGREE) {
        *c = Dd::from(0.0);
    }
}

/// `x0 = ((3/2) int_0^x~ sqrt(Q0))^(2/3)`, continued as an odd-type real
/// function through the turning point.
fn eikonal(q0: &Series) -> Series {
    let s = q0.shift_down().pow_rational(1, 2);
    let mut sigma = s;
    for (n, c) in sigma.c.iter_mut().enumerate() {
        *c = *c * Dd::from(3.0) / Dd::from(2.0 * n as f64 + 3.0);
    }
    let mut x0 = sigma.pow_rational(2, 3).shift_up();
    truncate(&mut x0);
    x0
}

/// Power-series solution of `x0' (x0' y + 2 x0 y') = rhs`.
fn solve_transport(x0: &Series, rhs: &Series) -> Series {
    let m = *rhs / x0.diff();
    let a = &x0.c;
    let mut y = Series::from_f64(0.0);
    for n in 0..(SERIES_LENGTH - 1) {
        let mut acc = m.c[n];
        for j in 0..n {
            acc = acc - a[n + 1 - j] * y.c[j] * Dd::from((n + 1 + j) as f64);
        }
        y.c[n] = acc / (a[1] * Dd::from((2 * n + 1) as f64));
    }
    truncate(&mut y);
    y
}

fn eta_series(parts: [Series; ORDERS]) -> EtaSeries {
    Taylor::from_coeffs(parts)
}

/// Master equation with `eps = 1/eta` as a series in `eps`.
fn master_series(xs: &[Series; ORDERS], q: &[Series; ORDERS]) -> EtaSeries {
    let r = eta_series(*xs);
    let r1 = eta_series(xs.map(|s| s.diff()));
    let r2 = eta_series(xs.map(|s| s.diff().diff()));
    let r3 = eta_series(xs.map(|s| s.diff().diff().diff()));
    let eps = EtaSeries::variable(Series::from_f64(0.0));
    let ratio = r2 / r1;
    let schwarzian = r3 / r1 - ratio * ratio * EtaSeries::from_f64(1.5);
    r1 * r1 * r - eps * eps * schwarzian * EtaSeries::from_f64(0.5) - eta_series(*q)
}

/// Coefficient series of `x0 ... x4`.
#[derive(Clone, Debug)]
pub struct TransportCoefficients {
    pub x: [Series; ORDERS],
    pub half_width: f64,
}

impl TransportCoefficients {
    pub fn build(ps: &PotentialSeries) -> Result<Self> {
        Self::build_on(ps, DEFAULT_HALF_WIDTH)
    }

    pub fn build_on(ps: &PotentialSeries, half_width: f64) -> Result<Self> {
        ps.check_simple_zero(half_width)?;
        let q = [0, 1, 2, 3, 4].map(|j| {
            let mut s = series_of(&ps.terms[j]);
            truncate(&mut s);
            s
        });
        let mut xs = [Series::from_f64(0.0); ORDERS];
        xs[0] = eikonal(&q[0]);
        for k in 1..ORDERS {
            let res = master_series(&xs, &q).c[k];
            xs[k] = solve_transport(&xs[0], &(-res));
        }
        Ok(TransportCoefficients { x: xs, half_width })
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if x.abs() > self.half_width * (1.0 + 1e-12) {
            return Err(SemiquantError::InvalidArgument(format!(
                "x~ = {x} lies outside the transport interval [-{0}, {0}]",
                self.half_width
            )));
        }
        Ok(())
    }

    /// `d^k x_j / dx~^k` at `x~`.
    pub fn derivative(&self, j: usize, k: usize, x: f64) -> Result<f64> {
        self.check_point(x)?;
        let mut s = self.x[j];
        for _ in 0..k {
            s = s.diff();
        }
        Ok(summed(&s, x, F64_TAIL)?.to_f64())
    }

    pub fn value(&self, j: usize, x: f64) -> Result<f64> {
        self.derivative(j, 0, x)
    }

    /// `(r, dr/dx~)` at `x~` for `eta = 1/h`.
    pub fn r_tilde(&self, x: f64, h: f64) -> Result<(f64, f64)> {
        let (mut r, mut dr) = (0.0, 0.0);
        for j in (0..ORDERS).rev() {
            r = r * h + self.value(j, x)?;
            dr = dr * h + self.derivative(j, 1, x)?;
        }
        Ok((r, dr))
    }

    /// `x0 (x0')^2 - Q0` at `x~`.
    pub fn eikonal_residual(&self, ps: &PotentialSeries, x: f64) -> Result<f64> {
        let x0 = self.value(0, x)?;
        let d = self.derivative(0, 1, x)?;
        Ok(x0 * d * d - ps.terms[0].eval(x))
    }

    /// `|(r')^2 r - (1/2) eta^-2 {r, x~} - Q(x~, eta)|` for the truncated
    /// `r`, in double-double arithmetic.
    pub fn master_residual(&self, ps: &PotentialSeries, x: f64, eta: f64) -> Result<f64> {
        self.check_point(x)?;
        let e = Dd::from(1.0) / Dd::from(eta);
        let mut r = Series::from_f64(0.0);
        let mut w = Dd::from(1.0);
        for j in 0..ORDERS {
            let mut part = self.x[j];
            part.c.iter_mut().for_each(|c| *c = *c * w);
            r = r + part;
            w = w * e;
        }
        let xd = Dd::from(x);
        let r0 = summed(&r, x, DD_TAIL)?;
        let r1 = summed(&r.diff(), x, DD_TAIL)?;
        let r2 = summed(&r.diff().diff(), x, DD_TAIL)?;
        let r3 = summed(&r.diff().diff().diff(), x, DD_TAIL)?;
        let ratio = r2 / r1;
        let schwarzian = r3 / r1 - ratio * ratio * Dd::from(1.5);
        let lhs = r1 * r1 * r0 - e * e * schwarzian * Dd::from(0.5);
        Ok((lhs - ps.total(xd, Dd::from(eta))).to_f64().abs())
    }

    /// Values `x0 ... x4` on a Chebyshev grid of the transport interval.
    pub fn samples(&self, points: usize) -> Result<Vec<TransportSample>> {
        ChebGrid::new(-self.half_width, self.half_width, points)
            .points
            .iter()
            .map(|&x| {
                let mut values = [0.0; ORDERS];
                for (j, v) in values.iter_mut().enumerate() {
                    *v = self.value(j, x)?;
                }
                Ok(TransportSample { x, values })
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransportSample {
    pub x: f64,
    pub values: [f64; ORDERS],
}

fn build(ps: &PotentialSeries) -> Result<TransportCoefficients> {
    TransportCoefficients::build(ps)
}

pub fn x0(ps: &PotentialSeries, x: f64) -> Result<f64> {
    build(ps)?.value(0, x)
}

pub fn x1(ps: &PotentialSeries, x: f64) -> Result<f64> {
    build(ps)?.value(1, x)
}

pub fn x2(ps: &PotentialSeries, x: f64) -> Result<f64> {
    build(ps)?.value(2, x)
}

pub fn x3(ps: &PotentialSeries, x: f64) -> Result<f64> {
    build(ps)?.value(3, x)
}

pub fn x4(ps: &PotentialSeries, x: f64) -> Result<f64> {
    build(ps)?.value(4, x)
}
