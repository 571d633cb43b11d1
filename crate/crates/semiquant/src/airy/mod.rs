//! Uniform Airy normal form at a simple turning point of
//! `u'' = eta^2 Q(x~, eta) u`: transport coefficients `x0 ... x4`, the
//! transformed solution `(r')^-1/2 Ai(eta^(2/3) r)` and numerical checks
//! of the normal form.

pub mod ansatz;
pub mod special;
pub mod transport;

pub use ansatz::{ansatz_check, ansatz_fit, AnsatzFit, AnsatzOptions, AnsatzReport};
pub use special::{airy_ai, airy_ai_pair, airy_ai_prime, oscillatory_asymptotics};
pub use transport::{x0, x1, x2, x3, x4, PotentialSeries, TransportCoefficients, TransportSample};

use crate::error::{Result, SemiquantError};
use crate::numerics::fit::loglog_slope;
use serde::Serialize;

/// `eta` values of the default master-residual scan.
pub const DEFAULT_ETAS: [f64; 3] = [1e2, 1e3, 1e4];
/// `h` values of the default ansatz check.
pub const DEFAULT_ANSATZ_H: [f64; 3] = [0.1, 0.05, 0.025];
/// Sample points of the master residual on the transport interval.
pub const RESIDUAL_POINTS: usize = 9;

/// `(r')^-1/2 Ai(h^(-2/3) r)` at `x~`.
pub fn transformed_solution(tc: &TransportCoefficients, x: f64, h: f64) -> Result<f64> {
    let (r, dr) = tc.r_tilde(x, h)?;
    if !(dr > 0.0) {
        return Err(SemiquantError::no_convergence(format!(
            "monotone normal-form variable at x~ = {x}"
        )));
    }
    Ok(dr.powf(-0.5) * airy_ai(r * h.powf(-2.0 / 3.0)))
}

/// Value of `x2` at the turning point against the closed form in the
/// Taylor coefficients `v2`, `v3` of `Q0`, valid when `Q1 = Q2 = 0`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TaylorCheck {
    pub v2: f64,
    pub v3: f64,
    pub x2_at_zero: f64,
    pub closed_form: Option<f64>,
    pub x1_max: f64,
    pub x3_max: f64,
}

impl TaylorCheck {
    pub fn error(&self) -> Option<f64> {
        self.closed_form.map(|c| (self.x2_at_zero - c).abs())
    }
}

pub fn taylor_check(ps: &PotentialSeries, tc: &TransportCoefficients) -> Result<TaylorCheck> {
    let (v2, v3) = (ps.v(2), ps.v(3));
    let closed_form = (ps.is_zero(1) && ps.is_zero(2)).then(|| 3.0 / 7.0 * v3 - 9.0 / 35.0 * v2 * v2);
    let mut x1_max: f64 = 0.0;
    let mut x3_max: f64 = 0.0;
    for s in tc.samples(transport::DEFAULT_SAMPLES)? {
        x1_max = x1_max.max(s.values[1].abs());
        x3_max = x3_max.max(s.values[3].abs());
    }
    Ok(TaylorCheck {
        v2,
        v3,
        x2_at_zero: tc.value(2, 0.0)?,
        closed_form,
        x1_max,
        x3_max,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MasterResidual {
    pub etas: Vec<f64>,
    /// Largest residual over the sample points, per `eta`.
    pub residuals: Vec<f64>,
    /// Least-squares slope of `log residual` against `log eta`.
    pub slope: Option<f64>,
}

pub fn master_residual_scan(
    ps: &PotentialSeries,
    tc: &TransportCoefficients,
    etas: &[f64],
) -> Result<MasterResidual> {
    let w = tc.half_width;
    let residuals = etas
        .iter()
        .map(|&eta| {
            (0..RESIDUAL_POINTS)
                .map(|k| -w + 2.0 * w * k as f64 / (RESIDUAL_POINTS - 1) as f64)
                .try_fold(0.0f64, |m, x| Ok(m.max(tc.master_residual(ps, x, eta)?)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(MasterResidual {
        etas: etas.to_vec(),
        slope: loglog_slope(etas, &residuals),
        residuals,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AiryReport {
    pub taylor: TaylorCheck,
    pub master: MasterResidual,
    pub ansatz: AnsatzReport,
}

pub fn airy_check(
    ps: &PotentialSeries,
    half_width: f64,
    etas: &[f64],
    hs: &[f64],
    options: AnsatzOptions,
) -> Result<AiryReport> {
    let tc = TransportCoefficients::build_on(ps, half_width)?;
    Ok(AiryReport {
        taylor: taylor_check(ps, &tc)?,
        master: master_residual_scan(ps, &tc, etas)?,
        ansatz: ansatz_check(ps, &tc, hs, options)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    #[test]
    fn linear_potential_gives_plain_airy() {
        let ps = PotentialSeries::new(Expr::var()).unwrap();
        let tc = TransportCoefficients::build(&ps).unwrap();
        let h = 0.1;
        for &x in &[-0.5, 0.0, 0.3] {
            let v = transformed_solution(&tc, x, h).unwrap();
            assert!((v - airy_ai(x / h.powf(2.0 / 3.0))).abs() < 1e-15);
        }
    }
}
