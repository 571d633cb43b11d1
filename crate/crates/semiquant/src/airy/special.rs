//! The Airy function `Ai` on the real line and its large-argument
//! oscillatory expansion.

use crate::number::{Dd, Number};
use std::f64::consts::{FRAC_PI_4, PI};

/// `|z|` up to which the Maclaurin series is summed in double-double.
pub const SERIES_LIMIT: f64 = 8.0;

/// `Ai(0) = 3^(-2/3) / Gamma(2/3)`.
pub const AI0: Dd = Dd::new(0.3550280538878172, 2.05233632436212e-17);
/// `-Ai'(0) = 3^(-1/3) / Gamma(1/3)`.
pub const MINUS_AI0_PRIME: Dd = Dd::new(0.2588194037928068, -2.522243111610832e-17);

/// Coefficients of the oscillatory expansion in `h` and `|z|`:
/// `R1 = 1 - a2 h^2 |z|^-3 + a4 h^4 |z|^-6`,
/// `R2 = a1 h |z|^-3/2 - a3 h^3 |z|^-9/2`.
pub const R_COEFFS: [(u64, u64); 4] = [
    (5, 48),
    (385, 4608),
    (765765, 5971968),
    (111546435, 382205952),
];

fn ratio(k: usize) -> f64 {
    R_COEFFS[k].0 as f64 / R_COEFFS[k].1 as f64
}

/// `(Ai(z), Ai'(z))`.
pub fn airy_ai_pair(z: f64) -> (f64, f64) {
    if z.abs() <= SERIES_LIMIT {
        maclaurin(z)
    } else if z > 0.0 {
        decaying(z)
    } else {
        oscillating(-z)
    }
}

pub fn airy_ai(z: f64) -> f64 {
    airy_ai_pair(z).0
}

pub fn airy_ai_prime(z: f64) -> f64 {
    airy_ai_pair(z).1
}

fn maclaurin(z: f64) -> (f64, f64) {
    let zd = Dd::from(z);
    let z3 = zd * zd * zd;
    // f = sum a_k, g = z sum b_k with a_k, b_k ~ z^(3k)
    let (mut a, mut b) = (Dd::from(1.0), Dd::from(1.0));
    let (mut f, mut g) = (a, b);
    // derivative sums: f' = sum 3k a_k / z, g' = sum (3k+1) b_k
    let (mut fp, mut gp) = (Dd::from(0.0), Dd::from(1.0));
    for k in 1..400 {
        let kf = k as f64;
        a = a * z3 / Dd::from((3.0 * kf - 1.0) * (3.0 * kf));
        b = b * z3 / Dd::from((3.0 * kf) * (3.0 * kf + 1.0));
        f = f + a;
        g = g + b;
        fp = fp + a * Dd::from(3.0 * kf);
        gp = gp + b * Dd::from(3.0 * kf + 1.0);
        if a.magnitude() < 1e-34 * f.magnitude().max(1.0) && b.magnitude() < 1e-34 * g.magnitude().max(1.0) {
            break;
        }
    }
    let g = g * zd;
    // fp holds z f'(z)
    let fp = if z == 0.0 { Dd::from(0.0) } else { fp / zd };
    let ai = AI0 * f - MINUS_AI0_PRIME * g;
    let aip = AI0 * fp - MINUS_AI0_PRIME * gp;
    (ai.to_f64(), aip.to_f64())
}

/// `u_k` of the Airy expansion together with `v_k = -(6k+1)/(6k-1) u_k`.
fn expansion_terms(zeta: f64) -> Vec<(f64, f64)> {
    let mut out = vec![(1.0, 1.0)];
    let mut u = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let term = u / zeta.powi(k);
        if term.abs() > prev || term.abs() < 1e-18 {
            break;
        }
        prev = term.abs();
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        out.push((u / zeta.powi(k), v / zeta.powi(k)));
    }
    out
}

fn decaying(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let terms = expansion_terms(zeta);
    let (mut su, mut sv) = (0.0, 0.0);
    for (k, (u, v)) in terms.iter().enumerate() {
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        su += s * u;
        sv += s * v;
    }
    let pre = (-zeta).exp() / (2.0 * PI.sqrt());
    (pre * z.powf(-0.25) * su, -pre * z.powf(0.25) * sv)
}

fn oscillating(t: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * t.powf(1.5);
    let terms = expansion_terms(zeta);
    let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
    for (k, (u, v)) in terms.iter().enumerate() {
        let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            ue += s * u;
            ve += s * v;
        } else {
            uo += s * u;
            vo += s * v;
        }
    }
    let (sn, cs) = (zeta + FRAC_PI_4).sin_cos();
    let pre = 1.0 / PI.sqrt();
    let ai = pre * t.powf(-0.25) * (sn * ue - cs * uo);
    let aip = -pre * t.powf(0.25) * (cs * ve + sn * vo);
    (ai, aip)
}

/// `(R1, R2, phase)` of the oscillatory form
/// `Ai(-|z|/h^(2/3)) ~ pi^-1/2 (|z|/h^(2/3))^-1/4 (sin(phase) R1 - cos(phase) R2)`.
pub fn oscillatory_asymptotics(z: f64, h: f64) -> (f64, f64, f64) {
    let t = z.abs();
    let r1 = 1.0 - ratio(1) * h.powi(2) * t.powi(-3) + ratio(3) * h.powi(4) * t.powi(-6);
    let r2 = ratio(0) * h * t.powf(-1.5) - ratio(2) * h.powi(3) * t.powf(-4.5);
    let phase = 2.0 / (3.0 * h) * t.powf(1.5) + FRAC_PI_4;
    (r1, r2, phase)
}
