//! Gragg-Bulirsch-Stoer stepping for smooth ODE systems.
//!
//! A fixed extrapolation table (modified midpoint with n = 2, 4, ..., 2k
//! substeps, polynomial extrapolation in the squared substep) gives order
//! 2k per step, which lets the orbit integrator take uniform steps and
//! still reach round-off-level closure.

use crate::error::{Result, SemiquantError};

pub const DEFAULT_LEVELS: usize = 6;

fn axpy<const D: usize>(y: &[f64; D], a: f64, x: &[f64; D]) -> [f64; D] {
    let mut out = *y;
    for i in 0..D {
        out[i] += a * x[i];
    }
    out
}

fn modified_midpoint<const D: usize>(
    f: &impl Fn(f64, &[f64; D]) -> [f64; D],
    t: f64,
    y: &[f64; D],
    big_h: f64,
    n: usize,
) -> [f64; D] {
    let hs = big_h / n as f64;
    let mut z0 = *y;
    let mut z1 = axpy(y, hs, &f(t, y));
    for m in 1..n {
        let z2 = axpy(&z0, 2.0 * hs, &f(t + m as f64 * hs, &z1));
        z0 = z1;
        z1 = z2;
    }
    let fe = f(t + big_h, &z1);
    let mut out = [0.0; D];
    for i in 0..D {
        out[i] = 0.5 * (z1[i] + z0[i] + hs * fe[i]);
    }
    out
}

/// One extrapolated step of size `big_h`; returns the new state and the
/// max-norm difference between the last two extrapolation columns.
pub fn gbs_step<const D: usize>(
    f: &impl Fn(f64, &[f64; D]) -> [f64; D],
    t: f64,
    y: &[f64; D],
    big_h: f64,
    levels: usize,
) -> ([f64; D], f64) {
    let seq: Vec<usize> = (1..=levels).map(|k| 2 * k).collect();
    let mut prev: Vec<[f64; D]> = Vec::new();
    let mut err = f64::INFINITY;
    for (k, &nk) in seq.iter().enumerate() {
        let mut row = Vec::with_capacity(k + 1);
        row.push(modified_midpoint(f, t, y, big_h, nk));
        for j in 1..=k {
            let ratio = (nk as f64 / seq[k - j] as f64).powi(2) - 1.0;
            let mut next = row[j - 1];
            for i in 0..D {
                next[i] += (row[j - 1][i] - prev[j - 1][i]) / ratio;
            }
            row.push(next);
        }
        if k > 0 {
            err = (0..D)
                .map(|i| (row[k][i] - row[k - 1][i]).abs())
                .fold(0.0, f64::max);
        }
        prev = row;
    }
    (prev[levels - 1], err)
}

/// `steps` uniform extrapolated steps from `t0` to `t1`; returns every
/// intermediate state including both ends.
pub fn uniform_path<const D: usize>(
    f: &impl Fn(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t1: f64,
    steps: usize,
    levels: usize,
) -> Vec<[f64; D]> {
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push(y);
    for k in 0..steps {
        y = gbs_step(f, t0 + k as f64 * h, &y, h, levels).0;
        out.push(y);
    }
    out
}

/// Error-controlled march that stops at the first accepted step for which
/// `stop(t, y_old, y_new)` returns true. Returns the trajectory of accepted
/// points.
pub fn adaptive_until<const D: usize>(
    f: &impl Fn(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    h0: f64,
    h_max: f64,
    tol: f64,
    t_max: f64,
    mut stop: impl FnMut(f64, &[f64; D], &[f64; D]) -> bool,
) -> Result<Vec<(f64, [f64; D])>> {
    let levels = DEFAULT_LEVELS;
    let mut t = t0;
    let mut y = y0;
    let mut h = h0.min(h_max);
    let mut path = vec![(t, y)];
    let mut rejects = 0usize;
    while t < t_max {
        let (y_new, err) = gbs_step(f, t, &y, h, levels);
        let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ratio = err / (tol * scale);
        if !ratio.is_finite() || ratio > 1.0 {
            h *= 0.5;
            rejects += 1;
            if rejects > 60 {
                return Err(SemiquantError::no_convergence("adaptive extrapolation step"));
            }
            continue;
        }
        rejects = 0;
        let t_new = t + h;
        path.push((t_new, y_new));
        if stop(t_new, &y, &y_new) {
            return Ok(path);
        }
        t = t_new;
        y = y_new;
        let grow = 0.9 * ratio.max(1e-12).powf(-1.0 / (2 * levels - 1) as f64);
        h = (h * grow.clamp(0.2, 2.0)).min(h_max);
    }
    Err(SemiquantError::no_convergence("trajectory event within time budget"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_integrated_to_round_off() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let path = uniform_path(&f, 0.0, [1.0, 0.0], std::f64::consts::TAU, 64, DEFAULT_LEVELS);
        let end = path.last().unwrap();
        assert!((end[0] - 1.0).abs() < 1e-13 && end[1].abs() < 1e-13);
    }

    #[test]
    fn non_autonomous_linear_growth() {
        let f = |t: f64, _y: &[f64; 1]| [3.0 * t * t];
        let (y, _) = gbs_step(&f, 1.0, &[1.0], 0.5, 4);
        assert!((y[0] - 1.5f64.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_march_stops_at_event() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let path = adaptive_until(&f, 0.0, [1.0, 0.0], 0.1, 0.5, 1e-12, 10.0, |_, a, b| {
            a[0] > 0.0 && b[0] <= 0.0
        })
        .unwrap();
        let (t, _) = path.last().unwrap();
        assert!(*t > std::f64::consts::FRAC_PI_2 && *t < 2.0);
    }
}
