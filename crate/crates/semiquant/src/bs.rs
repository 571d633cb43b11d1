//! Roots of the Bohr-Sommerfeld condition `S_h(E) = 2 pi n h` and of the
//! Gram determinant `det G(E) = -cos^2((A_- - A_+) / 2h)`.
//!
//! The integer `n` is reported unshifted: for the harmonic oscillator the
//! condition `pi E + pi h = 2 pi n h` gives `E = (2n - 1) h`, so the ground
//! state carries `n = 1`.

use crate::action::ActionEvaluator;
use crate::error::{Result, SemiquantError};
use crate::numerics::roots::brent;
use crate::symbol::SymbolFamily;
use crate::wkb;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Acceptable `|S_h(E_n) - 2 pi n h|` at a reported root.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Distance in phase within which an endpoint is taken as a root.
pub const ENDPOINT_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Level {
    pub n: i64,
    pub energy: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantizationResult {
    pub h: f64,
    pub interval: (f64, f64),
    pub entries: Vec<Level>,
}

impl QuantizationResult {
    pub fn energies(&self) -> Vec<f64> {
        self.entries.iter().map(|l| l.energy).collect()
    }
}

fn check_interval(h: f64, lo: f64, hi: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(SemiquantError::InvalidArgument(format!("h = {h} must be positive")));
    }
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(SemiquantError::InvalidArgument(format!(
            "interval [{lo}, {hi}] is empty"
        )));
    }
    Ok(())
}

/// Solves `F(E) = 2 pi n h` for every integer `n` whose target lies in
/// `[F(lo), F(hi)]`, for an increasing scalar function `F`.
fn solve_levels(
    f: &(dyn Fn(f64) -> Result<f64> + Sync),
    h: f64,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> Result<Vec<Level>> {
    let quantum = 2.0 * PI * h;
    if lo == hi {
        let v = f(lo)?;
        let n = (v / quantum).round();
        let residual = v - n * quantum;
        return Ok(if residual.abs() < RESIDUAL_TOL {
            vec![Level {
                n: n as i64,
                energy: lo,
                residual,
            }]
        } else {
            Vec::new()
        });
    }
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    // roots that sit on an endpoint up to rounding still count
    let n_first = ((f_lo - ENDPOINT_TOL) / quantum).ceil() as i64;
    let n_last = ((f_hi + ENDPOINT_TOL) / quantum).floor() as i64;
    let expected = (n_last - n_first + 1).max(0) as usize;
    let intervals = (expected + 1).clamp(8, 400);
    let grid: Vec<f64> = (0..=intervals)
        .map(|k| lo + (hi - lo) * k as f64 / intervals as f64)
        .collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&e| if e == lo { Ok(f_lo) } else if e == hi { Ok(f_hi) } else { f(e) })
        .collect::<Result<_>>()?;
    for k in 0..intervals {
        if values[k + 1] <= values[k] {
            return Err(SemiquantError::NonMonotone {
                lo: grid[k],
                hi: grid[k + 1],
            });
        }
    }
    let targets: Vec<i64> = (n_first..=n_last).collect();
    let mut levels: Vec<Level> = targets
        .par_iter()
        .map(|&n| {
            let target = n as f64 * quantum;
            let k = values.partition_point(|v| *v < target).clamp(1, intervals) - 1;
            let (a, b) = (grid[k], grid[k + 1]);
            let energy = if (values[k] - target).abs() <= ENDPOINT_TOL {
                a
            } else if (values[k + 1] - target).abs() <= ENDPOINT_TOL {
                b
            } else {
                brent(
                    |e| f(e).map(|v| v - target).unwrap_or(f64::NAN),
                    a,
                    b,
                    xtol,
                )?
            };
            let residual = f(energy)? - target;
            if residual.abs() > RESIDUAL_TOL {
                return Err(SemiquantError::no_convergence(format!(
                    "quantization root n={n} (residual {residual:e})"
                )));
            }
            Ok(Level {
                n,
                energy,
                residual,
            })
        })
        .collect::<Result<_>>()?;
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(levels)
}

/// Bohr-Sommerfeld roots of `S0 + h S1 + h^2 S2 = 2 pi n h` on `[lo, hi]`.
pub fn quantize(sym: &SymbolFamily, h: f64, interval: (f64, f64)) -> Result<QuantizationResult> {
    let eval = ActionEvaluator::new(sym);
    quantize_with(&eval, h, interval)
}

/// [`quantize`] reusing an existing evaluator cache.
pub fn quantize_with(
    eval: &ActionEvaluator<'_>,
    h: f64,
    interval: (f64, f64),
) -> Result<QuantizationResult> {
    let (lo, hi) = interval;
    check_interval(h, lo, hi)?;
    let f = |e: f64| eval.total(e, h);
    let entries = solve_levels(&f, h, lo, hi, 1e-14)?;
    Ok(QuantizationResult {
        h,
        interval,
        entries,
    })
}

/// Zeros of the Gram determinant: solutions of
/// `A_- - A_+ = pi h + 2 pi m h`, reported with `n = m + 1` to match the
/// indexing of [`quantize`].
pub fn gram_zero_scan(sym: &SymbolFamily, h: f64, interval: (f64, f64)) -> Result<QuantizationResult> {
    let (lo, hi) = interval;
    check_interval(h, lo, hi)?;
    let shifted = |e: f64| wkb::gram_phase(sym, e, h).map(|d| d + PI * h);
    let entries = solve_levels(&shifted, h, lo, hi, 1e-14)?;
    Ok(QuantizationResult {
        h,
        interval,
        entries,
    })
}

/// `det G(E) = -cos^2((A_- - A_+) / 2h)`.
pub fn gram_determinant(sym: &SymbolFamily, energy: f64, h: f64) -> Result<f64> {
    let phase = wkb::gram_phase(sym, energy, h)?;
    Ok(-(phase / (2.0 * h)).cos().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_levels_are_odd_multiples_of_h() {
        let s = SymbolFamily::harmonic();
        let r = quantize(&s, 0.1, (0.05, 2.5)).unwrap();
        assert_eq!(r.entries.len(), 13);
        for (k, l) in r.entries.iter().enumerate() {
            assert_eq!(l.n, k as i64 + 1);
            assert!((l.energy - (2 * l.n - 1) as f64 * 0.1).abs() < 1e-10);
            assert!(l.residual.abs() < RESIDUAL_TOL);
        }
    }

    #[test]
    fn gram_scan_keeps_roots_on_the_endpoints() {
        let s = SymbolFamily::harmonic();
        let r = gram_zero_scan(&s, 0.1, (0.1, 2.5)).unwrap();
        assert_eq!(r.entries.len(), 13);
        assert!((r.entries[12].energy - 2.5).abs() < 1e-10);
    }

    #[test]
    fn degenerate_interval() {
        let s = SymbolFamily::harmonic();
        let hit = quantize(&s, 0.1, (0.3, 0.3)).unwrap();
        assert_eq!(hit.entries.len(), 1);
        let miss = quantize(&s, 0.1, (0.35, 0.35)).unwrap();
        assert!(miss.entries.is_empty());
    }

    #[test]
    fn generic_solver_counts_levels() {
        let f = |e: f64| Ok(e * e + 0.3 * e);
        let levels = solve_levels(&f, 0.05, 0.1, 2.0, 1e-15).unwrap();
        let q = 2.0 * PI * 0.05;
        let expected = ((4.6 / q).floor() - (0.04 / q).ceil() + 1.0) as usize;
        assert_eq!(levels.len(), expected);
        assert!(levels.windows(2).all(|w| w[0].energy < w[1].energy));
        let bad = |e: f64| Ok((3.0 * e).sin());
        assert!(matches!(
            solve_levels(&bad, 0.05, 0.0, 2.0, 1e-12),
            Err(SemiquantError::NonMonotone { .. })
        ));
    }
}
