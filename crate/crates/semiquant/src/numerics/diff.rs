//! Finite-difference E-derivatives with one Richardson level.

use crate::error::{Result, SemiquantError};

pub fn energy_step(e: f64) -> f64 {
    1e-3 * e.abs().max(1.0)
}

/// First or second derivative of `f` at `e` using the stencil step
/// `energy_step(e)`; `order` must be 1 or 2.
pub fn d_de(mut f: impl FnMut(f64) -> Result<f64>, e: f64, order: u8) -> Result<f64> {
    let d = energy_step(e);
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SemiquantError::NonFinite(format!("derivative stencil at E={x}")))
        }
    };
    match order {
        1 => {
            let wide = (eval(e + d)? - eval(e - d)?) / (2.0 * d);
            let narrow = (eval(e + 0.5 * d)? - eval(e - 0.5 * d)?) / d;
            Ok((4.0 * narrow - wide) / 3.0)
        }
        2 => {
            let f0 = eval(e)?;
            let (p1, m1) = (eval(e + d)?, eval(e - d)?);
            let (p2, m2) = (eval(e + 2.0 * d)?, eval(e - 2.0 * d)?);
            Ok((-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * d * d))
        }
        _ => Err(SemiquantError::InvalidArgument(format!(
            "derivative order {order} (expected 1 or 2)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_zero_derivative() {
        assert_eq!(d_de(|_| Ok(5.0), 1.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn second_derivative_exact_for_quadratic() {
        let v = d_de(|e| Ok(e * e), 3.0, 2).unwrap();
        assert!((v - 2.0).abs() < 1e-7);
    }

    #[test]
    fn first_derivative_is_fourth_order() {
        let v = d_de(|e| Ok(e.sin()), 0.7, 1).unwrap();
        assert!((v - 0.7f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn bad_order_is_rejected() {
        assert!(d_de(|e| Ok(e), 0.0, 3).is_err());
    }
}
