//! Semiclassical action `S_h(E) = S0 + h S1 + h^2 S2` from period
//! integrals along the Hamilton flow.
//!
//! Every integral is taken in positive time over one period, so the
//! formulas hold for wells around minima (clockwise flow) and maxima
//! (anticlockwise flow) alike:
//!
//! * `S0 = int xi x' dt`
//! * `S1 = pi - int p1 dt`
//! * `S2 = -(1/24) d/dE int Delta dt - int p2 dt + (1/2) d/dE int p1^2 dt`
//!
//! with `Delta = p0_xx p0_xixi - p0_xxi^2`. The second form replaces the
//! Delta term by `-(1/48) d^2/dE^2 int Gamma dt`, where `Gamma dt` is the
//! density of the Hessian 1-form along the flow (see [`gamma_density`]).

use crate::error::Result;
use crate::numerics::diff::d_de;
use crate::orbit::Orbit;
use crate::symbol::SymbolFamily;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

/// Period integrals of one orbit.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodIntegrals {
    pub energy: f64,
    pub steps: usize,
    pub period: f64,
    pub action: f64,
    pub delta: f64,
    pub gamma: f64,
    pub p1: f64,
    pub p1_squared: f64,
    pub p2: f64,
}

/// `Gamma = p0_xx p0_xi^2 - 2 p0_xxi p0_x p0_xi + p0_xixi p0_x^2`, the
/// density of the Hessian 1-form against the flow.
pub fn gamma_density(sym: &SymbolFamily, x: f64, xi: f64) -> Result<f64> {
    let px = sym.partial(x, xi, 0, 1, 0)?;
    let py = sym.partial(x, xi, 0, 0, 1)?;
    let pxx = sym.partial(x, xi, 0, 2, 0)?;
    let pxy = sym.partial(x, xi, 0, 1, 1)?;
    let pyy = sym.partial(x, xi, 0, 0, 2)?;
    Ok(pxx * py * py - 2.0 * pxy * px * py + pyy * px * px)
}

impl PeriodIntegrals {
    pub fn from_orbit(sym: &SymbolFamily, orbit: &Orbit) -> Result<Self> {
        let mut acc = [0.0f64; 6];
        for p in &orbit.points {
            let (x, xi) = (p[0], p[1]);
            let py = sym.partial(x, xi, 0, 0, 1)?;
            let q1 = sym.eval(x, xi, 1)?;
            acc[0] += xi * py;
            acc[1] += sym.delta(x, xi)?;
            acc[2] += gamma_density(sym, x, xi)?;
            acc[3] += q1;
            acc[4] += q1 * q1;
            acc[5] += sym.eval(x, xi, 2)?;
        }
        let dt = orbit.dt();
        Ok(PeriodIntegrals {
            energy: orbit.energy,
            steps: orbit.steps(),
            period: orbit.period,
            action: acc[0] * dt,
            delta: acc[1] * dt,
            gamma: acc[2] * dt,
            p1: acc[3] * dt,
            p1_squared: acc[4] * dt,
            p2: acc[5] * dt,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionDiagnostics {
    pub period: f64,
    pub delta_integral: f64,
    pub p1_integral: f64,
    pub p1_squared_integral: f64,
    pub p2_integral: f64,
    pub gamma_integral: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionSeries {
    pub energy: f64,
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub diagnostics: ActionDiagnostics,
}

impl ActionSeries {
    pub fn total(&self, h: f64) -> f64 {
        self.s0 + h * self.s1 + h * h * self.s2
    }
}

type CacheKey = (u64, usize);

/// Memoizing evaluator of period integrals and action terms for one
/// symbol. Finite-difference stencils reuse the sample count of the
/// central orbit so that E-derivatives see a smooth function.
pub struct ActionEvaluator<'a> {
    sym: &'a SymbolFamily,
    fixed_steps: Option<usize>,
    cache: Mutex<HashMap<CacheKey, Arc<PeriodIntegrals>>>,
    auto_steps: Mutex<HashMap<u64, usize>>,
}

impl<'a> ActionEvaluator<'a> {
    pub fn new(sym: &'a SymbolFamily) -> Self {
        ActionEvaluator {
            sym,
            fixed_steps: None,
            cache: Mutex::new(HashMap::new()),
            auto_steps: Mutex::new(HashMap::new()),
        }
    }

    /// Evaluator that uses `steps` samples for every orbit.
    pub fn with_steps(sym: &'a SymbolFamily, steps: usize) -> Self {
        ActionEvaluator {
            fixed_steps: Some(steps),
            ..ActionEvaluator::new(sym)
        }
    }

    pub fn symbol(&self) -> &SymbolFamily {
        self.sym
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.lock().map(|c| c.len()).unwrap_or(0)
    }

    /// Integrals at `energy` with `steps` samples, or the adaptive count.
    pub fn integrals(&self, energy: f64, steps: Option<usize>) -> Result<Arc<PeriodIntegrals>> {
        let steps = steps.or(self.fixed_steps);
        let resolved = match steps {
            Some(n) => Some(n),
            None => self
                .auto_steps
                .lock()
                .ok()
                .and_then(|m| m.get(&energy.to_bits()).copied()),
        };
        if let Some(n) = resolved {
            if let Some(hit) = self.lookup(energy, n) {
                return Ok(hit);
            }
        }
        let orbit = match resolved {
            Some(n) => Orbit::with_steps(self.sym, energy, n)?,
            None => Orbit::compute(self.sym, energy)?,
        };
        let ints = Arc::new(PeriodIntegrals::from_orbit(self.sym, &orbit)?);
        if let Ok(mut c) = self.cache.lock() {
            c.insert((energy.to_bits(), ints.steps), ints.clone());
        }
        if steps.is_none() {
            if let Ok(mut m) = self.auto_steps.lock() {
                m.insert(energy.to_bits(), ints.steps);
            }
        }
        Ok(ints)
    }

    fn lookup(&self, energy: f64, steps: usize) -> Option<Arc<PeriodIntegrals>> {
        self.cache
            .lock()
            .ok()
            .and_then(|c| c.get(&(energy.to_bits(), steps)).cloned())
    }

    fn derivative(
        &self,
        energy: f64,
        order: u8,
        field: impl Fn(&PeriodIntegrals) -> f64,
    ) -> Result<f64> {
        let n = self.integrals(energy, None)?.steps;
        d_de(|e| Ok(field(&*self.integrals(e, Some(n))?)), energy, order)
    }

    pub fn period(&self, energy: f64) -> Result<f64> {
        Ok(self.integrals(energy, None)?.period)
    }

    pub fn s0(&self, energy: f64) -> Result<f64> {
        Ok(self.integrals(energy, None)?.action)
    }

    pub fn s1(&self, energy: f64) -> Result<f64> {
        Ok(PI - self.integrals(energy, None)?.p1)
    }

    /// Second-order action in the Hessian-determinant form.
    pub fn s2(&self, energy: f64) -> Result<f64> {
        let base = self.integrals(energy, None)?;
        let d_delta = self.derivative(energy, 1, |p| p.delta)?;
        let d_p1 = if self.sym.has_p1() {
            self.derivative(energy, 1, |p| p.p1_squared)?
        } else {
            0.0
        };
        Ok(-d_delta / 24.0 - base.p2 + 0.5 * d_p1)
    }

    /// Second-order action with the Delta term written through the
    /// second E-derivative of the Gamma integral.
    pub fn s2_gamma_form(&self, energy: f64) -> Result<f64> {
        let base = self.integrals(energy, None)?;
        let dd_gamma = self.derivative(energy, 2, |p| p.gamma)?;
        let d_p1 = if self.sym.has_p1() {
            self.derivative(energy, 1, |p| p.p1_squared)?
        } else {
            0.0
        };
        Ok(-dd_gamma / 48.0 - base.p2 + 0.5 * d_p1)
    }

    /// `d S0 / dE` by the shared finite-difference rule; equals the period.
    pub fn ds0_de(&self, energy: f64) -> Result<f64> {
        self.derivative(energy, 1, |p| p.action)
    }

    pub fn series(&self, energy: f64) -> Result<ActionSeries> {
        let base = self.integrals(energy, None)?;
        let s2 = self.s2(energy)?;
        Ok(ActionSeries {
            energy,
            s0: base.action,
            s1: PI - base.p1,
            s2,
            diagnostics: ActionDiagnostics {
                period: base.period,
                delta_integral: base.delta,
                p1_integral: base.p1,
                p1_squared_integral: base.p1_squared,
                p2_integral: base.p2,
                gamma_integral: base.gamma,
                steps: base.steps,
            },
        })
    }

    /// `S_h(E) = S0 + h S1 + h^2 S2`.
    pub fn total(&self, energy: f64, h: f64) -> Result<f64> {
        Ok(self.series(energy)?.total(h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::numerics::gauss::GaussLegendre;
    use crate::symbol::{SeparableTerm, Term};

    #[test]
    fn harmonic_actions() {
        let s = SymbolFamily::harmonic();
        let a = ActionEvaluator::new(&s);
        assert!((a.s0(1.0).unwrap() - PI).abs() < 1e-11);
        assert!((a.s0(2.0).unwrap() - 2.0 * PI).abs() < 1e-11);
        assert!((a.s1(1.0).unwrap() - PI).abs() < 1e-15);
        assert!(a.s2(1.0).unwrap().abs() < 1e-9);
        assert!((a.total(1.0, 0.1).unwrap() - 1.1 * PI).abs() < 1e-10);
        let g = a.integrals(1.3, None).unwrap();
        assert!((g.gamma - 8.0 * 1.3 * PI).abs() < 1e-10);
    }

    #[test]
    fn subprincipal_attachments() {
        let one = SymbolFamily::harmonic().with_p1(Term::Separable(SeparableTerm::potential(
            Expr::constant(1.0),
        )));
        assert!(ActionEvaluator::new(&one).s1(1.0).unwrap().abs() < 1e-10);
        let lin = SymbolFamily::harmonic()
            .with_p1(Term::Separable(SeparableTerm::potential(Expr::var())));
        let a = ActionEvaluator::new(&lin);
        assert!((a.s1(1.0).unwrap() - PI).abs() < 1e-10);
        // int x^2 dt = pi E / 2 on the circle, so S2 = (1/2)(pi/2)
        assert!((a.s2(1.0).unwrap() - PI / 4.0).abs() < 1e-9);
    }

    #[test]
    fn quartic_action_matches_substituted_quadrature() {
        let s = SymbolFamily::schrodinger(Expr::parse("x^4").unwrap());
        let a = ActionEvaluator::new(&s);
        // 2 int_{-1}^{1} sqrt(1 - x^4) dx with x = 1 - u^2 on each half
        let g = GaussLegendre::new(40);
        let oracle = 4.0
            * g.integrate(0.0, 1.0, |u| {
                let x = 1.0 - u * u;
                (1.0 - x.powi(4)).sqrt() * 2.0 * u
            });
        assert!((a.s0(1.0).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn derivative_of_action_is_period() {
        let s = SymbolFamily::harper();
        let a = ActionEvaluator::new(&s);
        let t = a.period(0.7).unwrap();
        assert!((a.ds0_de(0.7).unwrap() - t).abs() < 1e-6 * t);
        assert!(a.s0(0.7).unwrap() < 0.0);
    }

    #[test]
    fn cache_reuses_orbits() {
        let s = SymbolFamily::harmonic();
        let a = ActionEvaluator::new(&s);
        a.s2(1.0).unwrap();
        let n = a.cached_entries();
        a.s2(1.0).unwrap();
        assert_eq!(a.cached_entries(), n);
    }
}
