//! Semiclassical symbols `p = p0 + h p1 + h^2 p2` on phase space.
//!
//! Built-in symbols are separable, `g(xi) + f(x) xi + V(x)`, with every
//! univariate piece an [`Expr`]; their partial derivatives come from exact
//! Taylor jets and they evaluate over any [`Number`]. Custom terms carry
//! plain closures and fall back to finite differences when no partials are
//! supplied.

use crate::error::{Result, SemiquantError};
use crate::expr::Expr;
use crate::number::Number;
use crate::taylor::Taylor;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Highest total derivative order exposed by [`SymbolFamily::partial`].
pub const MAX_ORDER: usize = 4;

/// `g(xi) + f(x) xi + V(x)`; `kinetic` is written in the variable `x` but
/// evaluated at `xi`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableTerm {
    pub kinetic: Expr,
    pub drift: Expr,
    pub potential: Expr,
}

/// Univariate derivative tables `[g^(k)(xi)]`, `[f^(k)(x)]`, `[V^(k)(x)]`,
/// from which every mixed partial of a separable term is read off.
#[derive(Clone, Copy, Debug)]
pub struct SeparableJet<T: Number> {
    pub xi: T,
    pub kinetic: [T; 5],
    pub drift: [T; 5],
    pub potential: [T; 5],
}

impl<T: Number> SeparableJet<T> {
    pub fn partial(&self, a: usize, b: usize) -> T {
        match (a, b) {
            (0, 0) => self.kinetic[0] + self.drift[0] * self.xi + self.potential[0],
            (a, 0) => self.drift[a] * self.xi + self.potential[a],
            (0, 1) => self.kinetic[1] + self.drift[0],
            (a, 1) => self.drift[a],
            (0, b) => self.kinetic[b],
            _ => T::zero(),
        }
    }
}

impl SeparableTerm {
    pub fn zero() -> Self {
        SeparableTerm {
            kinetic: Expr::constant(0.0),
            drift: Expr::constant(0.0),
            potential: Expr::constant(0.0),
        }
    }

    pub fn potential(v: Expr) -> Self {
        SeparableTerm {
            potential: v,
            ..SeparableTerm::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kinetic.is_zero() && self.drift.is_zero() && self.potential.is_zero()
    }

    pub fn eval<T: Number>(&self, x: T, xi: T) -> T {
        self.kinetic.eval(xi) + self.drift.eval(x) * xi + self.potential.eval(x)
    }

    pub fn jet<T: Number>(&self, x: T, xi: T) -> SeparableJet<T> {
        SeparableJet {
            xi,
            kinetic: self.kinetic.derivatives(xi),
            drift: self.drift.derivatives(x),
            potential: self.potential.derivatives(x),
        }
    }

    /// `(p, d_x p, d_xi p)` using first-order jets only.
    pub fn gradient<T: Number>(&self, x: T, xi: T) -> (T, T, T) {
        let g: Taylor<T, 2> = self.kinetic.eval(Taylor::variable(xi));
        let f: Taylor<T, 2> = self.drift.eval(Taylor::variable(x));
        let v: Taylor<T, 2> = self.potential.eval(Taylor::variable(x));
        (
            g.c[0] + f.c[0] * xi + v.c[0],
            f.c[1] * xi + v.c[1],
            g.c[1] + f.c[0],
        )
    }
}

pub type PointFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type PartialFn = Arc<dyn Fn(f64, f64, usize, usize) -> f64 + Send + Sync>;

/// A term given only by closures; `partials(x, xi, a, b)` is optional.
#[derive(Clone)]
pub struct CustomTerm {
    pub value: PointFn,
    pub partials: Option<PartialFn>,
}

#[derive(Clone)]
pub enum Term {
    Separable(SeparableTerm),
    Custom(CustomTerm),
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Separable(s) => write!(f, "Separable({s:?})"),
            Term::Custom(c) => write!(f, "Custom(partials: {})", c.partials.is_some()),
        }
    }
}

impl Term {
    fn is_zero(&self) -> bool {
        matches!(self, Term::Separable(s) if s.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct SymbolFamily {
    pub name: String,
    pub params: BTreeMap<String, String>,
    terms: [Term; 3],
    /// Interval of x scanned for focal points.
    pub window: (f64, f64),
    /// Starting guess for the bottom (or top) of the well in phase space.
    pub center_hint: (f64, f64),
    /// Allow finite-difference partials for custom terms without closures.
    pub fd_fallback: bool,
}

impl SymbolFamily {
    pub fn new(name: impl Into<String>, p0: Term, window: (f64, f64)) -> Self {
        let center = 0.5 * (window.0 + window.1);
        SymbolFamily {
            name: name.into(),
            params: BTreeMap::new(),
            terms: [
                p0,
                Term::Separable(SeparableTerm::zero()),
                Term::Separable(SeparableTerm::zero()),
            ],
            window,
            center_hint: (center, 0.0),
            fd_fallback: true,
        }
    }

    pub fn harmonic() -> Self {
        let sq = Expr::parse("x^2").expect("static expression");
        SymbolFamily::new(
            "harmonic",
            Term::Separable(SeparableTerm {
                kinetic: sq.clone(),
                drift: Expr::constant(0.0),
                potential: sq,
            }),
            (-10.0, 10.0),
        )
    }

    pub fn schrodinger(v: Expr) -> Self {
        let mut s = SymbolFamily::tilted(Expr::constant(0.0), v.clone());
        s.name = "schrodinger".into();
        s.params.clear();
        s.params.insert("V".into(), v.to_string());
        s
    }

    pub fn tilted(f: Expr, v: Expr) -> Self {
        let mut s = SymbolFamily::new(
            "tilted",
            Term::Separable(SeparableTerm {
                kinetic: Expr::parse("x^2").expect("static expression"),
                drift: f.clone(),
                potential: v.clone(),
            }),
            (-5.0, 5.0),
        );
        s.params.insert("f".into(), f.to_string());
        s.params.insert("V".into(), v.to_string());
        s
    }

    pub fn quartic_kinetic(v: Expr) -> Self {
        let mut s = SymbolFamily::new(
            "quartic_kinetic",
            Term::Separable(SeparableTerm {
                kinetic: Expr::parse("x^4").expect("static expression"),
                drift: Expr::constant(0.0),
                potential: v.clone(),
            }),
            (-5.0, 5.0),
        );
        s.params.insert("V".into(), v.to_string());
        s
    }

    /// `cos xi + cos x`, using the well around the maximum at the origin.
    pub fn harper() -> Self {
        let c = Expr::parse("cos(x)").expect("static expression");
        SymbolFamily::new(
            "harper",
            Term::Separable(SeparableTerm {
                kinetic: c.clone(),
                drift: Expr::constant(0.0),
                potential: c,
            }),
            (-3.1, 3.1),
        )
    }

    pub fn with_p1(mut self, term: Term) -> Self {
        self.terms[1] = term;
        self
    }

    pub fn with_p2(mut self, term: Term) -> Self {
        self.terms[2] = term;
        self
    }

    pub fn with_window(mut self, window: (f64, f64)) -> Self {
        self.window = window;
        self
    }

    pub fn term(&self, j: usize) -> Result<&Term> {
        self.terms.get(j).ok_or(SemiquantError::UnknownOrder(j))
    }

    /// The separable pieces of `p_j`, if that term is separable.
    pub fn separable(&self, j: usize) -> Option<&SeparableTerm> {
        match self.terms.get(j)? {
            Term::Separable(s) => Some(s),
            Term::Custom(_) => None,
        }
    }

    pub fn is_separable(&self) -> bool {
        (0..3).all(|j| self.separable(j).is_some())
    }

    pub fn has_p1(&self) -> bool {
        !self.terms[1].is_zero()
    }

    pub fn has_p2(&self) -> bool {
        !self.terms[2].is_zero()
    }

    pub fn eval(&self, x: f64, xi: f64, j: usize) -> Result<f64> {
        match self.term(j)? {
            Term::Separable(s) => Ok(s.eval(x, xi)),
            Term::Custom(c) => Ok((c.value)(x, xi)),
        }
    }

    pub fn partial(&self, x: f64, xi: f64, j: usize, a: usize, b: usize) -> Result<f64> {
        if a + b > MAX_ORDER {
            return Err(SemiquantError::DerivativeOrder { a, b });
        }
        match self.term(j)? {
            Term::Separable(s) => Ok(s.jet(x, xi).partial(a, b)),
            Term::Custom(c) => match (&c.partials, self.fd_fallback) {
                (Some(p), _) => Ok(p(x, xi, a, b)),
                (None, true) => Ok(fd_partial(&*c.value, x, xi, a, b)),
                (None, false) => Err(SemiquantError::DerivativeOrder { a, b }),
            },
        }
    }

    /// Exact partials of a separable `p_j` over any scalar type.
    pub fn jet_generic<T: Number>(&self, x: T, xi: T, j: usize) -> Result<SeparableJet<T>> {
        match self.term(j)? {
            Term::Separable(s) => Ok(s.jet(x, xi)),
            Term::Custom(_) => Err(SemiquantError::Unsupported(format!(
                "generic evaluation of custom term p{j} in `{}`",
                self.name
            ))),
        }
    }

    /// `(p0, d_x p0, d_xi p0)` at a real point.
    pub fn gradient0(&self, x: f64, xi: f64) -> Result<(f64, f64, f64)> {
        match &self.terms[0] {
            Term::Separable(s) => Ok(s.gradient(x, xi)),
            Term::Custom(_) => Ok((
                self.eval(x, xi, 0)?,
                self.partial(x, xi, 0, 1, 0)?,
                self.partial(x, xi, 0, 0, 1)?,
            )),
        }
    }

    /// Hessian determinant `p0_xx p0_xixi - p0_xxi^2`.
    pub fn delta(&self, x: f64, xi: f64) -> Result<f64> {
        let pxx = self.partial(x, xi, 0, 2, 0)?;
        let pyy = self.partial(x, xi, 0, 0, 2)?;
        let pxy = self.partial(x, xi, 0, 1, 1)?;
        Ok(pxx * pyy - pxy * pxy)
    }
}

fn stencil(order: usize) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
    }
}

fn fd_base_step(total: usize) -> f64 {
    match total {
        0 | 1 => 2e-3,
        2 => 1e-2,
        3 => 4e-2,
        _ => 8e-2,
    }
}

fn fd_once(p: &dyn Fn(f64, f64) -> f64, x: f64, xi: f64, a: usize, b: usize, h: f64) -> f64 {
    let mut acc = 0.0;
    for &(i, wi) in stencil(a) {
        for &(k, wk) in stencil(b) {
            acc += wi * wk * p(x + i as f64 * h, xi + k as f64 * h);
        }
    }
    acc / h.powi((a + b) as i32)
}

/// Tensor-product central differences on steps `h, h/2, h/4` with two
/// Richardson levels; the step grows with the derivative order so that
/// fourth derivatives stay well above round-off.
pub fn fd_partial(p: &dyn Fn(f64, f64) -> f64, x: f64, xi: f64, a: usize, b: usize) -> f64 {
    if a + b == 0 {
        return p(x, xi);
    }
    let h = fd_base_step(a + b);
    let d1 = fd_once(p, x, xi, a, b, h);
    let d2 = fd_once(p, x, xi, a, b, 0.5 * h);
    let d4 = fd_once(p, x, xi, a, b, 0.25 * h);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// Largest analytic-vs-difference mismatch for each `(j, a, b)`.
#[derive(Clone, Debug, Serialize)]
pub struct FdReport {
    pub probes: usize,
    pub entries: Vec<FdEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FdEntry {
    pub order: usize,
    pub a: usize,
    pub b: usize,
    pub max_mismatch: f64,
}

impl FdReport {
    pub fn max_mismatch(&self) -> f64 {
        self.entries.iter().map(|e| e.max_mismatch).fold(0.0, f64::max)
    }

    /// Entries whose mismatch exceeds `tol`.
    pub fn flagged(&self, tol: f64) -> Vec<&FdEntry> {
        self.entries.iter().filter(|e| e.max_mismatch > tol).collect()
    }
}

/// Compares `partial` with finite differences of `eval` at random probes in
/// the symbol window; mismatch is `|analytic - fd| / max(1, |analytic|)`.
pub fn fd_consistency_report(sym: &SymbolFamily, probes: usize, seed: u64) -> Result<FdReport> {
    if probes == 0 {
        return Err(SemiquantError::InvalidArgument("probes must be >= 1".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let (lo, hi) = sym.window;
    let span = (hi - lo).min(4.0);
    let mid = 0.5 * (lo + hi);
    let points: Vec<(f64, f64)> = (0..probes)
        .map(|_| {
            (
                mid + span * (rng.random::<f64>() - 0.5),
                span * (rng.random::<f64>() - 0.5),
            )
        })
        .collect();
    let mut entries = Vec::new();
    for j in 0..3 {
        let value = |x: f64, xi: f64| sym.eval(x, xi, j).unwrap_or(f64::NAN);
        for total in 1..=MAX_ORDER {
            for a in 0..=total {
                let b = total - a;
                let mut worst = 0.0f64;
                for &(x, xi) in &points {
                    let exact = sym.partial(x, xi, j, a, b)?;
                    let fd = fd_partial(&value, x, xi, a, b);
                    let m = (exact - fd).abs() / exact.abs().max(1.0);
                    worst = worst.max(if m.is_nan() { f64::INFINITY } else { m });
                }
                entries.push(FdEntry {
                    order: j,
                    a,
                    b,
                    max_mismatch: worst,
                });
            }
        }
    }
    Ok(FdReport { probes, entries })
}

/// Serializable description of a built-in symbol with optional
/// attachments; the CLI and config files speak this form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<String>,
    /// Sub-principal term as a function of x.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<String>,
    /// Coefficient of xi in the sub-principal term.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1_drift: Option<String>,
    /// Second-order term as a function of x.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
}

impl SymbolSpec {
    pub fn named(name: &str) -> Self {
        SymbolSpec {
            name: name.to_string(),
            potential: None,
            drift: None,
            p1: None,
            p1_drift: None,
            p2: None,
            window: None,
        }
    }

    pub fn build(&self) -> Result<SymbolFamily> {
        let parse_or = |src: &Option<String>, default: &str| -> Result<Expr> {
            Expr::parse(src.as_deref().unwrap_or(default))
        };
        let mut sym = match self.name.as_str() {
            "harmonic" => SymbolFamily::harmonic(),
            "schrodinger" => SymbolFamily::schrodinger(parse_or(&self.potential, "x^2")?),
            "tilted" => SymbolFamily::tilted(
                parse_or(&self.drift, "x")?,
                parse_or(&self.potential, "x^2")?,
            ),
            "quartic_kinetic" => SymbolFamily::quartic_kinetic(parse_or(&self.potential, "x^2")?),
            "harper" => SymbolFamily::harper(),
            other => return Err(SemiquantError::UnknownSymbol(other.to_string())),
        };
        if self.p1.is_some() || self.p1_drift.is_some() {
            let term = SeparableTerm {
                kinetic: Expr::constant(0.0),
                drift: parse_or(&self.p1_drift, "0")?,
                potential: parse_or(&self.p1, "0")?,
            };
            sym = sym.with_p1(Term::Separable(term));
            if let Some(p) = &self.p1 {
                sym.params.insert("p1".into(), p.clone());
            }
            if let Some(p) = &self.p1_drift {
                sym.params.insert("p1_drift".into(), p.clone());
            }
        }
        if let Some(p2) = &self.p2 {
            sym = sym.with_p2(Term::Separable(SeparableTerm::potential(Expr::parse(p2)?)));
            sym.params.insert("p2".into(), p2.clone());
        }
        if let Some(w) = self.window {
            if !(w.0 < w.1) {
                return Err(SemiquantError::InvalidArgument(format!(
                    "window [{}, {}] is empty",
                    w.0, w.1
                )));
            }
            sym.window = w;
            sym.center_hint.0 = 0.5 * (w.0 + w.1);
        }
        Ok(sym)
    }
}
