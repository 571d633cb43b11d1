use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemiquantError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown symbol order index {0} (expected 0, 1 or 2)")]
    UnknownOrder(usize),
    #[error("derivative order a={a}, b={b} exceeds 4 and no finite-difference fallback is enabled")]
    DerivativeOrder { a: usize, b: usize },
    #[error("unknown built-in symbol `{0}`")]
    UnknownSymbol(String),
    #[error("orbit at E={energy} has {found} focal points in the well window, expected 2")]
    NonConvexOrbit { energy: f64, found: usize },
    #[error("energy {energy} is within {gap:e} of the critical value {critical}")]
    CriticalEnergy { energy: f64, critical: f64, gap: f64 },
    #[error("{what} did not converge")]
    NoConvergence { what: String },
    #[error("orbit at E={energy} failed to close: {detail}")]
    OrbitNotClosed { energy: f64, detail: String },
    #[error("energy drift {drift:e} exceeds tolerance along orbit at E={energy}")]
    EnergyDrift { energy: f64, drift: f64 },
    #[error("x={x} lies outside the open interval ({left}, {right})")]
    OutsideWell { x: f64, left: f64, right: f64 },
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),
    #[error("S_h is not increasing on [{lo}, {hi}]")]
    NonMonotone { lo: f64, hi: f64 },
    #[error("symbol `{0}` is not of the separable form g(xi) + f(x) xi + V(x)")]
    NotSeparable(String),
    #[error("|d_xi p0| = {0:e} is too close to a focal point")]
    FocalProximity(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, SemiquantError>;

impl SemiquantError {
    pub fn no_convergence(what: impl Into<String>) -> Self {
        SemiquantError::NoConvergence { what: what.into() }
    }

    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SemiquantError::NonConvexOrbit { .. }
                | SemiquantError::CriticalEnergy { .. }
                | SemiquantError::NoConvergence { .. }
                | SemiquantError::OrbitNotClosed { .. }
                | SemiquantError::EnergyDrift { .. }
                | SemiquantError::NonFinite(_)
                | SemiquantError::NonMonotone { .. }
                | SemiquantError::FocalProximity(_)
        )
    }
}
