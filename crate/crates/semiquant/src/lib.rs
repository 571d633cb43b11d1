//! Second-order Bohr-Sommerfeld quantization for one-dimensional
//! semiclassical Hamiltonians `p(x, xi; h) = p0 + h p1 + h^2 p2`.

pub mod action;
pub mod airy;
pub mod bs;
pub mod error;
pub mod expr;
pub mod number;
pub mod numerics;
pub mod orbit;
pub mod reference;
pub mod symbol;
pub mod taylor;
pub mod wkb;

pub use error::{Result, SemiquantError};
pub use expr::Expr;
pub use symbol::{SymbolFamily, SymbolSpec};
