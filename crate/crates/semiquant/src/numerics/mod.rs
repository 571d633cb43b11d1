//! Generic numerical building blocks: quadrature, spectral integration,
//! scalar root finding, ODE stepping and E-differentiation.

pub mod cheb;
pub mod diff;
pub mod fit;
pub mod gauss;
pub mod ode;
pub mod roots;
