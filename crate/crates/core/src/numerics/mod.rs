//! Quadrature, interpolation, root bracketing and ODE stepping.

pub mod cheb;
pub mod gauss;
pub mod ode;
pub mod quad;
pub mod roots;

pub use cheb::ChebGrid;
pub use gauss::GaussLegendre;
pub use quad::{integrate, quad, QuadOptions, QuadResult};
pub use roots::{bisect_secant, sign_changes, Root};
