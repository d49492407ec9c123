//! Runge-Kutta discontinuous Galerkin solver for hyperbolic conservation
//! laws, with stage-dependent polynomial spaces, shock-capturing limiters,
//! and a von Neumann analysis engine for stability and accuracy studies.

pub mod basis;
pub mod dg;
pub mod error;
pub mod euler;
pub mod field;
pub mod flops;
pub mod flux;
pub mod harness;
pub mod limiter;
pub mod linalg;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod stepper;
pub mod system;
pub mod tableau;
pub mod vn;
