//! Independent reference computations: adaptive quadrature of the defining
//! integrals, with no shared code paths with the main library.

pub mod coil;
pub mod kernels;
pub mod pair;
pub mod quad;
