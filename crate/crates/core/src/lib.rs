//! Axisymmetric Galerkin boundary element solver for the impedance change of
//! an eddy-current coil near a conducting body of revolution.

pub mod assembly;
pub mod coilfield;
pub mod driver;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod quadrature;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
