//! Coil source fields by superposition of filamentary loops.

use std::f64::consts::PI;

use crate::kernels::{laplace_agm, Sep};
use crate::quad::{integrate, Tolerance};

pub const MU0: f64 = 4.0e-7 * PI;

/// Rectangular-section coil with uniform current density.
#[derive(Debug, Clone, Copy)]
pub struct Coil {
    pub r1: f64,
    pub r2: f64,
    pub h: f64,
    pub turns: f64,
    pub z0: f64,
    pub current: f64,
}

impl Coil {
    fn density(&self) -> f64 {
        self.turns * self.current / (2.0 * self.h * (self.r2 - self.r1))
    }
}

/// Azimuthal vector potential at `(r, z)` for a point outside the winding.
pub fn potential(c: &Coil, r: f64, z: f64, tol: Tolerance) -> f64 {
    let inner = |zp: f64| {
        integrate(
            |rho| rho * laplace_agm(Sep::new(r, z, rho, zp))[0],
            &[c.r1, c.r2],
            tol,
        )
    };
    MU0 * c.density() * integrate(inner, &[c.z0 - c.h, c.z0 + c.h], tol)
}

/// Axial flux density on the axis from the Biot–Savart field of each loop.
pub fn axial_bz(c: &Coil, z: f64, tol: Tolerance) -> f64 {
    let inner = |zp: f64| {
        integrate(
            |rho| {
                let q = rho * rho + (z - zp) * (z - zp);
                rho * rho / (2.0 * q * q.sqrt())
            },
            &[c.r1, c.r2],
            tol,
        )
    };
    MU0 * c.density() * integrate(inner, &[c.z0 - c.h, c.z0 + c.h], tol)
}
