//! Source fields of a cylindrical coil with a rectangular winding section
//! and uniform current density.
//!
//! The fields are radial integrals over the winding, `∫_{r₁}^{r₂} ρ f(ρ) dρ`,
//! of ring functions expressed with complete elliptic integrals and Heuman's
//! Lambda function. The integrand has a kink at `ρ = r` that sharpens as the
//! field point approaches the top or bottom face of the winding, so the
//! interval is split at `ρ* = clamp(r, r₁, r₂)` and graded geometrically
//! toward it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{MeridianPoint, MU0};
use crate::quadrature::{gauss_legendre_01, QuadRule};
use crate::specfun::{carlson_rd, carlson_rf, heuman_lambda_comp, ring_function};

fn default_current() -> f64 {
    1.0
}

/// Cylindrical coil centred on the axis at height `z0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoilSpec {
    /// Inner winding radius (m).
    pub r1: f64,
    /// Outer winding radius (m).
    pub r2: f64,
    /// Half-height of the winding (m).
    pub h: f64,
    /// Number of turns.
    pub turns: u32,
    /// Axial position of the coil centre (m).
    pub z0: f64,
    /// Current amplitude (A).
    #[serde(default = "default_current")]
    pub current: f64,
}

impl CoilSpec {
    pub fn new(r1: f64, r2: f64, h: f64, turns: u32, z0: f64) -> Result<Self> {
        let c = CoilSpec {
            r1,
            r2,
            h,
            turns,
            z0,
            current: 1.0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r1 > 0.0 && self.r2 > self.r1 && self.r2.is_finite()) {
            return Err(Error::config("coil", "need 0 < r1 < r2"));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::config("coil.h", "half-height must be positive"));
        }
        if self.turns == 0 {
            return Err(Error::config("coil.turns", "need at least one turn"));
        }
        if !(self.z0.is_finite() && self.current.is_finite()) {
            return Err(Error::config("coil", "z0 and current must be finite"));
        }
        Ok(())
    }

    /// `μ₀NI / (4h(r₂ − r₁))`.
    fn prefactor(&self) -> f64 {
        MU0 * self.turns as f64 * self.current / (4.0 * self.h * (self.r2 - self.r1))
    }

    /// `g₁(r) = ∫ ρ · min(r, ρ)/max(r, ρ) dρ` over the winding.
    fn g1(&self, r: f64) -> f64 {
        let (r1, r2) = (self.r1, self.r2);
        if r <= r1 {
            (r2 - r1) * r
        } else if r < r2 {
            -2.0 / 3.0 * r * r + r2 * r - r1.powi(3) / (3.0 * r)
        } else {
            (r2.powi(3) - r1.powi(3)) / (3.0 * r)
        }
    }

    /// `g₂(r) = 2 ∫ dρ` over the part of the winding outside radius `r`.
    fn g2(&self, r: f64) -> f64 {
        if r <= self.r1 {
            2.0 * (self.r2 - self.r1)
        } else if r < self.r2 {
            2.0 * (self.r2 - r)
        } else {
            0.0
        }
    }
}

/// Source vector potential and flux density at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourceFields {
    /// `A_φ`
    pub a: f64,
    /// `B_z`
    pub bz: f64,
    /// `B_r`
    pub br: f64,
}

/// Ring functions `(f₁, f₂, f₃)` for a loop of radius `rho` seen from radius
/// `r` at axial distance `zeta ≥ 0`.
fn ring_terms(rho: f64, r: f64, zeta: f64) -> (f64, f64, f64) {
    let big_s = (rho + r).powi(2) + zeta * zeta;
    let diff = rho - r;
    let alpha = 4.0 * rho * r / big_s;
    let alpha_c = (diff * diff + zeta * zeta) / big_s;
    let root_s = big_s.sqrt();
    let rf = carlson_rf(0.0, alpha_c, 1.0);
    let (term1, kterm) = if zeta == 0.0 {
        (0.0, 0.0)
    } else {
        let rd = carlson_rd(0.0, alpha_c, 1.0);
        (
            -2.0 * zeta / (PI * root_s) * (rd / 3.0 + rf * diff * diff / (4.0 * rho * r)),
            zeta * rf / (PI * root_s),
        )
    };
    let beta = zeta.atan2(diff.abs());
    let lambda = heuman_lambda_comp(beta, alpha, alpha_c).unwrap_or(0.0);
    let ratio = (rho * rho - r * r) / (2.0 * rho * r);
    let (f1_tail, f2) = if r < rho {
        (0.5 * (ratio * lambda + r / rho), (1.0 - kterm - 0.5 * lambda) / rho)
    } else if r > rho {
        (0.5 * (-ratio * lambda + rho / r), (-kterm + 0.5 * lambda) / rho)
    } else {
        // mean of the one-sided limits
        (0.5, (0.5 - kterm) / rho)
    };
    let (pt, _) = ring_function(alpha, alpha_c);
    let f3 = 16.0 * rho * r * pt / (PI * big_s * root_s);
    (term1 + f1_tail, f2, f3)
}

/// Axial zone of the field point relative to the winding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Below,
    Inside,
    Above,
}

/// Field evaluator with a fixed radial rule.
#[derive(Debug, Clone)]
pub struct CoilEvaluator {
    coil: CoilSpec,
    rule: QuadRule,
}

impl CoilEvaluator {
    pub fn new(coil: &CoilSpec, n_rho: usize) -> Result<Self> {
        coil.validate()?;
        if !(8..=128).contains(&n_rho) {
            return Err(Error::domain("coilfield", format!("n_rho = {n_rho} not in 8..=128")));
        }
        Ok(CoilEvaluator {
            coil: *coil,
            rule: gauss_legendre_01(n_rho)?,
        })
    }

    pub fn coil(&self) -> &CoilSpec {
        &self.coil
    }

    /// `A_φ`, `B_z`, `B_r` at `(r, z)`.
    pub fn fields(&self, r: f64, z: f64) -> SourceFields {
        let zeta = z - self.coil.z0;
        let branch = if zeta >= self.coil.h {
            Branch::Above
        } else if zeta <= -self.coil.h {
            Branch::Below
        } else {
            Branch::Inside
        };
        self.fields_on(r, z, branch)
    }

    fn fields_on(&self, r: f64, z: f64, branch: Branch) -> SourceFields {
        let c = &self.coil;
        let h = c.h;
        let zeta = z - c.z0;
        let pre = c.prefactor();
        if r == 0.0 {
            let term = |s: f64| {
                let a = (c.r2 + (c.r2 * c.r2 + s * s).sqrt()) / (c.r1 + (c.r1 * c.r1 + s * s).sqrt());
                s * a.ln()
            };
            return SourceFields {
                a: 0.0,
                bz: pre * (term(zeta + h) - term(zeta - h)),
                br: 0.0,
            };
        }
        let a1 = (h - zeta).abs();
        let a2 = (h + zeta).abs();
        let mut s1 = [0.0; 3];
        let mut s2 = [0.0; 3];
        self.radial_sum(r, a1.min(a2), |rho, w| {
            let t1 = ring_terms(rho, r, a1);
            let t2 = ring_terms(rho, r, a2);
            let wr = w * rho;
            s1[0] += wr * t1.0;
            s1[1] += wr * t1.1;
            s1[2] += wr * t1.2;
            s2[0] += wr * t2.0;
            s2[1] += wr * t2.1;
            s2[2] += wr * t2.2;
        });
        let (a, bz) = match branch {
            Branch::Above => (s1[0] - s2[0], s1[1] - s2[1]),
            Branch::Below => (s2[0] - s1[0], s2[1] - s1[1]),
            Branch::Inside => (c.g1(r) - s1[0] - s2[0], c.g2(r) - s1[1] - s2[1]),
        };
        SourceFields {
            a: pre * a,
            bz: pre * bz,
            br: pre * (s1[2] - s2[2]),
        }
    }

    /// `∂A_φ/∂n` for the unit normal `n = (n_r, n_z)`.
    pub fn normal_derivative(&self, r: f64, z: f64, n: (f64, f64)) -> f64 {
        let f = self.fields(r, z);
        self.normal_derivative_from(r, &f, n)
    }

    /// Normal derivative from already evaluated fields.
    pub fn normal_derivative_from(&self, r: f64, f: &SourceFields, n: (f64, f64)) -> f64 {
        let d_r = if r == 0.0 { 0.5 * f.bz } else { f.bz - f.a / r };
        n.0 * d_r - n.1 * f.br
    }

    /// Visit radial nodes and weights over `[r₁, r₂]`, graded toward the
    /// kink at `ρ* = clamp(r, r₁, r₂)` on the scale of the distance from the
    /// field point to the nearest winding face.
    fn radial_sum<F: FnMut(f64, f64)>(&self, r: f64, zeta_min: f64, mut f: F) {
        let (r1, r2) = (self.coil.r1, self.coil.r2);
        let star = r.clamp(r1, r2);
        let delta = ((r - star).powi(2) + zeta_min * zeta_min).sqrt();
        let mut cell = |a: f64, b: f64| {
            let h = b - a;
            for (&t, &w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                f(a + h * t, w * h);
            }
        };
        for (len, dir) in [(star - r1, -1.0), (r2 - star, 1.0)] {
            if len <= 0.0 {
                continue;
            }
            let depth = if delta < len {
                ((len / delta).log2().ceil() as i32).clamp(0, 40)
            } else {
                0
            };
            // cells [star + dir·len·2^{-j}, star + dir·len·2^{-j+1}]
            let mut outer = len;
            for _ in 0..depth {
                let inner = 0.5 * outer;
                let (a, b) = order(star + dir * inner, star + dir * outer);
                cell(a, b);
                outer = inner;
            }
            let (a, b) = order(star, star + dir * outer);
            cell(a, b);
        }
    }
}

fn order(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Azimuthal vector potential `A_φ` of the coil.
pub fn source_potential(coil: &CoilSpec, p: MeridianPoint, n_rho: usize) -> Result<f64> {
    Ok(CoilEvaluator::new(coil, n_rho)?.fields(p.r, p.z).a)
}

/// Axial flux density `B_z`.
pub fn source_bz(coil: &CoilSpec, p: MeridianPoint, n_rho: usize) -> Result<f64> {
    Ok(CoilEvaluator::new(coil, n_rho)?.fields(p.r, p.z).bz)
}

/// Radial flux density `B_r`.
pub fn source_br(coil: &CoilSpec, p: MeridianPoint, n_rho: usize) -> Result<f64> {
    Ok(CoilEvaluator::new(coil, n_rho)?.fields(p.r, p.z).br)
}

/// Normal derivative `n_r ∂_r A_φ + n_z ∂_z A_φ` for a unit normal.
pub fn source_normal_derivative(
    coil: &CoilSpec,
    p: MeridianPoint,
    normal: (f64, f64),
    n_rho: usize,
) -> Result<f64> {
    let len = normal.0.hypot(normal.1);
    if (len - 1.0).abs() > 1e-12 {
        return Err(Error::domain("source_normal_derivative", format!("|n| = {len}")));
    }
    Ok(CoilEvaluator::new(coil, n_rho)?.normal_derivative(p.r, p.z, normal))
}

/// Self-inductance from the magnetic energy,
/// `L = (2πN / (2h(r₂ − r₁)I)) ∬ A_φ r dr dz` over the winding section.
pub fn self_inductance(coil: &CoilSpec, n_quad: usize) -> Result<f64> {
    if !(16..=128).contains(&n_quad) {
        return Err(Error::domain("self_inductance", format!("n_quad = {n_quad} not in 16..=128")));
    }
    let eval = CoilEvaluator::new(coil, n_quad)?;
    let rule = gauss_legendre_01(n_quad)?;
    let (r1, r2, h) = (coil.r1, coil.r2, coil.h);
    let mut sum = 0.0;
    for (&tz, &wz) in rule.nodes.iter().zip(&rule.weights) {
        let z = coil.z0 - h + 2.0 * h * tz;
        for (&tr, &wr) in rule.nodes.iter().zip(&rule.weights) {
            let r = r1 + (r2 - r1) * tr;
            sum += wz * wr * eval.fields(r, z).a * r;
        }
    }
    let area = 2.0 * h * (r2 - r1);
    Ok(2.0 * PI * coil.turns as f64 / (area * coil.current) * sum * area)
}
