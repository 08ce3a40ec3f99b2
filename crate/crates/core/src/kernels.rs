//! Axisymmetric ring kernels: the Laplace kernel in closed form and the
//! Helmholtz kernel by azimuthal quadrature.
//!
//! Both kernels are the `cos φ` azimuthal mode of the free-space Green
//! function, `𝒢 = (1/4π)∫₀^{2π} cos φ / R dφ` and
//! `𝒢_k = (1/4π)∫₀^{2π} e^{−ikR} cos φ / R dφ`. Gradients are taken with
//! respect to the source point `(r′, z′)`.
//!
//! The Laplace kernel is written as `𝒢 = 8rr′ P̃(m) / (π S^{3/2})` with
//! `S = (r + r′)² + (z − z′)²`, which stays accurate for small `m` and has
//! the axis limits built in. For the Helmholtz kernel the static part is
//! extracted and the bounded remainder is integrated over `φ`; when the
//! points are far apart in units of the skin depth the full kernel is
//! integrated directly instead, since the extracted form would then be a
//! difference of two nearly equal terms.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_01, QuadRule};
use crate::specfun::ring_function;

/// Vacuum permeability (H/m).
pub const MU0: f64 = 4.0e-7 * PI;

/// Point in the meridian half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeridianPoint {
    pub r: f64,
    pub z: f64,
}

impl MeridianPoint {
    pub fn new(r: f64, z: f64) -> Self {
        MeridianPoint { r, z }
    }
}

/// Complex wavenumber of the conducting region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber(Complex64);

impl Wavenumber {
    pub const ZERO: Wavenumber = Wavenumber(Complex64::new(0.0, 0.0));

    /// Wrap a wavenumber; requires `Re k > 0` and `Im k ≤ 0`, or `k = 0`.
    pub fn new(k: Complex64) -> Result<Self> {
        let zero = k.re == 0.0 && k.im == 0.0;
        if !(zero || (k.re > 0.0 && k.im <= 0.0)) || !k.is_finite() {
            return Err(Error::domain("Wavenumber", format!("k = {k}")));
        }
        Ok(Wavenumber(k))
    }

    /// `k = √(−iωμ₀μ_rσ)` on the principal branch.
    pub fn from_material(omega: f64, mu_r: f64, sigma: f64) -> Result<Self> {
        if !(omega >= 0.0 && mu_r > 0.0 && sigma >= 0.0) {
            return Err(Error::domain(
                "Wavenumber::from_material",
                format!("omega = {omega}, mu_r = {mu_r}, sigma = {sigma}"),
            ));
        }
        let a = (0.5 * omega * MU0 * mu_r * sigma).sqrt();
        Ok(Wavenumber(Complex64::new(a, -a)))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }
}

/// Azimuthal quadrature for the Helmholtz kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiQuadrature {
    /// Composite Gauss–Legendre on `[0, π]` with panels that start at the
    /// near-singular angular scale and double in width, capped by the
    /// oscillation length of `e^{−ikR}`.
    Graded { points_per_panel: usize },
    /// A single Gauss–Legendre rule with the given number of points on
    /// `[0, π]`.
    Fixed { points: usize },
}

impl Default for PhiQuadrature {
    fn default() -> Self {
        PhiQuadrature::Graded {
            points_per_panel: 10,
        }
    }
}

impl PhiQuadrature {
    fn validate(&self) -> Result<()> {
        match *self {
            PhiQuadrature::Graded { points_per_panel } if !(4..=64).contains(&points_per_panel) => Err(
                Error::domain("PhiQuadrature", format!("{points_per_panel} points per panel")),
            ),
            PhiQuadrature::Fixed { points } if !(8..=256).contains(&points) => {
                Err(Error::domain("PhiQuadrature", format!("{points} points")))
            }
            _ => Ok(()),
        }
    }
}

/// Point count for a fixed azimuthal rule that resolves the oscillation of
/// `e^{−ikR}`: `max(24, ⌈10|k|(r + r′ + |z − z′|)⌉)`, capped at 256.
pub fn default_n_phi(x: MeridianPoint, y: MeridianPoint, k: Wavenumber) -> usize {
    let span = x.r + y.r + (x.z - y.z).abs();
    let n = (10.0 * k.value().norm() * span).ceil();
    (n.max(24.0) as usize).min(256)
}

/// Kernel value with its source-point gradient.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelValues<T> {
    pub g: T,
    pub d_rp: T,
    pub d_zp: T,
}

impl<T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>> KernelValues<T> {
    /// `n_r ∂_{r′} + n_z ∂_{z′}`.
    pub fn normal_derivative(&self, n: (f64, f64)) -> T {
        self.d_rp * n.0 + self.d_zp * n.1
    }
}

impl From<KernelValues<f64>> for KernelValues<Complex64> {
    fn from(v: KernelValues<f64>) -> Self {
        KernelValues {
            g: v.g.into(),
            d_rp: v.d_rp.into(),
            d_zp: v.d_zp.into(),
        }
    }
}

/// Field and source radii with their difference vector, `dr = r − r′` and
/// `dz = z − z′`, supplied separately so that callers with nearly coincident
/// points can pass differences computed without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub r: f64,
    pub rp: f64,
    pub dr: f64,
    pub dz: f64,
}

impl Separation {
    pub fn new(x: MeridianPoint, y: MeridianPoint) -> Self {
        Separation {
            r: x.r,
            rp: y.r,
            dr: x.r - y.r,
            dz: x.z - y.z,
        }
    }

    pub fn dist2(&self) -> f64 {
        self.dr * self.dr + self.dz * self.dz
    }

    fn check(&self) -> Result<()> {
        if self.r > 0.0 && self.rp > 0.0 && self.dist2() == 0.0 {
            return Err(Error::SingularEvaluation { r: self.r, z: 0.0 });
        }
        Ok(())
    }
}

/// Elliptic parameter `m = 4rr′ / ((r + r′)² + (z − z′)²)`.
pub fn modulus_m(x: MeridianPoint, y: MeridianPoint) -> Result<f64> {
    let s = (x.r + y.r).powi(2) + (x.z - y.z).powi(2);
    if s == 0.0 {
        return Err(Error::domain("modulus_m", "both points at the origin"));
    }
    Ok(4.0 * x.r * y.r / s)
}

/// Laplace ring kernel `𝒢(x, y)`.
pub fn laplace_kernel(x: MeridianPoint, y: MeridianPoint) -> Result<f64> {
    let s = Separation::new(x, y);
    s.check().map_err(|_| Error::SingularEvaluation { r: x.r, z: x.z })?;
    Ok(laplace_values(&s).g)
}

/// `(∂_{r′}𝒢, ∂_{z′}𝒢)`.
pub fn laplace_kernel_grad(x: MeridianPoint, y: MeridianPoint) -> Result<(f64, f64)> {
    let s = Separation::new(x, y);
    s.check().map_err(|_| Error::SingularEvaluation { r: x.r, z: x.z })?;
    let v = laplace_values(&s);
    Ok((v.d_rp, v.d_zp))
}

/// Helmholtz ring kernel `𝒢_k(x, y)`.
pub fn helmholtz_kernel(
    x: MeridianPoint,
    y: MeridianPoint,
    k: Wavenumber,
    phi: PhiQuadrature,
) -> Result<Complex64> {
    let s = Separation::new(x, y);
    s.check().map_err(|_| Error::SingularEvaluation { r: x.r, z: x.z })?;
    phi.validate()?;
    Ok(helmholtz_values(&s, k.value(), &phi).g)
}

/// `(∂_{r′}𝒢_k, ∂_{z′}𝒢_k)`.
pub fn helmholtz_kernel_grad(
    x: MeridianPoint,
    y: MeridianPoint,
    k: Wavenumber,
    phi: PhiQuadrature,
) -> Result<(Complex64, Complex64)> {
    let s = Separation::new(x, y);
    s.check().map_err(|_| Error::SingularEvaluation { r: x.r, z: x.z })?;
    phi.validate()?;
    let v = helmholtz_values(&s, k.value(), &phi);
    Ok((v.d_rp, v.d_zp))
}

/// Laplace kernel and gradient. The caller guarantees that the points are
/// distinct whenever both radii are positive.
pub fn laplace_values(s: &Separation) -> KernelValues<f64> {
    let (r, rp, dz) = (s.r, s.rp, s.dz);
    if r == 0.0 {
        return KernelValues::default();
    }
    let big_s = (r + rp).powi(2) + dz * dz;
    let m = 4.0 * r * rp / big_s;
    let mc = s.dist2() / big_s;
    let (pt, dpt) = ring_function(m, mc);
    let s32 = big_s * big_s.sqrt();
    let c = 8.0 / PI;
    let rrp = r * rp;
    let m_rp = 4.0 * r * (s.dr * (r + rp) + dz * dz) / (big_s * big_s);
    let m_zp = 8.0 * rrp * dz / (big_s * big_s);
    KernelValues {
        g: c * rrp * pt / s32,
        d_rp: c * (r * pt / s32 - 3.0 * rrp * (r + rp) * pt / (s32 * big_s)
            + rrp * dpt * m_rp / s32),
        d_zp: c * rrp * (3.0 * dz * pt / (s32 * big_s) + dpt * m_zp / s32),
    }
}

fn panel_rule(n: usize) -> &'static QuadRule {
    static RULES: OnceLock<Vec<QuadRule>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        (0..=128)
            .map(|n| {
                if n == 0 {
                    QuadRule {
                        nodes: vec![],
                        weights: vec![],
                        complements: vec![],
                    }
                } else {
                    gauss_legendre_01(n).expect("n in range")
                }
            })
            .collect()
    });
    &rules[n]
}

/// `e^w − 1` without cancellation for small `|w|`.
#[inline]
fn expm1_complex(w: Complex64) -> Complex64 {
    let (sy, cy) = w.im.sin_cos();
    let sh = (0.5 * w.im).sin();
    Complex64::new(w.re.exp_m1() * cy - 2.0 * sh * sh, w.re.exp() * sy)
}

/// `(−1)ⁿ (n + 1)/(n + 2)!` for the series of `q₂` about zero.
const Q2_SERIES: [f64; 10] = [
    0.5,
    -1.0 / 3.0,
    1.0 / 8.0,
    -1.0 / 30.0,
    1.0 / 144.0,
    -1.0 / 840.0,
    1.0 / 5760.0,
    -1.0 / 45360.0,
    1.0 / 403200.0,
    -1.0 / 3991680.0,
];

/// `q₁ = (e^{−z} − 1)/z` and `q₂ = (1 − (1 + z)e^{−z})/z²`.
#[inline]
fn extraction_factors(z: Complex64) -> (Complex64, Complex64) {
    let em1 = expm1_complex(-z);
    let q1 = em1 / z;
    let q2 = if z.norm_sqr() < 0.01 {
        let mut acc = Complex64::new(Q2_SERIES[9], 0.0);
        for &c in Q2_SERIES[..9].iter().rev() {
            acc = acc * z + c;
        }
        acc
    } else {
        (-q1 - 1.0 - em1) / z
    };
    (q1, q2)
}

/// Largest change of `kR` across one azimuthal panel, for the bounded
/// remainder and for the full kernel.
const PANEL_PHASE_REMAINDER: f64 = 6.0;
const PANEL_PHASE_DIRECT: f64 = 2.0;

/// Damping exponent beyond which the static part is not extracted.
const DIRECT_DAMPING: f64 = 2.0;

/// Helmholtz kernel and gradient. Same precondition as [`laplace_values`].
pub fn helmholtz_values(s: &Separation, k: Complex64, phi: &PhiQuadrature) -> KernelValues<Complex64> {
    let (r, rp) = (s.r, s.rp);
    if k.re == 0.0 && k.im == 0.0 {
        return laplace_values(s).into();
    }
    if r == 0.0 {
        return KernelValues::default();
    }
    let ik = Complex64::new(-k.im, k.re);
    if rp == 0.0 {
        let chi = (r * r + s.dz * s.dz).sqrt();
        let z = ik * chi;
        return KernelValues {
            g: Complex64::new(0.0, 0.0),
            d_rp: (1.0 + z) * (-z).exp() * (r / (4.0 * chi.powi(3))),
            d_zp: Complex64::new(0.0, 0.0),
        };
    }
    let d2 = s.dist2();
    let d = d2.sqrt();
    let damping = -k.im;
    let direct = damping * d > DIRECT_DAMPING;
    let four_rrp = 4.0 * r * rp;

    let mut g = Complex64::new(0.0, 0.0);
    let mut d_rp = Complex64::new(0.0, 0.0);
    let mut d_zp = Complex64::new(0.0, 0.0);
    let mut panel = |a: f64, b: f64, rule: &QuadRule| {
        let h = b - a;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let ph = a + h * t;
            let sh = (0.5 * ph).sin();
            let s2 = sh * sh;
            let big_r = (d2 + four_rrp * s2).sqrt();
            let c = 1.0 - 2.0 * s2;
            let wc = w * h * c;
            let z = ik * big_r;
            let lever = -s.dr + 2.0 * r * s2;
            if direct {
                let e = (-z).exp();
                let f = (1.0 + z) * e * (wc / (big_r * big_r * big_r));
                g += e * (wc / big_r);
                d_rp -= f * lever;
                d_zp += f * s.dz;
            } else {
                let (q1, q2) = extraction_factors(z);
                let f = ik * ik * q2 * (wc / big_r);
                g += ik * q1 * wc;
                d_rp += f * lever;
                d_zp -= f * s.dz;
            }
        }
    };

    match *phi {
        PhiQuadrature::Fixed { points } => {
            let panels = points.div_ceil(64);
            let rule = panel_rule(points.div_ceil(panels));
            let h = PI / panels as f64;
            for j in 0..panels {
                panel(j as f64 * h, (j + 1) as f64 * h, rule);
            }
        }
        PhiQuadrature::Graded { points_per_panel } => {
            let rule = panel_rule(points_per_panel);
            let root = (r * rp).sqrt();
            let kabs = k.norm();
            let dist = |a: f64| {
                let sh = (0.5 * a).sin();
                (d2 + four_rrp * sh * sh).sqrt()
            };
            // end of the panel from `a` over which |k|·ΔR reaches the phase limit
            let phase_end = |a: f64| {
                let rt = dist(a) + PANEL_PHASE_DIRECT / kabs;
                let s2 = (rt * rt - d2) / four_rrp;
                if s2 >= 1.0 {
                    PI
                } else {
                    2.0 * s2.sqrt().asin()
                }
            };
            let cap = if direct { PANEL_PHASE_DIRECT } else { PANEL_PHASE_REMAINDER } / (kabs * root);
            let mut width = (d / root).min(0.5 * cap).clamp(1e-9, PI);
            let mut a = 0.0;
            while a < PI {
                let mut b = (a + width).min(PI);
                if PI - b < 0.25 * width {
                    b = PI;
                }
                panel(a, b, rule);
                a = b;
                let big_r = dist(a);
                width *= 2.0;
                if direct {
                    if damping * (big_r - d) > 46.0 {
                        break;
                    }
                    width = width.min(phase_end(a) - a);
                } else if damping * big_r <= 40.0 {
                    width = width.min(cap);
                }
            }
        }
    }
    let scale = 1.0 / (2.0 * PI);
    let (g, d_rp, d_zp) = (g * scale, d_rp * scale, d_zp * scale);
    if direct {
        KernelValues { g, d_rp, d_zp }
    } else {
        let lap = laplace_values(s);
        KernelValues {
            g: g + lap.g,
            d_rp: d_rp + lap.d_rp,
            d_zp: d_zp + lap.d_zp,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use axibem_oracle::kernels::{ring_kernel_phi, Sep};
    use axibem_oracle::quad::Tolerance;
    use proptest::prelude::*;

    fn p(r: f64, z: f64) -> MeridianPoint {
        MeridianPoint::new(r, z)
    }

    fn kw(a: f64) -> Wavenumber {
        Wavenumber::new(Complex64::new(a, -a)).unwrap()
    }

    fn oracle(x: MeridianPoint, y: MeridianPoint, k: Complex64) -> [Complex64; 3] {
        ring_kernel_phi(Sep::new(x.r, x.z, y.r, y.z), k, Tolerance::rel(1e-14))
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(modulus_m(p(1.0, 0.0), p(1.0, 2.0)).unwrap(), 0.5);
        assert_eq!(modulus_m(p(0.0, 0.0), p(1.0, 2.0)).unwrap(), 0.0);
        assert!((modulus_m(p(2.0, 1.0), p(3.0, 0.0)).unwrap() - 24.0 / 26.0).abs() < 1e-15);
        assert!(modulus_m(p(0.0, 1.0), p(0.0, 1.0)).is_err());
    }

    #[test]
    fn wavenumber_branch() {
        let k = Wavenumber::from_material(2.0 * PI * 1e3, 1.0, 1e6).unwrap().value();
        assert!(k.re > 0.0 && (k.re + k.im).abs() < 1e-12 * k.re);
        let k2 = k * k;
        let target = -2.0 * PI * 1e3 * MU0 * 1e6;
        assert!(k2.re.abs() < 1e-9 * target.abs());
        assert!((k2.im - target).abs() < 1e-12 * target.abs());
        assert!(Wavenumber::new(Complex64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn laplace_axis_and_oracle() {
        assert_eq!(laplace_kernel(p(0.0, 0.0), p(1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(laplace_kernel_grad(p(0.0, 0.0), p(1.0, 1.0)).unwrap(), (0.0, 0.0));
        let (gr, gz) = laplace_kernel_grad(p(1.0, 0.0), p(0.0, 0.0)).unwrap();
        assert!((gr - 0.25).abs() < 1e-15 && gz == 0.0);
        let x = p(1.0, 0.0);
        let y = p(2.0, 0.5);
        let o = oracle(x, y, Complex64::new(0.0, 0.0));
        let g = laplace_kernel(x, y).unwrap();
        assert!((g - o[0].re).abs() < 1e-13 * g.abs());
        let (gr, gz) = laplace_kernel_grad(x, y).unwrap();
        assert!((gr - o[1].re).abs() < 1e-12 * gr.abs());
        assert!((gz - o[2].re).abs() < 1e-12 * gz.abs());
        assert!(laplace_kernel(x, x).is_err());
        assert!(laplace_kernel_grad(x, x).is_err());
    }

    #[test]
    fn laplace_gradient_finite_differences() {
        let x = p(1.0, 0.0);
        let h = 1e-6;
        let (gr, gz) = laplace_kernel_grad(x, p(2.0, 0.5)).unwrap();
        let fr = (laplace_kernel(x, p(2.0 + h, 0.5)).unwrap() - laplace_kernel(x, p(2.0 - h, 0.5)).unwrap())
            / (2.0 * h);
        let fz = (laplace_kernel(x, p(2.0, 0.5 + h)).unwrap() - laplace_kernel(x, p(2.0, 0.5 - h)).unwrap())
            / (2.0 * h);
        assert!((gr - fr).abs() < 1e-6);
        assert!((gz - fz).abs() < 1e-6);
    }

    #[test]
    fn helmholtz_static_limit() {
        let x = p(1.0, 0.0);
        let y = p(2.0, 0.5);
        let phi = PhiQuadrature::default();
        let g = helmholtz_kernel(x, y, Wavenumber::ZERO, phi).unwrap();
        assert_eq!(g.re, laplace_kernel(x, y).unwrap());
        assert_eq!(g.im, 0.0);
        let (a, b) = helmholtz_kernel_grad(x, y, Wavenumber::ZERO, phi).unwrap();
        let (c, d) = laplace_kernel_grad(x, y).unwrap();
        assert_eq!((a.re, b.re), (c, d));
        assert_eq!(helmholtz_kernel(p(0.0, 1.0), y, kw(5.0), phi).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(helmholtz_kernel(y, p(0.0, 1.0), kw(5.0), phi).unwrap(), Complex64::new(0.0, 0.0));
        let (gr, gz) = helmholtz_kernel_grad(p(3.0, 4.0), p(0.0, 0.0), Wavenumber::ZERO, phi).unwrap();
        assert!((gr.re - 0.006).abs() < 1e-16 && gz == Complex64::new(0.0, 0.0));
    }

    #[test]
    fn helmholtz_matches_oracle() {
        let x = p(1.0, 0.0);
        let y = p(2.0, 0.5);
        for k in [kw(50.0), kw(0.3), kw(3.0)] {
            let o = oracle(x, y, k.value());
            for phi in [PhiQuadrature::default(), PhiQuadrature::Fixed { points: 256 }] {
                let g = helmholtz_kernel(x, y, k, phi).unwrap();
                let (gr, gz) = helmholtz_kernel_grad(x, y, k, phi).unwrap();
                assert!((g - o[0]).norm() < 1e-10 * o[0].norm(), "{k:?} {phi:?}: {g} {}", o[0]);
                assert!((gr - o[1]).norm() < 1e-10 * o[1].norm(), "{k:?} {phi:?}");
                assert!((gz - o[2]).norm() < 1e-10 * o[2].norm(), "{k:?} {phi:?}");
            }
        }
    }

    #[test]
    fn helmholtz_axis_source() {
        let k = kw(0.7);
        let x = p(3.0, 4.0);
        let (gr, gz) = helmholtz_kernel_grad(x, p(0.0, 0.0), k, PhiQuadrature::default()).unwrap();
        let chi = 5.0;
        let ikc = Complex64::new(0.0, 1.0) * k.value() * chi;
        let expect = (1.0 + ikc) * (-ikc).exp() * (3.0 / (4.0 * 125.0));
        assert!((gr - expect).norm() < 1e-15);
        assert_eq!(gz, Complex64::new(0.0, 0.0));
        // the limit is continuous
        let (gr2, _) = helmholtz_kernel_grad(x, p(1e-7, 0.0), k, PhiQuadrature::default()).unwrap();
        assert!((gr2 - expect).norm() < 1e-8 * expect.norm());
    }

    #[test]
    fn helmholtz_gradient_finite_differences() {
        let k = kw(30.0);
        let phi = PhiQuadrature::default();
        let x = p(0.4, 0.1);
        let y = p(0.45, 0.13);
        let h = 1e-6;
        let g = |y: MeridianPoint| helmholtz_kernel(x, y, k, phi).unwrap();
        let (gr, gz) = helmholtz_kernel_grad(x, y, k, phi).unwrap();
        let fr = (g(p(y.r + h, y.z)) - g(p(y.r - h, y.z))) / (2.0 * h);
        let fz = (g(p(y.r, y.z + h)) - g(p(y.r, y.z - h))) / (2.0 * h);
        assert!((gr - fr).norm() < 1e-6 * gr.norm().max(1.0), "{gr} {fr}");
        assert!((gz - fz).norm() < 1e-6 * gz.norm().max(1.0), "{gz} {fz}");
    }

    #[test]
    fn helmholtz_small_k_continuity() {
        let x = p(1.0, 0.0);
        let y = p(1.5, 0.7);
        let phi = PhiQuadrature::default();
        let g0 = laplace_kernel(x, y).unwrap();
        for a in [1e-3, 1e-4] {
            let gk = helmholtz_kernel(x, y, kw(a), phi).unwrap();
            assert!((gk - g0).norm() <= 2.0 * a * 2f64.sqrt());
        }
    }

    #[test]
    fn direct_and_extracted_forms_agree() {
        // straddle the switch between the two evaluation paths
        let x = p(0.01, 0.0);
        let k = kw(1000.0);
        for dz in [1.9e-3, 2.1e-3] {
            let y = p(0.01, dz);
            let s = Separation::new(x, y);
            let a = helmholtz_values(&s, k.value(), &PhiQuadrature::default());
            let o = oracle(x, y, k.value());
            assert!((a.g - o[0]).norm() < 1e-11 * o[0].norm());
            assert!((a.d_zp - o[2]).norm() < 1e-11 * o[2].norm());
        }
    }

    #[test]
    fn log_singularity_structure() {
        let x = p(1.0, 0.0);
        let mut prev = f64::NAN;
        for j in 1..12 {
            let eps = 10f64.powi(-j);
            let rp = 1.0 + 0.6 * eps;
            let y = p(rp, 0.8 * eps);
            let mc = eps * eps / ((1.0 + rp).powi(2) + 0.64 * eps * eps);
            let b = laplace_kernel(x, y).unwrap() + 0.5 * mc.ln() / (2.0 * PI * rp.sqrt());
            assert!(b.abs() < 1.0, "eps = {eps}: {b}");
            if j > 6 {
                assert!((b - prev).abs() < 1e-5, "eps = {eps}: {b} vs {prev}");
            }
            prev = b;
        }
    }

    proptest! {
        #[test]
        fn swap_symmetry(r in 0.1..2.0f64, rp in 0.1..2.0f64, dz in -1.0..1.0f64) {
            prop_assume!((r - rp).hypot(dz) > 1e-3);
            let x = p(r, 0.0);
            let y = p(rp, dz);
            let a = laplace_kernel(x, y).unwrap();
            let b = laplace_kernel(y, x).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
            let k = kw(4.0);
            let phi = PhiQuadrature::default();
            let c = helmholtz_kernel(x, y, k, phi).unwrap();
            let d = helmholtz_kernel(y, x, k, phi).unwrap();
            prop_assert!((c - d).norm() <= 1e-12 * c.norm());
        }

        #[test]
        fn axis_vanishing(rp in 0.1..2.0f64, dz in -1.0..1.0f64) {
            let k = kw(3.0);
            let phi = PhiQuadrature::default();
            let v = helmholtz_values(&Separation::new(p(0.0, 0.0), p(rp, dz)), k.value(), &phi);
            prop_assert_eq!(v, KernelValues::default());
            let w = helmholtz_values(&Separation::new(p(rp, dz), p(0.0, 0.0)), k.value(), &phi);
            prop_assert_eq!(w.g, Complex64::new(0.0, 0.0));
            prop_assert_eq!(w.d_zp, Complex64::new(0.0, 0.0));
        }
    }
}
