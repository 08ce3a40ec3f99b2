//! Ring kernels by direct adaptive integration over the azimuth, plus an
//! arithmetic–geometric-mean closed form used inside the pair integrals.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::quad::{integrate_vec, Tolerance};

/// Separation of a field point `(r, z)` and a source point `(r', z')`.
#[derive(Debug, Clone, Copy)]
pub struct Sep {
    pub r: f64,
    pub rp: f64,
    /// r − r′
    pub dr: f64,
    /// z − z′
    pub dz: f64,
}

impl Sep {
    pub fn new(r: f64, z: f64, rp: f64, zp: f64) -> Self {
        Sep {
            r,
            rp,
            dr: r - rp,
            dz: z - zp,
        }
    }

    fn big_r(&self, phi: f64) -> f64 {
        let s = (0.5 * phi).sin();
        (self.dr * self.dr + self.dz * self.dz + 4.0 * self.r * self.rp * s * s).sqrt()
    }

    /// Break points on `[0, π]` clustered toward the near-singular angle.
    fn breaks(&self) -> Vec<f64> {
        let d = (self.dr * self.dr + self.dz * self.dz).sqrt();
        let s = (self.r * self.rp).sqrt();
        let mut b = vec![0.0];
        let mut x = (d / s).max(1e-12);
        while x < PI {
            b.push(x);
            x *= 2.0;
        }
        b.push(PI);
        b
    }
}

/// `(G, ∂_{r′}G, ∂_{z′}G)` of the full kernel `e^{−ikR}/R`, integrated over the
/// azimuth with `(1/4π)∫₀^{2π} … cos φ dφ`.
pub fn ring_kernel_phi(s: Sep, k: Complex64, tol: Tolerance) -> [Complex64; 3] {
    if s.r == 0.0 || s.rp == 0.0 {
        // integrand is independent of φ apart from cos φ, which integrates to zero
        // for G and ∂z′; ∂r′ keeps the r cos²φ term
        let chi = (s.r * s.r + s.dz * s.dz).sqrt();
        let ikc = Complex64::new(0.0, 1.0) * k * chi;
        let d_rp = if s.rp == 0.0 && s.r > 0.0 {
            (1.0 + ikc) * (-ikc).exp() * (s.r / (4.0 * chi.powi(3)))
        } else {
            Complex64::new(0.0, 0.0)
        };
        return [Complex64::new(0.0, 0.0), d_rp, Complex64::new(0.0, 0.0)];
    }
    let ik = Complex64::new(0.0, 1.0) * k;
    let v = integrate_vec(
        |phi| {
            let big_r = s.big_r(phi);
            let c = phi.cos();
            let e = (-ik * big_r).exp();
            let g = e * (c / big_r);
            let f = (1.0 + ik * big_r) * e * (c / big_r.powi(3));
            let rp_minus_rcos = s.rp - s.r * c;
            vec![g, -f * rp_minus_rcos, f * s.dz]
        },
        &s.breaks(),
        tol,
    );
    let scale = 1.0 / (2.0 * PI);
    [v[0] * scale, v[1] * scale, v[2] * scale]
}

/// Laplace values `(G, ∂_{r′}G, ∂_{z′}G)` by azimuthal integration.
pub fn laplace_phi(s: Sep, tol: Tolerance) -> [f64; 3] {
    let v = ring_kernel_phi(s, Complex64::new(0.0, 0.0), tol);
    [v[0].re, v[1].re, v[2].re]
}

/// Complete elliptic integrals by the arithmetic–geometric mean, given `m`
/// and `1 − m`.
pub fn agm_ke(m: f64, mc: f64) -> (f64, f64) {
    let mut a = 1.0_f64;
    let mut b = mc.sqrt();
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..60 {
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
        if c.abs() <= 1e-17 * a {
            break;
        }
    }
    let k = PI / (2.0 * a);
    (k, k * (1.0 - sum))
}

/// Laplace kernel and gradient from the elliptic closed form with AGM
/// elliptic integrals and the classical derivative formulas.
pub fn laplace_agm(s: Sep) -> [f64; 3] {
    let (r, rp, dz) = (s.r, s.rp, s.dz);
    if r == 0.0 {
        return [0.0; 3];
    }
    if rp == 0.0 {
        let chi = (r * r + dz * dz).sqrt();
        return [0.0, r / (4.0 * chi.powi(3)), 0.0];
    }
    let big_s = (r + rp).powi(2) + dz * dz;
    let m = 4.0 * r * rp / big_s;
    let mc = (s.dr * s.dr + dz * dz) / big_s;
    let (k, e) = agm_ke(m, mc);
    let mrr = m * r * rp;
    let g = ((1.0 - 0.5 * m) * k - e) / (PI * mrr.sqrt());
    let m_rp = 4.0 * r * (s.dr * (r + rp) + dz * dz) / (big_s * big_s);
    let m_zp = 8.0 * r * rp * dz / (big_s * big_s);
    let bracket = mc * k + (0.5 * m - 1.0) * e;
    let d_rp = r / (2.0 * PI * mrr.powf(1.5))
        * (m * ((0.5 * m - 1.0) * k + e) - m_rp * rp / mc * bracket);
    let d_zp = -m_zp * r * rp / (2.0 * PI * mc * mrr.powf(1.5)) * bracket;
    [g, d_rp, d_zp]
}

/// Helmholtz kernel and gradient as the AGM Laplace part plus the azimuthal
/// integral of the bounded remainder.
pub fn helmholtz_split(s: Sep, k: Complex64, tol: Tolerance) -> [Complex64; 3] {
    if s.r == 0.0 || s.rp == 0.0 {
        return ring_kernel_phi(s, k, tol);
    }
    let lap = laplace_agm(s);
    let rem = helmholtz_remainder(s, k, tol);
    [lap[0] + rem[0], lap[1] + rem[1], lap[2] + rem[2]]
}

/// Helmholtz kernel and gradient minus their Laplace counterparts.
pub fn helmholtz_remainder(s: Sep, k: Complex64, tol: Tolerance) -> [Complex64; 3] {
    let zero = Complex64::new(0.0, 0.0);
    if k == zero {
        return [zero; 3];
    }
    if s.r == 0.0 || s.rp == 0.0 {
        let full = ring_kernel_phi(s, k, tol);
        let lap = laplace_agm(s);
        return [full[0] - lap[0], full[1] - lap[1], full[2] - lap[2]];
    }
    let ik = Complex64::new(0.0, 1.0) * k;
    let v = integrate_vec(
        |phi| {
            let big_r = s.big_r(phi);
            let c = phi.cos();
            let z = ik * big_r;
            let e = (-z).exp();
            let (q1, q2) = if z.norm() < 0.5 {
                let mut t1 = Complex64::new(-1.0, 0.0);
                let mut t2 = Complex64::new(0.5, 0.0);
                let mut s1 = t1;
                let mut s2 = t2;
                for n in 2..30 {
                    let nf = n as f64;
                    t1 = -t1 * z / nf;
                    s1 += t1;
                    t2 = -t2 * z * nf / ((nf + 1.0) * (nf - 1.0));
                    s2 += t2;
                }
                (s1, s2)
            } else {
                ((e - 1.0) / z, (1.0 - (1.0 + z) * e) / (z * z))
            };
            let g = ik * q1 * c;
            let f = ik * ik * q2 * (c / big_r);
            let rp_minus_rcos = -s.dr + 2.0 * s.r * (0.5 * phi).sin().powi(2);
            vec![g, f * rp_minus_rcos, -f * s.dz]
        },
        &s.breaks(),
        tol,
    );
    let scale = 1.0 / (2.0 * PI);
    [v[0] * scale, v[1] * scale, v[2] * scale]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agm_values() {
        let (k, e) = agm_ke(0.5, 0.5);
        assert!((k - 1.854074677301372).abs() < 1e-14);
        assert!((e - 1.350643881047676).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_azimuthal_integral() {
        let s = Sep::new(1.0, 0.0, 2.0, 0.5);
        let a = laplace_agm(s);
        let b = laplace_phi(s, Tolerance::default());
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-12 * a[i].abs().max(1e-3), "{i}: {a:?} {b:?}");
        }
    }

    #[test]
    fn split_matches_direct() {
        let s = Sep::new(1.0, 0.0, 1.2, 0.1);
        let k = Complex64::new(3.0, -3.0);
        let a = helmholtz_split(s, k, Tolerance::default());
        let b = ring_kernel_phi(s, k, Tolerance::default());
        for i in 0..3 {
            assert!((a[i] - b[i]).norm() < 1e-11 * b[i].norm(), "{i}: {a:?} {b:?}");
        }
    }
}
