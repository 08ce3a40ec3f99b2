//! Special functions used by the ring kernels and the coil source fields.
//!
//! Elliptic integrals use the *parameter* convention `m = k²` throughout and
//! are evaluated through Carlson's symmetric integrals `R_F` and `R_D`, which
//! keeps the accuracy uniform up to `m → 1` as long as the complementary
//! parameter `1 − m` is supplied without cancellation.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Complete elliptic integrals of the first and second kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPair {
    /// K(m)
    pub k: f64,
    /// E(m)
    pub e: f64,
}

/// Carlson's symmetric integral of the first kind,
/// `R_F(x,y,z) = ½ ∫₀^∞ dt / √((t+x)(t+y)(t+z))`.
///
/// At most one argument may be zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    const ERRTOL: f64 = 0.0015;
    let (mut x, mut y, mut z) = (x, y, z);
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        let ave = (x + y + z) / 3.0;
        let dx = (ave - x) / ave;
        let dy = (ave - y) / ave;
        let dz = (ave - z) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) < ERRTOL {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / ave.sqrt();
        }
    }
}

/// Carlson's symmetric integral of the second kind,
/// `R_D(x,y,z) = 3/2 ∫₀^∞ dt / ((t+z)√((t+x)(t+y)(t+z)))`.
///
/// `x` and `y` may not both be zero; `z` must be positive.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    const ERRTOL: f64 = 0.0010;
    const C1: f64 = 3.0 / 14.0;
    const C2: f64 = 1.0 / 6.0;
    const C3: f64 = 9.0 / 22.0;
    const C4: f64 = 3.0 / 26.0;
    const C5: f64 = 0.25 * C3;
    const C6: f64 = 1.5 * C4;
    let (mut x, mut y, mut z) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lambda));
        fac *= 0.25;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        let ave = 0.2 * (x + y + 3.0 * z);
        let dx = (ave - x) / ave;
        let dy = (ave - y) / ave;
        let dz = (ave - z) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) < ERRTOL {
            let ea = dx * dy;
            let eb = dz * dz;
            let ec = ea - eb;
            let ed = ea - 6.0 * eb;
            let ee = ed + ec + ec;
            return 3.0 * sum
                + fac
                    * (1.0
                        + ed * (-C1 + C5 * ed - C6 * dz * ee)
                        + dz * (C2 * ee + dz * (-C3 * ec + dz * C4 * ea)))
                    / (ave * ave.sqrt());
        }
    }
}

/// Complete elliptic integrals `K(m)`, `E(m)` for `0 ≤ m < 1`.
pub fn complete_elliptic(m: f64) -> Result<EllipticPair> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::domain("complete_elliptic", format!("m = {m} not in [0,1)")));
    }
    Ok(complete_elliptic_comp(m, 1.0 - m))
}

/// `K` and `E` given both the parameter and its complement. Callers that know
/// `1 − m` analytically should pass it here to keep full relative accuracy
/// near the logarithmic singularity at `m = 1`.
pub(crate) fn complete_elliptic_comp(m: f64, mc: f64) -> EllipticPair {
    if m == 0.0 {
        return EllipticPair {
            k: FRAC_PI_2,
            e: FRAC_PI_2,
        };
    }
    let rf = carlson_rf(0.0, mc, 1.0);
    let rd = carlson_rd(0.0, mc, 1.0);
    EllipticPair {
        k: rf,
        e: rf - m * rd / 3.0,
    }
}

/// Incomplete elliptic integrals `F(β | m′)` and `E(β | m′)` for
/// `|β| ≤ π/2`, `0 ≤ m′ ≤ 1`. Both are odd in `β`.
pub fn incomplete_elliptic(beta: f64, mprime: f64) -> Result<(f64, f64)> {
    if !(beta.abs() <= FRAC_PI_2 + 4.0 * f64::EPSILON) || !(0.0..=1.0).contains(&mprime) {
        return Err(Error::domain(
            "incomplete_elliptic",
            format!("beta = {beta}, m' = {mprime}"),
        ));
    }
    let beta = beta.clamp(-FRAC_PI_2, FRAC_PI_2);
    if beta == 0.0 {
        return Ok((0.0, 0.0));
    }
    if mprime == 0.0 {
        return Ok((beta, beta));
    }
    let (s, c) = beta.sin_cos();
    let c2 = c * c;
    let d = (1.0 - mprime * s * s).max(0.0);
    if c2 == 0.0 && d == 0.0 {
        // F(±π/2 | 1) diverges, E(±π/2 | 1) = ±1
        return Ok((f64::INFINITY.copysign(beta), s));
    }
    let rf = carlson_rf(c2, d, 1.0);
    let rd = carlson_rd(c2, d, 1.0);
    let f = s * rf;
    let e = f - mprime * s * s * s * rd / 3.0;
    Ok((f, e))
}

/// Heuman's Lambda function
/// `Λ₀(β, α) = (2/π)[E(α)F(β|α′) + K(α)E(β|α′) − K(α)F(β|α′)]`, `α′ = 1 − α`.
pub fn heuman_lambda(beta: f64, alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::domain("heuman_lambda", format!("alpha = {alpha} not in [0,1)")));
    }
    heuman_lambda_comp(beta, alpha, 1.0 - alpha)
}

/// Heuman's Lambda with the complementary parameter supplied directly.
pub(crate) fn heuman_lambda_comp(beta: f64, alpha: f64, alpha_c: f64) -> Result<f64> {
    let ke = complete_elliptic_comp(alpha, alpha_c);
    let (f, e) = incomplete_elliptic(beta, alpha_c)?;
    // K − E vanishes exactly at α = 0 where F(π/2 | 1) is infinite
    let k_minus_e = ke.k - ke.e;
    let tail = if k_minus_e == 0.0 { 0.0 } else { k_minus_e * f };
    Ok((2.0 / PI) * (ke.k * e - tail))
}

/// Reduced ring function `P̃(m) = [(1 − m/2)K(m) − E(m)]/m²` and its
/// derivative, given `m` and `mc = 1 − m`.
///
/// The bracket vanishes like `πm²/32` at the origin; below `m = 0.5` it is
/// summed from its hypergeometric series instead of the cancelling
/// difference.
pub(crate) fn ring_function(m: f64, mc: f64) -> (f64, f64) {
    if m < 0.5 {
        // a_n, b_n: series coefficients of 2K/π and 2E/π
        let mut a_prev = 0.25;
        let mut a = 9.0 / 64.0;
        let mut b = -3.0 / 64.0;
        let mut p = 0.0;
        let mut dp = 0.0;
        let mut pow = 1.0;
        let mut pow_d = 0.0;
        for n in 2..200 {
            let c = a - 0.5 * a_prev - b;
            p += c * pow;
            dp += (n - 2) as f64 * c * pow_d;
            if (c * pow).abs() < 1e-18 * p.abs() && n > 4 {
                break;
            }
            let nf = (n + 1) as f64;
            a_prev = a;
            a *= ((nf - 0.5) / nf).powi(2);
            b *= (nf - 1.5) * (nf - 0.5) / (nf * nf);
            pow_d = pow;
            pow *= m;
        }
        (FRAC_PI_2 * p, FRAC_PI_2 * dp)
    } else {
        let ke = complete_elliptic_comp(m, mc);
        let p = (1.0 - 0.5 * m) * ke.k - ke.e;
        let dk = (ke.e - mc * ke.k) / (2.0 * m * mc);
        let de = (ke.e - ke.k) / (2.0 * m);
        let dp = -0.5 * ke.k + (1.0 - 0.5 * m) * dk - de;
        let m2 = m * m;
        (p / m2, dp / m2 - 2.0 * p / (m2 * m))
    }
}

/// Bessel function of the first kind of order 0 or 1.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("bessel_j", format!("x = {x}")));
    }
    let (j0, j1) = bessel_j01(x);
    match order {
        0 => Ok(j0),
        1 => Ok(j1),
        _ => Err(Error::domain("bessel_j", format!("order {order} not supported"))),
    }
}

/// `(J₀(x), J₁(x))` for finite `x`.
pub fn bessel_j01(x: f64) -> (f64, f64) {
    let ax = x.abs();
    let (j0, j1) = if ax < 1e-8 {
        (1.0 - 0.25 * ax * ax, 0.5 * ax)
    } else if ax <= 25.0 {
        miller_j01(ax)
    } else {
        hankel_j01(ax)
    };
    (j0, if x < 0.0 { -j1 } else { j1 })
}

/// Miller's backward recurrence normalised by `J₀ + 2ΣJ₂ₖ = 1`.
fn miller_j01(x: f64) -> (f64, f64) {
    let start = 2 * ((x + 12.0 * x.cbrt() + 30.0) as usize / 2);
    let mut jp1 = 0.0_f64;
    let mut j = 1e-30_f64;
    let mut norm = 0.0;
    let mut j1 = 0.0;
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        let jm1 = k as f64 * two_over_x * j - jp1;
        jp1 = j;
        j = jm1;
        // j now holds J_{k-1}
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * j;
        }
        if k - 1 == 1 {
            j1 = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += j;
    (j / norm, j1 / norm)
}

/// Hankel asymptotic expansion, accurate for large `x`.
fn hankel_j01(x: f64) -> (f64, f64) {
    let eval = |nu: f64| {
        let mu = 4.0 * nu * nu;
        let mut p = 1.0;
        let mut q = 0.0;
        let mut term = 1.0;
        for k in 1..40 {
            let odd = (2 * k - 1) as f64;
            let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
            if next.abs() > term.abs() {
                break;
            }
            term = next;
            match k % 4 {
                1 => q += term,
                2 => p -= term,
                3 => q -= term,
                _ => p += term,
            }
            if term.abs() < 1e-18 {
                break;
            }
        }
        let chi = x - (0.5 * nu + 0.25) * PI;
        (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
    };
    (eval(0.0), eval(1.0))
}

/// The first `count` positive zeros of `J₀`, ascending.
pub fn bessel_j0_zeros(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|j| {
            let beta = (j as f64 - 0.25) * PI;
            let mut z = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta.powi(3));
            for _ in 0..50 {
                let (j0, j1) = bessel_j01(z);
                let dz = j0 / j1;
                z += dz;
                if dz.abs() <= 1e-16 * z {
                    break;
                }
            }
            z
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Arithmetic–geometric mean oracle for K and E.
    fn agm_ke(m: f64) -> (f64, f64) {
        let mut a = 1.0_f64;
        let mut b = (1.0 - m).sqrt();
        let mut c = m.sqrt();
        let mut sum = 0.5 * c * c;
        let mut pow = 0.5;
        for _ in 0..40 {
            if c.abs() <= 1e-17 * a {
                break;
            }
            let an = 0.5 * (a + b);
            let bn = (a * b).sqrt();
            c = 0.5 * (a - b);
            pow *= 2.0;
            sum += pow * c * c;
            a = an;
            b = bn;
        }
        let k = PI / (2.0 * a);
        (k, k * (1.0 - sum))
    }

    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn complete_at_zero_and_half() {
        let p = complete_elliptic(0.0).unwrap();
        assert_eq!(p.k, FRAC_PI_2);
        assert_eq!(p.e, FRAC_PI_2);
        let p = complete_elliptic(0.5).unwrap();
        let (k, e) = agm_ke(0.5);
        assert!((k - 1.854074677301372).abs() < 1e-14);
        assert!((e - 1.350643881047676).abs() < 1e-14);
        assert!((p.k - k).abs() < 1e-14 * k);
        assert!((p.e - e).abs() < 1e-14 * e);
    }

    #[test]
    fn complete_matches_agm_over_range() {
        for i in 0..200 {
            let m = i as f64 / 200.0;
            let p = complete_elliptic(m).unwrap();
            let (k, e) = agm_ke(m);
            assert!((p.k - k).abs() <= 2e-14 * k, "K at m={m}");
            assert!((p.e - e).abs() <= 2e-14 * e, "E at m={m}");
        }
    }

    #[test]
    fn complete_near_one() {
        let p = complete_elliptic(1.0 - 1e-12).unwrap();
        assert!((p.e - 1.0).abs() < 1e-9);
        assert!(p.k > 14.0);
    }

    #[test]
    fn complete_rejects_out_of_domain() {
        assert!(complete_elliptic(1.0).is_err());
        assert!(complete_elliptic(-0.1).is_err());
        assert!(complete_elliptic(f64::NAN).is_err());
    }

    #[test]
    fn incomplete_special_cases() {
        assert_eq!(incomplete_elliptic(0.0, 0.7).unwrap(), (0.0, 0.0));
        assert_eq!(incomplete_elliptic(0.4, 0.0).unwrap(), (0.4, 0.4));
        assert!(incomplete_elliptic(2.0, 0.5).is_err());
        assert!(incomplete_elliptic(0.5, 1.5).is_err());
    }

    #[test]
    fn incomplete_matches_quadrature() {
        let (beta, mp) = (std::f64::consts::FRAC_PI_4, 0.3);
        let f_ref = simpson(&|t: f64| 1.0 / (1.0 - mp * t.sin().powi(2)).sqrt(), 0.0, beta, 4000);
        let e_ref = simpson(&|t: f64| (1.0 - mp * t.sin().powi(2)).sqrt(), 0.0, beta, 4000);
        let (f, e) = incomplete_elliptic(beta, mp).unwrap();
        assert!((f - f_ref).abs() < 1e-12, "{f} {f_ref}");
        assert!((e - e_ref).abs() < 1e-12, "{e} {e_ref}");
        let (fm, em) = incomplete_elliptic(-beta, mp).unwrap();
        assert_eq!((fm, em), (-f, -e));
    }

    #[test]
    fn heuman_identities() {
        let v = heuman_lambda(PI / 6.0, 0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let v = heuman_lambda(FRAC_PI_2, 0.4).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        // Composition from quadrature-evaluated incomplete integrals
        let (beta, alpha): (f64, f64) = (0.7, 0.6);
        let ac = 1.0 - alpha;
        let f_ref = simpson(&|t: f64| 1.0 / (1.0 - ac * t.sin().powi(2)).sqrt(), 0.0, beta, 4000);
        let e_ref = simpson(&|t: f64| (1.0 - ac * t.sin().powi(2)).sqrt(), 0.0, beta, 4000);
        let (k, e) = agm_ke(alpha);
        let lam_ref = 2.0 / PI * (e * f_ref + k * e_ref - k * f_ref);
        let lam = heuman_lambda(beta, alpha).unwrap();
        assert!((lam - lam_ref).abs() < 1e-12, "{lam} {lam_ref}");
        assert!((heuman_lambda(-beta, alpha).unwrap() + lam).abs() < 1e-15);
    }

    /// Ascending power series, accurate for moderate |x|.
    fn series_j(order: u32, x: f64) -> f64 {
        let mut term = if order == 0 { 1.0 } else { 0.5 * x };
        let mut sum = term;
        let q = -0.25 * x * x;
        for k in 1..80 {
            term *= q / (k as f64 * (k as f64 + order as f64));
            sum += term;
        }
        sum
    }

    #[test]
    fn bessel_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        let z = 2.404825557695773;
        let j1 = bessel_j(1, z).unwrap();
        assert!((j1 - series_j(1, z)).abs() < 1e-14);
        assert!((j1 - 0.519147).abs() < 1e-6);
        for i in 0..60 {
            let x = 0.1 + i as f64 * 0.13;
            for order in 0..2 {
                let a = bessel_j(order, x).unwrap();
                assert!((a - series_j(order, x)).abs() < 1e-13, "J{order}({x})");
            }
        }
        assert!(bessel_j(2, 1.0).is_err());
        assert!((bessel_j(1, -1.3).unwrap() + bessel_j(1, 1.3).unwrap()).abs() < 1e-16);
    }

    #[test]
    fn bessel_large_argument_reference_values() {
        // Reference values from a 30-digit evaluation
        let cases = [
            (0, 30.0, -0.086367983581040211),
            (1, 30.0, -0.11875106261662294),
            (0, 50.0, 0.055812327669251815),
            (1, 50.0, -0.097511828125175138),
            (0, 24.9, 0.08324596835301549),
            (1, 24.9, -0.13485569953140887),
        ];
        for (order, x, v) in cases {
            let a = bessel_j(order, x).unwrap();
            assert!((a - v).abs() < 1e-13, "J{order}({x}) = {a} vs {v}");
        }
    }

    #[test]
    fn bessel_derivative_identity() {
        let h = 1e-6;
        for i in 0..100 {
            let x = 0.3 + i as f64 * 0.49;
            let d = (bessel_j(0, x + h).unwrap() - bessel_j(0, x - h).unwrap()) / (2.0 * h);
            assert!((d + bessel_j(1, x).unwrap()).abs() < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn j0_zeros() {
        let z = bessel_j0_zeros(40);
        assert!((z[0] - 2.404825557695773).abs() < 1e-14);
        assert!((z[1] - 5.520078110286311).abs() < 1e-14);
        for w in z.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!((z[39] - z[38] - PI).abs() < 1e-3);
        for &x in &z {
            assert!(bessel_j(0, x).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn ring_function_reference_values() {
        // high-precision values of [(1 − m/2)K − E]/m² and its derivative
        let cases = [
            (0.1, 0.10616443864452258494, 0.086722978486374525246),
            (0.3, 0.12714407265896823024, 0.12713654214462258644),
            (0.49, 0.15759197501441395861, 0.20273276647808120041),
            (0.5, 0.15964850771341374522, 0.20861905394032410572),
            (0.7, 0.21901116325363712782, 0.42707971614280889961),
            (0.99, 0.86756792499200364928, 23.220227317007409954),
        ];
        for (m, p, dp) in cases {
            let (a, b) = ring_function(m, 1.0 - m);
            assert!((a - p).abs() < 2e-14 * p, "m = {m}: {a} vs {p}");
            assert!((b - dp).abs() < 1e-12 * dp, "m = {m}: {b} vs {dp}");
        }
        let (p0, dp0) = ring_function(0.0, 1.0);
        assert!((p0 - PI / 32.0).abs() < 1e-16);
        assert!((dp0 - 3.0 * PI / 128.0).abs() < 1e-15, "{dp0}");
    }
}
