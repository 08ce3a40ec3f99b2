//! Dense solution of the block system and the impedance change of the coil.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assembly::{sample_source, BlockSystem, BoundarySamples};
use crate::coilfield::CoilSpec;
use crate::error::{Error, Result};
use crate::geometry::{shape_values, MeridianMesh};
use crate::kernels::MU0;

/// Boundary values of the free-space region.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Nodal values of `u⁽¹⁾`.
    pub u1: DVector<Complex64>,
    /// Nodal values of `q⁽¹⁾`.
    pub q1: DVector<Complex64>,
    /// `‖Ax − b‖ / ‖b‖`
    pub residual: f64,
    /// Lower estimate of the 1-norm condition number.
    pub condition_estimate: f64,
}

fn norm1(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn vec_norm1(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|x| x.norm()).sum()
}

/// LU factorization with partial pivoting, split into `(u⁽¹⁾, q⁽¹⁾)`.
pub fn solve_dense(system: &BlockSystem) -> Result<Solution> {
    let a = &system.matrix;
    let n2 = a.nrows();
    if a.ncols() != n2 || system.rhs.len() != n2 || n2 != 2 * system.n {
        return Err(Error::Dimension(format!(
            "system is {}×{} with rhs {} and n = {}",
            a.nrows(),
            a.ncols(),
            system.rhs.len(),
            system.n
        )));
    }
    if a.iter().chain(system.rhs.iter()).any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::domain("solve_dense", "non-finite entries"));
    }
    let lu = a.clone().lu();
    let singular = || Error::SingularMatrix {
        condition: f64::INFINITY,
    };
    let x = lu.solve(&system.rhs).ok_or_else(singular)?;
    // lower bound on ‖A⁻¹‖₁ from a few probe vectors
    let anorm = norm1(a);
    let mut inv_norm: f64 = 0.0;
    let probes = [
        DVector::from_fn(n2, |i, _| Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)),
        DVector::from_fn(n2, |i, _| Complex64::new(1.0 + i as f64 / n2 as f64, 0.0)),
    ];
    for p in &probes {
        let y = lu.solve(p).ok_or_else(singular)?;
        inv_norm = inv_norm.max(vec_norm1(&y) / vec_norm1(p));
    }
    let bnorm = vec_norm1(&system.rhs);
    if bnorm > 0.0 {
        inv_norm = inv_norm.max(vec_norm1(&x) / bnorm);
    }
    let condition = anorm * inv_norm;
    if !(condition.is_finite() && condition < 1.0 / f64::EPSILON) || x.iter().any(|v| !v.re.is_finite()) {
        return Err(Error::SingularMatrix { condition });
    }
    let r = a * &x - &system.rhs;
    let rnorm = r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let b2 = system.rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let residual = if b2 > 0.0 { rnorm / b2 } else { rnorm };
    let n = system.n;
    Ok(Solution {
        u1: x.rows(0, n).into_owned(),
        q1: x.rows(n, n).into_owned(),
        residual,
        condition_estimate: condition,
    })
}

/// Auld's reciprocity integral from sampled source values,
/// `ΔZ = −(2πiω/(μ₀I²)) ∫ (u⁽ᵉ⁾q⁽¹⁾ − u⁽¹⁾q⁽ᵉ⁾) r ds`.
pub fn impedance_from_samples(
    mesh: &MeridianMesh,
    samples: &BoundarySamples,
    u1: &DVector<Complex64>,
    q1: &DVector<Complex64>,
    omega: f64,
    current: f64,
) -> Result<Complex64> {
    let n = mesh.node_count();
    if u1.len() != n || q1.len() != n {
        return Err(Error::Dimension(format!(
            "solution lengths {} and {} for {n} nodes",
            u1.len(),
            q1.len()
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (e, el) in mesh.elements.iter().enumerate() {
        for ((&t, &w), &(ue, qe, r, j)) in samples.rule.nodes.iter().zip(&samples.rule.weights).zip(&samples.values[e]) {
            let s = shape_values(el.order, t);
            let mut uh = Complex64::new(0.0, 0.0);
            let mut qh = Complex64::new(0.0, 0.0);
            for (a, &gi) in el.node_ids.iter().enumerate() {
                uh += u1[gi] * s[a];
                qh += q1[gi] * s[a];
            }
            sum += (qh * ue - uh * qe) * (r * j * w);
        }
    }
    Ok(Complex64::new(0.0, -2.0 * PI * omega / (MU0 * current * current)) * sum)
}

/// Impedance change of the coil from the boundary solution.
pub fn impedance_change(
    mesh: &MeridianMesh,
    coil: &CoilSpec,
    u1: &DVector<Complex64>,
    q1: &DVector<Complex64>,
    n_q: usize,
    omega: f64,
) -> Result<Complex64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain("impedance_change", format!("omega = {omega}")));
    }
    let samples = sample_source(mesh, coil, n_q, 24)?;
    impedance_from_samples(mesh, &samples, u1, q1, omega, coil.current)
}

/// `(Re ΔZ / X₀, Im ΔZ / X₀)` with `X₀ = ωL₀`.
pub fn normalize(delta_z: Complex64, omega: f64, l0: f64) -> Result<(f64, f64)> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain("normalize", format!("omega = {omega}")));
    }
    if !(l0 > 0.0 && l0.is_finite()) {
        return Err(Error::domain("normalize", format!("L0 = {l0}")));
    }
    let x0 = omega * l0;
    Ok((delta_z.re / x0, delta_z.im / x0))
}

/// Impedance change at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Hz
    pub frequency: f64,
    /// Ω
    pub delta_z: Complex64,
    pub dr_over_x0: f64,
    pub dx_over_x0: f64,
    pub residual: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn system(a: DMatrix<Complex64>, b: DVector<Complex64>) -> BlockSystem {
        let n = a.nrows() / 2;
        BlockSystem { matrix: a, rhs: b, n }
    }

    #[test]
    fn identity_returns_rhs() {
        let b = DVector::from_vec(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(4.0, -4.0)]);
        let s = solve_dense(&system(DMatrix::identity(4, 4), b.clone())).unwrap();
        assert_eq!(s.u1.as_slice(), &b.as_slice()[..2]);
        assert_eq!(s.q1.as_slice(), &b.as_slice()[2..]);
        assert_eq!(s.residual, 0.0);
    }

    #[test]
    fn two_by_two_known_inverse() {
        // [[1, i], [i, 2]] has determinant 3 and inverse [[2, −i], [−i, 1]] / 3
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(2.0, 0.0)]);
        let b = DVector::from_vec(vec![c(3.0, 0.0), c(0.0, 3.0)]);
        let s = solve_dense(&system(a, b)).unwrap();
        // x = [[2, −i], [−i, 1]] (3, 3i) / 3 = (2 + 1, −i + i) = (3, 0)
        assert!((s.u1[0] - c(3.0, 0.0)).norm() < 1e-15);
        assert!(s.q1[0].norm() < 1e-15);
    }

    #[test]
    fn random_system_residual() {
        // seeded entries with a dominant diagonal
        let mut rng = StdRng::seed_from_u64(7);
        let mut next = || rng.random_range(-0.5..0.5);
        let n = 50;
        let a = DMatrix::from_fn(n, n, |i, j| {
            let v = c(next(), next());
            if i == j {
                v + c(10.0, 0.0)
            } else {
                v
            }
        });
        let b = DVector::from_fn(n, |_, _| c(next(), next()));
        let s = solve_dense(&system(a, b)).unwrap();
        assert!(s.residual < 1e-12, "{}", s.residual);
        assert!(s.condition_estimate >= 1.0 && s.condition_estimate < 100.0);
    }

    #[test]
    fn singular_system_rejected() {
        let a = DMatrix::from_element(2, 2, c(1.0, 0.0));
        let b = DVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(solve_dense(&system(a, b)), Err(Error::SingularMatrix { .. })));
        let bad = BlockSystem {
            matrix: DMatrix::identity(3, 3),
            rhs: DVector::from_element(3, c(0.0, 0.0)),
            n: 1,
        };
        assert!(matches!(solve_dense(&bad), Err(Error::Dimension(_))));
    }

    #[test]
    fn normalization() {
        let (omega, l0) = (2.0 * PI * 1e3, 4.7405622e-3);
        let x0 = omega * l0;
        assert_eq!(normalize(c(0.0, x0), omega, l0).unwrap(), (0.0, 1.0));
        assert_eq!(normalize(c(0.0, 0.0), omega, l0).unwrap(), (0.0, 0.0));
        let (a, b) = normalize(c(1.0, 2.0), omega, l0).unwrap();
        assert!((a - 1.0 / 29.785830762810935).abs() < 1e-15);
        assert!((b - 2.0 / 29.785830762810935).abs() < 1e-15);
        assert!(normalize(c(1.0, 0.0), 0.0, l0).is_err());
        assert!(normalize(c(1.0, 0.0), omega, -1.0).is_err());
    }

    #[test]
    fn zero_solution_gives_zero_impedance() {
        let mesh = MeridianMesh::cylinder_tube(0.009, 0.011, 0.024, 16, crate::geometry::Order::P1).unwrap();
        let coil = CoilSpec::new(0.007, 0.0085, 0.002, 500, 0.0).unwrap();
        let z = DVector::from_element(mesh.node_count(), c(0.0, 0.0));
        let dz = impedance_change(&mesh, &coil, &z, &z, 8, 2.0 * PI * 1e3).unwrap();
        assert_eq!(dz, c(0.0, 0.0));
    }
}
