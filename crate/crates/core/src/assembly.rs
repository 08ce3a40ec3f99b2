//! Galerkin matrices of the boundary operators and the coupled block system.
//!
//! With test functions `φ_i(x)` weighted by `r_x` and trial functions `φ_j(y)`:
//!
//! * `M_ij = ½ ∫ φ_i φ_j r ds`
//! * `V_ij = ∬ φ_i G φ_j r_y r_x`
//! * `K_ij = ∬ φ_i ∂_{n_y}G φ_j r_y r_x`
//! * `Vs_ij = ∬ φ_i n_r(y) G_k φ_j r_x`
//!
//! Element pairs are integrated with the split Duffy rule when coincident,
//! the corner Duffy rule when touching, cells no longer than their distance
//! to the other element when close, and a tensor Gauss rule whose order drops
//! with the separation otherwise. Pair contributions are reduced in element order, so
//! serial and parallel assembly give bitwise-identical matrices.

use std::ops::{AddAssign, Mul};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coilfield::{CoilEvaluator, CoilSpec};
use crate::error::{Error, Result};
use crate::geometry::{shape_values, ElementMap, MeridianMesh};
use crate::kernels::{helmholtz_values, laplace_values, KernelValues, PhiQuadrature, Separation, Wavenumber};
use crate::quadrature::{
    cell_rule, coincident_rule, gauss_legendre_01, regular_rule, touching_rule, Corner, Grading, PairConfig,
    PairRule, QuadRule, MAX_NEAR_DEPTH,
};

/// Quadrature settings for assembly and post-processing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssemblyOptions {
    /// Gauss order per direction for close element pairs and per near-field cell.
    pub n_regular: usize,
    /// Gauss order per direction of the Duffy rules, doubled for elements
    /// long compared with their radius.
    pub n_singular: usize,
    /// Grading exponent of the Duffy rules, applied in both directions.
    pub grading: f64,
    /// Pairs with `distance / chord` below this are split into cells no longer
    /// than their distance to the other element.
    pub near_ratio: f64,
    pub max_near_depth: u32,
    /// Lower the Gauss order for well separated pairs.
    pub far_reduction: bool,
    /// Gauss order per element for the excitation vector and the impedance.
    pub n_boundary: usize,
    /// Gauss order per radial cell of the coil field integrals.
    pub n_rho: usize,
    pub phi: PhiQuadrature,
    /// Evaluate element pairs on the rayon pool.
    pub parallel: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            n_regular: 12,
            n_singular: 16,
            grading: 5.0,
            near_ratio: 1.0,
            max_near_depth: 6,
            far_reduction: true,
            n_boundary: 16,
            n_rho: 24,
            phi: PhiQuadrature::default(),
            parallel: true,
        }
    }
}

impl AssemblyOptions {
    pub fn validate(&self) -> Result<()> {
        let range = |name: &str, v: usize, lo: usize, hi: usize| {
            if (lo..=hi).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(format!("quadrature.{name}"), format!("{v} not in {lo}..={hi}")))
            }
        };
        range("n_regular", self.n_regular, 4, 64)?;
        range("n_singular", self.n_singular, 4, 64)?;
        range("n_boundary", self.n_boundary, 8, 64)?;
        range("n_rho", self.n_rho, 8, 128)?;
        if !(self.grading >= 1.0 && self.grading <= 10.0) {
            return Err(Error::config("quadrature.grading", format!("{} not in [1, 10]", self.grading)));
        }
        if !(self.near_ratio >= 0.0 && self.near_ratio.is_finite()) {
            return Err(Error::config("quadrature.near_ratio", "must be finite and ≥ 0"));
        }
        if self.max_near_depth > MAX_NEAR_DEPTH {
            return Err(Error::config(
                "quadrature.max_near_depth",
                format!("{} exceeds {MAX_NEAR_DEPTH}", self.max_near_depth),
            ));
        }
        match self.phi {
            PhiQuadrature::Graded { points_per_panel } if !(4..=64).contains(&points_per_panel) => {
                Err(Error::config("quadrature.phi", format!("{points_per_panel} points per panel")))
            }
            PhiQuadrature::Fixed { points } if !(8..=256).contains(&points) => {
                Err(Error::config("quadrature.phi", format!("{points} points")))
            }
            _ => Ok(()),
        }
    }
}

/// Kernel of an integral operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Laplace,
    Helmholtz(Wavenumber),
}

/// Frequency-independent operators.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceOperators {
    pub v: DMatrix<f64>,
    pub k: DMatrix<f64>,
}

/// Operators of the conducting region at one wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct HelmholtzOperators {
    pub v: DMatrix<Complex64>,
    pub k: DMatrix<Complex64>,
    pub vs: DMatrix<Complex64>,
}

/// Coupled system for `(u⁽¹⁾, q⁽¹⁾)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem {
    pub matrix: DMatrix<Complex64>,
    pub rhs: DVector<Complex64>,
    /// Number of global basis functions.
    pub n: usize,
}

/// Local element-pair blocks `[test][trial]`.
#[derive(Debug, Clone, Copy, Default)]
struct PairBlock<T> {
    v: [[T; 3]; 3],
    k: [[T; 3]; 3],
    vs: [[T; 3]; 3],
}

trait Scalar: Copy + Default + Send + Sync + AddAssign + Mul<f64, Output = Self> + std::ops::Add<Output = Self> {
    fn is_finite_value(&self) -> bool;
}

impl Scalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Pair rules shared by all element pairs of one assembly.
struct RuleSet {
    base: QuadRule,
    coincident: PairRule,
    touching: [PairRule; 4],
    /// Doubled-order rules for elements long compared with their radius.
    coincident_fine: PairRule,
    touching_fine: [PairRule; 4],
    regular: Vec<(usize, PairRule)>,
}

/// Singular pairs with `chord > LONG_ELEMENT · r_min` use the fine rules.
const LONG_ELEMENT: f64 = 0.5;

const CORNERS: [Corner; 4] = [
    Corner::XiEndEtaStart,
    Corner::XiStartEtaEnd,
    Corner::BothStart,
    Corner::BothEnd,
];

impl RuleSet {
    fn new(opts: &AssemblyOptions) -> Result<Self> {
        let grading = Grading::uniform(opts.grading);
        let singular = gauss_legendre_01(opts.n_singular)?;
        let fine = gauss_legendre_01(2 * opts.n_singular)?;
        let corners = |rule: &QuadRule| -> Result<[PairRule; 4]> {
            Ok([
                touching_rule(rule, CORNERS[0], grading)?,
                touching_rule(rule, CORNERS[1], grading)?,
                touching_rule(rule, CORNERS[2], grading)?,
                touching_rule(rule, CORNERS[3], grading)?,
            ])
        };
        let mut orders: Vec<usize> = vec![opts.n_regular];
        if opts.far_reduction {
            orders.extend([5, 6, 8, 10].into_iter().filter(|&n| n < opts.n_regular));
        }
        let regular = orders
            .into_iter()
            .map(|n| Ok((n, regular_rule(&gauss_legendre_01(n)?, f64::INFINITY))))
            .collect::<Result<Vec<_>>>()?;
        Ok(RuleSet {
            base: gauss_legendre_01(opts.n_regular)?,
            coincident: coincident_rule(&singular, grading)?,
            touching: corners(&singular)?,
            coincident_fine: coincident_rule(&fine, grading)?,
            touching_fine: corners(&fine)?,
            regular,
        })
    }

    fn touching(&self, corner: Corner, fine: bool) -> &PairRule {
        let i = CORNERS.iter().position(|&c| c == corner).unwrap_or(0);
        if fine {
            &self.touching_fine[i]
        } else {
            &self.touching[i]
        }
    }

    fn regular(&self, n: usize) -> &PairRule {
        self.regular
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, r)| r)
            .unwrap_or(&self.regular[0].1)
    }
}

/// Cells of `[0, 1]` on element `a`, bisected until each cell is no longer
/// than its sampled distance to the points `other`.
fn distance_cells(a: &ElementMap, other: &[(f64, f64)], max_depth: u32) -> Vec<(f64, f64)> {
    let dist = |p: (f64, f64)| other.iter().map(|q| (p.0 - q.0).hypot(p.1 - q.1)).fold(f64::INFINITY, f64::min);
    let mut done = Vec::new();
    let mut stack = vec![(0.0, 1.0, 0u32)];
    while let Some((s0, s1, depth)) = stack.pop() {
        let (p0, pm, p1) = (a.point(s0), a.point(0.5 * (s0 + s1)), a.point(s1));
        let len = (pm.0 - p0.0).hypot(pm.1 - p0.1) + (p1.0 - pm.0).hypot(p1.1 - pm.1);
        let d = (0..=4)
            .map(|i| dist(a.point(s0 + (s1 - s0) * i as f64 / 4.0)))
            .fold(f64::INFINITY, f64::min);
        if depth < max_depth && len > d {
            let m = 0.5 * (s0 + s1);
            stack.push((m, s1, depth + 1));
            stack.push((s0, m, depth + 1));
        } else {
            done.push((s0, s1));
        }
    }
    done.sort_by(|x, y| x.0.total_cmp(&y.0));
    done
}

fn samples(a: &ElementMap) -> Vec<(f64, f64)> {
    const S: usize = 64;
    (0..=S).map(|i| a.point(i as f64 / S as f64)).collect()
}

struct Assembler<'a> {
    mesh: &'a MeridianMesh,
    opts: AssemblyOptions,
    rules: RuleSet,
    /// `|k|`, used to raise the order for oscillating kernels.
    k_abs: f64,
}

impl<'a> Assembler<'a> {
    fn new(mesh: &'a MeridianMesh, opts: &AssemblyOptions, k_abs: f64) -> Result<Self> {
        opts.validate()?;
        if mesh.element_count() == 0 {
            return Err(Error::Mesh("mesh has no elements".into()));
        }
        Ok(Assembler {
            mesh,
            opts: *opts,
            rules: RuleSet::new(opts)?,
            k_abs,
        })
    }

    fn far_order(&self, ratio: f64, chord: f64) -> usize {
        let n = self.opts.n_regular;
        if !self.opts.far_reduction {
            return n;
        }
        let base = if ratio < 2.0 {
            n
        } else if ratio < 4.0 {
            8
        } else if ratio < 8.0 {
            6
        } else {
            5
        };
        let extra = (2.0 * self.k_abs * chord).floor() as usize;
        (base + extra).min(n)
    }

    fn pair_block<T: Scalar>(
        &self,
        ei: usize,
        ej: usize,
        kernel: &(dyn Fn(&Separation) -> KernelValues<T> + Sync),
    ) -> Result<PairBlock<T>> {
        let mesh = self.mesh;
        let config = mesh.classify_pair(ei, ej);
        let near;
        let fine = || {
            let chord = mesh.chord(ei).max(mesh.chord(ej));
            let r_min = [mesh.map(ei), mesh.map(ej)]
                .iter()
                .flat_map(|m| [m.x0.0, m.x1.0])
                .fold(f64::INFINITY, f64::min);
            chord > LONG_ELEMENT * r_min
        };
        let rule = match config {
            PairConfig::Coincident if fine() => &self.rules.coincident_fine,
            PairConfig::Coincident => &self.rules.coincident,
            PairConfig::Touching(c) => self.rules.touching(c, fine()),
            PairConfig::Separated(ratio) => {
                let chord = mesh.chord(ei).max(mesh.chord(ej));
                if ratio < self.opts.near_ratio && self.opts.max_near_depth > 0 {
                    let (mx, my) = (mesh.map(ei), mesh.map(ej));
                    let xs = distance_cells(mx, &samples(my), self.opts.max_near_depth);
                    let ys = distance_cells(my, &samples(mx), self.opts.max_near_depth);
                    near = cell_rule(&self.rules.base, &xs, &ys, ratio);
                    &near
                } else {
                    self.rules.regular(self.far_order(ratio, chord))
                }
            }
        };
        Ok(self.integrate(ei, ej, config, rule, kernel))
    }

    fn integrate<T: Scalar>(
        &self,
        ei: usize,
        ej: usize,
        config: PairConfig,
        rule: &PairRule,
        kernel: &(dyn Fn(&Separation) -> KernelValues<T> + Sync),
    ) -> PairBlock<T> {
        let mesh = self.mesh;
        let (mx, my) = (mesh.map(ei), mesh.map(ej));
        let (ox, oy) = (mesh.elements[ei].order, mesh.elements[ej].order);
        let (na, nb) = (ox.nodes_per_element(), oy.nodes_per_element());
        let mut out = PairBlock::<T>::default();
        for p in &rule.points {
            let (x, y, d) = match config {
                PairConfig::Coincident => {
                    let d = mx.offset(p.eta, p.d_xi);
                    (mx.point(p.xi), mx.point(p.eta), d)
                }
                PairConfig::Touching(c) => {
                    let (xc, yc) = c.point();
                    let corner = if xc == 1.0 { mx.x1 } else { mx.x0 };
                    let ox_ = mx.offset(xc, p.d_xi);
                    let oy_ = my.offset(yc, p.d_eta);
                    (
                        (corner.0 + ox_.0, corner.1 + ox_.1),
                        (corner.0 + oy_.0, corner.1 + oy_.1),
                        (ox_.0 - oy_.0, ox_.1 - oy_.1),
                    )
                }
                PairConfig::Separated(_) => {
                    let x = mx.point(p.xi);
                    let y = my.point(p.eta);
                    (x, y, (x.0 - y.0, x.1 - y.1))
                }
            };
            let rx = x.0.max(0.0);
            let ry = y.0.max(0.0);
            let sep = Separation {
                r: rx,
                rp: ry,
                dr: d.0,
                dz: d.1,
            };
            let kv = kernel(&sep);
            let (_, jx) = mesh.normal_and_jacobian(mx.tangent(p.xi));
            let (ny, jy) = mesh.normal_and_jacobian(my.tangent(p.eta));
            let common = p.weight * jx * jy * rx;
            let g = kv.g * common;
            let dn = kv.normal_derivative(ny) * common;
            let sx = shape_values(ox, p.xi);
            let sy = shape_values(oy, p.eta);
            for a in 0..na {
                for b in 0..nb {
                    let s = sx[a] * sy[b];
                    out.v[a][b] += g * (ry * s);
                    out.k[a][b] += dn * (ry * s);
                    out.vs[a][b] += g * (ny.0 * s);
                }
            }
        }
        out
    }

    /// All three operators for one kernel, reduced in element order.
    fn operators<T: Scalar>(
        &self,
        kernel: &(dyn Fn(&Separation) -> KernelValues<T> + Sync),
    ) -> Result<[DMatrix<T>; 3]>
    where
        T: nalgebra::Scalar,
    {
        let mesh = self.mesh;
        let n = mesh.node_count();
        let ne = mesh.element_count();
        let mut mats = [
            DMatrix::<T>::from_element(n, n, T::default()),
            DMatrix::<T>::from_element(n, n, T::default()),
            DMatrix::<T>::from_element(n, n, T::default()),
        ];
        let row = |ei: usize| -> Result<Vec<PairBlock<T>>> { (0..ne).map(|ej| self.pair_block(ei, ej, kernel)).collect() };
        const CHUNK: usize = 16;
        let mut start = 0;
        while start < ne {
            let end = (start + CHUNK).min(ne);
            let rows: Vec<Result<Vec<PairBlock<T>>>> = if self.opts.parallel {
                (start..end).into_par_iter().map(row).collect()
            } else {
                (start..end).map(row).collect()
            };
            for (ei, blocks) in (start..end).zip(rows) {
                let blocks = blocks?;
                let ids_i = &mesh.elements[ei].node_ids;
                for (ej, blk) in blocks.iter().enumerate() {
                    let ids_j = &mesh.elements[ej].node_ids;
                    for (a, &gi) in ids_i.iter().enumerate() {
                        for (b, &gj) in ids_j.iter().enumerate() {
                            mats[0][(gi, gj)] += blk.v[a][b];
                            mats[1][(gi, gj)] += blk.k[a][b];
                            mats[2][(gi, gj)] += blk.vs[a][b];
                        }
                    }
                }
            }
            start = end;
        }
        for (name, m) in ["V", "K", "Vs"].iter().zip(&mats) {
            if let Some(pos) = m.iter().position(|v| !v.is_finite_value()) {
                return Err(Error::domain(
                    "assembly",
                    format!("non-finite {name} entry at ({}, {})", pos % n, pos / n),
                ));
            }
        }
        Ok(mats)
    }
}

/// Laplace single- and double-layer matrices.
pub fn assemble_laplace(mesh: &MeridianMesh, opts: &AssemblyOptions) -> Result<LaplaceOperators> {
    let asm = Assembler::new(mesh, opts, 0.0)?;
    let [v, k, _] = asm.operators::<f64>(&laplace_values)?;
    Ok(LaplaceOperators { v, k })
}

/// Helmholtz single-layer, double-layer and coupling matrices.
pub fn assemble_helmholtz(mesh: &MeridianMesh, k: Wavenumber, opts: &AssemblyOptions) -> Result<HelmholtzOperators> {
    let kv = k.value();
    let asm = Assembler::new(mesh, opts, kv.norm())?;
    let phi = opts.phi;
    let kernel = move |s: &Separation| helmholtz_values(s, kv, &phi);
    let [v, kk, vs] = asm.operators::<Complex64>(&kernel)?;
    Ok(HelmholtzOperators { v, k: kk, vs })
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Single-layer matrix of either kernel.
pub fn assemble_single_layer(mesh: &MeridianMesh, kernel: Kernel, opts: &AssemblyOptions) -> Result<DMatrix<Complex64>> {
    match kernel {
        Kernel::Laplace => Ok(to_complex(&assemble_laplace(mesh, opts)?.v)),
        Kernel::Helmholtz(k) => Ok(assemble_helmholtz(mesh, k, opts)?.v),
    }
}

/// Double-layer matrix of either kernel.
pub fn assemble_double_layer(mesh: &MeridianMesh, kernel: Kernel, opts: &AssemblyOptions) -> Result<DMatrix<Complex64>> {
    match kernel {
        Kernel::Laplace => Ok(to_complex(&assemble_laplace(mesh, opts)?.k)),
        Kernel::Helmholtz(k) => Ok(assemble_helmholtz(mesh, k, opts)?.k),
    }
}

/// Coupling matrix `Vs` of the permeability jump.
pub fn assemble_vs(mesh: &MeridianMesh, k: Wavenumber, opts: &AssemblyOptions) -> Result<DMatrix<Complex64>> {
    Ok(assemble_helmholtz(mesh, k, opts)?.vs)
}

/// Mass matrix `½ ∫ φ_i φ_j r ds`.
pub fn assemble_mass(mesh: &MeridianMesh) -> DMatrix<f64> {
    let n = mesh.node_count();
    let rule = gauss_legendre_01(12).expect("fixed order");
    let mut m = DMatrix::zeros(n, n);
    for (e, el) in mesh.elements.iter().enumerate() {
        let map = mesh.map(e);
        let np = el.order.nodes_per_element();
        let mut local = [[0.0; 3]; 3];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (_, j) = mesh.normal_and_jacobian(map.tangent(t));
            let r = map.point(t).0.max(0.0);
            let s = shape_values(el.order, t);
            for a in 0..np {
                for b in 0..np {
                    local[a][b] += 0.5 * w * j * r * s[a] * s[b];
                }
            }
        }
        for a in 0..np {
            for b in 0..np {
                m[(el.node_ids[a], el.node_ids[b])] += local[a][b];
            }
        }
    }
    m
}

/// Source values along the boundary at the Gauss points of every element.
#[derive(Debug, Clone)]
pub struct BoundarySamples {
    pub rule: QuadRule,
    /// `[element][point]`: `(u⁽ᵉ⁾, q⁽ᵉ⁾, r, J)`.
    pub values: Vec<Vec<(f64, f64, f64, f64)>>,
}

/// Coil potential and its outward normal derivative at the boundary Gauss
/// points.
pub fn sample_source(mesh: &MeridianMesh, coil: &CoilSpec, n_q: usize, n_rho: usize) -> Result<BoundarySamples> {
    if !(8..=64).contains(&n_q) {
        return Err(Error::domain("sample_source", format!("n_q = {n_q} not in 8..=64")));
    }
    let eval = CoilEvaluator::new(coil, n_rho)?;
    let rule = gauss_legendre_01(n_q)?;
    let values = (0..mesh.element_count())
        .map(|e| {
            let map = mesh.map(e);
            rule.nodes
                .iter()
                .map(|&t| {
                    let (n, j) = mesh.normal_and_jacobian(map.tangent(t));
                    let p = map.point(t);
                    let r = p.0.max(0.0);
                    let f = eval.fields(r, p.1);
                    (f.a, eval.normal_derivative_from(r, &f, n), r, j)
                })
                .collect()
        })
        .collect();
    Ok(BoundarySamples { rule, values })
}

/// Excitation vector `f_i = ∫ φ_i u⁽ᵉ⁾ r ds` from sampled source values.
pub fn rhs_from_samples(mesh: &MeridianMesh, samples: &BoundarySamples) -> DVector<Complex64> {
    let mut f = DVector::from_element(mesh.node_count(), Complex64::new(0.0, 0.0));
    for (e, el) in mesh.elements.iter().enumerate() {
        for ((&t, &w), &(u, _, r, j)) in samples.rule.nodes.iter().zip(&samples.rule.weights).zip(&samples.values[e]) {
            let s = shape_values(el.order, t);
            for (a, &gi) in el.node_ids.iter().enumerate() {
                f[gi] += Complex64::new(w * j * r * u * s[a], 0.0);
            }
        }
    }
    f
}

/// Excitation vector of the coil.
pub fn assemble_rhs(mesh: &MeridianMesh, coil: &CoilSpec, opts: &AssemblyOptions) -> Result<DVector<Complex64>> {
    opts.validate()?;
    let samples = sample_source(mesh, coil, opts.n_boundary, opts.n_rho)?;
    Ok(rhs_from_samples(mesh, &samples))
}

/// `[[M − K, V], [M + K_k − (μr − 1)Vs, −μr V_k]]` with right-hand side `(f, 0)`.
#[allow(clippy::too_many_arguments)]
pub fn build_block_system(
    m: &DMatrix<Complex64>,
    v: &DMatrix<Complex64>,
    k: &DMatrix<Complex64>,
    vk: &DMatrix<Complex64>,
    kk: &DMatrix<Complex64>,
    vs: &DMatrix<Complex64>,
    mu_r: f64,
    f: &DVector<Complex64>,
) -> Result<BlockSystem> {
    let n = m.nrows();
    for (name, b) in [("M", m), ("V", v), ("K", k), ("V_k", vk), ("K_k", kk), ("V_s", vs)] {
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::Dimension(format!(
                "{name} is {}×{}, expected {n}×{n}",
                b.nrows(),
                b.ncols()
            )));
        }
    }
    if f.len() != n {
        return Err(Error::Dimension(format!("rhs has length {}, expected {n}", f.len())));
    }
    if !(mu_r > 0.0 && mu_r.is_finite()) {
        return Err(Error::domain("build_block_system", format!("mu_r = {mu_r}")));
    }
    let mut a = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    a.view_mut((0, 0), (n, n)).copy_from(&(m - k));
    a.view_mut((0, n), (n, n)).copy_from(v);
    a.view_mut((n, 0), (n, n)).copy_from(&(m + kk - vs * Complex64::new(mu_r - 1.0, 0.0)));
    a.view_mut((n, n), (n, n)).copy_from(&(vk * Complex64::new(-mu_r, 0.0)));
    let mut rhs = DVector::from_element(2 * n, Complex64::new(0.0, 0.0));
    rhs.rows_mut(0, n).copy_from(f);
    Ok(BlockSystem { matrix: a, rhs, n })
}

/// Block system from precomputed operators.
pub fn block_system_from_operators(
    mass: &DMatrix<f64>,
    laplace: &LaplaceOperators,
    helmholtz: &HelmholtzOperators,
    mu_r: f64,
    f: &DVector<Complex64>,
) -> Result<BlockSystem> {
    build_block_system(
        &to_complex(mass),
        &to_complex(&laplace.v),
        &to_complex(&laplace.k),
        &helmholtz.v,
        &helmholtz.k,
        &helmholtz.vs,
        mu_r,
        f,
    )
}
