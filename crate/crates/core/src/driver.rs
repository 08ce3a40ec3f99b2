//! Run configuration, frequency sweeps, mesh convergence studies and the
//! built-in self-test.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble_helmholtz, assemble_laplace, assemble_mass, block_system_from_operators, rhs_from_samples, sample_source,
    AssemblyOptions, BoundarySamples, LaplaceOperators,
};
use crate::coilfield::{self_inductance, source_bz, CoilSpec};
use crate::error::{Error, Result};
use crate::geometry::{MeridianMesh, Order};
use crate::kernels::{helmholtz_kernel, laplace_kernel, MeridianPoint, PhiQuadrature, Wavenumber, MU0};
use crate::quadrature::{duffy_coincident, gauss_legendre_01, Grading};
use crate::solver::{impedance_from_samples, normalize, solve_dense, Solution, SweepResult};
use crate::specfun::{bessel_j01, bessel_j0_zeros, complete_elliptic};

/// Header of the sweep CSV.
pub const SWEEP_HEADER: &str = "frequency_hz,dR_re_ohm,dX_im_ohm,dR_over_X0,dX_over_X0,residual";

/// Header of the convergence CSV.
pub const CONVERGENCE_HEADER: &str =
    "n_s,order,frequency_hz,dR_re_ohm,dX_im_ohm,rel_error,rel_error_R,rel_error_X,observed_order,wall_time_s";

/// Meridian cross-section of the conductor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    /// Tube with inner radius `a1`, outer radius `a2` and length `l`.
    CylinderTube { a1: f64, a2: f64, l: f64 },
    /// Tube with bottom radii `a1 < a2` and top radii `a3 < a4`.
    ConicalTube { a1: f64, a2: f64, a3: f64, a4: f64, l: f64 },
    /// Shell between radii `a1 < a2`.
    SphericalShell { a1: f64, a2: f64 },
}

impl GeometrySpec {
    pub fn mesh(&self, n_s: usize, order: Order) -> Result<MeridianMesh> {
        let built = match *self {
            GeometrySpec::CylinderTube { a1, a2, l } => MeridianMesh::cylinder_tube(a1, a2, l, n_s, order),
            GeometrySpec::ConicalTube { a1, a2, a3, a4, l } => {
                MeridianMesh::conical_tube(a1, a2, a3, a4, l, n_s, order)
            }
            GeometrySpec::SphericalShell { a1, a2 } => MeridianMesh::spherical_shell(a1, a2, n_s, order),
        };
        built.map_err(|e| match e {
            Error::Mesh(m) => Error::config("geometry", m),
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        let fields: Vec<(&str, f64)> = match *self {
            GeometrySpec::CylinderTube { a1, a2, l } => vec![("a1", a1), ("a2", a2), ("l", l)],
            GeometrySpec::ConicalTube { a1, a2, a3, a4, l } => {
                vec![("a1", a1), ("a2", a2), ("a3", a3), ("a4", a4), ("l", l)]
            }
            GeometrySpec::SphericalShell { a1, a2 } => vec![("a1", a1), ("a2", a2)],
        };
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("geometry.{name}"), format!("{v} must be positive")));
            }
        }
        let ordered = |lo: f64, hi: f64, field: &str| {
            if lo < hi {
                Ok(())
            } else {
                Err(Error::config(format!("geometry.{field}"), "outer radius must exceed inner radius"))
            }
        };
        match *self {
            GeometrySpec::CylinderTube { a1, a2, .. } | GeometrySpec::SphericalShell { a1, a2 } => {
                ordered(a1, a2, "a2")
            }
            GeometrySpec::ConicalTube { a1, a2, a3, a4, .. } => {
                ordered(a1, a2, "a2")?;
                ordered(a3, a4, "a4")
            }
        }
    }
}

/// Conductor properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    /// S/m
    pub sigma: f64,
    pub mu_r: f64,
}

/// `count` frequencies log-spaced between `lo` and `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..count)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
                .collect()
        }
    }
}

fn default_frequencies() -> Vec<f64> {
    log_spaced(100.0, 1e5, 20)
}

/// Complete description of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySpec,
    pub material: Material,
    pub coil: CoilSpec,
    /// Hz
    #[serde(default = "default_frequencies")]
    pub frequencies: Vec<f64>,
    /// Total number of elements on the meridian contour.
    pub n_s: usize,
    pub order: Order,
    #[serde(default)]
    pub quadrature: AssemblyOptions,
    /// Coil inductance in henry; computed when absent.
    #[serde(default, rename = "L0", skip_serializing_if = "Option::is_none")]
    pub l0: Option<f64>,
}

impl RunConfig {
    /// Parse and validate JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is serializable")
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if !(self.material.sigma >= 0.0 && self.material.sigma.is_finite()) {
            return Err(Error::config("material.sigma", "must be finite and ≥ 0"));
        }
        if !(self.material.mu_r > 0.0 && self.material.mu_r.is_finite()) {
            return Err(Error::config("material.mu_r", "must be positive"));
        }
        self.coil.validate()?;
        if self.frequencies.is_empty() {
            return Err(Error::config("frequencies", "empty list"));
        }
        for (i, &f) in self.frequencies.iter().enumerate() {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::config(format!("frequencies[{i}]"), format!("{f} must be positive")));
            }
        }
        if self.n_s == 0 {
            return Err(Error::config("n_s", "must be positive"));
        }
        if let Some(l0) = self.l0 {
            if !(l0 > 0.0 && l0.is_finite()) {
                return Err(Error::config("L0", format!("{l0} must be positive")));
            }
        }
        self.quadrature.validate()
    }
}

/// Largest accepted `|k| · h` for the longest element chord `h`.
pub const MAX_KH: f64 = 1e3;

/// Frequency-independent part of a run on one mesh.
pub struct Case {
    pub mesh: MeridianMesh,
    material: Material,
    pub coil: CoilSpec,
    opts: AssemblyOptions,
    mass: DMatrix<f64>,
    laplace: LaplaceOperators,
    samples: BoundarySamples,
    pub l0: f64,
}

impl Case {
    /// Build the mesh and the static operators.
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let mesh = config.geometry.mesh(config.n_s, config.order)?;
        Self::with_mesh(config, mesh)
    }

    pub fn with_mesh(config: &RunConfig, mesh: MeridianMesh) -> Result<Self> {
        let opts = config.quadrature;
        let l0 = match config.l0 {
            Some(l) => l,
            None => self_inductance(&config.coil, 64)?,
        };
        Ok(Case {
            mass: assemble_mass(&mesh),
            laplace: assemble_laplace(&mesh, &opts)?,
            samples: sample_source(&mesh, &config.coil, opts.n_boundary, opts.n_rho)?,
            mesh,
            material: config.material,
            coil: config.coil,
            opts,
            l0,
        })
    }

    /// Boundary solution at one frequency.
    pub fn boundary_solution(&self, frequency: f64) -> Result<Solution> {
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::domain("Case::solve", format!("frequency = {frequency}")));
        }
        let omega = 2.0 * PI * frequency;
        let k = Wavenumber::from_material(omega, self.material.mu_r, self.material.sigma)?;
        let h_max = (0..self.mesh.element_count()).map(|e| self.mesh.chord(e)).fold(0.0, f64::max);
        if k.value().norm() * h_max > MAX_KH {
            return Err(Error::domain(
                "Case::solve",
                format!("|k| h = {:.3e} exceeds {MAX_KH:e} at {frequency} Hz", k.value().norm() * h_max),
            ));
        }
        let helmholtz = assemble_helmholtz(&self.mesh, k, &self.opts)?;
        let f = rhs_from_samples(&self.mesh, &self.samples);
        let system = block_system_from_operators(&self.mass, &self.laplace, &helmholtz, self.material.mu_r, &f)?;
        solve_dense(&system)
    }

    /// Assemble, solve and post-process at one frequency.
    pub fn solve(&self, frequency: f64) -> Result<SweepResult> {
        let sol = self.boundary_solution(frequency)?;
        let omega = 2.0 * PI * frequency;
        let delta_z = impedance_from_samples(&self.mesh, &self.samples, &sol.u1, &sol.q1, omega, self.coil.current)?;
        let (dr_over_x0, dx_over_x0) = normalize(delta_z, omega, self.l0)?;
        Ok(SweepResult {
            frequency,
            delta_z,
            dr_over_x0,
            dx_over_x0,
            residual: sol.residual,
        })
    }

    /// All frequencies, in input order, each with its own outcome.
    pub fn sweep(&self, frequencies: &[f64]) -> Vec<Result<SweepResult>> {
        frequencies.par_iter().map(|&f| self.solve(f)).collect()
    }
}

/// Per-frequency outcomes of a sweep.
pub struct SweepOutput {
    pub frequencies: Vec<f64>,
    pub rows: Vec<Result<SweepResult>>,
    pub l0: f64,
}

impl SweepOutput {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.is_err()).count()
    }

    /// CSV text; failed frequencies carry `NaN` values.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{SWEEP_HEADER}")?;
        for (f, row) in self.frequencies.iter().zip(&self.rows) {
            match row {
                Ok(r) => writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    r.frequency, r.delta_z.re, r.delta_z.im, r.dr_over_x0, r.dx_over_x0, r.residual
                )?,
                Err(_) => writeln!(w, "{f:.16e},NaN,NaN,NaN,NaN,NaN")?,
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Impedance change at every configured frequency.
pub fn run_sweep(config: &RunConfig) -> Result<SweepOutput> {
    let case = Case::new(config)?;
    Ok(SweepOutput {
        frequencies: config.frequencies.clone(),
        rows: case.sweep(&config.frequencies),
        l0: case.l0,
    })
}

/// One mesh level of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceLevel {
    pub n_s: usize,
    pub order: Order,
    pub delta_z: Vec<Complex64>,
    /// `‖ΔZ_h − ΔZ_ref‖₂ / ‖ΔZ_ref‖₂` over the frequencies.
    pub error: f64,
    pub error_r: f64,
    pub error_x: f64,
    /// `log₂(e_h / e_{h/2})` against the previous level.
    pub observed_order: Option<f64>,
    pub wall_time_s: f64,
}

/// Levels of a study together with the reference solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub frequencies: Vec<f64>,
    pub reference_n_s: usize,
    pub reference: Vec<Complex64>,
    pub levels: Vec<ConvergenceLevel>,
}

impl ConvergenceReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CONVERGENCE_HEADER}")?;
        for l in &self.levels {
            let p = l.observed_order.map_or("NaN".to_string(), |p| format!("{p:.16e}"));
            for (f, z) in self.frequencies.iter().zip(&l.delta_z) {
                writeln!(
                    w,
                    "{},{},{f:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{p},{:.6e}",
                    l.n_s,
                    u8::from(l.order),
                    z.re,
                    z.im,
                    l.error,
                    l.error_r,
                    l.error_x,
                    l.wall_time_s
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

fn sweep_values(config: &RunConfig, n_s: usize, order: Order) -> Result<(Vec<Complex64>, f64)> {
    let start = Instant::now();
    let cfg = RunConfig {
        n_s,
        order,
        ..config.clone()
    };
    let case = Case::new(&cfg)?;
    let z = case
        .sweep(&cfg.frequencies)
        .into_iter()
        .map(|r| r.map(|s| s.delta_z))
        .collect::<Result<Vec<_>>>()?;
    Ok((z, start.elapsed().as_secs_f64()))
}

fn rel_norm(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in a.zip(b) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    (num / den).sqrt()
}

/// Mesh levels of `config.order` against a P2 reference with
/// `reference_n_s` elements.
pub fn run_convergence(config: &RunConfig, levels: &[usize], reference_n_s: usize) -> Result<ConvergenceReport> {
    config.validate()?;
    if levels.len() < 3 {
        return Err(Error::config("levels", format!("{} levels given, need at least 3", levels.len())));
    }
    if let Some(i) = levels.iter().position(|&n| n == 0) {
        return Err(Error::config(format!("levels[{i}]"), "must be positive"));
    }
    let (reference, _) = sweep_values(config, reference_n_s, Order::P2)?;
    let mut out: Vec<ConvergenceLevel> = Vec::with_capacity(levels.len());
    for &n_s in levels {
        let (delta_z, wall_time_s) = sweep_values(config, n_s, config.order)?;
        let error = rel_norm(
            delta_z.iter().flat_map(|z| [z.re, z.im]),
            reference.iter().flat_map(|z| [z.re, z.im]),
        );
        let error_r = rel_norm(delta_z.iter().map(|z| z.re), reference.iter().map(|z| z.re));
        let error_x = rel_norm(delta_z.iter().map(|z| z.im), reference.iter().map(|z| z.im));
        let observed_order = out.last().map(|prev| (prev.error / error).log2());
        out.push(ConvergenceLevel {
            n_s,
            order: config.order,
            delta_z,
            error,
            error_r,
            error_x,
            observed_order,
            wall_time_s,
        });
    }
    Ok(ConvergenceReport {
        frequencies: config.frequencies.clone(),
        reference_n_s,
        reference,
        levels: out,
    })
}

/// Outcome of one self-test check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, error: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            error,
            tolerance,
            pass: error <= tolerance,
        }
    }
}

/// Reference values of the coincident Cauchy test integral
/// `p.v. ∫∫ ξ³(1 − η³)/(η − ξ) dξ dη = −11/24`.
pub const CAUCHY_EXACT: f64 = -11.0 / 24.0;
pub const CAUCHY_N4_VALUE: f64 = -0.45831632653061199;
pub const CAUCHY_N4_ERROR: f64 = 1.7e-5;

/// The coincident Cauchy test integral with an `n`-point rule and cubic
/// grading of the distance variable.
pub fn cauchy_test_integral(n: usize) -> Result<f64> {
    let f = |x: f64, y: f64| x.powi(3) * (1.0 - y.powi(3)) / (y - x);
    duffy_coincident(f, &gauss_legendre_01(n)?, Grading::new(3.0))
}

/// `8 / (j₀,₁² J₁²(j₀,₁))`
pub fn mehler_heine_limit() -> f64 {
    let j = bessel_j0_zeros(1)[0];
    let (_, j1) = bessel_j01(j);
    8.0 / (j * j * j1 * j1)
}

/// `w₁ / v₁` of the `n`-point rule, with `v₁` the node closest to an end
/// of `[0, 1]` and `w₁` its weight on `[−1, 1]`.
pub fn first_node_ratio(n: usize) -> Result<f64> {
    let r = gauss_legendre_01(n)?;
    Ok(2.0 * r.weights[0] / r.nodes[0])
}

fn axis_bz_closed_form(c: &CoilSpec, zeta: f64) -> f64 {
    let term = |u: f64| u * ((c.r2 + c.r2.hypot(u)) / (c.r1 + c.r1.hypot(u))).ln();
    let density = c.turns as f64 * c.current / (2.0 * c.h * (c.r2 - c.r1));
    0.5 * MU0 * density * (term(zeta + c.h) - term(zeta - c.h))
}

/// Quadrature, kernel and coil checks with their measured errors.
pub fn run_selftest() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in [4usize, 6, 8, 10, 12, 16, 20, 24, 32] {
        let v = cauchy_test_integral(n)?;
        let err = (v - CAUCHY_EXACT).abs();
        let check = match n {
            4 => Check::new("cauchy n_q=4", v, (err - CAUCHY_N4_ERROR).abs() / CAUCHY_N4_ERROR, 0.1),
            6 => Check::new("cauchy n_q=6", v, err, 1e-15),
            _ => Check::new(format!("cauchy n_q={n}"), v, err, 1e-14),
        };
        checks.push(check);
    }
    let limit = mehler_heine_limit();
    for n in [10usize, 20, 40, 80] {
        let ratio = first_node_ratio(n)?;
        checks.push(Check::new(format!("mehler-heine n={n}"), ratio, (ratio / limit - 1.0).abs(), 0.02));
    }
    let ke = complete_elliptic(0.5)?;
    checks.push(Check::new("elliptic K(0.5)", ke.k, (ke.k - 1.854074677301372).abs(), 1e-14));
    checks.push(Check::new("elliptic E(0.5)", ke.e, (ke.e - 1.350643881047676).abs(), 1e-14));
    // the elliptic form against the azimuthal integral at k = 0
    let fixed = PhiQuadrature::Fixed { points: 256 };
    for (x, y) in [
        ((0.01, 0.0), (0.012, 0.004)),
        ((0.005, 0.002), (0.02, -0.01)),
        ((0.011, 0.001), (0.0115, 0.0012)),
    ] {
        let (x, y) = (MeridianPoint::new(x.0, x.1), MeridianPoint::new(y.0, y.1));
        let g = laplace_kernel(x, y)?;
        let h = helmholtz_kernel(x, y, Wavenumber::ZERO, fixed)?;
        checks.push(Check::new(
            format!("laplace kernel at ({}, {})", y.r, y.z),
            g,
            (h - Complex64::new(g, 0.0)).norm() / g.abs(),
            1e-10,
        ));
    }
    let coil = CoilSpec::new(0.007, 0.0085, 0.002, 500, 0.0)?;
    let l0 = self_inductance(&coil, 64)?;
    checks.push(Check::new("coil inductance", l0, (l0 / 4.7405622e-3 - 1.0).abs(), 1e-4));
    for zeta in [0.0, 0.0015, 0.004] {
        let bz = source_bz(&coil, MeridianPoint::new(0.0, zeta), 24)?;
        let exact = axis_bz_closed_form(&coil, zeta);
        checks.push(Check::new(
            format!("coil axis field z={zeta}"),
            bz,
            (bz / exact - 1.0).abs(),
            1e-10,
        ));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::impedance_change;

    fn tube_config() -> RunConfig {
        RunConfig {
            geometry: GeometrySpec::CylinderTube {
                a1: 0.009,
                a2: 0.011,
                l: 0.024,
            },
            material: Material {
                sigma: 1.37e6,
                mu_r: 1.021,
            },
            coil: CoilSpec::new(0.007, 0.0085, 0.002, 500, 0.0).unwrap(),
            frequencies: vec![1e3, 1e4],
            n_s: 16,
            order: Order::P1,
            quadrature: AssemblyOptions::default(),
            l0: Some(4.7405622e-3),
        }
    }

    #[test]
    fn default_grid() {
        let f = default_frequencies();
        assert_eq!(f.len(), 20);
        assert!((f[0] - 100.0).abs() < 1e-12);
        assert!((f[19] - 1e5).abs() < 1e-9);
        for w in f.windows(3) {
            assert!((w[1] * w[1] / (w[0] * w[2]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{
            "geometry": {"type": "spherical_shell", "a1": 0.011, "a2": 0.012},
            "material": {"sigma": 2.9e6, "mu_r": 1.0},
            "coil": {"r1": 0.007, "r2": 0.0085, "h": 0.002, "turns": 500, "z0": 0.0045},
            "n_s": 40,
            "order": 2,
            "quadrature": {"n_regular": 10}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.frequencies.len(), 20);
        assert_eq!(cfg.quadrature.n_regular, 10);
        assert_eq!(cfg.quadrature.n_singular, AssemblyOptions::default().n_singular);
        assert_eq!(cfg.l0, None);
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let tube = tube_config();
        assert_eq!(RunConfig::from_json(&tube.to_json()).unwrap(), tube);
    }

    #[test]
    fn config_errors_name_the_field() {
        let field = |text: &str| match RunConfig::from_json(text) {
            Err(Error::Config { field, message }) => (field, message),
            other => panic!("{other:?}"),
        };
        let mut cfg = tube_config();
        cfg.frequencies = vec![1e3, -5.0];
        assert_eq!(field(&cfg.to_json()).0, "frequencies[1]");
        let mut cfg = tube_config();
        cfg.material.mu_r = 0.0;
        assert_eq!(field(&cfg.to_json()).0, "material.mu_r");
        let mut cfg = tube_config();
        cfg.geometry = GeometrySpec::CylinderTube {
            a1: 0.011,
            a2: 0.009,
            l: 0.024,
        };
        assert_eq!(field(&cfg.to_json()).0, "geometry.a2");
        let mut cfg = tube_config();
        cfg.quadrature.n_boundary = 2;
        assert_eq!(field(&cfg.to_json()).0, "quadrature.n_boundary");
        let (f, m) = field(r#"{"geometry": {"type": "torus"}}"#);
        assert_eq!(f, "config");
        assert!(m.contains("torus"), "{m}");
        let (_, m) = field(&tube_config().to_json().replacen("\"n_s\"", "\"n_x\"", 1));
        assert!(m.contains("n_x"), "{m}");
    }

    #[test]
    fn null_material_gives_no_change() {
        let mut cfg = tube_config();
        cfg.material = Material { sigma: 0.0, mu_r: 1.0 };
        cfg.order = Order::P2;
        cfg.n_s = 64;
        let out = run_sweep(&cfg).unwrap();
        for r in &out.rows {
            let r = r.as_ref().unwrap();
            assert!(r.dr_over_x0.hypot(r.dx_over_x0) < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn conductor_adds_loss_and_lowers_inductance() {
        let out = run_sweep(&tube_config()).unwrap();
        for r in &out.rows {
            let r = r.as_ref().unwrap();
            assert!(r.delta_z.re > 0.0 && r.delta_z.im < 0.0, "{r:?}");
            assert!(r.residual < 1e-10);
        }
    }

    #[test]
    fn duplicate_frequencies_give_identical_rows() {
        let mut cfg = tube_config();
        cfg.frequencies = vec![2e3, 5e3, 2e3];
        let csv = run_sweep(&cfg).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines[1], lines[3]);
        assert_ne!(lines[1], lines[2]);
    }

    #[test]
    fn csv_marks_failures() {
        let out = SweepOutput {
            frequencies: vec![1.0],
            rows: vec![Err(Error::SingularMatrix { condition: 1e20 })],
            l0: 1.0,
        };
        assert_eq!(out.failures(), 1);
        assert_eq!(out.to_csv().lines().nth(1).unwrap(), "1.0000000000000000e0,NaN,NaN,NaN,NaN,NaN");
    }

    #[test]
    fn unresolved_skin_depth_fails_only_its_row() {
        let mut cfg = tube_config();
        cfg.frequencies = vec![1e3, 1e300, 1e3];
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.failures(), 1);
        assert!(matches!(out.rows[1], Err(Error::Domain { .. })));
        assert_eq!(out.rows[0], out.rows[2]);
    }

    #[test]
    fn impedance_quadrature_refinement() {
        let mut cfg = tube_config();
        cfg.order = Order::P2;
        cfg.n_s = 64;
        let case = Case::new(&cfg).unwrap();
        let sol = case.boundary_solution(1e4).unwrap();
        let omega = 2.0 * PI * 1e4;
        let dz = |n_q| impedance_change(&case.mesh, &case.coil, &sol.u1, &sol.q1, n_q, omega).unwrap();
        let (a, b) = (dz(8), dz(16));
        assert!((a - b).norm() < 1e-9 * b.norm(), "{a} {b}");
    }

    #[test]
    fn selftest_passes() {
        let checks = run_selftest().unwrap();
        assert_eq!(checks.len(), 9 + 4 + 2 + 3 + 1 + 3);
        for c in &checks {
            assert!(c.pass, "{c:?}");
        }
        assert!((checks[0].value - CAUCHY_N4_VALUE).abs() < 1e-15);
    }

    #[test]
    fn convergence_needs_three_levels() {
        let cfg = tube_config();
        assert!(matches!(
            run_convergence(&cfg, &[8, 16], 32),
            Err(Error::Config { .. })
        ));
    }
}
