//! Gauss–Legendre rules on `[0,1]` and the regularising transforms used for
//! the double integrals of Galerkin assembly.
//!
//! Every integral over a pair of elements lives on the parameter square
//! `(ξ, η) ∈ [0,1]²`. The routines here do not evaluate integrands directly;
//! they build a [`PairRule`], a list of points and weights on the square, so
//! that assembly can evaluate several kernels at each point in one pass. The
//! closure-based helpers (`duffy_coincident` and friends) are thin wrappers
//! that sum an integrand over such a rule.
//!
//! Coincident pairs are split along the diagonal and each triangle is mapped
//! to the unit square with a Duffy map whose Jacobian `(1 − u)` vanishes on
//! the collapsed edge. The two triangles are evaluated at the *same* `(u, v)`
//! node and stored next to each other, so a Cauchy kernel `F/(ξ − η)` is
//! summed in the recombined form `[F(a,u) − F(u,a)]/v`, which is bounded.
//!
//! Touching pairs are split along the diagonal that runs through the shared
//! corner, and both triangles are Duffy-mapped with the collapsed vertex at
//! that corner. Only the canonical corner `(ξ, η) = (1, 0)` is implemented;
//! the other three are reflections.

use std::ops::{AddAssign, Mul};

use crate::error::{Error, Result};

/// Gauss–Legendre rule mapped to `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `1 − nodes[i]`, kept separately because it is needed without
    /// cancellation near the right end point.
    pub complements: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate a function over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(a + h * t))
            .sum::<f64>()
            * h
    }
}

/// `n`-point Gauss–Legendre rule on `[0,1]` for `1 ≤ n ≤ 128`.
///
/// Nodes are found by Newton iteration on `P_n(cos θ)` in the angle variable,
/// so that `t = sin²(θ/2)` is accurate to full relative precision near both
/// end points.
pub fn gauss_legendre_01(n: usize) -> Result<QuadRule> {
    if !(1..=128).contains(&n) {
        return Err(Error::domain("gauss_legendre_01", format!("n = {n} not in 1..=128")));
    }
    let mut nodes = vec![0.0; n];
    let mut complements = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // i-th root counted from x = +1
        let mut theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut dp = 0.0;
        for _ in 0..100 {
            let x = theta.cos();
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            // d/dθ P_n(cos θ) = −sin θ · P_n'(x)
            let step = p / (theta.sin() * d);
            theta += step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let x = theta.cos();
        let (_, d) = legendre_and_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let half = 0.5 * theta;
        let s2 = half.sin().powi(2);
        let c2 = half.cos().powi(2);
        let sin_t = theta.sin();
        let w = 1.0 / (sin_t * sin_t * dp * dp);
        // x near +1 maps to t = (1 − x)/2 = sin²(θ/2), the small end
        nodes[i] = s2;
        complements[i] = c2;
        weights[i] = w;
        nodes[n - 1 - i] = c2;
        complements[n - 1 - i] = s2;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let mid = n / 2;
        nodes[mid] = 0.5;
        complements[mid] = 0.5;
    }
    Ok(QuadRule {
        nodes,
        weights,
        complements,
    })
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Which parameter end points of a touching pair meet at the shared node,
/// written as `(ξ_c, η_c)` with `ξ` on the test element and `η` on the trial
/// element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    /// `(ξ, η) = (1, 0)`: end of the test element meets start of the trial.
    XiEndEtaStart,
    /// `(0, 1)`
    XiStartEtaEnd,
    /// `(0, 0)`
    BothStart,
    /// `(1, 1)`
    BothEnd,
}

impl Corner {
    pub fn from_ends(xi_end: bool, eta_end: bool) -> Self {
        match (xi_end, eta_end) {
            (true, false) => Corner::XiEndEtaStart,
            (false, true) => Corner::XiStartEtaEnd,
            (false, false) => Corner::BothStart,
            (true, true) => Corner::BothEnd,
        }
    }

    /// Parameter coordinates of the singular corner.
    pub fn point(self) -> (f64, f64) {
        match self {
            Corner::XiEndEtaStart => (1.0, 0.0),
            Corner::XiStartEtaEnd => (0.0, 1.0),
            Corner::BothStart => (0.0, 0.0),
            Corner::BothEnd => (1.0, 1.0),
        }
    }

    pub fn transposed(self) -> Self {
        match self {
            Corner::XiEndEtaStart => Corner::XiStartEtaEnd,
            Corner::XiStartEtaEnd => Corner::XiEndEtaStart,
            c => c,
        }
    }
}

/// Configuration of an element pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairConfig {
    Coincident,
    Touching(Corner),
    /// Disjoint elements; the value is `min distance / max chord`.
    Separated(f64),
}

/// Graded substitutions that cluster Duffy nodes toward the singular set.
///
/// `p` grades the variable that measures distance from the singularity
/// (`v = w^p` for coincident pairs, `u = s^p` for touching pairs). `apex`
/// grades `u` toward the collapsed vertex of the coincident Duffy triangles,
/// `1 − u = (1 − s)^apex`, where a logarithmic kernel leaves a
/// `(1 − u) ln(1 − u)` factor behind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grading {
    pub p: f64,
    pub apex: f64,
}

impl Grading {
    pub const NONE: Grading = Grading { p: 1.0, apex: 1.0 };

    /// Grade only the distance variable.
    pub fn new(p: f64) -> Self {
        Grading { p, apex: 1.0 }
    }

    /// Same exponent for both directions.
    pub fn uniform(p: f64) -> Self {
        Grading { p, apex: p }
    }

    pub fn with_apex(self, apex: f64) -> Self {
        Grading { apex, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.apex >= 1.0) {
            return Err(Error::domain("Grading", format!("{self:?}: exponents must be ≥ 1")));
        }
        Ok(())
    }
}

impl Default for Grading {
    fn default() -> Self {
        Grading::NONE
    }
}

/// One point of a pair rule.
///
/// Besides `(ξ, η)` each point carries parameter offsets that are exact to
/// full precision, so geometry can form `x(ξ) − y(η)` without cancellation:
/// for coincident pairs `d_xi = ξ − η`; for touching pairs
/// `d_xi = ξ − ξ_c` and `d_eta = η − η_c` relative to the shared corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPoint {
    pub xi: f64,
    pub eta: f64,
    pub weight: f64,
    pub d_xi: f64,
    pub d_eta: f64,
}

/// Point set on `[0,1]²` for one element-pair configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRule {
    pub config: PairConfig,
    pub points: Vec<PairPoint>,
}

impl PairRule {
    /// Sum `f` over the rule.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: Default + AddAssign + Mul<f64, Output = T>,
        F: Fn(f64, f64) -> T,
    {
        let mut acc = T::default();
        for p in &self.points {
            acc += f(p.xi, p.eta) * p.weight;
        }
        acc
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }
}

/// Graded nodes on `[0,1]`: returns `(x, 1 − x, weight)` for `x = s^p`
/// (toward 0) using the base rule.
fn graded_toward_zero(rule: &QuadRule, p: f64) -> Vec<(f64, f64, f64)> {
    rule.nodes
        .iter()
        .zip(&rule.complements)
        .zip(&rule.weights)
        .map(|((&s, &sc), &w)| {
            if p == 1.0 {
                (s, sc, w)
            } else {
                let x = s.powf(p);
                (x, 1.0 - x, w * p * s.powf(p - 1.0))
            }
        })
        .collect()
}

/// Coincident-pair rule: diagonal split, two Duffy triangles evaluated at the
/// same `(u, v)` nodes.
pub fn coincident_rule(rule: &QuadRule, grading: Grading) -> Result<PairRule> {
    grading.validate()?;
    // u graded toward 1: 1 − u = (1 − s)^apex
    let us: Vec<(f64, f64, f64)> = graded_toward_zero(
        &QuadRule {
            nodes: rule.complements.clone(),
            weights: rule.weights.clone(),
            complements: rule.nodes.clone(),
        },
        grading.apex,
    )
    .into_iter()
    .map(|(omu, u, w)| (u, omu, w))
    .collect();
    let vs = graded_toward_zero(rule, grading.p);
    let mut points = Vec::with_capacity(2 * us.len() * vs.len());
    for &(u, omu, wu) in &us {
        for &(v, _, wv) in &vs {
            let delta = omu * v;
            let a = u + delta;
            let w = wu * wv * omu;
            // upper triangle η > ξ
            points.push(PairPoint {
                xi: u,
                eta: a,
                weight: w,
                d_xi: -delta,
                d_eta: 0.0,
            });
            // lower triangle ξ > η
            points.push(PairPoint {
                xi: a,
                eta: u,
                weight: w,
                d_xi: delta,
                d_eta: 0.0,
            });
        }
    }
    Ok(PairRule {
        config: PairConfig::Coincident,
        points,
    })
}

/// Touching-pair rule for the given shared corner.
pub fn touching_rule(rule: &QuadRule, corner: Corner, grading: Grading) -> Result<PairRule> {
    grading.validate()?;
    let us = graded_toward_zero(rule, grading.p);
    let mut points = Vec::with_capacity(2 * us.len() * rule.len());
    // Canonical corner (1,0). Offsets from the corner: ξ − 1 = −σ, η = τ.
    let mut push = |sigma: f64, tau: f64, w: f64| {
        let (xi_end, eta_end) = match corner {
            Corner::XiEndEtaStart => (true, false),
            Corner::XiStartEtaEnd => (false, true),
            Corner::BothStart => (false, false),
            Corner::BothEnd => (true, true),
        };
        let (xi, d_xi) = if xi_end { (1.0 - sigma, -sigma) } else { (sigma, sigma) };
        let (eta, d_eta) = if eta_end { (1.0 - tau, -tau) } else { (tau, tau) };
        points.push(PairPoint {
            xi,
            eta,
            weight: w,
            d_xi,
            d_eta,
        });
    };
    for &(u, _, wu) in &us {
        for (&v, &wv) in rule.nodes.iter().zip(&rule.weights) {
            let w = wu * wv * u;
            let uv = u * v;
            // triangle (1,0),(0,0),(0,1): ξ = 1 − u, η = uv
            push(u, uv, w);
            // triangle (1,0),(1,1),(0,1): ξ = 1 − uv, η = u
            push(uv, u, w);
        }
    }
    Ok(PairRule {
        config: PairConfig::Touching(corner),
        points,
    })
}

/// Plain tensor-product rule for smooth integrands.
pub fn regular_rule(rule: &QuadRule, distance_ratio: f64) -> PairRule {
    let mut points = Vec::with_capacity(rule.len() * rule.len());
    for (&xi, &wx) in rule.nodes.iter().zip(&rule.weights) {
        for (&eta, &wy) in rule.nodes.iter().zip(&rule.weights) {
            points.push(PairPoint {
                xi,
                eta,
                weight: wx * wy,
                d_xi: 0.0,
                d_eta: 0.0,
            });
        }
    }
    PairRule {
        config: PairConfig::Separated(distance_ratio),
        points,
    }
}

/// Maximum refinement depth accepted by [`near_singular_rule`].
pub const MAX_NEAR_DEPTH: u32 = 8;

/// Dyadic cells of `[0,1]`, refined `depth` times toward `target`.
fn dyadic_cells(target: f64, depth: u32) -> Vec<(f64, f64)> {
    let mut done = Vec::new();
    let mut active = vec![(0.0, 1.0)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (a, b) in active {
            let m = 0.5 * (a + b);
            for cell in [(a, m), (m, b)] {
                if cell.0 <= target && target <= cell.1 {
                    next.push(cell);
                } else {
                    done.push(cell);
                }
            }
        }
        active = next;
    }
    done.extend(active);
    done.sort_by(|x, y| x.0.total_cmp(&y.0));
    done
}

/// Rule for close but disjoint elements: both parameter intervals are cut
/// into dyadic cells refined toward the nearest points `(ξ*, η*)`, with the
/// base rule applied on every cell of the tensor grid.
pub fn near_singular_rule(
    rule: &QuadRule,
    nearest: (f64, f64),
    depth: u32,
    distance_ratio: f64,
) -> Result<PairRule> {
    if depth > MAX_NEAR_DEPTH {
        return Err(Error::domain(
            "near_singular_value",
            format!("depth {depth} exceeds {MAX_NEAR_DEPTH}"),
        ));
    }
    let xs = dyadic_cells(nearest.0, depth);
    let ys = dyadic_cells(nearest.1, depth);
    Ok(cell_rule(rule, &xs, &ys, distance_ratio))
}

/// Tensor product of `rule` over the cells `xs × ys` of `[0,1]²`.
pub fn cell_rule(rule: &QuadRule, xs: &[(f64, f64)], ys: &[(f64, f64)], distance_ratio: f64) -> PairRule {
    let expand = |cells: &[(f64, f64)]| -> Vec<(f64, f64)> {
        cells
            .iter()
            .flat_map(|&(a, b)| {
                let h = b - a;
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(move |(&t, &w)| (a + h * t, w * h))
            })
            .collect()
    };
    let px = expand(xs);
    let py = expand(ys);
    let mut points = Vec::with_capacity(px.len() * py.len());
    for &(xi, wx) in &px {
        for &(eta, wy) in &py {
            points.push(PairPoint {
                xi,
                eta,
                weight: wx * wy,
                d_xi: 0.0,
                d_eta: 0.0,
            });
        }
    }
    PairRule {
        config: PairConfig::Separated(distance_ratio),
        points,
    }
}

/// Coincident-pair integral of `f` over `[0,1]²` with the diagonal singularity
/// removed by the split Duffy map.
pub fn duffy_coincident<T, F>(f: F, rule: &QuadRule, grading: Grading) -> Result<T>
where
    T: Default + AddAssign + Mul<f64, Output = T>,
    F: Fn(f64, f64) -> T,
{
    Ok(coincident_rule(rule, grading)?.integrate(f))
}

/// Touching-pair integral of `f`, singular only at `corner`.
pub fn duffy_touching<T, F>(f: F, rule: &QuadRule, corner: Corner, grading: Grading) -> Result<T>
where
    T: Default + AddAssign + Mul<f64, Output = T>,
    F: Fn(f64, f64) -> T,
{
    Ok(touching_rule(rule, corner, grading)?.integrate(f))
}

/// Tensor-product Gauss–Legendre value of a smooth integrand.
pub fn integrate_regular_pair<T, F>(f: F, rule: &QuadRule) -> T
where
    T: Default + AddAssign + Mul<f64, Output = T>,
    F: Fn(f64, f64) -> T,
{
    regular_rule(rule, f64::INFINITY).integrate(f)
}

/// Integral of an integrand peaked near `(ξ*, η*)` by dyadic refinement.
pub fn near_singular_value<T, F>(f: F, rule: &QuadRule, nearest: (f64, f64), depth: u32) -> Result<T>
where
    T: Default + AddAssign + Mul<f64, Output = T>,
    F: Fn(f64, f64) -> T,
{
    Ok(near_singular_rule(rule, nearest, depth, 0.0)?.integrate(f))
}
