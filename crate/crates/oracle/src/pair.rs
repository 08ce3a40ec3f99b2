//! Brute-force Galerkin matrices for straight two-node elements.
//!
//! Each element-pair double integral is computed by nested adaptive
//! quadrature, once for the Laplace kernel and once for the bounded Helmholtz
//! remainder. The inner interval is split at the diagonal for coincident
//! pairs; for the Laplace part touching pairs are split into two Duffy
//! triangles at the shared corner.

use num_complex::Complex64;

use crate::kernels::{helmholtz_remainder, laplace_agm, Sep};
use crate::quad::{integrate_vec, Tolerance};

/// Closed polygon of straight elements; `elements[e] = (a, b)` runs from node
/// `a` to node `b`.
#[derive(Debug, Clone)]
pub struct Polygon {
    pub nodes: Vec<(f64, f64)>,
    pub elements: Vec<(usize, usize)>,
}

/// Dense matrices indexed `[i][j]`.
#[derive(Debug, Clone)]
pub struct Matrices {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<Complex64>>,
    pub k: Vec<Vec<Complex64>>,
    pub vk: Vec<Vec<Complex64>>,
    pub kk: Vec<Vec<Complex64>>,
    pub vs: Vec<Vec<Complex64>>,
}

fn zeros(n: usize) -> Vec<Vec<Complex64>> {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

struct Seg {
    p: (f64, f64),
    t: (f64, f64),
    len: f64,
    normal: (f64, f64),
    ids: [usize; 2],
}

impl Seg {
    fn at(&self, s: f64) -> (f64, f64) {
        (self.p.0 + s * self.t.0, self.p.1 + s * self.t.1)
    }
}

/// `[0, 1]` with break points `2^{−j}` away from `end` (0 or 1).
fn graded_breaks(end: f64) -> Vec<f64> {
    let mut b = vec![0.0, 1.0];
    for j in 1..=40 {
        let t = 0.5f64.powi(j);
        b.push(if end == 0.0 { t } else { 1.0 - t });
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Parameters of the shared node on each element, if any.
fn shared_corner(x: &Seg, y: &Seg) -> Option<(f64, f64)> {
    for a in 0..2 {
        for b in 0..2 {
            if x.ids[a] == y.ids[b] {
                return Some((a as f64, b as f64));
            }
        }
    }
    None
}

pub fn assemble(poly: &Polygon, k: Complex64, tol: Tolerance) -> Matrices {
    let n = poly.nodes.len();
    let segs: Vec<Seg> = poly
        .elements
        .iter()
        .map(|&(a, b)| {
            let p = poly.nodes[a];
            let q = poly.nodes[b];
            let t = (q.0 - p.0, q.1 - p.1);
            let len = t.0.hypot(t.1);
            Seg {
                p,
                t,
                len,
                normal: (t.1 / len, -t.0 / len),
                ids: [a, b],
            }
        })
        .collect();

    let mut m = vec![vec![0.0; n]; n];
    for s in &segs {
        let vals = integrate_vec(
            |xi| {
                let r = s.at(xi).0;
                let sh = [1.0 - xi, xi];
                let mut out = Vec::with_capacity(4);
                for a in 0..2 {
                    for b in 0..2 {
                        out.push(Complex64::new(0.5 * sh[a] * sh[b] * r * s.len, 0.0));
                    }
                }
                out
            },
            &[0.0, 1.0],
            tol,
        );
        for a in 0..2 {
            for b in 0..2 {
                m[s.ids[a]][s.ids[b]] += vals[2 * a + b].re;
            }
        }
    }

    let mut out = Matrices {
        m,
        v: zeros(n),
        k: zeros(n),
        vk: zeros(n),
        kk: zeros(n),
        vs: zeros(n),
    };
    let identity = |u: f64, v: f64| (u, v, 0.0, 0.0, 1.0);
    for (ex, sx) in segs.iter().enumerate() {
        for (ey, sy) in segs.iter().enumerate() {
            let coincident = ex == ey;
            let corner = if coincident { None } else { shared_corner(sx, sy) };
            let lap_kernel = |sep: Sep| laplace_agm(sep).map(|v| Complex64::new(v, 0.0));
            let lap = match corner {
                Some((xc, yc)) => {
                    // Duffy triangles around the shared corner
                    let sx_ = if xc == 0.0 { 1.0 } else { -1.0 };
                    let sy_ = if yc == 0.0 { 1.0 } else { -1.0 };
                    let at = move |a: f64, b: f64| (xc + sx_ * a, yc + sy_ * b, sx_ * a, sy_ * b, a.max(b));
                    let lower = move |u: f64, v: f64| at(u, u * v);
                    let upper = move |u: f64, v: f64| at(u * v, u);
                    let outer = graded_breaks(0.0);
                    let plain = |_: f64| vec![0.0, 1.0];
                    let p = pair_integral(sx, sy, Layout::Corner, &outer, &plain, &lower, tol, lap_kernel);
                    let q = pair_integral(sx, sy, Layout::Corner, &outer, &plain, &upper, tol, lap_kernel);
                    [add(p[0], q[0]), add(p[1], q[1]), add(p[2], q[2])]
                }
                None if coincident => {
                    let mut outer = graded_breaks(0.0);
                    outer.extend(graded_breaks(1.0));
                    outer.sort_by(f64::total_cmp);
                    outer.dedup();
                    let diagonal = |xi: f64| vec![0.0, xi, 1.0];
                    pair_integral(sx, sy, Layout::Coincident, &outer, &diagonal, &identity, tol, lap_kernel)
                }
                None => {
                    let plain = |_: f64| vec![0.0, 1.0];
                    pair_integral(sx, sy, Layout::Apart, &[0.0, 1.0], &plain, &identity, tol, lap_kernel)
                }
            };
            let inner = |xi: f64| -> Vec<f64> {
                if coincident {
                    vec![0.0, xi, 1.0]
                } else {
                    vec![0.0, 1.0]
                }
            };
            let layout = if coincident { Layout::Coincident } else { Layout::Apart };
            let rem = pair_integral(sx, sy, layout, &[0.0, 1.0], &inner, &identity, tol, |sep| {
                helmholtz_remainder(sep, k, tol)
            });
            let targets = [
                (&mut out.v, lap[0]),
                (&mut out.k, lap[1]),
                (&mut out.vk, add(lap[0], rem[0])),
                (&mut out.kk, add(lap[1], rem[1])),
                (&mut out.vs, add(lap[2], rem[2])),
            ];
            for (mat, vals) in targets {
                for a in 0..2 {
                    for b in 0..2 {
                        mat[sx.ids[a]][sy.ids[b]] += vals[2 * a + b];
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Layout {
    Coincident,
    Corner,
    Apart,
}

fn add(a: [Complex64; 4], b: [Complex64; 4]) -> [Complex64; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Element-pair integrals of `[G r_y, ∂G/∂n_y r_y, G n_r(y)]` against the
/// shape-function products, weighted by `r_x`. The integration variables
/// `(u, v)` map to element parameters `(ξ, η)`, their offsets from the
/// shared corner and the Jacobian.
#[allow(clippy::too_many_arguments)]
fn pair_integral<K, B, M>(
    sx: &Seg,
    sy: &Seg,
    layout: Layout,
    outer: &[f64],
    inner: &B,
    map: &M,
    tol: Tolerance,
    kernel: K,
) -> [[Complex64; 4]; 3]
where
    K: Fn(Sep) -> [Complex64; 3],
    B: Fn(f64) -> Vec<f64>,
    M: Fn(f64, f64) -> (f64, f64, f64, f64, f64),
{
    let vals = integrate_vec(
        |u| {
            integrate_vec(
                |v| {
                    let (xi, eta, dxi, deta, jac) = map(u, v);
                    let x = sx.at(xi);
                    let y = sy.at(eta);
                    let (dr, dz) = match layout {
                        Layout::Coincident => ((xi - eta) * sx.t.0, (xi - eta) * sx.t.1),
                        Layout::Corner => (dxi * sx.t.0 - deta * sy.t.0, dxi * sx.t.1 - deta * sy.t.1),
                        Layout::Apart => (x.0 - y.0, x.1 - y.1),
                    };
                    if dr == 0.0 && dz == 0.0 {
                        return vec![Complex64::new(0.0, 0.0); 12];
                    }
                    let g = kernel(Sep {
                        r: x.0,
                        rp: y.0,
                        dr,
                        dz,
                    });
                    let (nr, nz) = sy.normal;
                    let w = sx.len * sy.len * x.0 * jac;
                    let ry = y.0;
                    let terms = [g[0] * ry, (g[1] * nr + g[2] * nz) * ry, g[0] * nr];
                    let shx = [1.0 - xi, xi];
                    let shy = [1.0 - eta, eta];
                    let mut o = Vec::with_capacity(12);
                    for v in terms {
                        for a in 0..2 {
                            for b in 0..2 {
                                o.push(v * (w * shx[a] * shy[b]));
                            }
                        }
                    }
                    o
                },
                &inner(u),
                tol,
            )
        },
        outer,
        tol,
    );
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 3];
    for (q, row) in out.iter_mut().enumerate() {
        row.copy_from_slice(&vals[4 * q..4 * q + 4]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rectangle() -> Polygon {
        Polygon {
            nodes: vec![(0.009, -0.012), (0.011, -0.012), (0.011, 0.012), (0.009, 0.012)],
            elements: vec![(0, 1), (1, 2), (2, 3), (3, 0)],
        }
    }

    #[test]
    fn static_limit_and_mirror_symmetry() {
        let m = assemble(&rectangle(), Complex64::new(0.0, 0.0), Tolerance::rel(1e-8));
        let mirror = [3, 2, 1, 0];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.vk[i][j], m.v[i][j]);
                assert_eq!(m.kk[i][j], m.k[i][j]);
                let (a, b) = (m.k[i][j], m.k[mirror[i]][mirror[j]]);
                assert!((a - b).norm() < 1e-7 * a.norm().max(1e-6), "{i}{j}: {a} {b}");
                assert!((m.v[i][j] - m.v[j][i]).norm() < 1e-7 * m.v[i][j].norm());
            }
        }
    }
}
