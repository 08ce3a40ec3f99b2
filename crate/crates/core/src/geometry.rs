//! Meridian meshes of isoparametric P1/P2 boundary elements.
//!
//! An element maps `t ∈ [0,1]` to the half-plane through the same shape
//! functions used for the fields. Local node order is `[start, end]` for P1
//! and `[start, end, mid]` for P2. Closed contours run counterclockwise
//! around the conductor cross-section, so `(t_z, −t_r)/|t|` is the outward
//! normal; axis-terminated arcs are oriented the same way.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::MeridianPoint;
use crate::quadrature::{Corner, PairConfig};

/// Polynomial degree of the element shape functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Order {
    P1,
    P2,
}

impl Order {
    pub fn nodes_per_element(self) -> usize {
        match self {
            Order::P1 => 2,
            Order::P2 => 3,
        }
    }
}

impl TryFrom<u8> for Order {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Order::P1),
            2 => Ok(Order::P2),
            _ => Err(format!("element order must be 1 or 2, got {v}")),
        }
    }
}

impl From<Order> for u8 {
    fn from(o: Order) -> u8 {
        match o {
            Order::P1 => 1,
            Order::P2 => 2,
        }
    }
}

/// Shape function values at `t` in local node order; unused slots are zero.
pub fn shape_values(order: Order, t: f64) -> [f64; 3] {
    match order {
        Order::P1 => [1.0 - t, t, 0.0],
        Order::P2 => [(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)],
    }
}

/// One boundary element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    pub order: Order,
    /// Global node ids in local order.
    pub node_ids: Vec<usize>,
}

impl Element {
    pub fn start(&self) -> usize {
        self.node_ids[0]
    }

    pub fn end(&self) -> usize {
        self.node_ids[1]
    }
}

/// Element map written as `x(t) = a + b t + c t²` with exact end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ElementMap {
    pub x0: (f64, f64),
    pub x1: (f64, f64),
    pub b: (f64, f64),
    pub c: (f64, f64),
}

impl ElementMap {
    fn new(order: Order, pts: &[MeridianPoint]) -> Self {
        let x0 = (pts[0].r, pts[0].z);
        let x1 = (pts[1].r, pts[1].z);
        match order {
            Order::P1 => ElementMap {
                x0,
                x1,
                b: (x1.0 - x0.0, x1.1 - x0.1),
                c: (0.0, 0.0),
            },
            Order::P2 => {
                let xm = (pts[2].r, pts[2].z);
                ElementMap {
                    x0,
                    x1,
                    b: (-3.0 * x0.0 - x1.0 + 4.0 * xm.0, -3.0 * x0.1 - x1.1 + 4.0 * xm.1),
                    c: (2.0 * x0.0 + 2.0 * x1.0 - 4.0 * xm.0, 2.0 * x0.1 + 2.0 * x1.1 - 4.0 * xm.1),
                }
            }
        }
    }

    /// `x(t0 + dt) − x(t0)`.
    #[inline]
    pub fn offset(&self, t0: f64, dt: f64) -> (f64, f64) {
        let s = 2.0 * t0 + dt;
        (dt * (self.b.0 + self.c.0 * s), dt * (self.b.1 + self.c.1 * s))
    }

    /// Position, evaluated from the nearer end point.
    #[inline]
    pub fn point(&self, t: f64) -> (f64, f64) {
        if t <= 0.5 {
            let d = self.offset(0.0, t);
            (self.x0.0 + d.0, self.x0.1 + d.1)
        } else {
            let d = self.offset(1.0, t - 1.0);
            (self.x1.0 + d.0, self.x1.1 + d.1)
        }
    }

    #[inline]
    pub fn tangent(&self, t: f64) -> (f64, f64) {
        (self.b.0 + 2.0 * self.c.0 * t, self.b.1 + 2.0 * self.c.1 * t)
    }
}

/// A connected chain of elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contour {
    pub first_element: usize,
    pub element_count: usize,
    /// Closed loop, or an open arc with both ends on the axis.
    pub closed: bool,
}

/// Isoparametric boundary mesh of the meridian curve.
#[derive(Debug, Clone)]
pub struct MeridianMesh {
    pub nodes: Vec<MeridianPoint>,
    pub elements: Vec<Element>,
    pub contours: Vec<Contour>,
    /// `+1` when `(t_z, −t_r)` is outward, `−1` for reversed parametrization.
    normal_sign: f64,
    maps: Vec<ElementMap>,
}

/// Point data of one element at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementEval {
    pub point: MeridianPoint,
    /// Outward unit normal `(n_r, n_z)`.
    pub normal: (f64, f64),
    /// `|dx/dt|`
    pub jacobian: f64,
    shapes: [f64; 3],
    n_shapes: usize,
}

impl ElementEval {
    pub fn shapes(&self) -> &[f64] {
        &self.shapes[..self.n_shapes]
    }
}

/// Piece of a geometric contour before meshing.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Side {
    Line((f64, f64), (f64, f64)),
    /// Circular arc about `center` from angle `from` to `to`.
    Arc {
        center: (f64, f64),
        radius: f64,
        from: f64,
        to: f64,
    },
}

impl Side {
    fn length(&self) -> f64 {
        match *self {
            Side::Line(p, q) => (q.0 - p.0).hypot(q.1 - p.1),
            Side::Arc { radius, from, to, .. } => radius * (to - from).abs(),
        }
    }

    fn at(&self, s: f64) -> MeridianPoint {
        match *self {
            Side::Line(p, q) => {
                if s == 1.0 {
                    MeridianPoint::new(q.0, q.1)
                } else {
                    MeridianPoint::new(p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1))
                }
            }
            Side::Arc {
                center,
                radius,
                from,
                to,
            } => {
                let th = from + s * (to - from);
                // exact zero radius at the poles
                let r = if (th.abs() - 0.5 * PI).abs() < 1e-15 {
                    0.0
                } else {
                    center.0 + radius * th.cos()
                };
                MeridianPoint::new(r.max(0.0), center.1 + radius * th.sin())
            }
        }
    }
}

/// Element counts per side summing to `n`, at least two per side. Even
/// totals whose half is at least 16 are built by halving, so each level of
/// a doubling sequence bisects every element of the previous one.
fn allocate(lengths: &[f64], n: usize) -> Vec<usize> {
    if n % 2 == 0 && n / 2 >= 16 && n / 2 >= 2 * lengths.len() {
        return allocate(lengths, n / 2).into_iter().map(|c| 2 * c).collect();
    }
    let total: f64 = lengths.iter().sum();
    let ideal: Vec<f64> = lengths.iter().map(|l| n as f64 * l / total).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|&x| (x.floor() as usize).max(2)).collect();
    loop {
        let sum: usize = counts.iter().sum();
        if sum == n {
            return counts;
        }
        if sum < n {
            let i = (0..counts.len())
                .max_by(|&a, &b| (ideal[a] - counts[a] as f64).total_cmp(&(ideal[b] - counts[b] as f64)))
                .unwrap();
            counts[i] += 1;
        } else {
            let i = (0..counts.len())
                .filter(|&i| counts[i] > 2)
                .min_by(|&a, &b| (ideal[a] - counts[a] as f64).total_cmp(&(ideal[b] - counts[b] as f64)))
                .unwrap();
            counts[i] -= 1;
        }
    }
}

struct Builder {
    order: Order,
    nodes: Vec<MeridianPoint>,
    elements: Vec<Element>,
    contours: Vec<Contour>,
}

impl Builder {
    fn new(order: Order) -> Self {
        Builder {
            order,
            nodes: Vec::new(),
            elements: Vec::new(),
            contours: Vec::new(),
        }
    }

    fn push_node(&mut self, p: MeridianPoint) -> usize {
        self.nodes.push(p);
        self.nodes.len() - 1
    }

    /// Mesh consecutive sides into one contour.
    fn contour(&mut self, sides: &[Side], counts: &[usize], closed: bool) {
        let first_element = self.elements.len();
        let first_node = self.push_node(sides[0].at(0.0));
        let mut prev = first_node;
        for (si, (side, &count)) in sides.iter().zip(counts).enumerate() {
            for j in 0..count {
                let s0 = j as f64 / count as f64;
                let s1 = (j + 1) as f64 / count as f64;
                let last = si + 1 == sides.len() && j + 1 == count;
                let end = if last && closed {
                    first_node
                } else {
                    self.push_node(side.at(s1))
                };
                let mut ids = vec![prev, end];
                if self.order == Order::P2 {
                    ids.push(self.push_node(side.at(0.5 * (s0 + s1))));
                }
                self.elements.push(Element {
                    order: self.order,
                    node_ids: ids,
                });
                prev = end;
            }
        }
        self.contours.push(Contour {
            first_element,
            element_count: self.elements.len() - first_element,
            closed,
        });
    }

    fn finish(self) -> Result<MeridianMesh> {
        MeridianMesh::from_parts(self.nodes, self.elements, self.contours)
    }
}

fn check_count(n_s: usize, sides: usize) -> Result<()> {
    if n_s < 8 || n_s < 2 * sides {
        return Err(Error::Mesh(format!(
            "n_s = {n_s} is too small: need at least 8 and two elements per side ({sides} sides)"
        )));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Mesh(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

impl MeridianMesh {
    /// Assemble a mesh from explicit nodes and elements. Contours must be
    /// consecutive element runs oriented counterclockwise around the conductor.
    pub fn from_parts(nodes: Vec<MeridianPoint>, elements: Vec<Element>, contours: Vec<Contour>) -> Result<Self> {
        for (i, p) in nodes.iter().enumerate() {
            if !(p.r >= 0.0 && p.r.is_finite() && p.z.is_finite()) {
                return Err(Error::Mesh(format!("node {i} at ({}, {}) is outside r ≥ 0", p.r, p.z)));
            }
        }
        let mut maps = Vec::with_capacity(elements.len());
        for (e, el) in elements.iter().enumerate() {
            if el.node_ids.len() != el.order.nodes_per_element() {
                return Err(Error::Mesh(format!("element {e} has {} nodes", el.node_ids.len())));
            }
            if let Some(&bad) = el.node_ids.iter().find(|&&id| id >= nodes.len()) {
                return Err(Error::Mesh(format!("element {e} references missing node {bad}")));
            }
            let pts: Vec<MeridianPoint> = el.node_ids.iter().map(|&id| nodes[id]).collect();
            maps.push(ElementMap::new(el.order, &pts));
        }
        let mesh = MeridianMesh {
            nodes,
            elements,
            contours,
            normal_sign: 1.0,
            maps,
        };
        for e in 0..mesh.elements.len() {
            for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let tg = mesh.maps[e].tangent(t);
                if !(tg.0.hypot(tg.1) > 0.0) {
                    return Err(Error::Mesh(format!("element {e} has a vanishing Jacobian at t = {t}")));
                }
            }
        }
        Ok(mesh)
    }

    /// Rectangular tube section `[a1, a2] × [−l/2, l/2]`.
    pub fn cylinder_tube(a1: f64, a2: f64, l: f64, n_s: usize, order: Order) -> Result<Self> {
        positive("a1", a1)?;
        positive("l", l)?;
        if a2 <= a1 {
            return Err(Error::Mesh(format!("need a1 < a2, got {a1}, {a2}")));
        }
        Self::conical_tube(a1, a2, a1, a2, l, n_s, order)
    }

    /// Tube with radii `(a1, a2)` at `z = −l/2` and `(a3, a4)` at `z = +l/2`.
    pub fn conical_tube(a1: f64, a2: f64, a3: f64, a4: f64, l: f64, n_s: usize, order: Order) -> Result<Self> {
        for (name, v) in [("a1", a1), ("a3", a3), ("l", l)] {
            positive(name, v)?;
        }
        if a2 <= a1 || a4 <= a3 {
            return Err(Error::Mesh(format!("need a1 < a2 and a3 < a4, got {a1}, {a2}, {a3}, {a4}")));
        }
        let h = 0.5 * l;
        Self::polygon(&[(a1, -h), (a2, -h), (a4, h), (a3, h)], n_s, order)
    }

    /// Closed polygon with counterclockwise vertices in the half-plane `r > 0`
    /// except for isolated axis vertices.
    pub fn polygon(vertices: &[(f64, f64)], n_s: usize, order: Order) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return Err(Error::Mesh("a polygon needs at least three vertices".into()));
        }
        check_count(n_s, m)?;
        let mut area = 0.0;
        let mut sides = Vec::with_capacity(m);
        for i in 0..m {
            let p = vertices[i];
            let q = vertices[(i + 1) % m];
            if p.0 < 0.0 || !p.0.is_finite() || !p.1.is_finite() {
                return Err(Error::Mesh(format!("vertex {i} at ({}, {}) is outside r ≥ 0", p.0, p.1)));
            }
            if p.0 == 0.0 && q.0 == 0.0 {
                return Err(Error::Mesh(format!("side {i} lies on the axis")));
            }
            if p == q {
                return Err(Error::Mesh(format!("side {i} has zero length")));
            }
            area += p.0 * q.1 - q.0 * p.1;
            sides.push(Side::Line(p, q));
        }
        if area <= 0.0 {
            return Err(Error::Mesh("polygon vertices must run counterclockwise in (r, z)".into()));
        }
        let lengths: Vec<f64> = sides.iter().map(Side::length).collect();
        let counts = allocate(&lengths, n_s);
        let mut b = Builder::new(order);
        b.contour(&sides, &counts, true);
        b.finish()
    }

    /// Spherical shell between radii `a1 < a2`, centred at the origin: the
    /// outer arc runs from the south pole to the north pole and the inner
    /// arc back, so both normals point away from the conductor.
    pub fn spherical_shell(a1: f64, a2: f64, n_s: usize, order: Order) -> Result<Self> {
        positive("a1", a1)?;
        if a2 <= a1 || !a2.is_finite() {
            return Err(Error::Mesh(format!("need a1 < a2, got {a1}, {a2}")));
        }
        check_count(n_s, 2)?;
        let outer = Side::Arc {
            center: (0.0, 0.0),
            radius: a2,
            from: -0.5 * PI,
            to: 0.5 * PI,
        };
        let inner = Side::Arc {
            center: (0.0, 0.0),
            radius: a1,
            from: 0.5 * PI,
            to: -0.5 * PI,
        };
        let counts = allocate(&[outer.length(), inner.length()], n_s);
        let mut b = Builder::new(order);
        b.contour(&[outer], &counts[..1], false);
        b.contour(&[inner], &counts[1..], false);
        b.finish()
    }

    /// Same boundary with every element parametrized in the opposite
    /// direction; normals stay outward.
    pub fn reversed(&self) -> Self {
        let elements: Vec<Element> = self
            .elements
            .iter()
            .map(|el| {
                let mut ids = el.node_ids.clone();
                ids.swap(0, 1);
                Element {
                    order: el.order,
                    node_ids: ids,
                }
            })
            .collect();
        let maps = elements
            .iter()
            .map(|el| {
                let pts: Vec<MeridianPoint> = el.node_ids.iter().map(|&id| self.nodes[id]).collect();
                ElementMap::new(el.order, &pts)
            })
            .collect();
        MeridianMesh {
            nodes: self.nodes.clone(),
            elements,
            contours: self.contours.clone(),
            normal_sign: -self.normal_sign,
            maps,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub(crate) fn map(&self, e: usize) -> &ElementMap {
        &self.maps[e]
    }

    /// Outward unit normal and Jacobian from a tangent vector.
    #[inline]
    pub(crate) fn normal_and_jacobian(&self, tg: (f64, f64)) -> ((f64, f64), f64) {
        let j = tg.0.hypot(tg.1);
        let s = self.normal_sign / j;
        ((s * tg.1, -s * tg.0), j)
    }

    /// Position, outward normal, Jacobian and shape values on element `e`.
    pub fn eval_element(&self, e: usize, t: f64) -> Result<ElementEval> {
        let el = self
            .elements
            .get(e)
            .ok_or_else(|| Error::Mesh(format!("element {e} out of range ({} elements)", self.elements.len())))?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain("eval_element", format!("t = {t} outside [0, 1]")));
        }
        let map = &self.maps[e];
        let p = map.point(t);
        let (normal, jacobian) = self.normal_and_jacobian(map.tangent(t));
        Ok(ElementEval {
            point: MeridianPoint::new(p.0.max(0.0), p.1),
            normal,
            jacobian,
            shapes: shape_values(el.order, t),
            n_shapes: el.order.nodes_per_element(),
        })
    }

    /// Straight distance between the end points of element `e`.
    pub fn chord(&self, e: usize) -> f64 {
        let m = &self.maps[e];
        (m.x1.0 - m.x0.0).hypot(m.x1.1 - m.x0.1)
    }

    /// Singular configuration of an element pair, or its separation ratio
    /// `min distance / max chord` sampled along both elements.
    pub fn classify_pair(&self, ei: usize, ej: usize) -> PairConfig {
        if ei == ej {
            return PairConfig::Coincident;
        }
        let a = &self.elements[ei];
        let b = &self.elements[ej];
        for (xi_end, ia) in [(false, a.start()), (true, a.end())] {
            for (eta_end, ib) in [(false, b.start()), (true, b.end())] {
                if ia == ib {
                    return PairConfig::Touching(Corner::from_ends(xi_end, eta_end));
                }
            }
        }
        const SAMPLES: usize = 9;
        let pa: Vec<(f64, f64)> = (0..SAMPLES)
            .map(|i| self.maps[ei].point(i as f64 / (SAMPLES - 1) as f64))
            .collect();
        let pb: Vec<(f64, f64)> = (0..SAMPLES)
            .map(|i| self.maps[ej].point(i as f64 / (SAMPLES - 1) as f64))
            .collect();
        let mut dmin = f64::INFINITY;
        for p in &pa {
            for q in &pb {
                dmin = dmin.min((p.0 - q.0).hypot(p.1 - q.1));
            }
        }
        PairConfig::Separated(dmin / self.chord(ei).max(self.chord(ej)))
    }

    /// Plain-text node and element listing for debugging.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# nodes: id r z");
        for (i, p) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "{i} {:.17e} {:.17e}", p.r, p.z);
        }
        let _ = writeln!(s, "# elements: id node_ids");
        for (i, el) in self.elements.iter().enumerate() {
            let ids: Vec<String> = el.node_ids.iter().map(|id| id.to_string()).collect();
            let _ = writeln!(s, "{i} {}", ids.join(" "));
        }
        s
    }
}
