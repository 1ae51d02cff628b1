//! Parametrized boundary curves.
//!
//! A [`BoundaryCurve`] is a list of closed components. Each component maps
//! `t ∈ [0, 2π)` onto the plane and is assembled from one or more
//! [`SmoothArc`]s whose parameter intervals tile `[0, 2π]`; the interval
//! endpoints of a multi-arc component are its corners. Outer components run
//! counterclockwise and holes clockwise, so the outward unit normal is always
//! `(y', −x') / |x'|`.
//!
//! Positions near corners are carried as `anchor + offset`, with the anchor an
//! exact arc endpoint. Graded meshes put nodes within `1e-16` of a corner and
//! the split keeps their mutual distances resolvable.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::discretization::GradingMap;
use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Boundary condition carried by an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    #[default]
    Steklov,
    Neumann,
}

/// Position and first two parameter derivatives at a point of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub pos: Point,
    pub d1: Point,
    pub d2: Point,
}

impl CurvePoint {
    pub fn speed(&self) -> f64 {
        norm(self.d1)
    }

    /// Signed curvature `(x'y'' − y'x'') / |x'|³`.
    pub fn curvature(&self) -> f64 {
        let s = self.speed();
        (self.d1[0] * self.d2[1] - self.d1[1] * self.d2[0]) / (s * s * s)
    }

    /// Outward unit normal `(y', −x') / |x'|`.
    pub fn normal(&self) -> Point {
        let s = self.speed();
        [self.d1[1] / s, -self.d1[0] / s]
    }
}

/// Radial profiles `r(θ)` of star-shaped curves.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    /// `1 + 0.3 cos(3(θ + 0.2 cos θ))`
    OmegaA,
    /// `exp(cos θ) cos²(2θ) + exp(sin θ) sin²(2θ)`
    OmegaB,
    Fourier(ShapeVector),
}

impl RadialProfile {
    /// `(r, r', r'')` at angle `theta`.
    pub fn eval(&self, theta: f64) -> (f64, f64, f64) {
        match self {
            RadialProfile::OmegaA => {
                let phi = 3.0 * (theta + 0.2 * theta.cos());
                let dphi = 3.0 * (1.0 - 0.2 * theta.sin());
                let ddphi = -0.6 * theta.cos();
                let (s, c) = phi.sin_cos();
                (
                    1.0 + 0.3 * c,
                    -0.3 * s * dphi,
                    -0.3 * (c * dphi * dphi + s * ddphi),
                )
            }
            RadialProfile::OmegaB => {
                let (st, ct) = theta.sin_cos();
                let a = ct.exp();
                let da = -st * a;
                let dda = (st * st - ct) * a;
                let c = st.exp();
                let dc = ct * c;
                let ddc = (ct * ct - st) * c;
                let (s2, c2) = (2.0 * theta).sin_cos();
                let (s4, c4) = (4.0 * theta).sin_cos();
                let b = c2 * c2;
                let db = -2.0 * s4;
                let ddb = -8.0 * c4;
                let d = s2 * s2;
                let dd = 2.0 * s4;
                let ddd = 8.0 * c4;
                (
                    a * b + c * d,
                    da * b + a * db + dc * d + c * dd,
                    dda * b + 2.0 * da * db + a * ddb + ddc * d + 2.0 * dc * dd + c * ddd,
                )
            }
            RadialProfile::Fourier(sv) => sv.radius(theta),
        }
    }
}

/// Geometric primitive behind a [`SmoothArc`].
#[derive(Debug, Clone, PartialEq)]
pub enum ArcShape {
    /// `center + (a cos t, ±b sin t)`; the sign is negative when `clockwise`.
    Ellipse {
        center: Point,
        a: f64,
        b: f64,
        clockwise: bool,
    },
    /// `(cos t + κ cos 2t − κ, 1.5 sin t)`
    Kite { kappa: f64 },
    /// `r(t) (cos t, sin t)`
    Polar(RadialProfile),
    /// Straight segment traversed from `from` to `to`.
    Segment { from: Point, to: Point },
    /// Circular arc from angle `theta_from` to `theta_to` (either direction).
    CircularArc {
        center: Point,
        radius: f64,
        theta_from: f64,
        theta_to: f64,
    },
}

/// A smooth piece of a boundary component on the parameter interval
/// `[t_start, t_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothArc {
    pub shape: ArcShape,
    pub t_start: f64,
    pub t_end: f64,
    pub condition: BoundaryCondition,
}

/// Which end of an arc a local offset is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcEnd {
    Start,
    End,
}

impl SmoothArc {
    pub fn new(shape: ArcShape, t_start: f64, t_end: f64) -> Self {
        SmoothArc {
            shape,
            t_start,
            t_end,
            condition: BoundaryCondition::Steklov,
        }
    }

    pub fn with_condition(mut self, condition: BoundaryCondition) -> Self {
        self.condition = condition;
        self
    }

    fn rate(&self) -> f64 {
        1.0 / (self.t_end - self.t_start)
    }

    /// Position and derivatives at curve parameter `t`.
    pub fn eval(&self, t: f64) -> CurvePoint {
        match &self.shape {
            ArcShape::Ellipse {
                center,
                a,
                b,
                clockwise,
            } => {
                let sg = if *clockwise { -1.0 } else { 1.0 };
                let (s, c) = t.sin_cos();
                CurvePoint {
                    pos: [center[0] + a * c, center[1] + sg * b * s],
                    d1: [-a * s, sg * b * c],
                    d2: [-a * c, -sg * b * s],
                }
            }
            ArcShape::Kite { kappa } => {
                let (s, c) = t.sin_cos();
                let (s2, c2) = (2.0 * t).sin_cos();
                CurvePoint {
                    pos: [c + kappa * c2 - kappa, 1.5 * s],
                    d1: [-s - 2.0 * kappa * s2, 1.5 * c],
                    d2: [-c - 4.0 * kappa * c2, -1.5 * s],
                }
            }
            ArcShape::Polar(profile) => {
                let (r, dr, ddr) = profile.eval(t);
                let (s, c) = t.sin_cos();
                CurvePoint {
                    pos: [r * c, r * s],
                    d1: [dr * c - r * s, dr * s + r * c],
                    d2: [
                        ddr * c - 2.0 * dr * s - r * c,
                        ddr * s + 2.0 * dr * c - r * s,
                    ],
                }
            }
            ArcShape::Segment { from, to } => {
                let u = (t - self.t_start) * self.rate();
                let v = [
                    (to[0] - from[0]) * self.rate(),
                    (to[1] - from[1]) * self.rate(),
                ];
                CurvePoint {
                    pos: [
                        from[0] + u * (to[0] - from[0]),
                        from[1] + u * (to[1] - from[1]),
                    ],
                    d1: v,
                    d2: [0.0, 0.0],
                }
            }
            ArcShape::CircularArc {
                center,
                radius,
                theta_from,
                theta_to,
            } => {
                let w = (theta_to - theta_from) * self.rate();
                let th = theta_from + (t - self.t_start) * w;
                let (s, c) = th.sin_cos();
                CurvePoint {
                    pos: [center[0] + radius * c, center[1] + radius * s],
                    d1: [-radius * s * w, radius * c * w],
                    d2: [-radius * c * w * w, -radius * s * w * w],
                }
            }
        }
    }

    /// Exact endpoint position.
    pub fn endpoint(&self, end: ArcEnd) -> Point {
        match (&self.shape, end) {
            (ArcShape::Segment { from, .. }, ArcEnd::Start) => *from,
            (ArcShape::Segment { to, .. }, ArcEnd::End) => *to,
            (
                ArcShape::CircularArc {
                    center,
                    radius,
                    theta_from,
                    theta_to,
                },
                _,
            ) => {
                let th = if end == ArcEnd::Start {
                    *theta_from
                } else {
                    *theta_to
                };
                let (s, c) = exact_sin_cos(th);
                [center[0] + radius * c, center[1] + radius * s]
            }
            (_, ArcEnd::Start) => self.eval(self.t_start).pos,
            (_, ArcEnd::End) => self.eval(self.t_end).pos,
        }
    }

    /// Displacement from an endpoint to the point a parameter distance
    /// `delta ≥ 0` inside the arc, plus the derivatives there.
    pub fn eval_from_end(&self, end: ArcEnd, delta: f64) -> (Point, CurvePoint) {
        let t = match end {
            ArcEnd::Start => self.t_start + delta,
            ArcEnd::End => self.t_end - delta,
        };
        let frame = self.eval(t);
        let disp = match &self.shape {
            ArcShape::Segment { from, to } => {
                let u = delta * self.rate();
                let sg = if end == ArcEnd::Start { 1.0 } else { -1.0 };
                [sg * u * (to[0] - from[0]), sg * u * (to[1] - from[1])]
            }
            ArcShape::CircularArc {
                radius,
                theta_from,
                theta_to,
                ..
            } => {
                let w = (theta_to - theta_from) * self.rate();
                let (th0, dth) = match end {
                    ArcEnd::Start => (*theta_from, delta * w),
                    ArcEnd::End => (*theta_to, -delta * w),
                };
                let (s0, c0) = exact_sin_cos(th0);
                let cm1 = -2.0 * (0.5 * dth).sin().powi(2);
                let sd = dth.sin();
                [
                    radius * (c0 * cm1 - s0 * sd),
                    radius * (s0 * cm1 + c0 * sd),
                ]
            }
            _ => sub(frame.pos, self.endpoint(end)),
        };
        (disp, frame)
    }
}

/// sin/cos that return exact values at multiples of π/2.
fn exact_sin_cos(theta: f64) -> (f64, f64) {
    let q = theta / (0.5 * PI);
    if (q - q.round()).abs() < 1e-15 {
        match (q.round() as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        theta.sin_cos()
    }
}

/// One closed boundary component.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub arcs: Vec<SmoothArc>,
}

impl Component {
    pub fn smooth(shape: ArcShape) -> Self {
        Component {
            arcs: vec![SmoothArc::new(shape, 0.0, TAU)],
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.arcs.len() == 1
    }

    /// Parameter values where the tangent may jump.
    pub fn corner_params(&self) -> Vec<f64> {
        if self.is_smooth() {
            Vec::new()
        } else {
            self.arcs.iter().map(|a| a.t_start).collect()
        }
    }

    fn arc_index(&self, t: f64) -> usize {
        let t = t.rem_euclid(TAU);
        self.arcs
            .iter()
            .position(|a| t >= a.t_start && t < a.t_end)
            .unwrap_or(self.arcs.len() - 1)
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        let arc = &self.arcs[self.arc_index(t)];
        arc.eval(if self.is_smooth() { t } else { t.rem_euclid(TAU) })
    }
}

/// Similarity transform `x ↦ scale·R(angle)·x + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub angle: f64,
    pub shift: Point,
}

impl Default for Similarity {
    fn default() -> Self {
        Similarity {
            scale: 1.0,
            angle: 0.0,
            shift: [0.0, 0.0],
        }
    }
}

impl Similarity {
    #[inline]
    pub fn apply_vec(&self, v: Point) -> Point {
        if self.angle == 0.0 {
            return [self.scale * v[0], self.scale * v[1]];
        }
        let (s, c) = self.angle.sin_cos();
        [
            self.scale * (c * v[0] - s * v[1]),
            self.scale * (s * v[0] + c * v[1]),
        ]
    }

    #[inline]
    pub fn apply_point(&self, p: Point) -> Point {
        let v = self.apply_vec(p);
        [v[0] + self.shift[0], v[1] + self.shift[1]]
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        Similarity {
            scale: self.scale * inner.scale,
            angle: self.angle + inner.angle,
            shift: self.apply_point(inner.shift),
        }
    }
}

/// A planar boundary made of one or more closed components.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    components: Vec<Component>,
    transform: Similarity,
    label: String,
}

/// Samples per component for the self-intersection check.
const INTERSECTION_SAMPLES: usize = 4096;

impl BoundaryCurve {
    /// Builds a curve and validates regularity and simplicity.
    pub fn new(label: impl Into<String>, components: Vec<Component>) -> Result<Self> {
        let curve = BoundaryCurve {
            components,
            transform: Similarity::default(),
            label: label.into(),
        };
        curve.validate()?;
        Ok(curve)
    }

    fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidShape("curve has no components".into()));
        }
        for (ci, comp) in self.components.iter().enumerate() {
            if comp.arcs.is_empty() {
                return Err(Error::InvalidShape(format!("component {ci} has no arcs")));
            }
            let mut t = 0.0;
            for arc in &comp.arcs {
                if (arc.t_start - t).abs() > 1e-12 || arc.t_end <= arc.t_start {
                    return Err(Error::InvalidShape(format!(
                        "component {ci}: arc intervals must tile [0, 2π]"
                    )));
                }
                t = arc.t_end;
            }
            if (t - TAU).abs() > 1e-12 {
                return Err(Error::InvalidShape(format!(
                    "component {ci}: arcs end at {t}, expected 2π"
                )));
            }
            for arc in &comp.arcs {
                for k in 0..=64 {
                    let t = arc.t_start + (arc.t_end - arc.t_start) * (k as f64 + 0.5) / 65.0;
                    let speed = arc.eval(t).speed();
                    if !(speed > 0.0) || !speed.is_finite() {
                        return Err(Error::InvalidShape(format!(
                            "component {ci}: degenerate parametrization at t = {t}"
                        )));
                    }
                }
            }
        }
        let polys: Vec<Vec<Point>> = (0..self.components.len())
            .map(|c| self.sample_component(c, INTERSECTION_SAMPLES))
            .collect();
        if polylines_intersect(&polys) {
            return Err(Error::InvalidShape(format!(
                "{}: boundary self-intersects or components overlap",
                self.label
            )));
        }
        Ok(())
    }

    fn sample_component(&self, c: usize, n: usize) -> Vec<Point> {
        let comp = &self.components[c];
        (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                self.transform.apply_point(comp.eval(t).pos)
            })
            .collect()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn transform(&self) -> &Similarity {
        &self.transform
    }

    pub fn is_smooth(&self) -> bool {
        self.components.iter().all(Component::is_smooth)
    }

    pub fn has_neumann(&self) -> bool {
        self.components
            .iter()
            .flat_map(|c| c.arcs.iter())
            .any(|a| a.condition == BoundaryCondition::Neumann)
    }

    /// Corner parameters of component `c`.
    pub fn corner_params(&self, c: usize) -> Vec<f64> {
        self.components[c].corner_params()
    }

    /// The curve mapped through `sim` (applied after any existing transform).
    pub fn transformed(&self, sim: Similarity) -> BoundaryCurve {
        BoundaryCurve {
            components: self.components.clone(),
            transform: sim.compose(&self.transform),
            label: self.label.clone(),
        }
    }

    /// Dilation about the origin.
    pub fn scaled(&self, factor: f64) -> BoundaryCurve {
        self.transformed(Similarity {
            scale: factor,
            ..Similarity::default()
        })
    }

    /// Point and derivatives of component `c` at parameter `t`, in world
    /// coordinates.
    pub fn eval(&self, c: usize, t: f64) -> CurvePoint {
        self.world(self.components[c].eval(t))
    }

    pub(crate) fn world(&self, p: CurvePoint) -> CurvePoint {
        CurvePoint {
            pos: self.transform.apply_point(p.pos),
            d1: self.transform.apply_vec(p.d1),
            d2: self.transform.apply_vec(p.d2),
        }
    }

    /// Signed curvature at parameter `t` of component `c`.
    pub fn curvature(&self, c: usize, t: f64) -> Result<f64> {
        let comp = self.components.get(c).ok_or_else(|| {
            Error::InvalidParameter(format!("component index {c} out of range"))
        })?;
        let tt = t.rem_euclid(TAU);
        for corner in comp.corner_params() {
            let d = (tt - corner).abs();
            if d < 1e-14 || (TAU - d) < 1e-14 {
                return Err(Error::InvalidParameter(format!(
                    "curvature is undefined at corner parameter {corner}"
                )));
            }
        }
        Ok(self.eval(c, t).curvature())
    }

    /// Integrates `f(point)` against `dt` over the arcs of component `c`
    /// using a graded trapezoidal rule, doubling until the sum settles.
    fn integrate_component(&self, c: usize, f: &impl Fn(&CurvePoint) -> f64) -> f64 {
        let comp = &self.components[c];
        comp.arcs.iter().map(|arc| self.integrate_arc(arc, comp.is_smooth(), f)).sum()
    }

    fn integrate_arc(&self, arc: &SmoothArc, smooth_closed: bool, f: &impl Fn(&CurvePoint) -> f64) -> f64 {
        let map = GradingMap::new(8).expect("degree 8 is valid");
        {
            let len = arc.t_end - arc.t_start;
            let rule = |m: usize| -> (f64, f64) {
                let h = TAU / m as f64;
                let (mut acc, mut mag) = (0.0, 0.0);
                for j in 0..m {
                    let v = if smooth_closed {
                        f(&self.world(arc.eval(j as f64 * h)))
                    } else {
                        let g = map.eval_index(j, m);
                        f(&self.world(arc.eval(arc.t_start + len * g.frac))) * g.deriv * len
                    };
                    acc += v;
                    mag += v.abs();
                }
                (acc * h, mag * h)
            };
            let mut m = 64;
            let (mut prev, _) = rule(m);
            loop {
                m *= 2;
                let (cur, mag) = rule(m);
                let done = (cur - prev).abs() <= 1e-14 * mag || m >= 1 << 16;
                prev = cur;
                if done {
                    break;
                }
            }
            prev
        }
    }

    /// Length of one arc of this curve.
    pub fn arc_length(&self, arc: &SmoothArc) -> f64 {
        self.integrate_arc(arc, false, &|p: &CurvePoint| p.speed())
    }

    /// Length of component `c`.
    pub fn component_perimeter(&self, c: usize) -> f64 {
        self.integrate_component(c, &|p: &CurvePoint| p.speed())
    }

    /// Total length of all components.
    pub fn perimeter(&self) -> f64 {
        (0..self.components.len())
            .map(|c| self.component_perimeter(c))
            .sum()
    }

    /// Enclosed area `½∮(x y' − y x') dt`, holes subtracted through their
    /// clockwise orientation.
    pub fn area(&self) -> f64 {
        // shift to a reference point on the curve to limit cancellation
        let c0 = self.eval(0, 0.0).pos;
        let f = |p: &CurvePoint| {
            let x = p.pos[0] - c0[0];
            let y = p.pos[1] - c0[1];
            x * p.d1[1] - y * p.d1[0]
        };
        0.5 * (0..self.components.len())
            .map(|c| self.integrate_component(c, &f))
            .sum::<f64>()
    }
}

/// Segment intersection test over closed polylines, bucketed on a uniform
/// grid. Adjacent segments of the same polyline share an endpoint and are
/// skipped.
fn polylines_intersect(polys: &[Vec<Point>]) -> bool {
    struct Seg {
        poly: usize,
        idx: usize,
        len: usize,
        a: Point,
        b: Point,
    }
    let mut segs = Vec::new();
    let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
    for (pi, poly) in polys.iter().enumerate() {
        let n = poly.len();
        for i in 0..n {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            for d in 0..2 {
                lo[d] = lo[d].min(a[d]);
                hi[d] = hi[d].max(a[d]);
            }
            segs.push(Seg {
                poly: pi,
                idx: i,
                len: n,
                a,
                b,
            });
        }
    }
    let cells = ((segs.len() as f64).sqrt().ceil() as usize).max(1);
    let span = [(hi[0] - lo[0]).max(1e-300), (hi[1] - lo[1]).max(1e-300)];
    let cell_of = |p: f64, d: usize| -> usize {
        (((p - lo[d]) / span[d] * cells as f64) as usize).min(cells - 1)
    };
    let mut grid: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, s) in segs.iter().enumerate() {
        let (x0, x1) = (cell_of(s.a[0].min(s.b[0]), 0), cell_of(s.a[0].max(s.b[0]), 0));
        let (y0, y1) = (cell_of(s.a[1].min(s.b[1]), 1), cell_of(s.a[1].max(s.b[1]), 1));
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                grid.entry((cx, cy)).or_default().push(k);
            }
        }
    }
    for bucket in grid.values() {
        for (u, &i) in bucket.iter().enumerate() {
            for &j in &bucket[u + 1..] {
                let (s, t) = (&segs[i], &segs[j]);
                if s.poly == t.poly {
                    let d = (s.idx as isize - t.idx as isize).unsigned_abs();
                    if d <= 1 || d == s.len - 1 {
                        continue;
                    }
                }
                if segments_meet(s.a, s.b, t.a, t.b) {
                    return true;
                }
            }
        }
    }
    false
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Closed-segment intersection; collinear pieces meet only if they overlap
/// in more than a point.
fn segments_meet(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (d1, d2) = (orient(a, b, c), orient(a, b, d));
    let (d3, d4) = (orient(c, d, a), orient(c, d, b));
    if d1 == 0.0 && d2 == 0.0 {
        let axis = if (b[0] - a[0]).abs() >= (b[1] - a[1]).abs() { 0 } else { 1 };
        let (lo1, hi1) = (a[axis].min(b[axis]), a[axis].max(b[axis]));
        let (lo2, hi2) = (c[axis].min(d[axis]), c[axis].max(d[axis]));
        return lo1.max(lo2) < hi1.min(hi2);
    }
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

/// Truncated Fourier description of a star-shaped boundary,
/// `r(t) = a0 + Σ a_j cos jt + b_j sin jt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeVector {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Bound on each Fourier coefficient of a [`ShapeVector`].
pub const FOURIER_COEFF_BOUND: f64 = 0.1;

impl ShapeVector {
    pub fn disk(a0: f64, modes: usize) -> Self {
        ShapeVector {
            a0,
            a: vec![0.0; modes],
            b: vec![0.0; modes],
        }
    }

    pub fn modes(&self) -> usize {
        self.a.len()
    }

    /// Checks `a0 > Σ|a_j| + |b_j|` and `|a_j|, |b_j| ≤ 0.1`.
    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.b.len() {
            return Err(Error::InvalidShape(
                "fourier shape needs equally many cosine and sine coefficients".into(),
            ));
        }
        let all = self.a.iter().chain(self.b.iter());
        if all.clone().any(|c| !c.is_finite() || c.abs() > FOURIER_COEFF_BOUND) {
            return Err(Error::InvalidShape(format!(
                "fourier coefficients must satisfy |c| <= {FOURIER_COEFF_BOUND}"
            )));
        }
        let sum: f64 = all.map(|c| c.abs()).sum();
        if !(self.a0 > sum) {
            return Err(Error::InvalidShape(format!(
                "fourier shape requires a0 > Σ|a_j|+|b_j| (a0 = {}, sum = {sum})",
                self.a0
            )));
        }
        Ok(())
    }

    /// `(r, r', r'')` at angle `t`.
    pub fn radius(&self, t: f64) -> (f64, f64, f64) {
        let mut r = self.a0;
        let mut dr = 0.0;
        let mut ddr = 0.0;
        for (j, (aj, bj)) in self.a.iter().zip(&self.b).enumerate() {
            let k = (j + 1) as f64;
            let (s, c) = (k * t).sin_cos();
            r += aj * c + bj * s;
            dr += k * (bj * c - aj * s);
            ddr -= k * k * (aj * c + bj * s);
        }
        (r, dr, ddr)
    }
}

/// Named shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedShape {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// Ellipse with semi-major axis 1 and the given eccentricity.
    EllipseEccentricity { e: f64 },
    Kite { kappa: f64 },
    OmegaA,
    OmegaB,
    Square { side: f64 },
    /// Vertices (0,0),(2,0),(2,1),(1,1),(1,2),(0,2).
    LShape,
    /// Right isosceles triangle with sides 1, 1, √2.
    IsoscelesTriangle,
    /// Half disk: Steklov on the arc, Neumann on the diameter.
    SemicircleMixed { radius: f64 },
    Annulus { outer: f64, inner: f64 },
    Fourier(ShapeVector),
    Polygon(Vec<Point>),
}

/// Parameters for [`make_named_shape`], keyed by name.
pub type ShapeParams = BTreeMap<String, f64>;

fn param(params: &ShapeParams, key: &str, default: Option<f64>) -> Result<f64> {
    match params.get(key).copied().or(default) {
        Some(v) if v.is_finite() => Ok(v),
        Some(v) => Err(Error::InvalidParameter(format!("{key} = {v} is not finite"))),
        None => Err(Error::InvalidParameter(format!("missing shape parameter `{key}`"))),
    }
}

/// Resolves a shape name and parameter map to a [`NamedShape`].
pub fn parse_named_shape(name: &str, params: &ShapeParams) -> Result<NamedShape> {
    let shape = match name {
        "disk" | "circle" => NamedShape::Disk {
            radius: param(params, "radius", Some(1.0))?,
        },
        "ellipse" => {
            if let Some(&e) = params.get("e").or(params.get("eccentricity")) {
                NamedShape::EllipseEccentricity { e }
            } else {
                NamedShape::Ellipse {
                    a: param(params, "a", None)?,
                    b: param(params, "b", None)?,
                }
            }
        }
        "kite" => NamedShape::Kite {
            kappa: param(params, "kappa", Some(0.65))?,
        },
        "omega_a" => NamedShape::OmegaA,
        "omega_b" => NamedShape::OmegaB,
        "square" => NamedShape::Square {
            side: param(params, "side", Some(1.0))?,
        },
        "l_shape" | "lshape" => NamedShape::LShape,
        "isoceles_triangle" | "isosceles_triangle" | "triangle" => NamedShape::IsoscelesTriangle,
        "semicircle_mixed" | "semicircle" => NamedShape::SemicircleMixed {
            radius: param(params, "radius", Some(1.0))?,
        },
        "annulus" => NamedShape::Annulus {
            outer: param(params, "outer", Some(1.0))?,
            inner: param(params, "inner", params.get("eps").copied())?,
        },
        other => return Err(Error::InvalidShape(format!("unknown shape name `{other}`"))),
    };
    Ok(shape)
}

/// Builds a validated [`BoundaryCurve`] for a named shape.
pub fn make_named_shape(shape: &NamedShape) -> Result<BoundaryCurve> {
    let positive = |v: f64, what: &str| -> Result<()> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{what} must be positive, got {v}")))
        }
    };
    match shape {
        NamedShape::Disk { radius } => {
            positive(*radius, "radius")?;
            ellipse_curve("disk", *radius, *radius)
        }
        NamedShape::Ellipse { a, b } => {
            positive(*a, "a")?;
            positive(*b, "b")?;
            ellipse_curve("ellipse", *a, *b)
        }
        NamedShape::EllipseEccentricity { e } => {
            if !(0.0..1.0).contains(e) {
                return Err(Error::InvalidParameter(format!(
                    "eccentricity must lie in [0, 1), got {e}"
                )));
            }
            ellipse_curve("ellipse", 1.0, (1.0 - e * e).sqrt())
        }
        NamedShape::Kite { kappa } => {
            if !(kappa.is_finite() && kappa.abs() < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "kite parameter must satisfy |κ| < 1, got {kappa}"
                )));
            }
            BoundaryCurve::new(
                "kite",
                vec![Component::smooth(ArcShape::Kite { kappa: *kappa })],
            )
        }
        NamedShape::OmegaA => BoundaryCurve::new(
            "omega_a",
            vec![Component::smooth(ArcShape::Polar(RadialProfile::OmegaA))],
        ),
        NamedShape::OmegaB => BoundaryCurve::new(
            "omega_b",
            vec![Component::smooth(ArcShape::Polar(RadialProfile::OmegaB))],
        ),
        NamedShape::Square { side } => {
            positive(*side, "side")?;
            let s = *side;
            polygon_curve("square", &[[0.0, 0.0], [s, 0.0], [s, s], [0.0, s]])
        }
        NamedShape::LShape => polygon_curve(
            "l_shape",
            &[
                [0.0, 0.0],
                [2.0, 0.0],
                [2.0, 1.0],
                [1.0, 1.0],
                [1.0, 2.0],
                [0.0, 2.0],
            ],
        ),
        NamedShape::IsoscelesTriangle => polygon_curve(
            "isoceles_triangle",
            &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        ),
        NamedShape::SemicircleMixed { radius } => {
            positive(*radius, "radius")?;
            let r = *radius;
            let arc = SmoothArc::new(
                ArcShape::CircularArc {
                    center: [0.0, 0.0],
                    radius: r,
                    theta_from: 0.0,
                    theta_to: PI,
                },
                0.0,
                PI,
            );
            let base = SmoothArc::new(
                ArcShape::Segment {
                    from: [-r, 0.0],
                    to: [r, 0.0],
                },
                PI,
                TAU,
            )
            .with_condition(BoundaryCondition::Neumann);
            BoundaryCurve::new(
                "semicircle_mixed",
                vec![Component {
                    arcs: vec![arc, base],
                }],
            )
        }
        NamedShape::Annulus { outer, inner } => {
            positive(*outer, "outer radius")?;
            positive(*inner, "inner radius")?;
            if inner >= outer {
                return Err(Error::InvalidParameter(format!(
                    "annulus needs inner < outer, got inner = {inner}, outer = {outer}"
                )));
            }
            BoundaryCurve::new(
                "annulus",
                vec![
                    Component::smooth(ArcShape::Ellipse {
                        center: [0.0, 0.0],
                        a: *outer,
                        b: *outer,
                        clockwise: false,
                    }),
                    Component::smooth(ArcShape::Ellipse {
                        center: [0.0, 0.0],
                        a: *inner,
                        b: *inner,
                        clockwise: true,
                    }),
                ],
            )
        }
        NamedShape::Fourier(sv) => fourier_curve(sv),
        NamedShape::Polygon(vertices) => polygon_curve("polygon", vertices),
    }
}

fn ellipse_curve(label: &str, a: f64, b: f64) -> Result<BoundaryCurve> {
    BoundaryCurve::new(
        label,
        vec![Component::smooth(ArcShape::Ellipse {
            center: [0.0, 0.0],
            a,
            b,
            clockwise: false,
        })],
    )
}

/// Star-shaped curve from a validated [`ShapeVector`].
pub fn fourier_curve(sv: &ShapeVector) -> Result<BoundaryCurve> {
    sv.validate()?;
    // a0 > Σ|coeffs| keeps r(t) > 0, so the curve is simple without sampling
    Ok(BoundaryCurve {
        components: vec![Component::smooth(ArcShape::Polar(RadialProfile::Fourier(
            sv.clone(),
        )))],
        transform: Similarity::default(),
        label: "fourier".into(),
    })
}

/// Closed polygon; vertices are reordered counterclockwise if needed. Each
/// side occupies an equal share of the parameter interval.
pub fn polygon_curve(label: &str, vertices: &[Point]) -> Result<BoundaryCurve> {
    if vertices.len() < 3 {
        return Err(Error::InvalidShape("polygon needs at least 3 vertices".into()));
    }
    let mut v = vertices.to_vec();
    let signed: f64 = (0..v.len())
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % v.len()]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    if signed < 0.0 {
        v.reverse();
    }
    let m = v.len();
    let arcs = (0..m)
        .map(|i| {
            let from = v[i];
            let to = v[(i + 1) % m];
            if norm(sub(to, from)) == 0.0 {
                return Err(Error::InvalidShape("polygon has repeated vertices".into()));
            }
            let t0 = TAU * i as f64 / m as f64;
            let t1 = if i + 1 == m {
                TAU
            } else {
                TAU * (i + 1) as f64 / m as f64
            };
            Ok(SmoothArc::new(ArcShape::Segment { from, to }, t0, t1))
        })
        .collect::<Result<Vec<_>>>()?;
    BoundaryCurve::new(label, vec![Component { arcs }])
}

/// Shape definition as stored in config files: `{name, params}`,
/// `{fourier: {a0, a, b}}` or `{polygon: [[x, y], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeConfig {
    Fourier { fourier: ShapeVector },
    Polygon { polygon: Vec<Point> },
    Named {
        name: String,
        #[serde(default)]
        params: ShapeParams,
    },
}

impl ShapeConfig {
    pub fn to_shape(&self) -> Result<NamedShape> {
        match self {
            ShapeConfig::Fourier { fourier } => Ok(NamedShape::Fourier(fourier.clone())),
            ShapeConfig::Polygon { polygon } => Ok(NamedShape::Polygon(polygon.clone())),
            ShapeConfig::Named { name, params } => parse_named_shape(name, params),
        }
    }

    pub fn build(&self) -> Result<BoundaryCurve> {
        make_named_shape(&self.to_shape()?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
