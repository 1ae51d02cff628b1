//! Quadrature nodes on boundary curves.
//!
//! Every component carries its own periodic quadrature variable
//! `σ ∈ [0, 2π)` sampled at `n_c` equispaced slots with weight `2π/n_c`.
//! On smooth components `σ` is the curve parameter itself. On components with
//! corners each arc owns a block of consecutive slots and the curve parameter
//! is `t = w(s)` with the grading map below, `s` being the arc-local rescaling
//! of `σ`. The first slot of every arc sits on the corner, where `w'` and
//! hence the quadrature weight vanish; those slots carry no node, so a graded
//! component has fewer nodes than slots. The derivatives stored in [`Node`]
//! are taken with respect to `σ`, so the logarithmic splitting in
//! [`crate::operators`] can treat every component as one periodic curve.

use std::f64::consts::{PI, TAU};

use log::warn;

use crate::error::{Error, Result};
use crate::geometry::{ArcEnd, BoundaryCondition, BoundaryCurve, Point};

/// Polynomial grading map on `[0, 2π]`,
///
/// `w(s) = v(s)^p / (v(s)^p + v(2π − s)^p)`,
/// `v(s) = (1/p − 1/2)((π − s)/π)³ + (s − π)/(pπ) + 1/2`,
///
/// normalized to the unit interval. `w(s) ~ s^p` at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradingMap {
    p: u32,
}

/// Value of a [`GradingMap`] at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradedPoint {
    /// `w(s)`
    pub frac: f64,
    /// `1 − w(s)`, computed without cancellation.
    pub frac_from_end: f64,
    /// `w'(s)`
    pub deriv: f64,
}

impl GradingMap {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=8).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "grading degree must lie in 2..=8, got {p}"
            )));
        }
        Ok(GradingMap { p })
    }

    pub fn degree(&self) -> u32 {
        self.p
    }

    /// `v` and `dv/ds` as polynomials in `u = s/π`, written without the
    /// constant term so `v(0) = 0` exactly.
    fn v(&self, u: f64) -> (f64, f64) {
        let p = self.p as f64;
        let c1 = 1.5 - 2.0 / p;
        let c2 = 1.0 / p - 0.5;
        let v = u * (c1 + c2 * (3.0 * u - u * u));
        let dv = (c1 + c2 * (6.0 * u - 3.0 * u * u)) / PI;
        (v, dv)
    }

    /// Evaluates the map at `s` with `sc = 2π − s` supplied separately so
    /// points near `2π` keep full relative accuracy.
    pub fn eval_pair(&self, s: f64, sc: f64) -> GradedPoint {
        let (v1, d1) = self.v(s / PI);
        let (v2, d2) = self.v(sc / PI);
        if v1 == 0.0 {
            return GradedPoint { frac: 0.0, frac_from_end: 1.0, deriv: 0.0 };
        }
        if v2 == 0.0 {
            return GradedPoint { frac: 1.0, frac_from_end: 0.0, deriv: 0.0 };
        }
        let p = self.p as i32;
        // ratio form avoids underflow of v^p; both halves are monotone in s
        let frac = 1.0 / (1.0 + (v2 / v1).powi(p));
        let frac_from_end = 1.0 / (1.0 + (v1 / v2).powi(p));
        let deriv = self.p as f64 * frac * frac_from_end * (d1 / v1 + d2 / v2);
        GradedPoint { frac, frac_from_end, deriv }
    }

    pub fn eval(&self, s: f64) -> GradedPoint {
        self.eval_pair(s, TAU - s)
    }

    /// The trapezoid node `s_j = 2πj/m`.
    pub fn eval_index(&self, j: usize, m: usize) -> GradedPoint {
        let s = TAU * j as f64 / m as f64;
        let sc = TAU * (m - j) as f64 / m as f64;
        self.eval_pair(s, sc)
    }

    /// `a + (b − a) w(s)`
    pub fn map(&self, s: f64, a: f64, b: f64) -> f64 {
        let g = self.eval(s);
        if g.frac <= 0.5 {
            a + (b - a) * g.frac
        } else {
            b - (b - a) * g.frac_from_end
        }
    }
}

/// How nodes are distributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    Uniform,
    Graded { p: u32 },
}

/// One quadrature node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub component: usize,
    /// Arc index within the component.
    pub arc: usize,
    /// Position on the component's periodic grid, `σ = 2π·slot/n_c`.
    pub slot: usize,
    /// Curve parameter.
    pub t: f64,
    /// Exact reference point; the node sits at `anchor + offset`.
    pub anchor: Point,
    pub offset: Point,
    /// `dz/dσ`
    pub tangent: Point,
    /// `|dz/dσ|`
    pub jacobian: f64,
    pub curvature: f64,
    pub condition: BoundaryCondition,
}

impl Node {
    pub fn position(&self) -> Point {
        [self.anchor[0] + self.offset[0], self.anchor[1] + self.offset[1]]
    }

    /// Outward unit normal.
    pub fn normal(&self) -> Point {
        [self.tangent[1] / self.jacobian, -self.tangent[0] / self.jacobian]
    }

    /// `self − other`, accurate for nodes clustered at a shared corner.
    #[inline]
    pub fn diff(&self, other: &Node) -> Point {
        [
            (self.anchor[0] - other.anchor[0]) + (self.offset[0] - other.offset[0]),
            (self.anchor[1] - other.anchor[1]) + (self.offset[1] - other.offset[1]),
        ]
    }
}

/// Contiguous node block of one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentRange {
    pub start: usize,
    /// Number of nodes.
    pub len: usize,
    /// Number of grid slots `n_c`, including empty corner slots.
    pub grid: usize,
}

impl ComponentRange {
    /// Quadrature weight `2π/n_c`.
    pub fn weight(&self) -> f64 {
        TAU / self.grid as f64
    }
}

/// Nodes and weights on a [`BoundaryCurve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    nodes: Vec<Node>,
    components: Vec<ComponentRange>,
    grading: Grading,
}

impl Discretization {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn components(&self) -> &[ComponentRange] {
        &self.components
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Grading degree, `None` for uniform grids.
    pub fn grading_degree(&self) -> Option<u32> {
        match self.grading {
            Grading::Uniform => None,
            Grading::Graded { p } => Some(p),
        }
    }

    /// Number of nodes, i.e. unknowns.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Total slot count `N`, the requested resolution. Exceeds [`len`]
    /// by one per corner on graded grids.
    ///
    /// [`len`]: Discretization::len
    pub fn grid_len(&self) -> usize {
        self.components.iter().map(|r| r.grid).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn params(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.t).collect()
    }

    pub fn points(&self) -> Vec<Point> {
        self.nodes.iter().map(Node::position).collect()
    }

    pub fn jacobians(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.jacobian).collect()
    }

    /// Arc index of each node.
    pub fn segment_index(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.arc).collect()
    }

    /// Quadrature weight `2π/n_c` of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        self.components[self.nodes[i].component].weight()
    }

    /// `Σ_j w_j f(x_j) |dz/dσ|_j`, the boundary integral of sampled values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| self.weight(i) * n.jacobian * values[i])
            .sum()
    }

    /// Largest distance between neighbouring nodes.
    pub fn max_spacing(&self) -> f64 {
        let mut h: f64 = 0.0;
        for r in &self.components {
            for k in 0..r.len {
                let a = &self.nodes[r.start + k];
                let b = &self.nodes[r.start + (k + 1) % r.len];
                let d = a.diff(b);
                h = h.max(d[0].hypot(d[1]));
            }
        }
        h
    }

    pub fn has_neumann(&self) -> bool {
        self.nodes.iter().any(|n| n.condition == BoundaryCondition::Neumann)
    }
}

/// Splits `total` even nodes across components in proportion to their
/// perimeters, giving each at least 8 and keeping every share even.
fn split_by_perimeter(curve: &BoundaryCurve, total: usize) -> Result<Vec<usize>> {
    let nc = curve.components().len();
    if !total.is_multiple_of(2) || total < 8 * nc {
        return Err(Error::Discretization(format!(
            "node count must be even and at least {}, got {total}",
            8 * nc
        )));
    }
    if nc == 1 {
        return Ok(vec![total]);
    }
    let lens: Vec<f64> = (0..nc).map(|c| curve.component_perimeter(c)).collect();
    let sum: f64 = lens.iter().sum();
    let mut counts: Vec<usize> = lens
        .iter()
        .map(|l| (2.0 * (total as f64 * l / sum / 2.0).round()).max(8.0) as usize)
        .collect();
    let largest = (0..nc).max_by(|&a, &b| lens[a].total_cmp(&lens[b])).unwrap();
    let others: usize = (0..nc).filter(|&c| c != largest).map(|c| counts[c]).sum();
    if others + 8 > total {
        return Err(Error::Discretization(format!(
            "{total} nodes are too few for {nc} components"
        )));
    }
    counts[largest] = total - others;
    Ok(counts)
}

/// Splits the `total` slots of component `c` across its arcs in proportion
/// to arc length (largest remainder, ties to the leading arcs), at least
/// two per arc.
fn split_by_arc_length(curve: &BoundaryCurve, c: usize, total: usize) -> Result<Vec<usize>> {
    let comp = &curve.components()[c];
    let k = comp.arcs.len();
    if total < 2 * k {
        return Err(Error::Discretization(format!(
            "{total} slots are too few for {k} arcs"
        )));
    }
    let lens: Vec<f64> = comp.arcs.iter().map(|a| curve.arc_length(a)).collect();
    let sum: f64 = lens.iter().sum();
    let ideal: Vec<f64> = lens.iter().map(|l| total as f64 * l / sum).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|x| (x.floor() as usize).max(2)).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| (ideal[b] - ideal[b].floor()).total_cmp(&(ideal[a] - ideal[a].floor())));
    // the minimum of two per arc can overshoot; take the excess from the largest arcs
    while counts.iter().sum::<usize>() > total {
        let i = (0..k).max_by_key(|&i| counts[i]).expect("at least one arc");
        counts[i] -= 1;
    }
    let left = total - counts.iter().sum::<usize>();
    for &i in order.iter().cycle().take(left) {
        counts[i] += 1;
    }
    Ok(counts)
}

/// Equispaced grid `t_j = 2πj/n_c` on a curve without corners.
pub fn uniform_grid(curve: &BoundaryCurve, n: usize) -> Result<Discretization> {
    if !curve.is_smooth() {
        return Err(Error::Discretization(
            "curve has corners; use graded_grid".into(),
        ));
    }
    let counts = split_by_perimeter(curve, n)?;
    let mut nodes = Vec::with_capacity(n);
    let mut components = Vec::with_capacity(counts.len());
    for (c, &nc) in counts.iter().enumerate() {
        components.push(ComponentRange { start: nodes.len(), len: nc, grid: nc });
        let arc = &curve.components()[c].arcs[0];
        for k in 0..nc {
            let t = TAU * k as f64 / nc as f64;
            let p = curve.world(arc.eval(t));
            let jac = p.speed();
            nodes.push(Node {
                component: c,
                arc: 0,
                slot: k,
                t,
                anchor: p.pos,
                offset: [0.0, 0.0],
                tangent: p.d1,
                jacobian: jac,
                curvature: p.curvature(),
                condition: arc.condition,
            });
        }
    }
    Ok(Discretization { nodes, components, grading: Grading::Uniform })
}

/// Graded grid with `nodes_per_arc` nodes on every arc.
pub fn graded_grid(curve: &BoundaryCurve, nodes_per_arc: usize, p: u32) -> Result<Discretization> {
    let counts = curve
        .components()
        .iter()
        .map(|c| vec![nodes_per_arc; c.arcs.len()])
        .collect();
    graded_grid_with_counts(curve, counts, p)
}

/// Graded grid with explicit per-arc slot counts (`counts[c][arc]`). Each
/// component's total must be even. Every arc contributes one node fewer
/// than its slot count, the corner slot being empty. Smooth components are
/// graded at `t = 0`.
pub fn graded_grid_with_counts(
    curve: &BoundaryCurve,
    counts: Vec<Vec<usize>>,
    p: u32,
) -> Result<Discretization> {
    let map = GradingMap::new(p)?;
    if p > 6 {
        warn!("grading degree {p} > 6: matrix conditioning deteriorates");
    }
    if counts.len() != curve.components().len() {
        return Err(Error::Discretization("one count list per component required".into()));
    }
    let mut nodes = Vec::new();
    let mut components = Vec::new();
    for (c, (comp, arc_counts)) in curve.components().iter().zip(&counts).enumerate() {
        if arc_counts.len() != comp.arcs.len() {
            return Err(Error::Discretization(format!(
                "component {c}: expected {} arc counts, got {}",
                comp.arcs.len(),
                arc_counts.len()
            )));
        }
        let nc: usize = arc_counts.iter().sum();
        if !nc.is_multiple_of(2) || arc_counts.iter().any(|&m| m < 2) {
            return Err(Error::Discretization(format!(
                "component {c}: per-arc counts must be ≥ 2 with an even total, got {arc_counts:?}"
            )));
        }
        let start = nodes.len();
        let mut slot = 0;
        for (ai, (arc, &m)) in comp.arcs.iter().zip(arc_counts).enumerate() {
            let len = arc.t_end - arc.t_start;
            let speedup = nc as f64 / m as f64;
            let start_anchor = curve.transform().apply_point(arc.endpoint(ArcEnd::Start));
            let end_anchor = curve.transform().apply_point(arc.endpoint(ArcEnd::End));
            for j in 1..m {
                let g = map.eval_index(j, m);
                let (end, delta, anchor) = if g.frac <= 0.5 {
                    (ArcEnd::Start, len * g.frac, start_anchor)
                } else {
                    (ArcEnd::End, len * g.frac_from_end, end_anchor)
                };
                let (disp, frame) = arc.eval_from_end(end, delta);
                let frame = curve.world(frame);
                let scale = len * g.deriv * speedup;
                let tangent = [frame.d1[0] * scale, frame.d1[1] * scale];
                let t = match end {
                    ArcEnd::Start => arc.t_start + delta,
                    ArcEnd::End => arc.t_end - delta,
                };
                nodes.push(Node {
                    component: c,
                    arc: ai,
                    slot: slot + j,
                    t,
                    anchor,
                    offset: curve.transform().apply_vec(disp),
                    tangent,
                    jacobian: frame.speed() * scale,
                    curvature: frame.curvature(),
                    condition: arc.condition,
                });
            }
            slot += m;
        }
        components.push(ComponentRange { start, len: nodes.len() - start, grid: nc });
    }
    Ok(Discretization { nodes, components, grading: Grading::Graded { p } })
}

/// Resolution request: total node count plus grading degree for curves
/// with corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DiscParams {
    pub n: usize,
    pub p: u32,
}

impl DiscParams {
    pub fn new(n: usize, p: u32) -> Self {
        DiscParams { n, p }
    }

    /// Uniform grid for smooth curves; otherwise a graded grid with the `n`
    /// slots split across components by perimeter and across arcs by arc
    /// length.
    pub fn build(&self, curve: &BoundaryCurve) -> Result<Discretization> {
        if curve.is_smooth() {
            return uniform_grid(curve, self.n);
        }
        let per_comp = split_by_perimeter(curve, self.n)?;
        let counts = per_comp
            .iter()
            .enumerate()
            .map(|(c, &nc)| split_by_arc_length(curve, c, nc))
            .collect::<Result<_>>()?;
        graded_grid_with_counts(curve, counts, self.p)
    }

    /// The same parameters at a different node count.
    pub fn with_n(&self, n: usize) -> Self {
        DiscParams { n, p: self.p }
    }
}

impl Default for DiscParams {
    fn default() -> Self {
        DiscParams { n: 256, p: 6 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_named_shape, NamedShape};

    fn shape(s: NamedShape) -> BoundaryCurve {
        make_named_shape(&s).unwrap()
    }

    #[test]
    fn disk_uniform_nodes() {
        let d = uniform_grid(&shape(NamedShape::Disk { radius: 1.0 }), 8).unwrap();
        for (j, (t, jac)) in d.params().iter().zip(d.jacobians()).enumerate() {
            assert!((t - PI * j as f64 / 4.0).abs() < 1e-15);
            assert!((jac - 1.0).abs() < 1e-15);
        }
        assert_eq!(d.grading_degree(), None);
    }

    #[test]
    fn ellipse_jacobians() {
        let d = uniform_grid(&shape(NamedShape::Ellipse { a: 1.0, b: 1.5 }), 16).unwrap();
        for (t, jac) in d.params().iter().zip(d.jacobians()) {
            let expect = (t.sin().powi(2) + 2.25 * t.cos().powi(2)).sqrt();
            assert!((jac - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn kite_jacobian_sum_is_perimeter() {
        let c = shape(NamedShape::Kite { kappa: 0.65 });
        let d = uniform_grid(&c, 256).unwrap();
        let l = d.integrate(&vec![1.0; d.len()]);
        assert!((l - c.perimeter()).abs() < 1e-12);
    }

    #[test]
    fn uniform_rejects_corners_and_bad_counts() {
        assert!(uniform_grid(&shape(NamedShape::Square { side: 1.0 }), 64).is_err());
        let disk = shape(NamedShape::Disk { radius: 1.0 });
        assert!(uniform_grid(&disk, 7).is_err());
        assert!(uniform_grid(&disk, 6).is_err());
    }

    #[test]
    fn grading_degree_bounds() {
        assert!(GradingMap::new(1).is_err());
        assert!(GradingMap::new(9).is_err());
        let sq = shape(NamedShape::Square { side: 1.0 });
        assert!(graded_grid(&sq, 16, 1).is_err());
        assert!(graded_grid(&sq, 16, 9).is_err());
    }

    #[test]
    fn grading_endpoints_and_midpoint() {
        for p in 2..=8 {
            let g = GradingMap::new(p).unwrap();
            assert_eq!(g.map(0.0, -0.3, 2.0), -0.3);
            assert_eq!(g.map(TAU, -0.3, 2.0), 2.0);
            assert!((g.map(PI, 1.0, 3.0) - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn grading_is_monotone() {
        for p in 2..=8 {
            let g = GradingMap::new(p).unwrap();
            // compare whichever of w and 1 − w is the accurate one
            let mut prev = (0.0, 1.0);
            for k in 1..10_000 {
                let e = g.eval(TAU * k as f64 / 10_000.0);
                let cur = (e.frac, e.frac_from_end);
                assert!(cur.0 > prev.0 || cur.1 < prev.1, "p={p} k={k}");
                assert!(cur.0 >= prev.0 && cur.1 <= prev.1, "p={p} k={k}");
                prev = cur;
            }
        }
    }

    #[test]
    fn grading_derivative_matches_finite_difference() {
        let g = GradingMap::new(5).unwrap();
        let h = 1e-6;
        for &s in &[0.2, 1.0, 3.0, 5.5, 6.1] {
            let fd = (g.eval(s + h).frac - g.eval(s - h).frac) / (2.0 * h);
            assert!((fd - g.eval(s).deriv).abs() < 1e-8, "s={s}");
        }
    }

    #[test]
    fn grading_vanishes_to_order_p() {
        // w(s)/s^p and w'(s)/s^(p−1) tend to constants; the ratios of
        // consecutive halvings approach 2^p and 2^(p−1)
        for p in [2u32, 3, 6] {
            let g = GradingMap::new(p).unwrap();
            let s = 1e-4;
            let r0 = g.eval(s).frac / g.eval(s / 2.0).frac;
            let r1 = g.eval(s).deriv / g.eval(s / 2.0).deriv;
            assert!((r0 / 2f64.powi(p as i32) - 1.0).abs() < 1e-3, "p={p} r0={r0}");
            assert!((r1 / 2f64.powi(p as i32 - 1) - 1.0).abs() < 1e-3, "p={p} r1={r1}");
            let e = g.eval_pair(TAU - s, s);
            let e2 = g.eval_pair(TAU - s / 2.0, s / 2.0);
            assert!((e.frac_from_end / e2.frac_from_end / 2f64.powi(p as i32) - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn graded_square_integrates_constants() {
        let sq = shape(NamedShape::Square { side: PI });
        let err = |m: usize| {
            let d = graded_grid(&sq, m, 6).unwrap();
            assert_eq!((d.len(), d.grid_len()), (4 * (m - 1), 4 * m));
            (d.integrate(&vec![1.0; d.len()]) - 4.0 * PI).abs()
        };
        // algebraic rate set by the order of vanishing at the corners
        let ratio = err(32) / err(64);
        assert!(ratio > 40.0, "ratio {ratio}");
        for m in [512, 1024] {
            assert!(err(m) < 1e-13, "m={m}");
        }
    }

    #[test]
    fn graded_arc_integrates_smooth_function() {
        // ∫ x² ds over the semicircle arc is π/2 and over the diameter 2/3
        let c = shape(NamedShape::SemicircleMixed { radius: 1.0 });
        let d = graded_grid(&c, 128, 6).unwrap();
        let f: Vec<f64> = d.points().iter().map(|p| p[0] * p[0]).collect();
        let total = d.integrate(&f);
        assert!((total - (PI / 2.0 + 2.0 / 3.0)).abs() < 1e-10, "{total}");
    }

    #[test]
    fn graded_nodes_cluster_and_stay_on_curve() {
        let sq = shape(NamedShape::Square { side: 1.0 });
        let d = graded_grid(&sq, 64, 6).unwrap();
        let jac = d.jacobians();
        let max = jac.iter().cloned().fold(0.0, f64::max);
        assert!(jac[0] < 1e-6 * max);
        let close = d
            .points()
            .iter()
            .filter(|p| p[0].min(1.0 - p[0]).min(p[1].min(1.0 - p[1])) < 1e-12)
            .count();
        assert!(close >= d.len() - 4 * 2, "all nodes on the boundary");
        // first node of the first side is just right of the origin
        let p0 = d.nodes()[0].position();
        assert!(p0[0] > 0.0 && p0[0] < 1e-6 && p0[1] == 0.0);
        assert_eq!(d.segment_index()[70], 1);
    }

    #[test]
    fn tiny_offsets_resolved_near_corners() {
        let sq = shape(NamedShape::Square { side: 1.0 });
        let d = graded_grid(&sq, 512, 8).unwrap();
        let n = d.nodes();
        let last = &n[n.len() - 1];
        let first = &n[0];
        let dist = first.diff(last);
        let r = dist[0].hypot(dist[1]);
        assert!(r > 0.0 && r < 1e-15);
    }

    #[test]
    fn disc_params_split() {
        let l = shape(NamedShape::LShape);
        let d = DiscParams::new(962, 6).build(&l).unwrap();
        assert_eq!((d.len(), d.grid_len()), (956, 962));
        // sides of length 2 get twice the slots of unit sides
        let per_arc = |a: usize| d.nodes().iter().filter(|n| n.arc == a).count() + 1;
        assert_eq!([per_arc(0), per_arc(1), per_arc(5)], [241, 120, 241]);
        let ann = shape(NamedShape::Annulus { outer: 1.0, inner: 0.5 });
        let d = DiscParams::new(300, 6).build(&ann).unwrap();
        assert_eq!(d.components()[0].len + d.components()[1].len, 300);
        assert_eq!(d.components()[0].len, 200);
        assert_eq!(d.grid_len(), 300);
    }
}
