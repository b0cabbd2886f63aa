//! Rectangular domains, their interior shrinkages, tensor grids and
//! the quadrature used for every spatial integral in the crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math;

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

impl core::ops::Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl core::ops::Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl core::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl core::ops::Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Where a point sits relative to a closed rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

/// Axis-aligned rectangle `[x_lo, x_hi] × [y_lo, y_hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Domain {
    x_lo: f64,
    y_lo: f64,
    x_hi: f64,
    y_hi: f64,
}

impl Domain {
    pub fn new(x_lo: f64, y_lo: f64, x_hi: f64, y_hi: f64) -> Result<Self> {
        let all_finite = [x_lo, y_lo, x_hi, y_hi].iter().all(|v| v.is_finite());
        if !all_finite || !(x_lo < x_hi) || !(y_lo < y_hi) {
            return Err(invalid(
                "domain",
                alloc::format!("need x_lo < x_hi and y_lo < y_hi, got [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}]"),
            ));
        }
        Ok(Domain { x_lo, y_lo, x_hi, y_hi })
    }

    pub const fn unit_square() -> Self {
        Domain {
            x_lo: 0.0,
            y_lo: 0.0,
            x_hi: 1.0,
            y_hi: 1.0,
        }
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }
    pub fn y_lo(&self) -> f64 {
        self.y_lo
    }
    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }
    pub fn y_hi(&self) -> f64 {
        self.y_hi
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi))
    }

    pub fn locate(&self, p: Point) -> Location {
        let inside_x = p.x > self.x_lo && p.x < self.x_hi;
        let inside_y = p.y > self.y_lo && p.y < self.y_hi;
        if inside_x && inside_y {
            return Location::Interior;
        }
        let closed_x = p.x >= self.x_lo && p.x <= self.x_hi;
        let closed_y = p.y >= self.y_lo && p.y <= self.y_hi;
        if closed_x && closed_y {
            Location::Boundary
        } else {
            Location::Exterior
        }
    }

    pub fn contains_closed(&self, p: Point) -> bool {
        self.locate(p) != Location::Exterior
    }

    /// Euclidean distance from `p` to the boundary. Exterior points get
    /// their (positive) distance to the rectangle; use [`Domain::locate`]
    /// to tell the two sides apart.
    pub fn dist_to_boundary(&self, p: Point) -> f64 {
        match self.locate(p) {
            Location::Boundary => 0.0,
            Location::Interior => (p.x - self.x_lo)
                .min(self.x_hi - p.x)
                .min(p.y - self.y_lo)
                .min(self.y_hi - p.y),
            Location::Exterior => {
                let dx = (self.x_lo - p.x).max(0.0).max(p.x - self.x_hi);
                let dy = (self.y_lo - p.y).max(0.0).max(p.y - self.y_hi);
                math::hypot(dx, dy)
            }
        }
    }

    /// Nearest point of the closed rectangle.
    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(self.x_lo, self.x_hi), p.y.clamp(self.y_lo, self.y_hi))
    }

    /// `{x : dist(x, ∂Ω) > eps}`, which for a rectangle is the rectangle
    /// offset inwards by `eps` on every side.
    pub fn shrink(&self, eps: f64) -> Result<Domain> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(invalid("eps", alloc::format!("must be finite and >= 0, got {eps}")));
        }
        if eps == 0.0 {
            return Ok(*self);
        }
        if 2.0 * eps >= self.width().min(self.height()) {
            return Err(Error::EmptyDomain { eps });
        }
        Ok(Domain {
            x_lo: self.x_lo + eps,
            y_lo: self.y_lo + eps,
            x_hi: self.x_hi - eps,
            y_hi: self.y_hi - eps,
        })
    }

    /// Area of the intersection of two rectangles (zero when disjoint).
    pub fn overlap_area(&self, other: &Domain) -> f64 {
        let w = self.x_hi.min(other.x_hi) - self.x_lo.max(other.x_lo);
        let h = self.y_hi.min(other.y_hi) - self.y_lo.max(other.y_lo);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    pub fn contains_domain(&self, other: &Domain) -> bool {
        other.x_lo >= self.x_lo
            && other.x_hi <= self.x_hi
            && other.y_lo >= self.y_lo
            && other.y_hi <= self.y_hi
    }

    /// Gap between `inner` and the boundary of `self`; negative when
    /// `inner` pokes out.
    pub fn margin_of(&self, inner: &Domain) -> f64 {
        (inner.x_lo - self.x_lo)
            .min(self.x_hi - inner.x_hi)
            .min(inner.y_lo - self.y_lo)
            .min(self.y_hi - inner.y_hi)
    }

    /// `|Ω \ Ω_{1/h}|`, the area of the frame of width `1/h`. When the
    /// frame would swallow the domain the whole area is returned.
    pub fn boundary_layer_measure(&self, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(invalid("h", alloc::format!("must be positive, got {h}")));
        }
        match self.shrink(1.0 / h) {
            Ok(inner) => Ok(self.area() - inner.area()),
            Err(Error::EmptyDomain { .. }) => Ok(self.area()),
            Err(e) => Err(e),
        }
    }
}

/// Uniform tensor grid of `(nx + 1) × (ny + 1)` nodes covering a domain.
/// Node `(i, j)` is stored at flat index `j * (nx + 1) + i`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    domain: Domain,
    nx: usize,
    ny: usize,
}

impl Grid {
    pub fn new(domain: Domain, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(invalid("grid", "cell counts must be positive"));
        }
        Ok(Grid { domain, nx, ny })
    }

    pub fn unit_square(n: usize) -> Result<Self> {
        Grid::new(Domain::unit_square(), n, n)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        self.domain.width() / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.domain.height() / self.ny as f64
    }

    pub fn cell_size(&self) -> f64 {
        self.hx().max(self.hy())
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % (self.nx + 1), k / (self.nx + 1))
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx {
            self.domain.x_hi
        } else {
            self.domain.x_lo + self.domain.width() * i as f64 / self.nx as f64
        }
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        if j == self.ny {
            self.domain.y_hi
        } else {
            self.domain.y_lo + self.domain.height() * j as f64 / self.ny as f64
        }
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point {
        Point::new(self.x(i), self.y(j))
    }

    #[inline]
    pub fn node_at(&self, k: usize) -> Point {
        let (i, j) = self.ij(k);
        self.node(i, j)
    }

    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.node_count()).map(move |k| self.node_at(k))
    }

    /// Cell containing `p` (clamped into the closure) and the local
    /// bilinear coordinates in `[0, 1]²`.
    pub(crate) fn locate_cell(&self, p: Point) -> (usize, usize, f64, f64) {
        let sx = ((p.x - self.domain.x_lo) / self.hx()).clamp(0.0, self.nx as f64);
        let sy = ((p.y - self.domain.y_lo) / self.hy()).clamp(0.0, self.ny as f64);
        let i = (math::floor(sx) as usize).min(self.nx - 1);
        let j = (math::floor(sy) as usize).min(self.ny - 1);
        (i, j, sx - i as f64, sy - j as f64)
    }

    /// Index range `lo..=hi` of nodes whose coordinate lies in `[a, b]`
    /// along x (clipped to the grid). Empty ranges return `None`.
    pub(crate) fn x_range(&self, a: f64, b: f64) -> Option<(usize, usize)> {
        axis_range(self.domain.x_lo, self.hx(), self.nx, a, b)
    }

    pub(crate) fn y_range(&self, a: f64, b: f64) -> Option<(usize, usize)> {
        axis_range(self.domain.y_lo, self.hy(), self.ny, a, b)
    }

    /// Nodes lying in the closed rectangle `region`.
    pub fn node_window(&self, region: &Domain) -> Option<NodeWindow> {
        let (i0, i1) = self.x_range(region.x_lo, region.x_hi)?;
        let (j0, j1) = self.y_range(region.y_lo, region.y_hi)?;
        Some(NodeWindow { i0, i1, j0, j1 })
    }

    /// Weights integrating the piecewise-bilinear interpolant of nodal
    /// data exactly over `region`. Partially covered cells contribute in
    /// proportion to their overlap; on the full domain this is the
    /// composite trapezoid rule.
    pub fn weights(&self, region: &Domain) -> Result<QuadratureWeights> {
        let tol = 1e-12 * self.domain.width().max(self.domain.height());
        let d = &self.domain;
        if region.x_lo < d.x_lo - tol
            || region.x_hi > d.x_hi + tol
            || region.y_lo < d.y_lo - tol
            || region.y_hi > d.y_hi + tol
        {
            return Err(invalid("region", "integration region must lie inside the grid's domain"));
        }
        let wx = axis_weights(self.nx, |i| self.x(i), region.x_lo, region.x_hi);
        let wy = axis_weights(self.ny, |j| self.y(j), region.y_lo, region.y_hi);
        Ok(QuadratureWeights { wx, wy })
    }

    pub fn trapezoid_weights(&self) -> QuadratureWeights {
        let wx = axis_weights(self.nx, |i| self.x(i), self.domain.x_lo, self.domain.x_hi);
        let wy = axis_weights(self.ny, |j| self.y(j), self.domain.y_lo, self.domain.y_hi);
        QuadratureWeights { wx, wy }
    }

    /// `∫_region g` for nodal samples `g` of length [`Grid::node_count`].
    pub fn integrate(&self, g: &[f64], region: &Domain) -> Result<f64> {
        if g.len() != self.node_count() {
            return Err(Error::ShapeMismatch(alloc::format!(
                "expected {} nodal values, got {}",
                self.node_count(),
                g.len()
            )));
        }
        Ok(self.weights(region)?.integrate(g))
    }
}

fn axis_range(lo: f64, h: f64, n: usize, a: f64, b: f64) -> Option<(usize, usize)> {
    let first = math::ceil((a - lo) / h - 1e-9).max(0.0);
    let last = math::floor((b - lo) / h + 1e-9).min(n as f64);
    if first > last {
        None
    } else {
        Some((first as usize, last as usize))
    }
}

fn axis_weights(n: usize, coord: impl Fn(usize) -> f64, a: f64, b: f64) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    for k in 0..n {
        let (x0, x1) = (coord(k), coord(k + 1));
        let s = a.max(x0);
        let e = b.min(x1);
        if e <= s {
            continue;
        }
        let h = x1 - x0;
        w[k] += ((x1 - s) * (x1 - s) - (x1 - e) * (x1 - e)) / (2.0 * h);
        w[k + 1] += ((e - x0) * (e - x0) - (s - x0) * (s - x0)) / (2.0 * h);
    }
    w
}

/// Rectangular block of node indices `i0..=i1` × `j0..=j1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeWindow {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl NodeWindow {
    pub fn len(&self) -> usize {
        (self.i1 - self.i0 + 1) * (self.j1 - self.j0 + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major (`j` outer) iteration.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + Clone + '_ {
        (self.j0..=self.j1).flat_map(move |j| (self.i0..=self.i1).map(move |i| (i, j)))
    }
}

/// Separable nodal weights `w_ij = wx_i · wy_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureWeights {
    wx: Vec<f64>,
    wy: Vec<f64>,
}

impl QuadratureWeights {
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.wx[i] * self.wy[j]
    }

    pub fn wx(&self) -> &[f64] {
        &self.wx
    }

    pub fn wy(&self) -> &[f64] {
        &self.wy
    }

    pub fn total(&self) -> f64 {
        self.wx.iter().sum::<f64>() * self.wy.iter().sum::<f64>()
    }

    pub fn integrate(&self, g: &[f64]) -> f64 {
        let nxp = self.wx.len();
        let mut acc = 0.0;
        for (j, &wy) in self.wy.iter().enumerate() {
            if wy == 0.0 {
                continue;
            }
            let row = &g[j * nxp..(j + 1) * nxp];
            let mut s = 0.0;
            for (v, &wx) in row.iter().zip(&self.wx) {
                s += wx * v;
            }
            acc += wy * s;
        }
        acc
    }

    /// Flat per-node weights.
    pub fn to_nodal(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.wx.len() * self.wy.len());
        for &wy in &self.wy {
            for &wx in &self.wx {
                out.push(wx * wy);
            }
        }
        out
    }
}

/// Uniform partition `0 = t_0 < … < t_nt = T`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimePartition {
    t_final: f64,
    nt: usize,
}

impl TimePartition {
    pub fn new(t_final: f64, nt: usize) -> Result<Self> {
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(invalid("t_final", alloc::format!("must be positive, got {t_final}")));
        }
        if nt == 0 {
            return Err(invalid("nt", "need at least one step"));
        }
        Ok(TimePartition { t_final, nt })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.nt
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.nt as f64
    }

    #[inline]
    pub fn time(&self, j: usize) -> f64 {
        if j >= self.nt {
            self.t_final
        } else {
            self.t_final * j as f64 / self.nt as f64
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.nt).map(move |j| self.time(j))
    }

    /// Trapezoid weights over `[t_0, t_upto]`.
    pub fn trapezoid_weights(&self, upto: usize) -> Vec<f64> {
        let upto = upto.min(self.nt);
        let mut w = vec![0.0; upto + 1];
        for j in 0..upto {
            let h = self.time(j + 1) - self.time(j);
            w[j] += 0.5 * h;
            w[j + 1] += 0.5 * h;
        }
        w
    }

    /// Partition keeping every `stride`-th node.
    pub fn coarsened(&self, stride: usize) -> Result<TimePartition> {
        if stride == 0 || !self.nt.is_multiple_of(stride) {
            return Err(invalid(
                "stride",
                alloc::format!("must divide the step count {}, got {stride}", self.nt),
            ));
        }
        TimePartition::new(self.t_final, self.nt / stride)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Domain {
        Domain::unit_square()
    }

    #[test]
    fn distance_examples() {
        let d = unit();
        assert_eq!(d.dist_to_boundary(Point::new(0.5, 0.5)), 0.5);
        assert_eq!(d.dist_to_boundary(Point::new(0.0, 0.3)), 0.0);
        assert!((d.dist_to_boundary(Point::new(0.1, 0.7)) - 0.1).abs() < 1e-15);
        assert_eq!(d.dist_to_boundary(Point::new(2.0, 1.0)), 1.0);
        assert!((d.dist_to_boundary(Point::new(-3.0, -4.0)) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn locate_partitions_the_plane() {
        let d = unit();
        assert_eq!(d.locate(Point::new(0.5, 0.5)), Location::Interior);
        assert_eq!(d.locate(Point::new(1.0, 0.5)), Location::Boundary);
        assert_eq!(d.locate(Point::new(0.0, 0.0)), Location::Boundary);
        assert_eq!(d.locate(Point::new(1.0 + 1e-12, 0.5)), Location::Exterior);
    }

    #[test]
    fn shrink_examples() {
        let d = unit();
        assert_eq!(d.shrink(0.0).unwrap(), d);
        assert_eq!(d.shrink(0.25).unwrap(), Domain::new(0.25, 0.25, 0.75, 0.75).unwrap());
        assert!(matches!(d.shrink(0.5), Err(Error::EmptyDomain { .. })));
        assert!(d.shrink(-0.1).is_err());
    }

    #[test]
    fn shrink_composes() {
        let d = Domain::new(-1.0, 0.0, 3.0, 2.0).unwrap();
        let a = d.shrink(0.2).unwrap().shrink(0.3).unwrap();
        let b = d.shrink(0.5).unwrap();
        assert!((a.x_lo() - b.x_lo()).abs() < 1e-15);
        assert!((a.y_hi() - b.y_hi()).abs() < 1e-15);
    }

    #[test]
    fn frame_measure_examples() {
        let d = unit();
        assert!((d.boundary_layer_measure(10.0).unwrap() - 0.36).abs() < 1e-12);
        assert!((d.boundary_layer_measure(4.0).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(d.boundary_layer_measure(2.0).unwrap(), 1.0);
        assert!(d.boundary_layer_measure(1e9).unwrap() < 1e-8);
        assert!(d.boundary_layer_measure(0.0).is_err());
    }

    #[test]
    fn frame_bound_over_geometric_sweep() {
        let d = unit();
        let mut h = 4.0;
        while h <= 1024.0 {
            let scaled = 2.0 * h * d.boundary_layer_measure(h).unwrap();
            assert!(scaled <= 2.0 * d.perimeter(), "h = {h}: {scaled}");
            h *= 2.0;
        }
    }

    #[test]
    fn weights_sum_to_area() {
        let g = Grid::new(Domain::new(0.0, -1.0, 3.0, 1.0).unwrap(), 17, 9).unwrap();
        let w = g.trapezoid_weights();
        assert!((w.total() - 6.0).abs() < 1e-13);
    }

    #[test]
    fn integrate_examples() {
        let g = Grid::unit_square(256).unwrap();
        let d = unit();
        let ones = vec![1.0; g.node_count()];
        assert!((g.integrate(&ones, &d).unwrap() - 1.0).abs() < 1e-13);

        let half: Vec<f64> = g.nodes().map(|p| if p.x <= 0.5 { 1.0 } else { 0.0 }).collect();
        assert!((g.integrate(&half, &d).unwrap() - 0.5).abs() < 1.0 / 256.0);

        // bilinear per cell, so the rule is exact
        let xy: Vec<f64> = g.nodes().map(|p| p.x * p.y).collect();
        assert!((g.integrate(&xy, &d).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn subregion_weights_are_exact_for_bilinear_data() {
        let g = Grid::unit_square(10).unwrap();
        let r = Domain::new(0.13, 0.21, 0.77, 0.58).unwrap();
        let f: Vec<f64> = g.nodes().map(|p| 1.0 + 2.0 * p.x - p.y + 3.0 * p.x * p.y).collect();
        let exact = {
            let (a, b, c, d) = (r.x_lo(), r.x_hi(), r.y_lo(), r.y_hi());
            (b - a) * (d - c)
                + (b * b - a * a) * (d - c)
                - (b - a) * (d * d - c * c) / 2.0
                + 3.0 * (b * b - a * a) * (d * d - c * c) / 4.0
        };
        assert!((g.integrate(&f, &r).unwrap() - exact).abs() < 1e-13);
        assert!((g.weights(&r).unwrap().total() - r.area()).abs() < 1e-14);
    }

    #[test]
    fn second_order_refinement() {
        let f = |p: Point| libm::sin(3.0 * p.x) * libm::exp(p.y);
        let exact = (1.0 - libm::cos(3.0)) / 3.0 * (core::f64::consts::E - 1.0);
        let mut errs = Vec::new();
        let ns = [8usize, 16, 32, 64];
        for &n in &ns {
            let g = Grid::unit_square(n).unwrap();
            let v: Vec<f64> = g.nodes().map(f).collect();
            errs.push((g.integrate(&v, &unit()).unwrap() - exact).abs());
        }
        let hs: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
        let slope = crate::math::loglog_slope(&hs, &errs);
        assert!(slope >= 1.8, "slope {slope}");
    }

    #[test]
    fn time_partition_endpoints() {
        let t = TimePartition::new(1.0, 1000).unwrap();
        assert_eq!(t.time(0), 0.0);
        assert_eq!(t.time(1000), 1.0);
        let w = t.trapezoid_weights(1000);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        assert!(t.coarsened(3).is_err());
        assert_eq!(t.coarsened(10).unwrap().steps(), 100);
    }
}
