//! Divergence-free velocity fields built from compactly supported
//! stream functions, `u = (∂ψ/∂y, −∂ψ/∂x)`.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Domain, Grid, Point, Vec2};
use crate::math;

/// 2×2 Jacobian, row `i` holding `∇u_i`.
pub type Jacobian = [[f64; 2]; 2];

/// A (possibly time-dependent) planar vector field.
///
/// `velocity` must be defined on the whole plane; integrators probe
/// slightly outside the domain during a step.
pub trait Velocity {
    fn velocity(&self, p: Point, t: f64) -> Vec2;
    fn jacobian(&self, p: Point, t: f64) -> Jacobian;
}

impl<V: Velocity + ?Sized> Velocity for &V {
    fn velocity(&self, p: Point, t: f64) -> Vec2 {
        (**self).velocity(p, t)
    }
    fn jacobian(&self, p: Point, t: f64) -> Jacobian {
        (**self).jacobian(p, t)
    }
}

/// Scalar time factor `a(t)` multiplying a stream function.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Modulation {
    /// `a ≡ 1`.
    #[default]
    Constant,
    /// `a(t) = t`.
    Linear,
    /// `a(t) = max(t, floor)^{-1/2}`: integrable on `[0, T]` but not
    /// continuous up to `t = 0` as `floor → 0`.
    InverseSqrt { floor: f64 },
}

impl Modulation {
    pub const DEFAULT_FLOOR: f64 = 1e-6;

    pub fn inverse_sqrt() -> Self {
        Modulation::InverseSqrt {
            floor: Self::DEFAULT_FLOOR,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Modulation::Constant => 1.0,
            Modulation::Linear => t,
            Modulation::InverseSqrt { floor } => 1.0 / math::sqrt(t.max(floor)),
        }
    }

    /// `∫_0^t a(s) ds`.
    pub fn integral(&self, t: f64) -> f64 {
        match *self {
            Modulation::Constant => t,
            Modulation::Linear => 0.5 * t * t,
            Modulation::InverseSqrt { floor } => {
                if t <= floor {
                    t / math::sqrt(floor)
                } else {
                    2.0 * math::sqrt(t) - math::sqrt(floor)
                }
            }
        }
    }

    /// `sup |a|` over `[t0, t1]`.
    pub fn sup(&self, t0: f64, t1: f64) -> f64 {
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        match *self {
            Modulation::Constant => 1.0,
            Modulation::Linear => math::abs(lo).max(math::abs(hi)),
            Modulation::InverseSqrt { floor } => 1.0 / math::sqrt(lo.max(floor)),
        }
    }

    /// Whether `a` is continuous on `[0, ∞)` in the sense needed by the
    /// classical theory (the inverse-square-root option is not).
    pub fn is_continuous(&self) -> bool {
        !matches!(self, Modulation::InverseSqrt { .. })
    }
}

/// `exp(-1/(1-w))` for `w = s² < 1`, zero otherwise.
#[inline]
pub(crate) fn bump_of_square(w: f64) -> f64 {
    if w >= 1.0 {
        0.0
    } else {
        math::exp(-1.0 / (1.0 - w))
    }
}

/// `max_s |d/ds exp(-1/(1-s²))|`, found by dense sampling.
pub(crate) fn bump_slope_max() -> f64 {
    let n = 20_000;
    let mut best: f64 = 0.0;
    for i in 1..n {
        let s = i as f64 / n as f64;
        let q = 1.0 - s * s;
        let slope = 2.0 * s * bump_of_square(s * s) / (q * q);
        best = best.max(slope);
    }
    // sampling step is 5e-5; the slope is smooth, so 1% headroom is ample
    best * 1.01
}

/// `ψ(x, t) = A · a(t) · exp(-1/(1 - |x - c|²/R²))`, supported in the
/// closed ball of radius `R` about `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StreamFunction {
    pub center: Point,
    pub radius: f64,
    pub amplitude: f64,
    pub modulation: Modulation,
}

impl StreamFunction {
    pub fn new(center: Point, radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", alloc::format!("must be positive, got {radius}")));
        }
        if !amplitude.is_finite() || !center.x.is_finite() || !center.y.is_finite() {
            return Err(invalid("stream function", "center and amplitude must be finite"));
        }
        Ok(StreamFunction {
            center,
            radius,
            amplitude,
            modulation: Modulation::Constant,
        })
    }

    pub fn with_modulation(mut self, modulation: Modulation) -> Self {
        self.modulation = modulation;
        self
    }

    #[inline]
    fn scaled_square(&self, p: Point) -> (Vec2, f64) {
        let d = p - self.center;
        (d, d.norm_squared() / (self.radius * self.radius))
    }

    pub fn value(&self, p: Point, t: f64) -> f64 {
        let (_, w) = self.scaled_square(p);
        self.amplitude * self.modulation.value(t) * bump_of_square(w)
    }

    /// `∇ψ = A a(t) k(w) (x - c)` with `k(w) = -2 g / (q² R²)`,
    /// `g = exp(-1/q)`, `q = 1 - w`.
    pub fn gradient(&self, p: Point, t: f64) -> Vec2 {
        let (d, w) = self.scaled_square(p);
        if w >= 1.0 {
            return Vec2::ZERO;
        }
        let q = 1.0 - w;
        let g = math::exp(-1.0 / q);
        let k = -2.0 * g / (q * q * self.radius * self.radius);
        d * (self.amplitude * self.modulation.value(t) * k)
    }

    /// Hessian `A a(t) [k δ_ij + 2 k'(w) d_i d_j / R²]`.
    pub fn hessian(&self, p: Point, t: f64) -> [[f64; 2]; 2] {
        let (d, w) = self.scaled_square(p);
        if w >= 1.0 {
            return [[0.0; 2]; 2];
        }
        let r2 = self.radius * self.radius;
        let q = 1.0 - w;
        let g = math::exp(-1.0 / q);
        let k = -2.0 * g / (q * q * r2);
        let dk = -2.0 * g * (2.0 * q - 1.0) / (q * q * q * q * r2);
        let a = self.amplitude * self.modulation.value(t);
        let c = 2.0 * dk / r2;
        [
            [a * (k + c * d.x * d.x), a * c * d.x * d.y],
            [a * c * d.x * d.y, a * (k + c * d.y * d.y)],
        ]
    }

    /// `(ψ_y, -ψ_x)`.
    #[inline]
    pub fn velocity(&self, p: Point, t: f64) -> Vec2 {
        let g = self.gradient(p, t);
        Vec2::new(g.y, -g.x)
    }
}

/// Superposition of stream-function vortices on a domain.
///
/// Divergence vanishes identically and the field is zero on a
/// neighbourhood of the boundary of width [`VelocityField::support_margin`].
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    domain: Domain,
    components: Vec<StreamFunction>,
}

impl VelocityField {
    pub fn new(domain: Domain, components: Vec<StreamFunction>) -> Result<Self> {
        for c in &components {
            let margin = if domain.locate(c.center) == crate::geometry::Location::Interior {
                domain.dist_to_boundary(c.center) - c.radius
            } else {
                -domain.dist_to_boundary(c.center) - c.radius
            };
            if !(margin > 0.0) {
                return Err(Error::SupportViolation {
                    what: "stream function",
                    margin,
                });
            }
        }
        Ok(VelocityField { domain, components })
    }

    pub fn from_stream_function(domain: Domain, psi: StreamFunction) -> Result<Self> {
        VelocityField::new(domain, alloc::vec![psi])
    }

    pub fn zero(domain: Domain) -> Self {
        VelocityField {
            domain,
            components: Vec::new(),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn components(&self) -> &[StreamFunction] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.amplitude == 0.0)
    }

    /// Closed-form evaluation; points outside the closed domain are an error.
    pub fn eval_velocity(&self, p: Point, t: f64) -> Result<Vec2> {
        if !self.domain.contains_closed(p) {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
        Ok(self.velocity(p, t))
    }

    pub fn stream_value(&self, p: Point, t: f64) -> f64 {
        self.components.iter().map(|c| c.value(p, t)).sum()
    }

    /// Smallest distance between any support disc and the boundary;
    /// infinite for the zero field.
    pub fn support_margin(&self) -> f64 {
        self.components
            .iter()
            .map(|c| self.domain.dist_to_boundary(c.center) - c.radius)
            .fold(f64::INFINITY, f64::min)
    }

    /// Upper bound on `sup |u(·, t)|` for `t ∈ [t0, t1]`.
    pub fn speed_bound(&self, t0: f64, t1: f64) -> f64 {
        if self.components.is_empty() {
            return 0.0;
        }
        let slope = bump_slope_max();
        self.components
            .iter()
            .map(|c| math::abs(c.amplitude) * c.modulation.sup(t0, t1) * slope / c.radius)
            .sum()
    }

    /// The shared time factor when every component uses the same one.
    pub fn common_modulation(&self) -> Option<Modulation> {
        match self.components.first() {
            None => Some(Modulation::Constant),
            Some(first) => self
                .components
                .iter()
                .all(|c| c.modulation == first.modulation)
                .then_some(first.modulation),
        }
    }

    pub fn is_continuous_in_time(&self) -> bool {
        self.components.iter().all(|c| c.modulation.is_continuous())
    }

    /// Same spatial profile with the time factor dropped.
    pub fn autonomous(&self) -> VelocityField {
        VelocityField {
            domain: self.domain,
            components: self
                .components
                .iter()
                .map(|c| c.with_modulation(Modulation::Constant))
                .collect(),
        }
    }

    /// Every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> VelocityField {
        VelocityField {
            domain: self.domain,
            components: self
                .components
                .iter()
                .map(|c| StreamFunction {
                    amplitude: c.amplitude * factor,
                    ..*c
                })
                .collect(),
        }
    }

    /// Central-difference divergence at interior nodes (zero on the
    /// boundary rows).
    pub fn discrete_divergence(&self, grid: &Grid, t: f64) -> Vec<f64> {
        let (hx, hy) = (grid.hx(), grid.hy());
        let mut out = alloc::vec![0.0; grid.node_count()];
        for j in 1..grid.ny() {
            for i in 1..grid.nx() {
                let ux = self.velocity(grid.node(i + 1, j), t).x - self.velocity(grid.node(i - 1, j), t).x;
                let vy = self.velocity(grid.node(i, j + 1), t).y - self.velocity(grid.node(i, j - 1), t).y;
                out[grid.index(i, j)] = ux / (2.0 * hx) + vy / (2.0 * hy);
            }
        }
        out
    }
}

impl Velocity for VelocityField {
    #[inline]
    fn velocity(&self, p: Point, t: f64) -> Vec2 {
        let mut acc = Vec2::ZERO;
        for c in &self.components {
            acc = acc + c.velocity(p, t);
        }
        acc
    }

    fn jacobian(&self, p: Point, t: f64) -> Jacobian {
        let mut acc = [[0.0; 2]; 2];
        for c in &self.components {
            let h = c.hessian(p, t);
            // u1 = ψ_y, u2 = -ψ_x
            acc[0][0] += h[1][0];
            acc[0][1] += h[1][1];
            acc[1][0] -= h[0][0];
            acc[1][1] -= h[0][1];
        }
        acc
    }
}

/// Spatially constant flow. It does not vanish on the boundary, so it
/// violates the standing hypotheses; it exists as a negative control.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformFlow(pub Vec2);

impl Velocity for UniformFlow {
    fn velocity(&self, _p: Point, _t: f64) -> Vec2 {
        self.0
    }
    fn jacobian(&self, _p: Point, _t: f64) -> Jacobian {
        [[0.0; 2]; 2]
    }
}

/// `-u`.
#[derive(Clone, Copy, Debug)]
pub struct Negated<V>(pub V);

impl<V: Velocity> Velocity for Negated<V> {
    #[inline]
    fn velocity(&self, p: Point, t: f64) -> Vec2 {
        -self.0.velocity(p, t)
    }
    fn jacobian(&self, p: Point, t: f64) -> Jacobian {
        let j = self.0.jacobian(p, t);
        [[-j[0][0], -j[0][1]], [-j[1][0], -j[1][1]]]
    }
}

/// `a - b`.
#[derive(Clone, Copy, Debug)]
pub struct Difference<A, B>(pub A, pub B);

impl<A: Velocity, B: Velocity> Velocity for Difference<A, B> {
    fn velocity(&self, p: Point, t: f64) -> Vec2 {
        self.0.velocity(p, t) - self.1.velocity(p, t)
    }
    fn jacobian(&self, p: Point, t: f64) -> Jacobian {
        let (a, b) = (self.0.jacobian(p, t), self.1.jacobian(p, t));
        [
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ]
    }
}
