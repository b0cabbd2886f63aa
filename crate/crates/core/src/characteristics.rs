//! Flow maps and the classical solution `ρ(x, t) = ρ₀(X(0; t, x))`.
//!
//! For `ρ_t − u·∇ρ = 0` the density is constant along curves with
//! `dX/ds = −u(X, s)`, so a node's value at time `t` is read off by
//! integrating `−u` from `t` back to `0` and sampling `ρ₀` at the foot.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fields::{Density, Layer, ScalarField, SpatialBump, Velocity, VelocityField};
use crate::geometry::{Domain, Grid, Point, TimePartition};
use crate::math;
use crate::par;

/// Fraction of a cell a trajectory may travel per step.
pub const CFL_SAFETY: f64 = 0.5;

/// Resolution used by [`flow_map`] when no grid is supplied.
pub const DEFAULT_RESOLUTION: usize = 256;

/// Fixed-step classical RK4 on a rectangle.
///
/// Steps are shortened so that an integer number of them covers the
/// requested interval exactly. Exits from the domain of at most
/// `clamp_tolerance` are projected back; larger ones are errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowMapIntegrator {
    domain: Domain,
    max_step: f64,
    clamp_tolerance: f64,
}

impl FlowMapIntegrator {
    pub fn new(domain: Domain, max_step: f64, clamp_tolerance: f64) -> Result<Self> {
        if !(max_step > 0.0) || !max_step.is_finite() {
            return Err(invalid("max_step", alloc::format!("must be positive, got {max_step}")));
        }
        if !(clamp_tolerance >= 0.0) {
            return Err(invalid(
                "clamp_tolerance",
                alloc::format!("must be nonnegative, got {clamp_tolerance}"),
            ));
        }
        Ok(FlowMapIntegrator {
            domain,
            max_step,
            clamp_tolerance,
        })
    }

    /// Step from the CFL-like rule `speed · dt ≤ 0.5 · min(hx, hy)`,
    /// clamp tolerance one cell.
    pub fn for_grid(grid: &Grid, speed_bound: f64) -> Self {
        let h = grid.hx().min(grid.hy());
        let max_step = if speed_bound > 0.0 {
            CFL_SAFETY * h / speed_bound
        } else {
            f64::INFINITY
        };
        FlowMapIntegrator {
            domain: *grid.domain(),
            max_step,
            clamp_tolerance: h,
        }
    }

    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    pub fn clamp_tolerance(&self) -> f64 {
        self.clamp_tolerance
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Same integrator with the step divided by `factor`.
    pub fn refined(&self, factor: f64) -> Self {
        FlowMapIntegrator {
            max_step: self.max_step / factor,
            ..*self
        }
    }

    /// Number of steps used for an interval of length `len`.
    pub fn steps_for(&self, len: f64) -> usize {
        let len = math::abs(len);
        if len == 0.0 || !self.max_step.is_finite() {
            return usize::from(len != 0.0);
        }
        (math::ceil(len / self.max_step) as usize).max(1)
    }

    /// Solve `dX/ds = v(X, s)` from `(t_from, x)` to `t_to`.
    pub fn integrate(&self, v: &(impl Velocity + ?Sized), t_from: f64, t_to: f64, x: Point) -> Result<Point> {
        if !self.domain.contains_closed(x) {
            return Err(Error::OutsideDomain { x: x.x, y: x.y });
        }
        let n = self.steps_for(t_to - t_from);
        if n == 0 {
            return Ok(x);
        }
        let h = (t_to - t_from) / n as f64;
        let mut p = x;
        for k in 0..n {
            let t = t_from + h * k as f64;
            p = rk4_step(v, p, t, h);
            let excess = self.excess(p);
            if excess > self.clamp_tolerance {
                return Err(Error::IntegrationBlowup {
                    excess,
                    time: t + h,
                });
            }
        }
        Ok(self.domain.clamp(p))
    }

    fn excess(&self, p: Point) -> f64 {
        if self.domain.contains_closed(p) {
            0.0
        } else {
            (p - self.domain.clamp(p)).norm()
        }
    }
}

#[inline]
fn rk4_step(v: &(impl Velocity + ?Sized), p: Point, t: f64, h: f64) -> Point {
    let k1 = v.velocity(p, t);
    let k2 = v.velocity(p + k1 * (0.5 * h), t + 0.5 * h);
    let k3 = v.velocity(p + k2 * (0.5 * h), t + 0.5 * h);
    let k4 = v.velocity(p + k3 * h, t + h);
    p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Trajectory of `dX/ds = u(X, s)` from `(t_from, x)` evaluated at `t_to`,
/// with the step rule of a `DEFAULT_RESOLUTION`² grid on `u`'s domain.
pub fn flow_map(u: &VelocityField, t_from: f64, t_to: f64, x: Point) -> Result<Point> {
    let grid = Grid::new(*u.domain(), DEFAULT_RESOLUTION, DEFAULT_RESOLUTION)?;
    FlowMapIntegrator::for_grid(&grid, u.speed_bound(t_from, t_to)).integrate(u, t_from, t_to, x)
}

/// Where the node at `x` and time `t` came from: the point `X(0)` of the
/// backward characteristic through `(x, t)`.
pub fn foot_point(integrator: &FlowMapIntegrator, u: &VelocityField, t: f64, x: Point) -> Result<Point> {
    integrator.integrate(&crate::fields::Negated(u), t, 0.0, x)
}

/// Classical solution sampled on `grid` at every node of `times`.
///
/// `rho0` may be a [`Layer`] (sampled data, read by bilinear
/// interpolation) or any analytic [`Density`].
pub fn solve_classical<D>(rho0: &D, u: &VelocityField, grid: &Grid, times: &TimePartition) -> Result<ScalarField>
where
    D: Density + Sync + ?Sized,
{
    let nodes: Vec<Point> = grid.nodes().collect();
    let mut layers = Vec::with_capacity(times.steps() + 1);
    layers.push(Layer::from_values_unchecked(
        *grid,
        nodes.iter().map(|&p| rho0.value(p)).collect(),
    ));
    if u.is_zero() {
        let first = layers[0].clone();
        layers.resize(times.steps() + 1, first);
        return ScalarField::new(*times, layers);
    }

    match u.common_modulation() {
        Some(m) => {
            // u = m(t) U(x): the backward characteristic from time t lands
            // on the forward U-flow of x for time A(t) = ∫_0^t m, so feet
            // can be advanced layer by layer.
            let shape = u.autonomous();
            let integrator = FlowMapIntegrator::for_grid(grid, shape.speed_bound(0.0, 0.0));
            let mut feet = nodes;
            for j in 1..=times.steps() {
                let a0 = m.integral(times.time(j - 1));
                let a1 = m.integral(times.time(j));
                let next: Vec<Result<Point>> =
                    par::map_range(feet.len(), |k| integrator.integrate(&shape, a0, a1, feet[k]));
                feet = next.into_iter().collect::<Result<Vec<_>>>()?;
                layers.push(Layer::from_values_unchecked(
                    *grid,
                    feet.iter().map(|&p| rho0.value(p)).collect(),
                ));
            }
        }
        None => {
            for j in 1..=times.steps() {
                let t = times.time(j);
                let integrator = FlowMapIntegrator::for_grid(grid, u.speed_bound(0.0, t));
                let feet: Vec<Result<Point>> =
                    par::map_range(nodes.len(), |k| foot_point(&integrator, u, t, nodes[k]));
                let values = feet
                    .into_iter()
                    .map(|f| f.map(|p| rho0.value(p)))
                    .collect::<Result<Vec<_>>>()?;
                layers.push(Layer::from_values_unchecked(*grid, values));
            }
        }
    }
    ScalarField::new(*times, layers)
}

/// `|∫ρ(t₀)φ − ∫ρ₀φ + ∫_0^{t₀}∫ρ (u·∇φ)|` with `t₀` the time node `j0`.
///
/// Space integrals use the trapezoid rule on the field's grid, the time
/// integral the trapezoid rule on its time nodes.
pub fn slice_identity_residual(
    rho: &ScalarField,
    rho0: &Layer,
    u: &(impl Velocity + Sync),
    phi: &SpatialBump,
    j0: usize,
) -> Result<f64> {
    let grid = rho.grid();
    if rho0.grid() != grid {
        return Err(Error::ShapeMismatch("initial layer and field use different grids".into()));
    }
    if j0 > rho.times().steps() {
        return Err(invalid("t0", alloc::format!("time index {j0} beyond the last node")));
    }
    let margin = phi.margin_in(grid.domain());
    if !(margin > 0.0) {
        return Err(Error::SupportViolation {
            what: "test function",
            margin,
        });
    }
    let Some(win) = grid.node_window(&phi.support_box()) else {
        return Ok(0.0);
    };
    let w = grid.trapezoid_weights();
    let mut phi_w = Vec::with_capacity(win.len());
    let mut grad = Vec::with_capacity(win.len());
    for (i, j) in win.iter() {
        let p = grid.node(i, j);
        phi_w.push(w.weight(i, j) * phi.eval(p));
        grad.push(phi.gradient(p) * w.weight(i, j));
    }
    let pair = |layer: &Layer| -> f64 {
        win.iter()
            .zip(&phi_w)
            .map(|((i, j), &c)| c * layer.at(i, j))
            .sum()
    };
    let tw = rho.times().trapezoid_weights(j0);
    let flux: Vec<f64> = par::map_range(j0 + 1, |jt| {
        let t = rho.times().time(jt);
        let layer = rho.layer(jt);
        win.iter()
            .zip(&grad)
            .map(|((i, j), g)| layer.at(i, j) * u.velocity(grid.node(i, j), t).dot(*g))
            .sum::<f64>()
    });
    let advective: f64 = tw.iter().zip(&flux).map(|(a, b)| a * b).sum();
    Ok(math::abs(pair(rho.layer(j0)) - pair(rho0) + advective))
}
