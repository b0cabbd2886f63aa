use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fields::{Layer, ScalarField, Velocity};
use crate::geometry::{Domain, Grid, QuadratureWeights, TimePartition};
use crate::math;
use crate::par;

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(invalid("p", alloc::format!("must lie in [1, inf], got {p}")));
    }
    Ok(())
}

fn weighted_norm(values: &[f64], w: &QuadratureWeights, p: f64) -> f64 {
    let nx = w.wx().len();
    let mut acc = 0.0;
    for (k, &v) in values.iter().enumerate() {
        let wk = w.weight(k % nx, k / nx);
        if wk != 0.0 {
            acc += wk * math::pow(math::abs(v), p);
        }
    }
    if p == 1.0 {
        acc
    } else {
        math::pow(acc, 1.0 / p)
    }
}

/// `‖ρ‖_{L^p(Ω)}` by the trapezoid rule; `p = ∞` is the nodal maximum of `|ρ|`.
pub fn lp_norm(layer: &Layer, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p == f64::INFINITY {
        return Ok(layer.values().iter().fold(0.0, |m, v| m.max(math::abs(*v))));
    }
    Ok(weighted_norm(layer.values(), &layer.grid().trapezoid_weights(), p))
}

/// `‖ρ‖_{L^p(region)}` integrating the bilinear interpolant of `|ρ|^p`
/// exactly; `p = ∞` is the maximum over nodes in the closed region.
pub fn lp_norm_over(layer: &Layer, region: &Domain, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let grid = layer.grid();
    if p == f64::INFINITY {
        let Some(win) = grid.node_window(region) else {
            return Ok(0.0);
        };
        return Ok(win.iter().fold(0.0, |m, (i, j)| m.max(math::abs(layer.at(i, j)))));
    }
    Ok(weighted_norm(layer.values(), &grid.weights(region)?, p))
}

/// `(∫_region |ρ|^p)^{1/p}` for any finite `p > 0` (a quasi-norm below 1).
pub(crate) fn lp_quasi_norm_over(layer: &Layer, region: &Domain, p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(invalid("p", alloc::format!("must be positive and finite, got {p}")));
    }
    Ok(weighted_norm(layer.values(), &layer.grid().weights(region)?, p))
}

/// `‖a − b‖_p` for layers on the same grid.
pub fn lp_distance(a: &Layer, b: &Layer, p: f64) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::ShapeMismatch("layers live on different grids".into()));
    }
    check_exponent(p)?;
    let diff: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
    if p == f64::INFINITY {
        return Ok(diff.iter().fold(0.0, |m, v| m.max(math::abs(*v))));
    }
    Ok(weighted_norm(&diff, &a.grid().trapezoid_weights(), p))
}

/// `∫_0^T ‖u(t)‖ dt` with `‖·‖` the `L^p` norm of `|u|`, or with
/// `include_gradient` the `W^{1,p}` norm `‖u‖_p + ‖∇u‖_p` (Frobenius
/// norm of the closed-form Jacobian). Trapezoid rule in space and time.
pub fn bochner_norm_u(
    u: &(impl Velocity + Sync),
    grid: &Grid,
    times: &TimePartition,
    p_space: f64,
    include_gradient: bool,
) -> f64 {
    let w = grid.trapezoid_weights();
    let nodes = grid.node_count();
    let spatial: Vec<f64> = par::map_range(times.steps() + 1, |jt| {
        let t = times.time(jt);
        let mut vals = Vec::with_capacity(nodes);
        let mut grads = Vec::with_capacity(if include_gradient { nodes } else { 0 });
        for k in 0..nodes {
            let p = grid.node_at(k);
            vals.push(u.velocity(p, t).norm());
            if include_gradient {
                let j = u.jacobian(p, t);
                grads.push(math::sqrt(j[0][0] * j[0][0] + j[0][1] * j[0][1] + j[1][0] * j[1][0] + j[1][1] * j[1][1]));
            }
        }
        let mut n = spatial_norm(&vals, &w, p_space);
        if include_gradient {
            n += spatial_norm(&grads, &w, p_space);
        }
        n
    });
    times
        .trapezoid_weights(times.steps())
        .iter()
        .zip(&spatial)
        .map(|(a, b)| a * b)
        .sum()
}

fn spatial_norm(values: &[f64], w: &QuadratureWeights, p: f64) -> f64 {
    if p == f64::INFINITY {
        values.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    } else {
        weighted_norm(values, w, p)
    }
}

/// `‖ρ(t_j)‖_p` at every time node against the conserved value `‖ρ₀‖_p`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormReport {
    pub p: f64,
    pub reference: f64,
    pub values: Vec<f64>,
    /// `max_j |‖ρ(t_j)‖_p − ‖ρ₀‖_p| / ‖ρ₀‖_p` (absolute when `‖ρ₀‖_p = 0`).
    pub drift: f64,
    pub tolerance: f64,
    /// Time indices whose relative deviation exceeds `tolerance`.
    pub exceeding: Vec<usize>,
}

impl NormReport {
    pub fn relative_deviation(&self, j: usize) -> f64 {
        relative(self.values[j], self.reference)
    }

    pub fn passes(&self) -> bool {
        self.exceeding.is_empty()
    }
}

fn relative(v: f64, reference: f64) -> f64 {
    let d = math::abs(v - reference);
    if reference > 0.0 {
        d / reference
    } else {
        d
    }
}

/// One [`NormReport`] per exponent in `p_list`, flagging nodes whose
/// relative drift exceeds `tolerance`.
pub fn conservation_report(rho: &ScalarField, p_list: &[f64], tolerance: f64) -> Result<Vec<NormReport>> {
    p_list
        .iter()
        .map(|&p| {
            let values = rho
                .layers()
                .iter()
                .map(|l| lp_norm(l, p))
                .collect::<Result<Vec<_>>>()?;
            let reference = values[0];
            let devs: Vec<f64> = values.iter().map(|&v| relative(v, reference)).collect();
            let drift = devs.iter().copied().fold(0.0, f64::max);
            let exceeding = devs
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > tolerance)
                .map(|(j, _)| j)
                .collect();
            Ok(NormReport {
                p,
                reference,
                values,
                drift,
                tolerance,
                exceeding,
            })
        })
        .collect()
}

/// Largest amount by which any nodal value leaves `[lo, hi]`.
pub fn max_principle_excess(rho: &ScalarField, lo: f64, hi: f64) -> f64 {
    rho.layers()
        .iter()
        .flat_map(|l| l.values().iter())
        .fold(0.0, |m, &v| m.max(lo - v).max(v - hi))
}
