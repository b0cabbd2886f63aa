use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::fields::Velocity;
use crate::geometry::Grid;
use crate::math;

/// `(h, 2h ∫_{Ω∖Ω_{1/h}} |u(·, t)| dx)` for each `h`.
///
/// The frame integral uses the bilinear-exact weights of `Ω` minus those
/// of `Ω_{1/h}`, summed only over nodes within one cell of the frame, so
/// a field vanishing on the frame gives exactly zero. When `Ω_{1/h}` is
/// empty the frame is all of `Ω`.
pub fn boundary_flux_decay(u: &(impl Velocity + ?Sized), grid: &Grid, t: f64, h_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    if h_list.iter().any(|&h| !(h > 0.0)) {
        return Err(invalid("h_list", "entries must be positive"));
    }
    if h_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("h_list", "must be strictly increasing"));
    }
    let domain = grid.domain();
    let full = grid.trapezoid_weights();
    let speed: Vec<f64> = grid.nodes().map(|p| u.velocity(p, t).norm()).collect();
    let reach = grid.hx().max(grid.hy());
    h_list
        .iter()
        .map(|&h| {
            let width = 1.0 / h;
            let inner = domain.shrink(width).ok().map(|d| grid.weights(&d)).transpose()?;
            let mut acc = 0.0;
            for (k, &s) in speed.iter().enumerate() {
                let p = grid.node_at(k);
                if inner.is_some() && domain.dist_to_boundary(p) > width + reach {
                    continue;
                }
                let (i, j) = grid.ij(k);
                let w = full.weight(i, j) - inner.as_ref().map_or(0.0, |q| q.weight(i, j));
                acc += w * s;
            }
            Ok((h, 2.0 * h * math::abs(acc)))
        })
        .collect()
}
