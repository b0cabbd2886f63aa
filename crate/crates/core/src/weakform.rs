//! Distributional residuals, mollification and the commutator remainder.
//!
//! The weak form of `ρ_t − u·∇ρ = 0` against `φ(x, t) = ψ(t) φ(x)` is
//!
//! ```text
//! −∫∫ ρ φ_t − ∫ ρ₀ φ(·, 0) + ∫∫ ρ (u·∇φ) = 0,
//! ```
//!
//! evaluated here with the trapezoid rule in space (on the field's grid)
//! and in time (on its time nodes).

use alloc::string::String;
use alloc::vec::Vec;

use crate::analysis::bochner_norm_u;
use crate::error::{invalid, Error, Result};
use crate::fields::{Beta, Kernel, Layer, ScalarField, TestFunction, Velocity, VelocityField};
use crate::geometry::{Domain, Grid, NodeWindow, Vec2};
use crate::math;
use crate::par;

/// The three signed terms of the weak form and the absolute total.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResidualReport {
    /// `−∫∫ ρ φ_t`.
    pub time_term: f64,
    /// `−∫ ρ₀ φ(·, 0)`.
    pub initial_term: f64,
    /// `∫∫ ρ (u·∇φ)`.
    pub advective_term: f64,
    pub residual: f64,
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub test_function: String,
}

impl ResidualReport {
    fn from_terms(time_term: f64, initial_term: f64, advective_term: f64, grid: &Grid, nt: usize, label: String) -> Self {
        ResidualReport {
            time_term,
            initial_term,
            advective_term,
            residual: math::abs(time_term + initial_term + advective_term),
            nx: grid.nx(),
            ny: grid.ny(),
            nt,
            test_function: label,
        }
    }

    /// Sum of the three terms with its sign.
    pub fn signed(&self) -> f64 {
        self.time_term + self.initial_term + self.advective_term
    }

    pub fn terms(&self) -> [f64; 3] {
        [self.time_term, self.initial_term, self.advective_term]
    }
}

fn check_support(grid: &Grid, phi: &TestFunction, t_final: f64) -> Result<()> {
    let margin = phi.spatial.margin_in(grid.domain());
    if !(margin > 0.0) {
        return Err(Error::SupportViolation {
            what: "test function",
            margin,
        });
    }
    let tail = phi.temporal.value(t_final);
    if math::abs(tail) > 1e-12 {
        return Err(Error::SupportViolation {
            what: "test function in time (nonzero at the final time)",
            margin: -math::abs(tail),
        });
    }
    Ok(())
}

/// Weak-form residual of `ρ` with initial data `ρ₀`.
pub fn weak_residual(
    rho: &ScalarField,
    rho0: &Layer,
    u: &(impl Velocity + Sync),
    phi: &TestFunction,
) -> Result<ResidualReport> {
    weak_residual_mapped(rho, rho0, u, phi, |s| s)
}

/// Weak-form residual of `β∘ρ` with initial data `β∘ρ₀`.
pub fn renormalized_residual(
    rho: &ScalarField,
    rho0: &Layer,
    u: &(impl Velocity + Sync),
    beta: &Beta,
    phi: &TestFunction,
) -> Result<ResidualReport> {
    weak_residual_mapped(rho, rho0, u, phi, |s| beta.value(s))
}

/// Weak-form residual of `f∘ρ` with initial data `f∘ρ₀`, without
/// materialising the mapped field.
pub fn weak_residual_mapped(
    rho: &ScalarField,
    rho0: &Layer,
    u: &(impl Velocity + Sync),
    phi: &TestFunction,
    f: impl Fn(f64) -> f64 + Sync,
) -> Result<ResidualReport> {
    let grid = rho.grid();
    if rho0.grid() != grid {
        return Err(Error::ShapeMismatch("initial layer and field use different grids".into()));
    }
    let times = rho.times();
    check_support(grid, phi, times.t_final())?;
    let label = phi.label();
    let Some(win) = grid.node_window(&phi.spatial.support_box()) else {
        return Ok(ResidualReport::from_terms(0.0, 0.0, 0.0, grid, times.steps(), label));
    };
    let w = grid.trapezoid_weights();
    let mut phi_w = Vec::with_capacity(win.len());
    let mut grad_w = Vec::with_capacity(win.len());
    for (i, j) in win.iter() {
        let p = grid.node(i, j);
        let wk = w.weight(i, j);
        phi_w.push(wk * phi.spatial.eval(p));
        grad_w.push(phi.spatial.gradient(p) * wk);
    }

    // per layer: (∫ f(ρ) φ, ∫ f(ρ) u·∇φ)
    let per_layer: Vec<(f64, f64)> = par::map_range(times.steps() + 1, |jt| {
        let t = times.time(jt);
        let layer = rho.layer(jt);
        let mut mass = 0.0;
        let mut flux = 0.0;
        for (((i, j), &c), g) in win.iter().zip(&phi_w).zip(&grad_w) {
            let v = f(layer.at(i, j));
            mass += c * v;
            flux += v * u.velocity(grid.node(i, j), t).dot(*g);
        }
        (mass, flux)
    });
    let tw = times.trapezoid_weights(times.steps());
    let mut time_term = 0.0;
    let mut advective_term = 0.0;
    for (jt, (&wt, &(mass, flux))) in tw.iter().zip(&per_layer).enumerate() {
        let t = times.time(jt);
        time_term -= wt * phi.temporal.derivative(t) * mass;
        advective_term += wt * phi.temporal.value(t) * flux;
    }
    let initial_mass: f64 = win.iter().zip(&phi_w).map(|((i, j), &c)| c * f(rho0.at(i, j))).sum();
    let initial_term = -phi.temporal.value(0.0) * initial_mass;
    Ok(ResidualReport::from_terms(
        time_term,
        initial_term,
        advective_term,
        grid,
        times.steps(),
        label,
    ))
}

/// Discrete kernel: node offsets `(di, dj)` inside the kernel support,
/// with `η_ε` and `∇η_ε` evaluated at `x − y = −(di·hx, dj·hy)` and both
/// rescaled so that the interior trapezoid sum of `η_ε` is exactly 1.
struct Stencil {
    offsets: Vec<(isize, isize)>,
    eta: Vec<f64>,
    grad: Vec<Vec2>,
}

impl Stencil {
    fn new(grid: &Grid, kernel: &Kernel) -> Self {
        let (hx, hy) = (grid.hx(), grid.hy());
        let rx = math::ceil(kernel.eps() / hx) as isize;
        let ry = math::ceil(kernel.eps() / hy) as isize;
        let mut s = Stencil {
            offsets: Vec::new(),
            eta: Vec::new(),
            grad: Vec::new(),
        };
        for dj in -ry..=ry {
            for di in -rx..=rx {
                let z = Vec2::new(-(di as f64) * hx, -(dj as f64) * hy);
                if z.norm() >= kernel.eps() {
                    continue;
                }
                s.offsets.push((di, dj));
                s.eta.push(kernel.eval(z));
                s.grad.push(kernel.gradient(z));
            }
        }
        // unit discrete mass: constants are reproduced exactly and the
        // sums obey Young's inequality on the grid
        let mass: f64 = s.eta.iter().sum::<f64>() * hx * hy;
        if mass > 0.0 {
            for v in &mut s.eta {
                *v /= mass;
            }
            for g in &mut s.grad {
                *g = *g * (1.0 / mass);
            }
        }
        s
    }
}

/// Nodal values of a mollified quantity, valid on `region ⊂ Ω_ε`.
///
/// Values are stored on the parent grid; only nodes of `window` (the
/// nodes of `region` plus one ring) are computed, the rest are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MollifiedLayer {
    layer: Layer,
    window: NodeWindow,
    region: Domain,
    eps: f64,
}

impl MollifiedLayer {
    pub fn layer(&self) -> &Layer {
        &self.layer
    }

    pub fn window(&self) -> &NodeWindow {
        &self.window
    }

    pub fn region(&self) -> &Domain {
        &self.region
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Value at node `(i, j)` if it was computed.
    pub fn at(&self, i: usize, j: usize) -> Option<f64> {
        let w = &self.window;
        let inside = (w.i0..=w.i1).contains(&i) && (w.j0..=w.j1).contains(&j);
        inside.then(|| self.layer.at(i, j))
    }

    /// `(∫_sub |v|^p)^{1/p}`; `sub` must lie inside `region`. Exponents in
    /// `(0, 1)` give the quasi-norm, which is what `L^γ` means when `α < q`.
    pub fn lp_norm_over(&self, sub: &Domain, p: f64) -> Result<f64> {
        if !self.region.contains_domain(sub) {
            return Err(invalid("region", "norm region must lie inside the mollification region"));
        }
        if p < 1.0 {
            return crate::analysis::lp_quasi_norm_over(&self.layer, sub, p);
        }
        crate::analysis::lp_norm_over(&self.layer, sub, p)
    }
}

fn mollification_window(grid: &Grid, region: &Domain, eps: f64) -> Result<NodeWindow> {
    let shrunk = grid.domain().shrink(eps)?;
    if !shrunk.contains_domain(region) {
        return Err(Error::SupportViolation {
            what: "mollification region",
            margin: grid.domain().margin_of(region) - eps,
        });
    }
    let win = grid
        .node_window(region)
        .ok_or_else(|| invalid("region", "contains no grid nodes"))?;
    Ok(NodeWindow {
        i0: win.i0.saturating_sub(1),
        i1: (win.i1 + 1).min(grid.nx()),
        j0: win.j0.saturating_sub(1),
        j1: (win.j1 + 1).min(grid.ny()),
    })
}

/// `Σ_y W_y g(y) s(y − x)` at every node of `win`, as a layer.
fn windowed_sum(
    grid: &Grid,
    win: &NodeWindow,
    stencil: &Stencil,
    term: impl Fn(usize, usize, usize, usize, usize) -> f64 + Sync,
) -> Layer {
    let w = grid.trapezoid_weights();
    let (nx, ny) = (grid.nx() as isize, grid.ny() as isize);
    let cols = win.i1 - win.i0 + 1;
    let vals = par::map_range(win.len(), |k| {
        let (i, j) = (win.i0 + k % cols, win.j0 + k / cols);
        let mut acc = 0.0;
        for (s, &(di, dj)) in stencil.offsets.iter().enumerate() {
            let (yi, yj) = (i as isize + di, j as isize + dj);
            if yi < 0 || yj < 0 || yi > nx || yj > ny {
                continue;
            }
            let (yi, yj) = (yi as usize, yj as usize);
            acc += w.weight(yi, yj) * term(i, j, yi, yj, s);
        }
        acc
    });
    let mut out = alloc::vec![0.0; grid.node_count()];
    for (k, v) in vals.into_iter().enumerate() {
        out[grid.index(win.i0 + k % cols, win.j0 + k / cols)] = v;
    }
    Layer::from_values_unchecked(*grid, out)
}

/// `ρ_ε = ρ(·, t_j) ∗ η_ε` on `Ω_ε`.
pub fn mollify_density(rho: &ScalarField, kernel: &Kernel, j: usize) -> Result<MollifiedLayer> {
    let region = rho.grid().domain().shrink(kernel.eps())?;
    mollify_layer_over(layer_at(rho, j)?, kernel, &region)
}

/// `ρ ∗ η_ε` at the nodes of `region` (which must sit inside `Ω_ε`).
pub fn mollify_layer_over(layer: &Layer, kernel: &Kernel, region: &Domain) -> Result<MollifiedLayer> {
    let grid = layer.grid();
    let window = mollification_window(grid, region, kernel.eps())?;
    let stencil = Stencil::new(grid, kernel);
    let values = windowed_sum(grid, &window, &stencil, |_, _, yi, yj, s| {
        layer.at(yi, yj) * stencil.eta[s]
    });
    Ok(MollifiedLayer {
        layer: values,
        window,
        region: *region,
        eps: kernel.eps(),
    })
}

fn layer_at(rho: &ScalarField, j: usize) -> Result<&Layer> {
    if j > rho.times().steps() {
        return Err(invalid("t index", alloc::format!("{j} is beyond the last time node")));
    }
    Ok(rho.layer(j))
}

/// `r_ε(x) = ∫ ρ(y) (u(y) − u(x))·(∇η_ε)(x − y) dy` at time node `j`, on `Ω_ε`.
///
/// With this sign `r_ε = ∂_t ρ_ε − u·∇ρ_ε` for a weak solution `ρ`, so the
/// weak residual of `ρ_ε` against `φ` equals `∫∫ r_ε φ`.
pub fn commutator_remainder(rho: &ScalarField, u: &VelocityField, kernel: &Kernel, j: usize) -> Result<MollifiedLayer> {
    let region = rho.grid().domain().shrink(kernel.eps())?;
    let t = rho.times().time(j);
    commutator_over(layer_at(rho, j)?, u, t, kernel, &region)
}

/// [`commutator_remainder`] for one layer at time `t`, on the nodes of `region`.
pub fn commutator_over(
    layer: &Layer,
    u: &(impl Velocity + Sync),
    t: f64,
    kernel: &Kernel,
    region: &Domain,
) -> Result<MollifiedLayer> {
    let grid = layer.grid();
    let window = mollification_window(grid, region, kernel.eps())?;
    let stencil = Stencil::new(grid, kernel);
    let vel: Vec<Vec2> = par::map_range(grid.node_count(), |k| u.velocity(grid.node_at(k), t));
    let values = windowed_sum(grid, &window, &stencil, |i, j, yi, yj, s| {
        let du = vel[grid.index(yi, yj)] - vel[grid.index(i, j)];
        layer.at(yi, yj) * du.dot(stencil.grad[s])
    });
    Ok(MollifiedLayer {
        layer: values,
        window,
        region: *region,
        eps: kernel.eps(),
    })
}

/// Both sides of `weak residual of ρ_ε against φ = ∫∫ r_ε φ`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CommutatorIdentity {
    pub eps: f64,
    /// Weak-form residual of the mollified field (signed terms).
    pub mollified_residual: ResidualReport,
    /// `∫∫ r_ε φ`.
    pub remainder_pairing: f64,
    /// `|signed residual − pairing|`.
    pub discrepancy: f64,
}

/// Evaluate both sides of the commutator identity independently. The
/// support of `φ` must lie inside `Ω_ε`.
pub fn commutator_identity(
    rho: &ScalarField,
    u: &VelocityField,
    kernel: &Kernel,
    phi: &TestFunction,
) -> Result<CommutatorIdentity> {
    let grid = rho.grid();
    let times = rho.times();
    check_support(grid, phi, times.t_final())?;
    let support = phi.spatial.support_box();
    let region = Domain::new(
        support.x_lo().max(grid.domain().x_lo()),
        support.y_lo().max(grid.domain().y_lo()),
        support.x_hi().min(grid.domain().x_hi()),
        support.y_hi().min(grid.domain().y_hi()),
    )?;

    let mut smoothed = Vec::with_capacity(times.steps() + 1);
    let mut remainders = Vec::with_capacity(times.steps() + 1);
    for j in 0..=times.steps() {
        smoothed.push(mollify_layer_over(rho.layer(j), kernel, &region)?.layer);
        remainders.push(commutator_over(rho.layer(j), u, times.time(j), kernel, &region)?.layer);
    }
    let smoothed = ScalarField::new(*times, smoothed)?;
    let mollified_residual = weak_residual(&smoothed, smoothed.initial(), u, phi)?;

    let w = grid.trapezoid_weights();
    let win = grid.node_window(&support);
    let tw = times.trapezoid_weights(times.steps());
    let mut remainder_pairing = 0.0;
    if let Some(win) = win {
        for (jt, r) in remainders.iter().enumerate() {
            let t = times.time(jt);
            let inner: f64 = win
                .iter()
                .map(|(i, j)| w.weight(i, j) * r.at(i, j) * phi.eval(grid.node(i, j), t))
                .sum();
            remainder_pairing += tw[jt] * inner;
        }
    }
    Ok(CommutatorIdentity {
        eps: kernel.eps(),
        discrepancy: math::abs(mollified_residual.signed() - remainder_pairing),
        mollified_residual,
        remainder_pairing,
    })
}

/// `(ε, ‖r_ε‖_{L¹(0,T;L^γ(Ω₀))})` for a decreasing list of scales.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RemainderCurve {
    /// `1/γ = 1/α + 1/p`.
    pub gamma: f64,
    pub alpha: f64,
    pub p: f64,
    /// Conjugate exponent of `p`.
    pub q: f64,
    pub inner: Domain,
    /// Distance from `inner` to the boundary of the domain.
    pub margin: f64,
    pub points: Vec<(f64, f64)>,
    /// Whether `α ≥ q`. Reported, never enforced.
    pub hypothesis_satisfied: bool,
    /// Measured `‖u‖_{L¹(0,T;W^{1,α})}`.
    pub velocity_w1alpha: f64,
}

impl RemainderCurve {
    pub fn is_strictly_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 < w[0].1)
    }

    /// Last norm over first norm; `None` when the first is zero.
    pub fn ratio(&self) -> Option<f64> {
        let first = self.points.first()?.1;
        let last = self.points.last()?.1;
        (first > 0.0).then(|| last / first)
    }

    /// Least-squares slope of `log norm` against `log ε`.
    pub fn slope(&self) -> f64 {
        let (e, n): (Vec<f64>, Vec<f64>) = self.points.iter().copied().unzip();
        math::loglog_slope(&e, &n)
    }

    pub fn decays(&self) -> bool {
        matches!((self.points.first(), self.points.last()), (Some(a), Some(b)) if b.1 < a.1)
    }
}

/// Conjugate exponent, with `1 ↔ ∞`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == f64::INFINITY {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `‖r_ε‖_{L¹(0,T;L^γ(inner))}` for each `ε` in `eps_list`. The time
/// integral uses every `time_stride`-th layer.
pub fn remainder_decay_study(
    rho: &ScalarField,
    u: &VelocityField,
    eps_list: &[f64],
    alpha: f64,
    p: f64,
    inner: &Domain,
    time_stride: usize,
) -> Result<RemainderCurve> {
    if eps_list.is_empty() {
        return Err(invalid("eps_list", "must not be empty"));
    }
    if eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(invalid("eps_list", "scales must be positive"));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("eps_list", "must be strictly decreasing"));
    }
    if !(alpha >= 1.0) {
        return Err(invalid("alpha", alloc::format!("must be at least 1, got {alpha}")));
    }
    if !(p > 1.0) {
        return Err(invalid("p", alloc::format!("must exceed 1, got {p}")));
    }
    let grid = rho.grid();
    let margin = grid.domain().margin_of(inner);
    if !(margin > eps_list[0]) {
        return Err(Error::SupportViolation {
            what: "inner region (margin must exceed the largest scale)",
            margin,
        });
    }
    let coarse = rho.times().coarsened(time_stride.max(1))?;
    let stride = time_stride.max(1);
    let gamma = 1.0 / (1.0 / alpha + 1.0 / p);
    let q = conjugate_exponent(p);
    let tw = coarse.trapezoid_weights(coarse.steps());

    let mut points = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let kernel = Kernel::new(crate::fields::BumpProfile::standard(), eps)?;
        let mut total = 0.0;
        for (jc, &wt) in tw.iter().enumerate() {
            let j = jc * stride;
            let r = commutator_over(rho.layer(j), u, rho.times().time(j), &kernel, inner)?;
            total += wt * r.lp_norm_over(inner, gamma)?;
        }
        points.push((eps, total));
    }
    Ok(RemainderCurve {
        gamma,
        alpha,
        p,
        q,
        inner: *inner,
        margin,
        points,
        hypothesis_satisfied: alpha >= q,
        velocity_w1alpha: bochner_norm_u(u, grid, &coarse, alpha, true),
    })
}
