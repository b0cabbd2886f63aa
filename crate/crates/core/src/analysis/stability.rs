use alloc::string::String;
use alloc::vec::Vec;

use super::norms::{bochner_norm_u, lp_distance};
use crate::characteristics::solve_classical;
use crate::error::{invalid, Error, Result};
use crate::fields::{Beta, Density, Difference, Gaussian, ScalarField, VelocityField};
use crate::geometry::{Grid, TimePartition};
use crate::math;
use crate::par;

/// How the `n`-th problem `(uⁿ, ρ₀ⁿ)` is built from `(u, ρ₀)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Perturbation {
    /// `uⁿ = u`, `ρ₀ⁿ = ρ₀`.
    Identity,
    /// `ψⁿ = (1 + 1/n) ψ`, `ρ₀ⁿ = ρ₀`.
    Amplitude,
    /// `uⁿ = u`, `ρ₀ⁿ = ρ₀ + bump/n`.
    InitialBump(Gaussian),
}

impl Perturbation {
    pub fn velocity(&self, u: &VelocityField, n: usize) -> VelocityField {
        match self {
            Perturbation::Amplitude => u.scaled(1.0 + 1.0 / n as f64),
            _ => u.clone(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Perturbation::Identity => "identity",
            Perturbation::Amplitude => "amplitude",
            Perturbation::InitialBump(_) => "initial-bump",
        }
    }
}

/// Distances between the perturbed problems and the reference one.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityReport {
    pub perturbation: String,
    pub p: f64,
    pub n: Vec<usize>,
    /// `‖uⁿ − u‖_{L¹(0,T;L¹)}`.
    pub d_n: Vec<f64>,
    /// `max_j ‖ρⁿ(t_j) − ρ(t_j)‖_p`.
    pub e_n: Vec<f64>,
    /// `‖ρ₀ⁿ − ρ₀‖_p` on the grid.
    pub initial_distance: Vec<f64>,
}

/// Allowed relative growth between consecutive `eₙ` for
/// [`StabilityReport::is_monotone`].
pub const MONOTONE_SLACK: f64 = 0.05;

impl StabilityReport {
    /// `e_{k+1} ≤ (1 + 5%) e_k` along the list.
    pub fn is_monotone(&self) -> bool {
        self.e_n.windows(2).all(|w| w[1] <= (1.0 + MONOTONE_SLACK) * w[0])
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.e_n.windows(2).all(|w| w[1] < w[0])
    }

    /// `e_last < e_first / 2`.
    pub fn halved(&self) -> bool {
        match (self.e_n.first(), self.e_n.last()) {
            (Some(&a), Some(&b)) => b < 0.5 * a,
            _ => false,
        }
    }

    /// `e_last / e_first`, `None` when the first is zero.
    pub fn ratio(&self) -> Option<f64> {
        let first = *self.e_n.first()?;
        (first > 0.0).then(|| self.e_n.last().copied().unwrap_or(0.0) / first)
    }

    /// Log-log slope of `dₙ` against `n`.
    pub fn velocity_slope(&self) -> f64 {
        let n: Vec<f64> = self.n.iter().map(|&k| k as f64).collect();
        math::loglog_slope(&n, &self.d_n)
    }
}

/// Reference solution, the perturbed solutions and their distances.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityRun {
    pub reference: ScalarField,
    pub perturbed: Vec<ScalarField>,
    pub report: StabilityReport,
}

/// Solve the reference problem and one perturbed problem per `n`.
///
/// The `n` solves are independent and run concurrently under the
/// `parallel` feature.
pub fn stability_experiment<D>(
    u: &VelocityField,
    rho0: &D,
    grid: &Grid,
    times: &TimePartition,
    perturbation: Perturbation,
    n_list: &[usize],
    p: f64,
) -> Result<StabilityRun>
where
    D: Density + Sync + ?Sized,
{
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(invalid("n_list", "needs at least one positive entry"));
    }
    let reference = solve_classical(rho0, u, grid, times)?;
    let solved = par::map_range(n_list.len(), |k| -> Result<(ScalarField, [f64; 3])> {
        let n = n_list[k];
        let un = perturbation.velocity(u, n);
        let rho_n = match perturbation {
            Perturbation::InitialBump(bump) => {
                let scale = 1.0 / n as f64;
                let init = |x| rho0.value(x) + scale * bump.value(x);
                solve_classical(&init, &un, grid, times)?
            }
            _ => solve_classical(rho0, &un, grid, times)?,
        };
        let d = bochner_norm_u(&Difference(&un, u), grid, times, 1.0, false);
        let e = max_distance(&rho_n, &reference, p)?;
        let e0 = lp_distance(rho_n.initial(), reference.initial(), p)?;
        Ok((rho_n, [d, e, e0]))
    });
    let mut report = StabilityReport {
        perturbation: perturbation.label().into(),
        p,
        n: n_list.to_vec(),
        d_n: Vec::with_capacity(n_list.len()),
        e_n: Vec::with_capacity(n_list.len()),
        initial_distance: Vec::with_capacity(n_list.len()),
    };
    let mut perturbed = Vec::with_capacity(n_list.len());
    for item in solved {
        let (rho_n, [d, e, e0]) = item?;
        report.d_n.push(d);
        report.e_n.push(e);
        report.initial_distance.push(e0);
        perturbed.push(rho_n);
    }
    Ok(StabilityRun {
        reference,
        perturbed,
        report,
    })
}

/// `max_j ‖a(t_j) − b(t_j)‖_p`.
pub fn max_distance(a: &ScalarField, b: &ScalarField, p: f64) -> Result<f64> {
    if a.layers().len() != b.layers().len() {
        return Err(Error::ShapeMismatch("fields have different numbers of layers".into()));
    }
    a.layers()
        .iter()
        .zip(b.layers())
        .map(|(x, y)| lp_distance(x, y, p))
        .try_fold(0.0, |m, d| d.map(|d| f64::max(m, d)))
}

/// `‖β(ρₙ) − β(ρ)‖_{L²((0,T)×Ω)}` along a sequence, for one `β`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RenormalizedConvergence {
    pub beta: String,
    pub distances: Vec<f64>,
}

impl RenormalizedConvergence {
    pub fn is_decreasing(&self) -> bool {
        self.distances.windows(2).all(|w| w[1] < w[0])
    }

    pub fn is_zero(&self) -> bool {
        self.distances.iter().all(|&d| d == 0.0)
    }
}

/// Space-time `L²` distance between `β(ρₙ)` and `β(ρ)` for each `β`.
pub fn renormalization_convergence_check(
    rho_n: &[ScalarField],
    rho: &ScalarField,
    betas: &[Beta],
) -> Result<Vec<RenormalizedConvergence>> {
    for r in rho_n {
        if r.grid() != rho.grid() || r.times() != rho.times() {
            return Err(Error::ShapeMismatch("sequence member does not share the reference discretisation".into()));
        }
    }
    let w = rho.grid().trapezoid_weights();
    let tw = rho.times().trapezoid_weights(rho.times().steps());
    let nx = rho.grid().nx() + 1;
    Ok(betas
        .iter()
        .map(|beta| {
            let distances = rho_n
                .iter()
                .map(|r| {
                    let mut acc = 0.0;
                    for (jt, &wt) in tw.iter().enumerate() {
                        let (a, b) = (r.layer(jt).values(), rho.layer(jt).values());
                        let mut s = 0.0;
                        for (k, (x, y)) in a.iter().zip(b).enumerate() {
                            let d = beta.value(*x) - beta.value(*y);
                            s += w.weight(k % nx, k / nx) * d * d;
                        }
                        acc += wt * s;
                    }
                    math::sqrt(acc)
                })
                .collect();
            RenormalizedConvergence {
                beta: beta.label(),
                distances,
            }
        })
        .collect())
}
