use transport_core::analysis::{renormalization_convergence_check, stability_experiment, Perturbation};
use transport_core::fields::beta_smooth_approx;

use super::{Setup, StudyRun};
use crate::config::{PerturbationSpec, StudyConfig};
use crate::error::LabError;
use crate::io::{num, Table};
use crate::outcome::{Check, Comparison, Provenance, StudyOutcome};

/// Perturbed problems converging to the reference one, and the
/// renormalised fields following along.
pub fn run_stability_study(cfg: &StudyConfig) -> Result<StudyRun, LabError> {
    let setup = Setup::new(cfg)?;
    let s = &cfg.stability;
    let tol = &cfg.tolerances;
    let perturbation = match s.perturbation {
        PerturbationSpec::Identity => Perturbation::Identity,
        PerturbationSpec::Amplitude => Perturbation::Amplitude,
        PerturbationSpec::InitialBump => Perturbation::InitialBump(s.bump.gaussian()?),
    };
    let run = stability_experiment(
        &setup.u,
        &setup.rho0,
        &setup.grid,
        &setup.times,
        perturbation,
        &cfg.sweeps.n,
        s.p.0,
    )?;
    let r = &run.report;
    let mut out = StudyOutcome::new(&cfg.study.name, "stability");

    let mut table = Table::new("stability.csv", &["n", "d_n", "e_n"]);
    for k in 0..r.n.len() {
        table.push(vec![r.n[k].to_string(), num(r.d_n[k]), num(r.e_n[k])]);
    }
    let beta = beta_smooth_approx(1.0, 10)?;
    let conv = renormalization_convergence_check(&run.perturbed, &run.reference, &[beta])?.remove(0);
    let mut renorm = Table::new("renorm_convergence.csv", &["beta", "n", "distance"]);
    for (n, d) in r.n.iter().zip(&conv.distances) {
        renorm.push(vec![conv.beta.clone(), n.to_string(), num(*d)]);
    }

    let max_e = r.e_n.iter().copied().fold(0.0, f64::max);
    match s.perturbation {
        PerturbationSpec::Identity => {
            out.push(Check::new(
                "unperturbed family stays put",
                "analysis::stability_experiment: e_n = 0 for identical data",
                Provenance::Trivial,
                max_e,
                Comparison::AtMost,
                0.0,
            ));
            out.push(Check::flag(
                "renormalized distances vanish",
                "analysis::renormalization_convergence_check: zero for identical fields",
                Provenance::Trivial,
                conv.is_zero(),
            ));
        }
        PerturbationSpec::Amplitude => {
            out.push(Check::new(
                "d_n slope deviation from -1",
                "analysis::stability_experiment: velocity distance decays like 1/n",
                Provenance::Derived,
                (r.velocity_slope() + 1.0).abs(),
                Comparison::AtMost,
                tol.slope,
            ));
            out.push(Check::flag(
                "e_n strictly decreasing",
                "analysis::stability_experiment: solutions converge in L^inf(L^p)",
                Provenance::Derived,
                r.is_strictly_decreasing(),
            ));
            out.push(Check::new(
                "e_last / e_first",
                "analysis::stability_experiment: pinned convergence ratio",
                Provenance::Derived,
                r.ratio().unwrap_or(f64::INFINITY),
                Comparison::Below,
                tol.stability_ratio,
            ));
            out.push(Check::flag(
                "renormalized distances decreasing",
                "analysis::renormalization_convergence_check: beta(rho_n) -> beta(rho)",
                Provenance::Derived,
                conv.is_decreasing(),
            ));
        }
        PerturbationSpec::InitialBump => {
            // linearity: the difference is the transported bump/n
            let excess = r
                .e_n
                .iter()
                .zip(&r.initial_distance)
                .map(|(e, e0)| if *e0 > 0.0 { e / e0 - 1.0 } else { *e })
                .fold(f64::NEG_INFINITY, f64::max);
            out.push(Check::new(
                "e_n over initial distance, minus one",
                "analysis::stability_experiment: e_n <= |rho0_n - rho0|_p up to solver drift",
                Provenance::Derived,
                excess,
                Comparison::AtMost,
                tol.drift,
            ));
            out.push(Check::flag(
                "e_n strictly decreasing",
                "analysis::stability_experiment: solutions converge in L^inf(L^p)",
                Provenance::Derived,
                r.is_strictly_decreasing(),
            ));
            out.push(Check::flag(
                "renormalized distances decreasing",
                "analysis::renormalization_convergence_check: beta(rho_n) -> beta(rho)",
                Provenance::Derived,
                conv.is_decreasing(),
            ));
        }
    }

    out.detail("perturbation", r.perturbation.clone());
    out.detail("velocity_slope", r.velocity_slope());
    out.detail("monotone_within_5pct", r.is_monotone());
    out.detail("halved", r.halved());
    Ok(StudyRun {
        outcome: out,
        tables: vec![table, renorm],
    })
}
