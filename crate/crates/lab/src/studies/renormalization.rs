use transport_core::fields::{beta_bounded_power, beta_smooth_approx, beta_truncation, Beta, ScalarField};
use transport_core::weakform::{renormalized_residual, weak_residual, ResidualReport};

use super::{test_function_bank, Setup, StudyRun};
use crate::config::StudyConfig;
use crate::error::LabError;
use crate::io::{num, Table};
use crate::outcome::{Check, Comparison, Provenance, StudyOutcome};

/// The renormalisations every study runs: a clip wide enough to act as
/// the identity, two admissible truncations and a constant.
pub fn beta_bank(rho_bound: f64) -> Vec<Beta> {
    vec![
        beta_truncation(2.0 * rho_bound.max(1.0)).expect("positive level"),
        beta_smooth_approx(1.0, 10).expect("valid"),
        beta_bounded_power(2.0, 4.0, 10).expect("valid"),
        Beta::Constant(1.0),
    ]
}

fn row(table: &mut Table, beta: &str, field: &str, r: &ResidualReport) {
    table.push(vec![
        beta.to_owned(),
        field.to_owned(),
        r.test_function.clone(),
        num(r.time_term),
        num(r.initial_term),
        num(r.advective_term),
        num(r.residual),
    ]);
}

/// Weak and renormalised residuals of the classical solution over the
/// β and φ banks, with a time-frozen field as the negative control.
pub fn run_renormalization_study(cfg: &StudyConfig) -> Result<StudyRun, LabError> {
    let setup = Setup::new(cfg)?;
    let rho = setup.solve()?;
    let bank = test_function_bank(cfg)?;
    let tol = &cfg.tolerances;
    let mut out = StudyOutcome::new(&cfg.study.name, "renorm");
    let mut table = Table::new(
        "residuals.csv",
        &["beta", "field", "test_function", "time_term", "initial_term", "advective_term", "residual"],
    );

    let mut worst: f64 = 0.0;
    for phi in &bank {
        let r = weak_residual(&rho, &setup.rho0, &setup.u, phi)?;
        worst = worst.max(r.residual);
        row(&mut table, "identity", "classical", &r);
    }
    out.push(Check::new(
        "weak residual",
        "weakform::weak_residual: classical solutions are distributional solutions",
        Provenance::Derived,
        worst,
        Comparison::Below,
        tol.residual,
    ));

    let bound = setup.rho0.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for beta in beta_bank(bound) {
        let label = beta.label();
        let mut worst: f64 = 0.0;
        for phi in &bank {
            let r = renormalized_residual(&rho, &setup.rho0, &setup.u, &beta, phi)?;
            worst = worst.max(r.residual);
            row(&mut table, &label, "classical", &r);
        }
        let provenance = if matches!(beta, Beta::Constant(_)) {
            Provenance::Trivial
        } else {
            Provenance::Derived
        };
        out.push(Check::new(
            format!("renormalized residual {label}"),
            "weakform::renormalized_residual: beta(rho) solves the same equation",
            provenance,
            worst,
            Comparison::Below,
            tol.residual,
        ));
    }

    let frozen = ScalarField::frozen(setup.times, setup.rho0.clone());
    let mut detected: f64 = 0.0;
    for phi in &bank {
        let r = weak_residual(&frozen, &setup.rho0, &setup.u, phi)?;
        detected = detected.max(r.residual);
        row(&mut table, "identity", "frozen", &r);
    }
    if !setup.u.is_zero() {
        out.push(Check::new(
            "frozen field is rejected",
            "weakform::weak_residual: a non-solution leaves a residual",
            Provenance::Derived,
            detected,
            Comparison::Above,
            tol.frozen_detection,
        ));
    }

    out.detail("test_functions", bank.len());
    Ok(StudyRun {
        outcome: out,
        tables: vec![table],
    })
}
