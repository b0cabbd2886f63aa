use transport_core::fields::{make_kernel, make_test_function, BumpProfile, TimeProfile};
use transport_core::geometry::Point;
use transport_core::weakform::{commutator_identity, remainder_decay_study};

use super::{Setup, StudyRun};
use crate::config::StudyConfig;
use crate::error::LabError;
use crate::io::{num, Table};
use crate::outcome::{Check, Comparison, Provenance, StudyOutcome};

/// Decay of the commutator remainder over the ε sweep, plus the identity
/// tying it to the weak residual of the mollified density.
pub fn run_mollification_study(cfg: &StudyConfig) -> Result<StudyRun, LabError> {
    let setup = Setup::new(cfg)?;
    let rho = setup.solve()?;
    let m = &cfg.mollify;
    let tol = &cfg.tolerances;
    let mut out = StudyOutcome::new(&cfg.study.name, "mollify");

    let inner = cfg.domain()?.shrink(m.inner_shrink)?;
    let curve = remainder_decay_study(&rho, &setup.u, &cfg.sweeps.eps, m.alpha, m.p, &inner, m.time_stride)?;
    let mut table = Table::new("remainder.csv", &["eps", "norm", "gamma", "margin"]);
    for &(eps, norm) in &curve.points {
        table.push(vec![num(eps), num(norm), num(curve.gamma), num(curve.margin)]);
    }

    let vanishes = curve.points.iter().all(|&(_, v)| v == 0.0);
    if vanishes {
        out.push(Check::new(
            "remainder vanishes",
            "weakform::commutator_remainder: zero for a resting field",
            Provenance::Trivial,
            0.0,
            Comparison::AtMost,
            0.0,
        ));
    } else {
        out.push(Check::flag(
            "remainder strictly decreasing in eps",
            "weakform::remainder_decay_study: norm decreases as eps shrinks",
            Provenance::Derived,
            curve.is_strictly_decreasing(),
        ));
        out.push(Check::new(
            "remainder last/first",
            "weakform::remainder_decay_study: pinned decay ratio",
            Provenance::Derived,
            curve.ratio().unwrap_or(f64::INFINITY),
            Comparison::Below,
            tol.decay_ratio,
        ));
    }

    let kernel = make_kernel(&BumpProfile::standard(), m.identity_eps)?;
    let tf = &m.identity_test_function;
    let t = cfg.time.t_final;
    let phi = make_test_function(
        &cfg.domain()?,
        Point::new(tf.center[0], tf.center[1]),
        tf.radius,
        TimeProfile::Quadratic { t_final: t },
        t,
    )?;
    let id = commutator_identity(&rho, &setup.u, &kernel, &phi)?;
    out.push(Check::new(
        "commutator identity",
        "weakform::commutator_identity: residual of rho_eps equals the remainder pairing",
        Provenance::Derived,
        id.discrepancy,
        Comparison::Below,
        tol.identity,
    ));

    out.detail("gamma", curve.gamma);
    out.detail("q", if curve.q.is_finite() { curve.q.into() } else { serde_json::Value::from("inf") });
    out.detail("hypothesis_satisfied", curve.hypothesis_satisfied);
    out.detail("slope", if vanishes { 0.0 } else { curve.slope() });
    out.detail("identity_test_function", phi.label());
    out.detail("mollified_residual", id.mollified_residual.signed());
    out.detail("remainder_pairing", id.remainder_pairing);
    Ok(StudyRun {
        outcome: out,
        tables: vec![table],
    })
}
