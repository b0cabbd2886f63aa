use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transport_core::analysis::{boundary_flux_decay, conservation_report, max_principle_excess};
use transport_core::characteristics::flow_map;
use transport_core::geometry::Point;

use super::{Setup, StudyRun};
use crate::config::StudyConfig;
use crate::error::LabError;
use crate::io::{num, Table};
use crate::outcome::{Check, Comparison, Provenance, StudyOutcome};

/// Norm drift, max principle, boundary flux and flow-map reversibility
/// for one classical solve.
pub fn run_conservation_study(cfg: &StudyConfig) -> Result<StudyRun, LabError> {
    let setup = Setup::new(cfg)?;
    let rho = setup.solve()?;
    let tol = &cfg.tolerances;
    let mut out = StudyOutcome::new(&cfg.study.name, "conservation");

    let mut norms = Table::new("conservation.csv", &["t", "p", "norm", "drift"]);
    for p in &cfg.sweeps.p {
        let limit = if p.0.is_infinite() { tol.drift_inf } else { tol.drift };
        let report = conservation_report(&rho, &[p.0], limit)?.remove(0);
        for (j, t) in setup.times.times().enumerate() {
            norms.push(vec![num(t), p.to_string(), num(report.values[j]), num(report.relative_deviation(j))]);
        }
        out.push(Check::new(
            format!("norm drift p={p}"),
            "analysis::conservation_report: relative drift of the L^p norm",
            Provenance::Derived,
            report.drift,
            Comparison::Below,
            limit,
        ));
    }

    let excess = max_principle_excess(&rho, setup.rho0.min(), setup.rho0.max());
    out.push(Check::new(
        "max principle",
        "characteristics::solve_classical: values stay in [min rho0, max rho0]",
        Provenance::Derived,
        excess,
        Comparison::AtMost,
        tol.max_principle,
    ));

    let flux = boundary_flux_decay(&setup.u, &setup.grid, 0.0, &cfg.sweeps.h)?;
    let mut boundary = Table::new("boundary.csv", &["h", "value"]);
    for &(h, v) in &flux {
        boundary.push(vec![num(h), num(v)]);
    }
    let margin = setup.u.support_margin();
    let inside: Vec<f64> = flux.iter().filter(|(h, _)| 1.0 / h < margin).map(|&(_, v)| v).collect();
    if !inside.is_empty() {
        out.push(Check::new(
            "boundary flux vanishes inside the support margin",
            "analysis::boundary_flux_decay: exact zero once 1/h < margin",
            Provenance::Trivial,
            inside.iter().copied().fold(0.0, f64::max),
            Comparison::AtMost,
            0.0,
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.study.seed);
    let domain = setup.grid.domain();
    let t_final = setup.times.t_final();
    let mut probes = Table::new("probes.csv", &["x", "y", "error"]);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.study.probes {
        let x = Point::new(
            rng.gen_range(domain.x_lo()..domain.x_hi()),
            rng.gen_range(domain.y_lo()..domain.y_hi()),
        );
        let there = flow_map(&setup.u, 0.0, t_final, x)?;
        let back = flow_map(&setup.u, t_final, 0.0, there)?;
        let err = (back - x).norm();
        worst = worst.max(err);
        probes.push(vec![num(x.x), num(x.y), num(err)]);
    }
    if cfg.study.probes > 0 {
        out.push(Check::new(
            "flow map reversibility",
            "characteristics::flow_map: X(0, T) after X(T, 0) is the identity",
            Provenance::Derived,
            worst,
            Comparison::Below,
            tol.reversibility,
        ));
    }

    out.detail("support_margin", if margin.is_finite() { margin } else { -1.0 });
    out.detail("rho0_min", setup.rho0.min());
    out.detail("rho0_max", setup.rho0.max());
    Ok(StudyRun {
        outcome: out,
        tables: vec![norms, boundary, probes],
    })
}
