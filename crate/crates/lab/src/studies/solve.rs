use transport_core::analysis::lp_norm;

use super::{Setup, StudyRun};
use crate::config::StudyConfig;
use crate::error::LabError;
use crate::io::{num, Table};
use crate::outcome::StudyOutcome;

/// Bare classical solve: dumps selected layers and the per-layer norms.
pub fn run_solve(cfg: &StudyConfig) -> Result<StudyRun, LabError> {
    let setup = Setup::new(cfg)?;
    let rho = setup.solve()?;
    let nt = setup.times.steps();
    let stride = cfg.solve.stride.unwrap_or(nt);

    let mut field = Table::new("field.csv", &["t", "x", "y", "rho"]);
    let mut norms = Table::new("norms.csv", &["t", "l1", "l2", "max"]);
    for (j, layer) in rho.layers().iter().enumerate() {
        let t = setup.times.time(j);
        norms.push(vec![
            num(t),
            num(lp_norm(layer, 1.0)?),
            num(lp_norm(layer, 2.0)?),
            num(lp_norm(layer, f64::INFINITY)?),
        ]);
        if j % stride != 0 && j != nt {
            continue;
        }
        for (k, p) in setup.grid.nodes().enumerate() {
            field.push(vec![num(t), num(p.x), num(p.y), num(layer.values()[k])]);
        }
    }

    let mut out = StudyOutcome::new(&cfg.study.name, "solve");
    out.detail("min", rho.min());
    out.detail("max", rho.max());
    Ok(StudyRun {
        outcome: out,
        tables: vec![field, norms],
    })
}
