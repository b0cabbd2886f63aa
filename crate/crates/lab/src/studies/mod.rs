//! End-to-end studies. Each one computes, collects its tables and checks,
//! and leaves all file output to [`write_outputs`].

mod conservation;
mod mollification;
mod renormalization;
mod solve;
mod stability;

use std::path::Path;

use serde::Serialize;
use transport_core::characteristics::solve_classical;
use transport_core::fields::{make_test_function, Layer, ScalarField, TestFunction, TimeProfile, VelocityField};
use transport_core::geometry::{Grid, Point, TimePartition};

use crate::config::StudyConfig;
use crate::error::LabError;
use crate::io::{ensure_dir, write_csv, write_json, Table};
use crate::outcome::StudyOutcome;

pub use conservation::run_conservation_study;
pub use mollification::run_mollification_study;
pub use renormalization::run_renormalization_study;
pub use solve::run_solve;
pub use stability::run_stability_study;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    Conservation,
    Mollification,
    Renormalization,
    Stability,
    Solve,
}

impl StudyKind {
    pub fn label(self) -> &'static str {
        match self {
            StudyKind::Conservation => "conservation",
            StudyKind::Mollification => "mollify",
            StudyKind::Renormalization => "renorm",
            StudyKind::Stability => "stability",
            StudyKind::Solve => "solve",
        }
    }
}

/// Outcome plus the tables still to be written.
#[derive(Debug, Clone)]
pub struct StudyRun {
    pub outcome: StudyOutcome,
    pub tables: Vec<Table>,
}

pub fn run_study(kind: StudyKind, cfg: &StudyConfig) -> Result<StudyRun, LabError> {
    match kind {
        StudyKind::Conservation => run_conservation_study(cfg),
        StudyKind::Mollification => run_mollification_study(cfg),
        StudyKind::Renormalization => run_renormalization_study(cfg),
        StudyKind::Stability => run_stability_study(cfg),
        StudyKind::Solve => run_solve(cfg),
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    #[serde(flatten)]
    outcome: &'a StudyOutcome,
    files: Vec<&'static str>,
    config: &'a StudyConfig,
}

/// Write every table and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, run: &StudyRun, cfg: &StudyConfig) -> Result<(), LabError> {
    ensure_dir(dir)?;
    for t in &run.tables {
        write_csv(dir, t)?;
    }
    let summary = Summary {
        outcome: &run.outcome,
        files: run.tables.iter().map(|t| t.file).collect(),
        config: cfg,
    };
    write_json(&dir.join("summary.json"), &summary)
}

/// Discretisation, velocity and sampled initial layer of a config.
pub(crate) struct Setup {
    pub grid: Grid,
    pub times: TimePartition,
    pub u: VelocityField,
    pub rho0: Layer,
}

impl Setup {
    pub fn new(cfg: &StudyConfig) -> Result<Self, LabError> {
        let grid = cfg.grid()?;
        Ok(Setup {
            grid,
            times: cfg.times()?,
            u: cfg.velocity()?,
            rho0: Layer::sample(grid, &cfg.density.gaussian()?),
        })
    }

    pub fn solve(&self) -> Result<ScalarField, LabError> {
        Ok(solve_classical(&self.rho0, &self.u, &self.grid, &self.times)?)
    }
}

/// Every configured spatial bump with both time profiles.
pub(crate) fn test_function_bank(cfg: &StudyConfig) -> Result<Vec<TestFunction>, LabError> {
    let domain = cfg.domain()?;
    let t = cfg.time.t_final;
    let mut bank = Vec::new();
    for tf in &cfg.renorm.test_functions {
        for profile in [TimeProfile::Quadratic { t_final: t }, TimeProfile::Smoothstep { t_final: t }] {
            bank.push(make_test_function(&domain, Point::new(tf.center[0], tf.center[1]), tf.radius, profile, t)?);
        }
    }
    Ok(bank)
}
