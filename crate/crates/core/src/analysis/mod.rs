//! Norms, conservation and boundary-layer diagnostics, uniform
//! integrability thresholds and the stability experiment.

mod boundary;
mod norms;
mod stability;
mod truncation;

pub use boundary::boundary_flux_decay;
pub(crate) use norms::lp_quasi_norm_over;
pub use norms::{
    bochner_norm_u, conservation_report, lp_distance, lp_norm, lp_norm_over, max_principle_excess, NormReport,
};
pub use stability::{
    max_distance, renormalization_convergence_check, stability_experiment, Perturbation, RenormalizedConvergence,
    StabilityReport, StabilityRun, MONOTONE_SLACK,
};
pub use truncation::{family_tail, truncation_thresholds, TruncationProfile};
