use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fields::Layer;
use crate::math;

/// Thresholds `M_ε` making every super-level tail `∫_{|ρ|>M} |ρ|` of a
/// family smaller than `ε`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruncationProfile {
    pub eps: Vec<f64>,
    pub thresholds: Vec<f64>,
    /// Largest tail over the family at the chosen threshold.
    pub tails: Vec<f64>,
}

/// Tails of one layer as a function of `M`: nodal magnitudes sorted in
/// decreasing order with suffix sums of `w|ρ|`.
struct TailTable {
    magnitudes: Vec<f64>,
    // cumulative[k] = Σ_{m<k} w_m |ρ_m| over the sorted order
    cumulative: Vec<f64>,
}

impl TailTable {
    fn new(layer: &Layer) -> Self {
        let w = layer.grid().trapezoid_weights();
        let nx = layer.grid().nx() + 1;
        let mut pairs: Vec<(f64, f64)> = layer
            .values()
            .iter()
            .enumerate()
            .map(|(k, &v)| (math::abs(v), w.weight(k % nx, k / nx)))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut cumulative = Vec::with_capacity(pairs.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for &(v, wk) in &pairs {
            acc += wk * v;
            cumulative.push(acc);
        }
        TailTable {
            magnitudes: pairs.into_iter().map(|p| p.0).collect(),
            cumulative,
        }
    }

    /// `Σ_{|ρ_k| > m} w_k |ρ_k|`.
    fn tail(&self, m: f64) -> f64 {
        let count = self.magnitudes.partition_point(|&v| v > m);
        self.cumulative[count]
    }
}

/// Largest tail over the family at level `m`.
pub fn family_tail(layers: &[Layer], m: f64) -> f64 {
    layers.iter().map(|l| TailTable::new(l).tail(m)).fold(0.0, f64::max)
}

/// For each `ε` the smallest candidate level (0 or an attained nodal
/// magnitude) whose tail is below `ε` for every member of the family.
pub fn truncation_thresholds(layers: &[Layer], eps_list: &[f64]) -> Result<TruncationProfile> {
    let Some(first) = layers.first() else {
        return Err(invalid("fields", "family must not be empty"));
    };
    if layers.iter().any(|l| l.grid() != first.grid()) {
        return Err(Error::ShapeMismatch("family members live on different grids".into()));
    }
    if eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(invalid("eps_list", "tolerances must be positive"));
    }
    let tables: Vec<TailTable> = layers.iter().map(TailTable::new).collect();
    let mut candidates: Vec<f64> = tables.iter().flat_map(|t| t.magnitudes.iter().copied()).collect();
    candidates.push(0.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let worst = |m: f64| tables.iter().map(|t| t.tail(m)).fold(0.0, f64::max);

    let mut thresholds = Vec::with_capacity(eps_list.len());
    let mut tails = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        // the tail is non-increasing in M and vanishes at the largest candidate
        let k = candidates.partition_point(|&m| worst(m) >= eps);
        let m = candidates[k.min(candidates.len() - 1)];
        thresholds.push(m);
        tails.push(worst(m));
    }
    Ok(TruncationProfile {
        eps: eps_list.to_vec(),
        thresholds,
        tails,
    })
}
