//! Study configuration: a TOML file with one table per concern, plus
//! `section.key=value` overrides applied before typing.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use transport_core::fields::{Gaussian, Modulation, StreamFunction, VelocityField};
use transport_core::geometry::{Domain, Grid, Point, TimePartition};

/// A configuration problem tied to the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "`{}`: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: StudySection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub vortex: Vec<VortexSpec>,
    #[serde(default)]
    pub density: DensitySpec,
    #[serde(default)]
    pub sweeps: Sweeps,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub mollify: MollifySection,
    #[serde(default)]
    pub renorm: RenormSection,
    #[serde(default)]
    pub stability: StabilitySection,
    #[serde(default)]
    pub solve: SolveSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub name: String,
    /// Seeds probe-point sampling only.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Random interior points for the reversibility check.
    #[serde(default = "default_probes")]
    pub probes: usize,
}

fn default_probes() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Cells per side.
    pub n: usize,
    /// `[x_lo, y_lo, x_hi, y_hi]`.
    pub domain: [f64; 4],
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            n: 128,
            domain: [0.0, 0.0, 1.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub t_final: f64,
    pub nt: usize,
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection { t_final: 1.0, nt: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulationSpec {
    Constant,
    Linear,
    InverseSqrt,
}

impl From<ModulationSpec> for Modulation {
    fn from(m: ModulationSpec) -> Self {
        match m {
            ModulationSpec::Constant => Modulation::Constant,
            ModulationSpec::Linear => Modulation::Linear,
            ModulationSpec::InverseSqrt => Modulation::inverse_sqrt(),
        }
    }
}

/// One bump stream function `A a(t) exp(-1/(1 - |x-c|²/R²))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
    #[serde(default = "constant_modulation")]
    pub modulation: ModulationSpec,
}

fn constant_modulation() -> ModulationSpec {
    ModulationSpec::Constant
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensitySpec {
    pub center: [f64; 2],
    pub sigma: f64,
    pub amplitude: f64,
}

impl Default for DensitySpec {
    fn default() -> Self {
        DensitySpec {
            center: [0.6, 0.5],
            sigma: 0.08,
            amplitude: 1.0,
        }
    }
}

impl DensitySpec {
    pub fn gaussian(&self) -> Result<Gaussian, ConfigError> {
        Gaussian::new(Point::new(self.center[0], self.center[1]), self.sigma, self.amplitude)
            .map_err(|e| ConfigError::new("density", e.to_string()))
    }
}

/// An exponent in `[1, ∞]`; written as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExponentRepr", into = "ExponentRepr")]
pub struct Exponent(pub f64);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Int(i64),
    Float(f64),
    Word(String),
}

impl TryFrom<ExponentRepr> for Exponent {
    type Error = String;

    fn try_from(r: ExponentRepr) -> Result<Self, String> {
        match r {
            ExponentRepr::Int(i) => Ok(Exponent(i as f64)),
            ExponentRepr::Float(f) => Ok(Exponent(f)),
            ExponentRepr::Word(w) if matches!(w.as_str(), "inf" | "infinity" | "∞") => Ok(Exponent(f64::INFINITY)),
            ExponentRepr::Word(w) => Err(format!("expected a number or \"inf\", got {w:?}")),
        }
    }
}

impl From<Exponent> for ExponentRepr {
    fn from(e: Exponent) -> Self {
        if e.0.is_infinite() {
            ExponentRepr::Word("inf".into())
        } else {
            ExponentRepr::Float(e.0)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweeps {
    pub p: Vec<Exponent>,
    pub eps: Vec<f64>,
    pub n: Vec<usize>,
    pub h: Vec<f64>,
}

impl Default for Sweeps {
    fn default() -> Self {
        Sweeps {
            p: vec![Exponent(1.0), Exponent(2.0), Exponent(3.0)],
            eps: vec![0.1, 0.05, 0.025],
            n: vec![2, 4, 8, 16],
            h: (2..=8).map(|k| f64::from(1u32 << k)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative norm drift for finite `p`.
    pub drift: f64,
    pub drift_inf: f64,
    pub max_principle: f64,
    pub residual: f64,
    pub identity: f64,
    /// Upper bound on last/first of the remainder curve.
    pub decay_ratio: f64,
    /// A time-frozen field must produce a residual above this.
    pub frozen_detection: f64,
    /// Allowed deviation of the `dₙ` log-log slope from -1.
    pub slope: f64,
    /// Upper bound on `e_last / e_first`.
    pub stability_ratio: f64,
    pub reversibility: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            drift: 1e-3,
            drift_inf: 1e-6,
            max_principle: 1e-9,
            residual: 1e-3,
            identity: 1e-3,
            decay_ratio: 0.5,
            frozen_detection: 1e-2,
            slope: 0.1,
            stability_ratio: 0.35,
            reversibility: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MollifySection {
    /// Integrability of ρ.
    pub alpha: f64,
    /// Integrability of ∇u.
    pub p: f64,
    /// The remainder is measured on Ω shrunk by this much.
    pub inner_shrink: f64,
    pub time_stride: usize,
    /// Kernel scale for the commutator identity check.
    pub identity_eps: f64,
    /// Spatial part of the identity test function, quadratic in time.
    pub identity_test_function: TestFunctionSpec,
}

impl Default for MollifySection {
    fn default() -> Self {
        MollifySection {
            alpha: 2.0,
            p: 2.0,
            inner_shrink: 0.15,
            time_stride: 4,
            identity_eps: 0.05,
            identity_test_function: TestFunctionSpec {
                center: [0.6, 0.62],
                radius: 0.2,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenormSection {
    /// Spatial bumps; each is paired with both time profiles.
    pub test_functions: Vec<TestFunctionSpec>,
}

impl Default for RenormSection {
    fn default() -> Self {
        let tf = |x, y, r| TestFunctionSpec { center: [x, y], radius: r };
        RenormSection {
            test_functions: vec![tf(0.5, 0.5, 0.25), tf(0.6, 0.62, 0.2), tf(0.45, 0.6, 0.2)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationSpec {
    Identity,
    Amplitude,
    InitialBump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilitySection {
    pub perturbation: PerturbationSpec,
    pub p: Exponent,
    /// Added as `bump / n` for the initial-bump family.
    pub bump: DensitySpec,
}

impl Default for StabilitySection {
    fn default() -> Self {
        StabilitySection {
            perturbation: PerturbationSpec::Amplitude,
            p: Exponent(2.0),
            bump: DensitySpec {
                center: [0.45, 0.55],
                sigma: 0.1,
                amplitude: 0.5,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SolveSection {
    /// Dump every `stride`-th layer; the first and last are always written.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
}

/// `section.key=value`; the value is read as a TOML value, falling back
/// to a bare string.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub path: Vec<String>,
    pub value: toml::Value,
}

impl std::str::FromStr for Override {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let (key, raw) = s
            .split_once('=')
            .ok_or_else(|| ConfigError::new("", format!("override {s:?} is not of the form key=value")))?;
        let key = key.trim();
        let path: Vec<String> = key.split('.').map(str::to_owned).collect();
        if path.iter().any(String::is_empty) {
            return Err(ConfigError::new(key, "empty path segment"));
        }
        let raw = raw.trim();
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_owned()));
        Ok(Override { path, value })
    }
}

fn set_path(node: &mut toml::Value, path: &[String], value: &toml::Value, field: &str) -> Result<(), ConfigError> {
    let Some((head, rest)) = path.split_first() else {
        *node = value.clone();
        return Ok(());
    };
    match node {
        toml::Value::Table(t) => {
            let child = t
                .entry(head.clone())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            set_path(child, rest, value, field)
        }
        // `vortex.0.amplitude`
        toml::Value::Array(items) => {
            let idx: usize = head
                .parse()
                .map_err(|_| ConfigError::new(field, format!("expected an array index, got `{head}`")))?;
            let len = items.len();
            let child = items
                .get_mut(idx)
                .ok_or_else(|| ConfigError::new(field, format!("index {idx} out of range for {len} entries")))?;
            set_path(child, rest, value, field)
        }
        _ => Err(ConfigError::new(field, format!("cannot descend into `{head}`: parent is not a section"))),
    }
}

impl StudyConfig {
    pub fn from_toml_str(text: &str, overrides: &[Override]) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::new("", e.to_string()))?;
        let mut root = toml::Value::Table(table);
        for o in overrides {
            set_path(&mut root, &o.path, &o.value, &o.path.join("."))?;
        }
        let cfg = StudyConfig::deserialize(root).map_err(|e| ConfigError::new("", e.message()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[Override]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.study;
        if s.name.is_empty() || !s.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(ConfigError::new("study.name", "must be a nonempty [A-Za-z0-9._-] string"));
        }
        if self.grid.n < 2 {
            return Err(ConfigError::new("grid.n", format!("need at least 2 cells, got {}", self.grid.n)));
        }
        self.domain()?;
        positive("time.t_final", self.time.t_final)?;
        if self.time.nt == 0 {
            return Err(ConfigError::new("time.nt", "must be at least 1"));
        }
        self.velocity()?;
        self.density.gaussian()?;

        let sw = &self.sweeps;
        if sw.p.is_empty() {
            return Err(ConfigError::new("sweeps.p", "must not be empty"));
        }
        if let Some(p) = sw.p.iter().find(|p| !(p.0 >= 1.0)) {
            return Err(ConfigError::new("sweeps.p", format!("exponents lie in [1, inf], got {p}")));
        }
        if sw.eps.is_empty() {
            return Err(ConfigError::new("sweeps.eps", "must not be empty"));
        }
        if sw.eps.iter().any(|&e| !(e > 0.0)) || sw.eps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(ConfigError::new("sweeps.eps", "must be positive and strictly decreasing"));
        }
        if sw.n.is_empty() || sw.n.contains(&0) {
            return Err(ConfigError::new("sweeps.n", "must be nonempty with positive entries"));
        }
        if sw.h.is_empty() || sw.h.iter().any(|&h| !(h > 0.0)) || sw.h.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ConfigError::new("sweeps.h", "must be nonempty, positive and strictly increasing"));
        }

        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.drift", t.drift),
            ("tolerances.drift_inf", t.drift_inf),
            ("tolerances.max_principle", t.max_principle),
            ("tolerances.residual", t.residual),
            ("tolerances.identity", t.identity),
            ("tolerances.decay_ratio", t.decay_ratio),
            ("tolerances.frozen_detection", t.frozen_detection),
            ("tolerances.slope", t.slope),
            ("tolerances.stability_ratio", t.stability_ratio),
            ("tolerances.reversibility", t.reversibility),
        ] {
            positive(name, v)?;
        }

        let m = &self.mollify;
        if !(m.alpha >= 1.0) {
            return Err(ConfigError::new("mollify.alpha", format!("must be at least 1, got {}", m.alpha)));
        }
        if !(m.p > 1.0) {
            return Err(ConfigError::new("mollify.p", format!("must exceed 1, got {}", m.p)));
        }
        if !(m.inner_shrink > sw.eps[0]) {
            return Err(ConfigError::new(
                "mollify.inner_shrink",
                format!("must exceed the largest eps {} so the remainder is defined", sw.eps[0]),
            ));
        }
        if m.time_stride == 0 || m.time_stride > self.time.nt {
            return Err(ConfigError::new("mollify.time_stride", "must lie in [1, time.nt]"));
        }
        positive("mollify.identity_eps", m.identity_eps)?;
        positive("mollify.identity_test_function.radius", m.identity_test_function.radius)?;

        if self.renorm.test_functions.is_empty() {
            return Err(ConfigError::new("renorm.test_functions", "must not be empty"));
        }
        for (k, tf) in self.renorm.test_functions.iter().enumerate() {
            positive(&format!("renorm.test_functions[{k}].radius"), tf.radius)?;
        }
        if !(self.stability.p.0 >= 1.0) {
            return Err(ConfigError::new("stability.p", "must lie in [1, inf]"));
        }
        self.stability
            .bump
            .gaussian()
            .map_err(|e| ConfigError::new("stability.bump", e.message))?;
        if self.solve.stride == Some(0) {
            return Err(ConfigError::new("solve.stride", "must be at least 1"));
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain, ConfigError> {
        let [a, b, c, d] = self.grid.domain;
        Domain::new(a, b, c, d).map_err(|e| ConfigError::new("grid.domain", e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        Grid::new(self.domain()?, self.grid.n, self.grid.n).map_err(|e| ConfigError::new("grid.n", e.to_string()))
    }

    pub fn times(&self) -> Result<TimePartition, ConfigError> {
        TimePartition::new(self.time.t_final, self.time.nt).map_err(|e| ConfigError::new("time", e.to_string()))
    }

    /// Superposition of the configured vortices; no entries means `u ≡ 0`.
    pub fn velocity(&self) -> Result<VelocityField, ConfigError> {
        let domain = self.domain()?;
        if self.vortex.is_empty() {
            return Ok(VelocityField::zero(domain));
        }
        let comps = self
            .vortex
            .iter()
            .enumerate()
            .map(|(k, v)| {
                StreamFunction::new(Point::new(v.center[0], v.center[1]), v.radius, v.amplitude)
                    .map(|s| s.with_modulation(v.modulation.into()))
                    .map_err(|e| ConfigError::new(format!("vortex[{k}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        VelocityField::new(domain, comps).map_err(|e| ConfigError::new("vortex", e.to_string()))
    }
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(name, format!("must be positive and finite, got {v}")))
    }
}
