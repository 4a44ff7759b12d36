//! Run configuration: one JSON document, validated before any computation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigIssue, Error, Result};
use crate::kinematics::{BoostVelocity, MAX_SPEED};
use crate::operators::engine::MIN_STEP;
use crate::operators::{DiffEngine, StencilOrder};
use crate::oscillator::{sigma_of_n, OscillatorSpec};
use crate::verifier::{GridSpec, NonrelSettings, SuiteSettings, Tolerances};

pub const CONFIG_SCHEMA_VERSION: &str = "osc-lab-config/1";
pub const SEED_ENV: &str = "OSC_LAB_SEED";

/// Hermite recurrences are stable well past this, but cost grows fast.
const QN_CAP_LIMIT: u32 = 40;
const MAX_QUADRATURE_NODES: usize = 128;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineSelection {
    Analytic,
    Fd,
    #[default]
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Masses {
    pub m1: f64,
    pub m2: f64,
}

impl Default for Masses {
    fn default() -> Self {
        Masses { m1: 1.0, m2: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSettings {
    /// Gauss-Hermite nodes per axis; the stability check doubles this.
    pub nodes: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { nodes: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSettings {
    pub boost_max: f64,
    pub boost_steps: usize,
    /// Unit direction of the boost axis (normalized on use).
    pub boost_direction: [f64; 3],
    pub level_max: u32,
    /// `m1 / m2` values; `m2` is taken from `masses`.
    pub mass_ratios: Vec<f64>,
    /// State probed along the boost and mass-ratio axes.
    pub state: [u32; 3],
}

impl Default for ScanSettings {
    fn default() -> Self {
        ScanSettings {
            boost_max: 0.95,
            boost_steps: 20,
            boost_direction: [1.0, 0.0, 0.0],
            level_max: 5,
            mass_ratios: vec![1.0, 1.25, 1.5, 2.0, 3.0, 4.0],
            state: [1, 1, 0],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<String>,
}

fn default_schema() -> String {
    CONFIG_SCHEMA_VERSION.to_string()
}
fn default_omega() -> f64 {
    1.0
}
fn default_qn_max() -> u32 {
    4
}
fn default_qn_cap() -> u32 {
    12
}
fn default_boosts() -> Vec<[f64; 3]> {
    vec![[0.0, 0.0, 0.0], [0.6, 0.0, 0.0], [0.0, 0.9, 0.0], [0.55, 0.55, 0.55]]
}
fn default_fd_step() -> f64 {
    crate::operators::engine::DEFAULT_FD_STEP
}
fn default_fd_order() -> u32 {
    4
}
fn default_sample_count() -> usize {
    50
}
fn default_lorentz_samples() -> usize {
    200
}
fn default_seed() -> u64 {
    1729
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_schema")]
    pub schema_version: String,
    #[serde(default)]
    pub masses: Masses,
    #[serde(default = "default_omega")]
    pub omega_big: f64,
    /// Every `(l1, l2, l3)` with `l1 + l2 + l3 ≤ qn_max` is checked.
    #[serde(default = "default_qn_max")]
    pub qn_max: u32,
    #[serde(default = "default_qn_cap")]
    pub qn_cap: u32,
    #[serde(default = "default_boosts")]
    pub boosts: Vec<[f64; 3]>,
    #[serde(default)]
    pub engine: EngineSelection,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default = "default_fd_order")]
    pub fd_order: u32,
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
    #[serde(default = "default_lorentz_samples")]
    pub lorentz_samples: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    #[serde(default)]
    pub nonrel: NonrelSettings,
    #[serde(default)]
    pub scan: ScanSettings,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputPaths,
}

impl Default for Config {
    fn default() -> Self {
        Config::from_json_str("{}").expect("empty config uses defaults")
    }
}

struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(ConfigIssue {
            path: path.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, path: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.push(path, format!("must be a positive finite number, got {v}"));
        }
    }

    fn non_negative(&mut self, path: &str, v: f64) {
        if !(v.is_finite() && v >= 0.0) {
            self.push(path, format!("must be a non-negative finite number, got {v}"));
        }
    }

    fn speed(&mut self, path: &str, v: [f64; 3]) {
        if let Err(e) = BoostVelocity::from_array(v) {
            self.push(path, e.to_string());
        }
    }
}

impl Config {
    /// Parses a config document. Syntax errors carry line and column; type
    /// errors and unknown keys carry the field path.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(s);
        let parsed: std::result::Result<Config, _> = serde_path_to_error::deserialize(&mut de);
        let config = match parsed {
            Ok(c) => c,
            Err(e) => {
                let path = e.path().to_string();
                let inner = e.into_inner();
                return Err(classify(inner, path));
            }
        };
        de.end().map_err(|e| classify(e, ".".to_string()))?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Config::from_json_str(&text)
    }

    /// Replaces the seed with `OSC_LAB_SEED` when that variable is set.
    pub fn apply_env_seed(&mut self) -> Result<()> {
        match std::env::var(SEED_ENV) {
            Ok(raw) => {
                self.seed = raw.trim().parse().map_err(|_| {
                    Error::Config(vec![ConfigIssue {
                        path: SEED_ENV.to_string(),
                        message: format!("must be a non-negative integer, got {raw:?}"),
                    }])
                })?;
                Ok(())
            }
            Err(std::env::VarError::NotPresent) => Ok(()),
            Err(e) => Err(Error::Config(vec![ConfigIssue {
                path: SEED_ENV.to_string(),
                message: e.to_string(),
            }])),
        }
    }

    /// Every validation failure, in field order.
    pub fn validate(&self) -> Result<()> {
        let mut is = Issues(Vec::new());
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            is.push(
                "schema_version",
                format!(
                    "unsupported version {:?}, expected {CONFIG_SCHEMA_VERSION:?}",
                    self.schema_version
                ),
            );
        }
        is.non_negative("masses.m1", self.masses.m1);
        is.non_negative("masses.m2", self.masses.m2);
        if self.masses.m1 == 0.0 && self.masses.m2 == 0.0 {
            is.push("masses", "at least one mass must be positive");
        }
        is.positive("omega_big", self.omega_big);
        if self.qn_cap > QN_CAP_LIMIT {
            is.push("qn_cap", format!("must be at most {QN_CAP_LIMIT}, got {}", self.qn_cap));
        }
        if self.qn_max > self.qn_cap {
            is.push(
                "qn_max",
                format!("exceeds qn_cap = {}, got {}", self.qn_cap, self.qn_max),
            );
        }
        for (k, v) in self.boosts.iter().enumerate() {
            is.speed(&format!("boosts[{k}]"), *v);
        }
        if !(self.fd_step.is_finite() && self.fd_step >= MIN_STEP) {
            is.push(
                "fd_step",
                format!("must be finite and at least {MIN_STEP:e}, got {}", self.fd_step),
            );
        }
        if StencilOrder::from_order(self.fd_order).is_none() {
            is.push("fd_order", format!("must be 2 or 4, got {}", self.fd_order));
        }
        if self.sample_count == 0 {
            is.push("sample_count", "must be at least 1");
        }
        if self.lorentz_samples == 0 {
            is.push("lorentz_samples", "must be at least 1");
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("analytic", t.analytic),
            ("fd", t.fd),
            ("quadrature", t.quadrature),
            ("quadrature_stability", t.quadrature_stability),
            ("lorentz", t.lorentz),
            ("mass", t.mass),
            ("nonrel_bound", t.nonrel_bound),
            ("engine_agreement", t.engine_agreement),
        ] {
            is.non_negative(&format!("tolerances.{name}"), v);
        }
        if !(1..=MAX_QUADRATURE_NODES).contains(&self.quadrature.nodes) {
            is.push(
                "quadrature.nodes",
                format!("must be in 1..={MAX_QUADRATURE_NODES}, got {}", self.quadrature.nodes),
            );
        }
        self.validate_nonrel(&mut is);
        self.validate_scan(&mut is);
        if is.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(is.0))
        }
    }

    fn validate_nonrel(&self, is: &mut Issues) {
        let nr = &self.nonrel;
        is.positive("nonrel.omega_big", nr.omega_big);
        if nr.max_n > self.qn_cap {
            is.push("nonrel.max_n", format!("exceeds qn_cap = {}", self.qn_cap));
        }
        for (k, &m) in nr.mass_scales.iter().enumerate() {
            let path = format!("nonrel.mass_scales[{k}]");
            if !(m.is_finite() && m > 0.0) {
                is.push(path, format!("must be a positive finite number, got {m}"));
                continue;
            }
            if nr.omega_big > 0.0 {
                let ratio = sigma_of_n(nr.omega_big, nr.max_n) / (2.0 * m).powi(2);
                if ratio > 1e-2 {
                    is.push(
                        path,
                        format!("σ/m_c² = {ratio:.3e} exceeds 1e-2; not a low-velocity system"),
                    );
                }
            }
        }
    }

    fn validate_scan(&self, is: &mut Issues) {
        let s = &self.scan;
        if !(s.boost_max.is_finite() && (0.0..MAX_SPEED).contains(&s.boost_max)) {
            is.push("scan.boost_max", format!("must be in [0, 1), got {}", s.boost_max));
        }
        if s.boost_steps < 2 {
            is.push("scan.boost_steps", "must be at least 2");
        }
        let d2: f64 = s.boost_direction.iter().map(|c| c * c).sum();
        if !(d2.is_finite() && d2 > 0.0) {
            is.push("scan.boost_direction", "must be a finite non-zero vector");
        }
        if s.level_max > self.qn_cap {
            is.push("scan.level_max", format!("exceeds qn_cap = {}", self.qn_cap));
        }
        for (k, &r) in s.mass_ratios.iter().enumerate() {
            if !(r.is_finite() && r > 0.0) {
                is.push(
                    format!("scan.mass_ratios[{k}]"),
                    format!("must be a positive finite number, got {r}"),
                );
            }
        }
        if s.state.iter().sum::<u32>() > self.qn_cap {
            is.push(
                "scan.state",
                format!("total quantum number exceeds qn_cap = {}", self.qn_cap),
            );
        }
    }

    pub fn spec(&self) -> Result<OscillatorSpec> {
        OscillatorSpec::new(self.masses.m1, self.masses.m2, self.omega_big)
    }

    pub fn engines(&self) -> Result<Vec<DiffEngine>> {
        let order = StencilOrder::from_order(self.fd_order).ok_or_else(|| {
            Error::Config(vec![ConfigIssue {
                path: "fd_order".to_string(),
                message: format!("must be 2 or 4, got {}", self.fd_order),
            }])
        })?;
        let fd = DiffEngine::finite_difference(self.fd_step, order)?;
        Ok(match self.engine {
            EngineSelection::Analytic => vec![DiffEngine::analytic()],
            EngineSelection::Fd => vec![fd],
            EngineSelection::Both => vec![DiffEngine::analytic(), fd],
        })
    }

    /// Validates and builds the suite settings.
    pub fn settings(&self) -> Result<SuiteSettings> {
        self.validate()?;
        let boosts = self
            .boosts
            .iter()
            .map(|v| BoostVelocity::from_array(*v))
            .collect::<Result<Vec<_>>>()?;
        Ok(SuiteSettings {
            grid: GridSpec::new(self.spec()?, boosts, self.qn_max, self.sample_count, self.seed)?,
            engines: self.engines()?,
            tolerances: self.tolerances.clone(),
            quadrature_nodes: self.quadrature.nodes,
            lorentz_samples: self.lorentz_samples,
            nonrel: self.nonrel.clone(),
        })
    }
}

fn classify(e: serde_json::Error, path: String) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Syntax | Category::Eof => Error::ConfigSyntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
        Category::Data => Error::Config(vec![ConfigIssue {
            path,
            message: e.to_string(),
        }]),
        Category::Io => Error::Json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn issues(s: &str) -> Vec<ConfigIssue> {
        match Config::from_json_str(s).and_then(|c| c.validate()) {
            Err(Error::Config(v)) => v,
            other => panic!("expected config issues, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_gives_defaults() {
        let c = Config::from_json_str("{}").unwrap();
        c.validate().unwrap();
        assert_eq!(c.qn_max, 4);
        assert_eq!(c.boosts.len(), 4);
        assert_eq!(c.engine, EngineSelection::Both);
        assert_eq!(c.tolerances.fd, 1e-6);
    }

    #[test]
    fn negative_spring_constant_names_the_field() {
        let v = issues(r#"{"omega_big": -1}"#);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].path, "omega_big");
    }

    #[test]
    fn all_issues_are_listed() {
        let v = issues(
            r#"{"masses": {"m1": -1, "m2": 1}, "boosts": [[0.1, 0, 0], [1.0, 0, 0]], "fd_order": 3, "qn_max": 20}"#,
        );
        let paths: Vec<&str> = v.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(paths, ["masses.m1", "qn_max", "boosts[1]", "fd_order"]);
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let v = issues(r#"{"tolerances": {"analytic": 1e-9, "bogus": 1}}"#);
        assert_eq!(v[0].path, "tolerances.bogus");
        assert!(v[0].message.contains("bogus"));
        let v = issues(r#"{"omega": 1}"#);
        assert!(v[0].message.contains("omega"));
    }

    #[test]
    fn type_errors_carry_the_path() {
        let v = issues(r#"{"nonrel": {"mass_scales": [10, "x"]}}"#);
        assert_eq!(v[0].path, "nonrel.mass_scales[1]");
    }

    #[test]
    fn syntax_errors_carry_position() {
        match Config::from_json_str("{\n  \"qn_max\": 3,\n  oops\n}") {
            Err(Error::ConfigSyntax { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Config::from_json_str("{} {}"),
            Err(Error::ConfigSyntax { .. })
        ));
    }

    #[test]
    fn low_velocity_regime_is_enforced() {
        let v = issues(r#"{"nonrel": {"mass_scales": [1.0]}}"#);
        assert_eq!(v[0].path, "nonrel.mass_scales[0]");
    }

    #[test]
    fn echo_round_trips() {
        let c = Config::default();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(Config::from_json_str(&s).unwrap(), c);
    }
}
