//! Named, tolerance-bearing checks over grids of boosts and quantum numbers,
//! and the report they aggregate into.

pub mod audit;
pub mod catalog;
pub mod checks;
pub mod normalization;
pub mod sampling;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{domain, Result};
use crate::kinematics::BoostVelocity;
use crate::operators::{DiffEngine, EngineMode};
use crate::oscillator::{OscillatorSpec, OscillatorState, QuantumNumbers};

pub use audit::{AuditRecord, KtAuditEntry, PsiLadderEntry};
pub use catalog::{CheckInfo, ToleranceFamily, CHECKS};

pub const REPORT_SCHEMA_VERSION: &str = "osc-lab-report/1";

/// Per-family tolerances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub analytic: f64,
    pub fd: f64,
    pub quadrature: f64,
    pub quadrature_stability: f64,
    pub lorentz: f64,
    pub mass: f64,
    /// Largest admissible constant `C` in the low-velocity mass bound.
    pub nonrel_bound: f64,
    pub engine_agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            analytic: 1e-9,
            fd: 1e-6,
            quadrature: 1e-8,
            quadrature_stability: 1e-10,
            lorentz: 1e-12,
            mass: 1e-12,
            nonrel_bound: 1.0,
            engine_agreement: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn for_engine(&self, engine: &DiffEngine) -> f64 {
        match engine.mode {
            EngineMode::Analytic => self.analytic,
            EngineMode::FiniteDifference => self.fd,
        }
    }
}

/// States and boosts a check sweeps over.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub spec: OscillatorSpec,
    /// An empty list means the rest frame only.
    pub boosts: Vec<BoostVelocity>,
    pub qn_max: u32,
    pub sample_count: usize,
    pub seed: u64,
}

impl GridSpec {
    pub fn new(
        spec: OscillatorSpec,
        boosts: Vec<BoostVelocity>,
        qn_max: u32,
        sample_count: usize,
        seed: u64,
    ) -> Result<Self> {
        if sample_count == 0 {
            return domain("sample_count must be at least 1");
        }
        Ok(GridSpec {
            spec,
            boosts,
            qn_max,
            sample_count,
            seed,
        })
    }

    pub fn effective_boosts(&self) -> Vec<BoostVelocity> {
        if self.boosts.is_empty() {
            vec![BoostVelocity::rest()]
        } else {
            self.boosts.clone()
        }
    }

    /// Every `(boost index, state index, state)` with `n ≤ qn_max`.
    pub fn states(&self) -> Result<Vec<(usize, usize, OscillatorState)>> {
        self.states_up_to(self.qn_max)
    }

    pub fn states_up_to(&self, n_max: u32) -> Result<Vec<(usize, usize, OscillatorState)>> {
        let mut out = Vec::new();
        for (b, v) in self.effective_boosts().into_iter().enumerate() {
            for (s, q) in QuantumNumbers::enumerate(n_max).into_iter().enumerate() {
                out.push((b, s, OscillatorState::new(self.spec, q, v)?));
            }
        }
        Ok(out)
    }
}

/// Low-velocity limit settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonrelSettings {
    /// Constituent masses `m` (equal-mass systems).
    pub mass_scales: Vec<f64>,
    pub omega_big: f64,
    pub max_n: u32,
}

impl Default for NonrelSettings {
    fn default() -> Self {
        NonrelSettings {
            mass_scales: vec![10.0, 100.0],
            omega_big: 1.0,
            max_n: 2,
        }
    }
}

/// Everything `run_suite` needs, already validated.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteSettings {
    pub grid: GridSpec,
    pub engines: Vec<DiffEngine>,
    pub tolerances: Tolerances,
    pub quadrature_nodes: usize,
    pub lorentz_samples: usize,
    pub nonrel: NonrelSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckResult {
    pub check_id: String,
    pub equation_tag: String,
    pub engine: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub samples: u64,
    pub notes: String,
}

impl CheckResult {
    /// `passed` is derived from the residual. A non-finite residual is
    /// recorded as `f64::MAX` and fails.
    pub fn new(
        check_id: &str,
        engine: &str,
        max_residual: f64,
        tolerance: f64,
        samples: u64,
        notes: impl Into<String>,
    ) -> Self {
        let mut notes = notes.into();
        let max_residual = if max_residual.is_finite() {
            max_residual
        } else {
            notes = format!("non-finite residual; {notes}");
            f64::MAX
        };
        let equation_tag = catalog::lookup(check_id).map(|c| c.tag).unwrap_or("").to_string();
        CheckResult {
            check_id: check_id.to_string(),
            equation_tag,
            engine: engine.to_string(),
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
            samples,
            notes,
        }
    }
}

pub fn engine_label(engine: &DiffEngine) -> &'static str {
    match engine.mode {
        EngineMode::Analytic => "analytic",
        EngineMode::FiniteDifference => "fd",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: String,
    pub artifact_version: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckResult>,
    pub audits: Vec<AuditRecord>,
    /// True when every gating check passed; audits never count.
    pub passed: bool,
    pub wall_time_seconds: f64,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Pretty JSON with keys sorted, newline-terminated.
    pub fn to_json_string(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        let mut s = serde_json::to_string_pretty(&value)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Runs every check and audit for `settings`.
pub fn run_settings(settings: &SuiteSettings, config_echo: serde_json::Value) -> Result<Report> {
    let started = Instant::now();
    let grid = &settings.grid;
    let tol = &settings.tolerances;
    let mut results = Vec::new();

    for engine in &settings.engines {
        let t = tol.for_engine(engine);
        results.extend(checks::check_ladder_relations(grid, engine, t)?);
        results.extend(checks::check_constraint_suite(grid, engine, t)?);
        results.push(checks::check_lo_prime(grid, engine, t)?);
        results.push(checks::check_shrod4(grid, engine, t)?);
    }
    results.push(checks::check_mass_shell(grid, tol.analytic)?);
    if settings.engines.len() > 1 {
        let fd = settings
            .engines
            .iter()
            .find(|e| !e.is_analytic())
            .copied()
            .unwrap_or_else(DiffEngine::default_fd);
        results.push(checks::check_engine_agreement(grid, &fd, tol.engine_agreement)?);
    }
    results.extend(checks::check_normalization(
        grid,
        settings.quadrature_nodes,
        tol.quadrature,
        tol.quadrature_stability,
    )?);
    results.push(checks::check_lorentz_invariance(
        grid,
        settings.lorentz_samples,
        tol.lorentz,
    )?);
    results.push(checks::check_mass_spectrum(grid, tol.mass)?);
    results.push(checks::check_nonrel_limit(&settings.nonrel, tol.nonrel_bound)?);

    results.sort_by(|a, b| (&a.check_id, &a.engine).cmp(&(&b.check_id, &b.engine)));

    let mut audits = vec![audit::audit_kt_individual(grid)?, audit::audit_ladder_on_psi(grid)?];
    audits.sort_by(|a, b| a.audit_id.cmp(&b.audit_id));

    let passed = results.iter().all(|c| c.passed);
    Ok(Report {
        schema_version: REPORT_SCHEMA_VERSION.to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config_echo,
        checks: results,
        audits,
        passed,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Validates `config` and runs the full suite.
pub fn run_suite(config: &Config) -> Result<Report> {
    let settings = config.settings()?;
    run_settings(&settings, serde_json::to_value(config)?)
}
