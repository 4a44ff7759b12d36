//! Command-line entry point. Exit codes: 0 pass, 1 check failure, 2 usage or
//! configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{Config, EngineSelection};
use crate::error::{Error, Result};
use crate::scan::{run_scan, write_scan_csv, ScanAxis};
use crate::verifier::{self, catalog, ToleranceFamily};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_REPORT: &str = "osc-lab-report.json";
const DEFAULT_SCAN: &str = "osc-lab-scan.csv";

#[derive(Parser, Debug)]
#[command(
    name = "osc-lab",
    version,
    about = "Verification lab for the covariant two-particle oscillator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Analytic,
    Fd,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AxisArg {
    Boost,
    Level,
    MassRatio,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the verification suite and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `engine`.
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Overrides the config's `output.report`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate masses and residuals along one parameter axis as CSV.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Overrides the config's `output.scan`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Describe a check: relation, formula, tolerance and engine.
    Explain { check_id: String },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match cli.command {
        Command::Verify { config, engine, out } => cmd_verify(&config, engine.map(engine_selection), out.as_deref()),
        Command::Scan { config, axis, out } => cmd_scan(&config, scan_axis(axis), out.as_deref()),
        Command::Explain { check_id } => cmd_explain(&check_id),
    }
}

fn engine_selection(e: EngineArg) -> EngineSelection {
    match e {
        EngineArg::Analytic => EngineSelection::Analytic,
        EngineArg::Fd => EngineSelection::Fd,
        EngineArg::Both => EngineSelection::Both,
    }
}

fn scan_axis(a: AxisArg) -> ScanAxis {
    match a {
        AxisArg::Boost => ScanAxis::Boost,
        AxisArg::Level => ScanAxis::Level,
        AxisArg::MassRatio => ScanAxis::MassRatio,
    }
}

fn load_config(path: &Path) -> Result<Config> {
    let mut config = Config::from_path(path)?;
    config.apply_env_seed()?;
    Ok(config)
}

fn report_error(e: &Error) -> i32 {
    eprintln!("osc-lab: {e}");
    EXIT_USAGE
}

/// Writes `bytes` to a temporary file beside `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Runs the suite; 0 when every gating check passes, 1 otherwise, 2 on
/// configuration or I/O errors.
pub fn cmd_verify(config_path: &Path, engine: Option<EngineSelection>, out: Option<&Path>) -> i32 {
    let mut config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    if let Some(e) = engine {
        config.engine = e;
    }
    if let Some(o) = out {
        config.output.report = Some(o.to_string_lossy().into_owned());
    }
    let report = match verifier::run_suite(&config) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    let target = PathBuf::from(config.output.report.as_deref().unwrap_or(DEFAULT_REPORT));
    let written = report
        .to_json_string()
        .and_then(|s| write_atomic(&target, s.as_bytes()));
    if let Err(e) = written {
        return report_error(&e);
    }
    for c in &report.checks {
        println!(
            "{} {:<32} {:<15} residual {:.3e} (tolerance {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.check_id,
            c.engine,
            c.max_residual,
            c.tolerance
        );
    }
    for a in &report.audits {
        println!("AUDIT {} (non-gating, {} summary values)", a.audit_id, a.summary.len());
    }
    let failed = report.failures().count();
    println!(
        "{} checks, {} failed; report written to {}",
        report.checks.len(),
        failed,
        target.display()
    );
    if report.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Writes a scan table; 0 on success, 2 on configuration or I/O errors.
pub fn cmd_scan(config_path: &Path, axis: ScanAxis, out: Option<&Path>) -> i32 {
    let mut config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    if let Some(o) = out {
        config.output.scan = Some(o.to_string_lossy().into_owned());
    }
    let rows = match run_scan(&config, axis) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    let target = PathBuf::from(config.output.scan.as_deref().unwrap_or(DEFAULT_SCAN));
    let mut buf = Vec::new();
    let written = write_scan_csv(&mut buf, axis, &rows).and_then(|_| write_atomic(&target, &buf));
    if let Err(e) = written {
        return report_error(&e);
    }
    println!("{} rows along {axis} written to {}", rows.len(), target.display());
    EXIT_PASS
}

fn tolerance_text(f: ToleranceFamily) -> &'static str {
    match f {
        ToleranceFamily::Engine => "tolerances.analytic (default 1e-9) or tolerances.fd (default 1e-6), by engine",
        ToleranceFamily::Quadrature => "tolerances.quadrature (default 1e-8)",
        ToleranceFamily::QuadratureStability => "tolerances.quadrature_stability (default 1e-10)",
        ToleranceFamily::Lorentz => "tolerances.lorentz (default 1e-12)",
        ToleranceFamily::Mass => "tolerances.mass (default 1e-12)",
        ToleranceFamily::NonrelBound => "tolerances.nonrel_bound (default 1.0)",
        ToleranceFamily::EngineAgreement => "tolerances.engine_agreement (default 1e-6)",
        ToleranceFamily::None => "none",
    }
}

/// Prints the registry entry for `check_id`; 2 with suggestions if unknown.
pub fn cmd_explain(check_id: &str) -> i32 {
    match catalog::lookup(check_id) {
        Some(info) => {
            println!("{}", info.id);
            println!("  relation:  {}", info.tag);
            println!("  formula:   {}", info.formula);
            println!("  residual:  {}", info.residual);
            println!("  tolerance: {}", tolerance_text(info.tolerance));
            println!("  engine:    {}", info.engines);
            if info.gating {
                println!("  gating:    yes");
            } else {
                println!("  gating:    no (recorded in the report, never affects the exit code)");
            }
            EXIT_PASS
        }
        None => {
            let near = catalog::suggestions(check_id, 3);
            if near.is_empty() {
                eprintln!("osc-lab: unknown check id `{check_id}`");
            } else {
                eprintln!(
                    "osc-lab: unknown check id `{check_id}`; did you mean: {}",
                    near.join(", ")
                );
            }
            EXIT_USAGE
        }
    }
}
