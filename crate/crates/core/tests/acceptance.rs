//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::Instant;

use osc_lab::config::Config;
use osc_lab::kinematics::BoostVelocity;
use osc_lab::operators::DiffEngine;
use osc_lab::oscillator::{nonrel_mass_approx, rest_mass, sigma_of_n, OscillatorSpec, OscillatorState, QuantumNumbers};
use osc_lab::verifier::audit::audit_kt_individual;
use osc_lab::verifier::checks::{
    check_constraint_suite, check_ladder_relations, check_lo_prime, check_lorentz_invariance, check_mass_shell,
    check_nonrel_limit, check_normalization,
};
use osc_lab::verifier::{run_suite, CheckResult, GridSpec, NonrelSettings};
use osc_lab::Result;

const SEED: u64 = 1729;
const SAMPLES: usize = 50;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_checks(checks: &[CheckResult]) -> Self {
        let failed: Vec<&CheckResult> = checks.iter().filter(|c| !c.passed).collect();
        let worst = checks
            .iter()
            .map(|c| (c.max_residual / c.tolerance.max(f64::MIN_POSITIVE), c))
            .fold(None::<(f64, &CheckResult)>, |acc, (r, c)| match acc {
                Some((best, _)) if best >= r => acc,
                _ => Some((r, c)),
            });
        let mut detail = match worst {
            Some((_, c)) => format!(
                "{} checks; tightest {} [{}] {:.3e} <= {:.0e}",
                checks.len(),
                c.check_id,
                c.engine,
                c.max_residual,
                c.tolerance
            ),
            None => "no checks".to_string(),
        };
        for c in &failed {
            detail.push_str(&format!(
                "; FAILED {} [{}] {:.3e} > {:.0e}",
                c.check_id, c.engine, c.max_residual, c.tolerance
            ));
        }
        Outcome {
            passed: failed.is_empty() && !checks.is_empty(),
            detail,
        }
    }
}

fn unit_spec() -> Result<OscillatorSpec> {
    OscillatorSpec::new(1.0, 1.0, 1.0)
}

fn ladder_grid() -> Result<GridSpec> {
    let c = 0.95 / 3f64.sqrt();
    let boosts = vec![
        BoostVelocity::rest(),
        BoostVelocity::new(0.6, 0.0, 0.0)?,
        BoostVelocity::new(0.0, 0.9, 0.0)?,
        BoostVelocity::new(c, c, c)?,
    ];
    GridSpec::new(unit_spec()?, boosts, 4, SAMPLES, SEED)
}

fn ladder() -> Result<Outcome> {
    let grid = ladder_grid()?;
    let start = Instant::now();
    let mut checks = check_ladder_relations(&grid, &DiffEngine::analytic(), 1e-9)?;
    checks.extend(check_ladder_relations(&grid, &DiffEngine::default_fd(), 1e-6)?);
    let secs = start.elapsed().as_secs_f64();
    let mut out = Outcome::from_checks(&checks);
    out.detail.push_str(&format!("; {secs:.1} s (limit 60 s)"));
    out.passed &= secs <= 60.0;
    Ok(out)
}

fn constraints() -> Result<Outcome> {
    let grid = ladder_grid()?;
    let mut checks = check_constraint_suite(&grid, &DiffEngine::analytic(), 1e-9)?;
    checks.push(check_mass_shell(&grid, 1e-9)?);
    Ok(Outcome::from_checks(&checks))
}

fn mass_spectrum() -> Result<Outcome> {
    let anchors = [(rest_mass(1.0, 1.0, 0.0)?, 2.0), (rest_mass(2.0, 1.0, 0.0)?, 3.0)];
    let exact = anchors.iter().all(|(got, want)| got == want);
    let mut worst = 0.0f64;
    for sigma in [0.5, 1.0, 10.0] {
        let m0 = rest_mass(1.0, 1.0, sigma)?;
        worst = worst.max((m0 * m0 - (4.0 + 8.0 * sigma)).abs());
    }
    Ok(Outcome {
        passed: exact && worst <= 1e-12,
        detail: format!(
            "anchors {} and {} (exact: {exact}); max |M0² - (4 + 8σ)| = {worst:.3e} <= 1e-12",
            anchors[0].0, anchors[1].0
        ),
    })
}

fn normalization() -> Result<Outcome> {
    let boosts = vec![
        BoostVelocity::rest(),
        BoostVelocity::new(0.9, 0.0, 0.0)?,
        BoostVelocity::new(0.0, 0.5, 0.75)?,
    ];
    let grid = GridSpec::new(unit_spec()?, boosts, 4, 1, SEED)?;
    let nodes = Config::default().quadrature.nodes;
    Ok(Outcome::from_checks(&check_normalization(&grid, nodes, 1e-8, 1e-10)?))
}

fn lorentz() -> Result<Outcome> {
    let boosts = ladder_grid()?.boosts;
    let grid = GridSpec::new(unit_spec()?, boosts, 4, SAMPLES, SEED)?;
    Ok(Outcome::from_checks(&[check_lorentz_invariance(&grid, 200, 1e-12)?]))
}

fn nonrel() -> Result<Outcome> {
    let settings = NonrelSettings {
        mass_scales: vec![10.0, 100.0],
        omega_big: 1.0,
        max_n: 2,
    };
    let bound = check_nonrel_limit(&settings, 0.25)?;
    let mut ratios = Vec::new();
    for n in 0..=settings.max_n {
        let sigma = sigma_of_n(1.0, n);
        let dev = |m: f64| -> Result<f64> {
            Ok(rest_mass(m, m, sigma)? - nonrel_mass_approx(&OscillatorSpec::new(m, m, 1.0)?, sigma)?)
        };
        ratios.push(dev(100.0)? / dev(10.0)?);
    }
    let ratio_ok = ratios.iter().all(|r| (0.5e-3..=2e-3).contains(r));
    let ratios: Vec<String> = ratios.iter().map(|r| format!("{r:.4e}")).collect();
    Ok(Outcome {
        passed: bound.passed && ratio_ok,
        detail: format!(
            "fitted constant {:.5} vs bound 0.25 ({}); error ratio m = 100 / m = 10 per level [{}] in [5e-4, 2e-3] ({})",
            bound.max_residual,
            if bound.passed { "ok" } else { "exceeded" },
            ratios.join(", "),
            if ratio_ok { "ok" } else { "out of range" }
        ),
    })
}

fn lo_prime() -> Result<Outcome> {
    let grid = ladder_grid()?;
    Ok(Outcome::from_checks(&[check_lo_prime(
        &grid,
        &DiffEngine::analytic(),
        1e-9,
    )?]))
}

fn kt_audit() -> Result<Outcome> {
    let grid = GridSpec::new(unit_spec()?, ladder_grid()?.boosts, 2, SAMPLES, SEED)?;
    let record = audit_kt_individual(&grid)?;
    let relation = record.summary.get("max_equal_mass_relation_residual").copied();
    let reported = record.summary["reference_scalar_discrepancy"];
    let expected = 8.0 - 72f64.sqrt();
    let direct = {
        let reference = OscillatorState::new(
            OscillatorSpec::new(2.0, 1.0, 2.0 / 3.0)?,
            QuantumNumbers::GROUND,
            BoostVelocity::rest(),
        )?;
        let m0 = rest_mass(2.0, 1.0, reference.sigma)?;
        9.0 + 8.0 * reference.sigma - m0 * m0
    };
    let passed = relation.is_some_and(f64::is_finite)
        && (reported - expected).abs() <= 1e-6
        && (reported - direct).abs() <= 1e-6;
    Ok(Outcome {
        passed,
        detail: format!(
            "equal-mass relation residual {}; reference discrepancy {reported:.12} vs 8 - sqrt(72) = {expected:.12} and direct {direct:.12}",
            relation.map_or("missing".to_string(), |r| format!("{r:.3e}"))
        ),
    })
}

fn determinism() -> Result<Outcome> {
    let config = Config::default();
    let render = || -> Result<String> {
        let mut report = run_suite(&config)?;
        report.wall_time_seconds = 0.0;
        report.to_json_string()
    };
    let (a, b) = (render()?, render()?);
    Ok(Outcome {
        passed: a == b,
        detail: format!("two default runs, {} bytes each, identical: {}", a.len(), a == b),
    })
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("ladder relations", ladder),
        ("constraint suite", constraints),
        ("mass spectrum", mass_spectrum),
        ("normalization", normalization),
        ("lorentz form-invariance", lorentz),
        ("non-relativistic limit", nonrel),
        ("ladder product identity", lo_prime),
        ("total-constraint audit", kt_audit),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = run().unwrap_or_else(|e| Outcome {
            passed: false,
            detail: format!("error: {e}"),
        });
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {} {name}: {}", k + 1, outcome.detail);
        failures += usize::from(!outcome.passed);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
