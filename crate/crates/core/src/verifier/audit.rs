//! Non-gating audits: recorded findings about relations that are not part of
//! the self-consistent core.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{build_cells, Cell, FAMILY_AUDIT_KT, FAMILY_AUDIT_PSI};
use super::sampling::{peak_amplitude, sample_points, stream_rng};
use super::GridSpec;
use crate::error::Result;
use crate::kinematics::{minkowski_dot, perp_project, BoostVelocity, FourVector};
use crate::operators::{
    apply_kt_com, apply_ladder_primed, DiffEngine, Direction, IndividualKt, LadderIndex, PairField, ScalarField,
};
use crate::oscillator::{OscillatorSpec, OscillatorState, QuantumNumbers};

/// Audits probe states up to this level to bound cost.
const AUDIT_N_MAX: u32 = 2;
const AUDIT_SAMPLES: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditRecord {
    pub audit_id: String,
    pub equation_tag: String,
    pub gating: bool,
    pub notes: String,
    /// Headline numbers, keyed by name.
    pub summary: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kt_entries: Vec<KtAuditEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub psi_entries: Vec<PsiLadderEntry>,
}

/// The two forms of the total constraint on one state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KtAuditEntry {
    pub label: String,
    pub m1: f64,
    pub m2: f64,
    pub omega_big: f64,
    pub sigma: f64,
    pub m0: f64,
    /// `m_c² + 8σ - M0²`, the eigenvalue the center-of-mass form should have.
    pub scalar_discrepancy: f64,
    /// Least-squares eigenvalue of the center-of-mass form on `Ψ`.
    pub kt_com_eigenvalue: f64,
    /// `sup |K_com Ψ - λ Ψ| / sup|Φ|`
    pub kt_com_spread: f64,
    pub kt_individual_eigenvalue: f64,
    pub kt_individual_spread: f64,
    /// `sup |2 K_ind Ψ - K_com Ψ - 4Ω² x⊥² Ψ| / sup|Φ|`, equal masses only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equal_mass_relation_residual: Option<f64>,
    /// Finite-difference `x1`/`x2` route against the analytic route.
    pub fd_route_deviation: f64,
    pub samples: u64,
}

/// Primed ladder operators applied to `Ψ` with its plane-wave factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiLadderEntry {
    pub label: String,
    /// Against `Ψ` of the target level, whose total momentum carries the
    /// target mass.
    pub lower_residual: f64,
    pub raise_residual: f64,
    /// Against the target `Φ` times the source plane wave `exp(iP·X)`.
    pub lower_residual_source_momentum: f64,
    pub raise_residual_source_momentum: f64,
    pub samples: u64,
}

fn finite(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

/// Least-squares `λ` with `K ≈ λ Ψ`, and `sup |K - λΨ|`.
fn fit_eigenvalue(values: &[(Complex64, Complex64)]) -> (Complex64, f64) {
    let num: Complex64 = values.iter().map(|(k, psi)| psi.conj() * k).sum();
    let den: f64 = values.iter().map(|(_, psi)| psi.norm_sqr()).sum();
    let lambda = if den > 0.0 { num / den } else { Complex64::new(0.0, 0.0) };
    let spread = values
        .iter()
        .map(|(k, psi)| (k - lambda * psi).norm())
        .fold(0.0, f64::max);
    (lambda, spread)
}

fn kt_entry(c: &Cell, label: String) -> Result<KtAuditEntry> {
    let st = &c.state;
    let analytic = DiffEngine::analytic();
    let psi = PairField::psi(st);
    let kt_com = apply_kt_com(&psi, st, &analytic)?;
    let ind = IndividualKt::for_state(st)?;
    let kt_ind = ind.apply(&psi, &analytic)?;
    let kt_ind_fd = ind.apply(&psi, &DiffEngine::default_fd())?;
    let omega2 = st.omega_big().powi(2);

    let pairs: Vec<(&FourVector, &FourVector)> = c.points.iter().zip(&c.com_points).collect();
    let psi_vals: Vec<Complex64> = pairs.iter().map(|(x, bx)| psi.eval(x, bx)).collect();
    let com_vals: Vec<Complex64> = pairs.iter().map(|(x, bx)| kt_com.eval(x, bx)).collect();
    let ind_vals: Vec<Complex64> = pairs.iter().map(|(x, bx)| kt_ind.eval(x, bx)).collect();

    let zip =
        |k: &[Complex64]| -> Vec<(Complex64, Complex64)> { k.iter().copied().zip(psi_vals.iter().copied()).collect() };
    let (l_com, s_com) = fit_eigenvalue(&zip(&com_vals));
    let (l_ind, s_ind) = fit_eigenvalue(&zip(&ind_vals));

    let relation = st.spec.equal_masses().then(|| {
        pairs
            .iter()
            .enumerate()
            .map(|(k, (x, _))| {
                let xp = perp_project(x, &st.momentum);
                let pot = 4.0 * omega2 * minkowski_dot(&xp, &xp);
                (2.0 * ind_vals[k] - com_vals[k] - pot * psi_vals[k]).norm()
            })
            .fold(0.0, f64::max)
            / c.amp
    });
    let fd_dev = pairs
        .iter()
        .enumerate()
        .map(|(k, (x, bx))| (kt_ind_fd.eval(x, bx) - ind_vals[k]).norm())
        .fold(0.0, f64::max)
        / (c.amp * (st.m0 * st.m0).max(1.0));

    Ok(KtAuditEntry {
        label,
        m1: st.spec.m1,
        m2: st.spec.m2,
        omega_big: st.omega_big(),
        sigma: st.sigma,
        m0: st.m0,
        scalar_discrepancy: st.spec.m_c().powi(2) + 8.0 * st.sigma - st.m0 * st.m0,
        kt_com_eigenvalue: finite(l_com.re),
        kt_com_spread: finite(s_com / c.amp),
        kt_individual_eigenvalue: finite(l_ind.re),
        kt_individual_spread: finite(s_ind / c.amp),
        equal_mass_relation_residual: relation.map(finite),
        fd_route_deviation: finite(fd_dev),
        samples: c.points.len() as u64,
    })
}

/// Reference unequal-mass system `m1 = 2, m2 = 1`, `σ = 1`, at rest.
pub fn reference_unequal_state() -> Result<OscillatorState> {
    let spec = OscillatorSpec::new(2.0, 1.0, 2.0 / 3.0)?;
    OscillatorState::new(spec, QuantumNumbers::GROUND, BoostVelocity::rest())
}

/// Compares the total constraint in individual and center-of-mass
/// coordinates on the grid states (up to `n = 2`) and on a fixed unequal-mass
/// reference system.
pub fn audit_kt_individual(grid: &GridSpec) -> Result<AuditRecord> {
    let n_max = grid.qn_max.min(AUDIT_N_MAX);
    let mut cells = build_cells(grid, n_max, FAMILY_AUDIT_KT, AUDIT_SAMPLES, 0)?;
    let reference = reference_unequal_state()?;
    let mut rng = stream_rng(grid.seed, FAMILY_AUDIT_KT, usize::MAX >> 40, 0);
    let points = sample_points(&reference.frame(), AUDIT_SAMPLES, 0, &mut rng);
    cells.push(Cell {
        label: "reference m1 = 2, m2 = 1, σ = 1".to_string(),
        field: ScalarField::eigenstate(&reference),
        amp: peak_amplitude(&reference),
        com_points: points.clone(),
        points,
        state: reference,
    });
    let entries = cells
        .par_iter()
        .map(|c| kt_entry(c, c.label.clone()))
        .collect::<Result<Vec<_>>>()?;

    let mut summary = BTreeMap::new();
    let reference = entries.last().expect("reference entry");
    summary.insert("reference_scalar_discrepancy".to_string(), reference.scalar_discrepancy);
    summary.insert("reference_kt_com_eigenvalue".to_string(), reference.kt_com_eigenvalue);
    let grid_entries = &entries[..entries.len() - 1];
    if grid.spec.equal_masses() {
        let rel = grid_entries
            .iter()
            .filter_map(|e| e.equal_mass_relation_residual)
            .fold(0.0, f64::max);
        summary.insert("max_equal_mass_relation_residual".to_string(), rel);
    }
    let max_disc = grid_entries
        .iter()
        .map(|e| e.scalar_discrepancy.abs())
        .fold(0.0, f64::max);
    summary.insert("max_abs_scalar_discrepancy".to_string(), max_disc);
    let max_spread = grid_entries.iter().map(|e| e.kt_individual_spread).fold(0.0, f64::max);
    summary.insert("max_kt_individual_spread".to_string(), max_spread);
    let fd_dev = entries.iter().map(|e| e.fd_route_deviation).fold(0.0, f64::max);
    summary.insert("max_fd_route_deviation".to_string(), fd_dev);

    let notes = "Non-gating. With equal masses the center-of-mass form equals 2 K_ind - 4Ω² x⊥², \
                 so the two forms are not proportional and Ψ is not an eigenfunction of the individual form. \
                 With unequal masses the center-of-mass form has eigenvalue m_c² + 8σ - M0² ≠ 0 on Ψ."
        .to_string();
    Ok(AuditRecord {
        audit_id: "audit.kt-individual".to_string(),
        equation_tag: super::catalog::lookup("audit.kt-individual")
            .map(|c| c.tag)
            .unwrap_or("")
            .to_string(),
        gating: false,
        notes,
        summary,
        kt_entries: entries,
        psi_entries: Vec::new(),
    })
}

/// Applies the primed ladder operators to `Ψ(·, X)` at fixed center-of-mass
/// points and compares with the target level in two ways.
pub fn audit_ladder_on_psi(grid: &GridSpec) -> Result<AuditRecord> {
    let n_max = grid.qn_max.min(AUDIT_N_MAX);
    let cells = build_cells(grid, n_max, FAMILY_AUDIT_PSI, AUDIT_SAMPLES, 0)?;
    let fd = DiffEngine::default_fd();
    let entries = cells
        .par_iter()
        .map(|c| -> Result<PsiLadderEntry> {
            let st = &c.state;
            let frame = Arc::new(st.frame());
            let mut res = [0.0f64; 2];
            let mut res_src = [0.0f64; 2];
            for (x, big_x) in c.points.iter().zip(&c.com_points) {
                let bx = *big_x;
                let owned = st.clone();
                let psi = ScalarField::from_fn(move |y| owned.psi(y, &bx)).with_frame(frame.clone());
                for i in 0..3 {
                    let l = st.qns.0[i] as f64;
                    for (k, dir) in [Direction::Lower, Direction::Raise].into_iter().enumerate() {
                        let lhs = apply_ladder_primed(&psi, LadderIndex::primed(dir, i + 1)?, st, &fd)?.eval(x);
                        let (coef, target) = match dir {
                            Direction::Lower => (l.sqrt(), st.qns.shifted(i, -1)),
                            Direction::Raise => ((l + 1.0).sqrt(), st.qns.shifted(i, 1)),
                        };
                        let zero = Complex64::new(0.0, 0.0);
                        let rhs = target.map_or(zero, |q| coef * st.with_qns(q).psi(x, big_x));
                        res[k] = res[k].max((lhs - rhs).norm() / c.amp);
                        let phase = Complex64::from_polar(1.0, minkowski_dot(&st.momentum.p, big_x));
                        let rhs_src = target.map_or(zero, |q| coef * st.with_qns(q).phi(x) * phase);
                        res_src[k] = res_src[k].max((lhs - rhs_src).norm() / c.amp);
                    }
                }
            }
            Ok(PsiLadderEntry {
                label: c.label.clone(),
                lower_residual: finite(res[0]),
                raise_residual: finite(res[1]),
                lower_residual_source_momentum: finite(res_src[0]),
                raise_residual_source_momentum: finite(res_src[1]),
                samples: c.points.len() as u64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = BTreeMap::new();
    summary.insert(
        "max_lower_residual".to_string(),
        entries.iter().map(|e| e.lower_residual).fold(0.0, f64::max),
    );
    summary.insert(
        "max_raise_residual".to_string(),
        entries.iter().map(|e| e.raise_residual).fold(0.0, f64::max),
    );
    summary.insert(
        "max_source_momentum_residual".to_string(),
        entries
            .iter()
            .map(|e| e.lower_residual_source_momentum.max(e.raise_residual_source_momentum))
            .fold(0.0, f64::max),
    );
    Ok(AuditRecord {
        audit_id: "audit.ladder-on-psi".to_string(),
        equation_tag: super::catalog::lookup("audit.ladder-on-psi")
            .map(|c| c.tag)
            .unwrap_or("")
            .to_string(),
        gating: false,
        notes: "Non-gating. Finite-difference engine on the full solution at fixed center-of-mass points. \
                The operators act on the relative coordinate only, so they keep the source plane wave exp(iP·X); \
                the target level has a different rest mass and hence a different P at the same velocity. \
                The relations hold against the target Φ with the source phase and fail against the target Ψ."
            .to_string(),
        summary,
        kt_entries: Vec::new(),
        psi_entries: entries,
    })
}
