//! The individual checks. Each sweeps a grid in parallel and reduces to one
//! `CheckResult` per relation, keeping the location of the worst residual.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::normalization;
use super::sampling::{peak_amplitude, sample_points, stream_rng, TAIL_PROBES};
use super::{engine_label, CheckResult, GridSpec, NonrelSettings};
use crate::error::Result;
use crate::kinematics::{boost_coordinates, minkowski_dot, FourVector};
use crate::operators::{
    apply_internal_ho, apply_ks, apply_kt_com, apply_ladder_primed, apply_number_operator, apply_number_operator_nr,
    apply_number_operator_primed, apply_p_dot_ladder, DiffEngine, Direction, LadderIndex, PairField, ScalarField,
};
use crate::oscillator::{nonrel_mass_approx, phi_rest, rest_mass, sigma_of_n, OscillatorSpec, OscillatorState};

const FAMILY_LADDER: u64 = 1;
const FAMILY_CONSTRAINT: u64 = 2;
const FAMILY_LO_PRIME: u64 = 3;
const FAMILY_LORENTZ: u64 = 4;
const FAMILY_AGREEMENT: u64 = 5;
const FAMILY_SHROD: u64 = 6;
pub(crate) const FAMILY_AUDIT_KT: u64 = 7;
pub(crate) const FAMILY_AUDIT_PSI: u64 = 8;

/// Half-width of the box the center-of-mass coordinate is drawn from.
pub(crate) const COM_RANGE: f64 = 2.0;

/// One state of the grid with its sample points.
pub(crate) struct Cell {
    pub label: String,
    pub state: OscillatorState,
    pub field: ScalarField,
    pub amp: f64,
    pub points: Vec<FourVector>,
    /// Center-of-mass coordinates paired with `points`.
    pub com_points: Vec<FourVector>,
}

pub(crate) fn state_label(st: &OscillatorState) -> String {
    let [v1, v2, v3] = st.boost.components();
    format!("{} at v = ({v1}, {v2}, {v3})", st.qns)
}

fn com_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<FourVector> {
    (0..count)
        .map(|_| FourVector(std::array::from_fn(|_| rng.gen_range(-COM_RANGE..COM_RANGE))))
        .collect()
}

pub(crate) fn build_cells(grid: &GridSpec, n_max: u32, family: u64, count: usize, tails: usize) -> Result<Vec<Cell>> {
    Ok(grid
        .states_up_to(n_max)?
        .into_iter()
        .map(|(b, s, state)| {
            let mut rng = stream_rng(grid.seed, family, b, s);
            let points = sample_points(&state.frame(), count, tails, &mut rng);
            let com = com_points(&mut rng, points.len());
            Cell {
                label: state_label(&state),
                field: ScalarField::eigenstate(&state),
                amp: peak_amplitude(&state),
                points,
                com_points: com,
                state,
            }
        })
        .collect())
}

/// Largest value seen and where.
#[derive(Clone, Debug, Default)]
pub(crate) struct Worst {
    pub value: f64,
    pub at: String,
    pub samples: u64,
}

impl Worst {
    pub fn record(&mut self, value: f64, at: &str, samples: usize) {
        self.samples += samples as u64;
        if self.value.is_nan() {
            return;
        }
        if self.at.is_empty() || !(value <= self.value) {
            self.value = value;
            self.at = at.to_string();
        }
    }

    pub fn note(&self) -> String {
        if self.at.is_empty() {
            String::new()
        } else {
            format!("worst at {}", self.at)
        }
    }

    pub fn into_result(self, id: &str, engine: &str, tol: f64) -> CheckResult {
        let note = self.note();
        CheckResult::new(id, engine, self.value, tol, self.samples, note)
    }
}

/// `sup_x |f(x)|`
pub(crate) fn sup(points: &[FourVector], f: impl Fn(&FourVector) -> Complex64) -> f64 {
    points.iter().map(|x| f(x).norm()).fold(
        0.0,
        |a: f64, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) },
    )
}

fn euclidean_norm(p: &FourVector) -> f64 {
    p.0.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn reduce<const K: usize>(per_cell: Vec<(String, usize, [f64; K])>) -> [Worst; K] {
    let mut worst: [Worst; K] = std::array::from_fn(|_| Worst::default());
    for (label, n, vals) in per_cell {
        for k in 0..K {
            worst[k].record(vals[k], &label, n);
        }
    }
    worst
}

/// Lowering and raising relations of the primed operators on every state of
/// the grid, one result per mode and direction.
pub fn check_ladder_relations(grid: &GridSpec, engine: &DiffEngine, tol: f64) -> Result<Vec<CheckResult>> {
    let cells = build_cells(grid, grid.qn_max, FAMILY_LADDER, grid.sample_count, TAIL_PROBES)?;
    let per_cell = cells
        .par_iter()
        .map(|c| -> Result<(String, usize, [f64; 6])> {
            let mut out = [0.0; 6];
            for i in 0..3 {
                let l = c.state.qns.0[i] as f64;
                for (k, dir) in [Direction::Lower, Direction::Raise].into_iter().enumerate() {
                    let lhs = apply_ladder_primed(&c.field, LadderIndex::primed(dir, i + 1)?, &c.state, engine)?;
                    let (coef, target) = match dir {
                        Direction::Lower => (l.sqrt(), c.state.qns.shifted(i, -1)),
                        Direction::Raise => ((l + 1.0).sqrt(), c.state.qns.shifted(i, 1)),
                    };
                    let target = target.map(|q| c.state.with_qns(q));
                    let r = sup(&c.points, |x| {
                        let rhs = target.as_ref().map_or(0.0, |t| coef * t.phi(x));
                        lhs.eval(x) - rhs
                    });
                    out[3 * k + i] = r / c.amp;
                }
            }
            Ok((c.label.clone(), c.points.len(), out))
        })
        .collect::<Result<Vec<_>>>()?;
    let label = engine_label(engine);
    let ids = [
        "ladder.lower.l1",
        "ladder.lower.l2",
        "ladder.lower.l3",
        "ladder.raise.r1",
        "ladder.raise.r2",
        "ladder.raise.r3",
    ];
    Ok(reduce(per_cell)
        .into_iter()
        .zip(ids)
        .map(|(w, id)| w.into_result(id, label, tol))
        .collect())
}

/// Number operator, `P·a±`, `K_S`, internal oscillator and (equal masses)
/// the center-of-mass total constraint.
pub fn check_constraint_suite(grid: &GridSpec, engine: &DiffEngine, tol: f64) -> Result<Vec<CheckResult>> {
    let cells = build_cells(grid, grid.qn_max, FAMILY_CONSTRAINT, grid.sample_count, TAIL_PROBES)?;
    let equal = grid.spec.equal_masses();
    let per_cell = cells
        .par_iter()
        .map(|c| -> Result<(String, usize, [f64; 6])> {
            let st = &c.state;
            let n = st.n() as f64;
            let p_norm = euclidean_norm(&st.momentum.p);
            let phi = |x: &FourVector| c.field.eval(x);

            let num = apply_number_operator(&c.field, st, engine)?;
            let r_num = sup(&c.points, |x| num.eval(x) - n * phi(x)) / (c.amp * n.max(1.0));

            let mut r_pdl = [0.0; 2];
            for (k, dir) in [Direction::Lower, Direction::Raise].into_iter().enumerate() {
                let f = apply_p_dot_ladder(&c.field, dir, st, engine)?;
                r_pdl[k] = sup(&c.points, |x| f.eval(x)) / (c.amp * p_norm);
            }

            let ks = apply_ks(&c.field, st, engine)?;
            let r_ks = sup(&c.points, |x| ks.eval(x)) / (c.amp * p_norm);

            let ho = apply_internal_ho(&c.field, st, engine)?;
            let two_sigma = 2.0 * st.sigma;
            let r_ho = sup(&c.points, |x| ho.eval(x) - two_sigma * phi(x)) / (c.amp * two_sigma.max(1.0));

            let r_kt = if equal {
                let kt = apply_kt_com(&PairField::psi(st), st, engine)?;
                let worst = c
                    .points
                    .iter()
                    .zip(&c.com_points)
                    .map(|(x, big_x)| kt.eval(x, big_x).norm())
                    .fold(0.0, f64::max);
                worst / (c.amp * (st.m0 * st.m0).max(1.0))
            } else {
                0.0
            };
            Ok((
                c.label.clone(),
                c.points.len(),
                [r_num, r_pdl[0], r_pdl[1], r_ks, r_ho, r_kt],
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let label = engine_label(engine);
    let [num, pdl_lo, pdl_hi, ks, ho, kt] = reduce(per_cell);
    let mut out = vec![
        num.into_result("constraint.number-op", label, tol),
        pdl_lo.into_result("constraint.p-dot-ladder.lower", label, tol),
        pdl_hi.into_result("constraint.p-dot-ladder.raise", label, tol),
        ks.into_result("constraint.ks", label, tol),
        ho.into_result("constraint.internal-ho", label, tol),
    ];
    if equal {
        out.push(kt.into_result("constraint.kt-com", label, tol));
    }
    Ok(out)
}

/// `P·P = -M0²` for the momentum of every grid state.
pub fn check_mass_shell(grid: &GridSpec, tol: f64) -> Result<CheckResult> {
    let mut worst = Worst::default();
    for (_, _, st) in grid.states()? {
        let p = st.momentum.p;
        let r = (minkowski_dot(&p, &p) + st.m0 * st.m0).abs() / (st.m0 * st.m0);
        worst.record(r, &state_label(&st), 1);
    }
    Ok(worst.into_result("constraint.kg", "analytic", tol))
}

/// The covariant and primed number operators agree on eigenstates.
pub fn check_lo_prime(grid: &GridSpec, engine: &DiffEngine, tol: f64) -> Result<CheckResult> {
    let cells = build_cells(grid, grid.qn_max, FAMILY_LO_PRIME, grid.sample_count, TAIL_PROBES)?;
    let per_cell = cells
        .par_iter()
        .map(|c| -> Result<(String, usize, [f64; 1])> {
            let cov = apply_number_operator(&c.field, &c.state, engine)?;
            let primed = apply_number_operator_primed(&c.field, &c.state, engine)?;
            let n = c.state.n() as f64;
            let r = sup(&c.points, |x| cov.eval(x) - primed.eval(x)) / (c.amp * n.max(1.0));
            Ok((c.label.clone(), c.points.len(), [r]))
        })
        .collect::<Result<Vec<_>>>()?;
    let [w] = reduce(per_cell);
    Ok(w.into_result("ladder.lo-prime", engine_label(engine), tol))
}

/// Non-relativistic number operator in the rest frame.
pub fn check_shrod4(grid: &GridSpec, engine: &DiffEngine, tol: f64) -> Result<CheckResult> {
    let rest = GridSpec {
        boosts: Vec::new(),
        ..grid.clone()
    };
    let cells = build_cells(&rest, grid.qn_max, FAMILY_SHROD, grid.sample_count, TAIL_PROBES)?;
    let omega = grid.spec.omega_big;
    let per_cell = cells
        .par_iter()
        .map(|c| -> Result<(String, usize, [f64; 1])> {
            let num = apply_number_operator_nr(&c.field, omega, engine)?;
            let n = c.state.n() as f64;
            let r = sup(&c.points, |x| num.eval(x) - n * c.field.eval(x)) / (c.amp * n.max(1.0));
            Ok((c.label.clone(), c.points.len(), [r]))
        })
        .collect::<Result<Vec<_>>>()?;
    let [w] = reduce(per_cell);
    Ok(w.into_result("nonrel.shrod4", engine_label(engine), tol))
}

type OpFn = fn(&ScalarField, &OscillatorState, &DiffEngine) -> Result<ScalarField>;

fn ladder_op<const DIR: u8, const I: usize>(
    f: &ScalarField,
    st: &OscillatorState,
    e: &DiffEngine,
) -> Result<ScalarField> {
    let dir = if DIR == 0 { Direction::Lower } else { Direction::Raise };
    apply_ladder_primed(f, LadderIndex::primed(dir, I)?, st, e)
}

fn pdl_lower(f: &ScalarField, st: &OscillatorState, e: &DiffEngine) -> Result<ScalarField> {
    apply_p_dot_ladder(f, Direction::Lower, st, e)
}

fn pdl_raise(f: &ScalarField, st: &OscillatorState, e: &DiffEngine) -> Result<ScalarField> {
    apply_p_dot_ladder(f, Direction::Raise, st, e)
}

/// Operators compared across engines, with the scale each residual is
/// divided by (beyond the state amplitude).
fn agreement_ops(st: &OscillatorState) -> Vec<(&'static str, OpFn, f64)> {
    let n = (st.n() as f64).max(1.0);
    let p = euclidean_norm(&st.momentum.p);
    let ho = (2.0 * st.sigma).max(1.0);
    vec![
        ("a1-'", ladder_op::<0, 1>, 1.0),
        ("a2-'", ladder_op::<0, 2>, 1.0),
        ("a3-'", ladder_op::<0, 3>, 1.0),
        ("a1+'", ladder_op::<1, 1>, 1.0),
        ("a2+'", ladder_op::<1, 2>, 1.0),
        ("a3+'", ladder_op::<1, 3>, 1.0),
        ("number", apply_number_operator, n),
        ("number'", apply_number_operator_primed, n),
        ("P.a-", pdl_lower, p),
        ("P.a+", pdl_raise, p),
        ("K_S", apply_ks, p),
        ("internal HO", apply_internal_ho, ho),
    ]
}

/// Analytic and finite-difference engines give the same operator values.
pub fn check_engine_agreement(grid: &GridSpec, fd: &DiffEngine, tol: f64) -> Result<CheckResult> {
    let analytic = DiffEngine::analytic();
    let cells = build_cells(grid, grid.qn_max, FAMILY_AGREEMENT, grid.sample_count, TAIL_PROBES)?;
    let per_cell = cells
        .par_iter()
        .map(|c| -> Result<(String, usize, [f64; 1])> {
            let mut worst = 0.0f64;
            let mut which = "";
            for (name, op, scale) in agreement_ops(&c.state) {
                let a = op(&c.field, &c.state, &analytic)?;
                let f = op(&c.field, &c.state, fd)?;
                let r = sup(&c.points, |x| a.eval(x) - f.eval(x)) / (c.amp * scale);
                if which.is_empty() || !(r <= worst) {
                    worst = r;
                    which = name;
                }
            }
            Ok((format!("{} ({which})", c.label), c.points.len(), [worst]))
        })
        .collect::<Result<Vec<_>>>()?;
    let [w] = reduce(per_cell);
    Ok(w.into_result("engine.agreement", "analytic-vs-fd", tol))
}

/// Hypersurface normalization of a single state; fails when doubling the
/// nodes moves the result by more than `tol`.
pub fn check_normalization_state(state: &OscillatorState, nodes: usize, tol: f64) -> CheckResult {
    let (i_n, i_2n) = normalization::with_doubling(state, nodes);
    let drift = (i_n - i_2n).abs();
    let mut notes = format!("integral {i_n} with {nodes} nodes per axis");
    if drift > tol {
        notes.push_str(&format!("; not converged: doubling the nodes moved it by {drift:e}"));
    }
    CheckResult::new(
        "norm.hypersurface",
        "quadrature",
        (i_n - 1.0).abs().max(drift),
        tol,
        1,
        notes,
    )
}

/// Normalization of every grid state and the node-doubling drift.
pub fn check_normalization(grid: &GridSpec, nodes: usize, tol: f64, stability_tol: f64) -> Result<Vec<CheckResult>> {
    let states = grid.states()?;
    let per_state: Vec<(String, usize, [f64; 2])> = states
        .par_iter()
        .map(|(_, _, st)| {
            let (i_n, i_2n) = normalization::with_doubling(st, nodes);
            let drift = (i_n - i_2n).abs();
            (
                state_label(st),
                1,
                [(i_n - 1.0).abs().max(if drift > tol { drift } else { 0.0 }), drift],
            )
        })
        .collect();
    let unconverged = per_state.iter().filter(|(_, _, v)| v[1] > tol).count();
    let [norm, drift] = reduce(per_state);
    let mut norm_result = norm.into_result("norm.hypersurface", "quadrature", tol);
    norm_result.notes = format!("{nodes} nodes per axis; {}", norm_result.notes);
    if unconverged > 0 {
        norm_result
            .notes
            .push_str(&format!("; {unconverged} states not converged under node doubling"));
    }
    let mut drift_result = drift.into_result("norm.node-doubling", "quadrature", stability_tol);
    drift_result.notes = format!("{nodes} vs {} nodes per axis; {}", 2 * nodes, drift_result.notes);
    Ok(vec![norm_result, drift_result])
}

/// Boosted evaluation against rest-frame evaluation at the boosted point.
pub fn check_lorentz_invariance(grid: &GridSpec, samples: usize, tol: f64) -> Result<CheckResult> {
    let cells = build_cells(grid, grid.qn_max, FAMILY_LORENTZ, samples, 0)?;
    let per_cell: Vec<(String, usize, [f64; 1])> = cells
        .par_iter()
        .map(|c| {
            let st = &c.state;
            let r = sup(&c.points, |x| {
                let rest = phi_rest(&boost_coordinates(x, &st.boost), &st.qns, st.omega_big());
                Complex64::new(st.phi(x) - rest, 0.0)
            });
            (c.label.clone(), c.points.len(), [r / c.amp])
        })
        .collect();
    let [w] = reduce(per_cell);
    Ok(w.into_result("lorentz.form-invariance", "direct", tol))
}

/// Mass anchors and the defining equation of every configured level.
pub fn check_mass_spectrum(grid: &GridSpec, tol: f64) -> Result<CheckResult> {
    let mut worst = Worst::default();
    worst.record((rest_mass(1.0, 1.0, 0.0)? - 2.0).abs(), "M0(1, 1, 0) = 2", 1);
    worst.record((rest_mass(2.0, 1.0, 0.0)? - 3.0).abs(), "M0(2, 1, 0) = 3", 1);
    for sigma in [0.5, 1.0, 10.0] {
        let m0 = rest_mass(1.0, 1.0, sigma)?;
        worst.record(
            (m0 * m0 - (4.0 + 8.0 * sigma)).abs(),
            &format!("M0(1, 1, {sigma})² = 4 + 8σ"),
            1,
        );
    }
    let spec = grid.spec;
    let (m1, m2) = (spec.m1, spec.m2);
    for n in 0..=grid.qn_max {
        let sigma = sigma_of_n(spec.omega_big, n);
        let m0 = rest_mass(m1, m2, sigma)?;
        let a = m1 * m1 + m2 * m2 + 4.0 * sigma;
        let d = m1 * m1 - m2 * m2;
        let lhs = (m0 * m0 - a).powi(2);
        let rhs = (a - d) * (a + d);
        worst.record((lhs - rhs).abs() / (a * a), &format!("configured level n = {n}"), 1);
        if spec.equal_masses() {
            let target = spec.m_c().powi(2) + 8.0 * sigma;
            worst.record(
                (m0 * m0 - target).abs() / target,
                &format!("configured level n = {n}, equal masses"),
                1,
            );
        }
    }
    Ok(worst.into_result("mass.totmass", "scalar", tol))
}

/// Fitted constant of the low-velocity mass expansion. The residual is the
/// largest `|M0 - (m_c + σ/m_r)| / (σ²/m³)` over the configured scales.
pub fn check_nonrel_limit(settings: &NonrelSettings, bound: f64) -> Result<CheckResult> {
    let mut worst = Worst::default();
    let mut per_scale = Vec::new();
    for &m in &settings.mass_scales {
        let spec = OscillatorSpec::new(m, m, settings.omega_big)?;
        let mut first = None;
        for n in 0..=settings.max_n {
            let sigma = sigma_of_n(settings.omega_big, n);
            let m0 = rest_mass(m, m, sigma)?;
            let dev = m0 - nonrel_mass_approx(&spec, sigma)?;
            let c = dev.abs() / (sigma * sigma / m.powi(3));
            worst.record(c, &format!("m = {m}, n = {n}"), 1);
            first.get_or_insert(dev);
        }
        per_scale.push((m, first.unwrap_or(0.0)));
    }
    let mut note = worst.note();
    if !per_scale.is_empty() {
        let devs: Vec<String> = per_scale.iter().map(|(m, d)| format!("m = {m}: {d:e}")).collect();
        note.push_str(&format!(
            "; ground-state deviations M0 - (m_c + σ/m_r): {}",
            devs.join(", ")
        ));
        for w in per_scale.windows(2) {
            note.push_str(&format!(
                "; ratio m = {} / m = {}: {:e}",
                w[1].0,
                w[0].0,
                w[1].1 / w[0].1
            ));
        }
    }
    let mut result = worst.into_result("nonrel.mass-limit", "scalar", bound);
    result.notes = note;
    Ok(result)
}
