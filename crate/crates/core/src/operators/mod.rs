//! Momentum, ladder and constraint operators acting on scalar fields.
//!
//! Every operator is assembled from three engine primitives (lab-axis
//! derivative, second derivative, multiplication by a linear form), so the
//! analytic and finite-difference engines run the same operator definitions.
//!
//! Index conventions: `p̂_μ = (1/i) ∂/∂x^μ`, and since `x^4 = -t` the fourth
//! component is `p̂_4 = i ∂/∂t`. Raising gives `p̂^μ = -i ∂/∂x_μ` for all `μ`.

pub mod engine;
pub mod expansion;
pub mod field;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kinematics::{minkowski_dot, perp_coefficients, FourVector, FrameMomentum, SplitWeights, METRIC};
use crate::oscillator::OscillatorState;
pub use engine::{DiffEngine, EngineMode, StencilOrder};
pub use expansion::HermiteExpansion;
pub use field::{PairField, ScalarField};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Raise,
    Lower,
}

impl Direction {
    /// The `∓` in front of the derivative term: `-` for raising.
    fn derivative_sign(self) -> f64 {
        match self {
            Direction::Raise => -1.0,
            Direction::Lower => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Raise => "raise",
            Direction::Lower => "lower",
        }
    }
}

/// Which ladder component to apply. `component` is 1-based: `1..=4` for the
/// covariant operator, `1..=3` for the primed one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LadderIndex {
    pub direction: Direction,
    component: usize,
    primed: bool,
}

impl LadderIndex {
    pub fn covariant(direction: Direction, mu: usize) -> Result<Self> {
        if !(1..=4).contains(&mu) {
            return domain(format!("covariant ladder component must be 1..=4, got {mu}"));
        }
        Ok(LadderIndex {
            direction,
            component: mu,
            primed: false,
        })
    }

    pub fn primed(direction: Direction, i: usize) -> Result<Self> {
        if !(1..=3).contains(&i) {
            return domain(format!("primed ladder component must be spatial 1..=3, got {i}"));
        }
        Ok(LadderIndex {
            direction,
            component: i,
            primed: true,
        })
    }

    pub fn component(&self) -> usize {
        self.component
    }

    pub fn is_primed(&self) -> bool {
        self.primed
    }
}

fn unit(a: usize) -> [f64; 4] {
    let mut e = [0.0; 4];
    e[a] = 1.0;
    e
}

/// `(2Ω)^{-1/2} [∓ Σ_a d_a ∂_a + Σ_a m_a x_a] f`
fn ladder_form(
    field: &ScalarField,
    direction: Direction,
    derivative_dir: [f64; 4],
    multiplier: [f64; 4],
    omega_big: f64,
    engine: &DiffEngine,
) -> Result<ScalarField> {
    let norm = 1.0 / (2.0 * omega_big).sqrt();
    let sign = direction.derivative_sign();
    let mut derivs = Vec::new();
    for (a, &d) in derivative_dir.iter().enumerate() {
        if d != 0.0 {
            derivs.push((re(norm * sign * d), engine.derivative(field, a)?));
        }
    }
    let mult = engine.multiply_linear(field, multiplier, 0.0)?;
    let mut parts: Vec<(Complex64, &ScalarField)> = derivs.iter().map(|(c, f)| (*c, f)).collect();
    parts.push((re(norm), &mult));
    Ok(ScalarField::linear_combination(&parts))
}

fn check_mu(mu: usize) -> Result<usize> {
    if (1..=4).contains(&mu) {
        Ok(mu - 1)
    } else {
        domain(format!("four-vector component must be 1..=4, got {mu}"))
    }
}

/// `p̂_μ f = (1/i) ∂f/∂x^μ` for `mu = 1..=4` (index down).
pub fn apply_p(field: &ScalarField, mu: usize, engine: &DiffEngine) -> Result<ScalarField> {
    let a = check_mu(mu)?;
    let d = engine.derivative(field, a)?;
    Ok(d.scaled(-I * METRIC[a]))
}

/// Covariant ladder operator, upper index:
/// `â^{μ±} = (2Ω)^{-1/2} (∓ i p̂^μ + Ω x⊥^μ)`.
pub fn apply_ladder_cov(
    field: &ScalarField,
    idx: LadderIndex,
    state: &OscillatorState,
    engine: &DiffEngine,
) -> Result<ScalarField> {
    if idx.primed {
        return domain("apply_ladder_cov needs a covariant index");
    }
    let mu = idx.component - 1;
    let omega = state.omega_big();
    let perp = perp_coefficients(&state.momentum);
    // ∓ i p̂^μ = ∓ ∂/∂x_μ
    ladder_form(
        field,
        idx.direction,
        unit(mu),
        perp[mu].map(|c| omega * c),
        omega,
        engine,
    )
}

/// The covariant form with the bare coordinate `x^μ` in place of `x⊥^μ`.
/// Not a ladder operator; kept as a negative control.
pub fn apply_ladder_cov_unprojected(
    field: &ScalarField,
    idx: LadderIndex,
    state: &OscillatorState,
    engine: &DiffEngine,
) -> Result<ScalarField> {
    let mu = idx.component - 1;
    let omega = state.omega_big();
    let mult = unit(mu).map(|c| omega * METRIC[mu] * c);
    ladder_form(field, idx.direction, unit(mu), mult, omega, engine)
}

/// Rest-frame mode operators of a moving oscillator:
///
/// ```text
/// â_i^{±'} = (2Ω)^{-1/2} [ ∓(∂_i + P_i/(E+M0) ∂_t) + Ω x_i + Ω (P_i/M0)(P_j x_j/(M0+E) - t) ]
/// ```
pub fn apply_ladder_primed(
    field: &ScalarField,
    idx: LadderIndex,
    state: &OscillatorState,
    engine: &DiffEngine,
) -> Result<ScalarField> {
    if !idx.primed {
        return domain("apply_ladder_primed needs a primed index");
    }
    let i = idx.component - 1;
    let omega = state.omega_big();
    let [p1, p2, p3, e] = state.momentum.p.lower();
    let pv = [p1, p2, p3];
    let m0 = state.momentum.m0;
    let mut deriv = unit(i);
    deriv[3] = pv[i] / (e + m0);
    let mut mult = [0.0; 4];
    for a in 0..3 {
        let delta = if a == i { 1.0 } else { 0.0 };
        mult[a] = omega * (delta + pv[i] * pv[a] / (m0 * (m0 + e)));
    }
    mult[3] = -omega * pv[i] / m0;
    ladder_form(field, idx.direction, deriv, mult, omega, engine)
}

/// Non-relativistic ladder operator `â_i^± = (2Ω)^{-1/2} (∓ i p̂_i + Ω x_i)`,
/// `i = 1..=3`.
pub fn apply_ladder_nr(
    field: &ScalarField,
    direction: Direction,
    i: usize,
    omega_big: f64,
    engine: &DiffEngine,
) -> Result<ScalarField> {
    if !(1..=3).contains(&i) {
        return domain(format!("non-relativistic ladder component must be 1..=3, got {i}"));
    }
    let a = i - 1;
    ladder_form(
        field,
        direction,
        unit(a),
        unit(a).map(|c| omega_big * c),
        omega_big,
        engine,
    )
}

/// `â⁺_μ â^{μ-} = Σ_μ g_μμ â^{μ+} â^{μ-}`
pub fn apply_number_operator(field: &ScalarField, state: &OscillatorState, engine: &DiffEngine) -> Result<ScalarField> {
    let mut terms = Vec::with_capacity(4);
    for mu in 1..=4 {
        let lowered = apply_ladder_cov(field, LadderIndex::covariant(Direction::Lower, mu)?, state, engine)?;
        let raised = apply_ladder_cov(&lowered, LadderIndex::covariant(Direction::Raise, mu)?, state, engine)?;
        terms.push((re(METRIC[mu - 1]), raised));
    }
    let parts: Vec<(Complex64, &ScalarField)> = terms.iter().map(|(c, f)| (*c, f)).collect();
    Ok(ScalarField::linear_combination(&parts))
}

/// `Σ_i â_i^{+'} â_i^{-'}`
pub fn apply_number_operator_primed(
    field: &ScalarField,
    state: &OscillatorState,
    engine: &DiffEngine,
) -> Result<ScalarField> {
    let mut terms = Vec::with_capacity(3);
    for i in 1..=3 {
        let lowered = apply_ladder_primed(field, LadderIndex::primed(Direction::Lower, i)?, state, engine)?;
        terms.push(apply_ladder_primed(
            &lowered,
            LadderIndex::primed(Direction::Raise, i)?,
            state,
            engine,
        )?);
    }
    let parts: Vec<(Complex64, &ScalarField)> = terms.iter().map(|f| (ONE, f)).collect();
    Ok(ScalarField::linear_combination(&parts))
}

/// `Σ_i â_i^+ â_i^-` with the non-relativistic operators.
pub fn apply_number_operator_nr(field: &ScalarField, omega_big: f64, engine: &DiffEngine) -> Result<ScalarField> {
    let mut terms = Vec::with_capacity(3);
    for i in 1..=3 {
        let lowered = apply_ladder_nr(field, Direction::Lower, i, omega_big, engine)?;
        terms.push(apply_ladder_nr(&lowered, Direction::Raise, i, omega_big, engine)?);
    }
    let parts: Vec<(Complex64, &ScalarField)> = terms.iter().map(|f| (ONE, f)).collect();
    Ok(ScalarField::linear_combination(&parts))
}

/// `K_μ p̂^μ f = -i Σ_a K_a ∂f/∂x_a` for a c-number four-vector `K`.
fn contract_momentum(field: &ScalarField, k: &FourVector, engine: &DiffEngine) -> Result<ScalarField> {
    let mut derivs = Vec::new();
    for a in 0..4 {
        if k[a] != 0.0 {
            derivs.push((-I * k[a], engine.derivative(field, a)?));
        }
    }
    if derivs.is_empty() {
        return Ok(field.scaled(re(0.0)));
    }
    let parts: Vec<(Complex64, &ScalarField)> = derivs.iter().map(|(c, f)| (*c, f)).collect();
    Ok(ScalarField::linear_combination(&parts))
}

/// Second constraint `K_S = P_μ p̂^μ`.
pub fn apply_ks(field: &ScalarField, state: &OscillatorState, engine: &DiffEngine) -> Result<ScalarField> {
    contract_momentum(field, &state.momentum.p, engine)
}

/// `p̂_μ p̂^μ = -∇² + ∂_t²`
pub fn apply_p_squared(field: &ScalarField, engine: &DiffEngine) -> Result<ScalarField> {
    let mut terms = Vec::with_capacity(4);
    for a in 0..4 {
        terms.push((re(-METRIC[a]), engine.second_derivative(field, a)?));
    }
    let parts: Vec<(Complex64, &ScalarField)> = terms.iter().map(|(c, f)| (*c, f)).collect();
    Ok(ScalarField::linear_combination(&parts))
}

/// Multiplication by `x⊥_μ x⊥^μ`.
pub fn apply_perp_squared(field: &ScalarField, momentum: &FrameMomentum, engine: &DiffEngine) -> Result<ScalarField> {
    let perp = perp_coefficients(momentum);
    let mut terms = Vec::with_capacity(4);
    for mu in 0..4 {
        let once = engine.multiply_linear(field, perp[mu], 0.0)?;
        terms.push((re(METRIC[mu]), engine.multiply_linear(&once, perp[mu], 0.0)?));
    }
    let parts: Vec<(Complex64, &ScalarField)> = terms.iter().map(|(c, f)| (*c, f)).collect();
    Ok(ScalarField::linear_combination(&parts))
}

/// Internal oscillator operator `p̂² + Ω² x⊥²`; eigenvalue `2σ` on `Φ`.
pub fn apply_internal_ho(field: &ScalarField, state: &OscillatorState, engine: &DiffEngine) -> Result<ScalarField> {
    let kinetic = apply_p_squared(field, engine)?;
    let potential = apply_perp_squared(field, &state.momentum, engine)?;
    let w2 = state.omega_big().powi(2);
    Ok(ScalarField::linear_combination(&[
        (ONE, &kinetic),
        (re(w2), &potential),
    ]))
}

/// `P^μ â_μ^± = P_μ â^{μ±}`
pub fn apply_p_dot_ladder(
    field: &ScalarField,
    direction: Direction,
    state: &OscillatorState,
    engine: &DiffEngine,
) -> Result<ScalarField> {
    p_dot_ladder_with(field, direction, state, engine, apply_ladder_cov)
}

/// [`apply_p_dot_ladder`] built from [`apply_ladder_cov_unprojected`].
pub fn apply_p_dot_ladder_unprojected(
    field: &ScalarField,
    direction: Direction,
    state: &OscillatorState,
    engine: &DiffEngine,
) -> Result<ScalarField> {
    p_dot_ladder_with(field, direction, state, engine, apply_ladder_cov_unprojected)
}

type LadderFn = fn(&ScalarField, LadderIndex, &OscillatorState, &DiffEngine) -> Result<ScalarField>;

fn p_dot_ladder_with(
    field: &ScalarField,
    direction: Direction,
    state: &OscillatorState,
    engine: &DiffEngine,
    ladder: LadderFn,
) -> Result<ScalarField> {
    let p = state.momentum.p.lower();
    let mut terms = Vec::new();
    for mu in 1..=4 {
        if p[mu - 1] != 0.0 {
            let a = ladder(field, LadderIndex::covariant(direction, mu)?, state, engine)?;
            terms.push((re(p[mu - 1]), a));
        }
    }
    let parts: Vec<(Complex64, &ScalarField)> = terms.iter().map(|(c, f)| (*c, f)).collect();
    Ok(ScalarField::linear_combination(&parts))
}

/// Total constraint in center-of-mass form,
/// `K_T = P̂² + m_c² + 4 (p̂² + Ω² x⊥²)`.
///
/// On a separable field `f(x) exp(iK·X)` the total momentum acts on the plane
/// wave exactly and the engine differentiates `f`. Opaque pair fields are
/// differentiated in both coordinates (finite differences only).
pub fn apply_kt_com(field: &PairField, state: &OscillatorState, engine: &DiffEngine) -> Result<PairField> {
    let mc2 = state.spec.m_c().powi(2);
    match field {
        PairField::Separable { internal, momentum } => {
            let ho = apply_internal_ho(internal, state, engine)?;
            let k2 = minkowski_dot(momentum, momentum);
            let out = ScalarField::linear_combination(&[(re(k2 + mc2), internal), (re(4.0), &ho)]);
            Ok(PairField::Separable {
                internal: out,
                momentum: *momentum,
            })
        }
        PairField::Function { f, wavenumber } => {
            if engine.is_analytic() {
                return Err(Error::AnalyticUnavailable);
            }
            let h = engine.step / wavenumber;
            let order = engine.order;
            let f = f.clone();
            let omega2 = state.omega_big().powi(2);
            let mom = state.momentum;
            let out = move |x: &FourVector, big_x: &FourVector| {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..4 {
                    let along_big = |y: &FourVector| f(x, y);
                    let along_rel = |y: &FourVector| f(y, big_x);
                    let d_big = engine::second_difference(&along_big, big_x, a, h, order);
                    let d_rel = engine::second_difference(&along_rel, x, a, h, order);
                    acc -= METRIC[a] * (d_big + 4.0 * d_rel);
                }
                let xp = crate::kinematics::perp_project(x, &mom);
                acc + (mc2 + 4.0 * omega2 * minkowski_dot(&xp, &xp)) * f(x, big_x)
            };
            Ok(PairField::Function {
                f: Arc::new(out),
                wavenumber: *wavenumber,
            })
        }
    }
}

/// The total constraint written on the individual particle coordinates,
/// `p̂1² + p̂2² + m1² + m2² + 4Ω² x⊥²`.
///
/// The finite-difference route differentiates with respect to `x1` and `x2`
/// after composing the field with the inverse center-of-mass split. The
/// analytic route rewrites `p̂1 = (ε1/M0) P̂ + p̂`, `p̂2 = (ε2/M0) P̂ - p̂`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndividualKt {
    pub m1: f64,
    pub m2: f64,
    pub omega_big: f64,
    pub weights: SplitWeights,
    /// Total momentum defining `x⊥`.
    pub momentum: FrameMomentum,
}

impl IndividualKt {
    pub fn for_state(state: &OscillatorState) -> Result<Self> {
        Ok(IndividualKt {
            m1: state.spec.m1,
            m2: state.spec.m2,
            omega_big: state.omega_big(),
            weights: SplitWeights::new(state.spec.m1, state.spec.m2, state.m0)?,
            momentum: state.momentum,
        })
    }

    /// `p̂1² + p̂2²`
    pub fn kinetic(&self, field: &PairField, engine: &DiffEngine) -> Result<PairField> {
        match (engine.mode, field) {
            (EngineMode::Analytic, PairField::Separable { internal, momentum }) => {
                let w = &self.weights;
                let a = (w.eps1 * w.eps1 + w.eps2 * w.eps2) / (w.m0 * w.m0);
                let b = 2.0 * (w.eps1 - w.eps2) / w.m0;
                let k2 = minkowski_dot(momentum, momentum);
                let mixed = contract_momentum(internal, momentum, engine)?;
                let p2 = apply_p_squared(internal, engine)?;
                let out = ScalarField::linear_combination(&[(re(a * k2), internal), (re(b), &mixed), (re(2.0), &p2)]);
                Ok(PairField::Separable {
                    internal: out,
                    momentum: *momentum,
                })
            }
            (EngineMode::Analytic, PairField::Function { .. }) => Err(Error::AnalyticUnavailable),
            (EngineMode::FiniteDifference, _) => Ok(self.kinetic_fd(field, engine)),
        }
    }

    fn kinetic_fd(&self, field: &PairField, engine: &DiffEngine) -> PairField {
        let w = self.weights;
        let c1 = w.eps1 / w.m0;
        let c2 = w.eps2 / w.m0;
        let (rates, kvec) = match field {
            PairField::Separable { internal, momentum } => {
                let r: [f64; 4] = match internal.frame() {
                    Some(fr) => std::array::from_fn(|a| fr.axis_rate(a)),
                    None => [1.0; 4],
                };
                (r, momentum.lower())
            }
            PairField::Function { wavenumber, .. } => ([*wavenumber; 4], [0.0; 4]),
        };
        let steps: [f64; 4] = std::array::from_fn(|a| {
            let k = kvec[a].abs() * c1.max(c2);
            engine.step / (rates[a] + k).max(f64::MIN_POSITIVE)
        });
        let f = field.pair_fn();
        let order = engine.order;
        let wavenumber = rates.iter().cloned().fold(0.0, f64::max);
        let out = move |x: &FourVector, big_x: &FourVector| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..4 {
                let h = steps[a];
                // x1 -> x1 + s e_a moves (x, X) by (s, c1 s); x2 -> x2 + s e_a by (-s, c2 s)
                let along1 = |s: &FourVector| {
                    let d = s[0];
                    let mut y = *x;
                    let mut big_y = *big_x;
                    y.0[a] += d;
                    big_y.0[a] += c1 * d;
                    f(&y, &big_y)
                };
                let along2 = |s: &FourVector| {
                    let d = s[0];
                    let mut y = *x;
                    let mut big_y = *big_x;
                    y.0[a] -= d;
                    big_y.0[a] += c2 * d;
                    f(&y, &big_y)
                };
                let d1 = engine::second_difference(&along1, &FourVector::ZERO, 0, h, order);
                let d2 = engine::second_difference(&along2, &FourVector::ZERO, 0, h, order);
                acc -= METRIC[a] * (d1 + d2);
            }
            acc
        };
        PairField::Function {
            f: Arc::new(out),
            wavenumber,
        }
    }

    /// The full operator.
    pub fn apply(&self, field: &PairField, engine: &DiffEngine) -> Result<PairField> {
        let kinetic = self.kinetic(field, engine)?;
        let masses = self.m1 * self.m1 + self.m2 * self.m2;
        let pot = 4.0 * self.omega_big * self.omega_big;
        match (&kinetic, field) {
            (
                PairField::Separable {
                    internal: kin,
                    momentum,
                },
                PairField::Separable { internal, .. },
            ) => {
                let x2 = apply_perp_squared(internal, &self.momentum, engine)?;
                let out = ScalarField::linear_combination(&[(ONE, kin), (re(masses), internal), (re(pot), &x2)]);
                Ok(PairField::Separable {
                    internal: out,
                    momentum: *momentum,
                })
            }
            (PairField::Function { f: kin, wavenumber }, _) => {
                let kin = kin.clone();
                let orig = field.pair_fn();
                let mom = self.momentum;
                let out = move |x: &FourVector, big_x: &FourVector| {
                    let xp = crate::kinematics::perp_project(x, &mom);
                    kin(x, big_x) + (masses + pot * minkowski_dot(&xp, &xp)) * orig(x, big_x)
                };
                Ok(PairField::Function {
                    f: Arc::new(out),
                    wavenumber: *wavenumber,
                })
            }
            _ => unreachable!("kinetic keeps separable inputs separable only in analytic mode"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::BoostVelocity;
    use crate::oscillator::{OscillatorSpec, QuantumNumbers};

    fn state(q: [u32; 3], v: [f64; 3]) -> OscillatorState {
        let spec = OscillatorSpec::new(1.0, 1.0, 1.0).unwrap();
        OscillatorState::new(spec, QuantumNumbers(q), BoostVelocity::from_array(v).unwrap()).unwrap()
    }

    fn max_dev(a: &ScalarField, b: &ScalarField, pts: &[FourVector]) -> f64 {
        pts.iter().map(|x| (a.eval(x) - b.eval(x)).norm()).fold(0.0, f64::max)
    }

    fn points() -> Vec<FourVector> {
        vec![
            FourVector::new(0.3, -0.2, 0.5, 0.1),
            FourVector::new(-0.7, 0.4, 0.1, -0.6),
            FourVector::new(1.1, 0.9, -0.8, 0.4),
            FourVector::new(0.0, 0.0, 0.0, 0.0),
        ]
    }

    #[test]
    fn index_validation() {
        assert!(LadderIndex::covariant(Direction::Raise, 0).is_err());
        assert!(LadderIndex::covariant(Direction::Raise, 5).is_err());
        assert!(LadderIndex::primed(Direction::Lower, 4).is_err());
        assert!(apply_p(&ScalarField::constant(ONE), 0, &DiffEngine::default_fd()).is_err());
    }

    #[test]
    fn momentum_of_plane_wave_and_constant() {
        let k = FourVector::new(0.4, -1.3, 0.2, 0.9);
        let wave = ScalarField::plane_wave(k);
        let fd = DiffEngine::default_fd();
        for mu in 1..=4 {
            let p = apply_p(&wave, mu, &fd).unwrap();
            for x in points() {
                assert!((p.eval(&x) - k[mu - 1] * wave.eval(&x)).norm() < 1e-8, "mu={mu}");
            }
            let c = apply_p(&ScalarField::constant(re(3.0)), mu, &fd).unwrap();
            assert_eq!(c.eval(&FourVector::new(1.0, 2.0, 3.0, 4.0)), re(0.0));
        }
    }

    #[test]
    fn momentum_of_rest_ground_state() {
        let st = state([0, 0, 0], [0.0; 3]);
        let phi = ScalarField::eigenstate(&st);
        let a = 0.8;
        let x = FourVector::new(a, 0.0, 0.0, 0.0);
        let expect = -I * (-st.omega_big() * a) * phi.eval(&x);
        let an = apply_p(&phi, 1, &DiffEngine::analytic()).unwrap().eval(&x);
        let fd = apply_p(&phi, 1, &DiffEngine::default_fd()).unwrap().eval(&x);
        assert!((an - expect).norm() < 1e-14);
        assert!((fd - an).norm() <= 1e-6 * an.norm());
    }

    #[test]
    fn fourth_covariant_component_vanishes_only_at_rest() {
        for engine in [DiffEngine::analytic(), DiffEngine::default_fd()] {
            for dir in [Direction::Raise, Direction::Lower] {
                let idx = LadderIndex::covariant(dir, 4).unwrap();
                let rest = state([1, 2, 0], [0.0; 3]);
                let out = apply_ladder_cov(&ScalarField::eigenstate(&rest), idx, &rest, &engine).unwrap();
                for x in points() {
                    assert!(out.eval(&x).norm() < 1e-9);
                }
            }
        }
        // lowering annihilates the ground state in every frame; raising does not
        let moving = state([0, 0, 0], [0.6, 0.0, 0.0]);
        let idx = LadderIndex::covariant(Direction::Raise, 4).unwrap();
        let phi = ScalarField::eigenstate(&moving);
        let an = apply_ladder_cov(&phi, idx, &moving, &DiffEngine::analytic()).unwrap();
        let fd = apply_ladder_cov(&phi, idx, &moving, &DiffEngine::default_fd()).unwrap();
        let x = FourVector::new(0.5, 0.0, 0.0, 0.2);
        assert!(an.eval(&x).norm() > 1e-2);
        assert!((an.eval(&x) - fd.eval(&x)).norm() < 1e-7);
    }

    #[test]
    fn ground_state_annihilated_at_rest() {
        let st = state([0, 0, 0], [0.0; 3]);
        let phi = ScalarField::eigenstate(&st);
        for mu in 1..=3 {
            let idx = LadderIndex::covariant(Direction::Lower, mu).unwrap();
            let out = apply_ladder_cov(&phi, idx, &st, &DiffEngine::analytic()).unwrap();
            assert!(max_dev(&out, &phi.scaled(re(0.0)), &points()) < 1e-15);
        }
    }

    #[test]
    fn primed_matches_covariant_at_rest() {
        let st = state([1, 0, 2], [0.0; 3]);
        let phi = ScalarField::eigenstate(&st);
        let wave = ScalarField::plane_wave(FourVector::new(0.3, 0.1, -0.2, 0.5));
        for engine in [DiffEngine::default_fd()] {
            for f in [&phi, &wave] {
                for i in 1..=3 {
                    for dir in [Direction::Raise, Direction::Lower] {
                        let a = apply_ladder_primed(f, LadderIndex::primed(dir, i).unwrap(), &st, &engine).unwrap();
                        let b = apply_ladder_cov(f, LadderIndex::covariant(dir, i).unwrap(), &st, &engine).unwrap();
                        assert!(max_dev(&a, &b, &points()) < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn primed_raise_on_boosted_ground_state() {
        let st = state([0, 0, 0], [0.6, 0.0, 0.0]);
        let phi = ScalarField::eigenstate(&st);
        let target = ScalarField::eigenstate(&st.with_qns(QuantumNumbers::new(0, 1, 0)));
        let idx = LadderIndex::primed(Direction::Raise, 2).unwrap();
        let out = apply_ladder_primed(&phi, idx, &st, &DiffEngine::analytic()).unwrap();
        assert!(max_dev(&out, &target, &points()) < 1e-13);
        let lower = LadderIndex::primed(Direction::Lower, 1).unwrap();
        let zero = apply_ladder_primed(&phi, lower, &st, &DiffEngine::analytic()).unwrap();
        assert!(max_dev(&zero, &phi.scaled(re(0.0)), &points()) < 1e-13);
    }

    #[test]
    fn number_operator_eigenvalues() {
        let an = DiffEngine::analytic();
        for (q, v) in [([0, 0, 0], [0.3, 0.0, 0.4]), ([1, 1, 0], [0.6, 0.0, 0.0])] {
            let st = state(q, v);
            let phi = ScalarField::eigenstate(&st);
            let n = apply_number_operator(&phi, &st, &an).unwrap();
            assert!(max_dev(&n, &phi.scaled(re(st.n() as f64)), &points()) < 1e-12);
        }
        // linearity: N(Φ0 + Φ100) = Φ100 (same boost)
        let g = state([0, 0, 0], [0.6, 0.0, 0.0]);
        let e = g.with_qns(QuantumNumbers::new(1, 0, 0));
        let sum = ScalarField::eigenstate(&g).add(&ScalarField::eigenstate(&e));
        let n = apply_number_operator(&sum, &g, &an).unwrap();
        assert!(max_dev(&n, &ScalarField::eigenstate(&e), &points()) < 1e-12);
    }

    #[test]
    fn ks_vanishes_on_eigenstates_not_on_plane_waves() {
        let st = state([2, 1, 0], [0.0, 0.8, 0.0]);
        let phi = ScalarField::eigenstate(&st);
        let an = apply_ks(&phi, &st, &DiffEngine::analytic()).unwrap();
        let fd = apply_ks(&phi, &st, &DiffEngine::default_fd()).unwrap();
        for x in points() {
            assert!(an.eval(&x).norm() < 1e-13);
            assert!(fd.eval(&x).norm() < 1e-6);
        }
        let k = FourVector::new(1.0, 0.0, 0.0, 0.3);
        assert!(minkowski_dot(&st.momentum.p, &k).abs() > 0.1);
        let wave = ScalarField::plane_wave(k);
        let out = apply_ks(&wave, &st, &DiffEngine::default_fd()).unwrap();
        assert!(out.eval(&points()[0]).norm() > 0.1);
    }

    #[test]
    fn internal_ho_eigenvalue_and_negative_control() {
        let st = state([1, 0, 0], [0.6, 0.0, 0.0]);
        let phi = ScalarField::eigenstate(&st);
        let ho = apply_internal_ho(&phi, &st, &DiffEngine::analytic()).unwrap();
        assert!(max_dev(&ho, &phi.scaled(re(5.0)), &points()) < 1e-12);

        let rest = state([0, 0, 0], [0.0; 3]);
        let wide = ScalarField::from_fn(|x: &FourVector| re((-0.25 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp()));
        let out = apply_internal_ho(&wide, &rest, &DiffEngine::default_fd()).unwrap();
        let ratios: Vec<f64> = points()[..3].iter().map(|x| (out.eval(x) / wide.eval(x)).re).collect();
        assert!((ratios[0] - ratios[2]).abs() > 0.1);
    }

    #[test]
    fn p_dot_ladder_and_unprojected_control() {
        let st = state([1, 0, 0], [0.6, 0.0, 0.0]);
        let phi = ScalarField::eigenstate(&st);
        for dir in [Direction::Raise, Direction::Lower] {
            let out = apply_p_dot_ladder(&phi, dir, &st, &DiffEngine::analytic()).unwrap();
            assert!(max_dev(&out, &phi.scaled(re(0.0)), &points()) < 1e-12);
            let bad = apply_p_dot_ladder_unprojected(&phi, dir, &st, &DiffEngine::analytic()).unwrap();
            assert!(max_dev(&bad, &phi.scaled(re(0.0)), &points()) > 1e-3);
        }
    }

    #[test]
    fn kt_com_zero_for_equal_masses() {
        for (q, v) in [([0, 0, 0], [0.0; 3]), ([2, 0, 0], [0.0, 0.5, 0.5])] {
            let st = state(q, v);
            let psi = PairField::psi(&st);
            let out = apply_kt_com(&psi, &st, &DiffEngine::analytic()).unwrap();
            let big_x = FourVector::new(0.2, 0.3, -0.1, 0.7);
            for x in points() {
                assert!(out.eval(&x, &big_x).norm() < 1e-11 * st.m0.powi(2));
            }
        }
    }

    #[test]
    fn kt_com_unequal_mass_residual() {
        // σ = 1 from Ω = 2/3, n = 0
        let spec = OscillatorSpec::new(2.0, 1.0, 2.0 / 3.0).unwrap();
        let st = OscillatorState::new(spec, QuantumNumbers::GROUND, BoostVelocity::rest()).unwrap();
        let psi = PairField::psi(&st);
        let out = apply_kt_com(&psi, &st, &DiffEngine::analytic()).unwrap();
        let x = FourVector::new(0.3, 0.1, 0.0, 0.0);
        let big_x = FourVector::new(0.0, 0.0, 0.0, 0.4);
        let ratio = out.eval(&x, &big_x) / psi.eval(&x, &big_x);
        // 9 + 8 - (9 + sqrt(72)) from the mass formula
        assert!((ratio.re - (8.0 - 72f64.sqrt())).abs() < 1e-12);
    }
}
