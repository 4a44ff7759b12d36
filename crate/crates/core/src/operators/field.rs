//! Scalar fields that operators act on.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::expansion::HermiteExpansion;
use crate::kinematics::{minkowski_dot, FourVector};
use crate::oscillator::{OscillatorState, RestFrameMap};

pub type PointFn = Arc<dyn Fn(&FourVector) -> Complex64 + Send + Sync>;
pub type PairFn = Arc<dyn Fn(&FourVector, &FourVector) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    /// Evaluated directly through `phi_boosted`; the expansion is only used
    /// by the analytic engine.
    Eigenstate {
        state: Arc<OscillatorState>,
        expansion: Arc<HermiteExpansion>,
    },
    Expansion(Arc<HermiteExpansion>),
    Function(PointFn),
}

/// A complex-valued function of the relative coordinate.
///
/// Evaluation is pure. `frame` records the rest frame of the state the field
/// came from, which sets finite-difference step sizes.
#[derive(Clone)]
pub struct ScalarField {
    repr: Repr,
    frame: Option<Arc<RestFrameMap>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Eigenstate { state, .. } => format!("Eigenstate{}", state.qns),
            Repr::Expansion(e) => format!("Expansion({} terms)", e.len()),
            Repr::Function(_) => "Function".to_string(),
        };
        f.debug_struct("ScalarField")
            .field("repr", &kind)
            .field("has_frame", &self.frame.is_some())
            .finish()
    }
}

impl ScalarField {
    /// The boosted eigenfunction `Φ` of `state`.
    pub fn eigenstate(state: &OscillatorState) -> Self {
        let frame = Arc::new(state.frame());
        let expansion = Arc::new(HermiteExpansion::eigenstate(state, frame.clone()));
        ScalarField {
            repr: Repr::Eigenstate {
                state: Arc::new(state.clone()),
                expansion,
            },
            frame: Some(frame),
        }
    }

    pub fn from_expansion(e: HermiteExpansion) -> Self {
        let frame = e.frame().clone();
        ScalarField {
            repr: Repr::Expansion(Arc::new(e)),
            frame: Some(frame),
        }
    }

    /// An opaque field; only the finite-difference engine can act on it.
    pub fn from_fn(f: impl Fn(&FourVector) -> Complex64 + Send + Sync + 'static) -> Self {
        ScalarField {
            repr: Repr::Function(Arc::new(f)),
            frame: None,
        }
    }

    /// Attaches a rest frame used to scale finite-difference steps.
    pub fn with_frame(mut self, frame: Arc<RestFrameMap>) -> Self {
        self.frame = Some(frame);
        self
    }

    /// `exp(i k_μ x^μ)`
    pub fn plane_wave(k: FourVector) -> Self {
        ScalarField::from_fn(move |x| Complex64::from_polar(1.0, minkowski_dot(&k, x)))
    }

    pub fn constant(c: Complex64) -> Self {
        ScalarField::from_fn(move |_| c)
    }

    pub fn eval(&self, x: &FourVector) -> Complex64 {
        match &self.repr {
            Repr::Eigenstate { state, .. } => Complex64::new(state.phi(x), 0.0),
            Repr::Expansion(e) => e.eval(x),
            Repr::Function(f) => f(x),
        }
    }

    pub fn expansion(&self) -> Option<&HermiteExpansion> {
        match &self.repr {
            Repr::Eigenstate { expansion, .. } => Some(expansion),
            Repr::Expansion(e) => Some(e),
            Repr::Function(_) => None,
        }
    }

    pub fn state(&self) -> Option<&OscillatorState> {
        match &self.repr {
            Repr::Eigenstate { state, .. } => Some(state),
            _ => None,
        }
    }

    pub fn frame(&self) -> Option<&Arc<RestFrameMap>> {
        self.frame.as_ref()
    }

    pub fn is_analytic(&self) -> bool {
        self.expansion().is_some()
    }

    pub(crate) fn point_fn(&self) -> PointFn {
        let me = self.clone();
        Arc::new(move |x| me.eval(x))
    }

    /// `Σ_j s_j f_j`. Stays in closed form when every part has an expansion
    /// in a shared frame.
    pub fn linear_combination(parts: &[(Complex64, &ScalarField)]) -> ScalarField {
        let frame = parts.iter().find_map(|(_, f)| f.frame.clone());
        let expansions: Option<Vec<(Complex64, &HermiteExpansion)>> =
            parts.iter().map(|(s, f)| f.expansion().map(|e| (*s, e))).collect();
        if let Some(exps) = expansions {
            if let Some(e) = HermiteExpansion::linear_combination(&exps) {
                return ScalarField::from_expansion(e);
            }
        }
        let owned: Vec<(Complex64, PointFn)> = parts.iter().map(|(s, f)| (*s, f.point_fn())).collect();
        ScalarField {
            repr: Repr::Function(Arc::new(move |x| owned.iter().map(|(s, f)| s * f(x)).sum())),
            frame,
        }
    }

    pub(crate) fn function_with_frame(f: PointFn, frame: Option<Arc<RestFrameMap>>) -> Self {
        ScalarField {
            repr: Repr::Function(f),
            frame,
        }
    }

    pub fn scaled(&self, s: Complex64) -> ScalarField {
        ScalarField::linear_combination(&[(s, self)])
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        let one = Complex64::new(1.0, 0.0);
        ScalarField::linear_combination(&[(one, self), (one, other)])
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        let one = Complex64::new(1.0, 0.0);
        ScalarField::linear_combination(&[(one, self), (-one, other)])
    }
}

/// A function of the relative coordinate `x` and the center-of-mass
/// coordinate `X`.
#[derive(Clone)]
pub enum PairField {
    /// `f(x) exp(i K_μ X^μ)`
    Separable {
        internal: ScalarField,
        momentum: FourVector,
    },
    /// Opaque `(x, X) -> value`, with a characteristic inverse length used
    /// for finite-difference steps.
    Function { f: PairFn, wavenumber: f64 },
}

impl fmt::Debug for PairField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairField::Separable { internal, momentum } => f
                .debug_struct("Separable")
                .field("internal", internal)
                .field("momentum", momentum)
                .finish(),
            PairField::Function { wavenumber, .. } => {
                f.debug_struct("Function").field("wavenumber", wavenumber).finish()
            }
        }
    }
}

impl PairField {
    /// The full solution `Ψ = Φ(x) exp(i P·X)`.
    pub fn psi(state: &OscillatorState) -> Self {
        PairField::Separable {
            internal: ScalarField::eigenstate(state),
            momentum: state.momentum.p,
        }
    }

    pub fn eval(&self, x: &FourVector, big_x: &FourVector) -> Complex64 {
        match self {
            PairField::Separable { internal, momentum } => {
                internal.eval(x) * Complex64::from_polar(1.0, minkowski_dot(momentum, big_x))
            }
            PairField::Function { f, .. } => f(x, big_x),
        }
    }

    pub(crate) fn pair_fn(&self) -> PairFn {
        let me = self.clone();
        Arc::new(move |x, big_x| me.eval(x, big_x))
    }
}
