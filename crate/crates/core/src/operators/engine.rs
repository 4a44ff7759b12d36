//! Differentiation engines: exact coefficient algebra or finite differences.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{PointFn, ScalarField};
use crate::error::{Error, Result};
use crate::kinematics::FourVector;

/// Steps below this lose all significant digits to cancellation.
pub const MIN_STEP: f64 = 1e-7;

pub const DEFAULT_FD_STEP: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineMode {
    Analytic,
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StencilOrder {
    #[serde(rename = "2")]
    Second,
    #[serde(rename = "4")]
    Fourth,
}

impl StencilOrder {
    pub fn from_order(order: u32) -> Option<Self> {
        match order {
            2 => Some(StencilOrder::Second),
            4 => Some(StencilOrder::Fourth),
            _ => None,
        }
    }
}

/// How derivatives are taken.
///
/// The finite-difference step is given in units of the field's own length
/// scale: along lab axis `a` the actual step is `step / |∂y/∂x_a|`, where
/// `y` are the scaled rest-frame coordinates of the state the field came from
/// (so `step / √Ω` in the rest frame). Fields with no rest frame use `step`
/// directly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffEngine {
    pub mode: EngineMode,
    pub step: f64,
    pub order: StencilOrder,
}

impl DiffEngine {
    pub fn analytic() -> Self {
        DiffEngine {
            mode: EngineMode::Analytic,
            step: DEFAULT_FD_STEP,
            order: StencilOrder::Fourth,
        }
    }

    pub fn finite_difference(step: f64, order: StencilOrder) -> Result<Self> {
        if !step.is_finite() || step < MIN_STEP {
            return Err(Error::StepUnderflow { step, scale: 1.0 });
        }
        Ok(DiffEngine {
            mode: EngineMode::FiniteDifference,
            step,
            order,
        })
    }

    pub fn default_fd() -> Self {
        DiffEngine::finite_difference(DEFAULT_FD_STEP, StencilOrder::Fourth).expect("default step is valid")
    }

    pub fn is_analytic(&self) -> bool {
        self.mode == EngineMode::Analytic
    }

    fn axis_step(&self, field: &ScalarField, a: usize) -> f64 {
        match field.frame() {
            Some(fr) => self.step / fr.axis_rate(a),
            None => self.step,
        }
    }

    /// `∂f/∂x_a` with respect to lab coordinate `x_a` (index down, `a = 0..4`,
    /// slot 3 is time).
    pub fn derivative(&self, field: &ScalarField, a: usize) -> Result<ScalarField> {
        match self.mode {
            EngineMode::Analytic => {
                let e = field.expansion().ok_or(Error::AnalyticUnavailable)?;
                Ok(ScalarField::from_expansion(e.derivative(a)))
            }
            EngineMode::FiniteDifference => {
                let h = self.axis_step(field, a);
                let f = field.point_fn();
                let order = self.order;
                let d: PointFn = Arc::new(move |x| first_difference(&*f, x, a, h, order));
                Ok(ScalarField::function_with_frame(d, field.frame().cloned()))
            }
        }
    }

    /// `∂²f/∂x_a²`
    pub fn second_derivative(&self, field: &ScalarField, a: usize) -> Result<ScalarField> {
        match self.mode {
            EngineMode::Analytic => {
                let e = field.expansion().ok_or(Error::AnalyticUnavailable)?;
                Ok(ScalarField::from_expansion(e.derivative(a).derivative(a)))
            }
            EngineMode::FiniteDifference => {
                let h = self.axis_step(field, a);
                let f = field.point_fn();
                let order = self.order;
                let d: PointFn = Arc::new(move |x| second_difference(&*f, x, a, h, order));
                Ok(ScalarField::function_with_frame(d, field.frame().cloned()))
            }
        }
    }

    /// `(Σ_a coeffs[a] x_a + constant) f`
    pub fn multiply_linear(&self, field: &ScalarField, coeffs: [f64; 4], constant: f64) -> Result<ScalarField> {
        match self.mode {
            EngineMode::Analytic => {
                let e = field.expansion().ok_or(Error::AnalyticUnavailable)?;
                Ok(ScalarField::from_expansion(e.multiply_linear(&coeffs, constant)))
            }
            EngineMode::FiniteDifference => {
                let f = field.point_fn();
                let m: PointFn = Arc::new(move |x| {
                    let lin: f64 = (0..4).map(|a| coeffs[a] * x[a]).sum::<f64>() + constant;
                    f(x) * lin
                });
                Ok(ScalarField::function_with_frame(m, field.frame().cloned()))
            }
        }
    }
}

fn shifted(x: &FourVector, a: usize, by: f64) -> FourVector {
    let mut y = *x;
    y.0[a] += by;
    y
}

/// Central first difference along coordinate `a` of a generic function.
pub fn first_difference<F>(f: &F, x: &FourVector, a: usize, h: f64, order: StencilOrder) -> Complex64
where
    F: Fn(&FourVector) -> Complex64 + ?Sized,
{
    match order {
        StencilOrder::Second => (f(&shifted(x, a, h)) - f(&shifted(x, a, -h))) / (2.0 * h),
        StencilOrder::Fourth => {
            let p1 = f(&shifted(x, a, h));
            let m1 = f(&shifted(x, a, -h));
            let p2 = f(&shifted(x, a, 2.0 * h));
            let m2 = f(&shifted(x, a, -2.0 * h));
            (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h)
        }
    }
}

/// Central second difference along coordinate `a`.
pub fn second_difference<F>(f: &F, x: &FourVector, a: usize, h: f64, order: StencilOrder) -> Complex64
where
    F: Fn(&FourVector) -> Complex64 + ?Sized,
{
    let c = f(x);
    match order {
        StencilOrder::Second => (f(&shifted(x, a, h)) - 2.0 * c + f(&shifted(x, a, -h))) / (h * h),
        StencilOrder::Fourth => {
            let p1 = f(&shifted(x, a, h));
            let m1 = f(&shifted(x, a, -h));
            let p2 = f(&shifted(x, a, 2.0 * h));
            let m2 = f(&shifted(x, a, -2.0 * h));
            (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * c) / (12.0 * h * h)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_steps() {
        assert!(DiffEngine::finite_difference(1e-9, StencilOrder::Fourth).is_err());
        assert!(DiffEngine::finite_difference(f64::NAN, StencilOrder::Second).is_err());
        assert!(DiffEngine::finite_difference(1e-3, StencilOrder::Second).is_ok());
    }

    #[test]
    fn stencils_on_polynomials() {
        // fourth-order stencils are exact on quartics up to rounding
        let f = |x: &FourVector| Complex64::new(x[0].powi(4) - 2.0 * x[0].powi(3) + x[1], 0.0);
        let x = FourVector::new(0.7, 0.2, 0.0, 0.0);
        let d = first_difference(&f, &x, 0, 1e-2, StencilOrder::Fourth).re;
        let exact = 4.0 * 0.7f64.powi(3) - 6.0 * 0.49;
        assert!((d - exact).abs() < 1e-10);
        let d2 = second_difference(&f, &x, 0, 1e-2, StencilOrder::Fourth).re;
        assert!((d2 - (12.0 * 0.49 - 12.0 * 0.7)).abs() < 1e-8);
        let d2 = second_difference(&f, &x, 1, 1e-2, StencilOrder::Second).re;
        assert!(d2.abs() < 1e-10);
    }

    #[test]
    fn analytic_needs_closed_form() {
        let f = ScalarField::constant(Complex64::new(1.0, 0.0));
        assert!(matches!(
            DiffEngine::analytic().derivative(&f, 0),
            Err(Error::AnalyticUnavailable)
        ));
        let d = DiffEngine::default_fd().derivative(&f, 2).unwrap();
        assert_eq!(d.eval(&FourVector::new(1.0, 2.0, 3.0, 4.0)), Complex64::new(0.0, 0.0));
    }
}
