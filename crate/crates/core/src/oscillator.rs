//! Spectrum formulas and the exact boosted eigenfunctions of the oscillator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hermite::hermite_scaled_table;
use crate::kinematics::{minkowski_dot, momentum_from_boost, BoostVelocity, FourVector, FrameMomentum};

/// Physical parameters: constituent masses and the spring constant `Ω`
/// (units of energy²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    pub m1: f64,
    pub m2: f64,
    pub omega_big: f64,
}

impl OscillatorSpec {
    pub fn new(m1: f64, m2: f64, omega_big: f64) -> Result<Self> {
        if !(m1 >= 0.0 && m2 >= 0.0) || !m1.is_finite() || !m2.is_finite() {
            return domain(format!("masses must be finite and non-negative, got ({m1}, {m2})"));
        }
        if !(m1 + m2 > 0.0) {
            return domain("combined mass must be positive");
        }
        if !(omega_big > 0.0) || !omega_big.is_finite() {
            return domain(format!("spring constant must be positive, got {omega_big}"));
        }
        Ok(OscillatorSpec { m1, m2, omega_big })
    }

    /// Combined mass `m1 + m2`.
    pub fn m_c(&self) -> f64 {
        self.m1 + self.m2
    }

    /// Reduced mass `m1 m2 / m_c`.
    pub fn m_r(&self) -> f64 {
        self.m1 * self.m2 / self.m_c()
    }

    pub fn equal_masses(&self) -> bool {
        self.m1 == self.m2
    }
}

/// Mode occupation numbers `(l1, l2, l3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumNumbers(pub [u32; 3]);

impl QuantumNumbers {
    pub const GROUND: QuantumNumbers = QuantumNumbers([0, 0, 0]);

    pub fn new(l1: u32, l2: u32, l3: u32) -> Self {
        QuantumNumbers([l1, l2, l3])
    }

    pub fn n(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Shifts mode `i` (0-based) by `delta`; `None` if it would go negative.
    pub fn shifted(&self, i: usize, delta: i32) -> Option<Self> {
        let mut l = self.0;
        let v = l[i] as i64 + delta as i64;
        if v < 0 {
            return None;
        }
        l[i] = v as u32;
        Some(QuantumNumbers(l))
    }

    /// All triples with `n <= n_max`, ordered by `n` then lexicographically.
    pub fn enumerate(n_max: u32) -> Vec<QuantumNumbers> {
        let mut out = Vec::new();
        for n in 0..=n_max {
            for l1 in (0..=n).rev() {
                for l2 in (0..=n - l1).rev() {
                    out.push(QuantumNumbers([l1, l2, n - l1 - l2]));
                }
            }
        }
        out
    }
}

impl std::fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "({a},{b},{c})")
    }
}

/// `σ = Ω (n + 3/2)`.
pub fn sigma_of_n(omega_big: f64, n: u32) -> f64 {
    omega_big * (n as f64 + 1.5)
}

/// Rest mass from
/// `M0² = m1² + m2² + 4σ + sqrt((m1² + m2² + 4σ)² - (m1² - m2²)²)`.
pub fn rest_mass(m1: f64, m2: f64, sigma: f64) -> Result<f64> {
    if m1 < 0.0 || m2 < 0.0 || sigma < 0.0 || !(m1 + m2 > 0.0) {
        return domain(format!(
            "rest_mass needs m1, m2, sigma >= 0 and m1 + m2 > 0, got ({m1}, {m2}, {sigma})"
        ));
    }
    let a = m1 * m1 + m2 * m2 + 4.0 * sigma;
    let d = m1 * m1 - m2 * m2;
    // (a - d)(a + d) = (2 m2² + 4σ)(2 m1² + 4σ)
    let radicand = (a - d) * (a + d);
    if radicand < 0.0 {
        return domain(format!("negative radicand {radicand} in rest-mass formula"));
    }
    Ok((a + radicand.sqrt()).sqrt())
}

/// Low-velocity approximation `m_c + σ / m_r`.
pub fn nonrel_mass_approx(spec: &OscillatorSpec, sigma: f64) -> Result<f64> {
    let m_r = spec.m_r();
    if m_r == 0.0 {
        return domain("reduced mass is zero; the low-velocity expansion does not exist");
    }
    Ok(spec.m_c() + sigma / m_r)
}

/// Rest-frame arguments of the Hermite factors:
/// `ξ_i = √Ω [x_i + (P_i/M0)(P_j x_j/(M0 + E) - t)]`.
pub fn xi_arguments(x: &FourVector, p: &FrameMomentum, omega_big: f64) -> [f64; 3] {
    let s = omega_big.sqrt();
    let [p1, p2, p3, e] = p.p.lower();
    let m0 = p.m0;
    let [x1, x2, x3, t] = x.lower();
    let bracket = (p1 * x1 + p2 * x2 + p3 * x3) / (m0 + e) - t;
    [
        s * (x1 + p1 / m0 * bracket),
        s * (x2 + p2 / m0 * bracket),
        s * (x3 + p3 / m0 * bracket),
    ]
}

/// Linear change of variables `y = J x` from lab coordinates to scaled
/// rest-frame coordinates `y = (ξ1, ξ2, ξ3, √Ω t')`.
#[derive(Clone, Debug, PartialEq)]
pub struct RestFrameMap {
    pub sqrt_omega: f64,
    /// `jac[b][a] = ∂y_b / ∂x_a`
    pub jac: [[f64; 4]; 4],
    /// `inv[a][b] = ∂x_a / ∂y_b`
    pub inv: [[f64; 4]; 4],
}

impl RestFrameMap {
    pub fn new(p: &FrameMomentum, omega_big: f64) -> Self {
        let s = omega_big.sqrt();
        let [p1, p2, p3, e] = p.p.lower();
        let pv = [p1, p2, p3];
        let m0 = p.m0;
        let mut jac = [[0.0; 4]; 4];
        let mut inv = [[0.0; 4]; 4];
        for i in 0..3 {
            for a in 0..3 {
                let delta = if i == a { 1.0 } else { 0.0 };
                let boost = pv[i] * pv[a] / (m0 * (m0 + e));
                jac[i][a] = s * (delta + boost);
                inv[i][a] = (delta + boost) / s;
            }
            jac[i][3] = -s * pv[i] / m0;
            jac[3][i] = -s * pv[i] / m0;
            inv[i][3] = pv[i] / (m0 * s);
            inv[3][i] = pv[i] / (m0 * s);
        }
        jac[3][3] = s * e / m0;
        inv[3][3] = e / (m0 * s);
        RestFrameMap {
            sqrt_omega: s,
            jac,
            inv,
        }
    }

    pub fn to_rest(&self, x: &FourVector) -> [f64; 4] {
        std::array::from_fn(|b| (0..4).map(|a| self.jac[b][a] * x[a]).sum())
    }

    pub fn from_rest(&self, y: &[f64; 4]) -> FourVector {
        FourVector(std::array::from_fn(|a| (0..4).map(|b| self.inv[a][b] * y[b]).sum()))
    }

    /// Euclidean length of `∂y/∂x_a`: how fast the rest coordinates move
    /// along lab axis `a`.
    pub fn axis_rate(&self, a: usize) -> f64 {
        (0..4).map(|b| self.jac[b][a].powi(2)).sum::<f64>().sqrt()
    }
}

/// An eigenstate `(l1, l2, l3)` of the oscillator moving with a given boost.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillatorState {
    pub spec: OscillatorSpec,
    pub qns: QuantumNumbers,
    pub boost: BoostVelocity,
    pub sigma: f64,
    pub m0: f64,
    pub momentum: FrameMomentum,
}

impl OscillatorState {
    pub fn new(spec: OscillatorSpec, qns: QuantumNumbers, boost: BoostVelocity) -> Result<Self> {
        let sigma = sigma_of_n(spec.omega_big, qns.n());
        let m0 = rest_mass(spec.m1, spec.m2, sigma)?;
        let momentum = momentum_from_boost(m0, &boost)?;
        Ok(OscillatorState {
            spec,
            qns,
            boost,
            sigma,
            m0,
            momentum,
        })
    }

    /// Same spec and boost in a different level. `Φ` depends on the total
    /// momentum only through the velocity, so the rebuilt state's wavefunction
    /// is `Φ(x, P, l')` in the frame of `self`.
    pub fn with_qns(&self, qns: QuantumNumbers) -> Self {
        OscillatorState::new(self.spec, qns, self.boost).expect("spec and boost were already validated")
    }

    pub fn omega_big(&self) -> f64 {
        self.spec.omega_big
    }

    pub fn n(&self) -> u32 {
        self.qns.n()
    }

    pub fn frame(&self) -> RestFrameMap {
        RestFrameMap::new(&self.momentum, self.spec.omega_big)
    }

    /// `Φ` at a relative-coordinate point.
    pub fn phi(&self, x: &FourVector) -> f64 {
        phi_boosted(x, self)
    }

    /// `Ψ` at relative point `x` and center-of-mass point `X`.
    pub fn psi(&self, x: &FourVector, big_x: &FourVector) -> Complex64 {
        psi_full(x, big_x, self)
    }
}

fn hermite_gaussian_product(qns: &QuantumNumbers, xi: &[f64; 3], omega_big: f64) -> f64 {
    let mut prod = (omega_big / std::f64::consts::PI).powf(0.75);
    let mut r2 = 0.0;
    for i in 0..3 {
        let l = qns.0[i];
        prod *= hermite_scaled_table(l, xi[i])[l as usize];
        r2 += xi[i] * xi[i];
    }
    prod * (-0.5 * r2).exp()
}

/// Boosted oscillator function
/// `Φ = 2^{-n/2} (Ω/π)^{3/4} Π_i (l_i!)^{-1/2} H_{l_i}(ξ_i) exp(-ξ_i²/2)`.
pub fn phi_boosted(x: &FourVector, state: &OscillatorState) -> f64 {
    let xi = xi_arguments(x, &state.momentum, state.spec.omega_big);
    hermite_gaussian_product(&state.qns, &xi, state.spec.omega_big)
}

/// Rest-frame oscillator function; depends on the spatial components only.
pub fn phi_rest(x: &FourVector, qns: &QuantumNumbers, omega_big: f64) -> f64 {
    let s = omega_big.sqrt();
    let xi = [s * x[0], s * x[1], s * x[2]];
    hermite_gaussian_product(qns, &xi, omega_big)
}

/// `Ψ(x, X) = Φ(x) exp(i P_μ X^μ)`.
pub fn psi_full(x: &FourVector, big_x: &FourVector, state: &OscillatorState) -> Complex64 {
    let phase = minkowski_dot(&state.momentum.p, big_x);
    Complex64::from_polar(phi_boosted(x, state), phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::boost_coordinates;
    use std::f64::consts::PI;

    fn spec(m: f64, omega: f64) -> OscillatorSpec {
        OscillatorSpec::new(m, m, omega).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(OscillatorSpec::new(1.0, 1.0, -1.0).is_err());
        assert!(OscillatorSpec::new(0.0, 0.0, 1.0).is_err());
        assert!(OscillatorSpec::new(-1.0, 2.0, 1.0).is_err());
        let s = OscillatorSpec::new(2.0, 1.0, 1.0).unwrap();
        assert!(s.m_r() <= s.m_c() / 4.0);
        assert_eq!(spec(3.0, 1.0).m_r(), spec(3.0, 1.0).m_c() / 4.0);
    }

    #[test]
    fn enumerate_counts() {
        // number of triples with l1 + l2 + l3 <= n is C(n + 3, 3)
        assert_eq!(QuantumNumbers::enumerate(0).len(), 1);
        assert_eq!(QuantumNumbers::enumerate(2).len(), 10);
        assert_eq!(QuantumNumbers::enumerate(4).len(), 35);
        assert!(QuantumNumbers::enumerate(4).iter().all(|q| q.n() <= 4));
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_of_n(1.0, 0), 1.5);
        assert_eq!(sigma_of_n(2.0, 3), 9.0);
        assert_eq!(sigma_of_n(0.5, 0), 0.75);
    }

    #[test]
    fn rest_mass_examples() {
        assert_eq!(rest_mass(1.0, 1.0, 0.0).unwrap(), 2.0);
        assert_eq!(rest_mass(2.0, 1.0, 0.0).unwrap(), 3.0);
        assert!((rest_mass(1.0, 1.0, 0.5).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!(rest_mass(1.0, 1.0, -0.1).is_err());
        assert!(rest_mass(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn nonrel_examples() {
        assert_eq!(nonrel_mass_approx(&spec(1.0, 1.0), 0.0).unwrap(), 2.0);
        assert!((nonrel_mass_approx(&spec(1.0, 1.0), 0.01).unwrap() - 2.02).abs() < 1e-15);
        assert!((nonrel_mass_approx(&spec(10.0, 1.0), 0.5).unwrap() - 20.1).abs() < 1e-14);
        let massless = OscillatorSpec::new(0.0, 1.0, 1.0).unwrap();
        assert!(nonrel_mass_approx(&massless, 0.5).is_err());
    }

    #[test]
    fn xi_examples() {
        let rest = OscillatorState::new(spec(1.0, 4.0), QuantumNumbers::GROUND, BoostVelocity::rest()).unwrap();
        let xi = xi_arguments(&FourVector::new(1.0, 2.0, 3.0, 7.0), &rest.momentum, 4.0);
        assert_eq!(xi, [2.0, 4.0, 6.0]);
        assert_eq!(xi_arguments(&FourVector::ZERO, &rest.momentum, 4.0), [0.0; 3]);

        let v = BoostVelocity::new(0.6, 0.0, 0.0).unwrap();
        let p = momentum_from_boost(2.0, &v).unwrap();
        let xi = xi_arguments(&FourVector::new(1.0, 0.0, 0.0, 0.0), &p, 1.0);
        assert!((xi[0] - 1.25).abs() < 1e-15 && xi[1] == 0.0 && xi[2] == 0.0);
        let via_boost = boost_coordinates(&FourVector::new(1.0, 0.0, 0.0, 0.0), &v);
        assert!((via_boost[0] - xi[0]).abs() < 1e-15);
    }

    #[test]
    fn frame_map_is_consistent() {
        let s = spec(1.0, 2.0);
        let st = OscillatorState::new(s, QuantumNumbers::GROUND, BoostVelocity::new(0.5, -0.3, 0.6).unwrap()).unwrap();
        let f = st.frame();
        let x = FourVector::new(0.4, -1.2, 0.7, 0.9);
        let y = f.to_rest(&x);
        let xi = xi_arguments(&x, &st.momentum, 2.0);
        for i in 0..3 {
            assert!((y[i] - xi[i]).abs() < 1e-14);
        }
        let tprime = boost_coordinates(&x, &st.boost)[3];
        assert!((y[3] - 2f64.sqrt() * tprime).abs() < 1e-14);
        let back = f.from_rest(&y);
        assert!((back - x).max_abs() < 1e-14);
    }

    #[test]
    fn phi_examples() {
        let s = spec(1.0, 1.0);
        let g = OscillatorState::new(s, QuantumNumbers::GROUND, BoostVelocity::rest()).unwrap();
        assert!((g.phi(&FourVector::ZERO) - PI.powf(-0.75)).abs() < 1e-15);
        let e = g.with_qns(QuantumNumbers::new(1, 0, 0));
        assert_eq!(e.phi(&FourVector::ZERO), 0.0);

        let b = OscillatorState::new(s, QuantumNumbers::GROUND, BoostVelocity::new(0.6, 0.0, 0.0).unwrap()).unwrap();
        let x = FourVector::new(1.0, 0.0, 0.0, 0.0);
        // mpmath: (1/π)^{3/4} exp(-1.25²/2)
        assert!((b.phi(&x) - 0.194_019_343_837_488_98).abs() < 1e-15);
    }

    #[test]
    fn phi_parity() {
        let s = spec(1.0, 1.3);
        for q in QuantumNumbers::enumerate(3) {
            let st = OscillatorState::new(s, q, BoostVelocity::rest()).unwrap();
            let x = FourVector::new(0.3, -0.8, 1.1, 0.0);
            let flipped = FourVector::new(-0.3, -0.8, 1.1, 0.0);
            let sign = if q.0[0] % 2 == 0 { 1.0 } else { -1.0 };
            assert!((st.phi(&flipped) - sign * st.phi(&x)).abs() < 1e-14);
        }
    }

    #[test]
    fn psi_phase() {
        let s = spec(1.0, 1.0);
        let st = OscillatorState::new(s, QuantumNumbers::new(0, 1, 0), BoostVelocity::rest()).unwrap();
        let x = FourVector::new(0.1, 0.5, 0.0, 0.0);
        assert_eq!(st.psi(&x, &FourVector::ZERO), Complex64::new(st.phi(&x), 0.0));
        let tau = 0.7;
        let psi = st.psi(&x, &FourVector::new(0.0, 0.0, 0.0, tau));
        let expect = Complex64::from_polar(st.phi(&x), -st.m0 * tau);
        assert!((psi - expect).norm() < 1e-15);
    }
}
