//! Minkowski four-vectors, velocity boosts, and the center-of-mass split.
//!
//! Components are stored with the index down, `x_μ = (x1, x2, x3, x4)` with
//! `x4 = t`. Raising the index flips the sign of the fourth component only,
//! so the metric is `diag(+1, +1, +1, -1)` and every contraction goes through
//! [`minkowski_dot`]. Arrays are 0-based: slot 3 holds the time component.

use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Diagonal of the metric acting on lower-index slots.
pub const METRIC: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

/// Boost speeds at or above this are rejected.
pub const MAX_SPEED: f64 = 1.0 - 1e-12;

/// A four-vector stored with its index down.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        FourVector([x1, x2, x3, x4])
    }

    /// Builds a vector from its upper-index components `x^μ`.
    pub fn from_upper(upper: [f64; 4]) -> Self {
        FourVector([upper[0], upper[1], upper[2], -upper[3]])
    }

    pub fn lower(&self) -> [f64; 4] {
        self.0
    }

    /// Upper-index components `x^μ`.
    pub fn upper(&self) -> [f64; 4] {
        let c = self.0;
        [c[0], c[1], c[2], -c[3]]
    }

    /// Reinterprets the upper components as a new lower-index vector.
    pub fn raise_index(&self) -> Self {
        FourVector(self.upper())
    }

    /// Inverse of [`FourVector::raise_index`].
    pub fn lower_index(&self) -> Self {
        FourVector::from_upper(self.0)
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn time(&self) -> f64 {
        self.0[3]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector(self.0.map(|c| c * s))
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, v: FourVector) -> FourVector {
        v * self
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        self * -1.0
    }
}

/// `a_μ b^μ = a1 b1 + a2 b2 + a3 b3 - a4 b4`.
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2] - a.0[3] * b.0[3]
}

/// Velocity of a moving frame, `|v| < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoostVelocity {
    v: [f64; 3],
    gamma: f64,
}

impl BoostVelocity {
    pub fn new(v1: f64, v2: f64, v3: f64) -> Result<Self> {
        Self::from_array([v1, v2, v3])
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return domain(format!("boost velocity {v:?} is not finite"));
        }
        let v2: f64 = v.iter().map(|c| c * c).sum();
        if v2.sqrt() >= MAX_SPEED {
            return domain(format!("boost speed {} must be below {MAX_SPEED}", v2.sqrt()));
        }
        let gamma = if v2 == 0.0 { 1.0 } else { 1.0 / (1.0 - v2).sqrt() };
        Ok(BoostVelocity { v, gamma })
    }

    pub fn rest() -> Self {
        BoostVelocity {
            v: [0.0; 3],
            gamma: 1.0,
        }
    }

    pub fn components(&self) -> [f64; 3] {
        self.v
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn speed(&self) -> f64 {
        self.v.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_rest(&self) -> bool {
        self.v == [0.0; 3]
    }

    pub fn reversed(&self) -> Self {
        BoostVelocity {
            v: self.v.map(|c| -c),
            gamma: self.gamma,
        }
    }
}

impl<'de> Deserialize<'de> for BoostVelocity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 3]>::deserialize(d)?;
        BoostVelocity::from_array(v).map_err(serde::de::Error::custom)
    }
}

/// General Lorentz boost of spacetime coordinates:
///
/// ```text
/// x'_i = x_i + γ v_i (γ v_j x_j / (1 + γ) - t)
/// t'   = γ (t - v_j x_j)
/// ```
///
/// Coordinates measured in the frame where the oscillator moves with `v` map
/// to its rest frame.
pub fn boost_coordinates(x: &FourVector, v: &BoostVelocity) -> FourVector {
    let g = v.gamma;
    let [v1, v2, v3] = v.v;
    let [x1, x2, x3, t] = x.0;
    let vx = v1 * x1 + v2 * x2 + v3 * x3;
    let bracket = g * vx / (1.0 + g) - t;
    FourVector([
        x1 + g * v1 * bracket,
        x2 + g * v2 * bracket,
        x3 + g * v3 * bracket,
        g * (t - vx),
    ])
}

/// Matrix form of [`boost_coordinates`], `x'_a = Σ_b m[a][b] x_b`, read off
/// from the boost's action on the basis vectors.
pub fn boost_matrix(v: &BoostVelocity) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for b in 0..4 {
        let mut e = [0.0; 4];
        e[b] = 1.0;
        let col = boost_coordinates(&FourVector(e), v);
        for a in 0..4 {
            m[a][b] = col.0[a];
        }
    }
    m
}

/// Total four-momentum `P_μ = (P_i, E)` of a free oscillator of rest mass `M0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameMomentum {
    pub p: FourVector,
    pub m0: f64,
}

impl FrameMomentum {
    pub fn energy(&self) -> f64 {
        self.p.0[3]
    }

    /// `P^μ P_μ + M0²`, zero on the mass shell.
    pub fn mass_shell_residual(&self) -> f64 {
        minkowski_dot(&self.p, &self.p) + self.m0 * self.m0
    }
}

/// `P_i = γ M0 v_i`, `E = γ M0`.
pub fn momentum_from_boost(m0: f64, v: &BoostVelocity) -> Result<FrameMomentum> {
    if !(m0 > 0.0) || !m0.is_finite() {
        return domain(format!("rest mass must be positive, got {m0}"));
    }
    let g = v.gamma;
    let [v1, v2, v3] = v.v;
    Ok(FrameMomentum {
        p: FourVector([g * m0 * v1, g * m0 * v2, g * m0 * v3, g * m0]),
        m0,
    })
}

/// Projection orthogonal to the total momentum,
/// `x⊥^μ = x^μ + M0⁻² P^μ (P_ν x^ν)`, returned with the index down.
pub fn perp_project(x: &FourVector, p: &FrameMomentum) -> FourVector {
    let px = minkowski_dot(&p.p, x);
    *x + p.p * (px / (p.m0 * p.m0))
}

/// Linear form `c` with `perp_project(x)^μ = Σ_a c[μ][a] x_a` (upper output).
pub fn perp_coefficients(p: &FrameMomentum) -> [[f64; 4]; 4] {
    let inv = 1.0 / (p.m0 * p.m0);
    let pl = p.p.0;
    std::array::from_fn(|mu| {
        std::array::from_fn(|a| {
            let delta = if mu == a { 1.0 } else { 0.0 };
            METRIC[mu] * (delta + pl[mu] * METRIC[a] * pl[a] * inv)
        })
    })
}

/// The ε weights that distribute total momentum between the constituents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitWeights {
    pub eps1: f64,
    pub eps2: f64,
    pub m0: f64,
}

/// `ε1 = (M0² + m1² - m2²)/(2 M0)`, `ε2 = (M0² + m2² - m1²)/(2 M0)`.
pub fn epsilon_params(m1: f64, m2: f64, m0: f64) -> Result<(f64, f64)> {
    if m1 < 0.0 || m2 < 0.0 {
        return domain(format!("masses must be non-negative, got ({m1}, {m2})"));
    }
    if !(m0 > 0.0) {
        return domain(format!("total mass must be positive, got {m0}"));
    }
    let d = m1 * m1 - m2 * m2;
    let m0sq = m0 * m0;
    Ok(((m0sq + d) / (2.0 * m0), (m0sq - d) / (2.0 * m0)))
}

impl SplitWeights {
    pub fn new(m1: f64, m2: f64, m0: f64) -> Result<Self> {
        let (eps1, eps2) = epsilon_params(m1, m2, m0)?;
        Ok(SplitWeights { eps1, eps2, m0 })
    }
}

/// Center-of-mass and relative variables of a two-body configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComCoordinates {
    pub big_x: FourVector,
    pub big_p: FourVector,
    pub x: FourVector,
    pub p: FourVector,
}

pub fn com_split(
    x1: &FourVector,
    x2: &FourVector,
    p1: &FourVector,
    p2: &FourVector,
    w: &SplitWeights,
) -> ComCoordinates {
    let inv = 1.0 / w.m0;
    ComCoordinates {
        big_x: (*x1 * w.eps1 + *x2 * w.eps2) * inv,
        big_p: *p1 + *p2,
        x: *x1 - *x2,
        p: (*p1 * w.eps2 - *p2 * w.eps1) * inv,
    }
}

/// Inverse of [`com_split`]; returns `(x1, x2, p1, p2)`.
pub fn com_join(c: &ComCoordinates, w: &SplitWeights) -> (FourVector, FourVector, FourVector, FourVector) {
    let inv = 1.0 / w.m0;
    let x1 = c.big_x + c.x * (w.eps2 * inv);
    let x2 = c.big_x - c.x * (w.eps1 * inv);
    let p1 = c.big_p * (w.eps1 * inv) + c.p;
    let p2 = c.big_p * (w.eps2 * inv) - c.p;
    (x1, x2, p1, p2)
}
