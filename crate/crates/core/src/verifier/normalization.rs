//! Normalization on the constraint hypersurface `P_μ x^μ = 0`.
//!
//! The delta function is resolved against the time integration, so the
//! integral becomes `(M0/E) ∫ |Φ(x, t = P_j x_j / E)|² d³x`. On that surface
//! the scaled rest time vanishes and `ξ = A x` is linear in the spatial
//! coordinates; the integral is evaluated in `ξ` by tensor-product
//! Gauss-Hermite quadrature, with the Gaussian weight divided out.

use crate::hermite::gauss_hermite;
use crate::kinematics::FourVector;
use crate::oscillator::OscillatorState;

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inverse3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let d = det3(m);
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 2, 1, 2) / d, -c(0, 2, 1, 2) / d, c(0, 1, 1, 2) / d],
        [-c(1, 2, 0, 2) / d, c(0, 2, 0, 2) / d, -c(0, 1, 0, 2) / d],
        [c(1, 2, 0, 1) / d, -c(0, 2, 0, 1) / d, c(0, 1, 0, 1) / d],
    ]
}

/// `∫ Ψ†Ψ δ(P·x / M0) d⁴x` with `nodes` Gauss-Hermite nodes per axis.
pub fn hypersurface_integral(state: &OscillatorState, nodes: usize) -> f64 {
    let frame = state.frame();
    let [p1, p2, p3, e] = state.momentum.p.lower();
    let v = [p1 / e, p2 / e, p3 / e];
    // ξ_i = Σ_a (J_ia + J_i4 v_a) x_a on the surface
    let a: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|k| frame.jac[i][k] + frame.jac[i][3] * v[k]));
    let a_inv = inverse3(&a);
    let jacobian = state.momentum.m0 / e / det3(&a).abs();

    let (xs, ws) = gauss_hermite(nodes);
    let mut total = 0.0;
    for (&x1, &w1) in xs.iter().zip(&ws) {
        for (&x2, &w2) in xs.iter().zip(&ws) {
            for (&x3, &w3) in xs.iter().zip(&ws) {
                let xi = [x1, x2, x3];
                let xs_lab: [f64; 3] = std::array::from_fn(|r| (0..3).map(|c| a_inv[r][c] * xi[c]).sum());
                let t = v[0] * xs_lab[0] + v[1] * xs_lab[1] + v[2] * xs_lab[2];
                let phi = state.phi(&FourVector::new(xs_lab[0], xs_lab[1], xs_lab[2], t));
                let r2 = x1 * x1 + x2 * x2 + x3 * x3;
                total += w1 * w2 * w3 * r2.exp() * phi * phi;
            }
        }
    }
    total * jacobian
}

/// Integral at `nodes` and at `2 nodes`.
pub fn with_doubling(state: &OscillatorState, nodes: usize) -> (f64, f64) {
    (
        hypersurface_integral(state, nodes),
        hypersurface_integral(state, 2 * nodes),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::BoostVelocity;
    use crate::oscillator::{OscillatorSpec, QuantumNumbers};

    fn state(q: [u32; 3], v: [f64; 3], omega: f64) -> OscillatorState {
        let spec = OscillatorSpec::new(1.0, 1.0, omega).unwrap();
        OscillatorState::new(spec, QuantumNumbers(q), BoostVelocity::from_array(v).unwrap()).unwrap()
    }

    #[test]
    fn unit_norm_at_rest_and_boosted() {
        for (q, v) in [
            ([0, 0, 0], [0.0, 0.0, 0.0]),
            ([2, 1, 0], [0.0, 0.0, 0.0]),
            ([0, 0, 0], [0.6, 0.0, 0.0]),
            ([1, 2, 1], [0.5, 0.5, 0.5]),
        ] {
            let i = hypersurface_integral(&state(q, v, 1.3), 12);
            assert!((i - 1.0).abs() < 1e-12, "{q:?} {v:?}: {i}");
        }
    }

    #[test]
    fn too_few_nodes_is_inexact() {
        // 2 nodes cannot integrate h_3² exactly
        let i = hypersurface_integral(&state([3, 0, 0], [0.0; 3], 1.0), 2);
        assert!((i - 1.0).abs() > 1e-3);
    }

    #[test]
    fn inverse_is_inverse() {
        let m = [[2.0, 0.3, -1.0], [0.1, 1.5, 0.2], [0.0, -0.4, 3.0]];
        let inv = inverse3(&m);
        for r in 0..3 {
            for c in 0..3 {
                let v: f64 = (0..3).map(|k| m[r][k] * inv[k][c]).sum();
                assert!((v - if r == c { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
