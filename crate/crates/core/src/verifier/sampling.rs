//! Deterministic sample points in the rest frame of a state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hermite::hermite_function_table;
use crate::kinematics::FourVector;
use crate::oscillator::{OscillatorState, RestFrameMap};

/// Radius of the bulk sampling ball in `ξ`.
pub const BULK_RADIUS: f64 = 3.0;
/// Radius of the tail probes in `ξ`.
pub const TAIL_RADIUS: f64 = 5.0;
pub const TAIL_PROBES: usize = 4;
/// Range of the scaled rest time `√Ω t'`.
pub const TIME_RANGE: f64 = 3.0;

/// Floor applied to amplitude scales so residuals stay finite.
pub const AMPLITUDE_FLOOR: f64 = 1e-8;

/// Independent random stream for one `(family, boost, state)` cell.
pub fn stream_rng(seed: u64, family: u64, boost: usize, state: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((family << 48) ^ ((boost as u64) << 24) ^ state as u64);
    rng
}

fn unit_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let r2: f64 = v.iter().map(|c| c * c).sum();
        if r2 > 1e-6 && r2 <= 1.0 {
            let r = r2.sqrt();
            return v.map(|c| c / r);
        }
    }
}

/// `count` points uniform in the ball `|ξ| ≤ 3` with `√Ω t'` uniform in
/// `[-3, 3]`, followed by tail probes at `|ξ| = 5`, mapped to lab
/// coordinates.
pub fn sample_points(frame: &RestFrameMap, count: usize, tails: usize, rng: &mut ChaCha8Rng) -> Vec<FourVector> {
    let mut out = Vec::with_capacity(count + tails);
    for _ in 0..count {
        let dir = unit_direction(rng);
        let r = BULK_RADIUS * rng.gen::<f64>().cbrt();
        let tau = rng.gen_range(-TIME_RANGE..TIME_RANGE);
        out.push(frame.from_rest(&[r * dir[0], r * dir[1], r * dir[2], tau]));
    }
    for _ in 0..tails {
        let dir = unit_direction(rng);
        let tau = rng.gen_range(-TIME_RANGE..TIME_RANGE);
        out.push(frame.from_rest(&[TAIL_RADIUS * dir[0], TAIL_RADIUS * dir[1], TAIL_RADIUS * dir[2], tau]));
    }
    out
}

fn peak_hermite_function(l: u32) -> f64 {
    // |h_l| peaks inside the classical turning point sqrt(2l + 1)
    let reach = (2.0 * l as f64 + 1.0).sqrt() + 1.0;
    let n = 4000;
    (0..=n)
        .map(|k| {
            let y = reach * k as f64 / n as f64;
            hermite_function_table(l, y)[l as usize].abs()
        })
        .fold(0.0, f64::max)
}

/// `sup |Φ|` of the state, used to scale pointwise residuals.
pub fn peak_amplitude(state: &OscillatorState) -> f64 {
    let w = state.omega_big().powf(0.75);
    let peak = state.qns.0.iter().map(|&l| peak_hermite_function(l)).product::<f64>() * w;
    peak.max(AMPLITUDE_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::BoostVelocity;
    use crate::oscillator::{OscillatorSpec, QuantumNumbers};

    #[test]
    fn points_are_reproducible_and_bounded() {
        let spec = OscillatorSpec::new(1.0, 1.0, 2.0).unwrap();
        let st =
            OscillatorState::new(spec, QuantumNumbers::GROUND, BoostVelocity::new(0.0, 0.6, 0.0).unwrap()).unwrap();
        let fr = st.frame();
        let a = sample_points(&fr, 30, TAIL_PROBES, &mut stream_rng(7, 1, 0, 3));
        let b = sample_points(&fr, 30, TAIL_PROBES, &mut stream_rng(7, 1, 0, 3));
        let c = sample_points(&fr, 30, TAIL_PROBES, &mut stream_rng(7, 1, 0, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
        for (k, x) in a.iter().enumerate() {
            let y = fr.to_rest(x);
            let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            if k < 30 {
                assert!(r <= BULK_RADIUS + 1e-9);
            } else {
                assert!((r - TAIL_RADIUS).abs() < 1e-9);
            }
            assert!(y[3].abs() <= TIME_RANGE + 1e-9);
        }
    }

    #[test]
    fn ground_state_peak() {
        let spec = OscillatorSpec::new(1.0, 1.0, 1.0).unwrap();
        let st = OscillatorState::new(spec, QuantumNumbers::GROUND, BoostVelocity::rest()).unwrap();
        let expected = std::f64::consts::PI.powf(-0.75);
        assert!((peak_amplitude(&st) - expected).abs() < 1e-12);
        // bound |h_l| <= π^{-1/4}
        for l in 0..12 {
            assert!(peak_hermite_function(l) <= std::f64::consts::PI.powf(-0.25) + 1e-12);
        }
    }
}
