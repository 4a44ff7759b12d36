//! Closed-form representation of fields built from oscillator eigenstates.
//!
//! A field is stored as a finite sum
//!
//! ```text
//! f(x) = Σ c[l1,l2,l3,k] h_l1(y1) h_l2(y2) h_l3(y3) y4^k,   y = J x
//! ```
//!
//! over orthonormal Hermite functions of the scaled rest-frame coordinates.
//! Lab derivatives and multiplication by lab coordinates map onto the
//! three-term Hermite relations through the chain rule, so every operator in
//! this crate acts on the coefficients exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::hermite::hermite_function_table;
use crate::kinematics::FourVector;
use crate::oscillator::{OscillatorState, RestFrameMap};

type Key = [u32; 4];

const FRAME_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct HermiteExpansion {
    frame: Arc<RestFrameMap>,
    terms: BTreeMap<Key, Complex64>,
}

fn accumulate(terms: &mut BTreeMap<Key, Complex64>, key: Key, c: Complex64) {
    if c == Complex64::new(0.0, 0.0) {
        return;
    }
    let slot = terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
    *slot += c;
}

impl HermiteExpansion {
    pub fn zero(frame: Arc<RestFrameMap>) -> Self {
        HermiteExpansion {
            frame,
            terms: BTreeMap::new(),
        }
    }

    /// `Φ = Ω^{3/4} h_l1(ξ1) h_l2(ξ2) h_l3(ξ3)` for the given state.
    pub fn eigenstate(state: &OscillatorState, frame: Arc<RestFrameMap>) -> Self {
        let [l1, l2, l3] = state.qns.0;
        let mut terms = BTreeMap::new();
        terms.insert([l1, l2, l3, 0], Complex64::new(state.omega_big().powf(0.75), 0.0));
        HermiteExpansion { frame, terms }
    }

    pub fn frame(&self) -> &Arc<RestFrameMap> {
        &self.frame
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Frames built from the same velocity agree up to rounding even when
    /// the rest masses differ.
    pub fn same_frame(&self, other: &HermiteExpansion) -> bool {
        if Arc::ptr_eq(&self.frame, &other.frame) {
            return true;
        }
        let (a, b) = (&self.frame.jac, &other.frame.jac);
        let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x - y).abs() <= FRAME_TOLERANCE * scale)
    }

    pub fn eval(&self, x: &FourVector) -> Complex64 {
        if self.terms.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let y = self.frame.to_rest(x);
        let mut lmax = [0u32; 3];
        let mut kmax = 0u32;
        for key in self.terms.keys() {
            for i in 0..3 {
                lmax[i] = lmax[i].max(key[i]);
            }
            kmax = kmax.max(key[3]);
        }
        let tables: [Vec<f64>; 3] = std::array::from_fn(|i| hermite_function_table(lmax[i], y[i]));
        let mut powers = Vec::with_capacity(kmax as usize + 1);
        let mut p = 1.0;
        for _ in 0..=kmax {
            powers.push(p);
            p *= y[3];
        }
        self.terms
            .iter()
            .map(|(k, c)| {
                c * (tables[0][k[0] as usize]
                    * tables[1][k[1] as usize]
                    * tables[2][k[2] as usize]
                    * powers[k[3] as usize])
            })
            .sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = HermiteExpansion::zero(self.frame.clone());
        for (k, c) in &self.terms {
            accumulate(&mut out.terms, *k, c * s);
        }
        out
    }

    /// `Σ_j s_j f_j`; all inputs must share a frame.
    pub fn linear_combination(parts: &[(Complex64, &HermiteExpansion)]) -> Option<Self> {
        let first = parts.first()?.1;
        if !parts.iter().all(|(_, e)| e.same_frame(first)) {
            return None;
        }
        let mut out = HermiteExpansion::zero(first.frame.clone());
        for (s, e) in parts {
            for (k, c) in &e.terms {
                accumulate(&mut out.terms, *k, c * s);
            }
        }
        Some(out)
    }

    /// `∂/∂y_b` in rest-frame coordinates.
    fn d_rest(&self, b: usize, weight: f64, out: &mut BTreeMap<Key, Complex64>) {
        for (k, c) in &self.terms {
            if b < 3 {
                // h_l' = sqrt(l/2) h_{l-1} - sqrt((l+1)/2) h_{l+1}
                let l = k[b] as f64;
                if k[b] > 0 {
                    let mut dn = *k;
                    dn[b] -= 1;
                    accumulate(out, dn, c * (weight * (l / 2.0).sqrt()));
                }
                let mut up = *k;
                up[b] += 1;
                accumulate(out, up, c * (-weight * ((l + 1.0) / 2.0).sqrt()));
            } else if k[3] > 0 {
                let mut dn = *k;
                dn[3] -= 1;
                accumulate(out, dn, c * (weight * k[3] as f64));
            }
        }
    }

    /// Multiplication by `y_b`.
    fn mul_rest(&self, b: usize, weight: f64, out: &mut BTreeMap<Key, Complex64>) {
        for (k, c) in &self.terms {
            if b < 3 {
                // y h_l = sqrt((l+1)/2) h_{l+1} + sqrt(l/2) h_{l-1}
                let l = k[b] as f64;
                let mut up = *k;
                up[b] += 1;
                accumulate(out, up, c * (weight * ((l + 1.0) / 2.0).sqrt()));
                if k[b] > 0 {
                    let mut dn = *k;
                    dn[b] -= 1;
                    accumulate(out, dn, c * (weight * (l / 2.0).sqrt()));
                }
            } else {
                let mut up = *k;
                up[3] += 1;
                accumulate(out, up, c * weight);
            }
        }
    }

    /// `∂/∂x_a` with respect to the lab coordinate `x_a` (index down).
    pub fn derivative(&self, a: usize) -> Self {
        let mut out = BTreeMap::new();
        for b in 0..4 {
            let w = self.frame.jac[b][a];
            if w != 0.0 {
                self.d_rest(b, w, &mut out);
            }
        }
        HermiteExpansion {
            frame: self.frame.clone(),
            terms: out,
        }
    }

    /// Multiplication by `Σ_a coeffs[a] x_a + constant`.
    pub fn multiply_linear(&self, coeffs: &[f64; 4], constant: f64) -> Self {
        let mut out = BTreeMap::new();
        for b in 0..4 {
            let w: f64 = (0..4).map(|a| coeffs[a] * self.frame.inv[a][b]).sum();
            if w != 0.0 {
                self.mul_rest(b, w, &mut out);
            }
        }
        if constant != 0.0 {
            for (k, c) in &self.terms {
                accumulate(&mut out, *k, c * constant);
            }
        }
        HermiteExpansion {
            frame: self.frame.clone(),
            terms: out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::BoostVelocity;
    use crate::oscillator::{OscillatorSpec, QuantumNumbers};

    fn state(q: [u32; 3], v: [f64; 3]) -> OscillatorState {
        let spec = OscillatorSpec::new(1.0, 1.0, 1.7).unwrap();
        OscillatorState::new(spec, QuantumNumbers(q), BoostVelocity::from_array(v).unwrap()).unwrap()
    }

    #[test]
    fn eigenstate_expansion_matches_direct_evaluation() {
        for q in QuantumNumbers::enumerate(4) {
            let st = state(q.0, [0.3, 0.5, -0.6]);
            let e = HermiteExpansion::eigenstate(&st, Arc::new(st.frame()));
            for x in [
                FourVector::new(0.1, -0.3, 0.6, 0.2),
                FourVector::new(-1.0, 0.4, 0.0, -0.8),
            ] {
                let a = e.eval(&x);
                assert!((a.re - st.phi(&x)).abs() < 1e-14 && a.im == 0.0);
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let st = state([2, 1, 0], [0.0, 0.7, 0.2]);
        let e = HermiteExpansion::eigenstate(&st, Arc::new(st.frame()));
        let x = FourVector::new(0.2, -0.4, 0.5, 0.3);
        for a in 0..4 {
            let d = e.derivative(a).eval(&x).re;
            let h = 1e-5;
            let mut xp = x;
            let mut xm = x;
            xp.0[a] += h;
            xm.0[a] -= h;
            let fd = (st.phi(&xp) - st.phi(&xm)) / (2.0 * h);
            assert!((d - fd).abs() < 1e-8, "axis {a}: {d} vs {fd}");
        }
    }

    #[test]
    fn multiply_linear_matches_pointwise_product() {
        let st = state([1, 0, 2], [0.5, 0.0, 0.0]);
        let e = HermiteExpansion::eigenstate(&st, Arc::new(st.frame()));
        let c = [0.3, -1.2, 0.8, 2.0];
        let m = e.multiply_linear(&c, 0.5);
        let x = FourVector::new(0.4, 0.1, -0.3, 1.1);
        let lin: f64 = (0..4).map(|a| c[a] * x[a]).sum::<f64>() + 0.5;
        assert!((m.eval(&x).re - lin * st.phi(&x)).abs() < 1e-14);
    }
}
