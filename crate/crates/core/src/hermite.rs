//! Hermite polynomials, Hermite functions and Gauss-Hermite rules.

/// `π^{-1/4}`
const PI_M4: f64 = 0.751_125_544_464_942_5;

/// Physicists' Hermite polynomial `H_l(ξ)` by upward recurrence
/// `H_{l+1} = 2ξ H_l - 2l H_{l-1}`.
pub fn hermite_eval(l: u32, xi: f64) -> f64 {
    let mut prev = 1.0;
    if l == 0 {
        return prev;
    }
    let mut cur = 2.0 * xi;
    for k in 1..l {
        let next = 2.0 * xi * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Scaled polynomials `H_k(ξ) / sqrt(2^k k!)` for `k = 0..=lmax`.
///
/// The factorial is folded into the recurrence so values stay near unity for
/// moderate `ξ`.
pub fn hermite_scaled_table(lmax: u32, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(lmax as usize + 1);
    out.push(1.0);
    if lmax == 0 {
        return out;
    }
    out.push(2f64.sqrt() * xi);
    for k in 1..lmax as usize {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Orthonormal Hermite functions `h_k(y) = π^{-1/4} e^{-y²/2} H_k(y)/sqrt(2^k k!)`
/// for `k = 0..=lmax`.
pub fn hermite_function_table(lmax: u32, y: f64) -> Vec<f64> {
    let env = PI_M4 * (-0.5 * y * y).exp();
    let mut t = hermite_scaled_table(lmax, y);
    for v in &mut t {
        *v *= env;
    }
    t
}

/// Nodes and weights of the `n`-point Gauss-Hermite rule for the weight
/// `e^{-x²}`, nodes in descending order.
///
/// Newton iteration on the orthonormal recurrence, seeded with the usual
/// asymptotic guesses for the largest roots.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = PI_M4;
            let mut p2 = 0.0;
            for j in 0..n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_values() {
        assert_eq!(hermite_eval(0, 123.0), 1.0);
        assert_eq!(hermite_eval(1, 0.5), 1.0);
        assert_eq!(hermite_eval(2, 1.0), 2.0);
        // H_3 = 8ξ³ - 12ξ, H_4 = 16ξ⁴ - 48ξ² + 12
        assert_eq!(hermite_eval(3, 2.0), 40.0);
        assert_eq!(hermite_eval(4, 1.5), 16.0 * 5.0625 - 48.0 * 2.25 + 12.0);
    }

    #[test]
    fn scaled_table_matches_raw_recurrence() {
        let mut fact = 1.0;
        for l in 0..=12u32 {
            if l > 0 {
                fact *= l as f64;
            }
            for &xi in &[-3.1, -0.4, 0.0, 0.9, 2.7] {
                let raw = hermite_eval(l, xi) / (2f64.powi(l as i32) * fact).sqrt();
                let t = hermite_scaled_table(l, xi);
                assert!(
                    (t[l as usize] - raw).abs() <= 1e-12 * raw.abs().max(1.0),
                    "l={l} xi={xi}"
                );
            }
        }
    }

    #[test]
    fn parity() {
        for l in 0..10 {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            assert!((hermite_eval(l, -1.3) - sign * hermite_eval(l, 1.3)).abs() < 1e-9);
        }
    }

    #[test]
    fn quadrature_moments() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        for n in [1usize, 2, 3, 5, 8, 16, 32, 64] {
            let (x, w) = gauss_hermite(n);
            let m0: f64 = w.iter().sum();
            assert!((m0 - sqrt_pi).abs() < 1e-13, "n={n} m0={m0}");
            if n >= 2 {
                let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
                assert!((m2 - sqrt_pi / 2.0).abs() < 1e-13, "n={n}");
            }
            if n >= 3 {
                let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
                assert!((m4 - 0.75 * sqrt_pi).abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn hermite_functions_orthonormal_under_quadrature() {
        let (x, w) = gauss_hermite(24);
        let tables: Vec<Vec<f64>> = x.iter().map(|&y| hermite_function_table(8, y)).collect();
        for a in 0..=8 {
            for b in 0..=8 {
                let s: f64 = tables
                    .iter()
                    .zip(x.iter().zip(&w))
                    .map(|(t, (&y, &wi))| wi * (y * y).exp() * t[a] * t[b])
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-12, "({a},{b}) -> {s}");
            }
        }
    }
}
