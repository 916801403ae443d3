#![allow(dead_code)]

/// Gauss hypergeometric series `₂F₁(a, b; c; z)` for `|z| < 1`.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..20_000 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            return sum;
        }
    }
    panic!("hypergeometric series did not converge at z = {z}");
}

/// `₂F₁` for `z < 1`, using the Pfaff transformation on the negative axis.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> f64 {
    if z < -0.5 {
        (1.0 - z).powf(-a) * hyp2f1_series(a, c - b, c, z / (z - 1.0))
    } else {
        hyp2f1_series(a, b, c, z)
    }
}

/// Closed-form generator for `f0 = A r² + B`.
pub fn quadratic_generator(amp: f64, base: f64, omega: f64, n: usize, r: f64) -> f64 {
    let nf = n as f64;
    let disc = (nf * nf + 8.0).sqrt();
    let (a, b) = (0.5 * (nf + disc), 0.5 * (nf - disc));
    let z = amp * r * r / (4.0 * (omega - 0.5 * base));
    hyp2f1(a, b, nf + 1.0, z)
}

/// `(κ1, κ2, A[f0])` for `f0 = B + A r²`.
pub fn quadratic_constants(amp: f64, base: f64) -> (f64, f64, f64) {
    (0.5 * base, 0.5 * base + 0.25 * amp, (base + amp) / base)
}

/// `Ω̂_n` for `f0 = B + A r²` from `∫₀¹ s^{2n+1} f0 = B/(2n+2) + A/(2n+4)`.
pub fn quadratic_omega_hat(amp: f64, base: f64, n: usize) -> f64 {
    let nf = n as f64;
    let k2 = 0.5 * base + 0.25 * amp;
    k2 - (nf + 1.0) / nf * (base / (2.0 * nf + 2.0) + amp / (2.0 * nf + 4.0))
}
