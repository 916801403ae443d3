//! Mode-indexed pieces of the linearized operator: `Ω̂_n`, `G_n`, `H_n`, `A_n`.

use crate::error::{Result, SpectraError};
use crate::numerics::{integrate, QuadOptions};
use crate::profile::Profile;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCoefficients {
    pub n: usize,
    pub omega_hat: f64,
    /// `G_n(1) = n(Ω − Ω̂_n)`.
    pub boundary_gap: f64,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(SpectraError::invalid("mode index n must be at least 1"));
    }
    Ok(())
}

/// `Ω̂_n = κ2 − ((n+1)/n) ∫₀¹ s^{2n+1} f0(s) ds`.
pub fn omega_hat(p: &Profile, n: usize) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    Ok(p.kappa2() - (nf + 1.0) / nf * p.moment(2.0 * nf + 1.0, 1.0))
}

/// `{Ω̂_m, Ω̂_{2m}, …, Ω̂_{n_max m}}` followed by the limit point `κ2`.
pub fn singular_set(p: &Profile, m: usize, n_max: usize) -> Result<Vec<f64>> {
    check_n(m)?;
    let mut out = (1..=n_max).map(|k| omega_hat(p, k * m)).collect::<Result<Vec<_>>>()?;
    out.push(p.kappa2());
    Ok(out)
}

pub fn mode_coefficients(p: &Profile, n: usize, omega: f64) -> Result<ModeCoefficients> {
    let omega_hat = omega_hat(p, n)?;
    Ok(ModeCoefficients { n, omega_hat, boundary_gap: n as f64 * (omega - omega_hat) })
}

/// `r^{1−n} G_n(r) = nΩr² + κ2 − (n+1)r² ∫₀¹ s f0(rs) ds + (n+1) r² ∫₀¹ s^{2n+1} f0(rs) ds`.
pub fn g_reduced(p: &Profile, omega: f64, n: usize, r: f64) -> f64 {
    let nf = n as f64;
    let r2 = r * r;
    nf * omega * r2 + p.kappa2() - (nf + 1.0) * r2 * p.inner_mean(r) + (nf + 1.0) * r2 * p.moment(2.0 * nf + 1.0, r)
}

/// `G_n(r) = r^{n−1} (r^{1−n} G_n)(r)`.
pub fn g_n(p: &Profile, omega: f64, n: usize, r: f64) -> Result<f64> {
    check_n(n)?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(SpectraError::invalid(format!("G_n needs r in (0, 1], got {r}")));
    }
    Ok(r.powi(n as i32 - 1) * g_reduced(p, omega, n, r))
}

fn opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 }
}

/// `H_n[h](r) = r^{2n} ∫_r¹ s^{1−n} h(s) ds + ∫₀^r s^{n+1} h(s) ds`.
pub fn h_n<H: Fn(f64) -> f64>(h: H, n: usize, r: f64) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    // outer part as r^{n+1} ∫_r¹ (r/s)^{n−1} h(s) ds keeps the weight bounded
    let outer = if r < 1.0 {
        let v = integrate(|s| (r / s).powf(nf - 1.0) * h(s), r, 1.0, opts())?.value;
        r.powf(nf + 1.0) * v
    } else {
        0.0
    };
    // inner part with s = r u
    let inner = if r > 0.0 {
        let v = integrate(|u| u.powf(nf + 1.0) * h(r * u), 0.0, 1.0, opts())?.value;
        r.powf(nf + 2.0) * v
    } else {
        0.0
    };
    Ok(outer + inner)
}

fn check_singular(p: &Profile, omega: f64, n: usize, omega_hat: f64) -> Result<()> {
    if (omega - omega_hat).abs() < 1e-12 * p.kappa2().abs().max(1.0) {
        return Err(SpectraError::SingularOmega { omega, n, omega_hat });
    }
    Ok(())
}

/// `A_n[h] = ∫₀¹ s^{n+1} h(s) ds / (2n(Ω̂_n − Ω))`.
pub fn a_n<H: Fn(f64) -> f64>(p: &Profile, omega: f64, n: usize, h: H) -> Result<f64> {
    let oh = omega_hat(p, n)?;
    check_singular(p, omega, n, oh)?;
    let nf = n as f64;
    let num = integrate(|s| s.powf(nf + 1.0) * h(s), 0.0, 1.0, opts())?.value;
    Ok(num / (2.0 * nf * (oh - omega)))
}

/// `A_n[h] = −H_n[h](1)/(2 G_n(1))`, the boundary-gap form.
pub fn a_n_boundary<H: Fn(f64) -> f64>(p: &Profile, omega: f64, n: usize, h: H) -> Result<f64> {
    let oh = omega_hat(p, n)?;
    check_singular(p, omega, n, oh)?;
    let g1 = g_n(p, omega, n, 1.0)?;
    Ok(-h_n(h, n, 1.0)? / (2.0 * g1))
}
