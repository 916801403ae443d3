//! The dispersion function `ζ_n(Ω)`, its roots in both regimes, and kernel certificates.

use crate::error::{Result, SpectraError};
use crate::modes;
use crate::numerics::{bisect_secant, sign_changes};
use crate::operator_lab;
use crate::profile::{Profile, Sign};
use crate::sturm::{self, GeneratorOptions, GeneratorSolution};
use serde::Serialize;

pub const GUARD_BAND: f64 = 1e-8;
pub const DEFAULT_ALPHA: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub generator: GeneratorOptions,
    /// Uniform samples across the window, endpoints included.
    pub samples: usize,
    pub guard: f64,
    /// Abundance retries at `m + 10`, `m + 20`, …
    pub max_retries: usize,
    pub secant_steps: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { generator: GeneratorOptions::default(), samples: 9, guard: GUARD_BAND, max_retries: 5, secant_steps: 3 }
    }
}

impl ScanOptions {
    pub fn with_tol(tol: f64) -> Self {
        let mut o = ScanOptions::default();
        o.generator.tol = tol;
        o
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionRoot {
    pub omega: f64,
    /// `|ζ_n(Ω)|` at the refined root.
    pub residual: f64,
    pub root_tol: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionScan {
    pub n: usize,
    pub window: (f64, f64),
    pub omega_samples: Vec<f64>,
    pub zeta_values: Vec<f64>,
    pub brackets: Vec<(f64, f64)>,
    pub roots: Vec<DispersionRoot>,
    /// Largest difference quotient of `ζ` between neighbouring samples.
    pub lipschitz: f64,
    /// Modes tried in order; the last one produced the scan.
    pub attempts: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueCertificate {
    pub m: usize,
    pub omega_m: f64,
    pub zeta_residual: f64,
    /// `(n, |ζ_{nm}(Ω_m)|)` for `n = 2..N`.
    pub higher_mode_margins: Vec<(usize, f64)>,
    /// Signed values behind the margins.
    pub higher_mode_zeta: Vec<(usize, f64)>,
    pub singular_set_distance: f64,
    pub mode0_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TValue {
    pub n: usize,
    pub omega: f64,
    /// Reduction through the generator.
    pub generator: f64,
    /// `1 − (n+1) ζ_n / (G_n(1) (F(1) + F′(1)/2n))`.
    pub closed_form: f64,
    /// `(Id − σL_n)` solve on a Nyström grid, when requested.
    pub operator: Option<f64>,
    pub zeta: f64,
}

/// `ζ_n(Ω) = F(1)(Ω − nκ2/(n+1)) + ∫₀¹ F s^{2n+1} (f0 − 2Ω) ds` on the default grid.
pub fn zeta(p: &Profile, omega: f64, n: usize, tol: f64) -> Result<f64> {
    zeta_with(p, omega, n, &GeneratorOptions { tol, ..Default::default() })
}

pub fn zeta_with(p: &Profile, omega: f64, n: usize, opts: &GeneratorOptions) -> Result<f64> {
    if n == 0 {
        return Err(SpectraError::invalid("mode index n must be at least 1"));
    }
    let sol = sturm::solve_generator_with(p, omega, n, opts)?;
    Ok(zeta_from(p, &sol))
}

pub fn zeta_from(p: &Profile, sol: &GeneratorSolution) -> f64 {
    let nf = sol.n as f64;
    let omega = sol.omega;
    let k = 2 * sol.n as i32 + 1;
    sol.f_at_1 * (omega - nf * p.kappa2() / (nf + 1.0)) + sol.integrate_with(|s| s.powi(k) * (p.f0(s) - 2.0 * omega))
}

/// `f0(0)/(10(f0(1) − f0(0)))`, the largest admissible scarcity mode.
pub fn scarcity_bound(p: &Profile) -> f64 {
    let (a, b) = (p.f0(0.0), p.f0(1.0));
    a / (10.0 * (b - a))
}

fn map_samples<F>(xs: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        xs.par_iter().map(|&x| f(x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        xs.iter().map(|&x| f(x)).collect()
    }
}

fn near_singular(p: &Profile, n: usize, omega: f64, guard: f64) -> bool {
    // Ω̂_{kn} accumulate at κ2 and are only relevant above it
    (1..=64).any(|k| modes::omega_hat(p, k * n).map(|o| (o - omega).abs() < guard).unwrap_or(false))
}

/// Sample `ζ_n` on `[lo, hi]`, bracket sign changes and refine each root.
pub fn scan_window(p: &Profile, n: usize, lo: f64, hi: f64, opts: &ScanOptions) -> Result<DispersionScan> {
    if !(hi > lo) || opts.samples < 2 {
        return Err(SpectraError::invalid("scan window must be increasing with at least two samples"));
    }
    let k = opts.samples;
    let omega_samples: Vec<f64> = (0..k)
        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
        .filter(|&o| p.regime(o).is_ok() && !near_singular(p, n, o, opts.guard))
        .collect();
    let g = opts.generator;
    let zeta_values = map_samples(&omega_samples, |o| zeta_with(p, o, n, &g))?;
    let lipschitz = omega_samples
        .windows(2)
        .zip(zeta_values.windows(2))
        .map(|(o, z)| ((z[1] - z[0]) / (o[1] - o[0])).abs())
        .fold(0.0, f64::max);
    let mut brackets = Vec::new();
    let mut roots = Vec::new();
    let width = 1e-10 * (hi - lo);
    for (i, j) in sign_changes(&omega_samples, &zeta_values) {
        let (a, b) = (omega_samples[i], omega_samples[j]);
        brackets.push((a, b));
        let root = bisect_secant(|o| zeta_with(p, o, n, &g), a, b, zeta_values[i], zeta_values[j], width, opts.secant_steps)?;
        roots.push(DispersionRoot {
            omega: root.x,
            residual: root.residual.abs(),
            root_tol: width,
            bracket: root.bracket,
            evaluations: root.evaluations,
        });
    }
    Ok(DispersionScan { n, window: (lo, hi), omega_samples, zeta_values, brackets, roots, lipschitz, attempts: vec![n] })
}

fn no_sign_change(scan: &DispersionScan) -> SpectraError {
    let (lo, hi) = scan.window;
    SpectraError::NoSignChange {
        lo,
        hi,
        zeta_lo: scan.zeta_values.first().copied().unwrap_or(f64::NAN),
        zeta_hi: scan.zeta_values.last().copied().unwrap_or(f64::NAN),
    }
}

/// Root of `ζ_m` in `(Ω̂_m, mκ2/(m+1))` for a positive profile.
pub fn scan_scarcity(p: &Profile, m: usize, opts: &ScanOptions) -> Result<DispersionScan> {
    if p.sign() != Sign::Positive {
        return Err(SpectraError::WrongRegime { expected: "positive profile (scarcity)".into() });
    }
    let bound = scarcity_bound(p);
    if m < 3 || m as f64 > bound * (1.0 + 1e-9) {
        return Err(SpectraError::NotAdmissible { m, lo: 3.0, hi: bound });
    }
    let mf = m as f64;
    let lo = modes::omega_hat(p, m)? + 2.0 * opts.guard;
    let hi = mf * p.kappa2() / (mf + 1.0);
    let scan = scan_window(p, m, lo, hi, opts)?;
    if scan.roots.is_empty() {
        return Err(no_sign_change(&scan));
    }
    Ok(scan)
}

/// Root of `ζ_m` in `(Ω̂_m − m^{−α}, Ω̂_m)` for a negative profile, raising `m` by 10 on failure.
pub fn scan_abundance(p: &Profile, m: usize, alpha: f64, opts: &ScanOptions) -> Result<DispersionScan> {
    if p.sign() != Sign::Negative {
        return Err(SpectraError::WrongRegime { expected: "negative profile (abundance)".into() });
    }
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(SpectraError::invalid(format!("alpha must lie in (1, 2), got {alpha}")));
    }
    if m == 0 {
        return Err(SpectraError::invalid("mode index m must be at least 1"));
    }
    let mut attempts = Vec::new();
    let mut last = None;
    for k in 0..=opts.max_retries {
        let mm = m + 10 * k;
        attempts.push(mm);
        let oh = modes::omega_hat(p, mm)?;
        let lo = (oh - (mm as f64).powf(-alpha)).max(p.kappa2() + opts.guard);
        let hi = oh - 2.0 * opts.guard;
        if !(hi > lo) {
            continue;
        }
        let mut scan = scan_window(p, mm, lo, hi, opts)?;
        scan.attempts = attempts.clone();
        let ends_ok = matches!((scan.zeta_values.first(), scan.zeta_values.last()), (Some(a), Some(b)) if *a < 0.0 && *b > 0.0);
        if ends_ok && !scan.roots.is_empty() {
            return Ok(scan);
        }
        last = Some(no_sign_change(&scan));
    }
    Err(last.unwrap_or(SpectraError::NoSignChange { lo: f64::NAN, hi: f64::NAN, zeta_lo: f64::NAN, zeta_hi: f64::NAN }))
}

/// Check that `Ω_m` gives a one-dimensional kernel: higher modes `nm` stay off zero,
/// `Ω_m` avoids the singular set and the mode-zero exceptional set.
pub fn certify(p: &Profile, m: usize, omega_m: f64, n_max: usize, opts: &ScanOptions) -> Result<EigenvalueCertificate> {
    let tol = opts.generator.tol;
    let zeta_residual = zeta_with(p, omega_m, m, &opts.generator)?.abs();
    if zeta_residual > tol {
        return Err(SpectraError::NotARoot { omega: omega_m, residual: zeta_residual, tol });
    }
    let modes_n: Vec<usize> = (2..=n_max.max(1)).collect();
    let g = opts.generator;
    let values = map_samples(&modes_n.iter().map(|&n| n as f64).collect::<Vec<_>>(), |n| {
        zeta_with(p, omega_m, n as usize * m, &g)
    })?;
    let mut higher_mode_margins = Vec::new();
    let mut higher_mode_zeta = Vec::new();
    for (&n, &z) in modes_n.iter().zip(&values) {
        if !(z.abs() > 10.0 * tol) {
            return Err(SpectraError::CertificateFailed {
                reason: format!("mode {} has |zeta| = {:e} within 10 tol of zero", n * m, z.abs()),
            });
        }
        higher_mode_margins.push((n, z.abs()));
        higher_mode_zeta.push((n, z));
    }
    let singular = modes::singular_set(p, m, n_max.max(1))?;
    let singular_set_distance = singular.iter().map(|o| (o - omega_m).abs()).fold(f64::INFINITY, f64::min);
    if !(singular_set_distance > 0.0) {
        return Err(SpectraError::CertificateFailed { reason: "omega_m lies on the singular set".into() });
    }
    let mode0_distance = if omega_m < p.kappa1() {
        // the mode-zero exceptional set lies above κ2
        p.kappa2() - omega_m
    } else {
        let half = (0.5 * (omega_m - p.kappa2())).max(1e-6);
        let lo = (omega_m - half).max(p.kappa2() + 1e-9);
        let hi = omega_m + half;
        let crossings = sturm::mode0_exceptional_set(p, (lo, hi), 9, 1e-3 * tol.max(1e-12))?;
        crossings.iter().map(|o| (o - omega_m).abs()).fold(half.min(omega_m - lo), f64::min)
    };
    if !(mode0_distance > 0.0) {
        return Err(SpectraError::CertificateFailed { reason: "omega_m lies on the mode-zero exceptional set".into() });
    }
    Ok(EigenvalueCertificate { m, omega_m, zeta_residual, higher_mode_margins, higher_mode_zeta, singular_set_distance, mode0_distance })
}

/// `T(n,Ω)` through the generator, with the closed form and optionally a Nyström solve.
pub fn t_value(p: &Profile, omega: f64, n: usize, opts: &GeneratorOptions, nystrom: Option<usize>) -> Result<TValue> {
    if n == 0 {
        return Err(SpectraError::invalid("T(n, Omega) needs n >= 1"));
    }
    let sigma = p.sigma(omega)?;
    let g1 = modes::g_n(p, omega, n, 1.0)?;
    if g1.abs() <= 1e-12 * p.kappa2().abs().max(1.0) {
        return Err(SpectraError::SingularOmega { omega, n, omega_hat: modes::omega_hat(p, n)? });
    }
    let sol = sturm::solve_generator_with(p, omega, n, opts)?;
    let nf = n as f64;
    let denom = sol.f_at_1 + sol.fprime_at_1 / (2.0 * nf);
    let beta = -sigma / denom;
    let k = 2 * n as i32 + 1;
    let integral = sol.integrate_with(|r| modes::g_reduced(p, omega, n, r) * sigma * p.mu0_unchecked(omega, r) * r.powi(k));
    let generator = beta / (2.0 * nf * g1) * integral;
    let z = zeta_from(p, &sol);
    let closed_form = 1.0 - (nf + 1.0) * z / (g1 * denom);
    let operator = match nystrom {
        Some(size) => {
            let op = operator_lab::discretize(p, omega, n, size)?;
            Some(operator_lab::t_value_operator(p, &op)?)
        }
        None => None,
    };
    Ok(TValue { n, omega, generator, closed_form, operator, zeta: z })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_limit_closed_form() {
        // F ≡ 1 when f0 is nearly constant
        let p = Profile::polynomial(&[1.0, 1e-9]).unwrap();
        let z = zeta_with(&p, 0.1, 3, &GeneratorOptions::with_grid(32, 1e-10)).unwrap();
        let expect = 0.75 * (0.1 - 1.0 / 3.0);
        assert!((z - expect).abs() < 1e-8, "{z} vs {expect}");
    }
}
