//! Kernel generator `h*_m`, range density, the transversality integral `I_m` and the constant `κ`.

use crate::dispersion;
use crate::error::{Result, SpectraError};
use crate::modes;
use crate::numerics::ode::{dopri5, OdeOptions};
use crate::numerics::{integrate, GaussLegendre, QuadOptions};
use crate::profile::{Profile, Sign};
use crate::sturm::{self, GeneratorOptions, GeneratorSolution};
use serde::Serialize;

/// `h*_m` on the generator grid together with its self-checks.
#[derive(Debug, Clone, Serialize)]
pub struct KernelGenerator {
    pub m: usize,
    pub omega_m: f64,
    pub grid: Vec<f64>,
    pub h_star: Vec<f64>,
    /// `−H_m[h*](1)/G_m(1)`, expected `1/(2(m+1))`.
    pub normalization_check: f64,
    /// Sup over `r` of the kernel-equation defect divided by `r^m`.
    pub kernel_residual: f64,
    /// Sup gap between `h*/(r^m μ⁰)` and a Dormand–Prince solve of its inhomogeneous ODE.
    pub ode_check: f64,
    pub zeta_residual: f64,
    #[serde(skip)]
    sol: GeneratorSolution,
    /// `∫_r^1 J/F² ds` on the generator grid.
    #[serde(skip)]
    outer: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaConstant {
    pub kappa: f64,
    pub kappa_laplace: f64,
    /// `μ = −f0(1)/∫₀¹ s² f0′(s) ds`.
    pub mu: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransversalityReport {
    pub m: usize,
    pub omega_m: f64,
    #[serde(rename = "I_m")]
    pub i_m: f64,
    pub parts: (f64, f64, f64),
    pub kappa: Option<f64>,
    pub kappa_laplace: Option<f64>,
    pub verdict: bool,
    pub error_bar: f64,
    /// `|I_{m,3}|/(|I_{m,1}| + |I_{m,2}|)`.
    pub dominance: f64,
    /// `I_{m,3} m (Ω_m − Ω̂_m) / (f0′(1)(κ − ½))`, abundance only; tends to 1.
    pub asymptotic_ratio: Option<f64>,
}

impl KernelGenerator {
    pub fn generator(&self) -> &GeneratorSolution {
        &self.sol
    }

    /// `K(r) = ∫_r^1 (1/(F² s^{2m+1})) ∫₀^s F τ^{2m+1}(Ω_m − f0/2) dτ ds`.
    pub fn outer_integral(&self, r: f64) -> f64 {
        sturm::generator::interpolate_on(&self.sol, &self.outer, r)
    }

    /// `h*_m(r) = −r^m F μ⁰ K(r)`.
    pub fn eval(&self, p: &Profile, r: f64) -> f64 {
        -r.powi(self.m as i32) * self.reduced(p, r)
    }

    /// `h*_m(r)/r^m`.
    fn reduced(&self, p: &Profile, r: f64) -> f64 {
        -self.sol.eval(r) * p.mu0_unchecked(self.omega_m, r) * self.outer_integral(r)
    }

    /// `(H_{m,1}, H_{m,2}, H_{m,3})` at `r`.
    pub fn transversality_parts(&self, p: &Profile, r: f64) -> Result<(f64, f64, f64)> {
        let m = self.m;
        let g1 = modes::g_n(p, self.omega_m, m, 1.0)?;
        let mf = m as f64;
        let h1 = -4.0 * (mf + 1.0) * self.sol.eval(r) * self.outer_integral(r) / (self.omega_m - p.inner_mean(r));
        let h2 = -r * r;
        let h3 = modes::g_reduced(p, self.omega_m, m, r) / g1;
        Ok((h1, h2, h3))
    }

    /// `d*_m(r) = r^m (H_{m,1} + H_{m,2} + H_{m,3}) / (4(m+1))`.
    pub fn d_star(&self, p: &Profile, r: f64) -> Result<f64> {
        let (a, b, c) = self.transversality_parts(p, r)?;
        Ok(r.powi(self.m as i32) * (a + b + c) / (4.0 * (self.m as f64 + 1.0)))
    }
}

fn root_check(p: &Profile, m: usize, omega_m: f64, opts: &GeneratorOptions) -> Result<(GeneratorSolution, f64)> {
    if m == 0 {
        return Err(SpectraError::invalid("mode index m must be at least 1"));
    }
    let sol = sturm::solve_generator_with(p, omega_m, m, opts)?;
    let z = dispersion::zeta_from(p, &sol).abs();
    if z > opts.tol {
        return Err(SpectraError::NotARoot { omega: omega_m, residual: z, tol: opts.tol });
    }
    Ok((sol, z))
}

/// Build `h*_m` at a dispersion root by nested quadrature on the generator grid.
pub fn kernel_generator(p: &Profile, m: usize, omega_m: f64, opts: &GeneratorOptions) -> Result<KernelGenerator> {
    let (sol, zeta_residual) = root_check(p, m, omega_m, opts)?;
    let xg = sol.xgrid().clone();
    let k = 2 * m as i32 + 1;
    let rule = GaussLegendre::new(m + sol.grid_len() / 4 + 40);
    let (us, ws) = rule.on(0.0, 1.0);
    // φ(r²) = J(r)/(r F(r)²), smooth in x = r²
    let phi: Vec<f64> = sol
        .grid
        .iter()
        .zip(&sol.f)
        .map(|(&r, &f)| {
            let inner: f64 = us
                .iter()
                .zip(&ws)
                .map(|(&u, &w)| w * u.powi(k) * (omega_m - 0.5 * p.f0(r * u)) * sol.eval(r * u))
                .sum();
            inner / (f * f)
        })
        .collect();
    let outer: Vec<f64> = xg.cumulative_to_end(&phi).into_iter().map(|v| 0.5 * v).collect();
    let mut kg = KernelGenerator {
        m,
        omega_m,
        grid: sol.grid.clone(),
        h_star: Vec::new(),
        normalization_check: 0.0,
        kernel_residual: 0.0,
        ode_check: 0.0,
        zeta_residual,
        sol,
        outer,
    };
    kg.h_star = kg.grid.iter().map(|&r| kg.eval(p, r)).collect();
    *kg.h_star.last_mut().unwrap() = 0.0;

    let g1 = modes::g_n(p, omega_m, m, 1.0)?;
    let h_at_1 = -kg.sol.integrate_with(|s| s.powi(k) * p.mu0_unchecked(omega_m, s) * kg.outer_integral(s));
    kg.normalization_check = -h_at_1 / g1;
    kg.kernel_residual = kernel_residual(p, &kg, h_at_1, g1);
    kg.ode_check = ode_check(p, &kg)?;
    Ok(kg)
}

fn kernel_residual(p: &Profile, kg: &KernelGenerator, h_at_1: f64, g1: f64) -> f64 {
    let m = kg.m;
    let mf = m as f64;
    let omega = kg.omega_m;
    let q = m + kg.sol.grid_len() / 4 + 40;
    let rule = GaussLegendre::new(q);
    let (us, ws) = rule.on(0.0, 1.0);
    let k = 2 * m as i32 + 1;
    let checks = 40;
    let mut worst: f64 = 0.0;
    for j in 0..=checks {
        let r = (j as f64 + 0.5).min(checks as f64) / checks as f64;
        let eta = kg.reduced(p, r);
        let (ss, sw) = rule.on(r, 1.0);
        let outer: f64 = ss.iter().zip(&sw).map(|(&s, &w)| w * s * kg.reduced(p, s)).sum();
        let inner: f64 = us.iter().zip(&ws).map(|(&u, &w)| w * u.powi(k) * kg.reduced(p, r * u)).sum();
        let mu = p.mu0_unchecked(omega, r);
        let res = eta - mu / (2.0 * mf) * (outer + r * r * inner)
            + h_at_1 / (2.0 * mf * g1) * mu * modes::g_reduced(p, omega, m, r);
        worst = worst.max(res.abs());
    }
    worst
}

/// `y = h*/(r^m μ⁰)` must solve `y″ + (2m+1)/r y′ + μ⁰ y = Ω_m − f0/2` with `y(1) = 0`.
fn ode_check(p: &Profile, kg: &KernelGenerator) -> Result<f64> {
    let omega = kg.omega_m;
    let c = 2.0 * kg.m as f64 + 1.0;
    let mu00 = p.mu0_unchecked(omega, 0.0);
    let c0 = -kg.outer_integral(0.0);
    let c2 = (omega - 0.5 * p.f0(0.0) - mu00 * c0) / (4.0 * (kg.m as f64 + 1.0));
    let r0 = 1e-3;
    let y0 = [c0 + c2 * r0 * r0, 2.0 * c2 * r0];
    let opts = OdeOptions { rtol: 1e-11, atol: 1e-13, h0: 1e-4, max_steps: 200_000 };
    let mut worst: f64 = 0.0;
    let last = dopri5(
        |r, y: &[f64; 2]| [y[1], omega - 0.5 * p.f0(r) - c / r * y[1] - p.mu0_unchecked(omega, r) * y[0]],
        r0,
        y0,
        1.0,
        opts,
        |r, y| {
            let target = -kg.sol.eval(r) * kg.outer_integral(r);
            worst = worst.max((y[0] - target).abs());
        },
    )?;
    Ok(worst.max(last[0].abs()))
}

/// Radial part `ν F r^m` of the range density.
pub fn range_density(p: &Profile, sol: &GeneratorSolution, r: f64) -> Result<f64> {
    Ok(p.nu(sol.omega, r)? * sol.eval(r) * r.powi(sol.n as i32))
}

/// `∫₀¹ ν F r^{m+1} d(r) dr`; zero exactly when `d cos(mθ)` lies in the range.
pub fn range_membership<D: Fn(f64) -> f64>(p: &Profile, sol: &GeneratorSolution, d: D) -> Result<f64> {
    let sigma = p.sigma(sol.omega)?;
    let k = sol.n as i32 + 1;
    Ok(sol.integrate_with(|r| sigma * p.mu0_unchecked(sol.omega, r) * r.powi(k) * d(r)))
}

fn kappa_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 4000 }
}

/// `κ` by the direct integral and by its Laplace representation.
pub fn kappa_constant(p: &Profile) -> Result<KappaConstant> {
    let s = integrate(|r| r * r * r * p.slope(r), 0.0, 1.0, kappa_opts())?.value;
    let f1 = p.f0(1.0);
    let mu = -f1 / s;
    if !(mu > 0.0) || p.sign() != Sign::Negative {
        return Err(SpectraError::WrongRegime { expected: "negative profile with mu > 0".into() });
    }
    // r = e^{−t}, t = u/(1−u): the logarithmic approach to r = 0 becomes a smooth decay at u = 1
    let direct = integrate(
        |u| {
            if u >= 1.0 {
                return 0.0;
            }
            let t = u / (1.0 - u);
            (-t).exp() / ((f1 - s * t) * (1.0 - u) * (1.0 - u))
        },
        0.0,
        1.0,
        kappa_opts(),
    )?
    .value;
    let kappa = 1.0 - 0.5 * f1 * direct;
    // τ = u/(1−u) maps (0, ∞) to (0, 1) and cancels the (1+τ)² factor
    let laplace = integrate(|u| if u >= 1.0 { 0.0 } else { (-mu * u / (1.0 - u)).exp() }, 0.0, 1.0, kappa_opts())?.value;
    Ok(KappaConstant { kappa, kappa_laplace: 0.5 + 0.5 * laplace, mu })
}

/// Assemble `I_m = I_{m,1} + I_{m,2} + I_{m,3}` at a dispersion root.
pub fn transversality(p: &Profile, m: usize, omega_m: f64, opts: &GeneratorOptions) -> Result<TransversalityReport> {
    let kg = kernel_generator(p, m, omega_m, opts)?;
    transversality_from(p, &kg)
}

pub fn transversality_from(p: &Profile, kg: &KernelGenerator) -> Result<TransversalityReport> {
    let m = kg.m;
    let omega = kg.omega_m;
    let sigma = p.sigma(omega)?;
    let k = 2 * m as i32 + 1;
    let sol = &kg.sol;
    let g1 = modes::g_n(p, omega, m, 1.0)?;
    let weight = |r: f64| sigma * p.mu0_unchecked(omega, r) * r.powi(k);
    let h1 = |r: f64| -4.0 * (m as f64 + 1.0) * sol.eval(r) * kg.outer_integral(r) / (omega - p.inner_mean(r));
    let h2 = |r: f64| -r * r;
    let h3 = |r: f64| modes::g_reduced(p, omega, m, r) / g1;
    let fine = sol.grid_len() / 4 + m + 48;
    let coarse = sol.grid_len() / 4 + m + 24;
    let pair = |h: &dyn Fn(f64) -> f64| {
        let a = sol.integrate_with_points(|r| weight(r) * h(r), fine);
        let b = sol.integrate_with_points(|r| weight(r) * h(r), coarse);
        (a, (a - b).abs())
    };
    let (i1, e1) = pair(&h1);
    let (i2, e2) = pair(&h2);
    let (i3, e3) = pair(&h3);
    let i_m = i1 + i2 + i3;
    let scale = i1.abs() + i2.abs() + i3.abs();
    let error_bar = e1 + e2 + e3 + (sol.residual + kg.kernel_residual + 1e-14) * scale;
    if !i_m.is_finite() {
        return Err(SpectraError::QuadratureFailure { a: 0.0, b: 1.0, estimate: i_m });
    }
    let kappa = if p.sign() == Sign::Negative { Some(kappa_constant(p)?) } else { None };
    let asymptotic_ratio = match kappa {
        Some(kc) if omega > p.kappa2() => {
            let oh = modes::omega_hat(p, m)?;
            Some(i3 * m as f64 * (omega - oh) / (p.f0_prime(1.0) * (kc.kappa - 0.5)))
        }
        _ => None,
    };
    Ok(TransversalityReport {
        m,
        omega_m: omega,
        i_m,
        parts: (i1, i2, i3),
        kappa: kappa.map(|k| k.kappa),
        kappa_laplace: kappa.map(|k| k.kappa_laplace),
        verdict: i_m.abs() > 10.0 * error_bar,
        error_bar,
        dominance: i3.abs() / (i1.abs() + i2.abs()),
        asymptotic_ratio,
    })
}
