use serde::Serialize;
use vortex_spectra::dispersion::{self, ScanOptions, DEFAULT_ALPHA};
use vortex_spectra::sturm::{self, GeneratorOptions};
use vortex_spectra::{modes, Profile, Result, Sign};
use wasm_bindgen::prelude::*;

const GRID: usize = 64;

#[derive(Serialize)]
struct Summary {
    kappa1: f64,
    kappa2: f64,
    amplitude: f64,
    sign: Sign,
    omega_hat: Vec<f64>,
    scarcity_bound: Option<f64>,
}

#[derive(Serialize)]
struct Curve {
    m: usize,
    window: (f64, f64),
    omega: Vec<f64>,
    zeta: Vec<f64>,
    roots: Vec<f64>,
}

#[derive(Serialize)]
struct GeneratorPlot {
    r: Vec<f64>,
    f: Vec<f64>,
    f_at_1: f64,
    residual: f64,
}

#[derive(Serialize)]
struct PhasePlot {
    omega: Vec<f64>,
    theta_bar_over_pi: Vec<f64>,
    exceptional: Vec<f64>,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plot data serializes")
}

/// Constants and the first ten singular angular velocities.
pub fn summary_json(coeffs: &[f64]) -> Result<String> {
    let p = Profile::polynomial(coeffs)?;
    let c = p.constants();
    let omega_hat = (1..=10).map(|n| modes::omega_hat(&p, n)).collect::<Result<Vec<_>>>()?;
    Ok(json(&Summary {
        kappa1: c.kappa1,
        kappa2: c.kappa2,
        amplitude: c.amplitude,
        sign: p.sign(),
        omega_hat,
        scarcity_bound: (p.sign() == Sign::Positive).then(|| dispersion::scarcity_bound(&p)),
    }))
}

/// `ζ_m` across the regime window picked by the profile sign.
pub fn dispersion_json(coeffs: &[f64], m: usize, samples: usize) -> Result<String> {
    let p = Profile::polynomial(coeffs)?;
    let mut o = ScanOptions::with_tol(1e-10);
    o.generator.grid = GRID;
    o.samples = samples.clamp(3, 400);
    let scan = match p.sign() {
        Sign::Positive => dispersion::scan_scarcity(&p, m, &o)?,
        Sign::Negative => dispersion::scan_abundance(&p, m, DEFAULT_ALPHA, &o)?,
    };
    Ok(json(&Curve {
        m: scan.n,
        window: scan.window,
        omega: scan.omega_samples,
        zeta: scan.zeta_values,
        roots: scan.roots.iter().map(|r| r.omega).collect(),
    }))
}

/// `F_{n,Ω}` sampled on a uniform r grid.
pub fn generator_json(coeffs: &[f64], omega: f64, n: usize, points: usize) -> Result<String> {
    let p = Profile::polynomial(coeffs)?;
    let sol = sturm::solve_generator_with(&p, omega, n, &GeneratorOptions::with_grid(GRID, 1e-10))?;
    let points = points.clamp(2, 2000);
    let r: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let f = r.iter().map(|&x| sol.eval(x)).collect();
    Ok(json(&GeneratorPlot { r, f, f_at_1: sol.f_at_1, residual: sol.residual }))
}

/// `θ̄(Ω)/π` on `[lo, hi]` above `κ2` and its crossings of the integers.
pub fn phase_json(coeffs: &[f64], lo: f64, hi: f64, samples: usize) -> Result<String> {
    let p = Profile::polynomial(coeffs)?;
    let samples = samples.clamp(2, 200);
    let omega: Vec<f64> = (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect();
    let theta_bar_over_pi = omega
        .iter()
        .map(|&o| sturm::prufer_trace(&p, o, 1e-8).map(|t| t.theta_bar / std::f64::consts::PI))
        .collect::<Result<Vec<_>>>()?;
    let exceptional = sturm::mode0_exceptional_set(&p, (lo, hi), samples, 1e-9)?;
    Ok(json(&PhasePlot { omega, theta_bar_over_pi, exceptional }))
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn summary(coeffs: Vec<f64>) -> std::result::Result<String, JsError> {
    js(summary_json(&coeffs))
}

#[wasm_bindgen]
pub fn dispersion_curve(coeffs: Vec<f64>, m: u32, samples: u32) -> std::result::Result<String, JsError> {
    js(dispersion_json(&coeffs, m as usize, samples as usize))
}

#[wasm_bindgen]
pub fn generator_profile(coeffs: Vec<f64>, omega: f64, n: u32, points: u32) -> std::result::Result<String, JsError> {
    js(generator_json(&coeffs, omega, n as usize, points as usize))
}

#[wasm_bindgen]
pub fn mode0_phase(coeffs: Vec<f64>, lo: f64, hi: f64, samples: u32) -> std::result::Result<String, JsError> {
    js(phase_json(&coeffs, lo, hi, samples as usize))
}
