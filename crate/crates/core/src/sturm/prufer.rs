use crate::error::{Result, SpectraError};
use crate::numerics::ode::{dopri5, OdeOptions};
use crate::numerics::{bisect_secant, ChebGrid};
use crate::profile::Profile;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

pub const Y_MAX_CAP: f64 = 1e6;

/// Phase and amplitude of the mode-zero solution along `y = 1/(1−r)`.
///
/// `G(y) = ρ sin θ` and `(y²−y) G′(y) = ρ cos θ`, which is `r F′(r)` in the radial variable.
#[derive(Debug, Clone, Serialize)]
pub struct PruferTrace {
    pub omega: f64,
    pub y_nodes: Vec<f64>,
    pub theta: Vec<f64>,
    pub rho: Vec<f64>,
    /// `θ` at `r = 1`, the `y → ∞` limit.
    pub theta_bar: f64,
    /// Majorant of `θ̄ − θ(Y_max)` from `θ′ ≤ 1/(y²−y) + ν_max/y²`.
    pub tail_bound: f64,
    pub y_max: f64,
    pub nu_max: f64,
}

fn nu_max(p: &Profile, omega: f64) -> f64 {
    let g = ChebGrid::new(65, 0.0, 1.0);
    g.nodes().iter().map(|&r| p.mu0_unchecked(omega, r)).fold(0.0, f64::max)
}

fn tail(y: f64, nu_max: f64) -> f64 {
    (y / (y - 1.0)).ln() + nu_max / y
}

/// Integrate the Prüfer system for `Ω > κ2`.
pub fn prufer_trace(p: &Profile, omega: f64, tol: f64) -> Result<PruferTrace> {
    if !(omega > p.kappa2()) {
        return Err(SpectraError::ForbiddenOmega { omega, kappa1: p.kappa1(), kappa2: p.kappa2() });
    }
    if !(tol > 0.0) {
        return Err(SpectraError::invalid("tolerance must be positive"));
    }
    let nmax = nu_max(p, omega);
    let mut y_max = 2.0;
    while y_max < Y_MAX_CAP && tail(y_max, nmax) >= tol {
        y_max *= 2.0;
    }
    let y_max = y_max.min(Y_MAX_CAP);

    let opts = OdeOptions {
        rtol: (0.01 * tol).clamp(1e-13, 1e-9),
        atol: (0.01 * tol).clamp(1e-14, 1e-10),
        h0: 1e-4,
        max_steps: 500_000,
    };
    let rhs = |r: f64, s: &[f64; 2]| {
        let (sn, cs) = s[0].sin_cos();
        let nu = p.mu0_unchecked(omega, r);
        [cs * cs / r + r * nu * sn * sn, (1.0 / r - r * nu) * sn * cs]
    };
    let r0 = 1e-4;
    let nu0 = p.mu0_unchecked(omega, 0.0);
    let mut state = [FRAC_PI_2 + 0.5 * nu0 * r0 * r0, -0.25 * nu0 * r0 * r0];
    let mut y_nodes = vec![1.0];
    let mut theta = vec![FRAC_PI_2];
    let mut rho = vec![1.0];
    let mut start = r0;
    let mut y_check = 2.0;
    loop {
        let end = 1.0 - 1.0 / y_check;
        state = dopri5(rhs, start, state, end, opts, |r, s| {
            if r > start || r == r0 {
                y_nodes.push(1.0 / (1.0 - r));
                theta.push(s[0]);
                rho.push(s[1].exp());
            }
        })?;
        start = end;
        if y_check >= y_max {
            break;
        }
        y_check *= 2.0;
    }
    let at_ymax = state[0];
    let last = dopri5(rhs, start, state, 1.0, opts, |_, _| {})?;
    let theta_bar = last[0];
    let tail_bound = tail(y_max, nmax);
    let increment = theta_bar - at_ymax;
    if !theta_bar.is_finite() || increment > tail_bound * (1.0 + 1e-6) + 1e-12 {
        return Err(SpectraError::TailNotConverged { bound: tail_bound, y_max });
    }
    Ok(PruferTrace { omega, y_nodes, theta, rho, theta_bar, tail_bound, y_max, nu_max: nmax })
}

/// `y² V_Ω(y) = ¼ y²/(y²−y)² + ν_Ω(1 − 1/y)/y²`.
pub fn kneser_margin(p: &Profile, omega: f64, y: f64) -> Result<f64> {
    if !(omega >= p.kappa2()) {
        return Err(SpectraError::ForbiddenOmega { omega, kappa1: p.kappa1(), kappa2: p.kappa2() });
    }
    if !(y > 1.0) {
        return Err(SpectraError::invalid(format!("Kneser margin needs y > 1, got {y}")));
    }
    let d = y * y - y;
    let nu = p.mu0_unchecked(omega, 1.0 - 1.0 / y);
    Ok(0.25 * y * y / (d * d) + nu / (y * y))
}

/// Angular velocities in the window where `θ̄(Ω)` crosses a multiple of π.
pub fn mode0_exceptional_set(p: &Profile, window: (f64, f64), grid: usize, tol: f64) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(lo > p.kappa2()) {
        return Err(SpectraError::ForbiddenOmega { omega: lo, kappa1: p.kappa1(), kappa2: p.kappa2() });
    }
    if !(hi > lo) || grid < 2 {
        return Err(SpectraError::invalid("window must be increasing with at least two samples"));
    }
    let phase_tol = 1e-9;
    let omegas: Vec<f64> = (0..grid).map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64).collect();
    let bars = omegas
        .iter()
        .map(|&o| prufer_trace(p, o, phase_tol).map(|t| t.theta_bar))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..grid - 1 {
        let (a, b) = (bars[i], bars[i + 1]);
        let k_lo = (a.min(b) / PI).floor() as i64 + 1;
        let k_hi = (a.max(b) / PI).floor() as i64;
        for k in k_lo..=k_hi {
            let target = k as f64 * PI;
            let f = |o: f64| prufer_trace(p, o, phase_tol).map(|t| t.theta_bar - target);
            let root = bisect_secant(f, omegas[i], omegas[i + 1], a - target, b - target, tol, 0)?;
            out.push(root.x);
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
