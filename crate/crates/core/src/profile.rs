//! Radial vorticity profiles `f0(r) = f̃0(r²)` and the scalar fields built on them.

use crate::error::{Result, SpectraError};
use crate::numerics::ChebGrid;
use serde::{Deserialize, Serialize};

pub const DEFAULT_VALIDATION_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Polynomial,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

/// Which side of the forbidden band `[κ1, κ2]` an angular velocity sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `Ω < κ1`, potential sign −.
    Defocusing,
    /// `Ω > κ2`, potential sign +.
    Focusing,
}

impl Regime {
    pub fn sigma(self) -> f64 {
        match self {
            Regime::Defocusing => -1.0,
            Regime::Focusing => 1.0,
        }
    }
}

/// On-disk description of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub kind: ProfileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    /// `(x, f̃0(x))` samples with `x = r²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

fn default_beta() -> f64 {
    0.5
}

/// Monotone piecewise cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let bad = |reason: &str| SpectraError::BadTable { reason: reason.to_string() };
        if xs.len() != ys.len() {
            return Err(bad("x and f values differ in length"));
        }
        if xs.len() < 2 {
            return Err(bad("at least two samples are required"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(bad("non-finite sample"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("x samples are not strictly increasing"));
        }
        if xs[0].abs() > 1e-14 || (xs[xs.len() - 1] - 1.0).abs() > 1e-14 {
            return Err(bad("x samples must span exactly [0, 1]"));
        }
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ds = vec![0.0; n];
        if n == 2 {
            ds[0] = delta[0];
            ds[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            ds[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
            ds[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(MonotoneCubic { xs, ys, ds })
    }

    fn piece(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    // power-basis coefficients in t = x - x_i
    fn cubic(&self, i: usize) -> [f64; 4] {
        let h = self.xs[i + 1] - self.xs[i];
        let delta = (self.ys[i + 1] - self.ys[i]) / h;
        let (d0, d1) = (self.ds[i], self.ds[i + 1]);
        [
            self.ys[i],
            d0,
            (3.0 * delta - 2.0 * d0 - d1) / h,
            (d0 + d1 - 2.0 * delta) / (h * h),
        ]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.piece(x);
        let c = self.cubic(i);
        let t = x - self.xs[i];
        c[0] + t * (c[1] + t * (c[2] + t * c[3]))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let i = self.piece(x);
        let c = self.cubic(i);
        let t = x - self.xs[i];
        c[1] + t * (2.0 * c[2] + t * 3.0 * c[3])
    }

    /// `½ ∫₀¹ s^q f̃(X s) ds`, exact for the piecewise cubic, `q > -1`, `X ∈ (0, 1]`.
    fn half_weighted_mean(&self, q: f64, big_x: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.xs.len() - 1 {
            let lo = self.xs[i];
            if lo >= big_x {
                break;
            }
            let hi = self.xs[i + 1].min(big_x);
            let (sa, sb) = (lo / big_x, hi / big_x);
            let c = self.cubic(i);
            // t^k = Σ_j C(k,j) (X s)^j (-x_i)^{k-j}
            for (k, ck) in c.iter().enumerate() {
                if *ck == 0.0 {
                    continue;
                }
                for j in 0..=k {
                    let coef = binom(k, j) * (-lo).powi((k - j) as i32) * big_x.powi(j as i32);
                    let p = q + j as f64 + 1.0;
                    total += ck * coef * (sb.powf(p) - sa.powf(p)) / p;
                }
            }
        }
        0.5 * total
    }

    pub fn table(&self) -> Vec<[f64; 2]> {
        self.xs.iter().zip(&self.ys).map(|(x, y)| [*x, *y]).collect()
    }
}

fn binom(k: usize, j: usize) -> f64 {
    const T: [[f64; 4]; 4] = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    T[k][j]
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() || d == 0.0 {
        // keep the end slope strictly inside (0, 3δ) so strict monotonicity survives
        0.5 * d0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Polynomial(Vec<f64>),
    Tabulated(MonotoneCubic),
}

/// Smoothness of `f̃0` as constructed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Smoothness {
    /// `f̃0` has a Lipschitz derivative, hence lies in every `C^{1,β}`.
    pub c1_lipschitz: bool,
    pub c2: bool,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub kind: ProfileKind,
    pub grid_size: usize,
    pub min_slope: f64,
    pub min_slope_at: f64,
    pub f0_min: f64,
    pub f0_max: f64,
    pub sign: Option<Sign>,
    pub smoothness: Smoothness,
    pub accepted: bool,
    pub failure: Option<SpectraError>,
}

impl ValidationReport {
    pub fn into_result(self) -> Result<ValidationReport> {
        match &self.failure {
            Some(e) => Err(e.clone()),
            None => Ok(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileConstants {
    pub kappa1: f64,
    pub kappa2: f64,
    pub amplitude: f64,
    pub f0_at_0: f64,
    pub f0_at_1: f64,
    pub f0p_at_1: f64,
}

/// Empirical constant for the two-sided bounds on `ν_Ω` and `F − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C0Estimate {
    /// `inf_r (κ2 − ∫₀¹ s f0(rs) ds)/(1 − r)`.
    pub c3: f64,
    pub slope_min: f64,
    pub slope_max: f64,
    pub c0: f64,
}

/// A validated profile: strictly increasing in `r`, one sign on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    repr: Repr,
    sign: Sign,
    beta: f64,
    kappa1: f64,
    kappa2: f64,
}

/// Check (H1)/(H2)-type hypotheses on a Chebyshev grid without failing.
fn inspect(repr: &Repr, beta: f64, grid_size: usize) -> ValidationReport {
    let kind = match repr {
        Repr::Polynomial(_) => ProfileKind::Polynomial,
        Repr::Tabulated(_) => ProfileKind::Tabulated,
    };
    let smoothness = Smoothness {
        c1_lipschitz: true,
        c2: kind == ProfileKind::Polynomial,
        beta,
    };
    let grid = ChebGrid::new(grid_size.max(3), 0.0, 1.0);
    let mut min_slope = f64::INFINITY;
    let mut min_slope_at = 0.0;
    let mut f0_min = f64::INFINITY;
    let mut f0_max = f64::NEG_INFINITY;
    for &r in grid.nodes() {
        let s = 2.0 * tilde_prime(repr, r * r);
        if s < min_slope {
            min_slope = s;
            min_slope_at = r;
        }
        let v = tilde(repr, r * r);
        f0_min = f0_min.min(v);
        f0_max = f0_max.max(v);
    }
    let sign = if f0_min > 0.0 {
        Some(Sign::Positive)
    } else if f0_max < 0.0 {
        Some(Sign::Negative)
    } else {
        None
    };
    let failure = if !(min_slope > 0.0) || !min_slope.is_finite() {
        Some(SpectraError::NonMonotone { min_slope, at: min_slope_at })
    } else if sign.is_none() {
        Some(SpectraError::SignChange { f0_at_0: tilde(repr, 0.0), f0_at_1: tilde(repr, 1.0) })
    } else if !(beta > 0.0 && beta < 1.0) {
        Some(SpectraError::invalid(format!("beta = {beta} must lie in (0, 1)")))
    } else {
        None
    };
    ValidationReport {
        kind,
        grid_size,
        min_slope,
        min_slope_at,
        f0_min,
        f0_max,
        sign,
        smoothness,
        accepted: failure.is_none(),
        failure,
    }
}

fn tilde(repr: &Repr, x: f64) -> f64 {
    match repr {
        Repr::Polynomial(c) => c.iter().rev().fold(0.0, |acc, ck| acc * x + ck),
        Repr::Tabulated(t) => t.eval(x),
    }
}

fn tilde_prime(repr: &Repr, x: f64) -> f64 {
    match repr {
        Repr::Polynomial(c) => c
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, ck)| acc * x + k as f64 * ck),
        Repr::Tabulated(t) => t.derivative(x),
    }
}

fn build_repr(config: &ProfileConfig) -> Result<Repr> {
    match config.kind {
        ProfileKind::Polynomial => {
            let c = config
                .coeffs
                .clone()
                .ok_or_else(|| SpectraError::invalid("polynomial profile needs `coeffs`"))?;
            if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                return Err(SpectraError::invalid("coefficients must be finite and non-empty"));
            }
            Ok(Repr::Polynomial(c))
        }
        ProfileKind::Tabulated => {
            let t = config.table.as_ref().ok_or_else(|| SpectraError::BadTable {
                reason: "tabulated profile needs `table`".into(),
            })?;
            let xs = t.iter().map(|p| p[0]).collect();
            let ys = t.iter().map(|p| p[1]).collect();
            Ok(Repr::Tabulated(MonotoneCubic::new(xs, ys)?))
        }
    }
}

/// Validation report for a raw config, returned even when the profile is rejected.
pub fn inspect_config(config: &ProfileConfig, grid_size: usize) -> Result<ValidationReport> {
    if grid_size < 16 {
        return Err(SpectraError::invalid("validation grid needs at least 16 points"));
    }
    let repr = build_repr(config)?;
    Ok(inspect(&repr, config.beta, grid_size))
}

/// Validate a config, failing with the first violated hypothesis.
pub fn validate_hypotheses(config: &ProfileConfig, grid_size: usize) -> Result<ValidationReport> {
    inspect_config(config, grid_size)?.into_result()
}

impl Profile {
    pub fn from_config(config: &ProfileConfig) -> Result<Self> {
        Self::from_config_with_grid(config, DEFAULT_VALIDATION_GRID)
    }

    pub fn from_config_with_grid(config: &ProfileConfig, grid_size: usize) -> Result<Self> {
        let report = validate_hypotheses(config, grid_size)?;
        let repr = build_repr(config)?;
        let sign = report.sign.expect("accepted report carries a sign");
        let mut p = Profile { repr, sign, beta: config.beta, kappa1: 0.0, kappa2: 0.0 };
        p.kappa1 = 0.5 * p.f0(0.0);
        p.kappa2 = p.inner_mean(1.0);
        Ok(p)
    }

    /// `f0(r) = Σ c_k r^{2k}`.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        Self::from_config(&ProfileConfig {
            kind: ProfileKind::Polynomial,
            coeffs: Some(coeffs.to_vec()),
            table: None,
            beta: default_beta(),
        })
    }

    /// Samples `(x, f̃0(x))` with `x = r²` covering `[0, 1]`.
    pub fn tabulated(table: &[[f64; 2]]) -> Result<Self> {
        Self::from_config(&ProfileConfig {
            kind: ProfileKind::Tabulated,
            coeffs: None,
            table: Some(table.to_vec()),
            beta: default_beta(),
        })
    }

    pub fn config(&self) -> ProfileConfig {
        match &self.repr {
            Repr::Polynomial(c) => ProfileConfig {
                kind: ProfileKind::Polynomial,
                coeffs: Some(c.clone()),
                table: None,
                beta: self.beta,
            },
            Repr::Tabulated(t) => ProfileConfig {
                kind: ProfileKind::Tabulated,
                coeffs: None,
                table: Some(t.table()),
                beta: self.beta,
            },
        }
    }

    pub fn kind(&self) -> ProfileKind {
        match self.repr {
            Repr::Polynomial(_) => ProfileKind::Polynomial,
            Repr::Tabulated(_) => ProfileKind::Tabulated,
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    /// Re-run the hypothesis checks on a grid of the given size.
    pub fn validate(&self, grid_size: usize) -> Result<ValidationReport> {
        if grid_size < 16 {
            return Err(SpectraError::invalid("validation grid needs at least 16 points"));
        }
        inspect(&self.repr, self.beta, grid_size).into_result()
    }

    pub fn f0_tilde(&self, x: f64) -> f64 {
        tilde(&self.repr, x)
    }

    pub fn f0_tilde_prime(&self, x: f64) -> f64 {
        tilde_prime(&self.repr, x)
    }

    pub fn f0(&self, r: f64) -> f64 {
        self.f0_tilde(r * r)
    }

    /// `f0′(r)/r = 2 f̃0′(r²)`, regular at `r = 0`.
    pub fn slope(&self, r: f64) -> f64 {
        2.0 * self.f0_tilde_prime(r * r)
    }

    pub fn f0_prime(&self, r: f64) -> f64 {
        r * self.slope(r)
    }

    /// `M_p(r) = ∫₀¹ u^p f0(r u) du` for `p > -1`.
    pub fn moment(&self, p: f64, r: f64) -> f64 {
        match &self.repr {
            Repr::Polynomial(c) => {
                let r2 = r * r;
                let mut pow = 1.0;
                let mut s = 0.0;
                for (k, ck) in c.iter().enumerate() {
                    s += ck * pow / (p + 2.0 * k as f64 + 1.0);
                    pow *= r2;
                }
                s
            }
            Repr::Tabulated(t) => {
                let big_x = r * r;
                if big_x == 0.0 {
                    t.eval(0.0) / (p + 1.0)
                } else {
                    // u = sqrt(s): ∫ u^p f̃(r²u²) du = ½ ∫ s^{(p-1)/2} f̃(r² s) ds
                    t.half_weighted_mean(0.5 * (p - 1.0), big_x)
                }
            }
        }
    }

    /// `∫₀¹ s f0(r s) ds`.
    pub fn inner_mean(&self, r: f64) -> f64 {
        self.moment(1.0, r)
    }

    pub fn constants(&self) -> ProfileConstants {
        let f0_at_0 = self.f0(0.0);
        let f0_at_1 = self.f0(1.0);
        ProfileConstants {
            kappa1: self.kappa1,
            kappa2: self.kappa2,
            amplitude: f0_at_1 / f0_at_0,
            f0_at_0,
            f0_at_1,
            f0p_at_1: self.f0_prime(1.0),
        }
    }

    /// Side of the forbidden band, or `ForbiddenOmega` inside `[κ1, κ2]`.
    pub fn regime(&self, omega: f64) -> Result<Regime> {
        if omega < self.kappa1 {
            Ok(Regime::Defocusing)
        } else if omega > self.kappa2 {
            Ok(Regime::Focusing)
        } else {
            Err(SpectraError::ForbiddenOmega { omega, kappa1: self.kappa1, kappa2: self.kappa2 })
        }
    }

    pub fn sigma(&self, omega: f64) -> Result<f64> {
        self.regime(omega).map(Regime::sigma)
    }

    /// `μ⁰_Ω(r) = (f0′(r)/r)/(Ω − ∫₀¹ s f0(rs) ds)`.
    pub fn mu0(&self, omega: f64, r: f64) -> Result<f64> {
        self.regime(omega)?;
        Ok(self.mu0_unchecked(omega, r))
    }

    pub(crate) fn mu0_unchecked(&self, omega: f64, r: f64) -> f64 {
        self.slope(r) / (omega - self.inner_mean(r))
    }

    /// `ν_Ω = σ_Ω μ⁰_Ω = |μ⁰_Ω|`.
    pub fn nu(&self, omega: f64, r: f64) -> Result<f64> {
        let s = self.sigma(omega)?;
        Ok(s * self.mu0_unchecked(omega, r))
    }

    /// Fit of the constant in `ν ≤ C0 (f0′/r)/((Ω−κ2)^θ (1−r)^{1−θ})` and related bounds.
    pub fn empirical_c0(&self, grid_size: usize) -> C0Estimate {
        let grid = ChebGrid::new(grid_size.max(16), 0.0, 1.0);
        let mut c3 = f64::INFINITY;
        let mut slope_min = f64::INFINITY;
        let mut slope_max: f64 = 0.0;
        for &r in grid.nodes() {
            let s = self.slope(r);
            slope_min = slope_min.min(s);
            slope_max = slope_max.max(s);
            if r < 1.0 {
                c3 = c3.min((self.kappa2 - self.inner_mean(r)) / (1.0 - r));
            }
        }
        // the r → 1 limit of the difference quotient is f0(1) - 2κ2
        c3 = c3.min(self.f0(1.0) - 2.0 * self.kappa2);
        let c0_nu = (1.0 / c3).max(1.0);
        C0Estimate {
            c3,
            slope_min,
            slope_max,
            c0: (c0_nu * slope_max).max(16.0 / slope_min),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pchip_reproduces_line() {
        let t = MonotoneCubic::new(vec![0.0, 0.3, 1.0], vec![1.0, 1.6, 3.0]).unwrap();
        assert!((t.eval(0.5) - 2.0).abs() < 1e-15);
        assert!((t.derivative(0.9) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tabulated_moment_exact_for_line() {
        // f̃0(x) = 1 + x reproduces f0 = 1 + r²
        let p = Profile::tabulated(&[[0.0, 1.0], [0.4, 1.4], [1.0, 2.0]]).unwrap();
        assert!((p.inner_mean(0.5) - 0.5625).abs() < 1e-14);
        assert!((p.moment(7.0, 0.8) - (1.0 / 8.0 + 0.64 / 10.0)).abs() < 1e-14);
        assert!((p.kappa2() - 0.75).abs() < 1e-14);
    }
}
