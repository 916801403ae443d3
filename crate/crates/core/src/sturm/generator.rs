use crate::error::{Result, SpectraError};
use crate::numerics::cheb::barycentric;
use crate::numerics::ode::{dopri5, OdeOptions};
use crate::numerics::{ChebGrid, GaussLegendre};
use crate::profile::{Profile, Regime};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub const DEFAULT_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorOptions {
    /// Number of Chebyshev nodes (in `x = r²`).
    pub grid: usize,
    pub tol: f64,
    /// Gauss–Legendre points in the substituted variable; `None` picks from `n` and `grid`.
    pub quad_points: Option<usize>,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions { grid: DEFAULT_GRID, tol: 1e-10, quad_points: None }
    }
}

impl GeneratorOptions {
    pub fn with_grid(grid: usize, tol: f64) -> Self {
        GeneratorOptions { grid, tol, quad_points: None }
    }

    fn points(&self, n: usize) -> usize {
        self.quad_points.unwrap_or(n + self.grid / 4 + 32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Picard,
    Collocation,
}

/// `F_{n,Ω}` on a radial grid with its derivative and residual metadata.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorSolution {
    pub n: usize,
    pub omega: f64,
    pub regime: Regime,
    pub grid: Vec<f64>,
    #[serde(rename = "F")]
    pub f: Vec<f64>,
    #[serde(rename = "Fprime")]
    pub fprime: Vec<f64>,
    #[serde(rename = "F_at_1")]
    pub f_at_1: f64,
    #[serde(rename = "Fprime_at_1")]
    pub fprime_at_1: f64,
    pub residual: f64,
    pub method: SolveMethod,
    /// Measured contraction factor of the Picard map (`‖A‖∞` when Picard was skipped).
    pub lipschitz: f64,
    /// Whether `F` is monotone node to node in the direction the regime predicts.
    pub monotone: bool,
    #[serde(skip)]
    xgrid: ChebGrid,
    #[serde(skip)]
    quad: usize,
}

impl GeneratorSolution {
    /// `F(r)` by barycentric interpolation in `r²`.
    pub fn eval(&self, r: f64) -> f64 {
        self.xgrid.interpolate(&self.f, r * r)
    }

    pub fn eval_prime(&self, r: f64) -> f64 {
        self.xgrid.interpolate(&self.fprime, r * r)
    }

    pub fn grid_len(&self) -> usize {
        self.grid.len()
    }

    pub(crate) fn xgrid(&self) -> &ChebGrid {
        &self.xgrid
    }

    /// `∫₀¹ g(s) F(s) ds` with a Gauss–Legendre rule sized for this solution.
    pub fn integrate_with<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.integrate_with_points(g, self.quad + 16)
    }

    pub fn integrate_with_points<G: Fn(f64) -> f64>(&self, g: G, points: usize) -> f64 {
        let rule = GaussLegendre::new(points);
        let (s, w) = rule.on(0.0, 1.0);
        s.iter().zip(&w).map(|(si, wi)| wi * g(*si) * self.eval(*si)).sum()
    }

    /// `ρ(r) = F(r) − F(1)`, the focusing gap.
    pub fn rho_gap(&self, r: f64) -> Result<f64> {
        if self.regime != Regime::Focusing {
            return Err(SpectraError::WrongRegime { expected: "focusing".into() });
        }
        Ok(self.eval(r) - self.f_at_1)
    }
}

/// Solve `F″ + (2n+1)/r F′ + μ⁰_Ω F = 0`, `F(0) = 1`, on the default grid.
pub fn solve_generator(p: &Profile, omega: f64, n: usize, tol: f64) -> Result<GeneratorSolution> {
    solve_generator_with(p, omega, n, &GeneratorOptions { tol, ..Default::default() })
}

struct Discretization {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

// Rows of the Volterra operator F ↦ (x/2n)∫₀¹(1−u^{2n}) u μ⁰(√x u) F(√x u) du
// and of F ↦ F′(r) = −r ∫₀¹ u^{2n+1} μ⁰(r u) F(r u) du.
fn discretize(p: &Profile, omega: f64, n: usize, xgrid: &ChebGrid, q: usize) -> Discretization {
    let nodes = xgrid.nodes();
    let len = nodes.len();
    let bary = lobatto_bary(len);
    let rule = GaussLegendre::new(q);
    let (us, ws) = rule.on(0.0, 1.0);
    let nf = n as f64;
    let row = |i: usize| -> (Vec<f64>, Vec<f64>) {
        let x = nodes[i];
        let r = x.sqrt();
        let mut ra = vec![0.0; len];
        let mut rb = vec![0.0; len];
        if i == 0 {
            return (ra, rb);
        }
        let mut t = vec![0.0; len];
        for (u, w) in us.iter().zip(&ws) {
            let mu = p.mu0_unchecked(omega, r * u);
            let u2n = u.powi(2 * n as i32);
            let ca = x / (2.0 * nf) * w * (1.0 - u2n) * u * mu;
            let cb = -r * w * u2n * u * mu;
            let xi = x * u * u;
            basis(nodes, &bary, xi, &mut t);
            for j in 0..len {
                ra[j] += ca * t[j];
                rb[j] += cb * t[j];
            }
        }
        (ra, rb)
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<(Vec<f64>, Vec<f64>)> = {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..len).map(row).collect();
    let mut a = DMatrix::zeros(len, len);
    let mut b = DMatrix::zeros(len, len);
    for (i, (ra, rb)) in rows.into_iter().enumerate() {
        for j in 0..len {
            a[(i, j)] = ra[j];
            b[(i, j)] = rb[j];
        }
    }
    Discretization { a, b }
}

fn lobatto_bary(len: usize) -> Vec<f64> {
    (0..len)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == len - 1 {
                0.5 * s
            } else {
                s
            }
        })
        .collect()
}

// Lagrange basis values at `x` in barycentric form.
fn basis(nodes: &[f64], bary: &[f64], x: f64, out: &mut [f64]) {
    let mut sum = 0.0;
    for j in 0..nodes.len() {
        let d = x - nodes[j];
        if d == 0.0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j] = 1.0;
            return;
        }
        let t = bary[j] / d;
        out[j] = t;
        sum += t;
    }
    let inv = 1.0 / sum;
    out.iter_mut().for_each(|v| *v *= inv);
}

fn picard(a: &DMatrix<f64>) -> Option<(DVector<f64>, f64)> {
    let len = a.nrows();
    let ones = DVector::from_element(len, 1.0);
    let mut f = ones.clone();
    let mut prev_step = f64::INFINITY;
    let mut q = 0.0;
    for it in 0..400 {
        let next = &ones - a * &f;
        let step = (&next - &f).amax();
        if it > 0 && prev_step > 0.0 {
            q = step / prev_step;
            if it >= 3 && q > 0.95 {
                return None;
            }
        }
        f = next;
        if step <= 1e-15 * f.amax().max(1.0) || (it >= 2 && q < 1.0 && q / (1.0 - q) * step < 1e-15) {
            return Some((f, q));
        }
        if !step.is_finite() {
            return None;
        }
        prev_step = step;
    }
    None
}

/// Generator solve with explicit grid and quadrature choices.
pub fn solve_generator_with(p: &Profile, omega: f64, n: usize, opts: &GeneratorOptions) -> Result<GeneratorSolution> {
    let regime = p.regime(omega)?;
    if n == 0 {
        return Err(SpectraError::invalid("generator mode index n must be at least 1"));
    }
    if !(opts.tol >= 1e-12) {
        return Err(SpectraError::invalid(format!("tolerance {:e} below 1e-12", opts.tol)));
    }
    if opts.grid < 8 {
        return Err(SpectraError::invalid("generator grid needs at least 8 nodes"));
    }
    let q = opts.points(n);
    let xgrid = ChebGrid::new(opts.grid, 0.0, 1.0);
    let disc = discretize(p, omega, n, &xgrid, q);
    let len = opts.grid;

    let mut method = SolveMethod::Collocation;
    let mut lipschitz = disc.a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut f = None;
    if regime == Regime::Focusing {
        if let Some((sol, qm)) = picard(&disc.a) {
            method = SolveMethod::Picard;
            lipschitz = qm;
            f = Some(sol);
        }
    }
    let f = match f {
        Some(f) => f,
        None => {
            let mut m = disc.a.clone();
            for i in 0..len {
                m[(i, i)] += 1.0;
            }
            let ones = DVector::from_element(len, 1.0);
            match m.lu().solve(&ones) {
                Some(f) if f.iter().all(|v| v.is_finite()) => f,
                _ if regime == Regime::Focusing => return Err(SpectraError::NoContraction { lipschitz }),
                _ => return Err(SpectraError::ToleranceNotMet { tol: opts.tol, residual: f64::INFINITY }),
            }
        }
    };
    let fprime = &disc.b * &f;
    let f: Vec<f64> = f.iter().copied().collect();
    let fprime: Vec<f64> = fprime.iter().copied().collect();
    let grid: Vec<f64> = xgrid.nodes().iter().map(|x| x.sqrt()).collect();
    let monotone = f.windows(2).all(|w| match regime {
        Regime::Defocusing => w[1] > w[0],
        Regime::Focusing => w[1] < w[0],
    });
    let mut sol = GeneratorSolution {
        n,
        omega,
        regime,
        f_at_1: f[len - 1],
        fprime_at_1: fprime[len - 1],
        grid,
        f,
        fprime,
        residual: 0.0,
        method,
        lipschitz,
        monotone,
        xgrid,
        quad: q,
    };
    sol.residual = volterra_residual(p, &sol, q + 24);
    if !(sol.residual <= opts.tol) {
        if regime == Regime::Focusing && method == SolveMethod::Collocation && !sol.residual.is_finite() {
            return Err(SpectraError::NoContraction { lipschitz });
        }
        return Err(SpectraError::ToleranceNotMet { tol: opts.tol, residual: sol.residual });
    }
    Ok(sol)
}

/// Sup-norm defect of the integral form at off-grid points, with a finer rule.
pub fn volterra_residual(p: &Profile, sol: &GeneratorSolution, q: usize) -> f64 {
    let rule = GaussLegendre::new(q);
    let (us, ws) = rule.on(0.0, 1.0);
    let nf = sol.n as f64;
    let k = 48;
    let checks = (0..k)
        .map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / (2.0 * k as f64)).sin())
        .chain(std::iter::once(1.0));
    let mut worst: f64 = 0.0;
    for r in checks {
        let integral: f64 = us
            .iter()
            .zip(&ws)
            .map(|(u, w)| w * (1.0 - u.powi(2 * sol.n as i32)) * u * p.mu0_unchecked(sol.omega, r * u) * sol.eval(r * u))
            .sum();
        let rhs = 1.0 - r * r / (2.0 * nf) * integral;
        worst = worst.max((sol.eval(r) - rhs).abs());
    }
    worst
}

/// Independent route: Dormand–Prince on the second-order ODE from `r0` with series data.
///
/// Returns `(r, F, F′)` at every accepted step.
pub fn solve_generator_ode(p: &Profile, omega: f64, n: usize, r0: f64, opts: OdeOptions) -> Result<Vec<(f64, f64, f64)>> {
    p.regime(omega)?;
    let mu00 = p.mu0_unchecked(omega, 0.0);
    let k = 4.0 * (n as f64 + 1.0);
    let y0 = [1.0 - mu00 * r0 * r0 / k, -2.0 * mu00 * r0 / k];
    let c = 2.0 * n as f64 + 1.0;
    let mut out = Vec::new();
    dopri5(
        |r, y: &[f64; 2]| [y[1], -c / r * y[1] - p.mu0_unchecked(omega, r) * y[0]],
        r0,
        y0,
        1.0,
        opts,
        |r, y| out.push((r, y[0], y[1])),
    )?;
    Ok(out)
}

/// Interpolate any nodal data defined on the generator grid.
pub fn interpolate_on(sol: &GeneratorSolution, values: &[f64], r: f64) -> f64 {
    let nodes = sol.xgrid.nodes();
    barycentric(nodes, &lobatto_bary(nodes.len()), values, r * r)
}
