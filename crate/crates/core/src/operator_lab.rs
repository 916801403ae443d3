//! Nyström discretization of `L_n^Ω` under the measure `dλ_Ω(s) = s/ν_Ω(s) ds`.

use crate::error::{Result, SpectraError};
use crate::modes;
use crate::numerics::cheb::barycentric;
use crate::numerics::GaussLegendre;
use crate::profile::Profile;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

/// Gauss points per panel in the product-integration rule.
const PANEL_POINTS: usize = 10;

pub const NEAR_SINGULAR: f64 = 1e12;

/// Kernel-times-weight matrix of `L_n^Ω` on Gauss–Legendre nodes in `(0, 1)`.
///
/// `matrix` is self-adjoint in the discrete `λ_Ω` inner product with weights `weights`.
#[derive(Debug, Clone)]
pub struct NystromOperator {
    pub n: usize,
    pub omega: f64,
    pub sigma: f64,
    pub nodes: Vec<f64>,
    /// `∫ · dλ_Ω` weights, `w_i r_i / ν_Ω(r_i)`.
    pub weights: Vec<f64>,
    pub matrix: DMatrix<f64>,
    /// Plain Gauss–Legendre weights on `(0, 1)`.
    pub quad_weights: Vec<f64>,
    pub nu: Vec<f64>,
    sym: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub residual: f64,
    pub condition: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub omega: f64,
    pub nodes: usize,
    pub eigenvalues: Vec<f64>,
    pub smallest: f64,
    pub largest: f64,
    pub hilbert_schmidt: f64,
}

fn kernel(n: usize, r: f64, s: f64) -> f64 {
    let (lo, hi) = if r < s { (r, s) } else { (s, r) };
    if n == 0 {
        -(hi.ln())
    } else {
        (lo / hi).powi(n as i32)
    }
}

/// Discretize `L_n^Ω` (or `L_0^Ω` for `n = 0`) with `size` nodes.
pub fn discretize(p: &Profile, omega: f64, n: usize, size: usize) -> Result<NystromOperator> {
    let sigma = p.sigma(omega)?;
    if size < 16 {
        return Err(SpectraError::invalid("Nystrom discretization needs at least 16 nodes"));
    }
    let rule = GaussLegendre::new(size);
    let bary = rule.barycentric_weights();
    let (nodes, quad_weights) = rule.on(0.0, 1.0);
    let nu: Vec<f64> = nodes.iter().map(|&r| sigma * p.mu0_unchecked(omega, r)).collect();

    // product integration: one Gauss panel between consecutive nodes so the kink at s = r_i is a breakpoint
    let panel = GaussLegendre::new(PANEL_POINTS);
    let mut breaks = Vec::with_capacity(size + 2);
    breaks.push(0.0);
    breaks.extend_from_slice(&nodes);
    breaks.push(1.0);
    let mut fine_s = Vec::new();
    let mut fine_w = Vec::new();
    for w in breaks.windows(2) {
        let (s, ws) = panel.on(w[0], w[1]);
        fine_s.extend(s);
        fine_w.extend(ws);
    }
    let fine = fine_s.len();
    let ref_nodes: Vec<f64> = rule.nodes.clone();
    let mut interp = DMatrix::zeros(fine, size);
    let mut unit = vec![0.0; size];
    for (a, &s) in fine_s.iter().enumerate() {
        let t = 2.0 * s - 1.0;
        // Lagrange basis at t through the reference nodes
        let mut sum = 0.0;
        let mut hit = None;
        for j in 0..size {
            let d = t - ref_nodes[j];
            if d == 0.0 {
                hit = Some(j);
                break;
            }
            unit[j] = bary[j] / d;
            sum += unit[j];
        }
        match hit {
            Some(j) => interp[(a, j)] = 1.0,
            None => {
                for j in 0..size {
                    interp[(a, j)] = unit[j] / sum;
                }
            }
        }
    }
    let scale = if n == 0 { 1.0 } else { 1.0 / (2.0 * n as f64) };
    let mut kt = DMatrix::zeros(size, fine);
    for i in 0..size {
        let c = nu[i] * scale;
        for a in 0..fine {
            kt[(i, a)] = c * fine_w[a] * kernel(n, nodes[i], fine_s[a]) * fine_s[a];
        }
    }
    let m = &kt * &interp;
    let weights: Vec<f64> = (0..size).map(|i| quad_weights[i] * nodes[i] / nu[i]).collect();
    let mut dm = m.clone();
    for i in 0..size {
        for j in 0..size {
            dm[(i, j)] *= weights[i];
        }
    }
    let sym = (&dm + dm.transpose()) * 0.5;
    let mut matrix = sym.clone();
    for i in 0..size {
        for j in 0..size {
            matrix[(i, j)] /= weights[i];
        }
    }
    let mut scaled = sym.clone();
    for i in 0..size {
        for j in 0..size {
            scaled[(i, j)] /= (weights[i] * weights[j]).sqrt();
        }
    }
    let eig = SymmetricEigen::try_new(scaled, f64::EPSILON, 0).ok_or(SpectraError::EigenSolveFailure)?;
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(SpectraError::EigenSolveFailure);
    }
    eigenvalues.sort_by(f64::total_cmp);
    Ok(NystromOperator { n, omega, sigma, nodes, weights, matrix, quad_weights, nu, sym, eigenvalues })
}

impl NystromOperator {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&r| f(r)).collect()
    }

    /// `L h` at the nodes.
    pub fn apply(&self, h: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(h)).iter().copied().collect()
    }

    /// `⟨h, g⟩_Ω`.
    pub fn inner(&self, h: &[f64], g: &[f64]) -> f64 {
        self.weights.iter().zip(h).zip(g).map(|((w, a), b)| w * a * b).sum()
    }

    /// `⟨L h, h⟩_Ω`.
    pub fn quadratic_form(&self, h: &[f64]) -> f64 {
        let v = DVector::from_column_slice(h);
        v.dot(&(&self.sym * &v))
    }

    /// Eigenvalues of the symmetrized matrix, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn largest_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn hilbert_schmidt_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `max |M_ij − M_ji|` after weighting by the `λ_Ω` inner product.
    pub fn symmetry_defect(&self) -> f64 {
        let mut dm = self.matrix.clone();
        for i in 0..self.size() {
            for j in 0..self.size() {
                dm[(i, j)] *= self.weights[i];
            }
        }
        (&dm - dm.transpose()).amax()
    }

    /// Spectral condition number of `Id − σL` in the `λ_Ω` norm.
    pub fn condition(&self) -> f64 {
        let mags = self.eigenvalues.iter().map(|l| (1.0 - self.sigma * l).abs());
        let (lo, hi) = mags.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi / lo
    }

    pub fn spectrum(&self) -> SpectrumReport {
        SpectrumReport {
            n: self.n,
            omega: self.omega,
            nodes: self.size(),
            eigenvalues: self.eigenvalues.clone(),
            smallest: self.smallest_eigenvalue(),
            largest: self.largest_eigenvalue(),
            hilbert_schmidt: self.hilbert_schmidt_norm(),
        }
    }

    /// Nodal interpolation of data on the Gauss nodes.
    pub fn interpolate(&self, values: &[f64], r: f64) -> f64 {
        let rule_nodes: Vec<f64> = self.nodes.iter().map(|x| 2.0 * x - 1.0).collect();
        let bary: Vec<f64> = rule_nodes
            .iter()
            .zip(&self.quad_weights)
            .enumerate()
            .map(|(j, (x, w))| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * ((1.0 - x * x) * 2.0 * w).sqrt()
            })
            .collect();
        barycentric(&rule_nodes, &bary, values, 2.0 * r - 1.0)
    }
}

/// Solve `(Id − σL) h = rhs` with a conditioning report.
pub fn solve_id_minus_l(op: &NystromOperator, rhs: &[f64]) -> Result<SolveReport> {
    let size = op.size();
    if rhs.len() != size {
        return Err(SpectraError::invalid("right-hand side length differs from the node count"));
    }
    let condition = op.condition();
    if !(condition < NEAR_SINGULAR) {
        return Err(SpectraError::NearSingular { condition });
    }
    let a = DMatrix::identity(size, size) - &op.matrix * op.sigma;
    let b = DVector::from_column_slice(rhs);
    let h = a.clone().lu().solve(&b).ok_or(SpectraError::NearSingular { condition: f64::INFINITY })?;
    let residual = (&a * &h - &b).amax();
    let scale = b.amax();
    if residual > 1e-10 * scale.max(f64::MIN_POSITIVE) && scale > 0.0 {
        return Err(SpectraError::ToleranceNotMet { tol: 1e-10 * scale, residual });
    }
    Ok(SolveReport { solution: h.iter().copied().collect(), residual, condition })
}

/// `T(n,Ω) = −σ/(2n G_n(1)) ∫₀¹ s^{n+1} (Id − σL_n)^{-1}[ν r G_n](s) ds`.
pub fn t_value_operator(p: &Profile, op: &NystromOperator) -> Result<f64> {
    let n = op.n;
    if n == 0 {
        return Err(SpectraError::invalid("T(n, Omega) needs n >= 1"));
    }
    let g1 = modes::g_n(p, op.omega, n, 1.0)?;
    let rhs: Vec<f64> = op
        .nodes
        .iter()
        .zip(&op.nu)
        .map(|(&r, &nu)| nu * r.powi(n as i32) * modes::g_reduced(p, op.omega, n, r))
        .collect();
    let h = solve_id_minus_l(op, &rhs)?.solution;
    let integral: f64 = op
        .nodes
        .iter()
        .zip(&op.quad_weights)
        .zip(&h)
        .map(|((r, w), hi)| w * r.powi(n as i32 + 1) * hi)
        .sum();
    Ok(-op.sigma / (2.0 * n as f64 * g1) * integral)
}

/// Condition number of the full mode-`n` kernel operator
/// `h ↦ (Id − σL_n)h + H_n[h](1) μ⁰ r G_n / (2n G_n(1))`, singular exactly at dispersion roots.
pub fn kernel_operator_condition(p: &Profile, op: &NystromOperator) -> Result<f64> {
    let n = op.n;
    if n == 0 {
        return Err(SpectraError::invalid("kernel operator needs n >= 1"));
    }
    let size = op.size();
    let g1 = modes::g_n(p, op.omega, n, 1.0)?;
    let mut a = DMatrix::identity(size, size) - &op.matrix * op.sigma;
    for i in 0..size {
        let r = op.nodes[i];
        let u = op.sigma * op.nu[i] * r.powi(n as i32) * modes::g_reduced(p, op.omega, n, r) / (2.0 * n as f64 * g1);
        for k in 0..size {
            a[(i, k)] += u * op.quad_weights[k] * op.nodes[k].powi(n as i32 + 1);
        }
    }
    let sv = a.singular_values();
    let hi = sv.max();
    let lo = sv.min();
    Ok(if lo > 0.0 { hi / lo } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_symmetric() {
        assert_eq!(kernel(3, 0.2, 0.7), kernel(3, 0.7, 0.2));
        assert_eq!(kernel(0, 0.2, 0.7), -(0.7f64.ln()));
    }
}
