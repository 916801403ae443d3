use std::f64::consts::PI;

/// Chebyshev–Lobatto grid on `[a, b]`, nodes ascending, endpoints included.
#[derive(Debug, Clone)]
pub struct ChebGrid {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    bary: Vec<f64>,
    cos_table: Vec<f64>,
}

impl ChebGrid {
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 3, "Chebyshev grid needs at least three points");
        let m = n - 1;
        let nodes = (0..n)
            .map(|j| {
                if j == 0 {
                    a
                } else if j == m {
                    b
                } else {
                    a + 0.5 * (b - a) * (1.0 - (PI * j as f64 / m as f64).cos())
                }
            })
            .collect();
        let bary = (0..n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == m {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let cos_table = (0..2 * m).map(|k| (PI * k as f64 / m as f64).cos()).collect();
        ChebGrid { a, b, nodes, bary, cos_table }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn sample<F: FnMut(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().copied().map(f).collect()
    }

    // T_k at node j, nodes running from t = -1 to t = 1
    fn t(&self, k: usize, j: usize) -> f64 {
        let m = self.nodes.len() - 1;
        let c = self.cos_table[(k * j) % (2 * m)];
        if k % 2 == 0 {
            c
        } else {
            -c
        }
    }

    /// Barycentric interpolation of nodal `values` at `x`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        barycentric(&self.nodes, &self.bary, values, x)
    }

    /// Chebyshev coefficients `c_k`, `k = 0..n-1`, of the interpolant.
    pub fn coefficients(&self, values: &[f64]) -> Vec<f64> {
        let n = self.nodes.len();
        let m = n - 1;
        let mut c = vec![0.0; n];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, v) in values.iter().enumerate() {
                let w = if j == 0 || j == m { 0.5 } else { 1.0 };
                s += w * v * self.t(k, j);
            }
            let scale = if k == 0 || k == m { 1.0 } else { 2.0 };
            *ck = scale * s / m as f64;
        }
        c
    }

    fn evaluate_series(&self, coeffs: &[f64]) -> Vec<f64> {
        (0..self.nodes.len())
            .map(|j| coeffs.iter().enumerate().map(|(k, c)| c * self.t(k, j)).sum())
            .collect()
    }

    /// Clenshaw–Curtis integral of the interpolant over `[a, b]`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let c = self.coefficients(values);
        let s: f64 = c
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(k, ck)| ck * 2.0 / (1.0 - (k * k) as f64))
            .sum();
        0.5 * (self.b - self.a) * s
    }

    /// Values of `∫_a^{x_i} g` at every node.
    pub fn cumulative(&self, values: &[f64]) -> Vec<f64> {
        let n = self.nodes.len();
        let m = n - 1;
        let mut c = self.coefficients(values);
        c.push(0.0);
        c.push(0.0);
        // antiderivative series has one extra term, T_{m+1}
        let mut b = vec![0.0; n + 1];
        b[1] = c[0] - 0.5 * c[2];
        for k in 2..=n {
            b[k] = (c[k - 1] - c[k + 1]) / (2.0 * k as f64);
        }
        let mut out: Vec<f64> = (0..n)
            .map(|j| {
                let mut s = 0.0;
                for (k, bk) in b.iter().enumerate() {
                    let tk = if k == m + 1 {
                        let cc = self.cos_table[((m + 1) * j) % (2 * m)];
                        if (m + 1) % 2 == 0 {
                            cc
                        } else {
                            -cc
                        }
                    } else {
                        self.t(k, j)
                    };
                    s += bk * tk;
                }
                s
            })
            .collect();
        let base = out[0];
        let h = 0.5 * (self.b - self.a);
        for v in out.iter_mut() {
            *v = (*v - base) * h;
        }
        out[0] = 0.0;
        out
    }

    /// Values of `∫_{x_i}^b g` at every node.
    pub fn cumulative_to_end(&self, values: &[f64]) -> Vec<f64> {
        let fwd = self.cumulative(values);
        let total = *fwd.last().unwrap();
        let mut out: Vec<f64> = fwd.iter().map(|v| total - v).collect();
        *out.last_mut().unwrap() = 0.0;
        out
    }

    /// Spectral derivative of the interpolant at the nodes.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        let n = self.nodes.len();
        let c = self.coefficients(values);
        let mut d = vec![0.0; n + 1];
        for k in (0..n - 1).rev() {
            d[k] = d[k + 2] + 2.0 * (k + 1) as f64 * c[k + 1];
        }
        d[0] *= 0.5;
        d.truncate(n);
        let s = 2.0 / (self.b - self.a);
        self.evaluate_series(&d).into_iter().map(|v| v * s).collect()
    }
}

/// Second-form barycentric interpolation through `(nodes, values)`.
pub fn barycentric(nodes: &[f64], weights: &[f64], values: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((xj, wj), fj) in nodes.iter().zip(weights).zip(values) {
        let d = x - xj;
        if d == 0.0 {
            return *fj;
        }
        let t = wj / d;
        num += t * fj;
        den += t;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_spectral() {
        let g = ChebGrid::new(40, 0.0, 1.0);
        let v = g.sample(|x| (3.0 * x).sin());
        for x in [0.013, 0.5, 0.77, 0.999] {
            assert!((g.interpolate(&v, x) - (3.0 * x).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn integral_and_cumulative() {
        let g = ChebGrid::new(33, 0.0, 2.0);
        let v = g.sample(|x| x.exp());
        assert!((g.integrate(&v) - (2f64.exp() - 1.0)).abs() < 1e-12);
        let c = g.cumulative(&v);
        for (x, ci) in g.nodes().iter().zip(&c) {
            assert!((ci - (x.exp() - 1.0)).abs() < 1e-12);
        }
        let e = g.cumulative_to_end(&v);
        for (x, ei) in g.nodes().iter().zip(&e) {
            assert!((ei - (2f64.exp() - x.exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches() {
        let g = ChebGrid::new(30, -1.0, 3.0);
        let v = g.sample(|x| x.powi(4) - x);
        let d = g.derivative(&v);
        for (x, di) in g.nodes().iter().zip(&d) {
            assert!((di - (4.0 * x.powi(3) - 1.0)).abs() < 1e-10);
        }
    }
}
