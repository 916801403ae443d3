use crate::error::Result;
use serde::Serialize;

/// A root refined inside a sign-change bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Adjacent sample pairs whose values change sign (or hit zero).
pub fn sign_changes(xs: &[f64], ys: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        let (a, b) = (ys[i], ys[i + 1]);
        if !a.is_finite() || !b.is_finite() {
            continue;
        }
        if a == 0.0 || a * b < 0.0 {
            out.push((i, i + 1));
        }
    }
    out
}

/// Bisection down to `width`, then up to `secant_steps` bracket-preserving
/// secant steps. `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect_secant<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    mut fhi: f64,
    width: f64,
    secant_steps: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    debug_assert!(flo * fhi <= 0.0);
    let mut evals = 0;
    if flo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, bracket: (lo, lo), evaluations: 0 });
    }
    if fhi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, bracket: (hi, hi), evaluations: 0 });
    }
    while (hi - lo).abs() > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        evals += 1;
        if fm == 0.0 {
            return Ok(Root { x: mid, residual: 0.0, bracket: (mid, mid), evaluations: evals });
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    let (mut x, mut fx) = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    for _ in 0..secant_steps {
        let s = hi - fhi * (hi - lo) / (fhi - flo);
        if !(s > lo && s < hi) {
            break;
        }
        let fs = f(s)?;
        evals += 1;
        if fs.abs() < fx.abs() {
            x = s;
            fx = fs;
        }
        if fs == 0.0 {
            break;
        }
        if (fs < 0.0) == (flo < 0.0) {
            lo = s;
            flo = fs;
        } else {
            hi = s;
            fhi = fs;
        }
    }
    Ok(Root { x, residual: fx.abs(), bracket: (lo, hi), evaluations: evals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let f = |x: f64| Ok(x * x * x - 2.0);
        let r = bisect_secant(f, 0.0, 2.0, -2.0, 6.0, 1e-10, 3).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-12);
        assert!(r.bracket.0 <= r.x && r.x <= r.bracket.1);
    }

    #[test]
    fn detects_sign_changes() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, -1.0, -2.0, 0.5];
        assert_eq!(sign_changes(&xs, &ys), vec![(0, 1), (2, 3)]);
    }
}
