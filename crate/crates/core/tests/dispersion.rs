use proptest::prelude::*;
use vortex_spectra::dispersion::{
    certify, scan_abundance, scan_scarcity, t_value, zeta, zeta_with, ScanOptions, DEFAULT_ALPHA,
};
use vortex_spectra::modes::omega_hat;
use vortex_spectra::numerics::bisect_secant;
use vortex_spectra::operator_lab::{discretize, t_value_operator};
use vortex_spectra::sturm::GeneratorOptions;
use vortex_spectra::{Profile, SpectraError};

fn opts() -> ScanOptions {
    let mut o = ScanOptions::with_tol(1e-10);
    o.generator.grid = 96;
    o
}

fn scarcity_root(eps: f64, n: usize) -> f64 {
    let p = Profile::polynomial(&[1.0, eps]).unwrap();
    scan_scarcity(&p, n, &opts()).unwrap().roots[0].omega
}

#[test]
fn burbea_limit_is_linear_in_eps() {
    for n in [3usize, 4, 5] {
        let target = (n as f64 - 1.0) / (2.0 * n as f64);
        let e2 = (scarcity_root(1e-2, n) - target).abs();
        let e3 = (scarcity_root(1e-3, n) - target).abs();
        let ratio = e2 / e3;
        assert!(e3 < e2 && (5.0..=20.0).contains(&ratio), "n {n}: {e2:e} {e3:e}");
    }
}

#[test]
fn default_tolerance_entry_point() {
    let p = Profile::polynomial(&[1.0, 0.01]).unwrap();
    let a = zeta(&p, 0.2, 3, 1e-10).unwrap();
    let b = zeta_with(&p, 0.2, 3, &GeneratorOptions::with_grid(64, 1e-10)).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn negative_below_singular_point() {
    let p = Profile::polynomial(&[1.0, 0.3]).unwrap();
    let g = GeneratorOptions::with_grid(64, 1e-10);
    for n in [1usize, 2, 3, 6] {
        let top = p.kappa1().min(omega_hat(&p, n).unwrap());
        for omega in [top - 1e-6, top - 0.1, top - 2.0] {
            assert!(zeta_with(&p, omega, n, &g).unwrap() < 0.0, "n {n} omega {omega}");
        }
    }
}

#[test]
fn positive_at_upper_window_end() {
    let p = Profile::polynomial(&[1.0, 0.1]).unwrap();
    let g = GeneratorOptions::with_grid(64, 1e-10);
    let cap = p.kappa1() / (p.kappa2() - p.kappa1());
    for n in (1..=cap.floor() as usize).step_by(3) {
        let nf = n as f64;
        assert!(zeta_with(&p, nf * p.kappa2() / (nf + 1.0), n, &g).unwrap() > 0.0);
    }
}

#[test]
fn scarcity_window_and_root() {
    let p = Profile::polynomial(&[1.0, 0.01]).unwrap();
    let scan = scan_scarcity(&p, 3, &opts()).unwrap();
    assert!((scan.window.0 - 0.3345).abs() < 1e-7 && (scan.window.1 - 0.376875).abs() < 1e-15);
    assert_eq!(scan.roots.len(), 1);
    let r = scan.roots[0];
    assert!(r.residual <= 1e-10);
    assert!(scan.brackets[0].0 <= r.omega && r.omega <= scan.brackets[0].1);
    assert!(r.bracket.0 >= scan.brackets[0].0 && r.bracket.1 <= scan.brackets[0].1);
    assert!(scan.zeta_values[0] < 0.0 && *scan.zeta_values.last().unwrap() > 0.0);
    // the reported Lipschitz constant covers the samples
    for (w, z) in scan.omega_samples.windows(2).zip(scan.zeta_values.windows(2)) {
        assert!((z[1] - z[0]).abs() <= scan.lipschitz * (w[1] - w[0]) * (1.0 + 1e-12));
    }
}

#[test]
fn scarcity_admissibility() {
    let p = Profile::polynomial(&[1.0, 1.0]).unwrap();
    assert!(matches!(scan_scarcity(&p, 3, &opts()), Err(SpectraError::NotAdmissible { .. })));
    let q = Profile::polynomial(&[1.0, 0.01]).unwrap();
    assert!(matches!(scan_scarcity(&q, 11, &opts()), Err(SpectraError::NotAdmissible { .. })));
    let scan = scan_scarcity(&q, 10, &opts()).unwrap();
    assert!(scan.roots[0].omega < q.kappa1());
}

#[test]
fn regime_exclusivity() {
    let pos = Profile::polynomial(&[1.0, 0.01]).unwrap();
    let neg = Profile::polynomial(&[-2.0, 1.0]).unwrap();
    assert!(matches!(scan_abundance(&pos, 30, DEFAULT_ALPHA, &opts()), Err(SpectraError::WrongRegime { .. })));
    assert!(matches!(scan_scarcity(&neg, 3, &opts()), Err(SpectraError::WrongRegime { .. })));
    assert!(scan_abundance(&neg, 30, 2.5, &opts()).unwrap_err().is_validation());
}

#[test]
fn abundance_bracket_and_asymptotics() {
    let p = Profile::polynomial(&[-2.0, 1.0]).unwrap();
    let scan = scan_abundance(&p, 30, DEFAULT_ALPHA, &opts()).unwrap();
    let m = *scan.attempts.last().unwrap();
    let oh = omega_hat(&p, m).unwrap();
    assert!(scan.window.0 >= oh - (m as f64).powf(-1.5) && scan.window.1 < oh);
    assert!(scan.zeta_values[0] < 0.0 && *scan.zeta_values.last().unwrap() > 0.0);
    for m in [40usize, 60] {
        let scan = scan_abundance(&p, m, DEFAULT_ALPHA, &opts()).unwrap();
        assert_eq!(scan.attempts, vec![m]);
        let om = scan.roots[0].omega;
        let lead = -p.f0(1.0) / (2.0 * m as f64);
        assert!(om > p.kappa2());
        assert!(((om - p.kappa2()) - lead).abs() <= 0.2 * lead);
    }
}

#[test]
fn certificate_scarcity() {
    let p = Profile::polynomial(&[1.0, 0.01]).unwrap();
    let o = opts();
    let om = scan_scarcity(&p, 3, &o).unwrap().roots[0].omega;
    let c = certify(&p, 3, om, 8, &o).unwrap();
    assert_eq!(c.higher_mode_zeta.len(), 7);
    assert!(c.higher_mode_zeta.iter().all(|&(_, z)| z < 0.0));
    assert!(c.singular_set_distance > 0.0 && c.mode0_distance > 0.0);
    let trivial = certify(&p, 3, om, 1, &o).unwrap();
    assert!(trivial.higher_mode_margins.is_empty());
    assert!(matches!(certify(&p, 3, om + 1e-3, 8, &o), Err(SpectraError::NotARoot { .. })));
}

#[test]
fn certificate_abundance_margins_scale_like_one_over_m() {
    let p = Profile::polynomial(&[-2.0, 1.0]).unwrap();
    let o = opts();
    for m in [40usize, 60] {
        let om = scan_abundance(&p, m, DEFAULT_ALPHA, &o).unwrap().roots[0].omega;
        let c = certify(&p, m, om, 5, &o).unwrap();
        assert!(c.higher_mode_margins.iter().all(|&(_, v)| v * m as f64 > 0.1));
    }
}

#[test]
fn t_equals_one_at_roots() {
    let o = opts();
    let p = Profile::polynomial(&[1.0, 0.01]).unwrap();
    let om = scan_scarcity(&p, 3, &o).unwrap().roots[0].omega;
    let t = t_value(&p, om, 3, &o.generator, Some(128)).unwrap();
    assert!((t.generator - 1.0).abs() < 1e-6);
    assert!((t.closed_form - 1.0).abs() < 1e-6);
    assert!((t.operator.unwrap() - 1.0).abs() < 1e-6);
    let q = Profile::polynomial(&[-2.0, 1.0]).unwrap();
    let om = scan_abundance(&q, 40, DEFAULT_ALPHA, &o).unwrap().roots[0].omega;
    let t = t_value(&q, om, 40, &o.generator, Some(128)).unwrap();
    assert!((t.operator.unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn sign_of_one_minus_t_tracks_zeta() {
    let o = opts();
    let p = Profile::polynomial(&[1.0, 0.01]).unwrap();
    let (lo, hi) = (omega_hat(&p, 3).unwrap() + 1e-4, 0.45);
    for i in 0..10 {
        let omega = lo + (hi - lo) * i as f64 / 9.0;
        let t = t_value(&p, omega, 3, &o.generator, Some(96)).unwrap();
        let g1 = vortex_spectra::modes::g_n(&p, omega, 3, 1.0).unwrap();
        let predicted = (1.0 - t.closed_form).signum();
        assert_eq!((1.0 - t.operator.unwrap()).signum(), predicted);
        // the normalizing factor 4/(G_3(1)(F(1)+F′(1)/6)) is positive here
        assert!(g1 > 0.0);
        assert_eq!(predicted, t.zeta.signum());
        if t.zeta < 0.0 {
            assert!((t.operator.unwrap() - 1.0).abs() > 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn zeta_root_is_operator_root(eps in 0.002f64..0.02, n in 3usize..6) {
        let p = Profile::polynomial(&[1.0, eps]).unwrap();
        let o = opts();
        let scan = scan_scarcity(&p, n, &o).unwrap();
        let root = scan.roots[0];
        let (a, b) = scan.brackets[0];
        let one_minus_t = |om: f64| -> vortex_spectra::Result<f64> {
            let op = discretize(&p, om, n, 128)?;
            Ok(1.0 - t_value_operator(&p, &op)?)
        };
        let (fa, fb) = (one_minus_t(a).unwrap(), one_minus_t(b).unwrap());
        prop_assert!(fa * fb < 0.0);
        let t_root = bisect_secant(one_minus_t, a, b, fa, fb, 1e-12, 3).unwrap();
        prop_assert!((t_root.x - root.omega).abs() < 1e-6);
    }
}
