mod common;

use proptest::prelude::*;
use vortex_spectra::modes::{a_n, a_n_boundary, g_n, g_reduced, h_n, mode_coefficients, omega_hat, singular_set};
use vortex_spectra::{Profile, SpectraError};

#[test]
fn omega_hat_closed_forms() {
    let p = Profile::polynomial(&[1.0, 1.0]).unwrap();
    assert!((omega_hat(&p, 1).unwrap() + 1.0 / 12.0).abs() < 1e-15);
    let q = Profile::polynomial(&[-2.0, 1.0]).unwrap();
    assert!((omega_hat(&q, 10).unwrap() + 0.6958333333333333).abs() < 1e-12);
    let s = Profile::polynomial(&[1.0, 0.01]).unwrap();
    let expect = 0.5025 - 4.0 / 3.0 * (0.125 + 0.001);
    assert!((omega_hat(&s, 3).unwrap() - expect).abs() < 1e-15);
}

#[test]
fn singular_set_orders_by_sign() {
    let p = Profile::polynomial(&[1.0, 1.0]).unwrap();
    let s = singular_set(&p, 1, 2).unwrap();
    assert_eq!(s.len(), 3);
    assert!(s[0] < s[1] && s[1] < s[2]);
    assert_eq!(s[2], 0.75);
    // negative profiles: decreasing towards κ2 from above
    let q = Profile::polynomial(&[-2.0, 1.0]).unwrap();
    let s = singular_set(&q, 3, 4).unwrap();
    assert!(s.windows(2).all(|w| w[0] > w[1]));
    assert!(s[3] > q.kappa2());
}

#[test]
fn boundary_gap_identity() {
    let p = Profile::polynomial(&[1.0, 0.01]).unwrap();
    let c = mode_coefficients(&p, 3, 0.4).unwrap();
    assert!((g_n(&p, 0.4, 3, 1.0).unwrap() - c.boundary_gap).abs() < 1e-14);
    let q = Profile::polynomial(&[1.0, 1.0]).unwrap();
    assert!((g_n(&q, 0.0, 1, 1.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
}

#[test]
fn g_n_rejects_bad_radius_and_mode() {
    let p = Profile::polynomial(&[1.0, 1.0]).unwrap();
    assert!(g_n(&p, 0.0, 1, 0.0).is_err());
    assert!(g_n(&p, 0.0, 1, 1.5).is_err());
    assert!(omega_hat(&p, 0).is_err());
}

#[test]
fn h_n_on_monomials() {
    // h = r: H_1[r](r) = r² ∫_r¹ s ds + ∫₀^r s³ ds
    for r in [0.1f64, 0.5, 0.9, 1.0] {
        let expect = r * r * (1.0 - r * r) / 2.0 + r.powi(4) / 4.0;
        assert!((h_n(|s| s, 1, r).unwrap() - expect).abs() < 1e-13);
    }
}

#[test]
fn a_n_example_and_singular_guard() {
    let p = Profile::polynomial(&[1.0, 1.0]).unwrap();
    assert!((a_n(&p, 0.0, 1, |s| s).unwrap() + 1.5).abs() < 1e-12);
    assert!((a_n_boundary(&p, 0.0, 1, |s| s).unwrap() + 1.5).abs() < 1e-12);
    let oh = omega_hat(&p, 1).unwrap();
    assert!(matches!(a_n(&p, oh, 1, |s| s), Err(SpectraError::SingularOmega { .. })));
}

#[test]
fn g_reduced_matches_definition() {
    // r^{1−n} G_n via direct quadrature of the moments
    let p = Profile::polynomial(&[1.0, 0.3, 0.2]).unwrap();
    let (n, om, r) = (4usize, 0.2, 0.6);
    let nf = n as f64;
    let im = vortex_spectra::numerics::quad(|u| u * p.f0(r * u), 0.0, 1.0).unwrap();
    let mm = vortex_spectra::numerics::quad(|u| u.powi(2 * n as i32 + 1) * p.f0(r * u), 0.0, 1.0).unwrap();
    let expect = nf * om * r * r + p.kappa2() - (nf + 1.0) * r * r * im + (nf + 1.0) * r * r * mm;
    assert!((g_reduced(&p, om, n, r) - expect).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn a_n_two_routes_agree(c0 in -1.0f64..1.0, c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, n in prop::sample::select(vec![1usize, 2, 5])) {
        let p = Profile::polynomial(&[1.0, 0.5]).unwrap();
        let h = |s: f64| c0 + c1 * s + c2 * s * s * s;
        let a = a_n(&p, -0.3, n, h).unwrap();
        let b = a_n_boundary(&p, -0.3, n, h).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn omega_hat_matches_quadratic_oracle(base in 0.2f64..3.0, amp in 0.01f64..3.0, n in 1usize..60) {
        let p = Profile::polynomial(&[base, amp]).unwrap();
        let expect = common::quadratic_omega_hat(amp, base, n);
        prop_assert!((omega_hat(&p, n).unwrap() - expect).abs() < 1e-13);
    }
}
