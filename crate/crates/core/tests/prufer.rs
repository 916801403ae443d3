use std::f64::consts::{FRAC_PI_2, PI};
use vortex_spectra::sturm::{kneser_margin, mode0_exceptional_set, prufer_trace};
use vortex_spectra::{Profile, SpectraError};

fn negative() -> Profile {
    Profile::polynomial(&[-2.0, 1.0]).unwrap()
}

#[test]
fn phase_starts_at_half_pi() {
    let p = negative();
    let t = prufer_trace(&p, p.kappa2() + 0.3, 1e-9).unwrap();
    assert_eq!(t.theta[0], FRAC_PI_2);
    assert_eq!(t.y_nodes[0], 1.0);
    assert!(t.theta_bar > FRAC_PI_2);
    assert!(t.tail_bound < 1e-5 && t.y_max <= 1e6);
}

#[test]
fn theta_bar_decreases_in_omega() {
    let p = Profile::polynomial(&[-0.5, 0.3]).unwrap();
    let k2 = p.kappa2();
    let bars: Vec<f64> = (0..20)
        .map(|i| prufer_trace(&p, k2 + 0.05 + 1.95 * i as f64 / 19.0, 1e-9).unwrap().theta_bar)
        .collect();
    assert!(bars.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn flat_limit_keeps_phase() {
    // ν ≈ 0: F ≡ 1, so rF′ = 0 and θ stays at π/2
    let p = Profile::polynomial(&[-1.0, 1e-8]).unwrap();
    let t = prufer_trace(&p, 1.0, 1e-9).unwrap();
    assert!((t.theta_bar - FRAC_PI_2).abs() < 1e-7);
}

#[test]
fn exceptional_set_stable_under_refinement() {
    let p = negative();
    let k2 = p.kappa2();
    let tol = 1e-10;
    let a = mode0_exceptional_set(&p, (k2 + 1e-3, k2 + 2.0), 20, tol).unwrap();
    let b = mode0_exceptional_set(&p, (k2 + 1e-3, k2 + 2.0), 40, tol).unwrap();
    assert_eq!(a.len(), b.len());
    assert!(!a.is_empty());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 10.0 * tol);
    }
    // the phase there is a multiple of π
    let t = prufer_trace(&p, a[0], 1e-10).unwrap();
    let k = (t.theta_bar / PI).round();
    assert!((t.theta_bar - k * PI).abs() < 1e-7);
}

#[test]
fn kneser_margin_below_quarter_at_infinity() {
    let p = negative();
    let k2 = p.kappa2();
    for i in 0..20 {
        let omega = k2 + 0.05 + 1.95 * i as f64 / 19.0;
        for y in [50.0, 100.0, 1e3, 1e5] {
            assert!(kneser_margin(&p, omega, y).unwrap() < 0.25);
        }
    }
}

#[test]
fn rejects_below_kappa2() {
    let p = negative();
    assert!(matches!(prufer_trace(&p, p.kappa2() - 0.1, 1e-9), Err(SpectraError::ForbiddenOmega { .. })));
    assert!(kneser_margin(&p, p.kappa2() + 1.0, 0.5).is_err());
}
