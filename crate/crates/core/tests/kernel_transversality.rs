use vortex_spectra::dispersion::{scan_abundance, scan_scarcity, ScanOptions, DEFAULT_ALPHA};
use vortex_spectra::kernel_transversality::{
    kappa_constant, kernel_generator, range_density, range_membership, transversality, transversality_from,
};
use vortex_spectra::{Profile, SpectraError};

fn opts() -> ScanOptions {
    let mut o = ScanOptions::with_tol(1e-10);
    o.generator.grid = 96;
    o
}

fn scarcity() -> (Profile, f64) {
    let p = Profile::polynomial(&[1.0, 0.01]).unwrap();
    let om = scan_scarcity(&p, 3, &opts()).unwrap().roots[0].omega;
    (p, om)
}

fn abundance(m: usize) -> (Profile, f64) {
    let p = Profile::polynomial(&[-2.0, 1.0]).unwrap();
    let om = scan_abundance(&p, m, DEFAULT_ALPHA, &opts()).unwrap().roots[0].omega;
    (p, om)
}

#[test]
fn kernel_generator_checks() {
    let (p, om) = scarcity();
    let kg = kernel_generator(&p, 3, om, &opts().generator).unwrap();
    assert!(kg.eval(&p, 1.0).abs() < 1e-14);
    assert!(kg.eval(&p, 0.0).abs() < 1e-14);
    assert!((kg.normalization_check - 0.125).abs() < 1e-8);
    assert!(kg.kernel_residual < 1e-6 && kg.ode_check < 1e-6);
    assert!(kg.zeta_residual <= 1e-10);
    assert_eq!(kg.grid.len(), kg.h_star.len());
    let (q, om) = abundance(40);
    let kg = kernel_generator(&q, 40, om, &opts().generator).unwrap();
    assert!((kg.normalization_check - 1.0 / 82.0).abs() < 1e-8);
    assert!(kg.kernel_residual < 1e-6 && kg.ode_check < 1e-6);
}

#[test]
fn kernel_generator_rejects_non_roots() {
    let (p, om) = scarcity();
    let err = kernel_generator(&p, 3, om + 1e-3, &opts().generator).unwrap_err();
    assert!(matches!(err, SpectraError::NotARoot { .. }));
}

#[test]
fn range_density_and_membership() {
    let (p, om) = scarcity();
    let kg = kernel_generator(&p, 3, om, &opts().generator).unwrap();
    let sol = kg.generator();
    assert_eq!(range_density(&p, sol, 0.0).unwrap(), 0.0);
    for i in 1..=20 {
        assert!(range_density(&p, sol, i as f64 / 20.0).unwrap() > 0.0);
    }
    assert_eq!(range_membership(&p, sol, |_| 0.0).unwrap(), 0.0);
    let a = range_membership(&p, sol, |r| r.powi(3)).unwrap();
    let b = range_membership(&p, sol, |r| r.powi(5)).unwrap();
    let ab = range_membership(&p, sol, |r| 2.0 * r.powi(3) - r.powi(5)).unwrap();
    assert!((ab - (2.0 * a - b)).abs() < 1e-12 * (a.abs() + b.abs()));
    assert!(a > 0.0);
    // the transversality density d* pairs with the range test to give I_m/(4(m+1))
    let rep = transversality_from(&p, &kg).unwrap();
    let dm = range_membership(&p, sol, |r| kg.d_star(&p, r).unwrap()).unwrap();
    assert!((dm - rep.i_m / 16.0).abs() < 1e-6 * rep.i_m.abs());
}

#[test]
fn scarcity_transversality() {
    let (p, om) = scarcity();
    let rep = transversality(&p, 3, om, &opts().generator).unwrap();
    assert!(rep.verdict && rep.i_m > 0.0);
    assert!(rep.i_m.abs() > 10.0 * rep.error_bar);
    assert!(rep.kappa.is_none() && rep.asymptotic_ratio.is_none());
    let kg = kernel_generator(&p, 3, om, &opts().generator).unwrap();
    for i in 0..40 {
        let (a, b, c) = kg.transversality_parts(&p, i as f64 / 40.0).unwrap();
        assert!(a + b + c > 0.0);
    }
    // H_{m,1} vanishes and H_{m,2} + H_{m,3} cancel at the rim
    let (a, b, c) = kg.transversality_parts(&p, 1.0).unwrap();
    assert!(a.abs() < 1e-12 && (b + c).abs() < 1e-12);
}

#[test]
fn abundance_transversality_grows() {
    let mut last = 0.0;
    for m in [40usize, 60] {
        let (p, om) = abundance(m);
        let rep = transversality(&p, m, om, &opts().generator).unwrap();
        assert!(rep.verdict);
        assert!(rep.i_m.abs() > last);
        last = rep.i_m.abs();
        assert!(rep.parts.1.abs() < 2.0);
        assert!(rep.dominance > 1.0);
        let ratio = rep.asymptotic_ratio.unwrap();
        assert!(ratio > 0.5 && ratio < 1.1, "{ratio}");
        assert!((rep.kappa.unwrap() - rep.kappa_laplace.unwrap()).abs() < 1e-10);
    }
}

#[test]
fn kappa_routes_agree() {
    for c in [[-2.0, 1.0], [-0.5, 0.3], [-1.0, 0.9]] {
        let p = Profile::polynomial(&c).unwrap();
        let k = kappa_constant(&p).unwrap();
        assert!((k.kappa - k.kappa_laplace).abs() < 1e-10, "{c:?}: {k:?}");
        assert!(k.kappa > 0.5 && k.kappa < 1.0);
    }
    let k = kappa_constant(&Profile::polynomial(&[-2.0, 1.0]).unwrap()).unwrap();
    assert!((k.mu - 2.0).abs() < 1e-12);
    assert!((k.kappa - 0.6386713831117774).abs() < 1e-12);
}

#[test]
fn kappa_tends_to_half_for_steep_slopes() {
    // μ = −f0(1)/∫r³ slope grows as the profile flattens near a negative f0(1)
    let mut prev = f64::INFINITY;
    for amp in [1.0, 0.1, 0.01, 0.001] {
        let p = Profile::polynomial(&[-2.0, amp]).unwrap();
        let k = kappa_constant(&p).unwrap();
        assert!(k.kappa < prev);
        prev = k.kappa;
    }
    assert!((prev - 0.5).abs() < 1e-3);
}

#[test]
fn kappa_rejects_positive_profiles() {
    let p = Profile::polynomial(&[1.0, 0.01]).unwrap();
    assert!(matches!(kappa_constant(&p), Err(SpectraError::WrongRegime { .. })));
}
