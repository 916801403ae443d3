mod common;

use proptest::prelude::*;
use vortex_spectra::numerics::ode::OdeOptions;
use vortex_spectra::sturm::generator::volterra_residual;
use vortex_spectra::sturm::{rho_gap, solve_generator, solve_generator_ode, solve_generator_with, GeneratorOptions, SolveMethod};
use vortex_spectra::{Profile, Regime, SpectraError};

fn sup_error(amp: f64, base: f64, omega: f64, n: usize, grid: usize) -> f64 {
    let p = Profile::polynomial(&[base, amp]).unwrap();
    let sol = solve_generator_with(&p, omega, n, &GeneratorOptions::with_grid(grid, 1e-10)).unwrap();
    (0..=200)
        .map(|i| {
            let r = i as f64 / 200.0;
            (sol.eval(r) - common::quadratic_generator(amp, base, omega, n, r)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn hypergeometric_oracle_focusing_and_defocusing() {
    for (amp, base, omega, n) in [(1.0, 1.0, 0.9, 1), (1.0, 1.0, 0.2, 3), (1.0, -2.0, -0.7, 5), (1.0, -2.0, -1.3, 2)] {
        let e = sup_error(amp, base, omega, n, 96);
        assert!(e < 1e-10, "({amp}, {base}, {omega}, {n}): {e:e}");
    }
}

#[test]
fn default_grid_solution_and_boundary_values() {
    let p = Profile::polynomial(&[1.0, 1.0]).unwrap();
    let sol = solve_generator(&p, 0.9, 2, 1e-10).unwrap();
    let exact = common::quadratic_generator(1.0, 1.0, 0.9, 2, 1.0);
    assert!((sol.f_at_1 - exact).abs() < 1e-11);
    assert_eq!(sol.f[0], 1.0);
    assert!(sol.residual <= 1e-10);
    assert_eq!(sol.grid.len(), sol.f.len());
}

#[test]
fn focusing_uses_picard_and_stays_in_band() {
    let p = Profile::polynomial(&[-2.0, 1.0]).unwrap();
    let sol = solve_generator_with(&p, -0.6, 4, &GeneratorOptions::with_grid(96, 1e-10)).unwrap();
    assert_eq!(sol.regime, Regime::Focusing);
    assert_eq!(sol.method, SolveMethod::Picard);
    assert!(sol.lipschitz < 1.0);
    assert!(sol.monotone);
    assert!(sol.f.iter().all(|&f| (0.5..=1.0).contains(&f)));
    assert!(rho_gap(&sol, 0.3).unwrap() > 0.0);
}

#[test]
fn defocusing_grows_from_one() {
    let p = Profile::polynomial(&[1.0, 1.0]).unwrap();
    let sol = solve_generator_with(&p, -1.0, 3, &GeneratorOptions::with_grid(96, 1e-10)).unwrap();
    assert_eq!(sol.regime, Regime::Defocusing);
    assert!(sol.monotone);
    assert!(sol.f.iter().all(|&f| f >= 1.0));
    assert!(matches!(sol.rho_gap(0.5), Err(SpectraError::WrongRegime { .. })));
}

#[test]
fn independent_ode_route_agrees() {
    let p = Profile::polynomial(&[1.0, 0.4, 0.3]).unwrap();
    for omega in [-0.5, 1.2] {
        let sol = solve_generator_with(&p, omega, 3, &GeneratorOptions::with_grid(96, 1e-10)).unwrap();
        let path = solve_generator_ode(&p, omega, 3, 1e-3, OdeOptions::default()).unwrap();
        let worst = path.iter().map(|&(r, f, _)| (f - sol.eval(r)).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "omega {omega}: {worst:e}");
        let (_, _, fp) = *path.last().unwrap();
        assert!((fp - sol.fprime_at_1).abs() < 1e-7);
    }
}

#[test]
fn off_grid_residual_is_small() {
    let p = Profile::polynomial(&[1.0, 0.5]).unwrap();
    let sol = solve_generator_with(&p, 0.9, 6, &GeneratorOptions::with_grid(96, 1e-10)).unwrap();
    assert!(volterra_residual(&p, &sol, 200) < 1e-12);
}

#[test]
fn rejects_forbidden_and_bad_options() {
    let p = Profile::polynomial(&[1.0, 1.0]).unwrap();
    assert!(matches!(solve_generator(&p, 0.6, 1, 1e-10), Err(SpectraError::ForbiddenOmega { .. })));
    assert!(solve_generator_with(&p, 0.9, 1, &GeneratorOptions::with_grid(4, 1e-10)).unwrap_err().is_validation());
}

#[test]
fn tabulated_profile_generator_converges() {
    let table: Vec<[f64; 2]> = (0..=64).map(|i| {
        let x = i as f64 / 64.0;
        [x, 1.0 + x + 0.5 * x * x]
    }).collect();
    let p = Profile::tabulated(&table).unwrap();
    // piecewise cubic data limits convergence to algebraic order
    let a = solve_generator_with(&p, 1.5, 2, &GeneratorOptions::with_grid(64, 1e-4)).unwrap();
    let b = solve_generator_with(&p, 1.5, 2, &GeneratorOptions::with_grid(256, 1e-4)).unwrap();
    assert!((a.f_at_1 - b.f_at_1).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quadratic_oracle_random(amp in 0.1f64..2.0, n in 1usize..12, gap in 0.05f64..2.0, focusing in any::<bool>()) {
        let base = 1.0;
        let k2 = 0.5 * base + 0.25 * amp;
        let omega = if focusing { k2 + gap } else { 0.5 * base - gap };
        prop_assert!(sup_error(amp, base, omega, n, 64) < 1e-9);
    }
}
