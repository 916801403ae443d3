//! Spectral and bifurcation analysis of the 2D Euler equations linearized
//! around radial monotone vortex profiles.
//!
//! The crate locates the angular velocities at which rotating solutions
//! bifurcate from a radial profile `f0`, builds the kernel generators of the
//! linearized operator and checks the transversality condition.
//!
//! ```
//! use vortex_spectra::{modes, profile::Profile};
//!
//! let p = Profile::polynomial(&[1.0, 1.0]).unwrap();
//! assert!((p.kappa2() - 0.75).abs() < 1e-15);
//! let oh = modes::omega_hat(&p, 1).unwrap();
//! assert!((oh + 1.0 / 12.0).abs() < 1e-15);
//! ```
//!
//! ```
//! use vortex_spectra::dispersion::{certify, scan_scarcity, ScanOptions};
//! use vortex_spectra::kernel_transversality::transversality;
//! use vortex_spectra::Profile;
//!
//! # fn main() -> vortex_spectra::Result<()> {
//! let p = Profile::polynomial(&[1.0, 0.01])?;
//! let opts = ScanOptions::with_tol(1e-10);
//! let scan = scan_scarcity(&p, 3, &opts)?;
//! let omega = scan.roots[0].omega;
//! let cert = certify(&p, 3, omega, 8, &opts)?;
//! assert!(cert.higher_mode_zeta.iter().all(|&(_, z)| z < 0.0));
//! let report = transversality(&p, 3, omega, &opts.generator)?;
//! assert!(report.verdict);
//! # Ok(())
//! # }
//! ```

pub mod dispersion;
pub mod error;
pub mod modes;
pub mod numerics;
pub mod operator_lab;
pub mod profile;
pub mod sturm;
pub mod kernel_transversality;

pub use error::{Result, SpectraError};
pub use profile::{Profile, ProfileConfig, Regime, Sign};
