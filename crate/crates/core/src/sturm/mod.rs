//! The singular Sturm–Liouville generator `F_{n,Ω}` and the mode-zero Prüfer analysis.

pub mod generator;
pub mod prufer;

pub use generator::{
    solve_generator, solve_generator_ode, solve_generator_with, GeneratorOptions, GeneratorSolution, SolveMethod,
};
pub use prufer::{kneser_margin, mode0_exceptional_set, prufer_trace, PruferTrace};

use crate::error::Result;

/// `ρ_{n,Ω}(r) = F(r) − F(1)`; focusing regime only.
pub fn rho_gap(sol: &GeneratorSolution, r: f64) -> Result<f64> {
    sol.rho_gap(r)
}
