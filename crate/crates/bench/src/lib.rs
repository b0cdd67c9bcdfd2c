//! Shared fixtures for the kernel benchmarks.

use graddiv_core::solver::{FlowParams, Solver};
use graddiv_core::{GridSpec, SpectralField, SpectralGrid};

/// Solver on the `2 pi` box with a moderate viscosity and penalty.
pub fn solver(dim: usize, n: usize) -> Solver {
    let grid =
        SpectralGrid::new(GridSpec::new(dim, n, 2.0 * std::f64::consts::PI).unwrap()).unwrap();
    Solver::new(grid, FlowParams::new(0.01, 1.0).unwrap()).unwrap()
}

/// Unit-rms random velocity with support up to the dealiasing cutoff.
pub fn velocity(solver: &Solver, seed: u64) -> SpectralField {
    let spec = solver.grid().spec();
    solver
        .grid()
        .random_field(spec.dim, spec.dealias_cutoff(), seed)
}

/// Low-mode solenoidal body force.
pub fn force(solver: &Solver) -> SpectralField {
    let g = solver.grid();
    g.solenoidal_part(&g.random_field(g.spec().dim, 2, 99))
}
