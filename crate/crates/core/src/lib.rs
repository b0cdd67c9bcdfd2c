//! Pseudospectral solver for the grad-div penalized, skew-symmetrized flow
//! model on a periodic box, with the statistics and gamma-selection algebra
//! needed to check its energy-dissipation bound.
//!
//! ```text
//! u_t + div(u (x) u) - 1/2 (div u) u - nu lap u - gamma grad div u = f(x)
//! ```

#![allow(clippy::needless_range_loop)]

pub mod app;
pub mod criterion;
pub mod error;
pub mod forcing;
pub mod jsonnum;
pub mod solver;
pub mod spectral;
pub mod stats;

pub use app::{RunConfig, RunSummary, SweepConfig};
pub use criterion::{CriterionInput, CriterionReport, GammaWindow};
pub use error::{Error, Result};
pub use forcing::{ForceStats, ForcingSpec, Mode};
pub use solver::{FlowParams, Forcing, Solver, StepperConfig};
pub use spectral::{GridSpec, PhysicalField, SpectralField, SpectralGrid};
pub use stats::{Averages, RunningStats, StepRecord};
