//! Periodic-grid fields and exact spectral operators.

mod field;
mod grid;
mod ops;
mod random;
mod sup;
mod transform;

pub use field::{PhysicalField, SpectralField};
pub use grid::GridSpec;
pub use transform::SpectralGrid;
