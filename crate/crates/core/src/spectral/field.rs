use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Real samples of a (vector) field on the uniform grid.
///
/// Components are stored separately, each row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    comps: Vec<Vec<f64>>,
}

/// Fourier coefficients of a real (vector) field.
///
/// Normalized so that `u(x) = sum_k c_k exp(i k.x)`; the mean of `|u|^2`
/// over the box equals `sum_k |c_k|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    comps: Vec<Vec<Complex64>>,
}

impl PhysicalField {
    pub fn zeros(grid: GridSpec, ncomp: usize) -> Self {
        PhysicalField {
            grid,
            comps: vec![vec![0.0; grid.len()]; ncomp],
        }
    }

    /// Samples `f` at every grid point; only the first `ncomp` entries of the
    /// returned array are used.
    pub fn from_fn<F>(grid: GridSpec, ncomp: usize, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3],
    {
        assert!(ncomp <= 3);
        let mut out = Self::zeros(grid, ncomp);
        for p in 0..grid.len() {
            let v = f(grid.coordinates(p));
            for (c, comp) in out.comps.iter_mut().enumerate() {
                comp[p] = v[c];
            }
        }
        out
    }

    pub fn from_components(grid: GridSpec, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidGrid(format!(
                "component length does not match {grid}"
            )));
        }
        Ok(PhysicalField { grid, comps })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.comps
    }

    /// `(1/|Omega|) int |u|^2 dx`, the sample mean of `|u|^2`.
    pub fn volume_norm_sq(&self) -> f64 {
        let n = self.grid.len() as f64;
        self.comps
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
            / n
    }

    /// Volume-normalized inner product.
    pub fn inner(&self, other: &PhysicalField) -> f64 {
        let n = self.grid.len() as f64;
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
            .sum::<f64>()
            / n
    }

    /// Largest pointwise Euclidean magnitude over the grid samples.
    pub fn max_magnitude(&self) -> f64 {
        (0..self.grid.len())
            .map(|p| self.comps.iter().map(|c| c[p] * c[p]).sum::<f64>())
            .fold(0.0, f64::max)
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    pub fn scaled(&self, a: f64) -> PhysicalField {
        let mut out = self.clone();
        out.comps
            .iter_mut()
            .for_each(|c| c.iter_mut().for_each(|v| *v *= a));
        out
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: f64, other: &PhysicalField) -> PhysicalField {
        let mut out = self.clone();
        for (c, o) in out.comps.iter_mut().zip(&other.comps) {
            c.iter_mut().zip(o).for_each(|(v, w)| *v += a * w);
        }
        out
    }
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, ncomp: usize) -> Self {
        SpectralField {
            grid,
            comps: vec![vec![Complex64::new(0.0, 0.0); grid.len()]; ncomp],
        }
    }

    pub fn from_components(grid: GridSpec, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidGrid(format!(
                "component length does not match {grid}"
            )));
        }
        Ok(SpectralField { grid, comps })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub(crate) fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.comps
    }

    /// Coefficient at signed multi-index `m` for component `c`.
    pub fn coefficient(&self, c: usize, m: [i64; 3]) -> Option<Complex64> {
        let mut idx = [0usize; 3];
        for axis in 0..self.grid.dim {
            idx[axis] = self.grid.index_of_wavenumber(m[axis])?;
        }
        Some(self.comps[c][self.grid.flat_index(idx)])
    }

    /// Parseval form of the volume-normalized squared norm.
    pub fn volume_norm_sq(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Volume-normalized real inner product `(1/|Omega|) int u . v dx`.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.re * y.re + x.im * y.im)
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out.comps
            .iter_mut()
            .for_each(|c| c.iter_mut().for_each(|z| *z *= a));
        out
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: f64, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(a, other);
        out
    }

    /// In-place `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        for (c, o) in self.comps.iter_mut().zip(&other.comps) {
            c.iter_mut().zip(o).for_each(|(z, w)| *z += w * a);
        }
    }
}
