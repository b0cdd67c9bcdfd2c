use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_dealias_fraction() -> f64 {
    2.0 / 3.0
}

/// Uniform periodic discretization of the cube `(0, box_length)^dim`.
///
/// Every axis carries `n` samples. Wavevectors are `k = (2 pi / box_length) m`
/// with integer `m`, `|m_j| <= n / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub box_length: f64,
    #[serde(default = "default_dealias_fraction")]
    pub dealias_fraction: f64,
}

impl GridSpec {
    /// Grid with the default 2/3 dealiasing rule.
    pub fn new(dim: usize, n: usize, box_length: f64) -> Result<Self> {
        let spec = GridSpec {
            dim,
            n,
            box_length,
            dealias_fraction: default_dealias_fraction(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_dealias_fraction(mut self, fraction: f64) -> Result<Self> {
        self.dealias_fraction = fraction;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::InvalidGrid(format!(
                "dim must be 2 or 3, got {}",
                self.dim
            )));
        }
        if self.n < 4 || !self.n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 4, got {}",
                self.n
            )));
        }
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box_length must be positive, got {}",
                self.box_length
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias_fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    /// Number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Fundamental wavenumber `2 pi / box_length`.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Largest retained `|m_j|` after dealiasing.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.dealias_fraction * (self.n / 2) as f64 + 1e-9).floor() as i64
    }

    /// Signed integer wavenumber for FFT index `i`; index `n/2` maps to `+n/2`.
    pub fn wavenumber_index(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT index for signed wavenumber `m`, if representable.
    pub fn index_of_wavenumber(&self, m: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m > half || m < -half {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + self.n as i64) as usize)
        }
    }

    /// Flat row-major index of a multi-index (axis 0 slowest).
    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        let n = self.n;
        match self.dim {
            2 => idx[0] * n + idx[1],
            _ => (idx[0] * n + idx[1]) * n + idx[2],
        }
    }

    /// Inverse of [`GridSpec::flat_index`].
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            2 => [flat / n, flat % n, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    /// Physical coordinates of grid point `flat`; unused axes are zero.
    pub fn coordinates(&self, flat: usize) -> [f64; 3] {
        let h = self.spacing();
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for (axis, xa) in x.iter_mut().enumerate().take(self.dim) {
            *xa = idx[axis] as f64 * h;
        }
        x
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}d n={} L={} dealias={}",
            self.dim, self.n, self.box_length, self.dealias_fraction
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_resolution() {
        assert!(GridSpec::new(3, 24, 1.0).is_err());
        assert!(GridSpec::new(3, 2, 1.0).is_err());
        assert!(GridSpec::new(4, 16, 1.0).is_err());
        assert!(GridSpec::new(2, 16, 0.0).is_err());
        assert!(GridSpec::new(2, 16, 1.0)
            .unwrap()
            .with_dealias_fraction(0.0)
            .is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = GridSpec::new(3, 8, 1.0).unwrap();
        for flat in 0..g.len() {
            assert_eq!(g.flat_index(g.multi_index(flat)), flat);
        }
        for i in 0..8 {
            let m = g.wavenumber_index(i);
            assert_eq!(g.index_of_wavenumber(m), Some(i));
        }
        assert_eq!(g.wavenumber_index(4), 4);
        assert_eq!(g.index_of_wavenumber(-4), Some(4));
    }

    #[test]
    fn two_thirds_cutoff() {
        assert_eq!(GridSpec::new(2, 32, 1.0).unwrap().dealias_cutoff(), 10);
        assert_eq!(GridSpec::new(2, 64, 1.0).unwrap().dealias_cutoff(), 21);
        let full = GridSpec::new(2, 16, 1.0)
            .unwrap()
            .with_dealias_fraction(1.0)
            .unwrap();
        assert_eq!(full.dealias_cutoff(), 8);
    }
}
