use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{PhysicalField, SpectralField};
use super::grid::GridSpec;
use crate::error::Result;

/// A grid together with its FFT plans and per-mode wavenumber tables.
///
/// All operators are `&self` and allocate their own scratch, so one
/// `SpectralGrid` can be shared between threads.
#[derive(Clone)]
pub struct SpectralGrid {
    spec: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Derivative wavevector per mode; the Nyquist entry of each axis is 0.
    pub(crate) kdiff: Vec<[f64; 3]>,
    /// Full `|k|^2` per mode (Nyquist kept).
    pub(crate) ksq: Vec<f64>,
    /// Dealiasing mask.
    pub(crate) keep: Vec<bool>,
    /// Flat index of `-m`.
    pub(crate) mirror: Vec<usize>,
    /// Signed integer multi-index per mode.
    pub(crate) modes: Vec<[i64; 3]>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("spec", &self.spec)
            .finish()
    }
}

impl SpectralGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(spec.n);
        let inverse = planner.plan_fft_inverse(spec.n);

        let len = spec.len();
        let k0 = spec.k0();
        let half = (spec.n / 2) as i64;
        let cutoff = spec.dealias_cutoff();
        let mut kdiff = Vec::with_capacity(len);
        let mut ksq = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        let mut mirror = Vec::with_capacity(len);
        let mut modes = Vec::with_capacity(len);
        for p in 0..len {
            let idx = spec.multi_index(p);
            let mut m = [0i64; 3];
            let mut kd = [0.0; 3];
            let mut k2 = 0.0;
            let mut inside = true;
            let mut mirror_idx = [0usize; 3];
            for axis in 0..spec.dim {
                let ma = spec.wavenumber_index(idx[axis]);
                m[axis] = ma;
                let k = k0 * ma as f64;
                k2 += k * k;
                kd[axis] = if ma == half { 0.0 } else { k };
                inside &= ma.abs() <= cutoff;
                mirror_idx[axis] = (spec.n - idx[axis]) % spec.n;
            }
            kdiff.push(kd);
            ksq.push(k2);
            keep.push(inside);
            mirror.push(spec.flat_index(mirror_idx));
            modes.push(m);
        }

        Ok(SpectralGrid {
            spec,
            forward,
            inverse,
            kdiff,
            ksq,
            keep,
            mirror,
            modes,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Signed integer multi-index of mode `p`.
    pub fn mode(&self, p: usize) -> [i64; 3] {
        self.modes[p]
    }

    /// Forward transform; coefficients carry the `1/n^dim` normalization.
    pub fn to_spectral(&self, field: &PhysicalField) -> Result<SpectralField> {
        self.spec.ensure_same(field.grid())?;
        let scale = 1.0 / self.spec.len() as f64;
        let comps = field
            .components()
            .iter()
            .map(|c| {
                let mut buf: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                self.fft_nd(&mut buf, false);
                buf.iter_mut().for_each(|z| *z *= scale);
                buf
            })
            .collect();
        SpectralField::from_components(self.spec, comps)
    }

    /// Inverse transform; the imaginary round-off is discarded.
    pub fn to_physical(&self, field: &SpectralField) -> Result<PhysicalField> {
        self.spec.ensure_same(field.grid())?;
        let comps = field
            .components()
            .iter()
            .map(|c| {
                let mut buf = c.clone();
                self.fft_nd(&mut buf, true);
                buf.into_iter().map(|z| z.re).collect()
            })
            .collect();
        PhysicalField::from_components(self.spec, comps)
    }

    /// Forward transform followed by [`SpectralGrid::project`]; the canonical
    /// spectral view of a physical state.
    pub fn analyze(&self, field: &PhysicalField) -> Result<SpectralField> {
        let mut hat = self.to_spectral(field)?;
        self.project(&mut hat);
        Ok(hat)
    }

    fn fft_nd(&self, data: &mut [Complex64], inverse: bool) {
        let plan = if inverse {
            &self.inverse
        } else {
            &self.forward
        };
        let n = self.spec.n;
        let len = data.len();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.spec.dim {
            let stride = n.pow((self.spec.dim - 1 - axis) as u32);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = n * stride;
            for start in (0..len).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, z) in line.iter_mut().enumerate() {
                        *z = data[base + i * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (i, z) in line.iter().enumerate() {
                        data[base + i * stride] = *z;
                    }
                }
            }
        }
    }
}
