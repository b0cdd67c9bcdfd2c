use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::SpectralField;
use super::transform::SpectralGrid;

impl SpectralGrid {
    /// Random real field with unit volume-normalized rms, zero mean and
    /// support in `max |m_j| <= band` (clipped to the dealiasing cutoff).
    ///
    /// Coefficients are drawn from `ChaCha8Rng` seeded with `seed`, so the
    /// result is reproducible across platforms.
    pub fn random_field(&self, ncomp: usize, band: i64, seed: u64) -> SpectralField {
        let band = band.min(self.spec().dealias_cutoff());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = SpectralField::zeros(*self.spec(), ncomp);
        for c in 0..ncomp {
            let comp = out.component_mut(c);
            for (p, z) in comp.iter_mut().enumerate() {
                let re: f64 = rng.gen_range(-1.0..1.0);
                let im: f64 = rng.gen_range(-1.0..1.0);
                if self.modes[p].iter().all(|m| m.abs() <= band) {
                    *z = Complex64::new(re, im);
                }
            }
        }
        self.project(&mut out);
        let norm = out.volume_norm_sq().sqrt();
        if norm > 0.0 {
            out = out.scaled(1.0 / norm);
        }
        out
    }
}
