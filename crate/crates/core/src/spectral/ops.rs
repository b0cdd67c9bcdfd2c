//! Exact spectral differential operators.
//!
//! First derivatives multiply by `i k_j`, with the Nyquist wavenumber of each
//! axis mapped to zero so that derivatives of real fields stay real. The
//! Laplacian uses the full `|k|^2`. On dealiased fields the two conventions
//! coincide.

use num_complex::Complex64;

use super::field::SpectralField;
use super::transform::SpectralGrid;

const I: Complex64 = Complex64::new(0.0, 1.0);

impl SpectralGrid {
    fn check(&self, u: &SpectralField) {
        assert_eq!(self.spec(), u.grid(), "field lives on a different grid");
    }

    /// `sum_j d u_j / d x_j` as a one-component field.
    pub fn divergence(&self, u: &SpectralField) -> SpectralField {
        self.check(u);
        let dim = self.spec().dim;
        assert_eq!(u.ncomp(), dim, "divergence needs a dim-component field");
        let mut out = SpectralField::zeros(*self.spec(), 1);
        let dst = out.component_mut(0);
        for (c, src) in u.components().iter().enumerate() {
            for (p, (d, s)) in dst.iter_mut().zip(src).enumerate() {
                *d += I * self.kdiff[p][c] * s;
            }
        }
        out
    }

    /// Single partial derivative of every component along `axis`.
    pub fn derivative(&self, u: &SpectralField, axis: usize) -> SpectralField {
        self.check(u);
        let mut out = u.clone();
        for comp in out.components_mut() {
            for (p, z) in comp.iter_mut().enumerate() {
                *z *= I * self.kdiff[p][axis];
            }
        }
        out
    }

    /// Gradient tensor; component `c * dim + j` holds `d u_c / d x_j`.
    pub fn gradient(&self, u: &SpectralField) -> SpectralField {
        self.check(u);
        let dim = self.spec().dim;
        let mut comps = Vec::with_capacity(u.ncomp() * dim);
        for src in u.components() {
            for j in 0..dim {
                comps.push(
                    src.iter()
                        .enumerate()
                        .map(|(p, s)| I * self.kdiff[p][j] * s)
                        .collect(),
                );
            }
        }
        SpectralField::from_components(*self.spec(), comps).expect("lengths match")
    }

    /// `-|k|^2 u_hat` per mode.
    pub fn laplacian(&self, u: &SpectralField) -> SpectralField {
        self.check(u);
        let mut out = u.clone();
        for comp in out.components_mut() {
            for (z, k2) in comp.iter_mut().zip(&self.ksq) {
                *z *= -k2;
            }
        }
        out
    }

    /// The operator `grad div`: `-k (k . u_hat)` per mode.
    pub fn grad_div(&self, u: &SpectralField) -> SpectralField {
        self.check(u);
        let dim = self.spec().dim;
        assert_eq!(u.ncomp(), dim, "grad_div needs a dim-component field");
        let mut out = SpectralField::zeros(*self.spec(), dim);
        for p in 0..self.spec().len() {
            let k = &self.kdiff[p];
            let kdotu: Complex64 = (0..dim).map(|c| u.component(c)[p] * k[c]).sum();
            for (c, kc) in k.iter().enumerate().take(dim) {
                out.component_mut(c)[p] = -kdotu * kc;
            }
        }
        out
    }

    /// Zero every mode with some `|m_j|` above the dealiasing cutoff.
    pub fn dealias(&self, u: &SpectralField) -> SpectralField {
        let mut out = u.clone();
        self.dealias_in_place(&mut out);
        out
    }

    pub fn dealias_in_place(&self, u: &mut SpectralField) {
        self.check(u);
        let zero = Complex64::new(0.0, 0.0);
        for comp in u.components_mut() {
            for (z, &keep) in comp.iter_mut().zip(&self.keep) {
                if !keep {
                    *z = zero;
                }
            }
        }
    }

    /// Force `c(-m) = conj(c(m))` exactly, averaging the two halves.
    pub fn symmetrize(&self, u: &mut SpectralField) {
        self.check(u);
        for comp in u.components_mut() {
            for p in 0..comp.len() {
                let q = self.mirror[p];
                if q == p {
                    comp[p].im = 0.0;
                } else if p < q {
                    let avg = (comp[p] + comp[q].conj()) * 0.5;
                    comp[p] = avg;
                    comp[q] = avg.conj();
                }
            }
        }
    }

    /// True if every coefficient pair is an exact conjugate pair.
    pub fn is_conjugate_symmetric(&self, u: &SpectralField) -> bool {
        u.components().iter().all(|comp| {
            comp.iter()
                .enumerate()
                .all(|(p, z)| *z == comp[self.mirror[p]].conj())
        })
    }

    /// Remove the mean, dealias and symmetrize.
    pub fn project(&self, u: &mut SpectralField) {
        self.dealias_in_place(u);
        for comp in u.components_mut() {
            comp[0] = Complex64::new(0.0, 0.0);
        }
        self.symmetrize(u);
    }

    /// Per-mode projection onto the subspace orthogonal to `k`.
    pub fn solenoidal_part(&self, u: &SpectralField) -> SpectralField {
        self.check(u);
        let dim = self.spec().dim;
        let mut out = u.clone();
        for p in 0..self.spec().len() {
            let k = &self.kdiff[p];
            let k2: f64 = k.iter().map(|v| v * v).sum();
            if k2 == 0.0 {
                continue;
            }
            let kdotu: Complex64 = (0..dim).map(|c| u.component(c)[p] * k[c]).sum();
            for c in 0..dim {
                out.component_mut(c)[p] -= kdotu * (k[c] / k2);
            }
        }
        out
    }
}
