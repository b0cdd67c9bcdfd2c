//! Smooth, divergence-free, zero-mean body forces and the scalars derived
//! from them: the amplitude `F`, the length scale `L` and the signal-to-noise
//! ratio `kappa`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{PhysicalField, SpectralField, SpectralGrid};

/// Relative tolerance on `|k . a| / (|k| |a|)` for a mode to count as
/// divergence-free.
pub const DIVERGENCE_TOL: f64 = 1e-14;

fn default_n_low() -> i64 {
    2
}

/// One Fourier mode `a exp(i k.x)` with `k = (2 pi / L_box) m`.
///
/// `a` holds one `[re, im]` pair per velocity component. The conjugate
/// partner `-m` is added automatically unless listed explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub m: [i64; 3],
    pub a: Vec<[f64; 2]>,
}

impl Mode {
    pub fn new(m: [i64; 3], a: &[Complex64]) -> Self {
        Mode {
            m,
            a: a.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    fn amplitude(&self) -> Vec<Complex64> {
        self.a.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    }
}

/// Time-independent body force given by a finite list of low modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSpec {
    pub modes: Vec<Mode>,
    /// Largest admissible `|m_j|`.
    #[serde(default = "default_n_low")]
    pub n_low: i64,
}

impl ForcingSpec {
    pub fn new(modes: Vec<Mode>) -> Self {
        ForcingSpec {
            modes,
            n_low: default_n_low(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// Spectral coefficients of the force.
    pub fn realize_spectral(&self, sg: &SpectralGrid) -> Result<SpectralField> {
        if self.modes.is_empty() {
            return Err(Error::DegenerateForcing("zero force".into()));
        }
        if self.n_low < 1 || self.n_low > sg.spec().dealias_cutoff() {
            return Err(Error::config(
                "forcing.n_low",
                format!(
                    "must lie in 1..={} for this grid, got {}",
                    sg.spec().dealias_cutoff(),
                    self.n_low
                ),
            ));
        }
        let f = assemble_modes(sg, &self.modes, self.n_low)?;
        if f.volume_norm_sq() == 0.0 {
            return Err(Error::DegenerateForcing("all amplitudes are zero".into()));
        }
        Ok(f)
    }

    /// Physical-space force field.
    pub fn realize(&self, sg: &SpectralGrid) -> Result<PhysicalField> {
        sg.to_physical(&self.realize_spectral(sg)?)
    }
}

/// Builds a real, zero-mean, divergence-free field from a mode list whose
/// entries satisfy `max |m_j| <= band`.
pub fn assemble_modes(sg: &SpectralGrid, modes: &[Mode], band: i64) -> Result<SpectralField> {
    let spec = *sg.spec();
    let dim = spec.dim;
    let mut listed: HashMap<[i64; 3], Vec<Complex64>> = HashMap::new();
    for mode in modes {
        if mode.a.len() != dim {
            return Err(Error::config(
                "modes.a",
                format!("expected {dim} amplitude pairs for mode {:?}", mode.m),
            ));
        }
        if mode.m[dim..].iter().any(|&v| v != 0) {
            return Err(Error::config(
                "modes.m",
                format!("mode {:?} uses an axis beyond dim = {dim}", mode.m),
            ));
        }
        if mode.m == [0, 0, 0] {
            return Err(Error::ZeroMode);
        }
        if mode.m.iter().any(|v| v.abs() > band) {
            return Err(Error::ModeOutOfBand(mode.m));
        }
        let a = mode.amplitude();
        if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("mode amplitude"));
        }
        let kdota: Complex64 = (0..dim).map(|j| a[j] * mode.m[j] as f64).sum();
        let mnorm = mode.m.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
        let anorm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let residual = kdota.norm() / (mnorm * anorm).max(f64::MIN_POSITIVE);
        if residual > DIVERGENCE_TOL {
            return Err(Error::NotDivergenceFree {
                mode: mode.m,
                residual,
            });
        }
        if listed.insert(mode.m, a).is_some() {
            return Err(Error::config(
                "modes.m",
                format!("mode {:?} listed twice", mode.m),
            ));
        }
    }

    let mut out = SpectralField::zeros(spec, dim);
    let flat = |m: [i64; 3]| {
        let mut idx = [0usize; 3];
        for axis in 0..dim {
            idx[axis] = spec
                .index_of_wavenumber(m[axis])
                .expect("band is inside the grid");
        }
        spec.flat_index(idx)
    };
    // Deterministic order.
    let mut keys: Vec<_> = listed.keys().copied().collect();
    keys.sort();
    for m in keys {
        let a = &listed[&m];
        let neg = [-m[0], -m[1], -m[2]];
        let (p, q) = (flat(m), flat(neg));
        match listed.get(&neg) {
            Some(b) => {
                let mismatch = a
                    .iter()
                    .zip(b)
                    .any(|(x, y)| (x - y.conj()).norm() > 1e-14 * x.norm().max(y.norm()));
                if mismatch {
                    return Err(Error::config(
                        "modes.a",
                        format!("modes {m:?} and {neg:?} are not a conjugate pair"),
                    ));
                }
                for c in 0..dim {
                    out.component_mut(c)[p] = a[c];
                }
            }
            None => {
                for c in 0..dim {
                    out.component_mut(c)[p] = a[c];
                    out.component_mut(c)[q] = a[c].conj();
                }
            }
        }
    }
    sg.symmetrize(&mut out);
    Ok(out)
}

/// Which term attains the minimum in the definition of `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthBranch {
    Box,
    SupGradient,
    MeanGradient,
}

/// `L = min{L_box, F / |grad f|_inf, F / rms(grad f)}` and its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthScale {
    pub value: f64,
    pub branch: LengthBranch,
    pub branches: [f64; 3],
    pub grad_f_sup: f64,
    pub grad_f_l2: f64,
}

/// Force-derived scalars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceStats {
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub l_branch: LengthBranch,
    pub kappa: f64,
    pub grad_f_sup: f64,
    pub grad_f_l2: f64,
}

impl ForceStats {
    pub fn compute(sg: &SpectralGrid, f: &PhysicalField) -> Result<Self> {
        let amplitude = compute_f(f)?;
        let length = compute_l(sg, f)?;
        let kappa = compute_kappa(sg, f)?;
        Ok(ForceStats {
            f: amplitude,
            l: length.value,
            l_branch: length.branch,
            kappa,
            grad_f_sup: length.grad_f_sup,
            grad_f_l2: length.grad_f_l2,
        })
    }
}

/// `F = ((1/|Omega|) |f|^2)^(1/2)`.
pub fn compute_f(f: &PhysicalField) -> Result<f64> {
    let ms = f.volume_norm_sq();
    if ms == 0.0 {
        return Err(Error::DegenerateForcing("zero force".into()));
    }
    if !ms.is_finite() {
        return Err(Error::NonFinite("force"));
    }
    Ok(ms.sqrt())
}

pub fn compute_l(sg: &SpectralGrid, f: &PhysicalField) -> Result<LengthScale> {
    let amplitude = compute_f(f)?;
    let grad = sg.gradient(&sg.to_spectral(f)?);
    let grad_f_sup = sg.sup_norm(&grad)?;
    let grad_f_l2 = grad.volume_norm_sq().sqrt();
    let branches = [
        sg.spec().box_length,
        amplitude / grad_f_sup,
        amplitude / grad_f_l2,
    ];
    let (i, value) =
        branches
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            );
    let branch = match i {
        0 => LengthBranch::Box,
        1 => LengthBranch::SupGradient,
        _ => LengthBranch::MeanGradient,
    };
    Ok(LengthScale {
        value,
        branch,
        branches,
        grad_f_sup,
        grad_f_l2,
    })
}

/// `kappa = |f|_inf / F`, with the sup-norm taken on the band-limited
/// interpolant.
pub fn compute_kappa(sg: &SpectralGrid, f: &PhysicalField) -> Result<f64> {
    let amplitude = compute_f(f)?;
    let sup = sg.sup_norm(&sg.to_spectral(f)?)?.max(f.max_magnitude());
    Ok(sup / amplitude)
}
