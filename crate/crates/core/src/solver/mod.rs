//! Time integration of the grad-div penalized model
//!
//! ```text
//! u_t + N(u) - nu lap u - gamma grad div u = f,   N(u) = div(u (x) u) - 1/2 (div u) u
//! ```
//!
//! There is no pressure: `grad p` is replaced by `-gamma grad div u`.

mod checkpoint;
mod mms;
mod stepper;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{PhysicalField, SpectralField, SpectralGrid};

pub use checkpoint::{Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use mms::{run_mms, ManufacturedSolution, MmsReport, MmsTarget, PointValue, TrigFamily};
pub use stepper::{suggest_dt, Forcing, Scheme, StepperConfig, VELOCITY_FLOOR};

/// Physical coefficients of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowParams {
    /// Kinematic viscosity.
    pub nu: f64,
    /// Grad-div coefficient.
    pub gamma: f64,
}

impl FlowParams {
    pub fn new(nu: f64, gamma: f64) -> Result<Self> {
        let p = FlowParams { nu, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::config(
                "flow.nu",
                format!("must be > 0, got {}", self.nu),
            ));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::config(
                "flow.gamma",
                format!("must be >= 0, got {}", self.gamma),
            ));
        }
        Ok(())
    }
}

/// Spatial discretization of the model on one grid.
#[derive(Debug, Clone)]
pub struct Solver {
    grid: SpectralGrid,
    params: FlowParams,
}

impl Solver {
    pub fn new(grid: SpectralGrid, params: FlowParams) -> Result<Self> {
        params.validate()?;
        Ok(Solver { grid, params })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn params(&self) -> &FlowParams {
        &self.params
    }

    fn check_velocity(&self, u: &SpectralField) -> Result<()> {
        self.grid.spec().ensure_same(u.grid())?;
        if u.ncomp() != self.grid.spec().dim {
            return Err(Error::InvalidGrid(format!(
                "velocity has {} components on a {}d grid",
                u.ncomp(),
                self.grid.spec().dim
            )));
        }
        Ok(())
    }

    /// `N(u) = div(u (x) u) - 1/2 (div u) u`, formed pseudospectrally.
    ///
    /// Products are taken in physical space from the dealiased input and
    /// dealiased again afterwards, which keeps `(N(u), u) = 0` to round-off.
    /// The mean mode of the result is removed since `u` has zero mean.
    pub fn nonlinear(&self, u: &SpectralField) -> SpectralField {
        let sg = &self.grid;
        let dim = sg.spec().dim;
        let u_hat = sg.dealias(u);
        let u_phys = sg.to_physical(&u_hat).expect("same grid");
        let div = sg.to_physical(&sg.divergence(&u_hat)).expect("same grid");
        let div = div.component(0);

        let mut out = SpectralField::zeros(*sg.spec(), dim);
        let mut product = PhysicalField::zeros(*sg.spec(), 1);
        let i = num_complex::Complex64::new(0.0, 1.0);
        for a in 0..dim {
            for b in a..dim {
                {
                    let (ua, ub) = (u_phys.component(a), u_phys.component(b));
                    for (pv, (x, y)) in product.component_mut(0).iter_mut().zip(ua.iter().zip(ub)) {
                        *pv = x * y;
                    }
                }
                let mut hat = sg.to_spectral(&product).expect("same grid");
                sg.dealias_in_place(&mut hat);
                let hat = hat.component(0);
                for p in 0..hat.len() {
                    let k = &sg.kdiff[p];
                    out.component_mut(a)[p] += i * k[b] * hat[p];
                    if a != b {
                        out.component_mut(b)[p] += i * k[a] * hat[p];
                    }
                }
            }
        }
        for a in 0..dim {
            for (pv, (d, x)) in product
                .component_mut(0)
                .iter_mut()
                .zip(div.iter().zip(u_phys.component(a)))
            {
                *pv = d * x;
            }
            let mut hat = sg.to_spectral(&product).expect("same grid");
            sg.dealias_in_place(&mut hat);
            for (o, h) in out.component_mut(a).iter_mut().zip(hat.component(0)) {
                *o -= h * 0.5;
            }
        }
        sg.project(&mut out);
        out
    }

    /// `nu lap u + gamma grad div u`.
    pub fn linear(&self, u: &SpectralField) -> SpectralField {
        let mut out = self.grid.laplacian(u).scaled(self.params.nu);
        if self.params.gamma != 0.0 {
            out.axpy(self.params.gamma, &self.grid.grad_div(u));
        }
        out
    }

    /// Full right-hand side `f - N(u) + nu lap u + gamma grad div u`.
    pub fn rhs(&self, u: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
        self.check_velocity(u)?;
        self.check_velocity(f)?;
        if !u.is_finite() {
            return Err(Error::NonFinite("velocity"));
        }
        let mut out = f.add_scaled(-1.0, &self.nonlinear(u));
        out.axpy(1.0, &self.linear(u));
        Ok(out)
    }

    /// Solves `(I + a (nu |k|^2 I + gamma k k^T)) x = b` mode by mode.
    ///
    /// The k-parallel and k-perpendicular parts of `b` decouple, so each is
    /// scaled by its own eigenvalue.
    pub(crate) fn implicit_solve(&self, b: &mut SpectralField, a: f64) {
        let sg = &self.grid;
        let dim = sg.spec().dim;
        let FlowParams { nu, gamma } = self.params;
        for p in 0..sg.spec().len() {
            let k = &sg.kdiff[p];
            let kt2: f64 = k[..dim].iter().map(|v| v * v).sum();
            let perp = 1.0 / (1.0 + a * nu * sg.ksq[p]);
            if kt2 == 0.0 || gamma == 0.0 {
                for c in 0..dim {
                    b.component_mut(c)[p] *= perp;
                }
                continue;
            }
            let par = 1.0 / (1.0 + a * nu * sg.ksq[p] + a * gamma * kt2);
            let kdotb: num_complex::Complex64 = (0..dim)
                .map(|c| b.component(c)[p] * k[c])
                .sum::<num_complex::Complex64>()
                / kt2;
            for c in 0..dim {
                let z = b.component(c)[p];
                let parallel = kdotb * k[c];
                b.component_mut(c)[p] = (z - parallel) * perp + parallel * par;
            }
        }
    }
}

#[cfg(test)]
mod tests;
