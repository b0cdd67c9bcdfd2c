use serde::{Deserialize, Serialize};

use super::Solver;
use crate::error::{Error, Result};
use crate::spectral::{PhysicalField, SpectralField};

/// Lower bound on `max |u|` used by [`suggest_dt`].
pub const VELOCITY_FLOOR: f64 = 1e-12;

fn default_cfl() -> f64 {
    0.4
}

/// Time integration scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Two-stage, second-order IMEX Runge-Kutta of Ascher, Ruuth and
    /// Spiteri: L-stable SDIRK for `nu lap + gamma grad div`, explicit for
    /// the nonlinearity and the force.
    #[default]
    #[serde(rename = "imex-ars222")]
    ImexArs222,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_cfl")]
    pub cfl_target: f64,
    #[serde(default)]
    pub t_end: Option<f64>,
    /// Choose each step from [`suggest_dt`] (capped at `dt`).
    #[serde(default)]
    pub adaptive: bool,
}

impl StepperConfig {
    pub fn new(dt: f64) -> Self {
        StepperConfig {
            dt,
            scheme: Scheme::default(),
            cfl_target: default_cfl(),
            t_end: None,
            adaptive: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config(
                "stepper.dt",
                format!("must be > 0, got {}", self.dt),
            ));
        }
        if !(self.cfl_target > 0.0 && self.cfl_target < 1.0) {
            return Err(Error::config(
                "stepper.cfl_target",
                format!("must lie in (0, 1), got {}", self.cfl_target),
            ));
        }
        if let Some(t) = self.t_end {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::config(
                    "stepper.t_end",
                    format!("must be > 0, got {t}"),
                ));
            }
        }
        Ok(())
    }
}

/// `cfl_target * dx / max(|u|_inf, floor)`, capped at `cfg.dt`.
pub fn suggest_dt(u: &PhysicalField, cfg: &StepperConfig) -> f64 {
    let umax = u.max_magnitude().max(VELOCITY_FLOOR);
    (cfg.cfl_target * u.grid().spacing() / umax).min(cfg.dt)
}

/// Body force seen by the stepper.
pub enum Forcing<'a> {
    Zero,
    Steady(&'a SpectralField),
    /// Evaluated at the explicit stage times.
    Unsteady(&'a dyn Fn(f64) -> SpectralField),
}

impl Forcing<'_> {
    fn at(&self, t: f64) -> Option<std::borrow::Cow<'_, SpectralField>> {
        match self {
            Forcing::Zero => None,
            Forcing::Steady(f) => Some(std::borrow::Cow::Borrowed(*f)),
            Forcing::Unsteady(g) => Some(std::borrow::Cow::Owned(g(t))),
        }
    }
}

// ARS(2,2,2) coefficients.
const DELTA: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
const DELTA_HAT: f64 = 1.0 - 1.0 / (2.0 * DELTA);

impl Solver {
    /// Explicit part `f(t) - N(u)`.
    fn explicit(&self, u: &SpectralField, force: &Forcing, t: f64) -> SpectralField {
        let n = self.nonlinear(u);
        match force.at(t) {
            Some(f) => f.add_scaled(-1.0, &n),
            None => n.scaled(-1.0),
        }
    }

    /// One step from `t` to `t + dt`, spectral in and out.
    ///
    /// The input should be a projected (zero-mean, dealiased, symmetric)
    /// spectrum; the output is projected again, so the mean mode stays zero
    /// and the coefficients are exact conjugate pairs.
    pub fn step_spectral(
        &self,
        u: &SpectralField,
        t: f64,
        dt: f64,
        force: &Forcing,
    ) -> Result<SpectralField> {
        self.check_velocity(u)?;
        if !u.is_finite() {
            return Err(Error::NonFinite("velocity"));
        }
        let a = dt * DELTA;

        let e1 = self.explicit(u, force, t);
        let mut y2 = u.add_scaled(dt * DELTA, &e1);
        self.implicit_solve(&mut y2, a);
        self.grid.symmetrize(&mut y2);

        let e2 = self.explicit(&y2, force, t + DELTA * dt);
        let mut y3 = u.add_scaled(dt * DELTA_HAT, &e1);
        y3.axpy(dt * (1.0 - DELTA_HAT), &e2);
        y3.axpy(dt * (1.0 - DELTA), &self.linear(&y2));
        self.implicit_solve(&mut y3, a);
        self.grid.project(&mut y3);

        if !y3.is_finite() {
            return Err(Error::BlowUp {
                t: t + dt,
                checkpoint: None,
            });
        }
        Ok(y3)
    }

    /// One step on the canonical physical state.
    pub fn step(
        &self,
        u: &PhysicalField,
        t: f64,
        dt: f64,
        force: &Forcing,
    ) -> Result<PhysicalField> {
        let hat = self.grid.analyze(u)?;
        let next = self.step_spectral(&hat, t, dt, force)?;
        self.grid.to_physical(&next)
    }
}
