//! Algebra of the dissipation bound and of the admissible grad-div windows.
//!
//! With `Re = LU/nu` and `R_gamma = LU/gamma`, weak solutions satisfy
//!
//! ```text
//! <eps> <= (6 + 1/Re + kappa^2 R_gamma / 4) U^3 / L
//! ```
//!
//! Requiring the grad-div contribution `kappa^2 R_gamma` to sit between
//! `1/Re` and `2` gives the mesh-independent window
//! `kappa^2/24 <= gamma/(LU) <= kappa^2 Re / 4`. Replacing the Kolmogorov
//! scale `eta = Re^(-3/4) L` by the mesh width `h` gives the mesh-dependent
//! upper end `kappa^2/4 (h/L)^(-4/3)`.
//!
//! The constant 6 comes from a three-component trace bound and is used for
//! 2d runs too, where it is conservative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::ForceStats;
use crate::solver::FlowParams;

/// Constant of the inertial term in the bound.
pub const INERTIAL_CONSTANT: f64 = 6.0;
/// Denominator of the lower window end, `kappa^2 / 24`.
pub const LOWER_DENOMINATOR: f64 = 24.0;
/// Denominator of the upper window end, `kappa^2 / 4`.
pub const UPPER_DENOMINATOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionInput {
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub nu: f64,
    pub kappa: f64,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub h: Option<f64>,
}

impl CriterionInput {
    pub fn new(u: f64, l: f64, nu: f64, kappa: f64) -> Self {
        CriterionInput {
            u,
            l,
            nu,
            kappa,
            gamma: None,
            h: None,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }

    /// Checks positivity and `kappa >= 1`; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Criterion(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("U", self.u)?;
        positive("L", self.l)?;
        positive("nu", self.nu)?;
        if !(self.kappa.is_finite() && self.kappa >= 1.0) {
            return Err(Error::Criterion(format!(
                "kappa must be >= 1, got {}",
                self.kappa
            )));
        }
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::Criterion(format!("gamma must be >= 0, got {g}")));
            }
        }
        let mut warnings = Vec::new();
        if let Some(h) = self.h {
            positive("h", h)?;
            if h > self.l {
                warnings.push(format!("h = {h} exceeds L = {}", self.l));
            }
        }
        Ok(warnings)
    }
}

/// `Re` and `R_gamma`; `r_gamma` is `+inf` when `gamma = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Groups {
    pub re: f64,
    pub r_gamma: Option<f64>,
    pub gamma_vanishes: bool,
}

pub fn nondimensional_groups(input: &CriterionInput) -> Result<Groups> {
    input.validate()?;
    let lu = input.l * input.u;
    let (r_gamma, gamma_vanishes) = match input.gamma {
        None => (None, false),
        Some(0.0) => (Some(f64::INFINITY), true),
        Some(g) => (Some(lu / g), false),
    };
    Ok(Groups {
        re: lu / input.nu,
        r_gamma,
        gamma_vanishes,
    })
}

/// The dissipation bound and its incompressible (`gamma`-free) part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsBound {
    /// `6 + 1/Re + kappa^2 R_gamma / 4`; infinite when `gamma = 0`.
    #[serde(with = "crate::jsonnum")]
    pub coefficient: f64,
    #[serde(with = "crate::jsonnum")]
    pub value: f64,
    /// `6 + 1/Re`.
    pub nse_coefficient: f64,
    pub nse_value: f64,
    pub gamma_vanishes: bool,
}

pub fn eps_bound(input: &CriterionInput) -> Result<EpsBound> {
    let groups = nondimensional_groups(input)?;
    let r_gamma = groups
        .r_gamma
        .ok_or_else(|| Error::Criterion("gamma is required for the bound".into()))?;
    let scale = input.u.powi(3) / input.l;
    let nse_coefficient = INERTIAL_CONSTANT + 1.0 / groups.re;
    let coefficient = nse_coefficient + 0.25 * input.kappa * input.kappa * r_gamma;
    Ok(EpsBound {
        coefficient,
        value: coefficient * scale,
        nse_coefficient,
        nse_value: nse_coefficient * scale,
        gamma_vanishes: groups.gamma_vanishes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    MeshIndependent,
    MeshDependent,
}

/// Admissible `gamma` interval; an empty window is reported, never widened.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaWindow {
    pub regime: Regime,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub empty: bool,
}

impl GammaWindow {
    fn new(regime: Regime, gamma_lo: f64, gamma_hi: f64) -> Self {
        GammaWindow {
            regime,
            gamma_lo,
            gamma_hi,
            empty: gamma_lo > gamma_hi,
        }
    }

    pub fn contains(&self, gamma: f64) -> bool {
        !self.empty && gamma >= self.gamma_lo && gamma <= self.gamma_hi
    }
}

fn lower_end(input: &CriterionInput) -> f64 {
    input.kappa * input.kappa / LOWER_DENOMINATOR * input.l * input.u
}

pub fn gamma_range_mesh_independent(input: &CriterionInput) -> Result<GammaWindow> {
    let re = nondimensional_groups(input)?.re;
    let hi = input.kappa * input.kappa / UPPER_DENOMINATOR * re * input.l * input.u;
    Ok(GammaWindow::new(
        Regime::MeshIndependent,
        lower_end(input),
        hi,
    ))
}

pub fn gamma_range_mesh_dependent(input: &CriterionInput) -> Result<GammaWindow> {
    input.validate()?;
    let h = input
        .h
        .ok_or_else(|| Error::Criterion("mesh width h is required".into()))?;
    let hi = input.kappa * input.kappa / UPPER_DENOMINATOR
        * (h / input.l).powf(-4.0 / 3.0)
        * input.l
        * input.u;
    Ok(GammaWindow::new(
        Regime::MeshDependent,
        lower_end(input),
        hi,
    ))
}

/// Kolmogorov microscale `eta = Re^(-3/4) L`.
pub fn kolmogorov_eta(re: f64, l: f64) -> Result<f64> {
    if !(re.is_finite() && re > 0.0) {
        return Err(Error::Criterion(format!("Re must be positive, got {re}")));
    }
    Ok(re.powf(-0.75) * l)
}

/// Reynolds number recovered from `eta`: `(eta / L)^(-4/3)`.
pub fn reynolds_from_eta(eta: f64, l: f64) -> f64 {
    (eta / l).powf(-4.0 / 3.0)
}

/// Everything the `criterion` query reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub input: CriterionInput,
    #[serde(rename = "Re")]
    pub re: f64,
    #[serde(rename = "R_gamma", with = "crate::jsonnum::option")]
    pub r_gamma: Option<f64>,
    pub eta: f64,
    pub eps_bound: Option<EpsBound>,
    pub mesh_independent: GammaWindow,
    pub mesh_dependent: Option<GammaWindow>,
    pub in_window_mesh_independent: Option<bool>,
    pub in_window_mesh_dependent: Option<bool>,
    pub warnings: Vec<String>,
}

impl CriterionReport {
    pub fn evaluate(input: &CriterionInput) -> Result<Self> {
        let warnings = input.validate()?;
        let groups = nondimensional_groups(input)?;
        let mesh_independent = gamma_range_mesh_independent(input)?;
        let mesh_dependent = match input.h {
            Some(_) => Some(gamma_range_mesh_dependent(input)?),
            None => None,
        };
        let eps = match input.gamma {
            Some(_) => Some(eps_bound(input)?),
            None => None,
        };
        Ok(CriterionReport {
            input: *input,
            re: groups.re,
            r_gamma: groups.r_gamma,
            eta: kolmogorov_eta(groups.re, input.l)?,
            eps_bound: eps,
            mesh_independent,
            mesh_dependent,
            in_window_mesh_independent: input.gamma.map(|g| mesh_independent.contains(g)),
            in_window_mesh_dependent: input
                .gamma
                .and_then(|g| mesh_dependent.map(|w| w.contains(g))),
            warnings,
        })
    }
}

/// Coefficients of the model rescaled by `x* = x/L`, `u* = u/U`, `t* = tU/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensionless {
    pub length_scale: f64,
    pub velocity_scale: f64,
    pub time_scale: f64,
    /// `nu / (LU) = 1/Re`.
    pub nu_star: f64,
    /// `gamma / (LU) = 1/R_gamma`.
    pub gamma_star: f64,
    /// `F / U^2`.
    pub force_star: f64,
}

impl Dimensionless {
    /// Maps back to `(params, F)`.
    pub fn to_dimensional(&self) -> (FlowParams, f64) {
        let lu = self.length_scale * self.velocity_scale;
        (
            FlowParams {
                nu: self.nu_star * lu,
                gamma: self.gamma_star * lu,
            },
            self.force_star * self.velocity_scale * self.velocity_scale,
        )
    }
}

pub fn nondimensionalize_run(
    params: &FlowParams,
    force: &ForceStats,
    velocity_scale: f64,
) -> Result<Dimensionless> {
    if !(velocity_scale.is_finite() && velocity_scale > 0.0) {
        return Err(Error::Criterion(format!(
            "velocity scale must be positive, got {velocity_scale}"
        )));
    }
    if !(force.l.is_finite() && force.l > 0.0) {
        return Err(Error::Criterion(format!(
            "length scale must be positive, got {}",
            force.l
        )));
    }
    let lu = force.l * velocity_scale;
    Ok(Dimensionless {
        length_scale: force.l,
        velocity_scale,
        time_scale: force.l / velocity_scale,
        nu_star: params.nu / lu,
        gamma_star: params.gamma / lu,
        force_star: force.f / (velocity_scale * velocity_scale),
    })
}
