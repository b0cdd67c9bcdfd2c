//! Method of manufactured solutions.
//!
//! A target `u*(x, t)` supplies its value and derivatives pointwise; the
//! matching force is assembled from those analytic values, independently of
//! the pseudospectral operators used by the solver.

use serde::{Deserialize, Serialize};

use super::stepper::{Forcing, StepperConfig};
use super::{FlowParams, Solver};
use crate::error::{Error, Result};
use crate::spectral::{GridSpec, PhysicalField, SpectralField, SpectralGrid};

/// Pointwise data of a manufactured velocity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointValue {
    pub u: [f64; 3],
    pub du_dt: [f64; 3],
    /// `grad[i][j] = d u_i / d x_j`.
    pub grad: [[f64; 3]; 3],
    pub laplacian: [f64; 3],
    pub grad_div: [f64; 3],
}

pub trait ManufacturedSolution {
    fn eval(&self, x: [f64; 3], t: f64) -> PointValue;

    /// `f = u_t + (u.grad)u + 1/2 (div u) u - nu lap u - gamma grad div u`,
    /// the pointwise expansion of the model operator.
    fn forcing(&self, x: [f64; 3], t: f64, params: &FlowParams, dim: usize) -> [f64; 3] {
        let v = self.eval(x, t);
        let div: f64 = (0..dim).map(|j| v.grad[j][j]).sum();
        let mut f = [0.0; 3];
        for i in 0..dim {
            let adv: f64 = (0..dim).map(|j| v.u[j] * v.grad[i][j]).sum();
            f[i] = v.du_dt[i] + adv + 0.5 * div * v.u[i]
                - params.nu * v.laplacian[i]
                - params.gamma * v.grad_div[i];
        }
        f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum TimeFactor {
    Cos(f64),
    Sin(f64),
    Exp(f64),
}

impl TimeFactor {
    fn value(&self, t: f64) -> (f64, f64) {
        match *self {
            TimeFactor::Cos(w) => ((w * t).cos(), -w * (w * t).sin()),
            TimeFactor::Sin(w) => ((w * t).sin(), w * (w * t).cos()),
            TimeFactor::Exp(r) => ((r * t).exp(), r * (r * t).exp()),
        }
    }
}

/// `amp * T(t) * s(k0 m x_axis)` in component `comp`, `s` = sin or cos.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TrigTerm {
    comp: usize,
    axis: usize,
    m: f64,
    cosine: bool,
    amp: f64,
    time: TimeFactor,
}

/// Sums of separable single-axis trigonometric terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigFamily {
    k0: f64,
    terms: Vec<TrigTerm>,
}

impl TrigFamily {
    pub fn zero(grid: &GridSpec) -> Self {
        TrigFamily {
            k0: grid.k0(),
            terms: Vec::new(),
        }
    }

    /// `(A exp(-nu k0^2 t) sin(k0 y), 0, 0)`: an exact unforced solution.
    pub fn shear_decay(grid: &GridSpec, nu: f64, amp: f64) -> Self {
        let k0 = grid.k0();
        TrigFamily {
            k0,
            terms: vec![TrigTerm {
                comp: 0,
                axis: 1,
                m: 1.0,
                cosine: false,
                amp,
                time: TimeFactor::Exp(-nu * k0 * k0),
            }],
        }
    }

    /// Time-periodic field with nonzero divergence and a nontrivial
    /// nonlinearity.
    pub fn divergent(grid: &GridSpec) -> Self {
        let t = |comp, axis, m, cosine, amp, time| TrigTerm {
            comp,
            axis,
            m,
            cosine,
            amp,
            time,
        };
        let mut terms = vec![
            t(0, 0, 1.0, false, 1.0, TimeFactor::Cos(1.0)),
            t(0, 1, 1.0, true, 0.5, TimeFactor::Sin(1.0)),
            t(1, 1, 1.0, false, 0.5, TimeFactor::Cos(2.0)),
            t(1, 0, 2.0, false, 0.3, TimeFactor::Exp(-0.5)),
        ];
        if grid.dim == 3 {
            terms.push(t(2, 2, 1.0, false, 0.4, TimeFactor::Cos(1.5)));
            terms.push(t(2, 0, 1.0, true, 0.2, TimeFactor::Sin(1.0)));
            terms.push(t(0, 2, 1.0, true, 0.25, TimeFactor::Cos(0.5)));
        }
        TrigFamily {
            k0: grid.k0(),
            terms,
        }
    }
}

impl ManufacturedSolution for TrigFamily {
    fn eval(&self, x: [f64; 3], t: f64) -> PointValue {
        let mut v = PointValue::default();
        for term in &self.terms {
            let k = self.k0 * term.m;
            let (s, c) = (k * x[term.axis]).sin_cos();
            let (space, dspace, ddspace) = if term.cosine {
                (c, -k * s, -k * k * c)
            } else {
                (s, k * c, -k * k * s)
            };
            let (tv, dtv) = term.time.value(t);
            let (i, j) = (term.comp, term.axis);
            v.u[i] += term.amp * tv * space;
            v.du_dt[i] += term.amp * dtv * space;
            v.grad[i][j] += term.amp * tv * dspace;
            v.laplacian[i] += term.amp * tv * ddspace;
            if i == j {
                v.grad_div[i] += term.amp * tv * ddspace;
            }
        }
        v
    }
}

/// Named targets selectable from a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MmsTarget {
    Zero,
    ShearDecay,
    Divergent,
}

impl MmsTarget {
    pub fn family(&self, grid: &GridSpec, params: &FlowParams) -> TrigFamily {
        match self {
            MmsTarget::Zero => TrigFamily::zero(grid),
            MmsTarget::ShearDecay => TrigFamily::shear_decay(grid, params.nu, 1.0),
            MmsTarget::Divergent => TrigFamily::divergent(grid),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsReport {
    pub dt: f64,
    pub steps: usize,
    pub t_end: f64,
    /// Max over steps of the volume-normalized L2 error.
    pub max_error: f64,
    pub final_error: f64,
}

fn sample_velocity(target: &dyn ManufacturedSolution, grid: GridSpec, t: f64) -> PhysicalField {
    PhysicalField::from_fn(grid, grid.dim, |x| target.eval(x, t).u)
}

/// Runs the stepper against `target` from 0 to `cfg.t_end` at fixed `cfg.dt`.
pub fn run_mms(
    target: &dyn ManufacturedSolution,
    params: FlowParams,
    grid: GridSpec,
    cfg: &StepperConfig,
) -> Result<MmsReport> {
    cfg.validate()?;
    let t_end = cfg
        .t_end
        .ok_or_else(|| Error::config("stepper.t_end", "required for mms runs"))?;
    let sg = SpectralGrid::new(grid)?;
    let solver = Solver::new(sg.clone(), params)?;
    let steps = (t_end / cfg.dt).round().max(1.0) as usize;
    let dt = cfg.dt;

    let force_at = |t: f64| -> SpectralField {
        let f = PhysicalField::from_fn(grid, grid.dim, |x| target.forcing(x, t, &params, grid.dim));
        sg.analyze(&f).expect("same grid")
    };
    let forcing = Forcing::Unsteady(&force_at);

    let mut u = sg.analyze(&sample_velocity(target, grid, 0.0))?;
    let mut max_error: f64 = 0.0;
    let mut err = 0.0;
    for k in 0..steps {
        let t = k as f64 * dt;
        u = solver.step_spectral(&u, t, dt, &forcing)?;
        let exact = sg.analyze(&sample_velocity(target, grid, (k + 1) as f64 * dt))?;
        err = u.add_scaled(-1.0, &exact).volume_norm_sq().sqrt();
        max_error = max_error.max(err);
    }
    Ok(MmsReport {
        dt,
        steps,
        t_end: steps as f64 * dt,
        max_error,
        final_error: err,
    })
}
