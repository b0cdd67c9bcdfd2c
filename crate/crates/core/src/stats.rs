//! Time-averaged statistics and the discrete energy-inequality audit.
//!
//! All norms are volume-normalized. Time integrals use the trapezoid rule;
//! the per-step budget residual uses the midpoint state
//! `u_mid = (u_prev + u_next) / 2`:
//!
//! ```text
//! r = |u_next|^2/2 - |u_prev|^2/2 + dt eps(u_mid) - dt (f, u_mid)
//! ```
//!
//! A positive `r` means the step violated the energy inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::FlowParams;
use crate::spectral::{SpectralField, SpectralGrid};

/// `eps(u) = nu mean|grad u|^2 + gamma mean (div u)^2`, split by channel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Dissipation {
    pub total: f64,
    pub nu: f64,
    pub gamma: f64,
}

/// Computes the dissipation rate spectrally (Parseval).
pub fn dissipation_rate(sg: &SpectralGrid, u: &SpectralField, params: &FlowParams) -> Dissipation {
    let (grad_sq, div_sq) = gradient_and_divergence_sq(sg, u);
    let nu = params.nu * grad_sq;
    let gamma = params.gamma * div_sq;
    Dissipation {
        total: nu + gamma,
        nu,
        gamma,
    }
}

/// `(mean |grad u|^2, mean (div u)^2)` in one pass over the modes.
fn gradient_and_divergence_sq(sg: &SpectralGrid, u: &SpectralField) -> (f64, f64) {
    let dim = sg.spec().dim;
    let mut grad_sq = 0.0;
    let mut div_sq = 0.0;
    for p in 0..sg.spec().len() {
        let k = &sg.kdiff[p];
        let k2: f64 = k[..dim].iter().map(|v| v * v).sum();
        let mut kdotu = num_complex::Complex64::new(0.0, 0.0);
        for c in 0..dim {
            let z = u.component(c)[p];
            grad_sq += k2 * z.norm_sqr();
            kdotu += z * k[c];
        }
        div_sq += kdotu.norm_sqr();
    }
    (grad_sq, div_sq)
}

/// Instantaneous diagnostics of one state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StateDiagnostics {
    /// `mean |u|^2 / 2`.
    pub kinetic_energy: f64,
    /// `mean |u|^2`.
    pub u_sq: f64,
    pub eps: Dissipation,
    /// `mean (div u)^2`.
    pub div_sq: f64,
    /// `(f, u)`, volume-normalized.
    pub power: f64,
}

impl StateDiagnostics {
    pub fn of(
        sg: &SpectralGrid,
        u: &SpectralField,
        params: &FlowParams,
        f: Option<&SpectralField>,
    ) -> Self {
        let u_sq = u.volume_norm_sq();
        let (grad_sq, div_sq) = gradient_and_divergence_sq(sg, u);
        let eps = Dissipation {
            total: params.nu * grad_sq + params.gamma * div_sq,
            nu: params.nu * grad_sq,
            gamma: params.gamma * div_sq,
        };
        StateDiagnostics {
            kinetic_energy: 0.5 * u_sq,
            u_sq,
            eps,
            div_sq,
            power: f.map_or(0.0, |f| f.inner(u)),
        }
    }
}

/// Discrete energy-budget residual of one step; positive means violation.
pub fn budget_residual(
    sg: &SpectralGrid,
    params: &FlowParams,
    f: Option<&SpectralField>,
    u_prev: &SpectralField,
    u_next: &SpectralField,
    dt: f64,
) -> f64 {
    let mid = u_prev.add_scaled(1.0, u_next).scaled(0.5);
    let m = StateDiagnostics::of(sg, &mid, params, f);
    0.5 * u_next.volume_norm_sq() - 0.5 * u_prev.volume_norm_sq() + dt * m.eps.total - dt * m.power
}

/// One row of the time-series output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub kinetic_energy: f64,
    pub eps_nu: f64,
    pub eps_gamma: f64,
    pub div_norm_sq: f64,
    pub budget_residual: f64,
}

/// Time-accumulated integrals over the averaging window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningStats {
    /// Steps whose midpoint lies before `burn_in` are not accumulated.
    pub burn_in: f64,
    pub t_accum: f64,
    pub int_eps: f64,
    pub int_eps_nu: f64,
    pub int_eps_gamma: f64,
    pub int_u_sq: f64,
    pub int_div_sq: f64,
    pub steps: u64,
    /// Largest positive per-step residual, over all steps including burn-in.
    pub budget_residual_max: f64,
    /// Largest signed residual seen, `None` before the first step.
    pub residual_peak: Option<f64>,
}

impl RunningStats {
    pub fn new(burn_in: f64) -> Self {
        RunningStats {
            burn_in,
            t_accum: 0.0,
            int_eps: 0.0,
            int_eps_nu: 0.0,
            int_eps_gamma: 0.0,
            int_u_sq: 0.0,
            int_div_sq: 0.0,
            steps: 0,
            budget_residual_max: 0.0,
            residual_peak: None,
        }
    }

    /// Folds in one step from `t_prev` to `t_prev + dt`.
    pub fn record(
        &mut self,
        t_prev: f64,
        dt: f64,
        prev: &StateDiagnostics,
        next: &StateDiagnostics,
        residual: f64,
    ) -> StepRecord {
        self.budget_residual_max = self.budget_residual_max.max(residual);
        self.residual_peak = Some(self.residual_peak.map_or(residual, |r| r.max(residual)));
        if t_prev + 0.5 * dt >= self.burn_in {
            let half = 0.5 * dt;
            self.t_accum += dt;
            self.int_eps += half * (prev.eps.total + next.eps.total);
            self.int_eps_nu += half * (prev.eps.nu + next.eps.nu);
            self.int_eps_gamma += half * (prev.eps.gamma + next.eps.gamma);
            self.int_u_sq += half * (prev.u_sq + next.u_sq);
            self.int_div_sq += half * (prev.div_sq + next.div_sq);
            self.steps += 1;
        }
        StepRecord {
            t: t_prev + dt,
            kinetic_energy: next.kinetic_energy,
            eps_nu: next.eps.nu,
            eps_gamma: next.eps.gamma,
            div_norm_sq: next.div_sq,
            budget_residual: residual,
        }
    }

    /// Computes diagnostics and the residual from two consecutive states.
    #[allow(clippy::too_many_arguments)]
    pub fn update(
        &mut self,
        sg: &SpectralGrid,
        params: &FlowParams,
        f: Option<&SpectralField>,
        u_prev: &SpectralField,
        u_next: &SpectralField,
        t_prev: f64,
        dt: f64,
    ) -> StepRecord {
        let prev = StateDiagnostics::of(sg, u_prev, params, f);
        let next = StateDiagnostics::of(sg, u_next, params, f);
        let r = budget_residual(sg, params, f, u_prev, u_next, dt);
        self.record(t_prev, dt, &prev, &next, r)
    }

    /// Combines accumulators over disjoint windows.
    pub fn merge(&self, other: &RunningStats) -> RunningStats {
        RunningStats {
            burn_in: self.burn_in.min(other.burn_in),
            t_accum: self.t_accum + other.t_accum,
            int_eps: self.int_eps + other.int_eps,
            int_eps_nu: self.int_eps_nu + other.int_eps_nu,
            int_eps_gamma: self.int_eps_gamma + other.int_eps_gamma,
            int_u_sq: self.int_u_sq + other.int_u_sq,
            int_div_sq: self.int_div_sq + other.int_div_sq,
            steps: self.steps + other.steps,
            budget_residual_max: self.budget_residual_max.max(other.budget_residual_max),
            residual_peak: match (self.residual_peak, other.residual_peak) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        }
    }

    pub fn finalize(&self) -> Result<Averages> {
        if self.t_accum <= 0.0 {
            return Err(Error::NoAveragingWindow);
        }
        let w = self.t_accum;
        Ok(Averages {
            window: w,
            eps_avg: self.int_eps / w,
            eps_nu_avg: self.int_eps_nu / w,
            eps_gamma_avg: self.int_eps_gamma / w,
            u_t: (self.int_u_sq / w).sqrt(),
            div_norm_sq_avg: self.int_div_sq / w,
        })
    }
}

/// Finite-window averages; `u_t` is the finite-time estimate of `U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub window: f64,
    pub eps_avg: f64,
    pub eps_nu_avg: f64,
    pub eps_gamma_avg: f64,
    pub u_t: f64,
    pub div_norm_sq_avg: f64,
}

impl Averages {
    /// `<eps> L / U_T^3`.
    pub fn normalized_dissipation(&self, length: f64) -> f64 {
        self.eps_avg * length / self.u_t.powi(3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{GridSpec, PhysicalField};
    use std::f64::consts::PI;

    fn grid(dim: usize, n: usize) -> SpectralGrid {
        SpectralGrid::new(GridSpec::new(dim, n, 2.0 * PI).unwrap()).unwrap()
    }

    #[test]
    fn shear_dissipation() {
        let sg = grid(3, 16);
        let u = sg
            .analyze(&PhysicalField::from_fn(*sg.spec(), 3, |x| {
                [x[1].sin(), 0.0, 0.0]
            }))
            .unwrap();
        let d = dissipation_rate(
            &sg,
            &u,
            &FlowParams {
                nu: 1.0,
                gamma: 7.0,
            },
        );
        assert!((d.total - 0.5).abs() < 1e-14);
        assert!((d.nu - 0.5).abs() < 1e-14);
        assert!(d.gamma.abs() < 1e-28);
    }

    #[test]
    fn gradient_field_gamma_channel() {
        let sg = grid(2, 16);
        // u = grad sin(x) = (cos x, 0), div u = -sin x
        let u = sg
            .analyze(&PhysicalField::from_fn(*sg.spec(), 2, |x| {
                [x[0].cos(), 0.0, 0.0]
            }))
            .unwrap();
        let d = dissipation_rate(
            &sg,
            &u,
            &FlowParams {
                nu: 0.0,
                gamma: 1.0,
            },
        );
        assert!((d.gamma - 0.5).abs() < 1e-14);
        assert_eq!(d.nu, 0.0);
        let zero = SpectralField::zeros(*sg.spec(), 2);
        assert_eq!(
            dissipation_rate(
                &sg,
                &zero,
                &FlowParams {
                    nu: 1.0,
                    gamma: 1.0
                }
            ),
            Dissipation::default()
        );
    }

    #[test]
    fn parseval_matches_physical_quadrature() {
        let sg = grid(3, 16);
        let u = sg.random_field(3, 5, 21);
        let params = FlowParams {
            nu: 0.3,
            gamma: 1.7,
        };
        let d = dissipation_rate(&sg, &u, &params);
        let grad = sg.to_physical(&sg.gradient(&u)).unwrap();
        let div = sg.to_physical(&sg.divergence(&u)).unwrap();
        let nu = params.nu * grad.volume_norm_sq();
        let gamma = params.gamma * div.volume_norm_sq();
        assert!((d.nu - nu).abs() <= 1e-10 * nu);
        assert!((d.gamma - gamma).abs() <= 1e-10 * gamma);
    }

    fn constant_diag(eps: f64, u_sq: f64) -> StateDiagnostics {
        StateDiagnostics {
            kinetic_energy: 0.5 * u_sq,
            u_sq,
            eps: Dissipation {
                total: eps,
                nu: 0.75 * eps,
                gamma: 0.25 * eps,
            },
            div_sq: 0.0,
            power: 0.0,
        }
    }

    #[test]
    fn constant_signal_averages() {
        let mut s = RunningStats::new(0.0);
        let d = constant_diag(2.5, 4.0);
        let dt = 0.1;
        let mut last = 0.0;
        for k in 0..50 {
            s.record(k as f64 * dt, dt, &d, &d, 0.0);
            assert!(s.int_eps > last);
            last = s.int_eps;
        }
        assert!((s.int_eps - 2.5 * 5.0).abs() < 1e-12);
        let a = s.finalize().unwrap();
        assert!((a.eps_avg - 2.5).abs() < 1e-12);
        assert!((a.u_t - 2.0).abs() < 1e-12);
        assert!((s.int_eps - s.int_eps_nu - s.int_eps_gamma).abs() <= 1e-12 * s.int_eps);
    }

    #[test]
    fn burn_in_is_excluded() {
        let mut s = RunningStats::new(1.0);
        let d = constant_diag(1.0, 1.0);
        for k in 0..10 {
            s.record(k as f64 * 0.1, 0.1, &d, &d, -1.0);
        }
        assert_eq!(s.t_accum, 0.0);
        assert_eq!(s.int_eps, 0.0);
        assert!(matches!(s.finalize(), Err(Error::NoAveragingWindow)));
        s.record(1.0, 0.1, &d, &d, 0.5);
        assert!((s.t_accum - 0.1).abs() < 1e-15);
        assert_eq!(s.budget_residual_max, 0.5);
        assert_eq!(s.residual_peak, Some(0.5));
    }

    #[test]
    fn merge_is_order_insensitive() {
        let mk = |eps: f64, r: f64| {
            let mut s = RunningStats::new(0.0);
            let d = constant_diag(eps, eps * 2.0);
            s.record(0.0, 0.3, &d, &d, r);
            s
        };
        let (a, b, c) = (mk(1.0, -0.1), mk(2.0, 0.2), mk(3.5, 0.05));
        let left = a.merge(&b).merge(&c);
        let right = c.merge(&a.merge(&b));
        assert!((left.int_eps - right.int_eps).abs() <= 1e-12 * left.int_eps);
        assert_eq!(left.budget_residual_max, right.budget_residual_max);
        assert_eq!(left.steps, 3);
    }
}
