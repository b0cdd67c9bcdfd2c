//! Temporal convergence study driven by an MMS config.

use serde::{Deserialize, Serialize};

use super::config::MmsConfig;
use crate::error::Result;
use crate::solver::{run_mms, MmsReport, MmsTarget, StepperConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsStudy {
    pub target: MmsTarget,
    pub t_end: f64,
    pub reports: Vec<MmsReport>,
    /// `log(e_i / e_{i+1}) / log(dt_i / dt_{i+1})` for consecutive entries.
    pub observed_orders: Vec<f64>,
}

pub fn observed_orders(reports: &[MmsReport]) -> Vec<f64> {
    reports
        .windows(2)
        .map(|w| (w[0].max_error / w[1].max_error).ln() / (w[0].dt / w[1].dt).ln())
        .collect()
}

pub fn run_mms_study(cfg: &MmsConfig) -> Result<MmsStudy> {
    cfg.validate()?;
    let target = cfg.mms.target.family(&cfg.grid, &cfg.flow);
    let reports = cfg
        .mms
        .dts
        .iter()
        .map(|&dt| {
            let stepper = StepperConfig {
                t_end: Some(cfg.mms.t_end),
                ..StepperConfig::new(dt)
            };
            log::info!("mms: dt = {dt}");
            run_mms(&target, cfg.flow, cfg.grid, &stepper)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MmsStudy {
        target: cfg.mms.target,
        t_end: cfg.mms.t_end,
        observed_orders: observed_orders(&reports),
        reports,
    })
}
