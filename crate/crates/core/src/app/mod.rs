//! Configuration, orchestration and persistence of runs, sweeps and MMS
//! studies.

mod config;
mod mms;
mod run;
mod sweep;

pub use config::{
    InitConfig, InitKind, MmsConfig, MmsSection, RunConfig, RunSection, StatsConfig, SweepConfig,
    SweepSection,
};
pub use mms::{observed_orders, run_mms_study, MmsStudy};
pub use run::{
    checkpoint_name, initial_condition, resume, run_single, CheckpointMeta, RunSummary,
    Stationarity, BLOWUP_CHECKPOINT, SUMMARY_FILE, SUMMARY_FORMAT, TIMESERIES_FILE,
    TIMESERIES_FORMAT, TIMESERIES_HEADER,
};
pub use sweep::{
    run_sweep, sweep_csv, SweepFailure, SweepRun, SweepSummary, SWEEP_CSV, SWEEP_FORMAT,
    SWEEP_HEADER, SWEEP_JSON,
};
