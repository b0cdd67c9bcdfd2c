//! Independent runs over a list of `gamma` values.

use std::fmt::Write as _;
use std::fs;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use super::run::{run_single, write_json, RunSummary};
use crate::error::{Error, Result};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_JSON: &str = "sweep.json";
pub const SWEEP_FORMAT: &str = "# format: graddiv-sweep/1";
pub const SWEEP_HEADER: &str =
    "gamma,eps_total,eps_nu,eps_gamma,div_norm_avg,U_T,bound,in_window_mi,in_window_md";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub index: usize,
    pub gamma: f64,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub index: usize,
    pub gamma: f64,
    pub blow_up: bool,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub runs: Vec<SweepRun>,
    pub failures: Vec<SweepFailure>,
}

impl SweepSummary {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x.is_nan() => "nan".into(),
        Some(x) if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.into(),
        Some(x) => format!("{x:e}"),
    }
}

fn fmt_opt_bool(v: Option<bool>) -> &'static str {
    match v {
        None => "",
        Some(true) => "true",
        Some(false) => "false",
    }
}

/// Aggregate CSV text, one row per successful run in `gamma` order.
pub fn sweep_csv(summary: &SweepSummary) -> String {
    let mut out = format!("{SWEEP_FORMAT}\n{SWEEP_HEADER}\n");
    for run in &summary.runs {
        let s = &run.summary;
        writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{:e},{},{},{}",
            run.gamma,
            s.eps_avg,
            s.eps_nu_avg,
            s.eps_gamma_avg,
            s.div_norm_avg,
            s.u_t,
            fmt_opt_f64(s.eps_bound),
            fmt_opt_bool(s.in_window_mesh_independent),
            fmt_opt_bool(s.in_window_mesh_dependent),
        )
        .expect("write to string");
    }
    out
}

/// Runs every `gamma` on up to `parallel_workers` threads. Each run writes
/// to `output_dir/gamma_{index:03}`; the aggregate `sweep.csv` and
/// `sweep.json` are written once at the end. A failed run is recorded and
/// the others continue.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepSummary> {
    cfg.validate()?;
    let dir = &cfg.base.run.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let count = cfg.gamma_values.len();
    let workers = cfg.parallel_workers.min(count);
    info!("sweep: {count} gamma values on {workers} worker(s)");

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunSummary>>>> =
        Mutex::new((0..count).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= count {
                    break;
                }
                let outcome = run_single(&cfg.run_config(i));
                if let Err(e) = &outcome {
                    warn!("gamma = {} failed: {e}", cfg.gamma_values[i]);
                }
                results.lock().expect("no poisoned lock")[i] = Some(outcome);
            });
        }
    });

    let mut summary = SweepSummary {
        runs: Vec::new(),
        failures: Vec::new(),
    };
    for (i, outcome) in results
        .into_inner()
        .expect("no poisoned lock")
        .into_iter()
        .enumerate()
    {
        let gamma = cfg.gamma_values[i];
        match outcome.expect("every index is run") {
            Ok(s) => summary.runs.push(SweepRun {
                index: i,
                gamma,
                summary: s,
            }),
            Err(e) => summary.failures.push(SweepFailure {
                index: i,
                gamma,
                blow_up: matches!(e, Error::BlowUp { .. }),
                error: e.to_string(),
            }),
        }
    }
    let csv_path = dir.join(SWEEP_CSV);
    fs::write(&csv_path, sweep_csv(&summary)).map_err(|e| Error::io(&csv_path, e))?;
    write_json(&dir.join(SWEEP_JSON), &summary)?;
    Ok(summary)
}
