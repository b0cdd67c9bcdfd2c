//! Single forced runs: initial condition, time loop, statistics, outputs and
//! checkpoint/restart.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::config::{InitKind, RunConfig};
use crate::criterion::{CriterionInput, CriterionReport, GammaWindow};
use crate::error::{Error, Result};
use crate::forcing::{assemble_modes, ForceStats};
use crate::solver::{suggest_dt, Checkpoint, FlowParams, Forcing, Solver};
use crate::spectral::{GridSpec, PhysicalField, SpectralField, SpectralGrid};
use crate::stats::{budget_residual, RunningStats, StateDiagnostics, StepRecord};

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMESERIES_FORMAT: &str = "# format: graddiv-timeseries/1";
pub const TIMESERIES_HEADER: &str = "t,kinetic_energy,eps_nu,eps_gamma,div_norm_sq,budget_residual";
pub const SUMMARY_FORMAT: &str = "graddiv-summary/1";
pub const BLOWUP_CHECKPOINT: &str = "ckpt_blowup.gdpb";

/// File name of the checkpoint written after `step` steps.
pub fn checkpoint_name(step: u64) -> String {
    format!("ckpt_{step:08}.gdpb")
}

/// Statistics stored next to a checkpoint so a restart continues the
/// averages exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub step: u64,
    pub t: f64,
    pub stats: RunningStats,
    pub first_half: RunningStats,
}

/// Averages over the first half of the window next to the full-window
/// value; a large change means the window is too short.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stationarity {
    #[serde(with = "crate::jsonnum")]
    pub eps_avg_first_half: f64,
    #[serde(with = "crate::jsonnum")]
    pub relative_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub format: String,
    pub grid: GridSpec,
    pub flow: FlowParams,
    pub dt: f64,
    pub adaptive: bool,
    pub steps: u64,
    pub t_end: f64,
    pub burn_in: f64,
    /// Length of the averaging window actually accumulated.
    pub window: f64,
    pub force: Option<ForceStats>,
    /// Finite-window estimate of `U`.
    #[serde(rename = "U_T")]
    pub u_t: f64,
    #[serde(rename = "Re")]
    pub re: Option<f64>,
    #[serde(rename = "R_gamma", with = "crate::jsonnum::option")]
    pub r_gamma: Option<f64>,
    pub eps_avg: f64,
    pub eps_nu_avg: f64,
    pub eps_gamma_avg: f64,
    /// `<eps> L / U_T^3`.
    pub normalized_dissipation: Option<f64>,
    /// `6 + 1/Re + kappa^2 R_gamma / 4`.
    #[serde(with = "crate::jsonnum::option")]
    pub bound_coefficient: Option<f64>,
    #[serde(with = "crate::jsonnum::option")]
    pub eps_bound: Option<f64>,
    pub bound_satisfied: Option<bool>,
    pub div_norm_sq_avg: f64,
    /// `sqrt(<|div u|^2>)`.
    pub div_norm_avg: f64,
    pub budget_residual_max: f64,
    pub mesh_width: f64,
    pub eta: Option<f64>,
    pub gamma_window_mesh_independent: Option<GammaWindow>,
    pub gamma_window_mesh_dependent: Option<GammaWindow>,
    pub in_window_mesh_independent: Option<bool>,
    pub in_window_mesh_dependent: Option<bool>,
    pub stationarity: Stationarity,
    pub notes: Vec<String>,
}

/// Initial velocity in physical space.
pub fn initial_condition(cfg: &RunConfig, sg: &SpectralGrid) -> Result<PhysicalField> {
    let spec = *sg.spec();
    let init = &cfg.init;
    let mut u = match init.kind {
        InitKind::ForcingShape if init.amplitude > 0.0 => {
            let f = cfg.forcing.realize_spectral(sg)?;
            let rms = f.volume_norm_sq().sqrt();
            f.scaled(init.amplitude / rms)
        }
        InitKind::Modes if !init.modes.is_empty() => {
            assemble_modes(sg, &init.modes, spec.dealias_cutoff())?
        }
        _ => SpectralField::zeros(spec, spec.dim),
    };
    if init.perturbation > 0.0 {
        let p = sg.solenoidal_part(&sg.random_field(spec.dim, init.band, cfg.run.seed));
        let rms = p.volume_norm_sq().sqrt();
        if rms > 0.0 {
            u.axpy(init.perturbation / rms, &p);
        }
    }
    sg.to_physical(&u)
}

struct RunState {
    step: u64,
    t: f64,
    u: PhysicalField,
    stats: RunningStats,
    first_half: RunningStats,
}

struct Driver<'a> {
    cfg: &'a RunConfig,
    sg: SpectralGrid,
    solver: Solver,
    force: Option<SpectralField>,
    force_stats: Option<ForceStats>,
    dir: PathBuf,
}

impl<'a> Driver<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        cfg.validate()?;
        let sg = SpectralGrid::new(cfg.grid)?;
        let solver = Solver::new(sg.clone(), cfg.flow)?;
        let (force, force_stats) = if cfg.forcing.is_zero() {
            (None, None)
        } else {
            let f = cfg.forcing.realize_spectral(&sg)?;
            let stats = ForceStats::compute(&sg, &sg.to_physical(&f)?)?;
            (Some(f), Some(stats))
        };
        let dir = cfg.run.output_dir.clone();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Driver {
            cfg,
            sg,
            solver,
            force,
            force_stats,
            dir,
        })
    }

    fn fixed_steps(&self) -> u64 {
        (self.cfg.t_end() / self.cfg.stepper.dt).round().max(1.0) as u64
    }

    fn half_end(&self) -> f64 {
        self.cfg.stats.burn_in + 0.5 * self.cfg.stats.window
    }

    fn write_checkpoint(&self, state: &RunState, name: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        Checkpoint {
            t: state.t,
            params: self.cfg.flow,
            state: state.u.clone(),
        }
        .write(&path)?;
        let meta = CheckpointMeta {
            step: state.step,
            t: state.t,
            stats: state.stats.clone(),
            first_half: state.first_half.clone(),
        };
        let meta_path = path.with_extension("json");
        let text = serde_json::to_string_pretty(&meta).expect("meta serializes");
        fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))?;
        Ok(path)
    }

    fn blow_up(&self, state: &RunState, t: f64, csv: &mut CsvWriter) -> Error {
        // The CSV is best effort here; the checkpoint is what matters.
        let _ = csv.flush();
        match self.write_checkpoint(state, BLOWUP_CHECKPOINT) {
            Ok(path) => {
                warn!(
                    "blow-up at t = {t}; last finite state in {}",
                    path.display()
                );
                Error::BlowUp {
                    t,
                    checkpoint: Some(path),
                }
            }
            Err(e) => {
                warn!("blow-up at t = {t}; checkpoint failed: {e}");
                Error::BlowUp {
                    t,
                    checkpoint: None,
                }
            }
        }
    }

    fn advance(&self, mut state: RunState, csv: &mut CsvWriter) -> Result<RunState> {
        let sg = &self.sg;
        let params = &self.cfg.flow;
        let stepper = &self.cfg.stepper;
        let f = self.force.as_ref();
        let forcing = f.map_or(Forcing::Zero, Forcing::Steady);
        let t_end = self.cfg.t_end();
        let total = self.fixed_steps();
        let half_end = self.half_end();
        let every = self.cfg.run.checkpoint_every;
        let report_every = (total / 10).max(1);

        let mut hat = sg.analyze(&state.u)?;
        let mut diag = StateDiagnostics::of(sg, &hat, params, f);
        loop {
            let (t_prev, dt) = if stepper.adaptive {
                if state.t >= t_end * (1.0 - 1e-12) {
                    break;
                }
                let dt = suggest_dt(&state.u, stepper).min(t_end - state.t);
                (state.t, dt)
            } else {
                if state.step >= total {
                    break;
                }
                (state.step as f64 * stepper.dt, stepper.dt)
            };

            let next = match self.solver.step_spectral(&hat, t_prev, dt, &forcing) {
                Ok(next) => next,
                Err(Error::BlowUp { t, .. }) => return Err(self.blow_up(&state, t, csv)),
                Err(e) => return Err(e),
            };
            let u_next = sg.to_physical(&next)?;
            if !u_next.is_finite() {
                return Err(self.blow_up(&state, t_prev + dt, csv));
            }
            let next_hat = sg.analyze(&u_next)?;
            let next_diag = StateDiagnostics::of(sg, &next_hat, params, f);
            let r = budget_residual(sg, params, f, &hat, &next_hat, dt);
            let mut rec = state.stats.record(t_prev, dt, &diag, &next_diag, r);
            if t_prev + 0.5 * dt < half_end {
                state.first_half.record(t_prev, dt, &diag, &next_diag, r);
            }

            state.step += 1;
            state.t = if stepper.adaptive {
                t_prev + dt
            } else {
                state.step as f64 * stepper.dt
            };
            rec.t = state.t;
            csv.row(&rec)?;
            state.u = u_next;
            hat = next_hat;
            diag = next_diag;

            if every > 0 && state.step % every == 0 {
                csv.flush()?;
                self.write_checkpoint(&state, &checkpoint_name(state.step))?;
            }
            if !stepper.adaptive && state.step % report_every == 0 {
                info!(
                    "step {}/{total}, t = {:.4}, E = {:.6e}",
                    state.step, state.t, rec.kinetic_energy
                );
            }
        }
        csv.flush()?;
        Ok(state)
    }

    fn summarize(&self, state: &RunState) -> Result<RunSummary> {
        let cfg = self.cfg;
        let avg = state.stats.finalize()?;
        let spec = cfg.grid;
        let h = spec.spacing();
        let mut notes = vec!["U_T is a finite-window estimate of U".to_string()];
        if spec.dim == 2 {
            notes.push(
                "2d run: the inertial constant 6 is the three-component value and is conservative here"
                    .to_string(),
            );
        }

        let mut summary = RunSummary {
            format: SUMMARY_FORMAT.to_string(),
            grid: spec,
            flow: cfg.flow,
            dt: cfg.stepper.dt,
            adaptive: cfg.stepper.adaptive,
            steps: state.step,
            t_end: state.t,
            burn_in: cfg.stats.burn_in,
            window: avg.window,
            force: self.force_stats,
            u_t: avg.u_t,
            re: None,
            r_gamma: None,
            eps_avg: avg.eps_avg,
            eps_nu_avg: avg.eps_nu_avg,
            eps_gamma_avg: avg.eps_gamma_avg,
            normalized_dissipation: None,
            bound_coefficient: None,
            eps_bound: None,
            bound_satisfied: None,
            div_norm_sq_avg: avg.div_norm_sq_avg,
            div_norm_avg: avg.div_norm_sq_avg.sqrt(),
            budget_residual_max: state.stats.budget_residual_max,
            mesh_width: h,
            eta: None,
            gamma_window_mesh_independent: None,
            gamma_window_mesh_dependent: None,
            in_window_mesh_independent: None,
            in_window_mesh_dependent: None,
            stationarity: Stationarity {
                eps_avg_first_half: f64::NAN,
                relative_change: f64::NAN,
            },
            notes,
        };
        if let Ok(half) = state.first_half.finalize() {
            summary.stationarity = Stationarity {
                eps_avg_first_half: half.eps_avg,
                relative_change: (avg.eps_avg - half.eps_avg).abs()
                    / avg.eps_avg.max(f64::MIN_POSITIVE),
            };
        }

        let Some(fs) = self.force_stats else {
            summary
                .notes
                .push("unforced run: no bound or gamma windows".to_string());
            return Ok(summary);
        };
        summary.normalized_dissipation = Some(avg.normalized_dissipation(fs.l));
        let input = CriterionInput::new(avg.u_t, fs.l, cfg.flow.nu, fs.kappa)
            .with_gamma(cfg.flow.gamma)
            .with_h(h);
        match CriterionReport::evaluate(&input) {
            Ok(report) => {
                let bound = report.eps_bound.expect("gamma supplied");
                summary.re = Some(report.re);
                summary.r_gamma = report.r_gamma;
                summary.bound_coefficient = Some(bound.coefficient);
                summary.eps_bound = Some(bound.value);
                summary.bound_satisfied = Some(avg.eps_avg <= bound.value);
                summary.eta = Some(report.eta);
                summary.gamma_window_mesh_independent = Some(report.mesh_independent);
                summary.gamma_window_mesh_dependent = report.mesh_dependent;
                summary.in_window_mesh_independent = report.in_window_mesh_independent;
                summary.in_window_mesh_dependent = report.in_window_mesh_dependent;
                summary.notes.extend(report.warnings);
            }
            Err(e) => {
                warn!("criterion not evaluated: {e}");
                summary.notes.push(format!("criterion not evaluated: {e}"));
            }
        }
        Ok(summary)
    }

    fn finish(&self, state: &RunState) -> Result<RunSummary> {
        let summary = self.summarize(state)?;
        write_json(&self.dir.join(SUMMARY_FILE), &summary)?;
        info!(
            "done: <eps> = {:.6e}, U_T = {:.6e}, bound satisfied = {:?}",
            summary.eps_avg, summary.u_t, summary.bound_satisfied
        );
        Ok(summary)
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("summary serializes");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvWriter {
    fn create(path: PathBuf) -> Result<Self> {
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = CsvWriter {
            out: BufWriter::new(file),
            path,
        };
        w.line(TIMESERIES_FORMAT)?;
        w.line(TIMESERIES_HEADER)?;
        Ok(w)
    }

    /// Keeps the header and the first `rows` data rows of an existing file,
    /// then appends.
    fn truncate_to(path: PathBuf, rows: u64) -> Result<Self> {
        let kept: Vec<String> = match fs::read_to_string(&path) {
            Ok(text) => {
                let mut data = 0u64;
                text.lines()
                    .filter(|l| {
                        if l.starts_with('#') || *l == TIMESERIES_HEADER {
                            return true;
                        }
                        data += 1;
                        data <= rows
                    })
                    .map(str::to_string)
                    .collect()
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Self::create(path);
            }
            Err(e) => return Err(Error::io(&path, e)),
        };
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = CsvWriter {
            out: BufWriter::new(file),
            path,
        };
        for l in &kept {
            w.line(l)?;
        }
        Ok(w)
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.out, "{s}").map_err(|e| Error::io(&self.path, e))
    }

    fn row(&mut self, r: &StepRecord) -> Result<()> {
        writeln!(
            self.out,
            "{:e},{:e},{:e},{:e},{:e},{:e}",
            r.t, r.kinetic_energy, r.eps_nu, r.eps_gamma, r.div_norm_sq, r.budget_residual
        )
        .map_err(|e| Error::io(&self.path, e))
    }

    fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Runs burn-in plus averaging window from the configured initial
/// condition and writes `timeseries.csv` and `summary.json` to
/// `run.output_dir`.
pub fn run_single(cfg: &RunConfig) -> Result<RunSummary> {
    let driver = Driver::new(cfg)?;
    info!(
        "run: {} nu = {} gamma = {} dt = {} t_end = {}",
        cfg.grid,
        cfg.flow.nu,
        cfg.flow.gamma,
        cfg.stepper.dt,
        cfg.t_end()
    );
    let state = RunState {
        step: 0,
        t: 0.0,
        u: initial_condition(cfg, &driver.sg)?,
        stats: RunningStats::new(cfg.stats.burn_in),
        first_half: RunningStats::new(cfg.stats.burn_in),
    };
    let mut csv = CsvWriter::create(driver.dir.join(TIMESERIES_FILE))?;
    let state = driver.advance(state, &mut csv)?;
    driver.finish(&state)
}

/// Continues a run from a checkpoint written by [`run_single`].
///
/// The statistics are restored from the JSON file next to the checkpoint.
/// An existing `timeseries.csv` in `run.output_dir` is cut back to the
/// checkpoint step before the new rows are appended, so the file ends up
/// identical to that of an uninterrupted run.
pub fn resume(cfg: &RunConfig, checkpoint: &Path) -> Result<RunSummary> {
    let driver = Driver::new(cfg)?;
    let ck = Checkpoint::read(checkpoint, cfg.grid.dealias_fraction)?;
    let g = ck.state.grid();
    if (g.dim, g.n, g.box_length) != (cfg.grid.dim, cfg.grid.n, cfg.grid.box_length) {
        return Err(Error::config(
            "restart",
            format!("checkpoint grid {g} differs from config grid {}", cfg.grid),
        ));
    }
    if ck.params != cfg.flow {
        return Err(Error::config(
            "restart",
            format!(
                "checkpoint has nu = {}, gamma = {}; config has nu = {}, gamma = {}",
                ck.params.nu, ck.params.gamma, cfg.flow.nu, cfg.flow.gamma
            ),
        ));
    }
    let meta_path = checkpoint.with_extension("json");
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: CheckpointMeta = serde_json::from_str(&text)
        .map_err(|e| Error::Checkpoint(format!("{}: {e}", meta_path.display())))?;
    if meta.t.to_bits() != ck.t.to_bits() {
        return Err(Error::Checkpoint(format!(
            "{} does not belong to {}",
            meta_path.display(),
            checkpoint.display()
        )));
    }
    info!("resuming at step {} (t = {})", meta.step, meta.t);
    let state = RunState {
        step: meta.step,
        t: ck.t,
        u: ck.state,
        stats: meta.stats,
        first_half: meta.first_half,
    };
    let mut csv = CsvWriter::truncate_to(driver.dir.join(TIMESERIES_FILE), meta.step)?;
    let state = driver.advance(state, &mut csv)?;
    driver.finish(&state)
}
