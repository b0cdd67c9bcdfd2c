use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use graddiv_core::app::{self, MmsConfig, RunConfig, SweepConfig};
use graddiv_core::criterion::{CriterionInput, CriterionReport};
use graddiv_core::Error;

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;
const EXIT_PARTIAL_SWEEP: u8 = 4;

#[derive(Parser)]
#[command(
    name = "graddiv",
    version,
    about = "Grad-div penalized flow solver on a periodic box"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one forced simulation and write timeseries.csv and summary.json.
    Run {
        config: PathBuf,
        /// Continue from a checkpoint written by an earlier run.
        #[arg(long)]
        restart: Option<PathBuf>,
        /// Overrides run.output_dir.
        #[arg(long, env = "GRADDIV_OUTPUT_DIR")]
        output_dir: Option<PathBuf>,
    },
    /// Run one simulation per gamma value.
    Sweep {
        config: PathBuf,
        /// Overrides run.output_dir.
        #[arg(long, env = "GRADDIV_OUTPUT_DIR")]
        output_dir: Option<PathBuf>,
        /// Overrides sweep.parallel_workers.
        #[arg(long, env = "GRADDIV_WORKERS")]
        workers: Option<usize>,
    },
    /// Evaluate the dissipation bound and the admissible gamma windows.
    Criterion {
        #[arg(long = "U")]
        u: f64,
        #[arg(long = "L")]
        l: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        kappa: f64,
        /// Mesh width, enables the mesh-dependent window.
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Temporal convergence study against a manufactured solution.
    Mms { config: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        Error::Config { .. }
        | Error::InvalidGrid(_)
        | Error::DegenerateForcing(_)
        | Error::NotDivergenceFree { .. }
        | Error::ModeOutOfBand(_)
        | Error::ZeroMode
        | Error::NoAveragingWindow
        | Error::Criterion(_) => EXIT_CONFIG,
        _ => EXIT_OTHER,
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn execute(command: Command) -> Result<u8, Error> {
    match command {
        Command::Run {
            config,
            restart,
            output_dir,
        } => {
            let mut cfg = RunConfig::from_file(&config)?;
            if let Some(dir) = output_dir {
                cfg.run.output_dir = dir;
            }
            let summary = match restart {
                Some(ckpt) => app::resume(&cfg, &ckpt)?,
                None => app::run_single(&cfg)?,
            };
            print_json(&summary);
            Ok(0)
        }
        Command::Sweep {
            config,
            output_dir,
            workers,
        } => {
            let mut cfg = SweepConfig::from_file(&config)?;
            if let Some(dir) = output_dir {
                cfg.base.run.output_dir = dir;
            }
            if let Some(w) = workers {
                cfg.parallel_workers = w;
            }
            let summary = app::run_sweep(&cfg)?;
            print!("{}", app::sweep_csv(&summary));
            for f in &summary.failures {
                eprintln!("gamma = {} failed: {}", f.gamma, f.error);
            }
            Ok(if summary.is_complete() {
                0
            } else {
                EXIT_PARTIAL_SWEEP
            })
        }
        Command::Criterion {
            u,
            l,
            nu,
            kappa,
            h,
            gamma,
        } => {
            let input = CriterionInput {
                u,
                l,
                nu,
                kappa,
                gamma,
                h,
            };
            let report = CriterionReport::evaluate(&input)?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            print_json(&report);
            Ok(0)
        }
        Command::Mms { config } => {
            let cfg = MmsConfig::from_file(&config)?;
            print_json(&app::run_mms_study(&cfg)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
