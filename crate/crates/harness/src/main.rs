use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use firefly_core::schedules::{AlphaSchedule, GammaSchedule};
use firefly_harness::bench::run_bench;
use firefly_harness::curves::{curve_csv, transfer_table_csv, Curve};
use firefly_harness::output::write_outputs;
use firefly_harness::{execute, load_config, HarnessError};

#[derive(Parser)]
#[command(
    name = "firefly",
    version,
    about = "Run firefly-algorithm experiments and emit their data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every replicate of a config and write trace.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `out_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a parameter schedule as `iteration,value` CSV.
    Curves {
        #[arg(long, value_enum)]
        schedule: ScheduleKind,
        #[arg(long)]
        maxitr: usize,
        #[arg(long)]
        alpha0: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        alpha_min: Option<f64>,
        /// Dimension for the floor-dim schedule.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        gamma_max: Option<f64>,
        #[arg(long)]
        gamma_min: Option<f64>,
        #[arg(long, default_value_t = 3.0)]
        dv_max: f64,
        #[arg(long, default_value_t = 0.2)]
        dv_min: f64,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit S1-S4, V1-V4 and ErfS on an even grid as CSV.
    TransferTable {
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle comparisons and print one PASS/FAIL line each.
    Bench,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleKind {
    Constant,
    Geometric,
    PerIterFactor,
    SigmoidDecay,
    Linear,
    FloorDim,
    GammaExpRamp,
    VisualRange,
}

fn need<T>(v: Option<T>, flag: &str) -> T {
    v.unwrap_or_else(|| {
        Cli::command()
            .error(
                ErrorKind::MissingRequiredArgument,
                format!("this schedule needs --{flag}"),
            )
            .exit()
    })
}

fn emit(text: &str, out: Option<PathBuf>) -> Result<(), HarnessError> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, HarnessError> {
    match command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let dir = out
                .or_else(|| cfg.out_dir.clone())
                .unwrap_or_else(|| PathBuf::from("results"));
            let outcome = execute(&cfg)?;
            let (trace, summary) = write_outputs(&dir, &cfg, &outcome)?;
            let s = &outcome.summary;
            println!(
                "{} replicates: best {} mean {} worst {}{}",
                s.replicates,
                s.best,
                s.mean,
                s.worst,
                s.success_rate
                    .map(|r| format!(" success {r}"))
                    .unwrap_or_default()
            );
            println!("wrote {} and {}", trace.display(), summary.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Curves {
            schedule,
            maxitr,
            alpha0,
            theta,
            alpha_min,
            n,
            gamma_max,
            gamma_min,
            dv_max,
            dv_min,
            out,
        } => {
            let curve = match schedule {
                ScheduleKind::Constant => {
                    Curve::Alpha(AlphaSchedule::Constant(need(alpha0, "alpha0")))
                }
                ScheduleKind::Geometric => Curve::Alpha(AlphaSchedule::Geometric {
                    alpha0: need(alpha0, "alpha0"),
                    theta: need(theta, "theta"),
                }),
                ScheduleKind::PerIterFactor => Curve::Alpha(AlphaSchedule::PerIterFactor {
                    alpha0: need(alpha0, "alpha0"),
                }),
                ScheduleKind::SigmoidDecay => Curve::Alpha(AlphaSchedule::SigmoidDecay {
                    alpha0: need(alpha0, "alpha0"),
                }),
                ScheduleKind::Linear => Curve::Alpha(AlphaSchedule::Linear {
                    alpha_max: need(alpha0, "alpha0"),
                    alpha_min: need(alpha_min, "alpha-min"),
                }),
                ScheduleKind::FloorDim => Curve::Alpha(AlphaSchedule::FloorDim { n: need(n, "n") }),
                ScheduleKind::GammaExpRamp => Curve::Gamma(GammaSchedule::ExpRamp {
                    gamma_max: need(gamma_max, "gamma-max"),
                    gamma_min: need(gamma_min, "gamma-min"),
                }),
                ScheduleKind::VisualRange => Curve::VisualRange { dv_min, dv_max },
            };
            emit(&curve_csv(&curve, maxitr)?, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TransferTable {
            from,
            to,
            points,
            out,
        } => {
            emit(&transfer_table_csv(from, to, points)?, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench => {
            let results = run_bench()?;
            for r in &results {
                println!("{}", r.line());
            }
            Ok(if results.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
