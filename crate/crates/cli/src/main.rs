//! Command-line experiment runner: `run` executes configs and writes
//! trajectory/metrics artifacts, `report` renders metric files as a table.

mod config;
mod plot;
mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use config::{ExperimentConfig, Overrides};
use lodegp::kernels::KernelKind;
use lodegp::mpc::{run_control_loop, Trajectory};
use report::{HyperparameterOut, Metrics};

#[derive(Parser)]
#[command(name = "lodegp", version, about = "GP-based constrained MPC experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run experiment configs and write trajectory.csv / metrics.json
    Run {
        /// Config files (TOML)
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Model override: gpse|gpm|gpmo or a sampled label like gpmos
        #[arg(long)]
        model: Option<String>,
        /// Force the constrained sampling step
        #[arg(long)]
        sampled: bool,
        /// Master seed override
        #[arg(long)]
        seed: Option<u64>,
        /// Also write plot.svg
        #[arg(long)]
        plot: bool,
        /// Output directory (single config) or parent directory (multiple)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run independent configs in parallel
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Render a table from metrics.json files
    Report {
        #[arg(required = true)]
        metrics: Vec<PathBuf>,
    },
}

fn main() {
    if let Err(e) = dispatch() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn dispatch() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Run {
            configs,
            model,
            sampled,
            seed,
            plot,
            out,
            jobs,
        } => {
            let many = configs.len() > 1;
            let tasks: Vec<(PathBuf, Overrides)> = configs
                .into_iter()
                .map(|path| {
                    let task_out = out.as_ref().map(|o| {
                        if many {
                            o.join(path.file_stem().unwrap_or_default())
                        } else {
                            o.clone()
                        }
                    });
                    (
                        path,
                        Overrides {
                            model: model.clone(),
                            sampled,
                            seed,
                            out: task_out,
                        },
                    )
                })
                .collect();
            run_many(tasks, plot, jobs.max(1))
        }
        Cmd::Report { metrics } => {
            let loaded: Vec<Metrics> = metrics
                .iter()
                .map(|p| report::load_metrics(p))
                .collect::<Result<_>>()?;
            print!("{}", report::render_table(&loaded));
            Ok(())
        }
    }
}

fn run_many(tasks: Vec<(PathBuf, Overrides)>, plot: bool, jobs: usize) -> Result<()> {
    if jobs == 1 || tasks.len() == 1 {
        for (path, ov) in &tasks {
            println!("{}", run_experiment(path, ov, plot)?);
        }
        return Ok(());
    }
    let results: Vec<Result<String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = tasks
            .chunks(tasks.len().div_ceil(jobs))
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|(path, ov)| run_experiment(path, ov, plot))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut failed = false;
    for r in results {
        match r {
            Ok(line) => println!("{line}"),
            Err(e) => {
                eprintln!("error: {e:#}");
                failed = true;
            }
        }
    }
    if failed {
        bail!("one or more runs failed");
    }
    Ok(())
}

/// Runs one config end to end and writes the artifact set.
fn run_experiment(path: &Path, overrides: &Overrides, plot: bool) -> Result<String> {
    let mut config = ExperimentConfig::load(path)?;
    config.apply_overrides(overrides)?;
    let mut problem = config.to_problem()?;

    let t_start = Instant::now();
    problem
        .train(&config.train_options())
        .context("hyperparameter training failed")?;
    let train_seconds = t_start.elapsed().as_secs_f64();

    let t_loop = Instant::now();
    let traj = run_control_loop(&problem).context("control loop failed")?;
    let loop_seconds = t_loop.elapsed().as_secs_f64();

    let metrics = Metrics {
        experiment: config.name.clone(),
        model: config.model.variant.clone(),
        seed: config.seed,
        constraint_error: traj.constraint_error,
        control_error: traj.control_error,
        runtime_seconds: t_start.elapsed().as_secs_f64(),
        runtime_train_seconds: train_seconds,
        runtime_loop_seconds: loop_seconds,
        hyperparameters: problem
            .base
            .iter()
            .map(|s| HyperparameterOut {
                kind: match s.kind {
                    KernelKind::SquaredExponential => "se".into(),
                    KernelKind::Matern { order } => format!("matern{order}"),
                },
                signal_variance: s.signal_variance,
                lengthscale: s.lengthscale,
            })
            .collect(),
    };

    let dir = config.output_dir();
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create {}", dir.display()))?;
    // resolved config (after overrides) for reproducibility
    std::fs::write(dir.join("config.toml"), config.to_toml()?)?;
    std::fs::write(dir.join("trajectory.csv"), trajectory_csv(&traj))?;
    std::fs::write(
        dir.join("metrics.json"),
        serde_json::to_string_pretty(&metrics)?,
    )?;
    if plot {
        std::fs::write(
            dir.join("plot.svg"),
            plot::render_svg(&traj, &problem.bounds),
        )?;
    }

    Ok(format!(
        "{name} {model}: constraint_error {cv:.6e}, control_error {ce:.6}, {secs:.1}s -> {dir}",
        name = config.name,
        model = config.model.variant,
        cv = traj.constraint_error,
        ce = traj.control_error,
        secs = metrics.runtime_seconds,
        dir = dir.display()
    ))
}

/// UTF-8 CSV with 17 significant digits, one row per grid time.
fn trajectory_csv(traj: &Trajectory) -> String {
    let n_x = traj.states.first().map_or(0, |x| x.len());
    let n_u = traj.inputs.first().map_or(0, |u| u.len());
    let mut out = String::from("t");
    for i in 1..=n_x {
        let _ = write!(out, ",x{i}");
    }
    for i in 1..=n_u {
        let _ = write!(out, ",u{i}");
    }
    out.push('\n');
    for (i, &t) in traj.times.iter().enumerate() {
        let _ = write!(out, "{t:.16e}");
        for v in traj.states[i].iter() {
            let _ = write!(out, ",{v:.16e}");
        }
        for v in traj.inputs[i].iter() {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}
