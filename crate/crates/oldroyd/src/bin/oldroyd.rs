//! Command-line driver: validate configs, run single simulations, sweep
//! over epsilon, and resume from checkpoints.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oldroyd::constitutive::FlowState;
use oldroyd::harness::{
    generate_initial_data, load_checkpoint, load_config, materialize_forcing, save_checkpoint,
    sweep, write_report, ExperimentConfig,
};
use oldroyd::solver::{run_oldroyd, OldroydStepper, RunSettings, SchemeOptions};

#[derive(Parser)]
#[command(name = "oldroyd", version, about = "Oldroyd-B Newtonian-limit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Path to the experiment TOML.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a config and print the resolved experiment.
    Check(ConfigArg),
    /// Integrate one epsilon and write a final-state checkpoint.
    Run {
        #[command(flatten)]
        config: ConfigArg,
        /// Relaxation time; must be one of the config's epsilons.
        #[arg(long)]
        epsilon: f64,
    },
    /// Run the full epsilon sweep and write report.csv / report.json /
    /// plotdata under the output directory.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// Output directory (overrides [output].dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Concurrent epsilon runs (default: OLDB_WORKERS or all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Continue an unforced run from a checkpoint.
    Resume {
        /// Checkpoint written by `run` or a previous `resume`.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Absolute time to integrate to.
        #[arg(long)]
        until: f64,
        /// Where to write the new checkpoint (default: alongside the input).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_workers() -> usize {
    std::env::var("OLDB_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
}

fn epsilon_index(cfg: &ExperimentConfig, epsilon: f64) -> oldroyd::Result<usize> {
    cfg.params
        .epsilons
        .iter()
        .position(|&e| (e - epsilon).abs() <= 1e-12 * e.max(epsilon))
        .ok_or_else(|| {
            oldroyd::Error::Config(format!(
                "epsilon {epsilon} is not in the configured list {:?}",
                cfg.params.epsilons
            ))
        })
}

fn cmd_check(args: &ConfigArg) -> oldroyd::Result<()> {
    let cfg = load_config(&args.config)?;
    cfg.validate()?;
    let grid = cfg.grid()?;
    println!("config ok: {}", args.config.display());
    println!("  grid: {}d, m = {}", grid.dims(), grid.m());
    println!("  epsilons: {:?}", cfg.params.epsilons);
    println!("  regime: {:?}, omega = {}", cfg.params.regime, cfg.params.omega);
    println!("  horizon = {}, stride = {}", cfg.time.horizon, cfg.time.snapshot_stride);
    println!("  split: alpha = {}, beta = {}", cfg.split.alpha, cfg.split.beta);
    Ok(())
}

fn cmd_run(args: &ConfigArg, epsilon: f64) -> oldroyd::Result<()> {
    let cfg = load_config(&args.config)?;
    cfg.validate()?;
    let index = epsilon_index(&cfg, epsilon)?;
    let grid = cfg.grid()?;
    let params = cfg.fluid_params(index);
    let forcing = materialize_forcing(grid, &cfg.forcing)?;
    let (u0, tau0) = generate_initial_data(grid, &cfg.initial, params.omega)?;
    let initial = FlowState::new(0.0, u0, tau0)?;

    let mut stepper = OldroydStepper::new(grid, params, SchemeOptions::default(), forcing)?;
    let settings = RunSettings {
        horizon: cfg.time.horizon,
        snapshot_stride: cfg.time.snapshot_stride,
        quadratures: None,
    };
    let traj = run_oldroyd(&mut stepper, initial, &settings)?;
    let last = traj.states.last().expect("at least the initial snapshot");
    println!("epsilon = {epsilon}: {} steps to t = {}", traj.steps, last.t);
    println!("  ||u||_L2  = {:.6e}", last.u_hat.l2_norm());
    println!("  ||tau||_L2 = {:.6e}", last.tau_hat.l2_norm());
    if let Some(t) = traj.blowup {
        println!("  blow-up signalled at t = {t}");
    }

    std::fs::create_dir_all(&cfg.output.dir)
        .map_err(|e| oldroyd::Error::io(&cfg.output.dir, e))?;
    let path = PathBuf::from(&cfg.output.dir).join(format!("state_eps{index}.ckpt"));
    save_checkpoint(last, stepper.params(), &path)?;
    println!("  checkpoint: {}", path.display());
    Ok(())
}

fn cmd_sweep(args: &ConfigArg, out: Option<PathBuf>, workers: Option<usize>) -> oldroyd::Result<()> {
    let cfg = load_config(&args.config)?;
    let workers = workers.unwrap_or_else(default_workers);
    let report = sweep(&cfg, workers)?;
    let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    write_report(&report, &dir)?;
    println!("sweep complete: {} epsilon(s), reference {} steps", report.rows.len(),
        report.reference_steps);
    for row in &report.rows {
        match row.blowup {
            Some(t) => println!(
                "  eps = {:.3e}: blow-up at t = {t:.3e} after {} steps",
                row.epsilon, row.steps
            ),
            None => println!(
                "  eps = {:.3e}: sup||u - v|| = {:.6e}, ||Z|| = {:.6e}, sqrt(eps)||tau|| = {:.6e}",
                row.epsilon, row.u_error_sup, row.z_norm, row.tau_sup_scaled
            ),
        }
    }
    if let Some(fit) = &report.slopes.u_error {
        println!("  u-error slope vs epsilon: {:.3}", fit.slope);
    }
    println!("report written to {}", dir.display());
    Ok(())
}

fn cmd_resume(checkpoint: &PathBuf, until: f64, out: Option<PathBuf>) -> oldroyd::Result<()> {
    let (state, params) = load_checkpoint(checkpoint)?;
    let t0 = state.t;
    if until <= t0 {
        return Err(oldroyd::Error::InvalidParameter(format!(
            "--until {until} is not past the checkpoint time {t0}"
        )));
    }
    let grid = state.grid();
    // the run loop clocks from zero; shift the state and shift back on save
    let shifted = FlowState::new(0.0, state.u_hat, state.tau_hat)?;
    let horizon = until - t0;
    let mut stepper = OldroydStepper::new(grid, params, SchemeOptions::default(), None)?;
    let settings = RunSettings {
        horizon,
        snapshot_stride: horizon,
        quadratures: None,
    };
    let traj = run_oldroyd(&mut stepper, shifted, &settings)?;
    let last = traj.states.last().expect("at least the initial snapshot");
    let state = FlowState::new(t0 + last.t, last.u_hat.clone(), last.tau_hat.clone())?;
    println!("resumed from t = {t0} to t = {}: {} steps", state.t, traj.steps);
    println!("  ||u||_L2  = {:.6e}", state.u_hat.l2_norm());
    println!("  ||tau||_L2 = {:.6e}", state.tau_hat.l2_norm());
    if let Some(t) = traj.blowup {
        println!("  blow-up signalled at t = {}", t0 + t);
    }
    let path = out.unwrap_or_else(|| checkpoint.with_extension("resumed.ckpt"));
    save_checkpoint(&state, stepper.params(), &path)?;
    println!("  checkpoint: {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Run { config, epsilon } => cmd_run(config, *epsilon),
        Command::Sweep { config, out, workers } => {
            cmd_sweep(config, out.clone(), *workers)
        }
        Command::Resume { checkpoint, until, out } => {
            cmd_resume(checkpoint, *until, out.clone())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
