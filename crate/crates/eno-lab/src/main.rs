//! `eno-lab`: command-line experiments for adaptive-stencil reconstruction
//! and the finite-volume schemes built on it.
//!
//! Exit status: 0 when every asserted property of the chosen experiment
//! holds, 1 when a violation is found, 2 on usage errors.

mod config;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use experiments::{Params, EXPERIMENTS};

#[derive(Parser, Debug)]
#[command(
    name = "eno-lab",
    about = "Reconstruction and stability experiments for ENO-type schemes",
    after_help = "Registered experiments: reconstruct, verify, worst-case, convergence,\n\
                  tvd-burgers, monotonicity, eno-tv, sin4-instability, conjecture-probe.\n\
                  Flags override config-file keys; ENO_LAB_OUT sets the default output root."
)]
struct Cli {
    /// Experiment to run (may instead come from the config file).
    experiment: Option<String>,
    /// Key=value spec file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reconstruction order.
    #[arg(long)]
    k: Option<usize>,
    /// Number of mesh cells.
    #[arg(long)]
    n: Option<usize>,
    /// Worst-case family parameter.
    #[arg(long)]
    eps: Option<f64>,
    /// Base seed for randomized experiments.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of randomized trials or runs.
    #[arg(long)]
    trials: Option<u64>,
    /// Output directory (default: $ENO_LAB_OUT or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Numerical flux: godunov, rusanov, engquist-osher, tecno.
    #[arg(long)]
    flux: Option<String>,
    /// Time integrator: euler, ssp-rk2, ssp-rk3, rk4.
    #[arg(long)]
    integrator: Option<String>,
    /// CFL number.
    #[arg(long)]
    cfl: Option<f64>,
    /// Final time for solver experiments.
    #[arg(long)]
    t_end: Option<f64>,
    /// Property to gate on for `verify` (default all).
    #[arg(long)]
    property: Option<String>,
    /// Test function: sinx, sin4, gauss, pulse-sine.
    #[arg(long)]
    func: Option<String>,
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let file = match &cli.config {
        Some(path) => match config::load_config(path) {
            Ok(map) => map,
            Err(e) => return usage_error(&e),
        },
        None => Default::default(),
    };

    macro_rules! merged {
        ($flag:expr, $key:literal, $ty:ty) => {
            match $flag.clone() {
                Some(v) => Some(v),
                None => match file.get($key).map(|s| s.parse::<$ty>()) {
                    Some(Ok(v)) => Some(v),
                    Some(Err(_)) => {
                        return usage_error(&format!("config value for {} is invalid", $key))
                    }
                    None => None,
                },
            }
        };
    }

    let experiment = match cli.experiment.clone().or_else(|| file.get("experiment").cloned()) {
        Some(exp) => exp,
        None => {
            return usage_error(
                "no experiment given; pass one as the positional argument or set `experiment` in the config file",
            )
        }
    };
    if !EXPERIMENTS.contains(&experiment.as_str()) {
        return usage_error(&format!(
            "unknown experiment {experiment:?}; registered: {}",
            EXPERIMENTS.join(", ")
        ));
    }

    let out = cli
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from))
        .or_else(|| std::env::var_os("ENO_LAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let params = Params {
        k: merged!(cli.k, "k", usize),
        n: merged!(cli.n, "n", usize),
        eps: merged!(cli.eps, "eps", f64),
        seed: merged!(cli.seed, "seed", u64),
        trials: merged!(cli.trials, "trials", u64),
        out,
        flux: merged!(cli.flux, "flux", String),
        integrator: merged!(cli.integrator, "integrator", String),
        cfl: merged!(cli.cfl, "cfl", f64),
        t_end: merged!(cli.t_end, "t_end", f64),
        property: merged!(cli.property, "property", String),
        func: merged!(cli.func, "func", String),
    };

    match experiments::run(&experiment, &params) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("{experiment}: asserted property violated");
            ExitCode::FAILURE
        }
        Err(message) => usage_error(&message),
    }
}
