use clap::{Parser, Subcommand};
use ginar::harness::{self, Action, ExperimentConfig, HarnessError, Status, Suite};
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulation and tail diagnostics for second-order Galton-Watson
/// processes with immigration.
#[derive(Parser)]
#[command(name = "ginar", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (results never depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Tolerance override (series truncation / stationary sampling).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate trajectories and export them as CSV.
    Simulate,
    /// Draw truncated stationary samples and export them.
    Stationary,
    /// Evaluate the closed-form quantities of the configured model.
    Analytics,
    /// Stationary tail diagnostics against the immigration tail.
    Tails,
    /// Run a named verification suite.
    Verify {
        /// moments | embedding | additive | stationary-tail |
        /// regular-variation | large-deviations (defaults to the config).
        #[arg(long)]
        suite: Option<Suite>,
    },
}

fn effective_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| HarnessError::Config("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    cfg.action = match cli.command {
        Command::Simulate => Action::Simulate,
        Command::Stationary => Action::Stationary,
        Command::Analytics => Action::Analytics,
        Command::Tails => Action::Tails,
        Command::Verify { suite } => {
            if let Some(s) = suite {
                cfg.suite = Some(s);
            }
            Action::Verify
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(tol) = cli.tol {
        cfg.tol = Some(tol);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match effective_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            return ExitCode::from(2);
        }
    };
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.threads {
            builder = builder.num_threads(t);
        }
        match builder.build() {
            Ok(p) => p,
            Err(e) => {
                eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
                return ExitCode::from(2);
            }
        }
    };
    match pool.install(|| harness::run(&cfg)) {
        Ok(output) => {
            for o in &output.outcomes {
                let tag = match o.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Unreliable => "UNRELIABLE",
                };
                println!(
                    "[{tag}] {} (observed {:.6}, predicted {:.6}, tol {:.3e}, {:.2}s)",
                    o.check, o.observed, o.predicted, o.tolerance, o.runtime_secs
                );
            }
            for a in &output.artifacts {
                println!("wrote {}", a.display());
            }
            let code = harness::exit_code(&output.outcomes);
            ExitCode::from(code as u8)
        }
        Err(HarnessError::Config(msg)) => {
            eprintln!("{}", serde_json::json!({ "error": msg }));
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            ExitCode::from(2)
        }
    }
}
