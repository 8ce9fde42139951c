use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nhsoc_cli::{load, run, ConfigError, Experiment, Overrides, RunError, OUT_DIR_ENV};
use nhsoc_core::Direction;

/// Run one simulation experiment and write its artifacts.
#[derive(Parser)]
#[command(name = "nhsoc", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,

    /// JSON config file.
    #[arg(long)]
    config: PathBuf,

    /// Output directory [default: $NHSOC_OUT_DIR, else ./out].
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads [default: one per core].
    #[arg(long)]
    workers: Option<usize>,

    /// Integrator step size.
    #[arg(long)]
    step: Option<f64>,

    /// Record every N-th integrator step.
    #[arg(long)]
    stride: Option<usize>,

    /// Parameter speed.
    #[arg(long)]
    speed: Option<f64>,

    /// Traversal direction (ccw or cw).
    #[arg(long, value_parser = parse_direction)]
    direction: Option<Direction>,
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|_| format!("unknown direction '{s}'"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nhsoc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<PathBuf, RunError> {
    let source = std::fs::read_to_string(&cli.config).map_err(|e| ConfigError {
        line: None,
        column: None,
        message: format!("cannot read {}: {e}", cli.config.display()),
    })?;
    let overrides = Overrides {
        out_dir: cli.out,
        workers: cli.workers,
        step: cli.step,
        stride: cli.stride,
        speed: cli.speed,
        direction: cli.direction,
    };
    let cfg = load(&source, Some(cli.experiment), &overrides)?;
    let out = cfg
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    run(&cfg, &out)?;
    Ok(out)
}
