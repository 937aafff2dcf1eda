use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgGroup, Parser};

use cubic_euler::runner::{self, Format, Mode, RunConfig};
use cubic_euler::Error;

/// Euler characteristics of the period-p curves in the space of critically
/// marked cubic polynomials, counted through periodic tau-functions.
#[derive(Parser, Debug)]
#[command(name = "cubic-euler", version)]
#[command(group(ArgGroup::new("mode").args(["period", "through"])))]
struct Cli {
    /// Report a single period.
    #[arg(long, value_name = "P")]
    period: Option<usize>,

    /// Report every period from 1 to P.
    #[arg(long, value_name = "P")]
    through: Option<usize>,

    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Include per-length Periodic/Discard/Continue counts.
    #[arg(long)]
    stats: bool,

    /// Skip the degree identity and exception-family checks.
    #[arg(long)]
    no_verify: bool,

    #[arg(long, default_value_t = 1, value_name = "N")]
    workers: usize,

    /// Snapshot the search frontier here (needs --period).
    #[arg(long, value_name = "PATH")]
    checkpoint: Option<PathBuf>,

    /// Continue from a checkpoint written by --checkpoint.
    #[arg(long, value_name = "PATH")]
    resume: Option<PathBuf>,

    /// Seconds between checkpoint writes.
    #[arg(long, default_value_t = 30, value_name = "SECS")]
    checkpoint_interval: u64,

    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Stop after N finished subtrees (testing aid).
    #[arg(long, hide = true, value_name = "N")]
    stop_after: Option<usize>,
}

fn config(cli: Cli) -> Result<RunConfig, String> {
    let mode = match (cli.period, cli.through, &cli.resume) {
        (Some(p), None, _) => Mode::Period(p),
        (None, Some(p), _) => Mode::Through(p),
        (None, None, Some(path)) => {
            let cp = cubic_euler::checkpoint::Checkpoint::read(path).map_err(|e| e.to_string())?;
            Mode::Period(cp.period)
        }
        _ => return Err("one of --period or --through is required".into()),
    };
    Ok(RunConfig {
        mode,
        format: cli.format,
        stats: cli.stats,
        verify: !cli.no_verify,
        workers: cli.workers,
        checkpoint: cli.checkpoint,
        resume: cli.resume,
        out: cli.out,
        checkpoint_interval: Duration::from_secs(cli.checkpoint_interval),
        stop_after: cli.stop_after,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match config(cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match runner::run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
