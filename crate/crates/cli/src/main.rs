use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use interpolatron_cli::config::{parse_config, ExperimentConfig};
use interpolatron_cli::error::CliError;
use interpolatron_cli::experiments as ex;
use interpolatron_cli::output::write_file;

#[derive(Parser)]
#[command(name = "interpolatron", version, about = "Interpolation-scheme optimizer experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train with a single optimizer.
    Run(Common),
    /// Train every configured optimizer over every seed.
    Compare(Common),
    /// One-dimensional escape and well experiments.
    Toy(Common),
    /// Rate certificate against a measured quadratic trajectory.
    Certify(Common),
    /// Final loss over a (beta, alpha1) grid.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Replace the configured seeds with this one.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the report on stdout.
    #[arg(long)]
    quiet: bool,
    /// Add `iterate_<i>` columns to every trace.
    #[arg(long)]
    log_iterates: bool,
}

fn load(args: &Common) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(&args.config).map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.seeds = vec![seed];
    }
    cfg.log_iterates |= args.log_iterates;
    Ok(cfg)
}

fn echo(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    write_file(&out.join("config.resolved"), cfg.to_resolved_toml().as_bytes())
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let (args, kind) = match &command {
        Command::Run(a) => (a, 0),
        Command::Compare(a) => (a, 1),
        Command::Toy(a) => (a, 2),
        Command::Certify(a) => (a, 3),
        Command::Sweep(a) => (a, 4),
    };
    let cfg = load(args)?;
    echo(&cfg, &args.out)?;
    let report = match kind {
        0 | 1 => {
            let r = if kind == 0 { ex::run_single(&cfg)? } else { ex::run_compare(&cfg)? };
            ex::write_compare(&r, &args.out)?;
            if r.all_diverged() {
                return Err(CliError::AllDiverged);
            }
            ex::describe_compare(&r)
        }
        2 => {
            let r = ex::run_toy(&cfg)?;
            ex::write_toy(&r, &args.out)?;
            ex::describe_toy(&r)
        }
        3 => {
            let r = ex::run_certify(&cfg)?;
            ex::write_certify(&r, &args.out)?;
            if r.run.diverged() {
                return Err(CliError::AllDiverged);
            }
            ex::describe_certify(&r)
        }
        _ => {
            let r = ex::run_sweep(&cfg)?;
            ex::write_sweep(&r, &args.out)?;
            if r.runs.iter().all(|(_, _, run)| run.diverged()) {
                return Err(CliError::AllDiverged);
            }
            ex::describe_sweep(&r)
        }
    };
    if !args.quiet {
        print!("{report}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
