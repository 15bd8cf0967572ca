use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hqc_cli::{execute, load_config, CliError, Command, Overrides};

#[derive(Parser)]
#[command(name = "hqc", version, about = "Adiabatic holonomic gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate the gate described by a config.
    Run(Target),
    /// Compute the loop holonomy only, without dynamics.
    Holonomy(Target),
    /// Run every entry of a scan config.
    Scan(Target),
}

#[derive(Args)]
struct Target {
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Integration step in fs.
    #[arg(long)]
    dt: Option<f64>,
    /// Loop samples.
    #[arg(long)]
    samples: Option<usize>,
}

fn run(command: Command, target: Target) -> Result<(), CliError> {
    let mut config = load_config(&target.config)?;
    config.apply_overrides(&Overrides {
        output_dir: target.output_dir,
        dt: target.dt,
        samples: target.samples,
    });
    execute(command, &config)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (command, target) = match cli.command {
        Cmd::Run(t) => (Command::Run, t),
        Cmd::Holonomy(t) => (Command::Holonomy, t),
        Cmd::Scan(t) => (Command::Scan, t),
    };
    match run(command, target) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
