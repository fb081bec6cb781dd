use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use decoherence::scenario::{self, Scenario};
use decoherence::Error;

#[derive(Parser)]
#[command(name = "decoherence", version, about = "Classical and quantum decoherence scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a built-in preset) and write its outputs.
    Run {
        /// Scenario JSON file.
        #[arg(required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Run a built-in preset instead of a file.
        #[arg(long)]
        preset: Option<String>,
        /// Output directory.
        #[arg(long, env = "DECOHERENCE_OUT", default_value = ".")]
        out: PathBuf,
        /// Overrides the seed in the scenario.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the built-in presets.
    Presets {
        /// Also write each preset as `<name>.json` into this directory.
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Parse and check a scenario file without running it.
    Validate { config: PathBuf },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Coverage { .. } => 3,
        Error::Config { .. }
        | Error::Json(_)
        | Error::Domain { .. }
        | Error::Shape(_)
        | Error::Samples { .. } => 2,
        _ => 1,
    }
}

fn load(config: Option<&Path>, preset: Option<&str>) -> Result<Scenario, Error> {
    match (config, preset) {
        (_, Some(name)) => scenario::preset(name).ok_or_else(|| Error::Config {
            field: "preset".into(),
            message: format!("no preset named '{name}' (see `decoherence presets`)"),
        }),
        (Some(path), None) => Scenario::from_path(path).map_err(|e| match e {
            Error::Io(io) => Error::Config {
                field: "config".into(),
                message: format!("{}: {io}", path.display()),
            },
            other => other,
        }),
        (None, None) => unreachable!("clap requires one of config or --preset"),
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            config,
            preset,
            out,
            seed,
        } => {
            let mut scenario = load(config.as_deref(), preset.as_deref())?;
            if let Some(seed) = seed {
                scenario.seed = seed;
            }
            let output = scenario::run_scenario(&scenario, &out)?;
            for file in &output.files {
                println!("{}", file.display());
            }
        }
        Command::Presets { write } => {
            let presets = scenario::presets();
            let width = presets.iter().map(|p| p.name.len()).max().unwrap_or(0);
            if let Some(dir) = &write {
                std::fs::create_dir_all(dir)?;
            }
            for p in presets {
                println!("{:width$}  {}", p.name, p.description);
                if let Some(dir) = &write {
                    std::fs::write(dir.join(format!("{}.json", p.name)), p.scenario.to_json()? + "\n")?;
                }
            }
        }
        Command::Validate { config } => {
            let scenario = load(Some(&config), None)?;
            let prepared = scenario.prepare()?;
            println!(
                "ok: {} ({} grid points, spacing {:e}; {} bath modes; {} time points)",
                scenario.name,
                prepared.grid.n_points,
                prepared.grid.spacing(),
                prepared.bath.len(),
                prepared.times.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
