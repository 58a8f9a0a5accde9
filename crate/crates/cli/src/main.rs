use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use synthlat_cli::{find_preset, list_presets, run, RunConfig, RunError};

#[derive(Parser)]
#[command(name = "synthlat", version, about = "N-boson synthetic lattice experiment runner")]
struct Cli {
    /// Thread count for k-point sweeps and eigensolves (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved. The pipeline is deterministic and uses no randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run described by a JSON config file.
    Run { config: PathBuf },
    /// Execute a named preset (see `list-presets`).
    Preset {
        name: String,
        /// Output directory (default: out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available presets.
    ListPresets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Applies to every rayon-parallel sweep below.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    let result = match cli.command {
        Command::Run { config } => load_config(&config).and_then(|cfg| execute(&cfg)),
        Command::Preset { name, out } => match find_preset(&name) {
            Some(preset) => {
                let out = out.unwrap_or_else(|| PathBuf::from("out").join(&name));
                let cfg = (preset.build)(out);
                execute(&cfg)
            }
            None => Err(RunError::Config(format!(
                "unknown preset `{name}`; see `synthlat list-presets`"
            ))),
        },
        Command::ListPresets => {
            print!("{}", list_presets());
            Ok(())
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let payload = serde_json::json!({ "error": err.to_string() });
            eprintln!("{payload}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn load_config(path: &PathBuf) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path)?;
    RunConfig::from_json(&text)
}

fn execute(config: &RunConfig) -> Result<(), RunError> {
    let files = run(config)?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
