use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use imethod_cli::{execute, parse_config, Command, OUT_ENV};

/// Pseudo-spectral NLS laboratory.
#[derive(Parser, Debug)]
#[command(name = "imethod", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set physics.delta=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory; defaults to `$IMETHOD_OUT/<command>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

const CONFIG_ERROR: u8 = 2;
const RUNTIME_ERROR: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(CONFIG_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(CONFIG_ERROR);
            }
        },
        None => String::new(),
    };
    let cfg = match parse_config(cli.command, &text, &cli.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let out = match cli.out.or_else(|| std::env::var_os(OUT_ENV).map(|r| PathBuf::from(r).join(cli.command.name()))) {
        Some(o) => o,
        None => {
            eprintln!("error: no output directory; pass --out or set {OUT_ENV}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    match execute(&cfg, &out) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary.report["results"]).unwrap_or_default());
            println!("outputs written to {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RUNTIME_ERROR)
        }
    }
}
