use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oplab_cli::config::{parse_operator_arg, ConfigFile, ExperimentConfig, Kind, SCHEMA_VERSION};
use oplab_cli::error::CliError;
use oplab_cli::presets::PRESETS;

#[derive(Parser)]
#[command(name = "oplab", version, about = "Deterministic operator-dynamics experiments")]
struct Cli {
    /// Batch config (JSON, schema version 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for cells that do not set one.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall time in the metadata (output is then no longer byte-stable).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct OperatorArg {
    /// Library shift name or operator JSON, e.g. '{"weights": {...}}'.
    #[arg(long)]
    operator: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    Classify(OperatorArg),
    Aluthge(OperatorArg),
    Orbit(OperatorArg),
    Shadow(OperatorArg),
    Spectrum(OperatorArg),
    Certificate(OperatorArg),
    /// Run a named experiment.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        name: Option<String>,
    },
}

fn build_config(cli: &Cli) -> Result<(ConfigFile, Kind), CliError> {
    let (kind, operator, preset) = match &cli.command {
        Command::Classify(o) => (Kind::Classify, o.operator.as_deref(), None),
        Command::Aluthge(o) => (Kind::Aluthge, o.operator.as_deref(), None),
        Command::Orbit(o) => (Kind::Orbit, o.operator.as_deref(), None),
        Command::Shadow(o) => (Kind::Shadow, o.operator.as_deref(), None),
        Command::Spectrum(o) => (Kind::Spectrum, o.operator.as_deref(), None),
        Command::Certificate(o) => (Kind::Certificate, o.operator.as_deref(), None),
        Command::Preset { name } => (Kind::Preset, None, name.clone()),
    };
    let cfg = match &cli.config {
        Some(path) => {
            if operator.is_some() || preset.is_some() {
                return Err(CliError::ConfigInvalid {
                    path: "operator".into(),
                    message: "give either --config or an inline operator/preset, not both".into(),
                });
            }
            ConfigFile::load(path)?
        }
        None => {
            if operator.is_none() && preset.is_none() {
                return Err(CliError::ConfigInvalid {
                    path: "operator".into(),
                    message: "missing; pass --operator, a preset name or --config".into(),
                });
            }
            ConfigFile {
                version: SCHEMA_VERSION,
                cells: vec![ExperimentConfig {
                    kind: Some(kind),
                    label: None,
                    operator: operator.map(parse_operator_arg).transpose()?,
                    preset,
                    params: Default::default(),
                    seed: None,
                }],
            }
        }
    };
    Ok((cfg, kind))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("LAB_LOG")).init();
    let cli = Cli::parse();
    let result = build_config(&cli)
        .and_then(|(cfg, kind)| oplab_cli::prepare(cfg, kind, cli.seed))
        .and_then(|cfg| oplab_cli::run(&cfg, cli.timing));
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match cli.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    for (i, cell) in report.cells.iter().enumerate() {
        for c in cell.checks.iter().filter(|c| !c.passed) {
            eprintln!("check failed: cell {i} {}: {} ({})", cell.label, c.name, c.detail);
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
