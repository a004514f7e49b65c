//! Batch runner behind the `oplab` binary.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod table;

use rayon::prelude::*;

use config::{ConfigFile, ExperimentConfig, Kind};
use error::CliError;
use table::{Metadata, Report};

/// Fills each cell's kind and missing seed, then validates.
pub fn prepare(mut cfg: ConfigFile, kind: Kind, seed: Option<u64>) -> Result<ConfigFile, CliError> {
    for (i, cell) in cfg.cells.iter_mut().enumerate() {
        let at = format!("cells[{i}]");
        match cell.kind {
            Some(k) if k != kind => {
                return Err(CliError::ConfigInvalid {
                    path: format!("{at}.kind"),
                    message: format!("cell is {:?} but the subcommand is {}", k.name(), kind.name()),
                })
            }
            _ => cell.kind = Some(kind),
        }
        if cell.seed.is_none() {
            cell.seed = seed;
        }
        cell.validate(&at)?;
    }
    Ok(cfg)
}

/// Runs the cells concurrently; results keep cell order.
pub fn run(cfg: &ConfigFile, timing: bool) -> Result<Report, CliError> {
    let start = std::time::Instant::now();
    let cells = cfg
        .cells
        .par_iter()
        .enumerate()
        .map(|(i, cell): (usize, &ExperimentConfig)| {
            log::info!("cell {i}: {}", cell.kind.map_or("?", Kind::name));
            run::run_cell(cell, &format!("cells[{i}]"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report {
        metadata: Metadata {
            tool: "oplab",
            version: env!("CARGO_PKG_VERSION"),
            config: serde_json::to_value(cfg).expect("config serializes"),
            wall_time_seconds: timing.then(|| start.elapsed().as_secs_f64()),
        },
        cells,
    })
}
