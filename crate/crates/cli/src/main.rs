//! `odopal` — batch tools for insect body-part colour analysis:
//! convert annotation formats, split datasets, extract per-part
//! colour palettes and HSV statistics, correlate them against
//! occurrence metadata, and evaluate segmentation predictions.

mod commands;
mod config;
mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// What a subcommand hands back to `main`: a machine-readable summary
/// and whether the run is considered clean (exit 0).
pub struct Outcome {
    pub ok: bool,
    pub summary: serde_json::Value,
}

#[derive(Parser)]
#[command(
    name = "odopal",
    version,
    about = "Colour palette extraction and analysis for segmented insect images"
)]
struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print a JSON run summary on standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert annotations between YOLO, COCO, and label-raster formats.
    Convert(commands::convert::Args),
    /// Split an id list into train/val/test manifests.
    Split(commands::split::Args),
    /// Extract per-part colour palettes and HSV statistics.
    Extract(commands::extract::Args),
    /// Join statistics with occurrence metadata and correlate.
    Correlate(commands::correlate::Args),
    /// Score predictions against ground truth (COCO protocol).
    Eval(commands::eval::Args),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let file = match config::load(cli.config.as_deref()) {
        Ok(file) => file,
        Err(err) => {
            log::error!("{err:#}");
            return ExitCode::FAILURE;
        }
    };
    let result = match cli.command {
        Command::Convert(args) => commands::convert::run(args, &file),
        Command::Split(args) => commands::split::run(args, &file),
        Command::Extract(args) => commands::extract::run(args, &file),
        Command::Correlate(args) => commands::correlate::run(args, &file),
        Command::Eval(args) => commands::eval::run(args, &file),
    };
    match result {
        Ok(outcome) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&outcome.summary)
                        .expect("summary serializes")
                );
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            log::error!("{err:#}");
            ExitCode::FAILURE
        }
    }
}
