//! Command-line front end: configuration, synthetic spectra, the analysis
//! pipeline, sweeps and the scan tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use optomech_core::Spectrum;

pub use config::RunConfig;
pub use error::CliError;
pub use output::Format;

use commands::{SweepTable, Target};

#[derive(Debug, Parser)]
#[command(
    name = "optomech",
    version,
    about = "Laser cooling of a micromechanical mirror"
)]
pub struct Cli {
    /// Run configuration (TOML). The bundled device config when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Noise seed; overrides `synthesis.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived rates, stability and the cooling prediction.
    Predict,
    /// Synthetic noise spectrum (Spectrum CSV).
    Synth,
    /// Mode temperature from a spectrum CSV.
    Analyze { input: PathBuf },
    /// Detuning/power grid from the [sweep] section.
    Sweep,
    /// Detuning or power tables with a summary.
    Repro {
        #[arg(value_enum)]
        target: Target,
    },
    /// Pad mass, mode shapes and effective masses.
    Modal {
        /// Also write the loaded mode shape here.
        #[arg(long)]
        shape_out: Option<PathBuf>,
    },
}

/// What a run produced: the primary output, diagnostics for stderr, and an
/// optional failure that still allows the output to be written.
#[derive(Debug, Default)]
pub struct Emitted {
    pub body: String,
    pub log: Vec<String>,
    pub failure: Option<CliError>,
}

impl Emitted {
    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, CliError::exit_code)
    }
}

pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    match &cli.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::device()),
    }
}

pub fn run(cli: &Cli) -> Result<Emitted, CliError> {
    let cfg = load_config(cli)?;
    let mut out = Emitted::default();
    match &cli.command {
        Command::Predict => {
            let (report, failure) = commands::run_predict(&cfg)?;
            out.body = output::render(&report, cli.format.unwrap_or(Format::Structured))?;
            out.log = report.warnings.clone();
            out.failure = failure;
        }
        Command::Synth => {
            if cli.format == Some(Format::Structured) {
                return Err(CliError::Input("synth emits Spectrum CSV only".into()));
            }
            let spec = commands::run_synth(&cfg, cli.seed.unwrap_or(cfg.synthesis.seed))?;
            let mut buf = Vec::new();
            spec.write_csv(&mut buf)?;
            out.body = String::from_utf8(buf).map_err(|e| CliError::Input(e.to_string()))?;
        }
        Command::Analyze { input } => {
            let spec = Spectrum::load(input)
                .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
            let report = commands::run_analyze(&spec, &cfg, &mut out.log)?;
            out.log
                .extend(report.warnings.iter().map(|w| format!("warning: {w}")));
            out.body = output::render(&report, cli.format.unwrap_or(Format::Structured))?;
        }
        Command::Sweep => {
            let table = commands::run_sweep(&cfg)?;
            out.body = table_body(&table, cli.format)?;
        }
        Command::Repro { target } => {
            let table = commands::run_repro(&cfg, *target)?;
            out.log = table
                .meta
                .iter()
                .map(|(k, v)| format!("{k}: {v}"))
                .collect();
            out.body = table_body(&table, cli.format)?;
        }
        Command::Modal { shape_out } => {
            let (report, shape) = commands::run_modal(&cfg)?;
            if let Some(p) = shape_out {
                shape.save(p)?;
            }
            out.body = output::render(&report, cli.format.unwrap_or(Format::Structured))?;
        }
    }
    Ok(out)
}

fn table_body(table: &SweepTable, format: Option<Format>) -> Result<String, CliError> {
    match format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(table.to_csv()),
        Format::Structured => output::to_json(table),
    }
}
