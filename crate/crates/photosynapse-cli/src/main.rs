//! Command-line front end: simulations, synaptic protocols, transient fits,
//! and spectrum analysis driven by TOML run configurations.
//!
//! Outputs are deterministic: identical config and seed produce
//! byte-identical files. Failures print a machine-readable JSON error to
//! stderr and exit nonzero. Log verbosity is controlled only by the
//! `PHOTOSYNAPSE_LOG` environment variable.

mod commands;
mod config;
mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::OutputFormat;

#[derive(Parser)]
#[command(name = "photosynapse", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub(crate) struct CommonOpts {
    /// Run configuration (TOML).
    #[arg(long)]
    pub(crate) config: Option<PathBuf>,
    /// Output directory (overrides the config's output.dir).
    #[arg(long)]
    pub(crate) out: Option<PathBuf>,
    /// Output formats (overrides the config's output.format).
    #[arg(long, value_enum)]
    pub(crate) format: Option<OutputFormat>,
    /// Seed recorded in reports (overrides the config's seed).
    #[arg(long)]
    pub(crate) seed: Option<u64>,
    /// Run temperature in K (overrides the config's environment).
    #[arg(long)]
    pub(crate) temperature: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum ProtocolName {
    StmLtm,
    Learning,
    Ppf,
    Filter,
    Stdp,
    Logic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum AxisName {
    Number,
    Duration,
    Intensity,
    Frequency,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum FitModelName {
    ExpDecay,
    ExpRise,
    Stretched,
    Wickelgren,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured stimulation program into a trace.
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a synaptic protocol from the config's [protocol] section.
    Protocol {
        which: ProtocolName,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Fit a transient model to a trace file (or every trace in a directory).
    Fit {
        /// Trace CSV file or a directory of trace CSVs.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        model: FitModelName,
        /// Exponential term count (exp-decay/exp-rise).
        #[arg(long, default_value_t = 2)]
        terms: usize,
        /// Fit window [start, end] in seconds (default: full trace).
        #[arg(long, num_args = 2, value_names = ["START", "END"])]
        window: Option<Vec<f64>>,
        /// Light-off instant for wickelgren fits (default: trace start).
        #[arg(long)]
        off_time: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Extract the direct optical bandgap from a spectrum CSV.
    Tauc {
        /// Spectrum CSV (`wavelength_nm,transmittance,reflectance`).
        #[arg(long)]
        input: PathBuf,
        /// Energy window [lo, hi] in eV (default: automatic).
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        window: Option<Vec<f64>>,
        /// Film thickness in cm when the CSV carries no metadata.
        #[arg(long)]
        thickness_cm: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Retention sweep along a stimulus axis, fanned out concurrently.
    Sweep {
        #[arg(long, value_enum)]
        axis: AxisName,
        /// Axis values, comma separated, strictly ascending.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("PHOTOSYNAPSE_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { common } => commands::simulate(&common),
        Command::Protocol { which, common } => commands::protocol(which, &common),
        Command::Fit {
            input,
            model,
            terms,
            window,
            off_time,
            common,
        } => commands::fit(&input, model, terms, window.as_deref(), off_time, &common),
        Command::Tauc {
            input,
            window,
            thickness_cm,
            common,
        } => commands::tauc(&input, window.as_deref(), thickness_cm, &common),
        Command::Sweep {
            axis,
            values,
            common,
        } => commands::sweep(axis, &values, &common),
    };
    if let Err(err) = result {
        let payload = serde_json::json!({
            "error": { "code": err.code(), "message": err.to_string() }
        });
        eprintln!("{payload}");
        std::process::exit(1);
    }
}
