//! Run configuration: a versioned TOML schema mirroring the library types.
//! Unknown keys are rejected everywhere.

use serde::Deserialize;

use photosynapse::kinetics::{named_device, DeviceParams, Polarity, Pulse, PulseTrain, TrapPool};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    pub device: DeviceSection,
    #[serde(default)]
    pub environment: EnvironmentSection,
    pub stimulus: Option<StimulusSection>,
    pub protocol: Option<ProtocolSection>,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (this build reads {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        Ok(config)
    }

    /// Resolve the device section into validated parameters.
    pub fn device(&self) -> Result<DeviceParams, CliError> {
        let d = &self.device;
        let mut params = match &d.name {
            Some(name) => named_device(name)?,
            None => DeviceParams {
                polarity: d
                    .polarity
                    .ok_or_else(|| CliError::Config("device.polarity required".into()))?,
                n0: field(d.n0_cm3, "device.n0_cm3")?,
                mu0: field(d.mu0_cm2_per_vs, "device.mu0_cm2_per_vs")?,
                length: field(d.length_cm, "device.length_cm")?,
                width: field(d.width_cm, "device.width_cm")?,
                thickness: field(d.thickness_cm, "device.thickness_cm")?,
                read_voltage: field(d.read_voltage_v, "device.read_voltage_v")?,
                pools: Vec::new(),
                temperature_ref: d.temperature_ref_k.unwrap_or(300.0),
            },
        };
        // named base + field overrides
        if d.name.is_some() {
            if let Some(p) = d.polarity {
                params.polarity = p;
            }
            override_field(&mut params.n0, d.n0_cm3);
            override_field(&mut params.mu0, d.mu0_cm2_per_vs);
            override_field(&mut params.length, d.length_cm);
            override_field(&mut params.width, d.width_cm);
            override_field(&mut params.thickness, d.thickness_cm);
            override_field(&mut params.read_voltage, d.read_voltage_v);
            override_field(&mut params.temperature_ref, d.temperature_ref_k);
        }
        if let Some(pools) = &d.pools {
            params.pools = pools.iter().map(PoolSection::to_pool).collect();
        } else if d.name.is_none() {
            return Err(CliError::Config(
                "device.pools required for an inline device".into(),
            ));
        }
        params.validate()?;
        Ok(params)
    }

    /// Run temperature: CLI override beats the environment section.
    pub fn temperature(&self, cli_override: Option<f64>) -> f64 {
        cli_override.unwrap_or(self.environment.temperature_k)
    }

    pub fn stimulus_train(&self) -> Result<PulseTrain, CliError> {
        match &self.stimulus {
            Some(StimulusSection::Uniform {
                start_s,
                count,
                duration_s,
                period_s,
                intensity_mw_cm2,
            }) => Ok(PulseTrain::uniform(
                *start_s,
                *count,
                *duration_s,
                *period_s,
                *intensity_mw_cm2,
            )?),
            Some(StimulusSection::Pulses { pulses }) => Ok(PulseTrain::new(
                pulses
                    .iter()
                    .map(|p| Pulse {
                        start: p.start_s,
                        duration: p.duration_s,
                        intensity: p.intensity_mw_cm2,
                    })
                    .collect(),
            )?),
            None => Err(CliError::Config("missing [stimulus] section".into())),
        }
    }
}

fn field(v: Option<f64>, name: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Config(format!("{name} required")))
}

fn override_field(target: &mut f64, v: Option<f64>) {
    if let Some(v) = v {
        *target = v;
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSection {
    /// Shipped configuration name; inline fields below override it.
    pub name: Option<String>,
    pub polarity: Option<Polarity>,
    pub n0_cm3: Option<f64>,
    pub mu0_cm2_per_vs: Option<f64>,
    pub length_cm: Option<f64>,
    pub width_cm: Option<f64>,
    pub thickness_cm: Option<f64>,
    pub read_voltage_v: Option<f64>,
    pub temperature_ref_k: Option<f64>,
    pub pools: Option<Vec<PoolSection>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolSection {
    pub capacity: f64,
    pub fill_coeff: f64,
    pub tau0_s: f64,
    pub ea_mev: f64,
    pub coupling: f64,
}

impl PoolSection {
    fn to_pool(&self) -> TrapPool {
        TrapPool {
            capacity: self.capacity,
            fill_coeff: self.fill_coeff,
            tau0: self.tau0_s,
            ea_mev: self.ea_mev,
            coupling: self.coupling,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    #[serde(default = "default_temperature")]
    pub temperature_k: f64,
    #[serde(default = "default_sample_dt")]
    pub sample_dt_s: f64,
    pub t_end_s: Option<f64>,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        Self {
            temperature_k: default_temperature(),
            sample_dt_s: default_sample_dt(),
            t_end_s: None,
        }
    }
}

fn default_temperature() -> f64 {
    300.0
}

fn default_sample_dt() -> f64 {
    0.25
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StimulusSection {
    Uniform {
        #[serde(default)]
        start_s: f64,
        count: usize,
        duration_s: f64,
        period_s: f64,
        intensity_mw_cm2: f64,
    },
    Pulses { pulses: Vec<PulseSpec> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub start_s: f64,
    pub duration_s: f64,
    pub intensity_mw_cm2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProtocolSection {
    StmLtm {
        axis: String,
        values: Vec<f64>,
        #[serde(default)]
        overrides: SweepOverrides,
    },
    Learning {
        threshold_delta_a: Option<f64>,
        n_cycles: Option<usize>,
        rest_s: Option<f64>,
        pulse_duration_s: Option<f64>,
        period_s: Option<f64>,
        intensity_mw_cm2: Option<f64>,
    },
    Ppf {
        frequency_hz: f64,
        #[serde(default = "default_n_pulses")]
        n_pulses: usize,
        #[serde(default = "default_freq_duration")]
        duration_s: f64,
        #[serde(default = "default_intensity")]
        intensity_mw_cm2: f64,
    },
    Filter {
        frequencies_hz: Vec<f64>,
        #[serde(default = "default_n_pulses")]
        n_pulses: usize,
        #[serde(default = "default_freq_duration")]
        duration_s: f64,
        #[serde(default = "default_intensity")]
        intensity_mw_cm2: f64,
    },
    Stdp {
        delta_ts_s: Vec<f64>,
        #[serde(default = "default_measure_delay")]
        measure_delay_s: f64,
        #[serde(default = "default_pulse_duration")]
        duration_s: f64,
        #[serde(default = "default_intensity")]
        intensity_mw_cm2: f64,
    },
    Logic {
        gate: String,
        threshold_s: Option<f64>,
        #[serde(default = "default_measure_delay")]
        measure_delay_s: f64,
        #[serde(default = "default_pulse_duration")]
        duration_s: f64,
        #[serde(default = "default_intensity")]
        intensity_mw_cm2: f64,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOverrides {
    pub intensity_mw_cm2: Option<f64>,
    pub pulse_duration_s: Option<f64>,
    pub period_s: Option<f64>,
    pub pulse_count: Option<usize>,
    pub freq_pulse_duration_s: Option<f64>,
    pub horizon_s: Option<f64>,
    pub fraction: Option<f64>,
    pub ltm_threshold_s: Option<f64>,
}

fn default_n_pulses() -> usize {
    20
}

fn default_freq_duration() -> f64 {
    0.25
}

fn default_pulse_duration() -> f64 {
    1.0
}

fn default_intensity() -> f64 {
    40.0
}

fn default_measure_delay() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    #[serde(default)]
    pub format: OutputFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            format: OutputFormat::default(),
        }
    }
}

fn default_out_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}
