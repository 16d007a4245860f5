//! Experiment drivers reproducing the standard synaptic characterisation
//! protocols on simulated devices.
//!
//! Every driver owns the devices it stimulates, runs the exact event-driven
//! simulator, and reduces the result to the protocol's metric: retention
//! time and STM/LTM class, pulses-to-threshold across learning cycles,
//! paired-pulse indices, temporal-filter gain, the STDP curve of a series
//! pair, series logic-gate truth tables, and per-pulse energy figures.

mod energy;
mod gates;
mod learning;
mod retention;
mod stdp;

pub use energy::{power_density, pulse_energy_electrical, pulse_energy_optical};
pub use gates::{
    gate_truth_table, logic_gate, GateKind, GateOptions, GateReading, GateSpec, GateTable,
};
pub use learning::{learning_forgetting, LearningCycle, LearningOptions};
pub use retention::{
    retention, stm_ltm_sweep, MemoryClass, RetentionCriteria, RetentionResult, StimulusAxis,
    SweepOptions,
};
pub use stdp::{stdp, OpticalPulse, SeriesPair, StdpOptions};

use crate::kinetics::KineticsError;
use thiserror::Error;

/// Errors from protocol drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error("invalid protocol input: {0}")]
    Input(String),
    #[error(
        "threshold {threshold:.3e} A unreachable: pool {pool} saturated at \
         {occupancy_fraction:.1}% of capacity"
    )]
    ThresholdUnreachable {
        pool: usize,
        occupancy_fraction: f64,
        threshold: f64,
    },
    #[error("first-pulse amplitude is zero; paired-pulse index undefined")]
    ZeroFirstPulse,
    #[error(
        "no threshold separates the requested gate: G(0,0)={g00:.6e}, G(1,0)={g10:.6e}, \
         G(0,1)={g01:.6e}, G(1,1)={g11:.6e} S"
    )]
    UnsatisfiableGate {
        g00: f64,
        g10: f64,
        g01: f64,
        g11: f64,
    },
}

/// Paired-pulse amplitude indices (A_k/A_1)·100 for k = 2..n.
///
/// Amplitudes are |I − I_dark| measured exactly at each pulse end, from the
/// dark baseline. Facilitation reads as values above 100%.
pub fn ppf_index(
    params: &crate::kinetics::DeviceParams,
    frequency: f64,
    n_pulses: usize,
    pulse: &OpticalPulse,
    temperature: f64,
) -> Result<Vec<f64>, ProtocolError> {
    let amps = pulse_end_amplitudes(params, frequency, n_pulses, pulse, temperature)?;
    let first = amps[0];
    if first == 0.0 {
        return Err(ProtocolError::ZeroFirstPulse);
    }
    Ok(amps[1..].iter().map(|a| a / first * 100.0).collect())
}

/// Temporal-filter transfer: terminal paired-pulse index per frequency.
///
/// Returns `(frequency, gain_percent)` pairs where the gain is
/// (A_n/A_1)·100 after an `n_pulses` train at that frequency.
pub fn filter_response(
    params: &crate::kinetics::DeviceParams,
    frequencies: &[f64],
    n_pulses: usize,
    pulse: &OpticalPulse,
    temperature: f64,
) -> Result<Vec<(f64, f64)>, ProtocolError> {
    if frequencies.is_empty() {
        return Err(ProtocolError::Input("no frequencies given".into()));
    }
    frequencies
        .iter()
        .map(|&f| {
            let indices = ppf_index(params, f, n_pulses, pulse, temperature)?;
            Ok((f, *indices.last().expect("n_pulses >= 2")))
        })
        .collect()
}

/// |I − I_dark| at the end of each pulse of a uniform train.
fn pulse_end_amplitudes(
    params: &crate::kinetics::DeviceParams,
    frequency: f64,
    n_pulses: usize,
    pulse: &OpticalPulse,
    temperature: f64,
) -> Result<Vec<f64>, ProtocolError> {
    if n_pulses < 2 {
        return Err(ProtocolError::Input(format!(
            "paired-pulse protocols need at least 2 pulses, got {n_pulses}"
        )));
    }
    if !(frequency > 0.0) {
        return Err(ProtocolError::Input(format!(
            "frequency must be positive, got {frequency}"
        )));
    }
    let period = 1.0 / frequency;
    if pulse.duration >= period {
        return Err(ProtocolError::Input(format!(
            "pulse duration {} s does not fit in a {:.3} s period at {frequency} Hz",
            pulse.duration, period
        )));
    }
    let dark = crate::kinetics::dark_conductivity(params)?.dark_current;
    let mut sim = crate::kinetics::DeviceSim::new(params, temperature)?;
    let mut amps = Vec::with_capacity(n_pulses);
    for k in 0..n_pulses {
        if k > 0 {
            sim.advance(0.0, period - pulse.duration);
        }
        sim.advance(pulse.intensity, pulse.duration);
        amps.push((sim.current() - dark).abs());
    }
    Ok(amps)
}
