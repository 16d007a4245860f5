//! Spike-timing-dependent plasticity with two devices in series.

use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::kinetics::{dark_conductivity, DeviceParams, DeviceSim, PulseTrain};

/// One rectangular optical stimulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalPulse {
    /// s.
    pub duration: f64,
    /// mW/cm².
    pub intensity: f64,
}

impl Default for OpticalPulse {
    fn default() -> Self {
        Self {
            duration: 1.0,
            intensity: 40.0,
        }
    }
}

/// Pre/post synapse pair wired in series. Both devices must share polarity.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPair {
    pub pre: DeviceParams,
    pub post: DeviceParams,
}

impl SeriesPair {
    pub fn new(pre: DeviceParams, post: DeviceParams) -> Result<Self, ProtocolError> {
        pre.validate().map_err(ProtocolError::Kinetics)?;
        post.validate().map_err(ProtocolError::Kinetics)?;
        if pre.polarity != post.polarity {
            return Err(ProtocolError::Input(
                "series pair must share polarity".into(),
            ));
        }
        Ok(Self { pre, post })
    }

    /// Identical pre and post devices.
    pub fn identical(params: DeviceParams) -> Result<Self, ProtocolError> {
        Self::new(params.clone(), params)
    }

    /// Dark series conductance 1/(R_pre + R_post), S.
    pub fn dark_conductance(&self) -> Result<f64, ProtocolError> {
        let r_pre = dark_conductivity(&self.pre)?.resistance;
        let r_post = dark_conductivity(&self.post)?.resistance;
        Ok(1.0 / (r_pre + r_post))
    }
}

/// Measurement settings for [`stdp`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StdpOptions {
    pub pulse: OpticalPulse,
    /// Delay between the end of the later pulse and the conductance read, s.
    pub measure_delay: f64,
    pub temperature: f64,
}

impl Default for StdpOptions {
    fn default() -> Self {
        Self {
            pulse: OpticalPulse::default(),
            measure_delay: 1.0,
            temperature: 300.0,
        }
    }
}

/// Series conductance change versus pre/post pulse timing.
///
/// For each Δt both devices start dark; the pre device is pulsed at t = 0
/// and the post device at t = Δt (negative Δt pulses the post first). The
/// series conductance G = 1/(R_pre + R_post) is read `measure_delay` after
/// the later pulse ends, and ΔG = G − G_dark is returned per Δt.
///
/// For identical devices the curve is exactly symmetric in Δt and peaks at
/// Δt = 0, where the two responses overlap fully.
pub fn stdp(
    pair: &SeriesPair,
    delta_ts: &[f64],
    opts: &StdpOptions,
) -> Result<Vec<(f64, f64)>, ProtocolError> {
    if delta_ts.is_empty() {
        return Err(ProtocolError::Input("no timing offsets given".into()));
    }
    if !(opts.pulse.duration > 0.0) {
        return Err(ProtocolError::Input("pulse duration must be positive".into()));
    }
    if !(opts.measure_delay >= 0.0) {
        return Err(ProtocolError::Input("measure delay must be non-negative".into()));
    }
    let g_dark = pair.dark_conductance()?;
    delta_ts
        .iter()
        .map(|&dt| {
            if !dt.is_finite() {
                return Err(ProtocolError::Input(format!("non-finite Δt {dt}")));
            }
            // shift the origin so the earlier pulse fires at t = 0; the read
            // happens a fixed delay after the later pulse ends
            let pre_start = (-dt).max(0.0);
            let post_start = dt.max(0.0);
            let measure_at = dt.abs() + opts.pulse.duration + opts.measure_delay;
            let g = series_conductance_at(pair, pre_start, post_start, opts, measure_at)?;
            Ok((dt, g - g_dark))
        })
        .collect()
}

fn series_conductance_at(
    pair: &SeriesPair,
    pre_start: f64,
    post_start: f64,
    opts: &StdpOptions,
    measure_at: f64,
) -> Result<f64, ProtocolError> {
    let pre_train = single_pulse_train(pre_start, &opts.pulse)?;
    let post_train = single_pulse_train(post_start, &opts.pulse)?;
    let mut pre_sim = DeviceSim::new(&pair.pre, opts.temperature)?;
    let mut post_sim = DeviceSim::new(&pair.post, opts.temperature)?;
    pre_sim.run_train_until(&pre_train, measure_at);
    post_sim.run_train_until(&post_train, measure_at);
    let r_pre = pair.pre.read_voltage / pre_sim.current();
    let r_post = pair.post.read_voltage / post_sim.current();
    Ok(1.0 / (r_pre + r_post))
}

fn single_pulse_train(start: f64, pulse: &OpticalPulse) -> Result<PulseTrain, ProtocolError> {
    Ok(PulseTrain::uniform(
        start,
        1,
        pulse.duration,
        pulse.duration,
        pulse.intensity,
    )?)
}
