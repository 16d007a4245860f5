//! Learning/forgetting cycles: pulse to a conductance threshold, rest, repeat.

use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::kinetics::{
    dark_conductivity, observe_current, DeviceParams, DeviceSim, Polarity, Trace, TracePoint,
};

/// Settings for [`learning_forgetting`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningOptions {
    /// Photo-response magnitude that counts as "learned", A.
    pub threshold_delta: f64,
    pub n_cycles: usize,
    /// Dark rest between cycles, s.
    pub rest: f64,
    /// Pulse width, s.
    pub pulse_duration: f64,
    /// Pulse period, s.
    pub period: f64,
    /// Pulse intensity, mW/cm².
    pub intensity: f64,
    pub temperature: f64,
    /// Sampling step of the recorded forgetting traces, s.
    pub sample_dt: f64,
    /// Abort guard per cycle.
    pub max_pulses_per_cycle: usize,
}

impl LearningOptions {
    /// Calibrated defaults for the shipped configurations: thresholds that
    /// take a few tens of pulses on the first cycle, and rests long enough
    /// that later cycles show partial forgetting.
    pub fn suggested_for(params: &DeviceParams) -> Self {
        let (threshold_delta, rest) = match params.polarity {
            Polarity::Inhibitory => (1.8e-7, 120.0),
            Polarity::Excitatory => (2.2e-8, 300.0),
        };
        Self {
            threshold_delta,
            n_cycles: 3,
            rest,
            pulse_duration: 1.0,
            period: 2.0,
            intensity: 40.0,
            temperature: 300.0,
            sample_dt: 1.0,
            max_pulses_per_cycle: 10_000,
        }
    }
}

/// One learning cycle: the pulse count that reached threshold and the
/// recorded forgetting trace during the rest that followed.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCycle {
    pub cycle_index: usize,
    pub pulses_to_threshold: usize,
    pub forgetting_trace: Trace,
}

/// Drive repeated learning/forgetting cycles.
///
/// Pulses are applied until |I − I_dark| ≥ `threshold_delta` (measured at
/// pulse ends); the device then rests in the dark while the forgetting
/// trace is recorded. Residual slow-pool occupancy survives the rest, so
/// later cycles need fewer pulses.
pub fn learning_forgetting(
    params: &DeviceParams,
    opts: &LearningOptions,
) -> Result<Vec<LearningCycle>, ProtocolError> {
    if opts.n_cycles == 0 {
        return Err(ProtocolError::Input("n_cycles must be at least 1".into()));
    }
    if !(opts.threshold_delta > 0.0) {
        return Err(ProtocolError::Input(format!(
            "threshold_delta must be positive, got {}",
            opts.threshold_delta
        )));
    }
    if opts.pulse_duration >= opts.period {
        return Err(ProtocolError::Input(format!(
            "pulse duration {} s must be shorter than the period {} s",
            opts.pulse_duration, opts.period
        )));
    }
    if !(opts.sample_dt > 0.0 && opts.rest > 0.0) {
        return Err(ProtocolError::Input(
            "rest and sample_dt must be positive".into(),
        ));
    }
    let dark = dark_conductivity(params)?.dark_current;

    // Supremum of the photo-response: every pool at capacity.
    let mut saturated = params.dark_state(opts.temperature);
    for (h, pool) in saturated.occupancies.iter_mut().zip(&params.pools) {
        *h = pool.capacity;
    }
    let max_delta = (observe_current(&saturated, params).current - dark).abs();
    if opts.threshold_delta > max_delta {
        let pool = dominant_pool(params);
        return Err(ProtocolError::ThresholdUnreachable {
            pool,
            occupancy_fraction: 100.0,
            threshold: opts.threshold_delta,
        });
    }

    let mut sim = DeviceSim::new(params, opts.temperature)?;
    let mut cycles = Vec::with_capacity(opts.n_cycles);
    for cycle_index in 0..opts.n_cycles {
        let mut pulses = 0usize;
        loop {
            sim.advance(opts.intensity, opts.pulse_duration);
            pulses += 1;
            if (sim.current() - dark).abs() >= opts.threshold_delta {
                break;
            }
            if pulses >= opts.max_pulses_per_cycle {
                let (pool, frac) = most_saturated_pool(&sim, params);
                return Err(ProtocolError::ThresholdUnreachable {
                    pool,
                    occupancy_fraction: frac * 100.0,
                    threshold: opts.threshold_delta,
                });
            }
            sim.advance(0.0, opts.period - opts.pulse_duration);
        }

        let n_samples = (opts.rest / opts.sample_dt).floor() as usize;
        let mut samples = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            sim.advance(0.0, opts.sample_dt);
            samples.push(TracePoint {
                t: sim.time(),
                current: sim.current(),
            });
        }
        let leftover = opts.rest - n_samples as f64 * opts.sample_dt;
        if leftover > 0.0 {
            sim.advance(0.0, leftover);
        }
        cycles.push(LearningCycle {
            cycle_index,
            pulses_to_threshold: pulses,
            forgetting_trace: Trace::new(
                samples,
                params.read_voltage,
                opts.temperature,
                format!("forgetting-cycle-{cycle_index}"),
            )?,
        });
    }
    Ok(cycles)
}

fn dominant_pool(params: &DeviceParams) -> usize {
    params
        .pools
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            (a.coupling * a.capacity)
                .partial_cmp(&(b.coupling * b.capacity))
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap_or(0)
}

fn most_saturated_pool(sim: &DeviceSim, params: &DeviceParams) -> (usize, f64) {
    sim.state()
        .occupancies
        .iter()
        .zip(&params.pools)
        .enumerate()
        .map(|(i, (&h, pool))| (i, h / pool.capacity))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap_or((0, 0.0))
}
