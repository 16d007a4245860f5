//! Simulation driver: piecewise-constant illumination, exact segment
//! updates, dense or event-driven sampling.

use super::device::{observe_current, pool_step, Observation};
use super::{DeviceParams, DeviceState, KineticsError, PulseTrain, Trace, TracePoint};

/// Single-device simulator owning its state.
///
/// Temperature is fixed per run, so each pool's release time constant is
/// resolved once at construction. `advance` applies the exact closed-form
/// segment update; `run_train_until` splits time at pulse edges so arbitrary
/// programs stay exact.
#[derive(Debug, Clone)]
pub struct DeviceSim<'a> {
    params: &'a DeviceParams,
    taus: Vec<f64>,
    state: DeviceState,
}

impl<'a> DeviceSim<'a> {
    pub fn new(params: &'a DeviceParams, temperature: f64) -> Result<Self, KineticsError> {
        params.validate()?;
        if !(temperature > 0.0) {
            return Err(KineticsError::NonPositive {
                field: "temperature",
                value: temperature,
            });
        }
        let taus = params
            .pools
            .iter()
            .map(|p| p.tau_at(temperature))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            params,
            taus,
            state: params.dark_state(temperature),
        })
    }

    pub fn params(&self) -> &DeviceParams {
        self.params
    }

    pub fn state(&self) -> &DeviceState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    /// Reset all pools to dark and the clock to zero.
    pub fn reset(&mut self) {
        self.state.occupancies.fill(0.0);
        self.state.time = 0.0;
    }

    /// Advance by `dt` under constant `intensity`. `dt = 0` is a no-op.
    pub fn advance(&mut self, intensity: f64, dt: f64) {
        if dt <= 0.0 {
            return;
        }
        for ((pool, &tau), h) in self
            .params
            .pools
            .iter()
            .zip(&self.taus)
            .zip(&mut self.state.occupancies)
        {
            *h = pool_step(pool, tau, *h, intensity, dt);
        }
        self.state.time += dt;
    }

    /// Advance through `train` from the current time to absolute time `t`,
    /// splitting segments at every pulse edge.
    pub fn run_train_until(&mut self, train: &PulseTrain, t: f64) {
        let mut now = self.state.time;
        if t <= now {
            return;
        }
        for edge in train.edges() {
            if edge <= now {
                continue;
            }
            if edge >= t {
                break;
            }
            let mid = 0.5 * (now + edge);
            self.advance(train.intensity_at(mid), edge - now);
            now = edge;
        }
        let mid = 0.5 * (now + t);
        self.advance(train.intensity_at(mid), t - now);
    }

    pub fn observe(&self) -> Observation {
        observe_current(&self.state, self.params)
    }

    /// Read current, A.
    pub fn current(&self) -> f64 {
        self.observe().current
    }

    /// Device conductance I/V, S.
    pub fn conductance(&self) -> f64 {
        self.observe().current / self.params.read_voltage
    }
}

/// One dense-simulation sample with the transport breakdown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetailedSample {
    pub t: f64,
    pub carrier_density: f64,
    pub mobility: f64,
    pub current: f64,
}

fn check_horizon(
    train: &PulseTrain,
    sample_dt: f64,
    t_end: f64,
) -> Result<(), KineticsError> {
    if !(sample_dt > 0.0) {
        return Err(KineticsError::NonPositive {
            field: "sample_dt",
            value: sample_dt,
        });
    }
    if !(t_end >= 0.0) {
        return Err(KineticsError::NonPositive {
            field: "t_end",
            value: t_end,
        });
    }
    if train.end_time() > t_end {
        return Err(KineticsError::TrainExceedsHorizon {
            train_end: train.end_time(),
            t_end,
        });
    }
    Ok(())
}

/// Simulate a stimulation program, sampling the full transport breakdown on
/// a uniform grid `0, sample_dt, …, ≤ t_end`.
pub fn simulate_detailed(
    params: &DeviceParams,
    train: &PulseTrain,
    temperature: f64,
    sample_dt: f64,
    t_end: f64,
) -> Result<Vec<DetailedSample>, KineticsError> {
    check_horizon(train, sample_dt, t_end)?;
    let mut sim = DeviceSim::new(params, temperature)?;
    let n = (t_end / sample_dt).floor() as usize;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = k as f64 * sample_dt;
        sim.run_train_until(train, t);
        let obs = sim.observe();
        out.push(DetailedSample {
            t,
            carrier_density: obs.carrier_density,
            mobility: obs.mobility,
            current: obs.current,
        });
    }
    Ok(out)
}

/// Simulate a stimulation program into a photocurrent [`Trace`].
///
/// Deterministic: identical inputs produce bit-identical traces.
pub fn simulate(
    params: &DeviceParams,
    train: &PulseTrain,
    temperature: f64,
    sample_dt: f64,
    t_end: f64,
) -> Result<Trace, KineticsError> {
    let samples = simulate_detailed(params, train, temperature, sample_dt, t_end)?
        .into_iter()
        .map(|s| TracePoint {
            t: s.t,
            current: s.current,
        })
        .collect();
    Trace::new(samples, params.read_voltage, temperature, "simulation")
}
