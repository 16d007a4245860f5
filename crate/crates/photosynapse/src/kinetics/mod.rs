//! Trap-pool device model and closed-form transient models.
//!
//! A device is a thin-film resistor whose photo-response is carried by a
//! small set of independent, saturable trap pools. Each pool fills under
//! illumination at a rate proportional to intensity (with capacity
//! saturation) and empties thermally with an Arrhenius-activated time
//! constant:
//!
//! ```text
//! dh/dt = g·Φ·(1 − h/H) − h/τ(T),    τ(T) = τ₀·exp(Ea / kB·T)
//! ```
//!
//! This linear ODE has an exact per-segment solution, so simulation over
//! piecewise-constant illumination carries no integration error. Occupied
//! pools act on transport according to device polarity: inhibitory devices
//! lose mobility (captured carriers scatter), excitatory devices gain free
//! carriers. Current follows from σ = n·e·μ and the device geometry.

mod configs;
mod device;
mod model;
mod pulse;
mod sim;
mod trace;

pub use configs::{named_device, scn_inhibitory_default, scn_mg_excitatory_default, NAMED_DEVICES};
pub use device::{
    arrhenius_tau, dark_conductivity, observe_current, step_segment, DarkTransport, DeviceParams,
    DeviceState, Observation, Polarity, TrapPool,
};
pub use model::{ExpTerm, KineticModel};
pub use pulse::{Pulse, PulseTrain};
pub use sim::{simulate, simulate_detailed, DetailedSample, DeviceSim};
pub use trace::{Trace, TracePoint};

use thiserror::Error;

/// Errors from device construction, stimulation programs, and model evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KineticsError {
    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("{field} must be finite, got {value}")]
    NonFinite { field: &'static str, value: f64 },
    #[error("read voltage must be nonzero")]
    ZeroReadVoltage,
    #[error("{polarity:?} devices need at least {required} trap pools, got {got}")]
    TooFewPools {
        polarity: Polarity,
        required: usize,
        got: usize,
    },
    #[error("pool count mismatch: state has {state} occupancies, device has {device} pools")]
    PoolCountMismatch { state: usize, device: usize },
    #[error("occupancy {value} outside [0, {capacity}] for pool {pool}")]
    OccupancyOutOfBounds {
        pool: usize,
        value: f64,
        capacity: f64,
    },
    #[error("invalid pulse train: {0}")]
    InvalidPulseTrain(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("invalid kinetic model: {0}")]
    InvalidModel(String),
    #[error("model evaluated at t = {t} before onset t0 = {t0}")]
    TimeBeforeOnset { t: f64, t0: f64 },
    #[error("pulse train ends at {train_end} s but simulation horizon is {t_end} s")]
    TrainExceedsHorizon { train_end: f64, t_end: f64 },
    #[error("unknown named device '{0}' (available: {})", NAMED_DEVICES.join(", "))]
    UnknownDevice(String),
}
