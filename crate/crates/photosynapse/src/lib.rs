//! Compact-model simulation and analysis for optoelectronic artificial
//! synapses based on persistent photoconductivity.
//!
//! Thin-film devices in which light persistently raises (excitatory) or
//! lowers (inhibitory) the conductance behave like biological synapses:
//! optical pulse trains strengthen a "memory" that then decays over seconds
//! to days. This crate models such devices with saturable trap pools,
//! drives them through the standard synaptic characterisation protocols,
//! and fits the resulting transients with the usual closed-form models.
//!
//! The main pieces:
//!
//! - [`kinetics`] — trap-pool device model, pulse trains, traces, and the
//!   closed-form transient models ([`KineticModel`]).
//! - [`protocols`] — experiment drivers: retention and STM/LTM sweeps,
//!   learning/forgetting cycles, paired-pulse indices and temporal
//!   filtering, two-device STDP, series logic gates, and energy metrics.
//! - [`fitting`] — damped least-squares transient fitting with tail-peeling
//!   initialisation, Arrhenius fits, and AICc model selection.
//! - [`analysis`] — photo-Hall consistency checks and Tauc bandgap
//!   extraction from optical spectra.
//! - [`io`] — CSV/JSON serialisation of traces, spectra, and Hall series.
//!
//! A narrative guide with runnable examples lives in the `book/` directory
//! of the repository; every snippet there is compiled as a doctest.

pub mod analysis;
pub mod fitting;
pub mod io;
pub mod kinetics;
pub mod protocols;
pub mod units;

pub use kinetics::{
    arrhenius_tau, dark_conductivity, observe_current, simulate, step_segment, DeviceParams,
    DeviceSim, DeviceState, KineticModel, KineticsError, Polarity, Pulse, PulseTrain, Trace,
    TracePoint, TrapPool,
};
