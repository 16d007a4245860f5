//! Per-event power density and pulse energy.

use super::ProtocolError;
use crate::units::{MM2_TO_CM2, MW_TO_W, W_TO_NW};

/// Synaptic-event power density V·ΔI/A in nW/mm².
///
/// `pulse_width` is part of the event description and feeds
/// [`pulse_energy_electrical`]; the density itself is width-independent.
pub fn power_density(
    read_voltage: f64,
    delta_current: f64,
    area_mm2: f64,
    pulse_width: f64,
) -> Result<f64, ProtocolError> {
    if !(area_mm2 > 0.0) {
        return Err(ProtocolError::Input(format!(
            "device area must be positive, got {area_mm2} mm²"
        )));
    }
    if !(pulse_width >= 0.0) {
        return Err(ProtocolError::Input(format!(
            "pulse width must be non-negative, got {pulse_width} s"
        )));
    }
    Ok(read_voltage * delta_current / area_mm2 * W_TO_NW)
}

/// Optical energy delivered to the device: S·P·dt in J.
pub fn pulse_energy_optical(
    area_mm2: f64,
    intensity_mw_cm2: f64,
    pulse_width: f64,
) -> Result<f64, ProtocolError> {
    for (name, v) in [
        ("area", area_mm2),
        ("intensity", intensity_mw_cm2),
        ("pulse width", pulse_width),
    ] {
        if !(v >= 0.0) {
            return Err(ProtocolError::Input(format!(
                "{name} must be non-negative, got {v}"
            )));
        }
    }
    Ok(area_mm2 * MM2_TO_CM2 * intensity_mw_cm2 * MW_TO_W * pulse_width)
}

/// Electrical energy of a read event: V·I·dt in J.
pub fn pulse_energy_electrical(
    read_voltage: f64,
    current: f64,
    pulse_width: f64,
) -> Result<f64, ProtocolError> {
    if !(pulse_width >= 0.0) {
        return Err(ProtocolError::Input(format!(
            "pulse width must be non-negative, got {pulse_width} s"
        )));
    }
    Ok(read_voltage * current * pulse_width)
}
