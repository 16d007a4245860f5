//! Device parameters, trap pools, and the transport formulas.

use serde::{Deserialize, Serialize};

use super::KineticsError;
use crate::units::{BOLTZMANN_MEV_PER_K, ELEMENTARY_CHARGE};

/// Synaptic sign of the photo-response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Illumination lowers conductance (persistent negative photoconductivity).
    Inhibitory,
    /// Illumination raises conductance (persistent positive photoconductivity).
    Excitatory,
}

/// One saturable trap pool with first-order fill/decay kinetics.
///
/// `coupling` is the pool's weight on transport per unit occupancy: a
/// mobility-degradation coefficient on inhibitory devices (captured carriers
/// act as charged scattering centres) and a fractional free-carrier gain on
/// excitatory devices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapPool {
    /// Occupancy cap H (dimensionless, normalised trap density).
    pub capacity: f64,
    /// Fill coefficient g, occupancy per (mW/cm²)·s.
    pub fill_coeff: f64,
    /// Decay prefactor τ₀, s.
    pub tau0: f64,
    /// Activation energy Ea, meV.
    pub ea_mev: f64,
    /// Transport weight per unit occupancy (see type docs).
    pub coupling: f64,
}

impl TrapPool {
    pub fn validate(&self) -> Result<(), KineticsError> {
        for (field, value, strictly_positive) in [
            ("pool capacity", self.capacity, true),
            ("pool fill_coeff", self.fill_coeff, false),
            ("pool tau0", self.tau0, true),
            ("pool ea_mev", self.ea_mev, false),
            ("pool coupling", self.coupling, false),
        ] {
            if !value.is_finite() {
                return Err(KineticsError::NonFinite { field, value });
            }
            if value < 0.0 || (strictly_positive && value == 0.0) {
                return Err(KineticsError::NonPositive { field, value });
            }
        }
        Ok(())
    }

    /// Thermal release time constant at temperature `t_kelvin`.
    pub fn tau_at(&self, t_kelvin: f64) -> Result<f64, KineticsError> {
        arrhenius_tau(self.tau0, self.ea_mev, t_kelvin)
    }
}

/// Arrhenius-activated time constant τ₀·exp(Ea / kB·T).
pub fn arrhenius_tau(tau0: f64, ea_mev: f64, t_kelvin: f64) -> Result<f64, KineticsError> {
    if !(tau0 > 0.0) {
        return Err(KineticsError::NonPositive {
            field: "tau0",
            value: tau0,
        });
    }
    if !(t_kelvin > 0.0) {
        return Err(KineticsError::NonPositive {
            field: "temperature",
            value: t_kelvin,
        });
    }
    if ea_mev < 0.0 {
        return Err(KineticsError::NonPositive {
            field: "ea_mev",
            value: ea_mev,
        });
    }
    Ok(tau0 * (ea_mev / (BOLTZMANN_MEV_PER_K * t_kelvin)).exp())
}

/// Full parameter set for one synapse device.
///
/// Geometry is in cm, carrier density in cm⁻³, mobility in cm²/(V·s); see
/// [`crate::units`] for the complete convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub polarity: Polarity,
    /// Dark carrier concentration n₀, cm⁻³.
    pub n0: f64,
    /// Dark mobility μ₀, cm²/(V·s).
    pub mu0: f64,
    /// Contact-to-contact distance, cm.
    pub length: f64,
    /// Channel width, cm.
    pub width: f64,
    /// Film thickness, cm.
    pub thickness: f64,
    /// Read voltage, V.
    pub read_voltage: f64,
    pub pools: Vec<TrapPool>,
    /// Temperature at which the transport baseline was measured, K.
    pub temperature_ref: f64,
}

impl DeviceParams {
    pub fn validate(&self) -> Result<(), KineticsError> {
        for (field, value) in [
            ("n0", self.n0),
            ("mu0", self.mu0),
            ("length", self.length),
            ("width", self.width),
            ("thickness", self.thickness),
            ("temperature_ref", self.temperature_ref),
        ] {
            if !value.is_finite() {
                return Err(KineticsError::NonFinite { field, value });
            }
            if value <= 0.0 {
                return Err(KineticsError::NonPositive { field, value });
            }
        }
        if !self.read_voltage.is_finite() {
            return Err(KineticsError::NonFinite {
                field: "read_voltage",
                value: self.read_voltage,
            });
        }
        if self.read_voltage == 0.0 {
            return Err(KineticsError::ZeroReadVoltage);
        }
        let required = match self.polarity {
            Polarity::Inhibitory => 2,
            Polarity::Excitatory => 3,
        };
        if self.pools.len() < required {
            return Err(KineticsError::TooFewPools {
                polarity: self.polarity,
                required,
                got: self.pools.len(),
            });
        }
        for pool in &self.pools {
            pool.validate()?;
        }
        Ok(())
    }

    /// Geometric conductance factor W·T/L, cm.
    pub fn geometry_factor(&self) -> f64 {
        self.width * self.thickness / self.length
    }

    /// Illuminated device area L·W, mm².
    pub fn area_mm2(&self) -> f64 {
        self.length * self.width * 100.0
    }

    /// All-pools-dark state at the given temperature.
    pub fn dark_state(&self, temperature: f64) -> DeviceState {
        DeviceState {
            occupancies: vec![0.0; self.pools.len()],
            time: 0.0,
            temperature,
        }
    }
}

/// Dark transport derived from a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DarkTransport {
    /// σ = n₀·e·μ₀, S/cm.
    pub conductivity: f64,
    /// ρ = 1/σ, Ω·cm.
    pub resistivity: f64,
    /// R = L/(σ·W·T), Ω.
    pub resistance: f64,
    /// I = V/R, A.
    pub dark_current: f64,
}

/// Dark conductivity, resistance, and read current of a device.
pub fn dark_conductivity(params: &DeviceParams) -> Result<DarkTransport, KineticsError> {
    params.validate()?;
    let sigma = params.n0 * ELEMENTARY_CHARGE * params.mu0;
    let resistance = params.length / (sigma * params.width * params.thickness);
    Ok(DarkTransport {
        conductivity: sigma,
        resistivity: 1.0 / sigma,
        resistance,
        dark_current: params.read_voltage / resistance,
    })
}

/// Mutable per-simulation state: one occupancy per pool plus the clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceState {
    pub occupancies: Vec<f64>,
    /// Elapsed time, s.
    pub time: f64,
    /// Run temperature, K (constant per simulation).
    pub temperature: f64,
}

impl DeviceState {
    pub fn validate_against(&self, params: &DeviceParams) -> Result<(), KineticsError> {
        if self.occupancies.len() != params.pools.len() {
            return Err(KineticsError::PoolCountMismatch {
                state: self.occupancies.len(),
                device: params.pools.len(),
            });
        }
        for (i, (&h, pool)) in self.occupancies.iter().zip(&params.pools).enumerate() {
            if !(0.0..=pool.capacity).contains(&h) {
                return Err(KineticsError::OccupancyOutOfBounds {
                    pool: i,
                    value: h,
                    capacity: pool.capacity,
                });
            }
        }
        Ok(())
    }
}

/// Exact fill/decay update of one pool over a constant-intensity segment.
///
/// Shared by [`step_segment`] and the batch simulator so both paths are
/// bit-identical.
#[inline]
pub(crate) fn pool_step(pool: &TrapPool, tau: f64, occupancy: f64, intensity: f64, dt: f64) -> f64 {
    let fill_rate = pool.fill_coeff * intensity;
    let total_rate = fill_rate / pool.capacity + 1.0 / tau;
    let equilibrium = fill_rate / total_rate;
    equilibrium + (occupancy - equilibrium) * (-total_rate * dt).exp()
}

/// Advance the device state across one constant-intensity segment using the
/// exact closed-form solution of the pool ODE.
pub fn step_segment(
    state: &DeviceState,
    params: &DeviceParams,
    intensity: f64,
    dt: f64,
) -> Result<DeviceState, KineticsError> {
    params.validate()?;
    state.validate_against(params)?;
    if !(dt > 0.0) {
        return Err(KineticsError::NonPositive {
            field: "dt",
            value: dt,
        });
    }
    if !(intensity >= 0.0) {
        return Err(KineticsError::NonPositive {
            field: "intensity",
            value: intensity,
        });
    }
    let mut next = state.clone();
    for (i, pool) in params.pools.iter().enumerate() {
        let tau = pool.tau_at(state.temperature)?;
        next.occupancies[i] = pool_step(pool, tau, state.occupancies[i], intensity, dt);
    }
    next.time += dt;
    Ok(next)
}

/// Carrier density, mobility, and read current for a device state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observation {
    /// cm⁻³.
    pub carrier_density: f64,
    /// cm²/(V·s).
    pub mobility: f64,
    /// A.
    pub current: f64,
}

/// Transport readout: inhibitory occupancy degrades mobility, excitatory
/// occupancy adds carriers; current follows from σ = n·e·μ.
pub fn observe_current(state: &DeviceState, params: &DeviceParams) -> Observation {
    let weighted: f64 = params
        .pools
        .iter()
        .zip(&state.occupancies)
        .map(|(pool, &h)| pool.coupling * h)
        .sum();
    let (n, mu) = match params.polarity {
        Polarity::Inhibitory => (params.n0, params.mu0 / (1.0 + weighted)),
        Polarity::Excitatory => (params.n0 * (1.0 + weighted), params.mu0),
    };
    let sigma = n * ELEMENTARY_CHARGE * mu;
    // same algebraic path as dark_conductivity so the dark state reproduces
    // the dark current bit-exactly
    let resistance = params.length / (sigma * params.width * params.thickness);
    Observation {
        carrier_density: n,
        mobility: mu,
        current: params.read_voltage / resistance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::scn_inhibitory_default;
    use approx::assert_relative_eq;

    fn test_pools(n: usize) -> Vec<TrapPool> {
        (0..n)
            .map(|i| TrapPool {
                capacity: 1.0,
                fill_coeff: 0.01,
                tau0: 100.0 * (i + 1) as f64,
                ea_mev: 0.0,
                coupling: 0.05,
            })
            .collect()
    }

    fn table_s1_device(n0: f64, mu0: f64) -> DeviceParams {
        DeviceParams {
            polarity: Polarity::Inhibitory,
            n0,
            mu0,
            length: 0.72,
            width: 0.17,
            thickness: 2.5e-5,
            read_voltage: 0.02,
            pools: test_pools(2),
            temperature_ref: 300.0,
        }
    }

    #[test]
    fn dark_transport_matches_reported_resistivities() {
        // n-type film: listed resistivity 3e-4 ohm-cm
        let d = dark_conductivity(&table_s1_device(3e20, 67.0)).unwrap();
        assert_relative_eq!(d.resistivity, 3.0e-4, max_relative = 0.05);
        // hole-doped film: listed 0.127 ohm-cm
        let d = dark_conductivity(&table_s1_device(5e18, 9.7)).unwrap();
        assert_relative_eq!(d.resistivity, 0.127, max_relative = 0.05);
    }

    #[test]
    fn dark_transport_ohms_law_consistent() {
        let dev = table_s1_device(3e20, 67.0);
        let d = dark_conductivity(&dev).unwrap();
        assert_relative_eq!(
            d.resistance,
            dev.length / (d.conductivity * dev.width * dev.thickness)
        );
        assert_relative_eq!(d.dark_current, dev.read_voltage / d.resistance);
    }

    #[test]
    fn zero_mobility_rejected() {
        let dev = table_s1_device(3e20, 0.0);
        assert!(matches!(
            dark_conductivity(&dev),
            Err(KineticsError::NonPositive { field: "mu0", .. })
        ));
    }

    #[test]
    fn arrhenius_zero_activation_is_identity() {
        assert_eq!(arrhenius_tau(123.0, 0.0, 300.0).unwrap(), 123.0);
    }

    #[test]
    fn arrhenius_matches_slow_pool_scale() {
        // tau0 = 3.13e4 s, Ea = 30 meV at room temperature sits at the 1e5 s scale
        let tau = arrhenius_tau(3.13e4, 30.0, 300.0).unwrap();
        assert_relative_eq!(tau, 1.0e5, max_relative = 0.01);
        // and slows by ~24x at 80 K
        let tau_cold = arrhenius_tau(3.13e4, 30.0, 80.0).unwrap();
        assert_relative_eq!(tau_cold, 2.43e6, max_relative = 0.01);
        assert!(tau_cold > tau);
    }

    #[test]
    fn arrhenius_rejects_nonpositive_temperature() {
        assert!(arrhenius_tau(1.0, 10.0, 0.0).is_err());
        assert!(arrhenius_tau(1.0, 10.0, -5.0).is_err());
    }

    #[test]
    fn step_dark_equilibrium_stays_dark() {
        let dev = table_s1_device(3e20, 67.0);
        let state = dev.dark_state(300.0);
        let next = step_segment(&state, &dev, 0.0, 10.0).unwrap();
        assert!(next.occupancies.iter().all(|&h| h == 0.0));
        assert_eq!(next.time, 10.0);
    }

    #[test]
    fn step_pure_decay_closed_form() {
        let dev = table_s1_device(3e20, 67.0);
        let mut state = dev.dark_state(300.0);
        state.occupancies = vec![0.5, 0.25];
        let dt = 7.0;
        let next = step_segment(&state, &dev, 0.0, dt).unwrap();
        for (i, pool) in dev.pools.iter().enumerate() {
            let tau = pool.tau_at(300.0).unwrap();
            assert_relative_eq!(
                next.occupancies[i],
                state.occupancies[i] * (-dt / tau).exp(),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn observe_dark_state_matches_dark_conductivity() {
        let dev = scn_inhibitory_default();
        let state = dev.dark_state(300.0);
        let obs = observe_current(&state, &dev);
        let dark = dark_conductivity(&dev).unwrap();
        assert_eq!(obs.current, dark.dark_current);
        assert_eq!(obs.carrier_density, dev.n0);
        assert_eq!(obs.mobility, dev.mu0);
    }

    #[test]
    fn observe_inhibitory_scales_mobility_only() {
        let mut dev = table_s1_device(3e20, 67.0);
        // one pool at weighted occupancy 0.01
        dev.pools[0].coupling = 0.01;
        dev.pools[1].coupling = 0.0;
        let mut state = dev.dark_state(300.0);
        state.occupancies[0] = 1.0;
        let obs = observe_current(&state, &dev);
        let dark = dark_conductivity(&dev).unwrap();
        assert_relative_eq!(obs.current, dark.dark_current / 1.01, max_relative = 1e-14);
        assert_eq!(obs.carrier_density, dev.n0);
    }

    #[test]
    fn observe_excitatory_scales_carriers_only() {
        let mut dev = table_s1_device(2e17, 0.2);
        dev.polarity = Polarity::Excitatory;
        dev.pools = test_pools(3);
        dev.pools[0].coupling = 0.5;
        dev.pools[1].coupling = 0.0;
        dev.pools[2].coupling = 0.0;
        let mut state = dev.dark_state(300.0);
        state.occupancies[0] = 1.0;
        let obs = observe_current(&state, &dev);
        let dark = dark_conductivity(&dev).unwrap();
        assert_relative_eq!(obs.current, 1.5 * dark.dark_current, max_relative = 1e-14);
        assert_eq!(obs.mobility, dev.mu0);
    }

    #[test]
    fn state_validation_catches_out_of_bounds() {
        let dev = table_s1_device(3e20, 67.0);
        let mut state = dev.dark_state(300.0);
        state.occupancies[1] = 1.5;
        assert!(matches!(
            state.validate_against(&dev),
            Err(KineticsError::OccupancyOutOfBounds { pool: 1, .. })
        ));
    }

    #[test]
    fn polarity_pool_minimums_enforced() {
        let mut dev = table_s1_device(3e20, 67.0);
        dev.pools.truncate(1);
        assert!(matches!(
            dev.validate(),
            Err(KineticsError::TooFewPools { required: 2, .. })
        ));
        let mut dev = table_s1_device(3e20, 67.0);
        dev.polarity = Polarity::Excitatory;
        assert!(matches!(
            dev.validate(),
            Err(KineticsError::TooFewPools { required: 3, .. })
        ));
    }
}
