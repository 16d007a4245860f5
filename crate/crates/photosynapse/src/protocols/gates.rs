//! Optical logic gates with two devices in series.
//!
//! An input bit of 1 illuminates the corresponding device with one standard
//! pulse; the series conductance read after the pulse is compared against a
//! threshold. Excitatory pairs realise OR/AND (light raises G), inhibitory
//! pairs realise NOR/NAND (light lowers G).

use serde::{Deserialize, Serialize};

use super::stdp::{OpticalPulse, SeriesPair};
use super::ProtocolError;
use crate::kinetics::{DeviceSim, Polarity, PulseTrain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Or,
    And,
    Nor,
    Nand,
}

impl GateKind {
    /// Device polarity this gate family needs.
    pub fn required_polarity(self) -> Polarity {
        match self {
            GateKind::Or | GateKind::And => Polarity::Excitatory,
            GateKind::Nor | GateKind::Nand => Polarity::Inhibitory,
        }
    }

    /// Boolean definition of the gate.
    pub fn truth(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::Or => a || b,
            GateKind::And => a && b,
            GateKind::Nor => !(a || b),
            GateKind::Nand => !(a && b),
        }
    }
}

/// Gate request: kind plus an optional explicit conductance threshold.
/// Without a threshold the midpoint of the feasibility interval is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub gate: GateKind,
    /// S.
    pub threshold: Option<f64>,
}

/// Measurement settings for gate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateOptions {
    pub pulse: OpticalPulse,
    /// Delay between pulse end and the conductance read, s.
    pub measure_delay: f64,
    pub temperature: f64,
}

impl Default for GateOptions {
    fn default() -> Self {
        Self {
            pulse: OpticalPulse::default(),
            measure_delay: 1.0,
            temperature: 300.0,
        }
    }
}

/// One evaluated input pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateReading {
    pub inputs: (bool, bool),
    /// Net series conductance at the read instant, S.
    pub g_net: f64,
    pub output: bool,
}

/// Full truth table with the threshold that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateTable {
    pub gate: GateKind,
    /// S.
    pub threshold: f64,
    /// Open feasibility interval (lo, hi) of thresholds realising the gate.
    pub feasible: (f64, f64),
    pub readings: [GateReading; 4],
}

/// Series conductance after pulsing the devices selected by `inputs`.
fn g_net(
    pair: &SeriesPair,
    inputs: (bool, bool),
    opts: &GateOptions,
) -> Result<f64, ProtocolError> {
    let measure_at = opts.pulse.duration + opts.measure_delay;
    let mut g_inv = 0.0;
    for (params, lit) in [(&pair.pre, inputs.0), (&pair.post, inputs.1)] {
        let mut sim = DeviceSim::new(params, opts.temperature)?;
        if lit {
            let train =
                PulseTrain::uniform(0.0, 1, opts.pulse.duration, opts.pulse.duration, opts.pulse.intensity)?;
            sim.run_train_until(&train, measure_at);
        } else {
            sim.advance(0.0, measure_at);
        }
        g_inv += params.read_voltage / sim.current();
    }
    Ok(1.0 / g_inv)
}

/// Evaluate all four input combinations of a gate, deriving the threshold
/// from the feasibility interval when none is supplied.
pub fn gate_truth_table(
    spec: &GateSpec,
    pair: &SeriesPair,
    opts: &GateOptions,
) -> Result<GateTable, ProtocolError> {
    let required = spec.gate.required_polarity();
    if pair.pre.polarity != required {
        return Err(ProtocolError::Input(format!(
            "{:?} gates need {:?} devices, pair is {:?}",
            spec.gate, required, pair.pre.polarity
        )));
    }
    let cases = [(false, false), (true, false), (false, true), (true, true)];
    let g: Vec<f64> = cases
        .iter()
        .map(|&inputs| g_net(pair, inputs, opts))
        .collect::<Result<_, _>>()?;
    let (g00, g10, g01, g11) = (g[0], g[1], g[2], g[3]);

    // thresholds must separate the "output 1" conductances (all ≥ threshold)
    // from the "output 0" ones (all < threshold)
    let mut ones_min = f64::INFINITY;
    let mut zeros_max = f64::NEG_INFINITY;
    for (&inputs, &g_val) in cases.iter().zip(&g) {
        if spec.gate.truth(inputs.0, inputs.1) {
            ones_min = ones_min.min(g_val);
        } else {
            zeros_max = zeros_max.max(g_val);
        }
    }
    if !(zeros_max < ones_min) {
        return Err(ProtocolError::UnsatisfiableGate { g00, g10, g01, g11 });
    }
    let feasible = (zeros_max, ones_min);
    let threshold = match spec.threshold {
        Some(t) => {
            if !(t > zeros_max && t <= ones_min) {
                return Err(ProtocolError::UnsatisfiableGate { g00, g10, g01, g11 });
            }
            t
        }
        None => 0.5 * (zeros_max + ones_min),
    };
    let readings = [0, 1, 2, 3].map(|i| GateReading {
        inputs: cases[i],
        g_net: g[i],
        output: g[i] >= threshold,
    });
    Ok(GateTable {
        gate: spec.gate,
        threshold,
        feasible,
        readings,
    })
}

/// Evaluate a single input pair (derives the auto threshold internally).
pub fn logic_gate(
    spec: &GateSpec,
    pair: &SeriesPair,
    inputs: (bool, bool),
    opts: &GateOptions,
) -> Result<GateReading, ProtocolError> {
    let table = gate_truth_table(spec, pair, opts)?;
    Ok(*table
        .readings
        .iter()
        .find(|r| r.inputs == inputs)
        .expect("all four cases evaluated"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::{scn_inhibitory_default, scn_mg_excitatory_default};

    fn outputs(table: &GateTable) -> [bool; 4] {
        [
            table.readings[0].output,
            table.readings[1].output,
            table.readings[2].output,
            table.readings[3].output,
        ]
    }

    #[test]
    fn excitatory_or_and_truth_tables() {
        let pair = SeriesPair::identical(scn_mg_excitatory_default()).unwrap();
        let opts = GateOptions::default();
        let or = gate_truth_table(
            &GateSpec {
                gate: GateKind::Or,
                threshold: None,
            },
            &pair,
            &opts,
        )
        .unwrap();
        assert_eq!(outputs(&or), [false, true, true, true]);
        let and = gate_truth_table(
            &GateSpec {
                gate: GateKind::And,
                threshold: None,
            },
            &pair,
            &opts,
        )
        .unwrap();
        assert_eq!(outputs(&and), [false, false, false, true]);
    }

    #[test]
    fn inhibitory_nor_nand_truth_tables() {
        let pair = SeriesPair::identical(scn_inhibitory_default()).unwrap();
        let opts = GateOptions::default();
        let nor = gate_truth_table(
            &GateSpec {
                gate: GateKind::Nor,
                threshold: None,
            },
            &pair,
            &opts,
        )
        .unwrap();
        assert_eq!(outputs(&nor), [true, false, false, false]);
        let nand = gate_truth_table(
            &GateSpec {
                gate: GateKind::Nand,
                threshold: None,
            },
            &pair,
            &opts,
        )
        .unwrap();
        assert_eq!(outputs(&nand), [true, true, true, false]);
    }

    #[test]
    fn polarity_mismatch_rejected() {
        let pair = SeriesPair::identical(scn_inhibitory_default()).unwrap();
        assert!(matches!(
            gate_truth_table(
                &GateSpec {
                    gate: GateKind::Or,
                    threshold: None
                },
                &pair,
                &GateOptions::default()
            ),
            Err(ProtocolError::Input(_))
        ));
    }

    #[test]
    fn infeasible_explicit_threshold_lists_conductances() {
        let pair = SeriesPair::identical(scn_mg_excitatory_default()).unwrap();
        let res = gate_truth_table(
            &GateSpec {
                gate: GateKind::Or,
                threshold: Some(1.0), // far above every achievable G
            },
            &pair,
            &GateOptions::default(),
        );
        assert!(matches!(res, Err(ProtocolError::UnsatisfiableGate { .. })));
    }
}
