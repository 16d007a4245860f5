//! Closed-form transient models: multi-exponential decay/rise, stretched
//! exponential, and the Wickelgren forgetting power law.

use serde::{Deserialize, Serialize};

use super::KineticsError;

/// One amplitude/time-constant pair of a multi-exponential model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    /// A.
    pub amplitude: f64,
    /// s.
    pub tau: f64,
}

/// Parametrised transient model, evaluable at any time ≥ its onset `t0`.
///
/// Time constants of multi-exponential variants are kept in ascending order
/// by [`KineticModel::canonicalize`]; amplitudes travel with their τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum KineticModel {
    /// I(t) = I₀ + Σᵢ Aᵢ·exp(−(t−t₀)/τᵢ)
    ExpDecay {
        baseline: f64,
        terms: Vec<ExpTerm>,
        t0: f64,
    },
    /// I(t) = I₀ + Σᵢ Aᵢ·(1 − exp(−(t−t₀)/τᵢ))
    ExpRise {
        baseline: f64,
        terms: Vec<ExpTerm>,
        t0: f64,
    },
    /// I(t) = I₀ + A·exp(−((t−t₀)/τ)^β), 0 < β ≤ 1
    Stretched {
        baseline: f64,
        amplitude: f64,
        tau: f64,
        beta: f64,
        t0: f64,
    },
    /// I(t) = λ·(1 + β(t−t₀))^(−ψ)
    Wickelgren {
        lambda: f64,
        beta: f64,
        psi: f64,
        t0: f64,
    },
}

impl KineticModel {
    pub fn validate(&self) -> Result<(), KineticsError> {
        let all_finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        match self {
            KineticModel::ExpDecay { baseline, terms, t0 }
            | KineticModel::ExpRise { baseline, terms, t0 } => {
                if terms.is_empty() {
                    return Err(KineticsError::InvalidModel(
                        "exponential model needs at least one term".into(),
                    ));
                }
                if !all_finite(&[*baseline, *t0]) {
                    return Err(KineticsError::InvalidModel("non-finite parameters".into()));
                }
                for term in terms {
                    if !all_finite(&[term.amplitude, term.tau]) {
                        return Err(KineticsError::InvalidModel("non-finite parameters".into()));
                    }
                    if term.tau <= 0.0 {
                        return Err(KineticsError::InvalidModel(format!(
                            "time constant must be positive, got {}",
                            term.tau
                        )));
                    }
                }
            }
            KineticModel::Stretched {
                baseline,
                amplitude,
                tau,
                beta,
                t0,
            } => {
                if !all_finite(&[*baseline, *amplitude, *tau, *beta, *t0]) {
                    return Err(KineticsError::InvalidModel("non-finite parameters".into()));
                }
                if *tau <= 0.0 {
                    return Err(KineticsError::InvalidModel(format!(
                        "time constant must be positive, got {tau}"
                    )));
                }
                if !(*beta > 0.0 && *beta <= 1.0) {
                    return Err(KineticsError::InvalidModel(format!(
                        "stretching exponent must lie in (0, 1], got {beta}"
                    )));
                }
            }
            KineticModel::Wickelgren {
                lambda,
                beta,
                psi,
                t0,
            } => {
                if !all_finite(&[*lambda, *beta, *psi, *t0]) {
                    return Err(KineticsError::InvalidModel("non-finite parameters".into()));
                }
                if *beta <= 0.0 {
                    return Err(KineticsError::InvalidModel(format!(
                        "scaling parameter must be positive, got {beta}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluate the model at time `t` (absolute, same axis as `t0`).
    pub fn eval(&self, t: f64) -> Result<f64, KineticsError> {
        self.validate()?;
        let t0 = self.t0();
        if t < t0 {
            return Err(KineticsError::TimeBeforeOnset { t, t0 });
        }
        let dt = t - t0;
        Ok(match self {
            KineticModel::ExpDecay { baseline, terms, .. } => {
                baseline
                    + terms
                        .iter()
                        .map(|term| term.amplitude * (-dt / term.tau).exp())
                        .sum::<f64>()
            }
            KineticModel::ExpRise { baseline, terms, .. } => {
                baseline
                    + terms
                        .iter()
                        .map(|term| term.amplitude * (1.0 - (-dt / term.tau).exp()))
                        .sum::<f64>()
            }
            KineticModel::Stretched {
                baseline,
                amplitude,
                tau,
                beta,
                ..
            } => baseline + amplitude * (-(dt / tau).powf(*beta)).exp(),
            KineticModel::Wickelgren {
                lambda, beta, psi, ..
            } => lambda * (1.0 + beta * dt).powf(-psi),
        })
    }

    pub fn t0(&self) -> f64 {
        match self {
            KineticModel::ExpDecay { t0, .. }
            | KineticModel::ExpRise { t0, .. }
            | KineticModel::Stretched { t0, .. }
            | KineticModel::Wickelgren { t0, .. } => *t0,
        }
    }

    /// Sort multi-exponential terms by ascending τ, keeping each amplitude
    /// with its time constant. No-op for the other variants.
    pub fn canonicalize(&mut self) {
        if let KineticModel::ExpDecay { terms, .. } | KineticModel::ExpRise { terms, .. } = self {
            terms.sort_by(|a, b| a.tau.partial_cmp(&b.tau).unwrap());
        }
    }

    /// Number of free parameters when this model is fitted.
    pub fn param_count(&self) -> usize {
        match self {
            KineticModel::ExpDecay { terms, .. } | KineticModel::ExpRise { terms, .. } => {
                1 + 2 * terms.len()
            }
            KineticModel::Stretched { .. } => 4,
            KineticModel::Wickelgren { .. } => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn decay_at_onset_sums_amplitudes() {
        let m = KineticModel::ExpDecay {
            baseline: 0.5,
            terms: vec![
                ExpTerm {
                    amplitude: 1.0,
                    tau: 25.0,
                },
                ExpTerm {
                    amplitude: 2.0,
                    tau: 200.0,
                },
            ],
            t0: 10.0,
        };
        assert_relative_eq!(m.eval(10.0).unwrap(), 3.5);
    }

    #[test]
    fn double_exp_at_cryogenic_time_constants() {
        // A1 = A2 = 1, tau = 25/200 s, evaluated 25 s after onset
        let m = KineticModel::ExpDecay {
            baseline: 0.0,
            terms: vec![
                ExpTerm {
                    amplitude: 1.0,
                    tau: 25.0,
                },
                ExpTerm {
                    amplitude: 1.0,
                    tau: 200.0,
                },
            ],
            t0: 0.0,
        };
        let expect = (-1.0f64).exp() + (-0.125f64).exp();
        assert_relative_eq!(m.eval(25.0).unwrap(), expect, max_relative = 1e-12);
        assert_relative_eq!(m.eval(25.0).unwrap(), 1.2504, max_relative = 1e-4);
    }

    #[test]
    fn wickelgren_power_law_point() {
        let m = KineticModel::Wickelgren {
            lambda: 1.0,
            beta: 1.0,
            psi: 1.0,
            t0: 0.0,
        };
        assert_relative_eq!(m.eval(9.0).unwrap(), 0.1, max_relative = 1e-12);
    }

    #[test]
    fn stretched_at_onset_is_baseline_plus_amplitude() {
        let m = KineticModel::Stretched {
            baseline: 0.25,
            amplitude: 1.0,
            tau: 100.0,
            beta: 0.6,
            t0: 5.0,
        };
        assert_relative_eq!(m.eval(5.0).unwrap(), 1.25);
    }

    #[test]
    fn rise_approaches_baseline_plus_amplitudes() {
        let m = KineticModel::ExpRise {
            baseline: 1.0,
            terms: vec![ExpTerm {
                amplitude: 2.0,
                tau: 1.0,
            }],
            t0: 0.0,
        };
        assert_relative_eq!(m.eval(0.0).unwrap(), 1.0);
        assert_relative_eq!(m.eval(100.0).unwrap(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let m = KineticModel::Stretched {
            baseline: 0.0,
            amplitude: 1.0,
            tau: 100.0,
            beta: 1.5,
            t0: 0.0,
        };
        assert!(matches!(m.eval(1.0), Err(KineticsError::InvalidModel(_))));
        let m = KineticModel::ExpDecay {
            baseline: 0.0,
            terms: vec![ExpTerm {
                amplitude: 1.0,
                tau: -2.0,
            }],
            t0: 0.0,
        };
        assert!(m.validate().is_err());
    }

    #[test]
    fn evaluation_before_onset_rejected() {
        let m = KineticModel::ExpDecay {
            baseline: 0.0,
            terms: vec![ExpTerm {
                amplitude: 1.0,
                tau: 1.0,
            }],
            t0: 10.0,
        };
        assert!(matches!(
            m.eval(5.0),
            Err(KineticsError::TimeBeforeOnset { .. })
        ));
    }

    #[test]
    fn canonicalize_orders_terms_and_keeps_pairing() {
        let mut m = KineticModel::ExpDecay {
            baseline: 0.0,
            terms: vec![
                ExpTerm {
                    amplitude: 2.0,
                    tau: 200.0,
                },
                ExpTerm {
                    amplitude: 1.0,
                    tau: 25.0,
                },
            ],
            t0: 0.0,
        };
        let before = m.eval(50.0).unwrap();
        m.canonicalize();
        let KineticModel::ExpDecay { terms, .. } = &m else {
            unreachable!()
        };
        assert!(terms[0].tau < terms[1].tau);
        assert_eq!(terms[0].amplitude, 1.0);
        assert_relative_eq!(m.eval(50.0).unwrap(), before);
    }
}
