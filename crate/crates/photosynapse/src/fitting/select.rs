//! Information-criterion model comparison.

use super::{fit_transient, FitError, FitReport, ModelSpec};
use crate::kinetics::Trace;

/// Outcome of a model-selection pass.
#[derive(Debug, Clone)]
pub struct ModelSelection {
    /// Successful fits, best first (ascending AICc, ties to fewer
    /// parameters).
    pub ranked: Vec<FitReport>,
    /// Candidates that could not be fitted, with the reason.
    pub excluded: Vec<(ModelSpec, FitError)>,
}

/// Fit every candidate over the trace's full span and rank by AICc.
/// Degenerate candidates are excluded with a note rather than failing the
/// whole pass.
pub fn model_select(
    trace: &Trace,
    candidates: &[ModelSpec],
) -> Result<ModelSelection, FitError> {
    if candidates.is_empty() {
        return Err(FitError::NoCandidates);
    }
    let (Some(start), Some(end)) = (trace.start_time(), trace.end_time()) else {
        return Err(FitError::Input("empty trace".into()));
    };
    let mut ranked = Vec::new();
    let mut excluded = Vec::new();
    for &spec in candidates {
        match fit_transient(trace, spec, (start, end)) {
            Ok(report) => ranked.push(report),
            Err(err) => excluded.push((spec, err)),
        }
    }
    if ranked.is_empty() {
        return Err(FitError::NoCandidates);
    }
    ranked.sort_by(|a, b| {
        a.aicc
            .partial_cmp(&b.aicc)
            .unwrap()
            .then(a.model.param_count().cmp(&b.model.param_count()))
    });
    Ok(ModelSelection { ranked, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::{ExpTerm, KineticModel, Trace, TracePoint};

    fn sampled(model: &KineticModel, t_end: f64, dt: f64) -> Trace {
        let n = (t_end / dt) as usize;
        let samples = (0..=n)
            .map(|i| {
                let t = i as f64 * dt;
                TracePoint {
                    t,
                    current: model.eval(t).unwrap(),
                }
            })
            .collect();
        Trace::new(samples, 1.0, 300.0, "synthetic").unwrap()
    }

    #[test]
    fn single_candidate_is_rank_one() {
        let truth = KineticModel::ExpDecay {
            baseline: 0.0,
            terms: vec![ExpTerm {
                amplitude: 1.0,
                tau: 30.0,
            }],
            t0: 0.0,
        };
        let trace = sampled(&truth, 300.0, 0.5);
        let sel = model_select(&trace, &[ModelSpec::exp_decay(1)]).unwrap();
        assert_eq!(sel.ranked.len(), 1);
        assert!(sel.excluded.is_empty());
    }

    #[test]
    fn stretched_truth_beats_double_exponential() {
        let truth = KineticModel::Stretched {
            baseline: 0.1,
            amplitude: 1.0,
            tau: 100.0,
            beta: 0.5,
            t0: 0.0,
        };
        let trace = sampled(&truth, 1000.0, 1.0);
        let sel = model_select(
            &trace,
            &[ModelSpec::exp_decay(2), ModelSpec::stretched()],
        )
        .unwrap();
        assert!(matches!(
            sel.ranked[0].model,
            KineticModel::Stretched { .. }
        ));
    }
}
