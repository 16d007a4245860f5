//! Sampled photocurrent traces.

use serde::{Deserialize, Serialize};

use super::KineticsError;

/// One (time, current) sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// s.
    pub t: f64,
    /// A.
    pub current: f64,
}

/// A time-ordered current trace with measurement metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub samples: Vec<TracePoint>,
    /// V.
    pub read_voltage: f64,
    /// K.
    pub temperature: f64,
    pub label: String,
}

impl Trace {
    pub fn new(
        samples: Vec<TracePoint>,
        read_voltage: f64,
        temperature: f64,
        label: impl Into<String>,
    ) -> Result<Self, KineticsError> {
        for (i, s) in samples.iter().enumerate() {
            if !(s.t.is_finite() && s.current.is_finite()) {
                return Err(KineticsError::InvalidTrace(format!(
                    "sample {i} has non-finite values"
                )));
            }
        }
        for w in samples.windows(2) {
            if w[1].t <= w[0].t {
                return Err(KineticsError::InvalidTrace(format!(
                    "time not strictly increasing at t = {}",
                    w[1].t
                )));
            }
        }
        Ok(Self {
            samples,
            read_voltage,
            temperature,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start_time(&self) -> Option<f64> {
        self.samples.first().map(|s| s.t)
    }

    pub fn end_time(&self) -> Option<f64> {
        self.samples.last().map(|s| s.t)
    }

    /// Linear interpolation of the current at `t`; clamps to the end samples
    /// outside the covered range. `None` on an empty trace.
    pub fn interpolate(&self, t: f64) -> Option<f64> {
        let samples = &self.samples;
        let (first, last) = (samples.first()?, samples.last()?);
        if t <= first.t {
            return Some(first.current);
        }
        if t >= last.t {
            return Some(last.current);
        }
        let idx = samples.partition_point(|s| s.t < t);
        let (a, b) = (&samples[idx - 1], &samples[idx]);
        let w = (t - a.t) / (b.t - a.t);
        Some(a.current + w * (b.current - a.current))
    }

    /// Samples with `t` in `[t_start, t_end]`.
    pub fn window(&self, t_start: f64, t_end: f64) -> Vec<TracePoint> {
        self.samples
            .iter()
            .copied()
            .filter(|s| s.t >= t_start && s.t <= t_end)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(points: &[(f64, f64)]) -> Trace {
        Trace::new(
            points
                .iter()
                .map(|&(t, current)| TracePoint { t, current })
                .collect(),
            1.0,
            300.0,
            "test",
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_monotonic_time() {
        let err = Trace::new(
            vec![
                TracePoint { t: 0.0, current: 1.0 },
                TracePoint { t: 0.0, current: 2.0 },
            ],
            1.0,
            300.0,
            "bad",
        )
        .unwrap_err();
        assert!(matches!(err, KineticsError::InvalidTrace(_)));
    }

    #[test]
    fn rejects_non_finite_current() {
        let err = Trace::new(
            vec![TracePoint {
                t: 0.0,
                current: f64::NAN,
            }],
            1.0,
            300.0,
            "bad",
        )
        .unwrap_err();
        assert!(matches!(err, KineticsError::InvalidTrace(_)));
    }

    #[test]
    fn interpolation_is_linear_and_clamped() {
        let tr = trace(&[(0.0, 0.0), (2.0, 4.0)]);
        assert_eq!(tr.interpolate(1.0), Some(2.0));
        assert_eq!(tr.interpolate(-1.0), Some(0.0));
        assert_eq!(tr.interpolate(5.0), Some(4.0));
    }
}
