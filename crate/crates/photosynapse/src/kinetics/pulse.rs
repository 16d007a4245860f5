//! Timed optical stimulation programs.

use serde::{Deserialize, Serialize};

use super::KineticsError;

/// One rectangular optical pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    /// Onset, s.
    pub start: f64,
    /// Width, s (> 0).
    pub duration: f64,
    /// Intensity, mW/cm² (≥ 0).
    pub intensity: f64,
}

impl Pulse {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

/// A validated, time-ordered, non-overlapping sequence of optical pulses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Pulse>", into = "Vec<Pulse>")]
pub struct PulseTrain {
    pulses: Vec<Pulse>,
}

impl PulseTrain {
    /// Build a train, enforcing ordering, positive widths, non-negative
    /// intensities, and non-overlap.
    pub fn new(pulses: Vec<Pulse>) -> Result<Self, KineticsError> {
        for (i, p) in pulses.iter().enumerate() {
            if !(p.start.is_finite() && p.duration.is_finite() && p.intensity.is_finite()) {
                return Err(KineticsError::InvalidPulseTrain(format!(
                    "pulse {i} has non-finite fields"
                )));
            }
            if p.start < 0.0 {
                return Err(KineticsError::InvalidPulseTrain(format!(
                    "pulse {i} starts at {} before t = 0",
                    p.start
                )));
            }
            if p.duration <= 0.0 {
                return Err(KineticsError::InvalidPulseTrain(format!(
                    "pulse {i} has non-positive duration {}",
                    p.duration
                )));
            }
            if p.intensity < 0.0 {
                return Err(KineticsError::InvalidPulseTrain(format!(
                    "pulse {i} has negative intensity {}",
                    p.intensity
                )));
            }
        }
        for w in pulses.windows(2) {
            if w[1].start < w[0].start {
                return Err(KineticsError::InvalidPulseTrain(
                    "pulses not sorted by start time".into(),
                ));
            }
            if w[1].start < w[0].end() {
                return Err(KineticsError::InvalidPulseTrain(format!(
                    "pulse starting at {} overlaps previous pulse ending at {}",
                    w[1].start,
                    w[0].end()
                )));
            }
        }
        Ok(Self { pulses })
    }

    /// Train of `count` identical pulses spaced by `period`.
    pub fn uniform(
        start: f64,
        count: usize,
        duration: f64,
        period: f64,
        intensity: f64,
    ) -> Result<Self, KineticsError> {
        if count == 0 {
            return Ok(Self { pulses: Vec::new() });
        }
        if count > 1 && period < duration {
            return Err(KineticsError::InvalidPulseTrain(format!(
                "period {period} s shorter than pulse duration {duration} s"
            )));
        }
        let pulses = (0..count)
            .map(|k| Pulse {
                start: start + k as f64 * period,
                duration,
                intensity,
            })
            .collect();
        Self::new(pulses)
    }

    pub fn empty() -> Self {
        Self { pulses: Vec::new() }
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    /// End of the last pulse, or 0 for an empty train.
    pub fn end_time(&self) -> f64 {
        self.pulses.last().map_or(0.0, Pulse::end)
    }

    /// Repetition rate when the train is uniformly spaced.
    pub fn frequency(&self) -> Option<f64> {
        if self.pulses.len() < 2 {
            return None;
        }
        let first_gap = self.pulses[1].start - self.pulses[0].start;
        if first_gap <= 0.0 {
            return None;
        }
        let uniform = self.pulses.windows(2).all(|w| {
            let gap = w[1].start - w[0].start;
            (gap - first_gap).abs() <= 1e-9 * first_gap
        });
        uniform.then(|| 1.0 / first_gap)
    }

    /// Illumination intensity at time `t` (half-open pulses: on at start,
    /// off at start + duration).
    pub fn intensity_at(&self, t: f64) -> f64 {
        let idx = self.pulses.partition_point(|p| p.start <= t);
        if idx == 0 {
            return 0.0;
        }
        let p = &self.pulses[idx - 1];
        if t < p.end() {
            p.intensity
        } else {
            0.0
        }
    }

    /// Pulse edges (starts and ends) in ascending order, deduplicated.
    pub fn edges(&self) -> Vec<f64> {
        let mut edges: Vec<f64> = self
            .pulses
            .iter()
            .flat_map(|p| [p.start, p.end()])
            .collect();
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup();
        edges
    }
}

impl TryFrom<Vec<Pulse>> for PulseTrain {
    type Error = KineticsError;
    fn try_from(pulses: Vec<Pulse>) -> Result<Self, Self::Error> {
        Self::new(pulses)
    }
}

impl From<PulseTrain> for Vec<Pulse> {
    fn from(train: PulseTrain) -> Self {
        train.pulses
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_rejected() {
        let err = PulseTrain::new(vec![
            Pulse {
                start: 0.0,
                duration: 2.0,
                intensity: 40.0,
            },
            Pulse {
                start: 1.0,
                duration: 1.0,
                intensity: 40.0,
            },
        ])
        .unwrap_err();
        assert!(matches!(err, KineticsError::InvalidPulseTrain(_)));
    }

    #[test]
    fn contiguous_pulses_allowed() {
        assert!(PulseTrain::uniform(0.0, 3, 1.0, 1.0, 40.0).is_ok());
    }

    #[test]
    fn frequency_derived_for_uniform_train() {
        let train = PulseTrain::uniform(5.0, 10, 0.25, 0.5, 40.0).unwrap();
        assert!((train.frequency().unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(train.end_time(), 5.0 + 9.0 * 0.5 + 0.25);
    }

    #[test]
    fn intensity_lookup_half_open() {
        let train = PulseTrain::uniform(1.0, 2, 1.0, 2.0, 40.0).unwrap();
        assert_eq!(train.intensity_at(0.5), 0.0);
        assert_eq!(train.intensity_at(1.0), 40.0);
        assert_eq!(train.intensity_at(1.999), 40.0);
        assert_eq!(train.intensity_at(2.0), 0.0);
        assert_eq!(train.intensity_at(3.5), 40.0);
        assert_eq!(train.intensity_at(4.0), 0.0);
    }
}
