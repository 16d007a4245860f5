//! Auxiliary physics analyses: photo-Hall decomposition consistency and
//! Tauc bandgap extraction from optical spectra.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinetics::{simulate_detailed, DeviceParams, KineticsError, PulseTrain, Trace};
use crate::units::{ELEMENTARY_CHARGE, EV_NM};

/// Errors from the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error("invalid analysis input: {0}")]
    Input(String),
    #[error("transmittance is zero at point {index} (λ = {wavelength_nm} nm)")]
    ZeroTransmittance { index: usize, wavelength_nm: f64 },
    #[error("no absorption edge: fitted Tauc slope {slope} is not positive")]
    NoAbsorptionEdge { slope: f64 },
}

/// One photo-Hall sample: carrier density and mobility at a time point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HallPoint {
    /// s.
    pub t: f64,
    /// cm⁻³.
    pub carrier_density: f64,
    /// cm²/(V·s).
    pub mobility: f64,
}

/// Time series of Hall measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HallSeries {
    pub samples: Vec<HallPoint>,
}

impl HallSeries {
    pub fn new(samples: Vec<HallPoint>) -> Result<Self, AnalysisError> {
        for (i, s) in samples.iter().enumerate() {
            if !(s.carrier_density > 0.0 && s.mobility > 0.0)
                || !s.t.is_finite()
                || !s.carrier_density.is_finite()
                || !s.mobility.is_finite()
            {
                return Err(AnalysisError::Input(format!(
                    "sample {i} must have positive finite n and mu"
                )));
            }
        }
        if samples.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(AnalysisError::Input(
                "time not strictly increasing".into(),
            ));
        }
        Ok(Self { samples })
    }

    /// σ = n·e·μ per sample, S/cm.
    pub fn conductivity(&self) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| s.carrier_density * ELEMENTARY_CHARGE * s.mobility)
            .collect()
    }
}

/// Photo-Hall series produced by the same simulator that generates traces.
pub fn hall_series(
    params: &DeviceParams,
    train: &PulseTrain,
    temperature: f64,
    sample_dt: f64,
    t_end: f64,
) -> Result<HallSeries, AnalysisError> {
    let detailed = simulate_detailed(params, train, temperature, sample_dt, t_end)?;
    HallSeries::new(
        detailed
            .into_iter()
            .map(|s| HallPoint {
                t: s.t,
                carrier_density: s.carrier_density,
                mobility: s.mobility,
            })
            .collect(),
    )
}

/// Agreement between a Hall decomposition and a photocurrent trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HallConsistency {
    pub pearson_r: f64,
    pub max_rel_dev: f64,
}

/// Compare the normalised n·μ product against the normalised photocurrent.
///
/// The trace is linearly resampled onto the Hall instants inside the
/// overlapping time range; both series are normalised to their first
/// overlapping value. Series generated from the same simulation agree to
/// machine precision (r = 1).
pub fn hall_consistency(
    series: &HallSeries,
    trace: &Trace,
) -> Result<HallConsistency, AnalysisError> {
    let (Some(trace_start), Some(trace_end)) = (trace.start_time(), trace.end_time()) else {
        return Err(AnalysisError::Input("empty trace".into()));
    };
    let sigma = series.conductivity();
    let pairs: Vec<(f64, f64)> = series
        .samples
        .iter()
        .zip(&sigma)
        .filter(|(s, _)| s.t >= trace_start && s.t <= trace_end)
        .map(|(s, &sig)| {
            let current = trace.interpolate(s.t).expect("checked non-empty");
            (sig, current)
        })
        .collect();
    if pairs.len() < 3 {
        return Err(AnalysisError::Input(format!(
            "only {} overlapping points; need at least 3",
            pairs.len()
        )));
    }
    let (sig0, cur0) = pairs[0];
    if sig0 == 0.0 || cur0 == 0.0 {
        return Err(AnalysisError::Input(
            "first overlapping sample is zero; cannot normalise".into(),
        ));
    }
    let a: Vec<f64> = pairs.iter().map(|&(s, _)| s / sig0).collect();
    let b: Vec<f64> = pairs.iter().map(|&(_, c)| c / cur0).collect();
    let max_rel_dev = a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
        .fold(0.0f64, f64::max);
    Ok(HallConsistency {
        pearson_r: pearson(&a, &b),
        max_rel_dev,
    })
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 && vb == 0.0 {
        return 1.0; // two constant series are identical up to scale
    }
    cov / (va.sqrt() * vb.sqrt())
}

/// One optical measurement point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub wavelength_nm: f64,
    /// Fraction in [0, 1].
    pub transmittance: f64,
    /// Fraction in [0, 1].
    pub reflectance: f64,
}

/// Transmittance/reflectance spectrum of a film of known thickness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalSpectrum {
    pub points: Vec<SpectralPoint>,
    /// cm.
    pub thickness: f64,
}

impl OpticalSpectrum {
    pub fn new(points: Vec<SpectralPoint>, thickness: f64) -> Result<Self, AnalysisError> {
        if !(thickness > 0.0) {
            return Err(AnalysisError::Input(format!(
                "thickness must be positive, got {thickness}"
            )));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.wavelength_nm > 0.0) {
                return Err(AnalysisError::Input(format!(
                    "point {i}: wavelength must be positive"
                )));
            }
            if p.transmittance < 0.0 || p.reflectance < 0.0 {
                return Err(AnalysisError::Input(format!(
                    "point {i}: T and R must be non-negative"
                )));
            }
            if p.transmittance + p.reflectance > 1.0 + 1e-12 {
                return Err(AnalysisError::Input(format!(
                    "point {i}: T + R exceeds 1"
                )));
            }
        }
        Ok(Self { points, thickness })
    }
}

/// Absorption coefficient α = (1/d)·ln((1−R)/T) per point, mapped to photon
/// energy and sorted by ascending energy. The computation is pointwise, so
/// permuting the input points yields the same output set.
pub fn absorption_coefficient(
    spectrum: &OpticalSpectrum,
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    let mut out = Vec::with_capacity(spectrum.points.len());
    for (index, p) in spectrum.points.iter().enumerate() {
        if p.transmittance == 0.0 {
            return Err(AnalysisError::ZeroTransmittance {
                index,
                wavelength_nm: p.wavelength_nm,
            });
        }
        let energy_ev = EV_NM / p.wavelength_nm;
        let alpha = ((1.0 - p.reflectance) / p.transmittance).ln() / spectrum.thickness;
        out.push((energy_ev, alpha));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(out)
}

/// A Tauc-plot linear fit and the extracted direct bandgap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaucFit {
    /// x-intercept of the (αhν)² line, eV.
    pub bandgap_ev: f64,
    pub slope: f64,
    pub r_squared: f64,
    /// Energy window used by the fit, eV.
    pub window: (f64, f64),
}

/// Fit (αhν)² versus hν linearly inside `window` and return the x-intercept
/// as the direct bandgap.
pub fn tauc_bandgap(
    spectrum: &OpticalSpectrum,
    window: (f64, f64),
) -> Result<TaucFit, AnalysisError> {
    let alpha = absorption_coefficient(spectrum)?;
    tauc_fit_points(&alpha, window)
}

/// Tauc fit with an automatically selected window: the contiguous band of
/// points whose linear fit has the steepest positive slope.
pub fn tauc_bandgap_auto(spectrum: &OpticalSpectrum) -> Result<TaucFit, AnalysisError> {
    let alpha = absorption_coefficient(spectrum)?;
    let n = alpha.len();
    if n < 5 {
        return Err(AnalysisError::Input(format!(
            "need at least 5 spectral points, got {n}"
        )));
    }
    let len = (n / 5).max(5).min(n);
    let mut best: Option<(f64, (f64, f64))> = None;
    for start in 0..=(n - len) {
        let window = (alpha[start].0, alpha[start + len - 1].0);
        if let Ok(fit) = tauc_fit_points(&alpha, window) {
            if best.map_or(true, |(s, _)| fit.slope > s) {
                best = Some((fit.slope, window));
            }
        }
    }
    let (_, window) = best.ok_or(AnalysisError::NoAbsorptionEdge { slope: 0.0 })?;
    tauc_fit_points(&alpha, window)
}

fn tauc_fit_points(
    alpha: &[(f64, f64)],
    window: (f64, f64),
) -> Result<TaucFit, AnalysisError> {
    let in_window: Vec<(f64, f64)> = alpha
        .iter()
        .copied()
        .filter(|(e, _)| *e >= window.0 && *e <= window.1)
        .collect();
    if in_window.len() < 5 {
        return Err(AnalysisError::Input(format!(
            "only {} points inside the fit window; need at least 5",
            in_window.len()
        )));
    }
    // a featureless (flat-α) window has no absorption edge even though
    // (αhν)² rises with the photon energy
    let (a_lo, a_hi) = in_window
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, a)| {
            (lo.min(a), hi.max(a))
        });
    if a_hi - a_lo <= 1e-9 * a_hi.abs().max(a_lo.abs()).max(f64::MIN_POSITIVE) {
        return Err(AnalysisError::NoAbsorptionEdge { slope: 0.0 });
    }
    let pts: Vec<(f64, f64)> = in_window
        .iter()
        .map(|&(e, a)| (e, (a * e) * (a * e)))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    if !(slope > 0.0) {
        return Err(AnalysisError::NoAbsorptionEdge { slope });
    }
    let intercept = my - slope * mx;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let f = intercept + slope * p.0;
            (p.1 - f) * (p.1 - f)
        })
        .sum();
    Ok(TaucFit {
        bandgap_ev: -intercept / slope,
        slope,
        r_squared: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
        window,
    })
}

/// Synthetic direct-gap spectrum with (αhν)² = scale·(hν − Eg) above the
/// gap and zero absorption below; useful for validating the Tauc pipeline.
pub fn synthetic_direct_gap_spectrum(
    bandgap_ev: f64,
    scale: f64,
    thickness: f64,
    energies_ev: &[f64],
) -> Result<OpticalSpectrum, AnalysisError> {
    let points = energies_ev
        .iter()
        .map(|&e| {
            let alpha = if e > bandgap_ev {
                (scale * (e - bandgap_ev)).sqrt() / e
            } else {
                0.0
            };
            SpectralPoint {
                wavelength_nm: EV_NM / e,
                transmittance: (-alpha * thickness).exp(),
                reflectance: 0.0,
            }
        })
        .collect();
    OpticalSpectrum::new(points, thickness)
}
