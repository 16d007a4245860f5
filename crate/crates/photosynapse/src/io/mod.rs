//! File formats: trace CSV/JSON, spectrum CSV, Hall-series CSV.
//!
//! Trace CSV carries a `#`-prefixed metadata block ahead of the `t_s,I_A`
//! header; the JSON mirror uses the same field names. All numbers are
//! written with Rust's shortest round-trip float formatting, so identical
//! data always serialises to identical bytes.

use std::io::{BufRead, Write};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::analysis::{AnalysisError, HallPoint, HallSeries, OpticalSpectrum, SpectralPoint};
use crate::kinetics::{KineticsError, Trace, TracePoint};

/// Errors from reading or writing the on-disk formats.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// Write a trace as CSV with its metadata comment block.
pub fn write_trace_csv<W: Write>(trace: &Trace, mut w: W) -> Result<(), FormatError> {
    writeln!(w, "# read_voltage_V={}", trace.read_voltage)?;
    writeln!(w, "# temperature_K={}", trace.temperature)?;
    writeln!(w, "# label={}", trace.label)?;
    writeln!(w, "t_s,I_A")?;
    for s in &trace.samples {
        writeln!(w, "{},{}", s.t, s.current)?;
    }
    Ok(())
}

/// Read a trace from the CSV format written by [`write_trace_csv`].
pub fn read_trace_csv<R: BufRead>(r: R) -> Result<Trace, FormatError> {
    let mut read_voltage = None;
    let mut temperature = None;
    let mut label = String::new();
    let mut samples = Vec::new();
    let mut saw_header = false;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            if let Some((key, value)) = meta.split_once('=') {
                match key.trim() {
                    "read_voltage_V" => {
                        read_voltage = Some(parse_f64(value.trim(), lineno)?);
                    }
                    "temperature_K" => {
                        temperature = Some(parse_f64(value.trim(), lineno)?);
                    }
                    "label" => label = value.trim().to_string(),
                    _ => {} // unknown metadata is carried by tools we don't know; skip
                }
            }
            continue;
        }
        if !saw_header {
            if line != "t_s,I_A" {
                return Err(parse_err(lineno, format!("expected header 't_s,I_A', got '{line}'")));
            }
            saw_header = true;
            continue;
        }
        let (t, i) = line
            .split_once(',')
            .ok_or_else(|| parse_err(lineno, "expected 't,current'"))?;
        samples.push(TracePoint {
            t: parse_f64(t, lineno)?,
            current: parse_f64(i, lineno)?,
        });
    }
    if !saw_header {
        return Err(parse_err(0, "missing 't_s,I_A' header"));
    }
    let read_voltage = read_voltage.ok_or_else(|| parse_err(0, "missing read_voltage_V metadata"))?;
    let temperature = temperature.ok_or_else(|| parse_err(0, "missing temperature_K metadata"))?;
    Ok(Trace::new(samples, read_voltage, temperature, label)?)
}

/// JSON mirror of the trace CSV, with identical field names.
pub fn trace_to_json(trace: &Trace) -> serde_json::Value {
    json!({
        "read_voltage_V": trace.read_voltage,
        "temperature_K": trace.temperature,
        "label": trace.label,
        "samples": trace
            .samples
            .iter()
            .map(|s| json!({"t_s": s.t, "I_A": s.current}))
            .collect::<Vec<_>>(),
    })
}

/// Parse the JSON mirror back into a trace.
pub fn trace_from_json(value: &serde_json::Value) -> Result<Trace, FormatError> {
    let get = |v: &serde_json::Value, key: &str| -> Result<f64, FormatError> {
        v.get(key)
            .and_then(|x| x.as_f64())
            .ok_or_else(|| parse_err(0, format!("missing or non-numeric '{key}'")))
    };
    let samples = value
        .get("samples")
        .and_then(|s| s.as_array())
        .ok_or_else(|| parse_err(0, "missing 'samples' array"))?
        .iter()
        .map(|s| {
            Ok(TracePoint {
                t: get(s, "t_s")?,
                current: get(s, "I_A")?,
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let label = value
        .get("label")
        .and_then(|l| l.as_str())
        .unwrap_or_default();
    Ok(Trace::new(
        samples,
        get(value, "read_voltage_V")?,
        get(value, "temperature_K")?,
        label,
    )?)
}

/// Write a spectrum as `wavelength_nm,transmittance,reflectance` CSV with
/// the film thickness in a metadata comment.
pub fn write_spectrum_csv<W: Write>(
    spectrum: &OpticalSpectrum,
    mut w: W,
) -> Result<(), FormatError> {
    writeln!(w, "# thickness_cm={}", spectrum.thickness)?;
    writeln!(w, "wavelength_nm,transmittance,reflectance")?;
    for p in &spectrum.points {
        writeln!(w, "{},{},{}", p.wavelength_nm, p.transmittance, p.reflectance)?;
    }
    Ok(())
}

/// Read a spectrum CSV. The thickness may come from a `# thickness_cm=`
/// comment or the `fallback_thickness` argument.
pub fn read_spectrum_csv<R: BufRead>(
    r: R,
    fallback_thickness: Option<f64>,
) -> Result<OpticalSpectrum, FormatError> {
    let mut thickness = fallback_thickness;
    let mut points = Vec::new();
    let mut saw_header = false;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((key, value)) = meta.trim().split_once('=') {
                if key.trim() == "thickness_cm" {
                    thickness = Some(parse_f64(value.trim(), lineno)?);
                }
            }
            continue;
        }
        if !saw_header {
            if line != "wavelength_nm,transmittance,reflectance" {
                return Err(parse_err(
                    lineno,
                    "expected header 'wavelength_nm,transmittance,reflectance'",
                ));
            }
            saw_header = true;
            continue;
        }
        let mut cols = line.split(',');
        let mut next = |name: &str| -> Result<f64, FormatError> {
            cols.next()
                .ok_or_else(|| parse_err(lineno, format!("missing column '{name}'")))
                .and_then(|v| parse_f64(v, lineno))
        };
        points.push(SpectralPoint {
            wavelength_nm: next("wavelength_nm")?,
            transmittance: next("transmittance")?,
            reflectance: next("reflectance")?,
        });
    }
    let thickness =
        thickness.ok_or_else(|| parse_err(0, "missing thickness (metadata or argument)"))?;
    Ok(OpticalSpectrum::new(points, thickness)?)
}

/// Write a Hall series as `t_s,n_cm3,mu_cm2Vs` CSV.
pub fn write_hall_csv<W: Write>(series: &HallSeries, mut w: W) -> Result<(), FormatError> {
    writeln!(w, "t_s,n_cm3,mu_cm2Vs")?;
    for p in &series.samples {
        writeln!(w, "{},{},{}", p.t, p.carrier_density, p.mobility)?;
    }
    Ok(())
}

/// Read a Hall series CSV.
pub fn read_hall_csv<R: BufRead>(r: R) -> Result<HallSeries, FormatError> {
    let mut samples = Vec::new();
    let mut saw_header = false;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "t_s,n_cm3,mu_cm2Vs" {
                return Err(parse_err(lineno, "expected header 't_s,n_cm3,mu_cm2Vs'"));
            }
            saw_header = true;
            continue;
        }
        let mut cols = line.split(',');
        let mut next = |name: &str| -> Result<f64, FormatError> {
            cols.next()
                .ok_or_else(|| parse_err(lineno, format!("missing column '{name}'")))
                .and_then(|v| parse_f64(v, lineno))
        };
        samples.push(HallPoint {
            t: next("t_s")?,
            carrier_density: next("n_cm3")?,
            mobility: next("mu_cm2Vs")?,
        });
    }
    Ok(HallSeries::new(samples)?)
}

/// Serialize any report type as pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String, FormatError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn parse_f64(s: &str, line: usize) -> Result<f64, FormatError> {
    s.trim()
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number '{s}'")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::{scn_inhibitory_default, simulate, PulseTrain};

    fn sample_trace() -> Trace {
        let dev = scn_inhibitory_default();
        let train = PulseTrain::uniform(0.0, 3, 1.0, 2.0, 40.0).unwrap();
        simulate(&dev, &train, 300.0, 0.5, 10.0).unwrap()
    }

    #[test]
    fn trace_csv_round_trip_is_exact() {
        let trace = sample_trace();
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        let back = read_trace_csv(buf.as_slice()).unwrap();
        assert_eq!(trace, back);
    }

    #[test]
    fn trace_json_round_trip_is_exact() {
        let trace = sample_trace();
        let value = trace_to_json(&trace);
        let back = trace_from_json(&value).unwrap();
        assert_eq!(trace, back);
    }

    #[test]
    fn trace_csv_layout() {
        let trace = sample_trace();
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# read_voltage_V=0.02");
        assert_eq!(lines.next().unwrap(), "# temperature_K=300");
        assert_eq!(lines.next().unwrap(), "# label=simulation");
        assert_eq!(lines.next().unwrap(), "t_s,I_A");
    }

    #[test]
    fn missing_metadata_is_an_error() {
        let csv = "t_s,I_A\n0,1\n1,2\n";
        assert!(matches!(
            read_trace_csv(csv.as_bytes()),
            Err(FormatError::Parse { .. })
        ));
    }

    #[test]
    fn spectrum_round_trip() {
        let spectrum = OpticalSpectrum::new(
            vec![
                SpectralPoint {
                    wavelength_nm: 500.0,
                    transmittance: 0.5,
                    reflectance: 0.2,
                },
                SpectralPoint {
                    wavelength_nm: 400.0,
                    transmittance: 0.3,
                    reflectance: 0.25,
                },
            ],
            2.5e-5,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&spectrum, &mut buf).unwrap();
        let back = read_spectrum_csv(buf.as_slice(), None).unwrap();
        assert_eq!(spectrum, back);
    }

    #[test]
    fn hall_round_trip() {
        let series = HallSeries::new(vec![
            HallPoint {
                t: 0.0,
                carrier_density: 3e20,
                mobility: 67.0,
            },
            HallPoint {
                t: 1.0,
                carrier_density: 3e20,
                mobility: 66.5,
            },
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_hall_csv(&series, &mut buf).unwrap();
        let back = read_hall_csv(buf.as_slice()).unwrap();
        assert_eq!(series, back);
    }
}
