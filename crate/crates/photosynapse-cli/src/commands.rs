//! Command implementations: resolve config, run the library, write files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use photosynapse::analysis::{absorption_coefficient, tauc_bandgap, tauc_bandgap_auto};
use photosynapse::fitting::{fit_transient, fit_wickelgren, FitReport, ModelSpec};
use photosynapse::io;
use photosynapse::kinetics::{DeviceParams, Trace};
use photosynapse::protocols::{
    filter_response, gate_truth_table, learning_forgetting, ppf_index, stdp, stm_ltm_sweep,
    GateKind, GateSpec, LearningOptions, OpticalPulse, RetentionResult, SeriesPair, StdpOptions,
    StimulusAxis, SweepOptions,
};

use crate::config::{OutputFormat, ProtocolSection, RunConfig};
use crate::error::{io_err, CliError};
use crate::{AxisName, CommonOpts, FitModelName, ProtocolName};

/// Config file plus resolved output settings.
struct Context {
    config: RunConfig,
    device: DeviceParams,
    device_label: String,
    out_dir: PathBuf,
    format: OutputFormat,
    seed: u64,
    temperature: f64,
}

fn load_context(common: &CommonOpts) -> Result<Context, CliError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config is required for this command".into()))?;
    let text = fs::read_to_string(path).map_err(io_err(path.display().to_string()))?;
    let config = RunConfig::parse(&text)?;
    let device = config.device()?;
    let device_label = config
        .device
        .name
        .clone()
        .unwrap_or_else(|| "custom-device".into());
    let out_dir = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.dir));
    let format = common.format.unwrap_or(config.output.format);
    let seed = common.seed.unwrap_or(config.seed);
    let temperature = config.temperature(common.temperature);
    fs::create_dir_all(&out_dir).map_err(io_err(out_dir.display().to_string()))?;
    Ok(Context {
        config,
        device,
        device_label,
        out_dir,
        format,
        seed,
        temperature,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path.display().to_string()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(ctx: &Context, name: &str, value: &T) -> Result<(), CliError> {
    if ctx.format.json() {
        write_file(&ctx.out_dir.join(name), &io::to_json_pretty(value)?)?;
    }
    Ok(())
}

fn write_csv(ctx: &Context, name: &str, contents: String) -> Result<(), CliError> {
    if ctx.format.csv() {
        write_file(&ctx.out_dir.join(name), &contents)?;
    }
    Ok(())
}

fn write_trace_outputs(ctx: &Context, stem: &str, trace: &Trace) -> Result<(), CliError> {
    if ctx.format.csv() {
        let mut buf = Vec::new();
        io::write_trace_csv(trace, &mut buf).map_err(CliError::Format)?;
        write_file(
            &ctx.out_dir.join(format!("{stem}.csv")),
            &String::from_utf8(buf).expect("csv is utf-8"),
        )?;
    }
    if ctx.format.json() {
        write_file(
            &ctx.out_dir.join(format!("{stem}.json")),
            &format!("{:#}\n", io::trace_to_json(trace)),
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------- simulate

pub fn simulate(common: &CommonOpts) -> Result<(), CliError> {
    let ctx = load_context(common)?;
    let train = ctx.config.stimulus_train()?;
    let env = &ctx.config.environment;
    let t_end = env.t_end_s.unwrap_or(train.end_time() + 120.0);
    let mut trace = photosynapse::kinetics::simulate(
        &ctx.device,
        &train,
        ctx.temperature,
        env.sample_dt_s,
        t_end,
    )?;
    trace.label = ctx.device_label.clone();
    write_trace_outputs(&ctx, "trace", &trace)
}

// ---------------------------------------------------------------- protocol

pub fn protocol(which: ProtocolName, common: &CommonOpts) -> Result<(), CliError> {
    let ctx = load_context(common)?;
    let section = ctx
        .config
        .protocol
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [protocol] section".into()))?;
    match (which, section) {
        (ProtocolName::StmLtm, ProtocolSection::StmLtm { axis, values, overrides }) => {
            let axis = parse_axis(axis)?;
            let opts = sweep_options(&ctx, overrides);
            let results = stm_ltm_sweep(&ctx.device, axis, values, &opts)?;
            emit_sweep(&ctx, "stm_ltm", axis, values, &results)
        }
        (ProtocolName::Learning, ProtocolSection::Learning {
            threshold_delta_a,
            n_cycles,
            rest_s,
            pulse_duration_s,
            period_s,
            intensity_mw_cm2,
        }) => {
            let mut opts = LearningOptions::suggested_for(&ctx.device);
            opts.temperature = ctx.temperature;
            if let Some(v) = threshold_delta_a {
                opts.threshold_delta = *v;
            }
            if let Some(v) = n_cycles {
                opts.n_cycles = *v;
            }
            if let Some(v) = rest_s {
                opts.rest = *v;
            }
            if let Some(v) = pulse_duration_s {
                opts.pulse_duration = *v;
            }
            if let Some(v) = period_s {
                opts.period = *v;
            }
            if let Some(v) = intensity_mw_cm2 {
                opts.intensity = *v;
            }
            run_learning(&ctx, &opts)
        }
        (ProtocolName::Ppf, ProtocolSection::Ppf {
            frequency_hz,
            n_pulses,
            duration_s,
            intensity_mw_cm2,
        }) => {
            let pulse = OpticalPulse {
                duration: *duration_s,
                intensity: *intensity_mw_cm2,
            };
            let indices = ppf_index(&ctx.device, *frequency_hz, *n_pulses, &pulse, ctx.temperature)?;
            let report = PpfReport {
                protocol: "ppf",
                device: &ctx.device_label,
                temperature_k: ctx.temperature,
                seed: ctx.seed,
                frequency_hz: *frequency_hz,
                n_pulses: *n_pulses,
                index_percent: &indices,
            };
            write_json(&ctx, "ppf.json", &report)?;
            let mut csv = String::from("pulse_index,index_percent\n");
            for (k, v) in indices.iter().enumerate() {
                csv.push_str(&format!("{},{}\n", k + 2, v));
            }
            write_csv(&ctx, "ppf.csv", csv)
        }
        (ProtocolName::Filter, ProtocolSection::Filter {
            frequencies_hz,
            n_pulses,
            duration_s,
            intensity_mw_cm2,
        }) => {
            let pulse = OpticalPulse {
                duration: *duration_s,
                intensity: *intensity_mw_cm2,
            };
            let gains = filter_response(
                &ctx.device,
                frequencies_hz,
                *n_pulses,
                &pulse,
                ctx.temperature,
            )?;
            let report = FilterReport {
                protocol: "filter",
                device: &ctx.device_label,
                temperature_k: ctx.temperature,
                seed: ctx.seed,
                n_pulses: *n_pulses,
                points: &gains,
            };
            write_json(&ctx, "filter.json", &report)?;
            let mut csv = String::from("frequency_hz,gain_percent\n");
            for (f, g) in &gains {
                csv.push_str(&format!("{f},{g}\n"));
            }
            write_csv(&ctx, "filter.csv", csv)
        }
        (ProtocolName::Stdp, ProtocolSection::Stdp {
            delta_ts_s,
            measure_delay_s,
            duration_s,
            intensity_mw_cm2,
        }) => {
            let pair = SeriesPair::identical(ctx.device.clone())?;
            let opts = StdpOptions {
                pulse: OpticalPulse {
                    duration: *duration_s,
                    intensity: *intensity_mw_cm2,
                },
                measure_delay: *measure_delay_s,
                temperature: ctx.temperature,
            };
            let curve = stdp(&pair, delta_ts_s, &opts)?;
            let report = StdpReport {
                protocol: "stdp",
                device: &ctx.device_label,
                temperature_k: ctx.temperature,
                seed: ctx.seed,
                measure_delay_s: *measure_delay_s,
                points: &curve,
            };
            write_json(&ctx, "stdp.json", &report)?;
            let mut csv = String::from("delta_t_s,delta_g_S\n");
            for (dt, dg) in &curve {
                csv.push_str(&format!("{dt},{dg}\n"));
            }
            write_csv(&ctx, "stdp.csv", csv)
        }
        (ProtocolName::Logic, ProtocolSection::Logic {
            gate,
            threshold_s,
            measure_delay_s,
            duration_s,
            intensity_mw_cm2,
        }) => {
            let pair = SeriesPair::identical(ctx.device.clone())?;
            let spec = GateSpec {
                gate: parse_gate(gate)?,
                threshold: *threshold_s,
            };
            let opts = photosynapse::protocols::GateOptions {
                pulse: OpticalPulse {
                    duration: *duration_s,
                    intensity: *intensity_mw_cm2,
                },
                measure_delay: *measure_delay_s,
                temperature: ctx.temperature,
            };
            let table = gate_truth_table(&spec, &pair, &opts)?;
            let report = LogicReport {
                protocol: "logic",
                device: &ctx.device_label,
                temperature_k: ctx.temperature,
                seed: ctx.seed,
                table: &table,
                truth_bits: table
                    .readings
                    .iter()
                    .map(|r| if r.output { 1 } else { 0 })
                    .collect(),
            };
            write_json(&ctx, "logic.json", &report)?;
            let mut csv = String::from("input_a,input_b,g_net_S,output\n");
            for r in &table.readings {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    r.inputs.0 as u8, r.inputs.1 as u8, r.g_net, r.output as u8
                ));
            }
            write_csv(&ctx, "logic.csv", csv)
        }
        _ => Err(CliError::Config(format!(
            "[protocol] section kind does not match the requested protocol '{}'",
            protocol_name(which)
        ))),
    }
}

fn protocol_name(which: ProtocolName) -> &'static str {
    match which {
        ProtocolName::StmLtm => "stm-ltm",
        ProtocolName::Learning => "learning",
        ProtocolName::Ppf => "ppf",
        ProtocolName::Filter => "filter",
        ProtocolName::Stdp => "stdp",
        ProtocolName::Logic => "logic",
    }
}

fn parse_axis(axis: &str) -> Result<StimulusAxis, CliError> {
    match axis {
        "number" => Ok(StimulusAxis::Number),
        "duration" => Ok(StimulusAxis::Duration),
        "intensity" => Ok(StimulusAxis::Intensity),
        "frequency" => Ok(StimulusAxis::Frequency),
        other => Err(CliError::Config(format!(
            "unknown axis '{other}' (number|duration|intensity|frequency)"
        ))),
    }
}

fn parse_gate(gate: &str) -> Result<GateKind, CliError> {
    match gate.to_ascii_uppercase().as_str() {
        "OR" => Ok(GateKind::Or),
        "AND" => Ok(GateKind::And),
        "NOR" => Ok(GateKind::Nor),
        "NAND" => Ok(GateKind::Nand),
        other => Err(CliError::Config(format!(
            "unknown gate '{other}' (OR|AND|NOR|NAND)"
        ))),
    }
}

fn sweep_options(ctx: &Context, overrides: &crate::config::SweepOverrides) -> SweepOptions {
    let mut opts = SweepOptions {
        temperature: ctx.temperature,
        sample_dt: ctx.config.environment.sample_dt_s,
        ..SweepOptions::default()
    };
    if let Some(v) = overrides.intensity_mw_cm2 {
        opts.intensity = v;
    }
    if let Some(v) = overrides.pulse_duration_s {
        opts.pulse_duration = v;
    }
    if let Some(v) = overrides.period_s {
        opts.period = v;
    }
    if let Some(v) = overrides.pulse_count {
        opts.pulse_count = v;
    }
    if let Some(v) = overrides.freq_pulse_duration_s {
        opts.freq_pulse_duration = v;
    }
    if let Some(v) = overrides.horizon_s {
        opts.horizon = v;
    }
    if let Some(v) = overrides.fraction {
        opts.criteria.fraction = v;
    }
    if let Some(v) = overrides.ltm_threshold_s {
        opts.criteria.ltm_threshold_s = v;
    }
    opts
}

fn run_learning(ctx: &Context, opts: &LearningOptions) -> Result<(), CliError> {
    let cycles = learning_forgetting(&ctx.device, opts)?;
    let mut rows = Vec::with_capacity(cycles.len());
    for cycle in &cycles {
        let off = cycle
            .forgetting_trace
            .start_time()
            .expect("forgetting trace sampled");
        let wickelgren = fit_wickelgren(&cycle.forgetting_trace, off)?;
        write_trace_outputs(
            ctx,
            &format!("forgetting_cycle_{}", cycle.cycle_index),
            &cycle.forgetting_trace,
        )?;
        rows.push(LearningRow {
            cycle_index: cycle.cycle_index,
            pulses_to_threshold: cycle.pulses_to_threshold,
            psi: wickelgren.psi().expect("wickelgren fit"),
            wickelgren: wickelgren.model,
        });
    }
    let report = LearningReport {
        protocol: "learning",
        device: &ctx.device_label,
        temperature_k: ctx.temperature,
        seed: ctx.seed,
        threshold_delta_a: opts.threshold_delta,
        rest_s: opts.rest,
        cycles: &rows,
    };
    write_json(ctx, "learning.json", &report)?;
    let mut csv = String::from("cycle_index,pulses_to_threshold,psi\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{}\n",
            row.cycle_index, row.pulses_to_threshold, row.psi
        ));
    }
    write_csv(ctx, "learning.csv", csv)
}

fn emit_sweep(
    ctx: &Context,
    stem: &str,
    axis: StimulusAxis,
    values: &[f64],
    results: &[RetentionResult],
) -> Result<(), CliError> {
    let report = SweepReport {
        protocol: "stm-ltm",
        device: &ctx.device_label,
        temperature_k: ctx.temperature,
        seed: ctx.seed,
        axis,
        values,
        results,
    };
    write_json(ctx, &format!("{stem}.json"), &report)?;
    let mut csv = String::from("axis_value,retention_time_s,classification,open_ended\n");
    for (v, r) in values.iter().zip(results) {
        csv.push_str(&format!(
            "{},{},{:?},{}\n",
            v, r.retention_time, r.classification, r.open_ended
        ));
    }
    write_csv(ctx, &format!("{stem}.csv"), csv)
}

// --------------------------------------------------------------------- fit

pub fn fit(
    input: &Path,
    model: FitModelName,
    terms: usize,
    window: Option<&[f64]>,
    off_time: Option<f64>,
    common: &CommonOpts,
) -> Result<(), CliError> {
    let out_dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir).map_err(io_err(out_dir.display().to_string()))?;
    let format = common.format.unwrap_or_default();

    let inputs: Vec<PathBuf> = if input.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(input)
            .map_err(io_err(input.display().to_string()))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(CliError::Usage(format!(
                "no .csv traces found in {}",
                input.display()
            )));
        }
        files
    } else {
        vec![input.to_path_buf()]
    };

    let mut summary = String::from("file,model,converged,iterations,n_samples,rss,aicc\n");
    for path in &inputs {
        let text = fs::read_to_string(path).map_err(io_err(path.display().to_string()))?;
        let trace = io::read_trace_csv(text.as_bytes())?;
        let report = fit_one(&trace, model, terms, window, off_time)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "trace".into());
        if format.json() {
            write_file(
                &out_dir.join(format!("{stem}_fit.json")),
                &io::to_json_pretty(&report)?,
            )?;
        }
        summary.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            stem,
            fit_model_name(model),
            report.converged,
            report.iterations,
            report.n_samples,
            report.rss,
            report.aicc
        ));
    }
    if format.csv() {
        write_file(&out_dir.join("fit_summary.csv"), &summary)?;
    }
    Ok(())
}

fn fit_model_name(model: FitModelName) -> &'static str {
    match model {
        FitModelName::ExpDecay => "exp-decay",
        FitModelName::ExpRise => "exp-rise",
        FitModelName::Stretched => "stretched",
        FitModelName::Wickelgren => "wickelgren",
    }
}

fn fit_one(
    trace: &Trace,
    model: FitModelName,
    terms: usize,
    window: Option<&[f64]>,
    off_time: Option<f64>,
) -> Result<FitReport, CliError> {
    let full = (
        trace
            .start_time()
            .ok_or_else(|| CliError::Usage("empty trace".into()))?,
        trace.end_time().expect("non-empty"),
    );
    let window = match window {
        Some(w) => (w[0], w[1]),
        None => full,
    };
    let report = match model {
        FitModelName::Wickelgren => fit_wickelgren(trace, off_time.unwrap_or(window.0))?,
        FitModelName::ExpDecay => fit_transient(trace, ModelSpec::exp_decay(terms), window)?,
        FitModelName::ExpRise => fit_transient(trace, ModelSpec::exp_rise(terms), window)?,
        FitModelName::Stretched => fit_transient(trace, ModelSpec::stretched(), window)?,
    };
    Ok(report)
}

// -------------------------------------------------------------------- tauc

pub fn tauc(
    input: &Path,
    window: Option<&[f64]>,
    thickness_cm: Option<f64>,
    common: &CommonOpts,
) -> Result<(), CliError> {
    let out_dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir).map_err(io_err(out_dir.display().to_string()))?;
    let format = common.format.unwrap_or_default();

    let text = fs::read_to_string(input).map_err(io_err(input.display().to_string()))?;
    let spectrum = io::read_spectrum_csv(text.as_bytes(), thickness_cm)?;
    let fit = match window {
        Some(w) => tauc_bandgap(&spectrum, (w[0], w[1]))?,
        None => tauc_bandgap_auto(&spectrum)?,
    };
    if format.json() {
        write_file(&out_dir.join("tauc.json"), &io::to_json_pretty(&fit)?)?;
    }
    if format.csv() {
        let alpha = absorption_coefficient(&spectrum)?;
        let mut csv = String::from("energy_ev,tauc_y\n");
        for (e, a) in &alpha {
            csv.push_str(&format!("{},{}\n", e, (a * e) * (a * e)));
        }
        write_file(&out_dir.join("tauc.csv"), &csv)?;
    }
    Ok(())
}

// ------------------------------------------------------------------- sweep

pub fn sweep(axis: AxisName, values: &[f64], common: &CommonOpts) -> Result<(), CliError> {
    let ctx = load_context(common)?;
    let axis = match axis {
        AxisName::Number => StimulusAxis::Number,
        AxisName::Duration => StimulusAxis::Duration,
        AxisName::Intensity => StimulusAxis::Intensity,
        AxisName::Frequency => StimulusAxis::Frequency,
    };
    let overrides = match ctx.config.protocol.as_ref() {
        Some(ProtocolSection::StmLtm { overrides, .. }) => sweep_options(&ctx, overrides),
        _ => sweep_options(&ctx, &Default::default()),
    };
    // fail fast on ordering before fanning out
    if values.is_empty() || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage(
            "sweep values must be non-empty and strictly ascending".into(),
        ));
    }

    // independent simulations per value; results collected in input order
    let results: Vec<Result<Vec<RetentionResult>, _>> = std::thread::scope(|scope| {
        let handles: Vec<_> = values
            .iter()
            .map(|&v| {
                let device = &ctx.device;
                let opts = &overrides;
                scope.spawn(move || stm_ltm_sweep(device, axis, &[v], opts))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let mut flat = Vec::with_capacity(values.len());
    for r in results {
        flat.push(r?[0]);
    }
    emit_sweep(&ctx, "sweep", axis, values, &flat)
}

// ----------------------------------------------------------------- reports

#[derive(Serialize)]
struct SweepReport<'a> {
    protocol: &'static str,
    device: &'a str,
    temperature_k: f64,
    seed: u64,
    axis: StimulusAxis,
    values: &'a [f64],
    results: &'a [RetentionResult],
}

#[derive(Serialize)]
struct LearningRow {
    cycle_index: usize,
    pulses_to_threshold: usize,
    psi: f64,
    wickelgren: photosynapse::kinetics::KineticModel,
}

#[derive(Serialize)]
struct LearningReport<'a> {
    protocol: &'static str,
    device: &'a str,
    temperature_k: f64,
    seed: u64,
    threshold_delta_a: f64,
    rest_s: f64,
    cycles: &'a [LearningRow],
}

#[derive(Serialize)]
struct PpfReport<'a> {
    protocol: &'static str,
    device: &'a str,
    temperature_k: f64,
    seed: u64,
    frequency_hz: f64,
    n_pulses: usize,
    index_percent: &'a [f64],
}

#[derive(Serialize)]
struct FilterReport<'a> {
    protocol: &'static str,
    device: &'a str,
    temperature_k: f64,
    seed: u64,
    n_pulses: usize,
    points: &'a [(f64, f64)],
}

#[derive(Serialize)]
struct StdpReport<'a> {
    protocol: &'static str,
    device: &'a str,
    temperature_k: f64,
    seed: u64,
    measure_delay_s: f64,
    points: &'a [(f64, f64)],
}

#[derive(Serialize)]
struct LogicReport<'a> {
    protocol: &'static str,
    device: &'a str,
    temperature_k: f64,
    seed: u64,
    table: &'a photosynapse::protocols::GateTable,
    truth_bits: Vec<u8>,
}
