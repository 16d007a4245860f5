//! Shared test support: an adaptive Runge–Kutta reference integrator for
//! the pool ODE (independent of the library's closed-form updates),
//! randomized device/train generators, and seeded noise.

#![allow(dead_code)]

use photosynapse::kinetics::{DeviceParams, Polarity, Pulse, PulseTrain, TrapPool};
use photosynapse::units::{BOLTZMANN_MEV_PER_K, ELEMENTARY_CHARGE};
use rand::Rng;

/// Pool fill/decay rates dh/dt = g·Φ·(1 − h/H) − h/τ(T).
fn pool_rates(params: &DeviceParams, taus: &[f64], intensity: f64, h: &[f64], out: &mut [f64]) {
    for (i, pool) in params.pools.iter().enumerate() {
        out[i] = pool.fill_coeff * intensity * (1.0 - h[i] / pool.capacity) - h[i] / taus[i];
    }
}

/// Dormand–Prince 5(4) with adaptive step size over one constant-intensity
/// segment.
pub fn rk_integrate_segment(
    params: &DeviceParams,
    taus: &[f64],
    intensity: f64,
    h0: &[f64],
    dt_total: f64,
) -> Vec<f64> {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    const RTOL: f64 = 1e-11;
    const ATOL: f64 = 1e-16;

    let n = h0.len();
    let mut y = h0.to_vec();
    let mut t = 0.0;
    let mut step = (dt_total / 16.0).min(1.0).max(1e-9);
    let mut k = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];

    while t < dt_total {
        step = step.min(dt_total - t);
        pool_rates(params, taus, intensity, &y, &mut k[0]);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = if s < 7 { A[s - 1][j] } else { 0.0 };
                    acc += step * a * kj[i];
                }
                stage[i] = acc;
            }
            pool_rates(params, taus, intensity, &stage, &mut k[s]);
        }
        let mut err: f64 = 0.0;
        let mut y5 = vec![0.0; n];
        for i in 0..n {
            let mut v5 = y[i];
            let mut v4 = y[i];
            for (j, kj) in k.iter().enumerate() {
                v5 += step * B5[j] * kj[i];
                v4 += step * B4[j] * kj[i];
            }
            y5[i] = v5;
            let scale = ATOL + RTOL * v5.abs().max(y[i].abs());
            err = err.max(((v5 - v4) / scale).abs());
        }
        if err <= 1.0 {
            t += step;
            y = y5;
            step *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        } else {
            step *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    y
}

/// Reference trace: RK-integrated occupancies and an independently written
/// current formula I = V·(n·e·μ)·W·T/L.
pub fn rk_simulate(
    params: &DeviceParams,
    train: &PulseTrain,
    temperature: f64,
    sample_dt: f64,
    t_end: f64,
) -> Vec<(f64, f64)> {
    let taus: Vec<f64> = params
        .pools
        .iter()
        .map(|p| p.tau0 * (p.ea_mev / (BOLTZMANN_MEV_PER_K * temperature)).exp())
        .collect();
    let mut boundaries: Vec<f64> = train.edges();
    let n_samples = (t_end / sample_dt).floor() as usize;
    boundaries.extend((0..=n_samples).map(|k| k as f64 * sample_dt));
    boundaries.retain(|&b| b >= 0.0 && b <= t_end);
    boundaries.sort_by(|a, b| a.partial_cmp(b).unwrap());
    boundaries.dedup();

    let mut h = vec![0.0; params.pools.len()];
    let mut out = Vec::new();
    let mut now = 0.0;
    if boundaries.first() == Some(&0.0) {
        out.push((0.0, current_of(params, &h)));
    }
    for &b in boundaries.iter().skip_while(|&&b| b == 0.0) {
        let mid = 0.5 * (now + b);
        h = rk_integrate_segment(params, &taus, train.intensity_at(mid), &h, b - now);
        now = b;
        let on_grid = (b / sample_dt - (b / sample_dt).round()).abs() < 1e-9;
        if on_grid {
            out.push((b, current_of(params, &h)));
        }
    }
    out
}

fn current_of(params: &DeviceParams, h: &[f64]) -> f64 {
    let weighted: f64 = params
        .pools
        .iter()
        .zip(h)
        .map(|(pool, &hi)| pool.coupling * hi)
        .sum();
    let (n, mu) = match params.polarity {
        Polarity::Inhibitory => (params.n0, params.mu0 / (1.0 + weighted)),
        Polarity::Excitatory => (params.n0 * (1.0 + weighted), params.mu0),
    };
    params.read_voltage * n * ELEMENTARY_CHARGE * mu * params.width * params.thickness
        / params.length
}

/// Random but physically sane device parameters.
pub fn random_device<R: Rng>(rng: &mut R) -> DeviceParams {
    let polarity = if rng.gen_bool(0.5) {
        Polarity::Inhibitory
    } else {
        Polarity::Excitatory
    };
    let n_pools = match polarity {
        Polarity::Inhibitory => rng.gen_range(2..=4),
        Polarity::Excitatory => rng.gen_range(3..=4),
    };
    let pools = (0..n_pools)
        .map(|_| TrapPool {
            capacity: rng.gen_range(0.1..5.0),
            fill_coeff: rng.gen_range(0.0..0.05),
            tau0: 10f64.powf(rng.gen_range(0.0..4.0)),
            ea_mev: rng.gen_range(0.0..50.0),
            coupling: rng.gen_range(0.0..0.2),
        })
        .collect();
    DeviceParams {
        polarity,
        n0: 10f64.powf(rng.gen_range(17.0..21.0)),
        mu0: rng.gen_range(0.1..100.0),
        length: rng.gen_range(0.1..1.0),
        width: rng.gen_range(0.05..0.5),
        thickness: rng.gen_range(1e-5..1e-4),
        read_voltage: if rng.gen_bool(0.5) { 0.02 } else { 1.0 },
        pools,
        temperature_ref: 300.0,
    }
}

/// Random non-overlapping pulse train within `[0, horizon]`.
pub fn random_train<R: Rng>(rng: &mut R, horizon: f64) -> PulseTrain {
    let n = rng.gen_range(0..=8);
    let mut pulses = Vec::with_capacity(n);
    let mut t = 0.0;
    for _ in 0..n {
        let gap: f64 = rng.gen_range(0.1..horizon / 12.0);
        let duration: f64 = rng.gen_range(0.05..horizon / 12.0);
        let start = t + gap;
        if start + duration > horizon {
            break;
        }
        pulses.push(Pulse {
            start,
            duration,
            intensity: rng.gen_range(0.0..100.0),
        });
        t = start + duration;
    }
    PulseTrain::new(pulses).expect("constructed ordered and non-overlapping")
}
