//! Model parameterisation for the optimizer: parameter vectors, analytic
//! gradients, smooth bound transforms, and peeling initialisation.

use serde::{Deserialize, Serialize};

use super::FitError;
use crate::kinetics::{ExpTerm, KineticModel};
use nalgebra::{DMatrix, DVector};

/// τ bounds enforced by the log-scale reparameterisation, s.
const TAU_LO: f64 = 1e-3;
const TAU_HI: f64 = 1e8;
/// Wickelgren scale-parameter bounds, s⁻¹.
const WBETA_LO: f64 = 1e-9;
const WBETA_HI: f64 = 1e6;

/// Model family selector for fit requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    ExpDecay,
    ExpRise,
    Stretched,
    Wickelgren,
}

/// A fit request: model family plus term count for the exponential families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Exponential term count; ignored by stretched/Wickelgren.
    pub n_terms: usize,
}

impl ModelSpec {
    pub fn exp_decay(n_terms: usize) -> Self {
        Self {
            kind: ModelKind::ExpDecay,
            n_terms,
        }
    }

    pub fn exp_rise(n_terms: usize) -> Self {
        Self {
            kind: ModelKind::ExpRise,
            n_terms,
        }
    }

    pub fn stretched() -> Self {
        Self {
            kind: ModelKind::Stretched,
            n_terms: 1,
        }
    }

    pub fn wickelgren() -> Self {
        Self {
            kind: ModelKind::Wickelgren,
            n_terms: 1,
        }
    }

    /// Free parameters: [I₀, A₁..Aₙ, τ₁..τₙ], [I₀, A, τ, β], or [λ, β, ψ].
    pub fn param_count(&self) -> usize {
        match self.kind {
            ModelKind::ExpDecay | ModelKind::ExpRise => 1 + 2 * self.n_terms,
            ModelKind::Stretched => 4,
            ModelKind::Wickelgren => 3,
        }
    }
}

/// Smooth reparameterisation of one parameter.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Transform {
    Identity,
    /// p = exp(a + (b−a)·σ(v)): positive and bounded to [e^a, e^b].
    BoundedLog { ln_lo: f64, ln_hi: f64 },
    /// p = σ(v) ∈ (0, 1).
    Logit,
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

impl Transform {
    pub fn forward(&self, v: f64) -> f64 {
        match self {
            Transform::Identity => v,
            Transform::BoundedLog { ln_lo, ln_hi } => {
                (ln_lo + (ln_hi - ln_lo) * sigmoid(v)).exp()
            }
            Transform::Logit => sigmoid(v),
        }
    }

    /// dp/dv at internal coordinate v.
    pub fn derivative(&self, v: f64) -> f64 {
        match self {
            Transform::Identity => 1.0,
            Transform::BoundedLog { ln_lo, ln_hi } => {
                let s = sigmoid(v);
                self.forward(v) * (ln_hi - ln_lo) * s * (1.0 - s)
            }
            Transform::Logit => {
                let s = sigmoid(v);
                s * (1.0 - s)
            }
        }
    }

    /// Internal coordinate for parameter value p (clamped inside the open
    /// bounds so the logit stays finite).
    pub fn inverse(&self, p: f64) -> f64 {
        fn logit(x: f64) -> f64 {
            let x = x.clamp(1e-12, 1.0 - 1e-12);
            (x / (1.0 - x)).ln()
        }
        match self {
            Transform::Identity => p,
            Transform::BoundedLog { ln_lo, ln_hi } => {
                let frac = (p.max(f64::MIN_POSITIVE).ln() - ln_lo) / (ln_hi - ln_lo);
                logit(frac)
            }
            Transform::Logit => logit(p),
        }
    }
}

fn tau_transform() -> Transform {
    Transform::BoundedLog {
        ln_lo: TAU_LO.ln(),
        ln_hi: TAU_HI.ln(),
    }
}

/// One transient-fit problem: samples on a time axis relative to t₀ = 0.
pub(crate) struct FitProblem {
    spec: ModelSpec,
    ts: Vec<f64>,
    ys: Vec<f64>,
}

impl FitProblem {
    pub fn new(spec: ModelSpec, ts: Vec<f64>, ys: Vec<f64>) -> Result<Self, FitError> {
        if matches!(spec.kind, ModelKind::ExpDecay | ModelKind::ExpRise) && spec.n_terms == 0 {
            return Err(FitError::Input("n_terms must be at least 1".into()));
        }
        Ok(Self { spec, ts, ys })
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn param_count(&self) -> usize {
        self.spec.param_count()
    }

    pub fn transforms(&self) -> Vec<Transform> {
        let n = self.spec.n_terms;
        match self.spec.kind {
            ModelKind::ExpDecay | ModelKind::ExpRise => {
                let mut t = vec![Transform::Identity; 1 + n];
                t.extend(std::iter::repeat(tau_transform()).take(n));
                t
            }
            ModelKind::Stretched => vec![
                Transform::Identity,
                Transform::Identity,
                tau_transform(),
                Transform::Logit,
            ],
            ModelKind::Wickelgren => vec![
                Transform::Identity,
                Transform::BoundedLog {
                    ln_lo: WBETA_LO.ln(),
                    ln_hi: WBETA_HI.ln(),
                },
                Transform::Identity,
            ],
        }
    }

    /// Model value at sample time `t` for original-space parameters `p`.
    pub fn value(&self, p: &[f64], t: f64) -> f64 {
        model_value(self.spec, p, t)
    }

    /// Residual vector model − data.
    pub fn residuals(&self, p: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.ts.len(),
            self.ts
                .iter()
                .zip(&self.ys)
                .map(|(&t, &y)| self.value(p, t) - y),
        )
    }

    /// Jacobian ∂model/∂p (original space), one row per sample.
    pub fn jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let k = self.param_count();
        let mut jac = DMatrix::zeros(self.ts.len(), k);
        let mut grad = vec![0.0; k];
        for (row, &t) in self.ts.iter().enumerate() {
            model_gradient_into(self.spec, p, t, &mut grad);
            for (col, &g) in grad.iter().enumerate() {
                jac[(row, col)] = g;
            }
        }
        jac
    }

    /// Diagonal of RSS/(n−k)·(JᵀJ)⁻¹ in original parameter order.
    pub fn covariance_diagonal(&self, p: &[f64], rss: f64) -> Vec<f64> {
        let k = self.param_count();
        let n = self.len();
        if n <= k {
            return vec![f64::NAN; k];
        }
        let jac = self.jacobian(p);
        let normal = jac.transpose() * &jac;
        match normal.try_inverse() {
            Some(inv) => {
                let s2 = rss / (n - k) as f64;
                (0..k).map(|i| s2 * inv[(i, i)]).collect()
            }
            None => vec![f64::NAN; k],
        }
    }

    /// Build the fitted [`KineticModel`], sorting exponential terms by τ and
    /// permuting the variance entries identically.
    pub fn into_canonical_model(
        &self,
        p: &[f64],
        variance: Vec<f64>,
        t0: f64,
    ) -> (KineticModel, Vec<f64>) {
        let n = self.spec.n_terms;
        match self.spec.kind {
            ModelKind::ExpDecay | ModelKind::ExpRise => {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| p[1 + n + a].partial_cmp(&p[1 + n + b]).unwrap());
                let terms: Vec<ExpTerm> = order
                    .iter()
                    .map(|&i| ExpTerm {
                        amplitude: p[1 + i],
                        tau: p[1 + n + i],
                    })
                    .collect();
                let mut var = vec![variance[0]];
                var.extend(order.iter().map(|&i| variance[1 + i]));
                var.extend(order.iter().map(|&i| variance[1 + n + i]));
                let model = match self.spec.kind {
                    ModelKind::ExpDecay => KineticModel::ExpDecay {
                        baseline: p[0],
                        terms,
                        t0,
                    },
                    _ => KineticModel::ExpRise {
                        baseline: p[0],
                        terms,
                        t0,
                    },
                };
                (model, var)
            }
            ModelKind::Stretched => (
                KineticModel::Stretched {
                    baseline: p[0],
                    amplitude: p[1],
                    tau: p[2],
                    beta: p[3],
                    t0,
                },
                variance,
            ),
            ModelKind::Wickelgren => (
                KineticModel::Wickelgren {
                    lambda: p[0],
                    beta: p[1],
                    psi: p[2],
                    t0,
                },
                variance,
            ),
        }
    }

    /// Starting parameters from linearisation of the data.
    pub fn initial_guess(&self) -> Vec<f64> {
        match self.spec.kind {
            ModelKind::ExpDecay => self.peel_init(false),
            ModelKind::ExpRise => self.peel_init(true),
            ModelKind::Stretched => self.stretched_init(),
            ModelKind::Wickelgren => self.wickelgren_init(),
        }
    }

    /// Sequential tail peeling: estimate the flat level, then repeatedly
    /// log-linear-fit the slowest surviving component on the late part of
    /// its support and subtract it. Support detection runs on a smoothed
    /// copy so noise excursions do not stretch the windows; each peeled τ
    /// caps the time range searched for the next, faster component.
    fn peel_init(&self, rise: bool) -> Vec<f64> {
        let n = self.spec.n_terms;
        let m = self.len();
        let tail = m.saturating_sub((m / 20).max(3));
        let level = mean(&self.ys[tail..]);

        // signed excursion relative to the flat level; `sign` restores
        // amplitude signs at the end
        let raw: Vec<f64> = if rise {
            self.ys.iter().map(|&y| level - y).collect()
        } else {
            self.ys.iter().map(|&y| y - level).collect()
        };
        let lead = mean(&raw[..(m / 10).max(1)]);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        let mut remaining: Vec<f64> = raw.iter().map(|&d| sign * d).collect();

        let span = *self.ts.last().unwrap() - self.ts[0];
        let min_cap = (span / m as f64) * 8.0;
        let mut amps = vec![0.0; n];
        let mut taus = vec![0.0; n];
        let mut t_cap = *self.ts.last().unwrap();
        for term in (0..n).rev() {
            let smooth = moving_average(&remaining, (m / 100).max(2));
            let peak = self
                .ts
                .iter()
                .zip(&smooth)
                .filter(|(&t, _)| t <= t_cap)
                .map(|(_, &z)| z)
                .fold(0.0f64, f64::max);
            let floor = 0.05 * peak;
            let t_hi = self
                .ts
                .iter()
                .zip(&smooth)
                .filter(|(&t, &z)| t <= t_cap && z > floor)
                .map(|(&t, _)| t)
                .last()
                .unwrap_or(t_cap)
                .max(min_cap);
            let (win_lo, win_hi) = (0.35 * t_hi, 0.85 * t_hi);
            let pts: Vec<(f64, f64)> = self
                .ts
                .iter()
                .zip(&remaining)
                .filter(|(&t, &z)| t >= win_lo && t <= win_hi && z > 0.25 * floor)
                .map(|(&t, &z)| (t, z.ln()))
                .collect();
            let (tau, amp) = match linear_fit(&pts) {
                Some((slope, intercept)) if slope < 0.0 => {
                    ((-1.0 / slope).clamp(TAU_LO, TAU_HI), intercept.exp())
                }
                // no decaying trend left: park the component mid-window
                _ => ((0.5 * t_hi).clamp(TAU_LO, TAU_HI), peak.max(1e-30)),
            };
            taus[term] = tau;
            amps[term] = amp;
            for (z, &t) in remaining.iter_mut().zip(&self.ts) {
                *z = (*z - amp * (-t / tau).exp()).max(0.0);
            }
            t_cap = tau.max(min_cap).min(t_cap);
        }
        // distinct starting taus keep the normal matrix well-conditioned
        for i in 1..n {
            if taus[i] <= taus[i - 1] * 1.2 {
                taus[i] = taus[i - 1] * 3.0;
            }
        }
        let baseline = if rise {
            level - sign * amps.iter().sum::<f64>()
        } else {
            level
        };
        let mut p = vec![baseline];
        p.extend(amps.iter().map(|&a| sign * a));
        p.extend(taus);
        p
    }

    /// Deterministic fallback start: a τ ladder spanning the sampled range
    /// with the excursion split evenly across terms.
    pub fn ladder_guess(&self) -> Vec<f64> {
        let n = self.spec.n_terms.max(1);
        let m = self.len();
        match self.spec.kind {
            ModelKind::ExpDecay | ModelKind::ExpRise => {
                let tail = m.saturating_sub((m / 20).max(3));
                let level = mean(&self.ys[tail..]);
                let excursion = if matches!(self.spec.kind, ModelKind::ExpRise) {
                    level - self.ys[0]
                } else {
                    self.ys[0] - level
                };
                let span = (*self.ts.last().unwrap() - self.ts[0]).max(TAU_LO * 10.0);
                let mut p = vec![if matches!(self.spec.kind, ModelKind::ExpRise) {
                    self.ys[0]
                } else {
                    level
                }];
                p.extend(std::iter::repeat(excursion / n as f64).take(n));
                p.extend((0..n).map(|j| {
                    (span / 3.0f64.powi((n - 1 - j) as i32 * 2 + 1)).clamp(TAU_LO, TAU_HI)
                }));
                p
            }
            _ => self.initial_guess(),
        }
    }

    fn stretched_init(&self) -> Vec<f64> {
        let m = self.len();
        let tail = m.saturating_sub((m / 20).max(3));
        let level = mean(&self.ys[tail..]);
        let amp = self.ys[0] - level;
        let target = level + amp / std::f64::consts::E;
        let tau = self
            .ts
            .iter()
            .zip(&self.ys)
            .find(|(_, &y)| {
                if amp >= 0.0 {
                    y <= target
                } else {
                    y >= target
                }
            })
            .map(|(&t, _)| t)
            .filter(|&t| t > 0.0)
            .unwrap_or(self.ts[m - 1] / 3.0)
            .clamp(TAU_LO, TAU_HI);
        vec![level, amp, tau, 0.7]
    }

    /// Grid over the scale parameter; λ and ψ from the log–log linearisation
    /// ln y = ln λ − ψ ln(1 + βt).
    fn wickelgren_init(&self) -> Vec<f64> {
        let usable: Vec<(f64, f64)> = self
            .ts
            .iter()
            .zip(&self.ys)
            .filter(|(_, &y)| y > 0.0)
            .map(|(&t, &y)| (t, y.ln()))
            .collect();
        if usable.len() < 3 {
            return vec![self.ys[0], 0.1, 0.5];
        }
        let mut best = (f64::INFINITY, self.ys[0], 0.1, 0.5);
        for i in 0..28 {
            let beta = 10f64.powf(-4.0 + 0.25 * i as f64);
            let pts: Vec<(f64, f64)> = usable
                .iter()
                .map(|&(t, ln_y)| ((1.0 + beta * t).ln(), ln_y))
                .collect();
            if let Some((slope, intercept)) = linear_fit(&pts) {
                let rss: f64 = pts
                    .iter()
                    .map(|&(x, y)| (intercept + slope * x - y).powi(2))
                    .sum();
                if rss < best.0 {
                    best = (rss, intercept.exp(), beta, -slope);
                }
            }
        }
        vec![best.1, best.2, best.3]
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Centered moving average with window half-width `half`.
fn moving_average(z: &[f64], half: usize) -> Vec<f64> {
    let m = z.len();
    (0..m)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(m);
            z[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Least-squares line fit on (x, y) pairs; `None` below 2 points or at zero
/// x-variance.
fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Some((slope, intercept))
}

/// Model value at time-since-onset `t` for parameter vector `p`.
fn model_value(spec: ModelSpec, p: &[f64], t: f64) -> f64 {
    let n = spec.n_terms;
    match spec.kind {
        ModelKind::ExpDecay => {
            p[0] + (0..n)
                .map(|i| p[1 + i] * (-t / p[1 + n + i]).exp())
                .sum::<f64>()
        }
        ModelKind::ExpRise => {
            p[0] + (0..n)
                .map(|i| p[1 + i] * (1.0 - (-t / p[1 + n + i]).exp()))
                .sum::<f64>()
        }
        ModelKind::Stretched => p[0] + p[1] * (-(t / p[2]).powf(p[3])).exp(),
        ModelKind::Wickelgren => p[0] * (1.0 + p[1] * t).powf(-p[2]),
    }
}

/// Analytic gradient ∂model/∂p at time-since-onset `t`.
fn model_gradient_into(spec: ModelSpec, p: &[f64], t: f64, out: &mut [f64]) {
    let n = spec.n_terms;
    match spec.kind {
        ModelKind::ExpDecay => {
            out[0] = 1.0;
            for i in 0..n {
                let tau = p[1 + n + i];
                let e = (-t / tau).exp();
                out[1 + i] = e;
                out[1 + n + i] = p[1 + i] * e * t / (tau * tau);
            }
        }
        ModelKind::ExpRise => {
            out[0] = 1.0;
            for i in 0..n {
                let tau = p[1 + n + i];
                let e = (-t / tau).exp();
                out[1 + i] = 1.0 - e;
                out[1 + n + i] = -p[1 + i] * e * t / (tau * tau);
            }
        }
        ModelKind::Stretched => {
            let (amp, tau, beta) = (p[1], p[2], p[3]);
            let x = t / tau;
            let u = x.powf(beta);
            let e = (-u).exp();
            out[0] = 1.0;
            out[1] = e;
            out[2] = amp * e * beta * u / tau;
            // u·ln x → 0 as x → 0⁺
            out[3] = if x > 0.0 { -amp * e * u * x.ln() } else { 0.0 };
        }
        ModelKind::Wickelgren => {
            let (lambda, beta, psi) = (p[0], p[1], p[2]);
            let w = 1.0 + beta * t;
            let wp = w.powf(-psi);
            out[0] = wp;
            out[1] = -lambda * psi * w.powf(-psi - 1.0) * t;
            out[2] = -lambda * wp * w.ln();
        }
    }
}

/// Parameter-space gradient ∂I/∂p of a [`KineticModel`] at time `t`, in the
/// model's canonical parameter order ([I₀, A₁..Aₙ, τ₁..τₙ], [I₀, A, τ, β],
/// or [λ, β, ψ]). This is the same code path the optimizer differentiates
/// through.
pub fn model_gradient(model: &KineticModel, t: f64) -> Result<Vec<f64>, FitError> {
    model.validate().map_err(FitError::Kinetics)?;
    let (spec, p, t0) = decompose(model);
    if t < t0 {
        return Err(FitError::Kinetics(
            crate::kinetics::KineticsError::TimeBeforeOnset { t, t0 },
        ));
    }
    let mut out = vec![0.0; spec.param_count()];
    model_gradient_into(spec, &p, t - t0, &mut out);
    Ok(out)
}

/// Flatten a model into (spec, parameter vector, t0).
pub(crate) fn decompose(model: &KineticModel) -> (ModelSpec, Vec<f64>, f64) {
    match model {
        KineticModel::ExpDecay { baseline, terms, t0 } => {
            let mut p = vec![*baseline];
            p.extend(terms.iter().map(|t| t.amplitude));
            p.extend(terms.iter().map(|t| t.tau));
            (ModelSpec::exp_decay(terms.len()), p, *t0)
        }
        KineticModel::ExpRise { baseline, terms, t0 } => {
            let mut p = vec![*baseline];
            p.extend(terms.iter().map(|t| t.amplitude));
            p.extend(terms.iter().map(|t| t.tau));
            (ModelSpec::exp_rise(terms.len()), p, *t0)
        }
        KineticModel::Stretched {
            baseline,
            amplitude,
            tau,
            beta,
            t0,
        } => (
            ModelSpec::stretched(),
            vec![*baseline, *amplitude, *tau, *beta],
            *t0,
        ),
        KineticModel::Wickelgren {
            lambda,
            beta,
            psi,
            t0,
        } => (ModelSpec::wickelgren(), vec![*lambda, *beta, *psi], *t0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn transforms_round_trip() {
        let cases = [
            (tau_transform(), 25.0),
            (tau_transform(), 1e5),
            (Transform::Logit, 0.6),
            (Transform::Identity, -3.5),
        ];
        for (tf, p) in cases {
            assert_relative_eq!(tf.forward(tf.inverse(p)), p, max_relative = 1e-9);
        }
    }

    #[test]
    fn transform_derivative_matches_finite_difference() {
        for tf in [tau_transform(), Transform::Logit, Transform::Identity] {
            for v in [-2.0, 0.0, 1.5] {
                let h = 1e-6;
                let fd = (tf.forward(v + h) - tf.forward(v - h)) / (2.0 * h);
                assert_relative_eq!(tf.derivative(v), fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn tau_bounds_respected() {
        let tf = tau_transform();
        for v in [-1e3, 0.0, 1e3] {
            let p = tf.forward(v);
            assert!(p >= TAU_LO * (1.0 - 1e-12) && p <= TAU_HI * (1.0 + 1e-12));
        }
    }
}
