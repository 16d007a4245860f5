//! Damped Gauss–Newton loop with adaptive Marquardt scaling.

use nalgebra::{DMatrix, DVector};

use super::models::{FitProblem, Transform};

pub(crate) struct LmSettings {
    pub max_iter: usize,
    /// Relative RSS change below which the fit is converged.
    pub rss_rel_tol: f64,
    /// Gradient-norm (of ½∇RSS) threshold for convergence.
    pub grad_tol: f64,
    pub lambda0: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
}

impl Default for LmSettings {
    fn default() -> Self {
        Self {
            max_iter: 400,
            rss_rel_tol: 1e-10,
            grad_tol: 1e-8,
            lambda0: 1e-3,
            lambda_up: 10.0,
            lambda_down: 10.0,
        }
    }
}

pub(crate) struct LmOutcome {
    /// Solution in original parameter space.
    pub params: Vec<f64>,
    pub rss: f64,
    pub iterations: usize,
    pub converged: bool,
    /// RSS after each accepted step, starting with the initial guess.
    pub rss_history: Vec<f64>,
}

fn forward(transforms: &[Transform], v: &[f64]) -> Vec<f64> {
    transforms
        .iter()
        .zip(v)
        .map(|(tf, &vi)| tf.forward(vi))
        .collect()
}

fn rss_of(r: &DVector<f64>) -> f64 {
    let rss = r.norm_squared();
    if rss.is_finite() {
        rss
    } else {
        f64::INFINITY
    }
}

/// Minimise the residual sum of squares of `problem` starting from the
/// original-space guess `p0`.
///
/// The step solves (JᵀJ + λ·diag(JᵀJ))·δ = −Jᵀr in the transformed
/// coordinates; steps are accepted only when they reduce the RSS, with λ
/// scaled down on success and up on rejection.
pub(crate) fn levenberg_marquardt(
    problem: &FitProblem,
    p0: &[f64],
    settings: &LmSettings,
) -> LmOutcome {
    let transforms = problem.transforms();
    let k = transforms.len();
    let mut v: Vec<f64> = transforms
        .iter()
        .zip(p0)
        .map(|(tf, &p)| tf.inverse(p))
        .collect();
    let mut p = forward(&transforms, &v);
    let mut residuals = problem.residuals(&p);
    let mut rss = rss_of(&residuals);
    let mut rss_history = vec![rss];
    let mut lambda = settings.lambda0;
    let mut converged = false;
    let mut iterations = 0;

    'outer: for _ in 0..settings.max_iter {
        // chain rule: J_v = J_p · diag(dp/dv)
        let mut jac = problem.jacobian(&p);
        for (col, (tf, &vi)) in transforms.iter().zip(&v).enumerate() {
            let d = tf.derivative(vi);
            for row in 0..jac.nrows() {
                jac[(row, col)] *= d;
            }
        }
        let gradient = jac.transpose() * &residuals;
        if gradient.norm() < settings.grad_tol {
            converged = true;
            break;
        }
        let normal = jac.transpose() * &jac;

        let mut accepted = false;
        for _ in 0..40 {
            let mut damped = normal.clone();
            for i in 0..k {
                let d = normal[(i, i)].max(1e-12);
                damped[(i, i)] = normal[(i, i)] + lambda * d;
            }
            let step = damped
                .clone()
                .lu()
                .solve(&(-&gradient))
                .or_else(|| solve_pseudo(&damped, &gradient));
            let Some(step) = step else {
                lambda *= settings.lambda_up;
                continue;
            };
            let v_new: Vec<f64> = v.iter().zip(step.iter()).map(|(vi, si)| vi + si).collect();
            let p_new = forward(&transforms, &v_new);
            let r_new = problem.residuals(&p_new);
            let rss_new = rss_of(&r_new);
            if rss_new < rss {
                let rel_drop = (rss - rss_new) / rss.max(f64::MIN_POSITIVE);
                v = v_new;
                p = p_new;
                residuals = r_new;
                rss = rss_new;
                rss_history.push(rss);
                iterations += 1;
                lambda = (lambda / settings.lambda_down).max(1e-14);
                accepted = true;
                if rel_drop < settings.rss_rel_tol {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            lambda *= settings.lambda_up;
            if lambda > 1e14 {
                break;
            }
        }
        if !accepted {
            // stalled: no direction reduces the RSS further
            let jac = problem.jacobian(&p);
            let gradient = jac.transpose() * &residuals;
            converged = gradient.norm() < settings.grad_tol || rss == 0.0;
            break;
        }
    }

    LmOutcome {
        params: p,
        rss,
        iterations,
        converged,
        rss_history,
    }
}

fn solve_pseudo(a: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    a.clone()
        .svd(true, true)
        .solve(&(-g), 1e-12)
        .ok()
}
