//! Arrhenius fit of release time constants versus temperature.

use serde::Serialize;

use super::FitError;
use crate::units::BOLTZMANN_MEV_PER_K;

/// τ(T) = τ₀·exp(Ea / kB·T) fitted from (T, τ) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArrheniusFit {
    /// s.
    pub tau0: f64,
    /// meV.
    pub ea_mev: f64,
    pub r_squared: f64,
}

/// Linear least squares of ln τ against 1/T: the slope times kB gives the
/// activation energy, the intercept gives ln τ₀.
pub fn fit_arrhenius(points: &[(f64, f64)]) -> Result<ArrheniusFit, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewSamples {
            have: points.len(),
            need: 3,
        });
    }
    for &(t, tau) in points {
        if !(t > 0.0 && tau > 0.0 && t.is_finite() && tau.is_finite()) {
            return Err(FitError::Input(format!(
                "temperatures and time constants must be positive and finite, got ({t}, {tau})"
            )));
        }
    }
    for (i, &(ti, _)) in points.iter().enumerate() {
        if points.iter().skip(i + 1).any(|&(tj, _)| tj == ti) {
            return Err(FitError::DuplicateTemperatures);
        }
    }

    let xs: Vec<f64> = points.iter().map(|&(t, _)| 1.0 / t).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, tau)| tau.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let f = intercept + slope * x;
            (y - f) * (y - f)
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        // constant ln τ: a flat line reproduces the data exactly
        1.0
    };

    Ok(ArrheniusFit {
        tau0: intercept.exp(),
        ea_mev: slope * BOLTZMANN_MEV_PER_K,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::arrhenius_tau;
    use approx::assert_relative_eq;

    #[test]
    fn exact_synthetic_data_recovers_activation_energy() {
        let (tau0, ea) = (3.13e4, 30.0);
        let points: Vec<(f64, f64)> = [80.0, 150.0, 220.0, 300.0, 373.0]
            .iter()
            .map(|&t| (t, arrhenius_tau(tau0, ea, t).unwrap()))
            .collect();
        let fit = fit_arrhenius(&points).unwrap();
        assert_relative_eq!(fit.ea_mev, ea, max_relative = 1e-9);
        assert_relative_eq!(fit.tau0, tau0, max_relative = 1e-9);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn constant_tau_has_zero_activation() {
        let points = [(100.0, 50.0), (200.0, 50.0), (300.0, 50.0)];
        let fit = fit_arrhenius(&points).unwrap();
        assert_relative_eq!(fit.ea_mev, 0.0, epsilon = 1e-12);
        assert_relative_eq!(fit.tau0, 50.0, max_relative = 1e-12);
    }

    #[test]
    fn duplicate_temperatures_rejected() {
        let points = [(100.0, 50.0), (100.0, 60.0), (300.0, 70.0)];
        assert!(matches!(
            fit_arrhenius(&points),
            Err(FitError::DuplicateTemperatures)
        ));
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(matches!(
            fit_arrhenius(&[(100.0, 1.0), (200.0, 2.0)]),
            Err(FitError::TooFewSamples { .. })
        ));
    }
}
