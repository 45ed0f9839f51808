//! One-time normalization check of the field operator against the
//! second-order rate, on the exactly solvable dephasing channel.
//!
//! With `c = 0`, `a = 0`, `b = 1` and an infrared-flat form factor the exact
//! coherence decays at `λ²π‖g₁‖²/(2β)` for long times, while the resonance
//! imaginary part is `λ²π²ξ(0)/2`. The ratio of the two is the factor that
//! converts fitted oracle rates into resonance units.

use std::f64::consts::PI;

use decoherence::{qubit_resonances, FormFactor64, InitialState, QubitSystem64, ReservoirSpec64, UvExponent};

use crate::bath::discretize;
use crate::dephasing::{DephasingModel, ModeTruncation};
use crate::error::Result;
use crate::fit::{fit_decay_rate, Channel};

/// Factor relating `φ(g) = Σ g_j (a_j + a_j†)/√2` rates to `Im ε_Δ`.
pub const ANALYTIC_FIELD_FACTOR: f64 = PI;

/// Numerical setup of the calibration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSetup {
    pub lambda: f64,
    pub beta: f64,
    pub modes: usize,
    pub omega_max: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

impl Default for CalibrationSetup {
    fn default() -> Self {
        Self { lambda: 0.05, beta: 1.0, modes: 2000, omega_max: 8.0, window: (20.0, 60.0), samples: 401 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// `Im ε_Δ` predicted by the second-order formula.
    pub predicted_rate: f64,
    /// Rate fitted to the exact many-mode dephasing trajectory.
    pub fitted_rate: f64,
    /// `predicted_rate / fitted_rate`.
    pub factor: f64,
}

impl Calibration {
    pub fn relative_deviation_from_analytic(&self) -> f64 {
        (self.factor - ANALYTIC_FIELD_FACTOR).abs() / ANALYTIC_FIELD_FACTOR
    }
}

/// Runs the calibration; `Calibration::factor` should come out close to π.
pub fn calibrate_field_normalization(setup: &CalibrationSetup) -> Result<Calibration> {
    let ff = FormFactor64::parametric(0, UvExponent::Quadratic);
    let res = ReservoirSpec64::new(setup.beta)?;
    let q = QubitSystem64::real(1.0, 0.0, 1.0, 0.0)?;
    let predicted_rate = qubit_resonances(&q, &ff, &res, setup.lambda)?.eps_delta().im;

    let bath = discretize(&ff, setup.modes, setup.omega_max)?;
    let model = DephasingModel::new(&q, &bath, setup.beta, setup.lambda, ModeTruncation::Untruncated)?;
    let rho0 = InitialState::IllustrationCoherent.density_matrix()?;
    let (t1, t2) = setup.window;
    let times: Vec<f64> =
        (0..setup.samples).map(|i| t1 + (t2 - t1) * i as f64 / (setup.samples - 1) as f64).collect();
    let states = times.iter().map(|&t| model.state(&rho0, t)).collect();
    let series = decoherence::TimeSeries64::new(times, states, decoherence::Provenance::Oracle)?;
    let fitted_rate = fit_decay_rate(&series, Channel::Coherence, t1, t2)?.rate;
    Ok(Calibration { predicted_rate, fitted_rate, factor: predicted_rate / fitted_rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_is_pi() {
        let cal = calibrate_field_normalization(&CalibrationSetup::default()).unwrap();
        assert!(cal.relative_deviation_from_analytic() < 1e-3, "{cal:?}");
    }

    #[test]
    fn factor_does_not_depend_on_coupling_strength() {
        let base = CalibrationSetup { modes: 800, ..Default::default() };
        let a = calibrate_field_normalization(&base).unwrap();
        let b = calibrate_field_normalization(&CalibrationSetup { lambda: 0.1, ..base }).unwrap();
        assert!((a.factor - b.factor).abs() < 1e-9 * a.factor);
        assert!((b.predicted_rate / a.predicted_rate - 4.0).abs() < 1e-12);
    }
}
