//! Exact solution of the non-demolition (`c = 0`) model.
//!
//! With `c = 0` the qubit levels decouple, each seeing a linearly displaced
//! bath: `h_s = H_B + λσ_s B` with `σ₁ = a`, `σ₂ = b`. The coherence is
//! `ρ₁₂(t) = ρ₁₂(0) e^{iΔt} Π_j F_j(t)` with
//! `F_j(t) = Tr[e^{−ih₁ⱼt} ρ_j e^{ih₂ⱼt}]`, one factor per mode.

use decoherence::{QubitSystem64, ReducedDensityMatrix64};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bath::DiscreteBath;
use crate::error::{OracleError, Result};

/// How each bath oscillator is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeTruncation {
    /// Full oscillator: closed-form Gaussian factors.
    Untruncated,
    /// Oscillator truncated at `n_max` quanta with a renormalized thermal
    /// state, matching the exact-diagonalization oracle.
    Fock(usize),
}

/// Per-mode factor `F(t) = Σ_kl e^{−ie₁ₖt} M_kl e^{ie₂ₗt}`.
#[derive(Debug, Clone)]
struct TruncatedMode {
    e1: Vec<f64>,
    e2: Vec<f64>,
    m: DMatrix<Complex64>,
}

impl TruncatedMode {
    fn new(omega: f64, g: f64, beta: f64, lambda: f64, a: f64, b: f64, n_max: usize) -> Result<Self> {
        let d = n_max + 1;
        let x = (-beta * omega).exp();
        let mut p: Vec<f64> = (0..d).map(|n| x.powi(n as i32)).collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= z);
        let h = |sigma: f64| {
            let mut m = DMatrix::<f64>::zeros(d, d);
            for n in 0..d {
                m[(n, n)] = omega * n as f64;
                if n + 1 < d {
                    let amp = lambda * sigma * g * ((n + 1) as f64 / 2.0).sqrt();
                    m[(n + 1, n)] = amp;
                    m[(n, n + 1)] = amp;
                }
            }
            m.try_symmetric_eigen(f64::EPSILON, 10_000)
                .ok_or_else(|| OracleError::EigendecompositionFailure(format!("mode at ω = {omega}")))
        };
        let (h1, h2) = (h(a)?, h(b)?);
        let (u1, u2) = (&h1.eigenvectors, &h2.eigenvectors);
        let rho = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(p));
        let left = u1.transpose() * rho * u2;
        let overlap = u2.transpose() * u1;
        let m = DMatrix::from_fn(d, d, |k, l| Complex64::new(left[(k, l)] * overlap[(l, k)], 0.0));
        Ok(Self {
            e1: h1.eigenvalues.iter().copied().collect(),
            e2: h2.eigenvalues.iter().copied().collect(),
            m,
        })
    }

    fn factor(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &e1) in self.e1.iter().enumerate() {
            let left = Complex64::from_polar(1.0, -e1 * t);
            for (l, &e2) in self.e2.iter().enumerate() {
                acc += left * self.m[(k, l)] * Complex64::from_polar(1.0, e2 * t);
            }
        }
        acc
    }
}

#[derive(Debug, Clone)]
enum Modes {
    Gaussian { omegas: Vec<f64>, couplings: Vec<f64>, coth: Vec<f64> },
    Truncated(Vec<TruncatedMode>),
}

/// Precomputed dephasing factors for repeated evaluation.
#[derive(Debug, Clone)]
pub struct DephasingModel {
    delta: f64,
    a: f64,
    b: f64,
    lambda: f64,
    modes: Modes,
}

impl DephasingModel {
    pub fn new(
        q: &QubitSystem64,
        bath: &DiscreteBath,
        beta: f64,
        lambda: f64,
        truncation: ModeTruncation,
    ) -> Result<Self> {
        if q.c_norm_sqr() != 0.0 {
            return Err(OracleError::PreconditionViolation(format!(
                "closed-form dephasing needs c = 0, got c = {}",
                q.c()
            )));
        }
        if !(beta > 0.0) {
            return Err(OracleError::PreconditionViolation(format!("beta must be positive, got {beta}")));
        }
        let modes = match truncation {
            ModeTruncation::Untruncated => Modes::Gaussian {
                omegas: bath.omegas().to_vec(),
                couplings: bath.couplings().to_vec(),
                coth: bath.omegas().iter().map(|w| 1.0 / (0.5 * beta * w).tanh()).collect(),
            },
            ModeTruncation::Fock(n_max) => {
                if n_max == 0 {
                    return Err(OracleError::PreconditionViolation("n_max must be at least 1".to_string()));
                }
                let modes = bath
                    .omegas()
                    .iter()
                    .zip(bath.couplings())
                    .map(|(&w, &g)| TruncatedMode::new(w, g, beta, lambda, q.a(), q.b(), n_max))
                    .collect::<Result<_>>()?;
                Modes::Truncated(modes)
            }
        };
        Ok(Self { delta: q.delta(), a: q.a(), b: q.b(), lambda, modes })
    }

    /// `ρ₁₂(t) / ρ₁₂(0)`.
    pub fn coherence_factor(&self, t: f64) -> Complex64 {
        let free = Complex64::from_polar(1.0, self.delta * t);
        match &self.modes {
            Modes::Gaussian { omegas, couplings, coth } => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let (mut decay, mut phase) = (0.0, 0.0);
                for ((&w, &g), &ct) in omegas.iter().zip(couplings).zip(coth) {
                    let k1 = self.lambda * self.a * g * s;
                    let k2 = self.lambda * self.b * g * s;
                    let wt = w * t;
                    decay += (k1 - k2).powi(2) * ct * (1.0 - wt.cos()) / (w * w);
                    phase += (k1 * k1 - k2 * k2) * (wt - wt.sin()) / (w * w);
                }
                free * Complex64::from_polar((-decay).exp(), phase)
            }
            Modes::Truncated(modes) => modes.iter().fold(free, |acc, m| acc * m.factor(t)),
        }
    }

    /// Reduced state at `t`; populations are those of `rho0`.
    pub fn state(&self, rho0: &ReducedDensityMatrix64, t: f64) -> ReducedDensityMatrix64 {
        ReducedDensityMatrix64::hermitian(rho0.rho11().re, rho0.rho12() * self.coherence_factor(t))
    }
}

/// Exact reduced state of the `c = 0` model at time `t`.
pub fn dephasing_exact(
    q: &QubitSystem64,
    bath: &DiscreteBath,
    beta: f64,
    lambda: f64,
    rho0: &ReducedDensityMatrix64,
    t: f64,
    truncation: ModeTruncation,
) -> Result<ReducedDensityMatrix64> {
    Ok(DephasingModel::new(q, bath, beta, lambda, truncation)?.state(rho0, t))
}
