//! Finite-mode discretization of the reservoir and its truncated Fock space.

use std::f64::consts::PI;

use decoherence::FormFactor64;

use crate::error::{OracleError, Result};

/// Default cap on the composite (qubit ⊗ bath) dimension.
pub const DEFAULT_BUDGET: usize = 4096;

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            dp = nf * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        if 2 * i + 1 == n {
            z = 0.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Bath modes `(ω_j, g_j)` with `g_j² = J(ω_j) w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath {
    omegas: Vec<f64>,
    couplings: Vec<f64>,
    omega_max: f64,
    recurrence_time: f64,
}

impl DiscreteBath {
    /// Explicit modes; frequencies must be positive and strictly increasing.
    pub fn from_modes(omegas: Vec<f64>, couplings: Vec<f64>, omega_max: f64) -> Result<Self> {
        if omegas.is_empty() || omegas.len() != couplings.len() {
            return Err(OracleError::PreconditionViolation(format!(
                "need matching nonempty mode lists, got {} frequencies and {} couplings",
                omegas.len(),
                couplings.len()
            )));
        }
        if omegas.iter().any(|w| !(*w > 0.0) || !w.is_finite()) || omegas.windows(2).any(|p| p[1] <= p[0]) {
            return Err(OracleError::PreconditionViolation(
                "mode frequencies must be positive, finite and strictly increasing".to_string(),
            ));
        }
        if couplings.iter().any(|g| !g.is_finite()) {
            return Err(OracleError::PreconditionViolation("couplings must be finite".to_string()));
        }
        let recurrence_time = recurrence_time(&omegas);
        Ok(Self { omegas, couplings, omega_max, recurrence_time })
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    /// `2π / min_j(ω_{j+1} − ω_j)`, or `2π/ω₁` for a single mode.
    pub fn recurrence_time(&self) -> f64 {
        self.recurrence_time
    }

    /// `Σ_j g_j² f(ω_j)`, the discrete counterpart of `∫ J(ω) f(ω) dω`.
    pub fn weighted_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.omegas.iter().zip(&self.couplings).map(|(&w, &g)| g * g * f(w)).sum()
    }
}

fn recurrence_time(omegas: &[f64]) -> f64 {
    let gap = if omegas.len() == 1 {
        omegas[0]
    } else {
        omegas.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min)
    };
    2.0 * PI / gap
}

/// Gauss–Legendre discretization of `J` on `[0, omega_max]` with `modes` nodes.
pub fn discretize(ff: &FormFactor64, modes: usize, omega_max: f64) -> Result<DiscreteBath> {
    if modes == 0 {
        return Err(OracleError::PreconditionViolation("need at least one bath mode".to_string()));
    }
    if !(omega_max > 0.0) || !omega_max.is_finite() {
        return Err(OracleError::PreconditionViolation(format!(
            "omega_max must be positive and finite, got {omega_max}"
        )));
    }
    let (x, w) = gauss_legendre(modes);
    let half = 0.5 * omega_max;
    let omegas: Vec<f64> = x.iter().map(|&xi| half * (xi + 1.0)).collect();
    let couplings = omegas
        .iter()
        .zip(&w)
        .map(|(&om, &wi)| (ff.spectral_density(om) * wi * half).sqrt())
        .collect();
    DiscreteBath::from_modes(omegas, couplings, omega_max)
}

/// Product of `modes` oscillators truncated at `n_max` quanta, times a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedFockSpace {
    modes: usize,
    n_max: usize,
    bath_dim: usize,
}

impl TruncatedFockSpace {
    pub fn new(modes: usize, n_max: usize) -> Result<Self> {
        Self::with_budget(modes, n_max, DEFAULT_BUDGET)
    }

    pub fn with_budget(modes: usize, n_max: usize, budget: usize) -> Result<Self> {
        if modes == 0 || n_max == 0 {
            return Err(OracleError::PreconditionViolation(format!(
                "need modes ≥ 1 and n_max ≥ 1, got modes = {modes}, n_max = {n_max}"
            )));
        }
        let bath_dim = u32::try_from(modes)
            .ok()
            .and_then(|m| (n_max + 1).checked_pow(m))
            .filter(|d| d.checked_mul(2).is_some());
        let Some(bath_dim) = bath_dim else {
            return Err(OracleError::BudgetExceeded { dim: usize::MAX, budget });
        };
        if 2 * bath_dim > budget {
            return Err(OracleError::BudgetExceeded { dim: 2 * bath_dim, budget });
        }
        Ok(Self { modes, n_max, bath_dim })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Occupation levels per mode, `n_max + 1`.
    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    pub fn bath_dim(&self) -> usize {
        self.bath_dim
    }

    /// Composite dimension `2 · (n_max + 1)^M`.
    pub fn dim(&self) -> usize {
        2 * self.bath_dim
    }

    /// Index stride of mode `j`; mode 0 is the most significant digit.
    pub fn stride(&self, j: usize) -> usize {
        self.levels().pow((self.modes - 1 - j) as u32)
    }

    /// Occupation of mode `j` in bath basis state `k`.
    pub fn occupation(&self, k: usize, j: usize) -> usize {
        (k / self.stride(j)) % self.levels()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use decoherence::{g_omega_inverse, xi, ReservoirSpec, UvExponent};

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 12, 40] {
            let (x, w) = gauss_legendre(n);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for k in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} k={k}: {q} vs {exact}");
            }
        }
        let (x, w) = gauss_legendre(1);
        assert_eq!((x[0], w[0]), (0.0, 2.0));
    }

    #[test]
    fn single_mode_sits_at_the_midpoint() {
        let ff = FormFactor64::parametric(1, UvExponent::Linear);
        let bath = discretize(&ff, 1, 6.0).unwrap();
        assert_eq!(bath.omegas(), &[3.0]);
        let expected = ff.spectral_density(3.0) * 6.0;
        assert!((bath.couplings()[0].powi(2) - expected).abs() < 1e-15 * expected);
        assert!((bath.recurrence_time() - 2.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mode_sums_converge_to_the_inverse_frequency_moment() {
        let ff = FormFactor64::parametric(1, UvExponent::Linear);
        let exact = g_omega_inverse(&ff).unwrap();
        let mut last = f64::INFINITY;
        for m in [4, 8, 16, 32] {
            let bath = discretize(&ff, m, 20.0).unwrap();
            let err = (bath.weighted_sum(|w| 1.0 / w) - exact).abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-8);
    }

    #[test]
    fn windowed_mode_sum_approaches_xi() {
        let ff = FormFactor64::parametric(1, UvExponent::Linear);
        let res = ReservoirSpec::new(1.0).unwrap();
        let exact = xi(&ff, &res, 1.0).unwrap();
        let width = 0.05;
        let window = |w: f64| {
            let d = w - 1.0;
            width / (d * d + width * width) / PI / (0.5 * w).tanh()
        };
        let errs: Vec<f64> = [50, 200, 800]
            .iter()
            .map(|&m| (discretize(&ff, m, 12.0).unwrap().weighted_sum(window) - exact).abs() / exact)
            .collect();
        assert!(errs[2] < errs[0], "{errs:?}");
        // What remains is the finite window width, not the discretization.
        assert!(errs[2] < 0.1, "{errs:?}");
    }

    #[test]
    fn fock_space_layout() {
        let fock = TruncatedFockSpace::new(3, 2).unwrap();
        assert_eq!((fock.bath_dim(), fock.dim(), fock.levels()), (27, 54, 3));
        assert_eq!((fock.stride(0), fock.stride(2)), (9, 1));
        // k = 2·9 + 0·3 + 1
        assert_eq!((fock.occupation(19, 0), fock.occupation(19, 1), fock.occupation(19, 2)), (2, 0, 1));
    }

    #[test]
    fn budget_is_enforced() {
        assert!(TruncatedFockSpace::new(5, 3).is_ok());
        assert_eq!(
            TruncatedFockSpace::new(6, 3).unwrap_err(),
            OracleError::BudgetExceeded { dim: 8192, budget: DEFAULT_BUDGET }
        );
        assert!(matches!(TruncatedFockSpace::new(200, 3), Err(OracleError::BudgetExceeded { .. })));
        assert!(TruncatedFockSpace::new(0, 3).is_err());
        assert!(TruncatedFockSpace::new(2, 0).is_err());
    }

    #[test]
    fn invalid_modes_are_rejected() {
        assert!(DiscreteBath::from_modes(vec![1.0, 1.0], vec![0.1, 0.1], 2.0).is_err());
        assert!(DiscreteBath::from_modes(vec![-1.0], vec![0.1], 2.0).is_err());
        let ff = FormFactor64::parametric(1, UvExponent::Linear);
        assert!(discretize(&ff, 0, 6.0).is_err());
        assert!(discretize(&ff, 3, -1.0).is_err());
    }
}
