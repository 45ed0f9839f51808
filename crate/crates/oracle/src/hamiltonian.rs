//! Dense Hamiltonian and thermal bath state on the truncated space.
//!
//! Composite basis index: `q · D_B + k`, with `q ∈ {0, 1}` the qubit level
//! (energies `0`, `Δ`) and `k` the bath occupation index of
//! [`TruncatedFockSpace`].

use std::f64::consts::FRAC_1_SQRT_2;

use decoherence::QubitSystem64;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bath::{DiscreteBath, TruncatedFockSpace};
use crate::error::{OracleError, Result};

/// Per-mode discarded thermal weight above which a warning is raised.
pub const TAIL_WARNING_THRESHOLD: f64 = 1e-6;

/// Hermitian matrix on the composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: DMatrix<Complex64>,
    real: bool,
}

impl Hamiltonian {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// All entries have zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.matrix.map(|z| z.re)
    }
}

fn check_modes(bath: &DiscreteBath, fock: &TruncatedFockSpace) -> Result<()> {
    if bath.len() != fock.modes() {
        return Err(OracleError::DimensionMismatch { expected: fock.modes(), found: bath.len() });
    }
    Ok(())
}

/// Matrix elements `⟨k'|B|k⟩` of `B = Σ_j g_j (a_j + a_j†)/√2` with `k' > k`.
fn field_elements(bath: &DiscreteBath, fock: &TruncatedFockSpace) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for k in 0..fock.bath_dim() {
        for (j, &g) in bath.couplings().iter().enumerate() {
            let n = fock.occupation(k, j);
            if n < fock.n_max() {
                let amp = g * FRAC_1_SQRT_2 * ((n + 1) as f64).sqrt();
                out.push((k + fock.stride(j), k, amp));
            }
        }
    }
    out
}

/// `H = diag(0, Δ) ⊗ 1 + Σ ω_j a_j†a_j + λ G ⊗ Σ_j g_j (a_j + a_j†)/√2`.
pub fn build_hamiltonian(
    q: &QubitSystem64,
    bath: &DiscreteBath,
    fock: &TruncatedFockSpace,
    lambda: f64,
) -> Result<Hamiltonian> {
    check_modes(bath, fock)?;
    let nb = fock.bath_dim();
    let n = fock.dim();
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    let bath_energy: Vec<f64> = (0..nb)
        .map(|k| (0..fock.modes()).map(|j| bath.omegas()[j] * fock.occupation(k, j) as f64).sum())
        .collect();
    for (k, e) in bath_energy.iter().enumerate() {
        h[(k, k)] = Complex64::new(*e, 0.0);
        h[(nb + k, nb + k)] = Complex64::new(q.delta() + e, 0.0);
    }
    let g = q.coupling_matrix();
    let field = field_elements(bath, fock);
    for qa in 0..2 {
        for qb in 0..2 {
            let coupling = g[qa][qb] * lambda;
            if coupling == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(hi, lo, amp) in &field {
                h[(qa * nb + hi, qb * nb + lo)] += coupling * amp;
                h[(qa * nb + lo, qb * nb + hi)] += coupling * amp;
            }
        }
    }
    // Mirror the upper triangle so that H = H† holds bit for bit.
    for r in 0..n {
        h[(r, r)].im = 0.0;
        for c in (r + 1)..n {
            h[(c, r)] = h[(r, c)].conj();
        }
    }
    let real = h.iter().all(|z| z.im == 0.0);
    Ok(Hamiltonian { matrix: h, real })
}

/// A mode whose truncated thermal tail is not negligible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWarning {
    pub mode: usize,
    pub omega: f64,
    /// Thermal weight above `n_max` before renormalization.
    pub discarded_weight: f64,
}

/// Product of per-mode truncated Gibbs factors (diagonal in the Fock basis).
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalBathState {
    per_mode: Vec<Vec<f64>>,
    populations: Vec<f64>,
    warnings: Vec<TruncationWarning>,
}

impl ThermalBathState {
    /// Diagonal of the bath density matrix.
    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    /// Occupation probabilities of mode `j`.
    pub fn mode_populations(&self, j: usize) -> &[f64] {
        &self.per_mode[j]
    }

    pub fn warnings(&self) -> &[TruncationWarning] {
        &self.warnings
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let d = nalgebra::DVector::from_iterator(
            self.populations.len(),
            self.populations.iter().map(|&p| Complex64::new(p, 0.0)),
        );
        DMatrix::from_diagonal(&d)
    }

    /// `⟨n_j⟩` of the truncated state.
    pub fn mean_occupation(&self, j: usize) -> f64 {
        self.per_mode[j].iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

/// `⊗_j e^{−βω_j n}/Z_j` with each factor renormalized after truncation.
pub fn thermal_bath_state(bath: &DiscreteBath, fock: &TruncatedFockSpace, beta: f64) -> Result<ThermalBathState> {
    check_modes(bath, fock)?;
    if !(beta > 0.0) {
        return Err(OracleError::PreconditionViolation(format!("beta must be positive, got {beta}")));
    }
    let mut per_mode = Vec::with_capacity(fock.modes());
    let mut warnings = Vec::new();
    for (j, &omega) in bath.omegas().iter().enumerate() {
        let x = (-beta * omega).exp();
        let mut weights: Vec<f64> = (0..fock.levels()).map(|n| x.powi(n as i32)).collect();
        let z: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= z);
        let discarded = x.powi(fock.levels() as i32);
        if discarded > TAIL_WARNING_THRESHOLD {
            warnings.push(TruncationWarning { mode: j, omega, discarded_weight: discarded });
        }
        per_mode.push(weights);
    }
    let populations = (0..fock.bath_dim())
        .map(|k| (0..fock.modes()).map(|j| per_mode[j][fock.occupation(k, j)]).product())
        .collect();
    Ok(ThermalBathState { per_mode, populations, warnings })
}
