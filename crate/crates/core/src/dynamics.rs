//! Leading-order evolution of the qubit's reduced density matrix.
//!
//! Entries follow `ρ_{mn} = ⟨m|ρ|n⟩` in the energy basis with `E₁ = 0`,
//! `E₂ = Δ`, so free evolution gives `ρ₁₂(t) = ρ₁₂(0) e^{iΔt}`. The coherence
//! therefore carries the phase of `ε_Δ`; its modulus decays as `e^{−t Im ε_Δ}`.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::resonance::ResonanceSet;
use crate::scalar::Real;
use crate::system::Matrix2;

/// 2×2 density matrix of the qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensityMatrix<T> {
    m: Matrix2<T>,
}

impl<T: Real> ReducedDensityMatrix<T> {
    /// Builds the state from `ρ₁₁` and `ρ₁₂`; `ρ₂₂ = 1 − ρ₁₁` and
    /// `ρ₂₁ = conj(ρ₁₂)`, so unit trace and hermiticity hold exactly.
    pub fn hermitian(rho11: T, rho12: Complex<T>) -> Self {
        let z = T::zero();
        Self {
            m: [
                [Complex::new(rho11, z), rho12],
                [rho12.conj(), Complex::new(T::one() - rho11, z)],
            ],
        }
    }

    /// Wraps an arbitrary matrix (e.g. a numerical partial trace) unchanged.
    pub fn from_raw(m: Matrix2<T>) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix2<T> {
        &self.m
    }

    pub fn rho11(&self) -> Complex<T> {
        self.m[0][0]
    }

    pub fn rho12(&self) -> Complex<T> {
        self.m[0][1]
    }

    pub fn rho21(&self) -> Complex<T> {
        self.m[1][0]
    }

    pub fn rho22(&self) -> Complex<T> {
        self.m[1][1]
    }

    /// `(1-based) row, column`.
    pub fn entry(&self, m: usize, n: usize) -> Complex<T> {
        self.m[m - 1][n - 1]
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    /// Largest deviation from `ρ = ρ†`.
    pub fn hermiticity_defect(&self) -> T {
        let d = (self.m[0][1] - self.m[1][0].conj()).norm();
        d.max(self.m[0][0].im.abs()).max(self.m[1][1].im.abs())
    }

    /// Eigenvalues of the hermitian part, ascending.
    pub fn eigenvalues(&self) -> (T, T) {
        let (p, q) = (self.m[0][0].re, self.m[1][1].re);
        let off = (self.m[0][1] + self.m[1][0].conj()) * T::half();
        let mean = T::half() * (p + q);
        let radius = (T::half() * (p - q)).hypot(off.norm());
        (mean - radius, mean + radius)
    }

    /// Unit trace, hermitian and with eigenvalues in `[0, 1]`, all within `tol`.
    pub fn is_physical(&self, tol: T) -> bool {
        let (lo, hi) = self.eigenvalues();
        let tr = self.trace();
        (tr.re - T::one()).abs() <= tol
            && tr.im.abs() <= tol
            && self.hermiticity_defect() <= tol
            && lo >= -tol
            && hi <= T::one() + tol
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }
}

/// Initial qubit states with known leading-order amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState<T> {
    /// Energy eigenstate `|φ_j⟩⟨φ_j|`, `j ∈ {1, 2}`.
    LogicState(u8),
    /// `½[[1, 1], [1, 1]]`.
    IllustrationCoherent,
    /// `diag(q, 1 − q)`.
    CustomDiagonal(T),
}

impl<T: Real> InitialState<T> {
    pub fn logic(j: u8) -> Result<Self> {
        match j {
            1 | 2 => Ok(InitialState::LogicState(j)),
            _ => Err(Error::invalid("initial_state", format!("logic state index must be 1 or 2, got {j}"))),
        }
    }

    pub fn custom_diagonal(q: T) -> Result<Self> {
        if !(q >= T::zero() && q <= T::one()) {
            return Err(Error::invalid("initial_state", format!("population must lie in [0, 1], got {q}")));
        }
        Ok(InitialState::CustomDiagonal(q))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            InitialState::LogicState(1) => "logic1",
            InitialState::LogicState(_) => "logic2",
            InitialState::IllustrationCoherent => "illustration",
            InitialState::CustomDiagonal(_) => "custom_diagonal",
        }
    }

    pub fn density_matrix(&self) -> Result<ReducedDensityMatrix<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        match *self {
            InitialState::LogicState(1) => Ok(ReducedDensityMatrix::hermitian(T::one(), zero)),
            InitialState::LogicState(2) => Ok(ReducedDensityMatrix::hermitian(T::zero(), zero)),
            InitialState::LogicState(j) => Err(Error::invalid("initial_state", format!("no logic state {j}"))),
            InitialState::IllustrationCoherent => {
                let h = T::half();
                Ok(ReducedDensityMatrix::hermitian(h, Complex::new(h, T::zero())))
            }
            InitialState::CustomDiagonal(q) => Ok(ReducedDensityMatrix::hermitian(q, zero)),
        }
    }
}

/// Which propagator produced a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Resonance expansion with the `O(λ²)` remainders dropped.
    LeadingOrder,
    /// Exact evolution of a finite-mode bath.
    Oracle,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::LeadingOrder => "leading-order",
            Provenance::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    times: Vec<T>,
    states: Vec<ReducedDensityMatrix<T>>,
    provenance: Provenance,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(times: Vec<T>, states: Vec<ReducedDensityMatrix<T>>, provenance: Provenance) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::invalid(
                "time_series",
                format!("{} times but {} states", times.len(), states.len()),
            ));
        }
        check_grid(&times)?;
        Ok(Self { times, states, provenance })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &[ReducedDensityMatrix<T>] {
        &self.states
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, &ReducedDensityMatrix<T>)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

/// Rejects grids that are not finite, nonnegative and strictly increasing.
pub fn check_grid<T: Real>(times: &[T]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < T::zero()) {
        return Err(Error::invalid("time_grid", "times must be finite and nonnegative"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("time_grid", "times must be strictly increasing"));
    }
    Ok(())
}

fn validate_gap<T: Real>(delta: T, beta: T) -> Result<()> {
    if !(delta >= T::zero()) || !delta.is_finite() {
        return Err(Error::invalid("Delta", format!("must be finite and nonnegative, got {delta}")));
    }
    if !(beta > T::zero()) {
        return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
    }
    Ok(())
}

/// `diag(1, e^{−βΔ}) / Z`.
pub fn gibbs_state<T: Real>(delta: T, beta: T) -> Result<ReducedDensityMatrix<T>> {
    validate_gap(delta, beta)?;
    let g11 = T::one() / (T::one() + (-beta * delta).exp());
    Ok(ReducedDensityMatrix::hermitian(g11, Complex::new(T::zero(), T::zero())))
}

/// Leading-order ergodic mean: Gibbs populations and vanishing coherences.
pub fn ergodic_mean<T: Real>(delta: T, beta: T) -> Result<ReducedDensityMatrix<T>> {
    gibbs_state(delta, beta)
}

/// `(C₀, C_Δ)` for the states with published amplitudes.
///
/// Logic states return the published `C₀` with `C_Δ = 0`. The coherent
/// superposition returns the `ρ₁₁` population amplitude `−½ tanh(βΔ/2)` and the
/// coherence amplitude `½`.
pub fn amplitude_constants<T: Real>(init: &InitialState<T>, delta: T, beta: T) -> Result<(T, Complex<T>)> {
    validate_gap(delta, beta)?;
    let zero = Complex::new(T::zero(), T::zero());
    let x = beta * delta;
    let damp = (T::one() + (-x).exp()).powf(T::lit(-1.5));
    match *init {
        InitialState::LogicState(1) => Ok(((-x).exp() * damp, zero)),
        InitialState::LogicState(2) => Ok(((-T::half() * x).exp() * damp, zero)),
        InitialState::IllustrationCoherent => {
            Ok((-T::half() * (T::half() * x).tanh(), Complex::new(T::half(), T::zero())))
        }
        _ => Err(Error::UnsupportedInitialState(init.tag().to_string())),
    }
}

/// `e^{itε}`.
fn phase<T: Real>(eps: Complex<T>, t: T) -> Complex<T> {
    (Complex::new(T::zero(), t) * eps).exp()
}

/// Leading-order state at time `t`.
///
/// Populations relax to Gibbs as `e^{itε₀}` with amplitude `ρ₁₁(0) − G₁₁`; the
/// coherence is `C_Δ e^{itε_Δ}`. All `O(λ²)` remainders are dropped.
pub fn evolve_leading<T: Real>(
    init: &InitialState<T>,
    rs: &ResonanceSet<T>,
    delta: T,
    beta: T,
    t: T,
) -> Result<ReducedDensityMatrix<T>> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::invalid("t", format!("must be finite and nonnegative, got {t}")));
    }
    let (pop_amp, coh_amp) = leading_amplitudes(init, delta, beta)?;
    let g11 = gibbs_state(delta, beta)?.rho11().re;
    Ok(leading_state(g11, pop_amp, coh_amp, rs, t))
}

/// Population amplitude `ρ₁₁(0) − G₁₁` and coherence amplitude.
fn leading_amplitudes<T: Real>(init: &InitialState<T>, delta: T, beta: T) -> Result<(T, Complex<T>)> {
    if matches!(init, InitialState::CustomDiagonal(_)) {
        return Err(Error::UnsupportedInitialState(init.tag().to_string()));
    }
    let (_, coh_amp) = amplitude_constants(init, delta, beta)?;
    let rho0 = init.density_matrix()?;
    // G₁₁ ∈ [½, 1], so this difference is exact for every supported state.
    let g11 = gibbs_state(delta, beta)?.rho11().re;
    Ok((rho0.rho11().re - g11, coh_amp))
}

fn leading_state<T: Real>(
    g11: T,
    pop_amp: T,
    coh_amp: Complex<T>,
    rs: &ResonanceSet<T>,
    t: T,
) -> ReducedDensityMatrix<T> {
    let rho11 = g11 + pop_amp * phase(rs.eps0(), t).re;
    ReducedDensityMatrix::hermitian(rho11, coh_amp * phase(rs.eps_delta(), t))
}

/// [`evolve_leading`] over a grid.
pub fn time_series<T: Real>(
    init: &InitialState<T>,
    rs: &ResonanceSet<T>,
    delta: T,
    beta: T,
    t_grid: &[T],
) -> Result<TimeSeries<T>> {
    check_grid(t_grid)?;
    let (pop_amp, coh_amp) = leading_amplitudes(init, delta, beta)?;
    let g11 = gibbs_state(delta, beta)?.rho11().re;
    let states = t_grid.iter().map(|&t| leading_state(g11, pop_amp, coh_amp, rs, t)).collect();
    TimeSeries::new(t_grid.to_vec(), states, Provenance::LeadingOrder)
}
