//! Markovian resonance theory of a small quantum system coupled linearly to a
//! thermal bosonic reservoir.
//!
//! The crate computes the reservoir integrals that fix the decoherence and
//! relaxation rates, the second-order resonance energies of a qubit, and the
//! leading-order reduced density matrix.

// NaN must fail parameter checks, so guards are written as `!(x > 0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod quadrature;
pub mod resonance;
pub mod scalar;
pub mod spectral;
pub mod system;

pub use dynamics::{
    amplitude_constants, ergodic_mean, evolve_leading, gibbs_state, time_series, InitialState, Provenance,
    ReducedDensityMatrix, TimeSeries,
};
pub use error::{Error, Result};
pub use resonance::{
    fermi_golden_rule_holds, lamb_shift_r, qubit_resonances, rate_difference_d, timescales, Order, ResonanceSet,
    SecondOrderCoefficients, Timescales,
};
pub use scalar::Real;
pub use spectral::{
    g_omega_inverse, infrared_exponent, pv_energy_integral, xi, xi_lorentzian, FormFactor, ReservoirSpec,
    UvExponent,
};
pub use system::{
    bohr_spectrum, bohr_spectrum_of, qubit_from_matrices, spin_boson_to_qubit, BohrClass, BohrSpectrum, NLevelSystem,
    QubitSystem, SpinBosonParams,
};

pub type FormFactor64 = FormFactor<f64>;
pub type FormFactor32 = FormFactor<f32>;
pub type ReservoirSpec64 = ReservoirSpec<f64>;
pub type ReservoirSpec32 = ReservoirSpec<f32>;
pub type QubitSystem64 = QubitSystem<f64>;
pub type QubitSystem32 = QubitSystem<f32>;
pub type SpinBosonParams64 = SpinBosonParams<f64>;
pub type NLevelSystem64 = NLevelSystem<f64>;
pub type ResonanceSet64 = ResonanceSet<f64>;
pub type Timescales64 = Timescales<f64>;
pub type ReducedDensityMatrix64 = ReducedDensityMatrix<f64>;
pub type TimeSeries64 = TimeSeries<f64>;
pub type InitialState64 = InitialState<f64>;
