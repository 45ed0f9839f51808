//! Exact-diagonalization reference for a qubit coupled to a finite,
//! truncated oscillator bath, used to check the perturbative predictions of
//! the `decoherence` crate.

// NaN must fail parameter checks, so guards are written as `!(x > 0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod calibration;
pub mod dephasing;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod hamiltonian;

pub use bath::{discretize, gauss_legendre, DiscreteBath, TruncatedFockSpace, DEFAULT_BUDGET};
pub use calibration::{calibrate_field_normalization, Calibration, CalibrationSetup, ANALYTIC_FIELD_FACTOR};
pub use dephasing::{dephasing_exact, DephasingModel, ModeTruncation};
pub use error::{OracleError, Result};
pub use evolution::{evolve_exact, reduce, ExactPropagator, FullState};
pub use fit::{fit_decay_rate, fit_decay_rate_checked, Channel, RateFit};
pub use hamiltonian::{build_hamiltonian, thermal_bath_state, Hamiltonian, ThermalBathState, TruncationWarning};
