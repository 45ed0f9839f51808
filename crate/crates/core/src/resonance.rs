//! Second-order resonance energies of a qubit coupled to the reservoir.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{g_omega_inverse, pv_energy_integral, xi, FormFactor, ReservoirSpec};
use crate::system::QubitSystem;

/// Values below this are treated as zero when deciding strict positivity.
pub const POSITIVITY_FLOOR: f64 = 1e-14;

/// Perturbative order at which the resonance energies are truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// `O(λ⁴)` and higher dropped.
    Second,
}

/// Resonance energies `ε₀`, `ε_Δ`, `ε_{−Δ}` at coupling `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceSet<T> {
    lambda: T,
    eps0: Complex<T>,
    eps_delta: Complex<T>,
    eps_minus_delta: Complex<T>,
    order: Order,
    strip_tau_prime: T,
    coefficients: Option<SecondOrderCoefficients<T>>,
}

/// The λ-independent reservoir data entering the second-order energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderCoefficients<T> {
    pub delta: T,
    pub xi_zero: T,
    pub xi_delta: T,
    /// Lamb-type real shift `R`.
    pub r: T,
    /// Rate difference `D`.
    pub d: T,
}

impl<T: Real> ResonanceSet<T> {
    /// Builds a set from explicit `ε₀` and `ε_Δ`; `ε_{−Δ}` follows as `−conj(ε_Δ)`.
    pub fn from_parts(lambda: T, eps0: Complex<T>, eps_delta: Complex<T>, strip_tau_prime: T) -> Result<Self> {
        if !(eps0.im >= T::zero()) || !(eps_delta.im >= T::zero()) {
            return Err(Error::invalid("resonances", "imaginary parts must be nonnegative"));
        }
        if !(strip_tau_prime > T::zero()) {
            return Err(Error::invalid("strip_tau_prime", "must be positive"));
        }
        Ok(Self {
            lambda,
            eps0,
            eps_delta,
            eps_minus_delta: -eps_delta.conj(),
            order: Order::Second,
            strip_tau_prime,
            coefficients: None,
        })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn eps0(&self) -> Complex<T> {
        self.eps0
    }

    pub fn eps_delta(&self) -> Complex<T> {
        self.eps_delta
    }

    pub fn eps_minus_delta(&self) -> Complex<T> {
        self.eps_minus_delta
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// Parameter `τ′ ∈ (0, 2π/β)` labelling the remainder decay `e^{−τ′t/2}`.
    pub fn strip_tau_prime(&self) -> T {
        self.strip_tau_prime
    }

    /// Reservoir data when the set came from [`qubit_resonances`].
    pub fn coefficients(&self) -> Option<&SecondOrderCoefficients<T>> {
        self.coefficients.as_ref()
    }

    /// `e^{−τ′t/2}`, the scale of the dropped non-resonant remainder.
    pub fn remainder_scale(&self, t: T) -> T {
        (-self.strip_tau_prime * t * T::half()).exp()
    }

    /// Replaces `τ′`; it must lie in `(0, 2π/β)`.
    pub fn with_strip_tau_prime(mut self, tau_prime: T, res: &ReservoirSpec<T>) -> Result<Self> {
        let upper = T::two() * T::PI() / res.beta();
        if !(tau_prime > T::zero() && tau_prime < upper) {
            return Err(Error::invalid("strip_tau_prime", format!("must lie in (0, {upper}), got {tau_prime}")));
        }
        self.strip_tau_prime = tau_prime;
        Ok(self)
    }
}

/// Thermalization and decoherence times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timescales<T> {
    pub tau_t: T,
    pub tau_d: T,
    /// Second-order rate difference, when known.
    pub d: Option<T>,
    /// `min{Im ε₀, Im ε_{±Δ}}`.
    pub gamma: T,
}

fn reciprocal<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::infinity()
    } else {
        T::one() / x
    }
}

/// `π²|c|²ξ(Δ)` and `π²(b−a)²ξ(0)`.
fn rate_terms<T: Real>(q: &QubitSystem<T>, ff: &FormFactor<T>, res: &ReservoirSpec<T>) -> Result<(T, T, T, T)> {
    let pi2 = T::PI() * T::PI();
    let xi_delta = xi(ff, res, q.delta())?;
    let xi_zero = xi(ff, res, T::zero())?;
    let ba = q.b() - q.a();
    Ok((pi2 * q.c_norm_sqr() * xi_delta, pi2 * ba * ba * xi_zero, xi_zero, xi_delta))
}

/// `R = ½(b² − a²)⟨g, ω⁻¹g⟩ + ½|c|²·P.V.∫…`.
pub fn lamb_shift_r<T: Real>(q: &QubitSystem<T>, ff: &FormFactor<T>, res: &ReservoirSpec<T>) -> Result<T> {
    let diag = q.b() * q.b() - q.a() * q.a();
    let first = if diag == T::zero() { T::zero() } else { T::half() * diag * g_omega_inverse(ff)? };
    let c2 = q.c_norm_sqr();
    let second = if c2 == T::zero() {
        T::zero()
    } else {
        T::half() * c2 * pv_energy_integral(ff, res, q.delta())?
    };
    Ok(first + second)
}

/// `D = ½π²[|c|²ξ(Δ) − (b−a)²ξ(0)]`.
pub fn rate_difference_d<T: Real>(q: &QubitSystem<T>, ff: &FormFactor<T>, res: &ReservoirSpec<T>) -> Result<T> {
    let (s, pd, _, _) = rate_terms(q, ff, res)?;
    Ok((s - pd) * T::half())
}

/// Second-order resonance energies.
///
/// `ε₀ = iλ²π²|c|²ξ(Δ)`,
/// `ε_Δ = Δ + λ²R + (i/2)λ²π²[|c|²ξ(Δ) + (b−a)²ξ(0)]`,
/// `ε_{−Δ} = −conj(ε_Δ)`.
pub fn qubit_resonances<T: Real>(
    q: &QubitSystem<T>,
    ff: &FormFactor<T>,
    res: &ReservoirSpec<T>,
    lambda: T,
) -> Result<ResonanceSet<T>> {
    if !lambda.is_finite() {
        return Err(Error::invalid("lambda", "must be finite"));
    }
    let (s, pd, xi_zero, xi_delta) = rate_terms(q, ff, res)?;
    let r = lamb_shift_r(q, ff, res)?;
    let l2 = lambda * lambda;
    let eps0 = Complex::new(T::zero(), l2 * s);
    let eps_delta = Complex::new(q.delta() + l2 * r, l2 * ((s + pd) * T::half()));
    Ok(ResonanceSet {
        lambda,
        eps0,
        eps_delta,
        eps_minus_delta: -eps_delta.conj(),
        order: Order::Second,
        strip_tau_prime: res.default_strip(),
        coefficients: Some(SecondOrderCoefficients {
            delta: q.delta(),
            xi_zero,
            xi_delta,
            r,
            d: (s - pd) * T::half(),
        }),
    })
}

pub fn timescales<T: Real>(rs: &ResonanceSet<T>) -> Timescales<T> {
    let im0 = rs.eps0.im;
    let im_d = rs.eps_delta.im.min(rs.eps_minus_delta.im);
    Timescales {
        tau_t: reciprocal(im0),
        tau_d: reciprocal(rs.eps_delta.im),
        d: rs.coefficients.map(|c| c.d),
        gamma: im0.min(im_d),
    }
}

/// `|c|²ξ(Δ) > 10⁻¹⁴`.
pub fn fermi_golden_rule_holds<T: Real>(q: &QubitSystem<T>, ff: &FormFactor<T>, res: &ReservoirSpec<T>) -> Result<bool> {
    let c2 = q.c_norm_sqr();
    if c2 == T::zero() {
        return Ok(false);
    }
    Ok(c2 * xi(ff, res, q.delta())? > T::lit(POSITIVITY_FLOOR))
}
