//! Reservoir form factors and the reservoir integrals built from them.
//!
//! A form factor factorises as `g(k) = g_rad(|k|) · g₁(σ)` with `σ` on the unit
//! sphere. Every radial integral therefore carries the angular weight
//! `‖g₁‖² = ∫_{S²} |g₁|² dσ`, precomputed once per form factor. Units are
//! ħ = k_B = 1 throughout.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};
use crate::scalar::{coth, to_f64, x_coth_x, Real};

/// Largest infrared order `n` (with `p = n - 1/2`) probed for custom profiles.
pub const MAX_IR_ORDER: u32 = 12;

/// Radii used by the ratio-stabilization test for custom radial profiles.
pub const RATIO_TEST_RADII: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

const RATIO_TEST_TOLERANCE: f64 = 1e-2;

/// Ultraviolet decay exponent `m` of the parametric family `|k|^p e^{-|k|^m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UvExponent {
    Linear,
    Quadratic,
}

impl UvExponent {
    pub fn from_int(m: u32) -> Result<Self> {
        match m {
            1 => Ok(UvExponent::Linear),
            2 => Ok(UvExponent::Quadratic),
            _ => Err(Error::invalid("form_factor.m", format!("must be 1 or 2, got {m}"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            UvExponent::Linear => 1,
            UvExponent::Quadratic => 2,
        }
    }
}

pub type RadialFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;
pub type AngularFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

#[derive(Clone)]
enum Radial<T> {
    Parametric(UvExponent),
    /// `ir_constant` is `lim_{r→0} |g_rad(r)| / r^p`.
    Custom { profile: RadialFn<T>, ir_constant: T },
}

#[derive(Clone)]
enum Angular<T> {
    Constant(T),
    /// `g₁(θ, φ)` in polar/azimuthal angles.
    Profile(AngularFn<T>),
    /// Only the norm is known (e.g. read from a configuration file).
    NormOnly,
}

/// Coupling function `g(k) = g_rad(|k|) g₁(σ)` with infrared exponent `p`.
#[derive(Clone)]
pub struct FormFactor<T> {
    ir_order: u32,
    radial: Radial<T>,
    angular: Angular<T>,
    angular_norm: T,
}

impl<T: Real> fmt::Debug for FormFactor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let radial = match &self.radial {
            Radial::Parametric(m) => format!("parametric(m={})", m.as_int()),
            Radial::Custom { ir_constant, .. } => format!("custom(C={ir_constant})"),
        };
        let angular = match &self.angular {
            Angular::Constant(v) => format!("constant({v})"),
            Angular::Profile(_) => "profile".to_string(),
            Angular::NormOnly => "norm-only".to_string(),
        };
        f.debug_struct("FormFactor")
            .field("p", &self.p())
            .field("radial", &radial)
            .field("angular", &angular)
            .field("angular_norm", &self.angular_norm)
            .finish()
    }
}

fn four_pi<T: Real>() -> T {
    T::lit(4.0) * T::PI()
}

impl<T: Real> FormFactor<T> {
    /// `|k|^{n-1/2} e^{-|k|^m}` with an isotropic angular profile `g₁ ≡ 1`.
    pub fn parametric(ir_order: u32, m: UvExponent) -> Self {
        Self {
            ir_order,
            radial: Radial::Parametric(m),
            angular: Angular::Constant(T::one()),
            angular_norm: four_pi(),
        }
    }

    /// Parametric family from `(p, m)`, validating `p + 1/2 ∈ ℕ` and `m ∈ {1, 2}`.
    pub fn from_exponents(p: T, m: u32) -> Result<Self> {
        let n = ir_order_of(p)?;
        Ok(Self::parametric(n, UvExponent::from_int(m)?))
    }

    /// Custom radial profile. The declared `p` must pass the ratio test.
    pub fn custom_radial(p: T, profile: impl Fn(T) -> T + Send + Sync + 'static) -> Result<Self> {
        let n = ir_order_of(p)?;
        let profile: RadialFn<T> = Arc::new(profile);
        let ir_constant = ratio_limit(&*profile, p).ok_or_else(|| {
            Error::NonconformingProfile(format!(
                "|g(r)|/r^p does not stabilise to a finite positive limit for the declared p = {p}"
            ))
        })?;
        Ok(Self {
            ir_order: n,
            radial: Radial::Custom { profile, ir_constant },
            angular: Angular::Constant(T::one()),
            angular_norm: four_pi(),
        })
    }

    /// Replaces the angular profile; its norm is integrated numerically.
    pub fn with_angular_profile(mut self, g1: impl Fn(T, T) -> T + Send + Sync + 'static) -> Result<Self> {
        let g1: AngularFn<T> = Arc::new(g1);
        self.angular_norm = sphere_norm(&*g1)?;
        if !(self.angular_norm > T::zero()) || !self.angular_norm.is_finite() {
            return Err(Error::invalid(
                "form_factor.angular_profile",
                format!("angular norm must be positive and finite, got {}", self.angular_norm),
            ));
        }
        self.angular = Angular::Profile(g1);
        Ok(self)
    }

    /// Replaces the angular profile by its norm alone.
    pub fn with_angular_norm(mut self, norm: T) -> Result<Self> {
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::invalid(
                "form_factor.angular_norm",
                format!("must be positive and finite, got {norm}"),
            ));
        }
        self.angular = Angular::NormOnly;
        self.angular_norm = norm;
        Ok(self)
    }

    /// The same form factor with `g₁` multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        out.angular_norm = self.angular_norm * s * s;
        out.angular = match &self.angular {
            Angular::Constant(v) => Angular::Constant(*v * s),
            Angular::Profile(f) => {
                let f = Arc::clone(f);
                Angular::Profile(Arc::new(move |th, ph| s * f(th, ph)))
            }
            Angular::NormOnly => Angular::NormOnly,
        };
        out
    }

    pub fn p(&self) -> T {
        T::lit(self.ir_order as f64) - T::half()
    }

    /// `n` in `p = n - 1/2`.
    pub fn ir_order(&self) -> u32 {
        self.ir_order
    }

    /// `None` for custom radial profiles.
    pub fn uv_exponent(&self) -> Option<UvExponent> {
        match self.radial {
            Radial::Parametric(m) => Some(m),
            Radial::Custom { .. } => None,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self.angular, Angular::Constant(_))
    }

    pub fn angular_norm(&self) -> T {
        self.angular_norm
    }

    /// `g₁(θ, φ)`, when the profile (not just its norm) is known.
    pub fn angular_value(&self, theta: T, phi: T) -> Option<T> {
        match &self.angular {
            Angular::Constant(v) => Some(*v),
            Angular::Profile(f) => Some(f(theta, phi)),
            Angular::NormOnly => None,
        }
    }

    /// `lim_{r→0} |g_rad(r)| / r^p`.
    pub fn ir_constant(&self) -> T {
        match &self.radial {
            Radial::Parametric(_) => T::one(),
            Radial::Custom { ir_constant, .. } => *ir_constant,
        }
    }

    /// `|g_rad(r)|` for `r > 0`.
    pub fn radial_amplitude(&self, r: T) -> T {
        match &self.radial {
            Radial::Parametric(m) => r.powf(self.p()) * (-uv_power(r, *m)).exp(),
            Radial::Custom { profile, .. } => profile(r).abs(),
        }
    }

    /// `r |g_rad(r)|²`, finite on `[0, ∞)` for every admissible `p`.
    pub fn radial_weight(&self, r: T) -> T {
        let r = r.abs();
        match &self.radial {
            Radial::Parametric(m) => r.powi(2 * self.ir_order as i32) * (-T::two() * uv_power(r, *m)).exp(),
            Radial::Custom { profile, ir_constant } => {
                if r == T::zero() {
                    if self.ir_order == 0 {
                        *ir_constant * *ir_constant
                    } else {
                        T::zero()
                    }
                } else {
                    let g = profile(r);
                    r * g * g
                }
            }
        }
    }

    /// Effective spectral density `J(ω) = ω² ∫_{S²} |g(ω, σ)|² dσ`.
    pub fn spectral_density(&self, omega: T) -> T {
        let w = omega.abs();
        w * self.radial_weight(w) * self.angular_norm
    }

    /// `J(|u|) coth(β|u|/2)`, continuous through `u = 0`.
    pub fn thermal_density(&self, u: T, beta: T) -> T {
        let w = u.abs();
        let x = T::half() * beta * w;
        self.radial_weight(w) * (T::two() / beta) * x_coth_x(x) * self.angular_norm
    }
}

fn uv_power<T: Real>(r: T, m: UvExponent) -> T {
    match m {
        UvExponent::Linear => r,
        UvExponent::Quadratic => r * r,
    }
}

fn ir_order_of<T: Real>(p: T) -> Result<u32> {
    let n = p + T::half();
    let rounded = n.round();
    if !p.is_finite() || n < -T::lit(1e-12) || (n - rounded).abs() > T::lit(1e-9) {
        return Err(Error::invalid(
            "form_factor.p",
            format!("p + 1/2 must be a nonnegative integer, got p = {p}"),
        ));
    }
    let n = rounded.to_u32().unwrap_or(u32::MAX);
    if n > MAX_IR_ORDER {
        return Err(Error::invalid(
            "form_factor.p",
            format!("p = {p} exceeds the supported range (p ≤ {} )", MAX_IR_ORDER as f64 - 0.5),
        ));
    }
    Ok(n)
}

/// `lim_{r→0} |f(r)|/r^p` if the ratio stabilises over [`RATIO_TEST_RADII`].
fn ratio_limit<T: Real>(f: &dyn Fn(T) -> T, p: T) -> Option<T> {
    let ratios: Vec<T> = RATIO_TEST_RADII
        .iter()
        .map(|&r| {
            let r = T::lit(r);
            f(r).abs() / r.powf(p)
        })
        .collect();
    if ratios.iter().any(|q| !q.is_finite() || *q <= T::zero()) {
        return None;
    }
    let tol = T::lit(RATIO_TEST_TOLERANCE);
    let n = ratios.len();
    let stable = ratios[n - 3..].windows(2).all(|w| (w[1] / w[0] - T::one()).abs() <= tol);
    stable.then(|| ratios[n - 1])
}

fn sphere_norm<T: Real>(g1: &dyn Fn(T, T) -> T) -> Result<T> {
    let tol = Tolerance::new(T::lit(1e-12), T::lit(1e-10));
    let two_pi = T::two() * T::PI();
    let outer = integrate(
        |theta: T| {
            let inner = integrate(
                |phi: T| {
                    let v = g1(theta, phi);
                    v * v
                },
                T::zero(),
                two_pi,
                &tol,
            );
            // Failures surface as NaN and are reported by the outer integral.
            inner.map(|e| e.value * theta.sin()).unwrap_or_else(|_| T::nan())
        },
        T::zero(),
        T::PI(),
        &tol,
    )?;
    Ok(outer.value)
}

/// Thermal state of the reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirSpec<T> {
    beta: T,
}

impl<T: Real> ReservoirSpec<T> {
    pub fn new(beta: T) -> Result<Self> {
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(Error::invalid("reservoir.beta", format!("must be positive and finite, got {beta}")));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn temperature(&self) -> T {
        T::one() / self.beta
    }

    /// Default remainder-strip parameter `τ'`, the midpoint of `(0, 2π/β)`.
    pub fn default_strip(&self) -> T {
        T::PI() / self.beta
    }
}

/// Infrared exponent `p` of a form factor.
///
/// Parametric profiles store `p`. Custom profiles are re-checked: `p` is the
/// unique candidate `n - 1/2` for which `|g(r)|/r^p` settles to a finite
/// positive value as `r → 0`.
pub fn infrared_exponent<T: Real>(ff: &FormFactor<T>) -> Result<T> {
    match &ff.radial {
        Radial::Parametric(_) => Ok(ff.p()),
        Radial::Custom { profile, .. } => detect_infrared_exponent(&**profile),
    }
}

/// Searches `p ∈ {-1/2, 1/2, …}` for the exponent under which `f` has a
/// finite positive infrared limit.
pub fn detect_infrared_exponent<T: Real>(f: &dyn Fn(T) -> T) -> Result<T> {
    (0..=MAX_IR_ORDER)
        .map(|n| T::lit(n as f64) - T::half())
        .find(|&p| ratio_limit(f, p).is_some())
        .ok_or_else(|| {
            Error::NonconformingProfile(
                "the ratio |g(r)|/r^p diverges or vanishes for every admissible p".to_string(),
            )
        })
}

/// Energy-exchange effectiveness `ξ(η)`, via the closed-form Lorentzian limit.
///
/// For `η > 0` the Lorentzian collapses onto the shell `|k| = η`. At `η = 0`
/// only half of the Lorentzian lies on the half-line, which leaves
/// `ξ(0) = C²‖g₁‖²/β` for `p = -1/2` and `0` otherwise.
pub fn xi<T: Real>(ff: &FormFactor<T>, res: &ReservoirSpec<T>, eta: T) -> Result<T> {
    if !(eta >= T::zero()) || !eta.is_finite() {
        return Err(Error::invalid("eta", format!("must be finite and nonnegative, got {eta}")));
    }
    if eta > T::zero() {
        return Ok(ff.thermal_density(eta, res.beta));
    }
    if ff.ir_order == 0 {
        let c = ff.ir_constant();
        Ok(c * c * ff.angular_norm / res.beta)
    } else {
        Ok(T::zero())
    }
}

/// Pre-limit `ξ`: the radial integral with a Lorentzian of width `epsilon`.
pub fn xi_lorentzian<T: Real>(ff: &FormFactor<T>, res: &ReservoirSpec<T>, eta: T, epsilon: T) -> Result<T> {
    xi_lorentzian_with(ff, res, eta, epsilon, &Tolerance::default())
}

pub fn xi_lorentzian_with<T: Real>(
    ff: &FormFactor<T>,
    res: &ReservoirSpec<T>,
    eta: T,
    epsilon: T,
    tol: &Tolerance<T>,
) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    if !eta.is_finite() {
        return Err(Error::invalid("eta", "must be finite"));
    }
    let beta = res.beta;
    let mut breaks = vec![eta, eta + T::one(), eta + T::lit(4.0)];
    for k in [1.0, 10.0, 100.0, 1000.0] {
        breaks.push(eta - T::lit(k) * epsilon);
        breaks.push(eta + T::lit(k) * epsilon);
    }
    let est = integrate_to_infinity(
        |r: T| {
            let d = r - eta;
            ff.thermal_density(r, beta) * epsilon / (d * d + epsilon * epsilon)
        },
        T::zero(),
        &breaks,
        tol,
    )?;
    Ok(est.value / T::PI())
}

/// `⟨g, ω⁻¹ g⟩ = ∫ |g(k)|²/|k| d³k`.
pub fn g_omega_inverse<T: Real>(ff: &FormFactor<T>) -> Result<T> {
    match ff.radial {
        Radial::Parametric(m) => Ok(ff.angular_norm * radial_moment(ff.ir_order, m)),
        Radial::Custom { .. } => {
            let est = integrate_to_infinity(|r: T| ff.radial_weight(r), T::zero(), &[T::one()], &Tolerance::default())?;
            Ok(ff.angular_norm * est.value)
        }
    }
}

/// `∫₀^∞ r^{2n} e^{-2 r^m} dr` in closed form.
fn radial_moment<T: Real>(n: u32, m: UvExponent) -> T {
    let fact = |k: u32| (1..=k).fold(T::one(), |acc, i| acc * T::lit(i as f64));
    match m {
        // Γ(2n+1) / 2^{2n+1}
        UvExponent::Linear => fact(2 * n) / T::two().powi(2 * n as i32 + 1),
        // Γ(n+1/2) / (2^{n+1} √2), Γ(n+1/2) = (2n)! √π / (4^n n!)
        UvExponent::Quadratic => {
            let gamma_half = fact(2 * n) * T::PI().sqrt() / (T::lit(4.0).powi(n as i32) * fact(n));
            gamma_half / (T::two().powi(n as i32 + 1) * T::two().sqrt())
        }
    }
}

/// `P.V. ∫_ℝ J(|u|) coth(β|u|/2) / (u - Δ) du`.
///
/// The pole is excised symmetrically and the excised window is integrated as
/// `∫₀^δ [F(Δ+s) − F(Δ−s)]/s ds`, which is regular. The result is computed
/// for excision radii `Δ/2` and `Δ/4`; the two must agree to tolerance and the
/// second is returned.
pub fn pv_energy_integral<T: Real>(ff: &FormFactor<T>, res: &ReservoirSpec<T>, delta: T) -> Result<T> {
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(Error::invalid("Delta", format!("must be positive and finite, got {delta}")));
    }
    let tol = Tolerance::default();
    let coarse = pv_energy_integral_excised(ff, res, delta, delta * T::half(), &tol)?;
    let fine = pv_energy_integral_excised(ff, res, delta, delta * T::lit(0.25), &tol)?;
    let allowed = T::lit(100.0) * tol.abs.max(tol.rel * fine.abs());
    if (coarse - fine).abs() > allowed {
        return Err(Error::QuadratureFailure {
            reason: "principal value changed under excision-radius halving",
            estimate: to_f64(fine),
            error: to_f64((coarse - fine).abs()),
            subdivisions: 0,
        });
    }
    Ok(fine)
}

/// Principal value with an explicit excision radius `0 < radius ≤ Δ`.
pub fn pv_energy_integral_excised<T: Real>(
    ff: &FormFactor<T>,
    res: &ReservoirSpec<T>,
    delta: T,
    radius: T,
    tol: &Tolerance<T>,
) -> Result<T> {
    if !(radius > T::zero()) || radius > delta {
        return Err(Error::invalid("excision radius", format!("must lie in (0, Δ], got {radius}")));
    }
    let beta = res.beta;
    let f = |u: T| ff.thermal_density(u, beta);
    let below = integrate(|u: T| f(u) / (u - delta), T::zero(), delta - radius, tol)?.value;
    let above = integrate_to_infinity(
        |u: T| f(u) / (u - delta),
        delta + radius,
        &[delta + T::one(), delta + T::lit(4.0)],
        tol,
    )?
    .value;
    let window = integrate(|s: T| (f(delta + s) - f(delta - s)) / s, T::zero(), radius, tol)?.value;
    // Negative half-line, folded onto u > 0.
    let mirror = integrate_to_infinity(|v: T| f(v) / (v + delta), T::zero(), &[T::one(), T::lit(4.0)], tol)?.value;
    Ok(below + above + window - mirror)
}

/// `coth(βη/2)` for `η > 0`; exposed for callers tabulating thermal weights.
pub fn thermal_factor<T: Real>(res: &ReservoirSpec<T>, eta: T) -> T {
    coth(T::half() * res.beta * eta)
}
