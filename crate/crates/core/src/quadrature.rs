//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Integrals are assembled from [`Segment`]s: finite intervals and half-lines
//! `[a, ∞)`. Half-lines are mapped onto `(0, 1]` through `x = a + (1 - s)/s`.
//! All panels of all segments compete for refinement in a single pool, so
//! breakpoints only seed the subdivision and never force per-piece
//! tolerances.

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

// Kronrod abscissae on [-1, 1] (positive half, descending); odd indices are
// the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for the adaptive scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        let floor = T::noise_floor();
        Self {
            abs: T::lit(1e-10).max(floor),
            rel: T::lit(1e-8).max(floor),
            max_subdivisions: 4000,
        }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn new(abs: T, rel: T) -> Self {
        let floor = T::noise_floor();
        Self {
            abs: abs.max(T::zero()),
            rel: rel.max(floor),
            ..Self::default()
        }
    }
}

/// Piece of the integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment<T> {
    Finite(T, T),
    /// `[a, ∞)`.
    Tail(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub subdivisions: usize,
}

struct Panel<T> {
    segment: usize,
    lo: T,
    hi: T,
    value: T,
    error: T,
    /// `∫|f|` over the panel, which sets the rounding floor.
    magnitude: T,
    splittable: bool,
}

struct Integrand<'a, T, F> {
    f: &'a F,
    segments: &'a [Segment<T>],
}

impl<T: Real, F: Fn(T) -> T> Integrand<'_, T, F> {
    fn local(&self, segment: usize, s: T) -> T {
        match self.segments[segment] {
            Segment::Finite(..) => (self.f)(s),
            Segment::Tail(a) => {
                let x = a + (T::one() - s) / s;
                let v = (self.f)(x);
                if v == T::zero() {
                    T::zero()
                } else {
                    v / (s * s)
                }
            }
        }
    }

    fn panel(&self, segment: usize, lo: T, hi: T) -> Result<Panel<T>> {
        let centre = T::half() * (lo + hi);
        let half = T::half() * (hi - lo);
        let fc = self.local(segment, centre);
        let mut res_k = fc * T::lit(WGK[7]);
        let mut res_g = fc * T::lit(WG[3]);
        let mut res_abs = res_k.abs();
        let mut fv1 = [T::zero(); 7];
        let mut fv2 = [T::zero(); 7];
        for j in 0..7 {
            let dx = half * T::lit(XGK[j]);
            let f1 = self.local(segment, centre - dx);
            let f2 = self.local(segment, centre + dx);
            fv1[j] = f1;
            fv2[j] = f2;
            let w = T::lit(WGK[j]);
            res_k = res_k + w * (f1 + f2);
            res_abs = res_abs + w * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
            }
        }
        if !res_k.is_finite() {
            return Err(Error::QuadratureFailure {
                reason: "non-finite integrand",
                estimate: to_f64(res_k),
                error: f64::INFINITY,
                subdivisions: 0,
            });
        }
        let mean = res_k * T::half();
        let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
        for j in 0..7 {
            res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
        }
        let value = res_k * half;
        let res_abs = res_abs * half.abs();
        let res_asc = res_asc * half.abs();
        let mut error = ((res_k - res_g) * half).abs();
        if res_asc != T::zero() && error != T::zero() {
            let scale = (T::lit(200.0) * error / res_asc).powf(T::lit(1.5));
            error = res_asc * scale.min(T::one());
        }
        let guard = T::lit(50.0) * T::epsilon();
        if res_abs > T::min_positive_value() / guard {
            error = error.max(guard * res_abs);
        }
        let width_floor = T::lit(1000.0) * T::epsilon() * (lo.abs() + hi.abs()).max(T::one());
        Ok(Panel {
            segment,
            lo,
            hi,
            value,
            error,
            magnitude: res_abs,
            splittable: (hi - lo) > width_floor,
        })
    }
}

/// Integrates `f` over the union of `segments`.
pub fn integrate_segments<T, F>(f: F, segments: &[Segment<T>], tol: &Tolerance<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let integrand = Integrand { f: &f, segments };
    let mut panels = Vec::with_capacity(segments.len() * 8);
    for (i, seg) in segments.iter().enumerate() {
        match *seg {
            Segment::Finite(a, b) => {
                if b > a {
                    panels.push(integrand.panel(i, a, b)?);
                }
            }
            Segment::Tail(_) => panels.push(integrand.panel(i, T::zero(), T::one())?),
        }
    }
    let mut subdivisions = 0usize;
    loop {
        let value: T = panels.iter().map(|p| p.value).sum();
        let error: T = panels.iter().map(|p| p.error).sum();
        let magnitude: T = panels.iter().map(|p| p.magnitude).sum();
        // Below the rounding floor of Σ∫|f| no further splitting can help.
        let rounding = T::lit(100.0) * T::epsilon() * magnitude;
        if error <= tol.abs.max(tol.rel * value.abs()).max(rounding) {
            return Ok(Estimate {
                value,
                error,
                subdivisions,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable)
            .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        let Some(worst) = worst else {
            return Err(Error::QuadratureFailure {
                reason: "panels reached the resolution limit",
                estimate: to_f64(value),
                error: to_f64(error),
                subdivisions,
            });
        };
        if subdivisions >= tol.max_subdivisions {
            return Err(Error::QuadratureFailure {
                reason: "subdivision limit reached",
                estimate: to_f64(value),
                error: to_f64(error),
                subdivisions,
            });
        }
        let p = panels.swap_remove(worst);
        let mid = T::half() * (p.lo + p.hi);
        panels.push(integrand.panel(p.segment, p.lo, mid)?);
        panels.push(integrand.panel(p.segment, mid, p.hi)?);
        subdivisions += 1;
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: &Tolerance<T>) -> Result<Estimate<T>> {
    if b < a {
        let est = integrate_segments(f, &[Segment::Finite(b, a)], tol)?;
        return Ok(Estimate {
            value: -est.value,
            ..est
        });
    }
    integrate_segments(f, &[Segment::Finite(a, b)], tol)
}

/// Integrates `f` over `[a, ∞)`, with optional interior breakpoints.
pub fn integrate_to_infinity<T, F>(f: F, a: T, breakpoints: &[T], tol: &Tolerance<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let segments = split_half_line(a, breakpoints);
    integrate_segments(f, &segments, tol)
}

/// Segments covering `[a, ∞)`, cut at every breakpoint strictly above `a`.
pub fn split_half_line<T: Real>(a: T, breakpoints: &[T]) -> Vec<Segment<T>> {
    let mut cuts: Vec<T> = breakpoints.iter().copied().filter(|&x| x > a && x.is_finite()).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut segments = Vec::with_capacity(cuts.len() + 1);
    let mut lo = a;
    for c in cuts {
        segments.push(Segment::Finite(lo, c));
        lo = c;
    }
    segments.push(Segment::Tail(lo));
    segments
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_integrates_degree_22_exactly() {
        // A single panel must be exact for x^k, k ≤ 22.
        let tol = Tolerance::<f64>::default();
        let integrand = Integrand {
            f: &|x: f64| x.powi(22) + 3.0 * x.powi(13),
            segments: &[Segment::Finite(0.0, 1.0)],
        };
        let p = integrand.panel(0, 0.0, 1.0).unwrap();
        assert!((p.value - (1.0 / 23.0 + 3.0 / 14.0)).abs() < 1e-15);
        let est = integrate(|x: f64| x.powi(22), -1.0, 1.0, &tol).unwrap();
        assert!((est.value - 2.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        let g: f64 = WG[3] + 2.0 * (WG[0] + WG[1] + WG[2]);
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
        assert!((k - 2.0).abs() < 1e-15);
    }

    #[test]
    fn half_line_gaussian_and_exponential() {
        let tol = Tolerance::<f64>::new(1e-13, 1e-12);
        let g = integrate_to_infinity(|x: f64| (-x * x).exp(), 0.0, &[], &tol).unwrap();
        assert!((g.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
        let e = integrate_to_infinity(|x: f64| x.powi(4) * (-2.0 * x).exp(), 0.0, &[1.0, 3.0], &tol).unwrap();
        assert!((e.value - 24.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn sharp_lorentzian_with_breakpoints() {
        let eps = 1e-5;
        let tol = Tolerance::<f64>::new(1e-13, 1e-11);
        let f = |x: f64| eps / ((x - 1.0).powi(2) + eps * eps) / std::f64::consts::PI;
        let est = integrate_segments(
            f,
            &[
                Segment::Finite(-1.0, 1.0 - 100.0 * eps),
                Segment::Finite(1.0 - 100.0 * eps, 1.0),
                Segment::Finite(1.0, 1.0 + 100.0 * eps),
                Segment::Finite(1.0 + 100.0 * eps, 3.0),
            ],
            &tol,
        )
        .unwrap();
        let exact = 2.0 * (2.0f64 / eps).atan() / std::f64::consts::PI;
        assert!((est.value - exact).abs() < 1e-10, "{} vs {}", est.value, exact);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let tol = Tolerance::<f64>::default();
        let est = integrate(|x: f64| x, 2.0, 0.0, &tol).unwrap();
        assert!((est.value + 2.0).abs() < 1e-14);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let tol = Tolerance::<f64>::default();
        let err = integrate(|_x: f64| f64::NAN, 0.0, 1.0, &tol).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }

    #[test]
    fn subdivision_limit_is_an_error() {
        let tol = Tolerance {
            abs: 1e-14,
            rel: 1e-14,
            max_subdivisions: 3,
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &tol).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { reason: "subdivision limit reached", .. }));
    }

    #[test]
    fn single_precision_meets_clamped_tolerance() {
        let tol = Tolerance::<f32>::default();
        let est = integrate_to_infinity(|x: f32| (-x).exp(), 0.0, &[], &tol).unwrap();
        assert!((est.value - 1.0).abs() < 1e-5);
    }
}
