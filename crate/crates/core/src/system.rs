//! Finite-dimensional system: energy levels, Bohr frequencies, and the qubit
//! coupling matrix in the energy basis.

use num_complex::Complex;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

/// Hermitian 2×2 matrix stored row-major.
pub type Matrix2<T> = [[Complex<T>; 2]; 2];

/// Gap below which a two-level Hamiltonian is treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-12;

/// N-level system with sorted energies and a hermitian coupling matrix in the
/// energy eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct NLevelSystem<T> {
    energies: Vec<T>,
    coupling: Vec<Complex<T>>,
}

impl<T: Real> NLevelSystem<T> {
    /// `coupling` is row-major `N×N`.
    pub fn new(energies: Vec<T>, coupling: Vec<Complex<T>>) -> Result<Self> {
        let n = energies.len();
        if n < 2 {
            return Err(Error::invalid("system.energies", format!("need at least two levels, got {n}")));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::invalid("system.energies", "energies must be finite"));
        }
        if energies.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("system.energies", "energies must be sorted ascending"));
        }
        if coupling.len() != n * n {
            return Err(Error::invalid(
                "system.coupling",
                format!("expected {} entries for N = {n}, got {}", n * n, coupling.len()),
            ));
        }
        for i in 0..n {
            for j in 0..=i {
                let (x, y) = (coupling[i * n + j], coupling[j * n + i]);
                if !x.re.is_finite() || !x.im.is_finite() || x != y.conj() {
                    return Err(Error::invalid(
                        "system.coupling",
                        format!("entry ({}, {}) breaks hermiticity", i + 1, j + 1),
                    ));
                }
            }
        }
        Ok(Self { energies, coupling })
    }

    /// Decoupled system (`G = 0`).
    pub fn uncoupled(energies: Vec<T>) -> Result<Self> {
        let n = energies.len();
        Self::new(energies, vec![Complex::zero(); n * n])
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    /// `G_{mn}` with 1-based indices.
    pub fn coupling(&self, m: usize, n: usize) -> Complex<T> {
        self.coupling[(m - 1) * self.dim() + (n - 1)]
    }

    /// `10⁻⁹ · max|E|`.
    pub fn default_degeneracy_tol(&self) -> T {
        let scale = self.energies.iter().fold(T::zero(), |acc, e| acc.max(e.abs()));
        T::lit(1e-9) * scale
    }
}

/// One Bohr frequency `e` and the index pairs `I_e = {(m, n) : E_m − E_n = e}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BohrClass<S> {
    pub frequency: S,
    /// 1-based `(m, n)`, sorted lexicographically.
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BohrSpectrum<S> {
    classes: Vec<BohrClass<S>>,
}

impl<S: Clone + PartialEq> BohrSpectrum<S> {
    /// Classes in ascending frequency.
    pub fn classes(&self) -> &[BohrClass<S>] {
        &self.classes
    }

    pub fn frequencies(&self) -> Vec<S> {
        self.classes.iter().map(|c| c.frequency.clone()).collect()
    }

    /// Index set of the class whose representative equals `e`.
    pub fn pairs(&self, e: &S) -> Option<&[(usize, usize)]> {
        self.classes.iter().find(|c| c.frequency == *e).map(|c| c.pairs.as_slice())
    }
}

/// Bohr spectrum of an [`NLevelSystem`].
pub fn bohr_spectrum<T: Real + Signed>(sys: &NLevelSystem<T>, degeneracy_tol: T) -> Result<BohrSpectrum<T>> {
    bohr_spectrum_of(sys.energies(), degeneracy_tol)
}

/// Groups `E_m − E_n` into classes.
///
/// Differences are sorted and chained whenever neighbours are within `tol`.
/// A chain spanning more than `2·tol` cannot be split unambiguously and is
/// rejected. Each class is labelled by the midpoint of its extreme members,
/// which keeps the spectrum exactly symmetric under negation. Works for any
/// signed ordered scalar, including exact rationals with `tol = 0`.
pub fn bohr_spectrum_of<S>(energies: &[S], tol: S) -> Result<BohrSpectrum<S>>
where
    S: Signed + PartialOrd + Clone + ToPrimitive,
{
    if tol < S::zero() {
        return Err(Error::invalid("degeneracy_tol", "must be nonnegative"));
    }
    let n = energies.len();
    let mut diffs: Vec<(S, (usize, usize))> = Vec::with_capacity(n * n);
    for m in 0..n {
        for k in 0..n {
            diffs.push((energies[m].clone() - energies[k].clone(), (m + 1, k + 1)));
        }
    }
    diffs.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("energies must be comparable"));

    let two = S::one() + S::one();
    let mut classes = Vec::new();
    let mut start = 0;
    for i in 1..=diffs.len() {
        let split = i == diffs.len() || (diffs[i].0.clone() - diffs[i - 1].0.clone()) > tol;
        if !split {
            continue;
        }
        let lo = diffs[start].0.clone();
        let hi = diffs[i - 1].0.clone();
        let span = hi.clone() - lo.clone();
        if span > tol.clone() * two.clone() {
            let f = |x: &S| x.to_f64().unwrap_or(f64::NAN);
            return Err(Error::AmbiguousClustering {
                near: f(&((lo.clone() + hi.clone()) / two.clone())),
                span: f(&span),
                tolerance: f(&tol),
            });
        }
        let mut pairs: Vec<_> = diffs[start..i].iter().map(|d| d.1).collect();
        pairs.sort_unstable();
        classes.push(BohrClass { frequency: (lo + hi) / two.clone(), pairs });
        start = i;
    }
    Ok(BohrSpectrum { classes })
}

/// Two-level system with gap `Δ = E₂ − E₁` and coupling `[[a, c], [c̄, b]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSystem<T> {
    delta: T,
    a: T,
    b: T,
    c: Complex<T>,
}

impl<T: Real> QubitSystem<T> {
    pub fn new(delta: T, a: T, b: T, c: Complex<T>) -> Result<Self> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(Error::invalid("qubit.Delta", format!("must be positive and finite, got {delta}")));
        }
        if !a.is_finite() {
            return Err(Error::invalid("qubit.a", "must be finite"));
        }
        if !b.is_finite() {
            return Err(Error::invalid("qubit.b", "must be finite"));
        }
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::invalid("qubit.c", "must be finite"));
        }
        Ok(Self { delta, a, b, c })
    }

    /// Convenience constructor for real `c`.
    pub fn real(delta: T, a: T, b: T, c: T) -> Result<Self> {
        Self::new(delta, a, b, Complex::new(c, T::zero()))
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn c(&self) -> Complex<T> {
        self.c
    }

    pub fn c_norm_sqr(&self) -> T {
        self.c.norm_sqr()
    }

    pub fn coupling_matrix(&self) -> Matrix2<T> {
        let z = T::zero();
        [[Complex::new(self.a, z), self.c], [self.c.conj(), Complex::new(self.b, z)]]
    }

    /// The same system with `c` replaced.
    pub fn with_c(self, c: Complex<T>) -> Result<Self> {
        Self::new(self.delta, self.a, self.b, c)
    }

    /// As an [`NLevelSystem`] with `E₁ = 0`, `E₂ = Δ`.
    pub fn to_n_level(&self) -> NLevelSystem<T> {
        let g = self.coupling_matrix();
        NLevelSystem {
            energies: vec![T::zero(), self.delta],
            coupling: vec![g[0][0], g[0][1], g[1][0], g[1][1]],
        }
    }
}

/// Spin-boson system Hamiltonian `½(ε σ_z − ħΔ₀ σ_x)` coupled through `σ_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinBosonParams<T> {
    epsilon: T,
    delta0: T,
    hbar: T,
}

impl<T: Real> SpinBosonParams<T> {
    pub fn new(epsilon: T, delta0: T) -> Result<Self> {
        Self::with_hbar(epsilon, delta0, T::one())
    }

    pub fn with_hbar(epsilon: T, delta0: T, hbar: T) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::invalid("spin_boson.epsilon", "must be finite"));
        }
        if !(delta0 >= T::zero()) || !delta0.is_finite() {
            return Err(Error::invalid("spin_boson.Delta0", format!("must be finite and nonnegative, got {delta0}")));
        }
        if !(hbar > T::zero()) || !hbar.is_finite() {
            return Err(Error::invalid("spin_boson.hbar", format!("must be positive and finite, got {hbar}")));
        }
        Ok(Self { epsilon, delta0, hbar })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn delta0(&self) -> T {
        self.delta0
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// `H_S` in the localized (left/right well) basis.
    pub fn hamiltonian(&self) -> Matrix2<T> {
        let h = T::half();
        let t = -h * self.hbar * self.delta0;
        let z = T::zero();
        [
            [Complex::new(h * self.epsilon, z), Complex::new(t, z)],
            [Complex::new(t, z), Complex::new(-h * self.epsilon, z)],
        ]
    }
}

/// `σ_z`, the spin-boson coupling operator in the localized basis.
pub fn sigma_z<T: Real>() -> Matrix2<T> {
    let (o, z) = (T::one(), T::zero());
    [[Complex::new(o, z), Complex::zero()], [Complex::zero(), Complex::new(-o, z)]]
}

/// Qubit parameters of the spin-boson model in its energy basis.
///
/// `Δ = √(ε² + ħ²Δ₀²)`, `a = −b = −ε/Δ`, `c = ħΔ₀/Δ`: the entries of `σ_z`
/// rotated into the eigenbasis of `H_S`, with `c ≥ 0`.
pub fn spin_boson_to_qubit<T: Real>(sb: &SpinBosonParams<T>) -> Result<QubitSystem<T>> {
    let tunnel = sb.hbar * sb.delta0;
    if sb.epsilon == T::zero() && tunnel == T::zero() {
        return Err(Error::DegenerateSystem(
            "spin-boson model with zero bias and zero tunneling has a degenerate spectrum".to_string(),
        ));
    }
    if tunnel == T::zero() {
        let s = sb.epsilon.signum();
        return QubitSystem::real(sb.epsilon.abs(), -s, s, T::zero());
    }
    if sb.epsilon == T::zero() {
        return QubitSystem::real(tunnel, T::zero(), T::zero(), T::one());
    }
    let delta = sb.epsilon.hypot(tunnel);
    let a = -sb.epsilon / delta;
    QubitSystem::real(delta, a, -a, tunnel / delta)
}

fn check_hermitian<T: Real>(m: &Matrix2<T>, field: &'static str) -> Result<()> {
    let scale = m.iter().flatten().fold(T::one(), |acc, z| acc.max(z.norm()));
    let tol = T::lit(1e-12) * scale;
    let finite = m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite());
    if !finite
        || m[0][0].im.abs() > tol
        || m[1][1].im.abs() > tol
        || (m[0][1] - m[1][0].conj()).norm() > tol
    {
        return Err(Error::invalid(field, "matrix must be finite and hermitian"));
    }
    Ok(())
}

/// Diagonalizes `H`, rotates `G` into its eigenbasis and reads off `(Δ, a, b, c)`.
///
/// The excited eigenvector absorbs the phase that makes `c` real and
/// nonnegative.
pub fn qubit_from_matrices<T: Real>(h: &Matrix2<T>, g: &Matrix2<T>) -> Result<QubitSystem<T>> {
    check_hermitian(h, "H")?;
    check_hermitian(g, "G")?;
    let d = T::half() * (h[0][0].re - h[1][1].re);
    let off = h[0][1];
    let off_abs = off.norm();
    let r = d.hypot(off_abs);
    let delta = T::two() * r;
    if !(delta >= T::lit(DEGENERACY_GAP)) {
        return Err(Error::DegenerateSystem(format!(
            "gap {} below {DEGENERACY_GAP:e}",
            to_f64(delta)
        )));
    }
    // cos(θ/2), sin(θ/2) with cos θ = d/r, avoiding cancellation on either side.
    let two_r = T::two() * r;
    let (ch, sh) = if d >= T::zero() {
        let ch = ((r + d) / two_r).sqrt();
        (ch, off_abs / (two_r * ch))
    } else {
        let sh = ((r - d) / two_r).sqrt();
        (off_abs / (two_r * sh), sh)
    };
    // e^{iφ} = conj(H₁₂)/|H₁₂|
    let phase = if off_abs > T::zero() {
        off.conj() / off_abs
    } else {
        Complex::new(T::one(), T::zero())
    };
    let ground = [-(phase.conj() * sh), Complex::new(ch, T::zero())];
    let excited = [Complex::new(ch, T::zero()), phase * sh];

    let sandwich = |u: &[Complex<T>; 2], v: &[Complex<T>; 2]| {
        let mut acc = Complex::zero();
        for i in 0..2 {
            for j in 0..2 {
                acc = acc + u[i].conj() * g[i][j] * v[j];
            }
        }
        acc
    };
    let a = sandwich(&ground, &ground).re;
    let b = sandwich(&excited, &excited).re;
    let c = sandwich(&ground, &excited).norm();
    QubitSystem::real(delta, a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn cplx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn real_matrix(m: [[f64; 2]; 2]) -> Matrix2<f64> {
        [[cplx(m[0][0], 0.0), cplx(m[0][1], 0.0)], [cplx(m[1][0], 0.0), cplx(m[1][1], 0.0)]]
    }

    #[test]
    fn qubit_bohr_spectrum() {
        let sys = NLevelSystem::uncoupled(vec![0.0, 1.0]).unwrap();
        let bs = bohr_spectrum(&sys, 0.0).unwrap();
        assert_eq!(bs.frequencies(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(bs.pairs(&0.0).unwrap(), &[(1, 1), (2, 2)]);
        assert_eq!(bs.pairs(&1.0).unwrap(), &[(2, 1)]);
        assert_eq!(bs.pairs(&-1.0).unwrap(), &[(1, 2)]);
    }

    #[test]
    fn equally_spaced_ladder_has_degenerate_bohr_frequencies() {
        let e: Vec<Rational64> = (0..3).map(Rational64::from_integer).collect();
        let bs = bohr_spectrum_of(&e, Rational64::from_integer(0)).unwrap();
        let expected: Vec<Rational64> = (-2..=2).map(Rational64::from_integer).collect();
        assert_eq!(bs.frequencies(), expected);
        assert_eq!(bs.pairs(&Rational64::from_integer(1)).unwrap(), &[(2, 1), (3, 2)]);
    }

    #[test]
    fn fully_degenerate_levels() {
        let bs = bohr_spectrum_of(&[0.0, 0.0], 0.0).unwrap();
        assert_eq!(bs.frequencies(), vec![0.0]);
        assert_eq!(bs.pairs(&0.0).unwrap(), &[(1, 1), (1, 2), (2, 1), (2, 2)]);
    }

    #[test]
    fn rational_levels_cluster_exactly() {
        let e = [Rational64::new(0, 1), Rational64::new(1, 3), Rational64::new(2, 3)];
        let bs = bohr_spectrum_of(&e, Rational64::from_integer(0)).unwrap();
        assert_eq!(bs.pairs(&Rational64::new(1, 3)).unwrap(), &[(2, 1), (3, 2)]);
    }

    #[test]
    fn clustering_within_tolerance_and_ambiguity() {
        let bs = bohr_spectrum_of(&[0.0, 1.0, 2.0 + 1e-12], 1e-9).unwrap();
        assert_eq!(bs.classes().len(), 5);
        assert_eq!(bs.classes()[3].pairs, vec![(2, 1), (3, 2)]);
        // A chain of near neighbours wider than twice the tolerance.
        let err = bohr_spectrum_of(&[0.0, 1.0, 2.4, 4.2, 6.4], 0.5).unwrap_err();
        assert!(matches!(err, Error::AmbiguousClustering { .. }));
    }

    #[test]
    fn n_level_validation() {
        assert!(NLevelSystem::uncoupled(vec![1.0, 0.0]).is_err());
        assert!(NLevelSystem::uncoupled(vec![0.0]).is_err());
        let nonhermitian = vec![cplx(0.0, 0.0), cplx(1.0, 1.0), cplx(1.0, 1.0), cplx(0.0, 0.0)];
        assert!(NLevelSystem::new(vec![0.0, 1.0], nonhermitian).is_err());
        let q = QubitSystem::new(1.0, 0.2, -0.3, cplx(0.5, -0.1)).unwrap();
        let n = q.to_n_level();
        assert_eq!(n.coupling(1, 2), cplx(0.5, -0.1));
        assert_eq!(n.coupling(2, 1), cplx(0.5, 0.1));
    }

    #[test]
    fn qubit_validation() {
        assert!(QubitSystem::real(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(QubitSystem::real(-1.0, 0.0, 0.0, 1.0).is_err());
        assert!(QubitSystem::real(1.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn spin_boson_symmetric_well() {
        let q = spin_boson_to_qubit(&SpinBosonParams::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!((q.delta(), q.a(), q.b()), (1.0, 0.0, 0.0));
        assert_eq!(q.c(), cplx(1.0, 0.0));
    }

    #[test]
    fn spin_boson_without_tunneling_is_pure_dephasing() {
        let q = spin_boson_to_qubit(&SpinBosonParams::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!((q.delta(), q.a(), q.b()), (1.0, -1.0, 1.0));
        assert_eq!(q.c(), cplx(0.0, 0.0));
        let q = spin_boson_to_qubit(&SpinBosonParams::new(-2.0, 0.0).unwrap()).unwrap();
        assert_eq!((q.delta(), q.a(), q.b()), (2.0, 1.0, -1.0));
    }

    #[test]
    fn spin_boson_generic_point() {
        let q = spin_boson_to_qubit(&SpinBosonParams::new(1.0, 1.0).unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((q.delta() - 2f64.sqrt()).abs() < 1e-15);
        assert!((q.a() + s).abs() < 1e-15 && (q.b() - s).abs() < 1e-15);
        assert!((q.c().re - s).abs() < 1e-15);
        // σ_z keeps its spectrum {±1} under the change of basis.
        assert!((q.a() * q.a() + q.c_norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spin_boson_rejects_degenerate_point() {
        let sb = SpinBosonParams::new(0.0, 0.0).unwrap();
        assert!(matches!(spin_boson_to_qubit(&sb), Err(Error::DegenerateSystem(_))));
        assert!(SpinBosonParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn matrices_already_in_energy_basis() {
        let q = qubit_from_matrices(&real_matrix([[0.0, 0.0], [0.0, 1.0]]), &real_matrix([[0.0, 1.0], [1.0, 0.0]])).unwrap();
        assert_eq!((q.delta(), q.a(), q.b()), (1.0, 0.0, 0.0));
        assert_eq!(q.c(), cplx(1.0, 0.0));
    }

    #[test]
    fn identity_coupling_is_invariant() {
        let h = [[cplx(0.3, 0.0), cplx(0.2, -0.7)], [cplx(0.2, 0.7), cplx(-1.1, 0.0)]];
        let id = real_matrix([[1.0, 0.0], [0.0, 1.0]]);
        let q = qubit_from_matrices(&h, &id).unwrap();
        assert!((q.a() - 1.0).abs() < 1e-15 && (q.b() - 1.0).abs() < 1e-15);
        assert!(q.c().norm() < 1e-15);
    }

    #[test]
    fn matrix_path_matches_spin_boson_map() {
        let sb = SpinBosonParams::new(1.0, 1.0).unwrap();
        let direct = spin_boson_to_qubit(&sb).unwrap();
        let rotated = qubit_from_matrices(&sb.hamiltonian(), &sigma_z()).unwrap();
        assert!((direct.delta() - rotated.delta()).abs() < 1e-12);
        assert!((direct.a() - rotated.a()).abs() < 1e-12);
        assert!((direct.b() - rotated.b()).abs() < 1e-12);
        assert!((direct.c() - rotated.c()).norm() < 1e-12);
    }

    #[test]
    fn degenerate_hamiltonian_is_rejected() {
        let h = real_matrix([[2.0, 0.0], [0.0, 2.0]]);
        let g = real_matrix([[1.0, 0.0], [0.0, -1.0]]);
        assert!(matches!(qubit_from_matrices(&h, &g), Err(Error::DegenerateSystem(_))));
        let nonhermitian = real_matrix([[0.0, 1.0], [0.0, 1.0]]);
        assert!(qubit_from_matrices(&nonhermitian, &g).is_err());
    }

    #[test]
    fn complex_coupling_phase_is_absorbed() {
        let h = real_matrix([[0.0, 0.0], [0.0, 1.0]]);
        let g = [[cplx(0.5, 0.0), cplx(0.0, -0.3)], [cplx(0.0, 0.3), cplx(-0.5, 0.0)]];
        let q = qubit_from_matrices(&h, &g).unwrap();
        assert!((q.c() - cplx(0.3, 0.0)).norm() < 1e-15);
        assert!((q.a() - 0.5).abs() < 1e-15 && (q.b() + 0.5).abs() < 1e-15);
    }
}
