//! Exact unitary evolution on the truncated space and the partial trace.

use decoherence::{Provenance, ReducedDensityMatrix64, TimeSeries64};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{OracleError, Result};
use crate::hamiltonian::{Hamiltonian, ThermalBathState};

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;

/// Density matrix of qubit plus bath.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    matrix: DMatrix<Complex64>,
}

impl FullState {
    /// Validates squareness, hermiticity (`1e-12`) and unit trace (`1e-10`).
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(OracleError::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let state = Self { matrix };
        let defect = state.hermiticity_defect();
        if !(defect <= HERMITICITY_TOL) {
            return Err(OracleError::PreconditionViolation(format!("state is not hermitian (defect {defect:e})")));
        }
        let tr = state.trace();
        if !((tr - Complex64::new(1.0, 0.0)).norm() <= TRACE_TOL) {
            return Err(OracleError::PreconditionViolation(format!("state trace is {tr}, expected 1")));
        }
        Ok(state)
    }

    /// `ρ_S ⊗ ρ_B` for a diagonal bath state.
    pub fn product(rho_s: &ReducedDensityMatrix64, bath: &ThermalBathState) -> Self {
        let p = bath.populations();
        let nb = p.len();
        let mut m = DMatrix::<Complex64>::zeros(2 * nb, 2 * nb);
        for qa in 0..2 {
            for qb in 0..2 {
                let s = rho_s.matrix()[qa][qb];
                for (k, &pk) in p.iter().enumerate() {
                    m[(qa * nb + k, qb * nb + k)] = s * pk;
                }
            }
        }
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.matrix[(r, c)] - self.matrix[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the (hermitian) state, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Partial trace over the bath.
pub fn reduce(rho: &FullState) -> Result<ReducedDensityMatrix64> {
    let n = rho.dim();
    if n == 0 || n % 2 != 0 {
        return Err(OracleError::DimensionMismatch { expected: 2 * (n / 2).max(1), found: n });
    }
    let nb = n / 2;
    let m = rho.matrix();
    let block = |qa: usize, qb: usize| (0..nb).map(|k| m[(qa * nb + k, qb * nb + k)]).sum::<Complex64>();
    let r11 = block(0, 0).re;
    let r22 = block(1, 1).re;
    let r12 = (block(0, 1) + block(1, 0).conj()) * 0.5;
    let z = 0.0;
    Ok(ReducedDensityMatrix64::from_raw([
        [Complex64::new(r11, z), r12],
        [r12.conj(), Complex64::new(r22, z)],
    ]))
}

/// Eigenvectors stored as real and imaginary parts.
#[derive(Debug, Clone)]
struct SplitMatrix {
    re: DMatrix<f64>,
    im: Option<DMatrix<f64>>,
}

impl SplitMatrix {
    fn rows(&self, start: usize, len: usize) -> SplitMatrix {
        SplitMatrix {
            re: self.re.rows(start, len).into_owned(),
            im: self.im.as_ref().map(|m| m.rows(start, len).into_owned()),
        }
    }

    fn scale_rows(&self, w: &[f64]) -> SplitMatrix {
        let scale = |m: &DMatrix<f64>| {
            let mut out = m.clone();
            for (r, &wr) in w.iter().enumerate() {
                out.row_mut(r).scale_mut(wr);
            }
            out
        };
        SplitMatrix { re: scale(&self.re), im: self.im.as_ref().map(scale) }
    }

    /// `self† · other`.
    fn adjoint_mul(&self, other: &SplitMatrix) -> SplitMatrix {
        // An explicit transpose lets the product go through the blocked kernel.
        let mul = |a: &DMatrix<f64>, b: &DMatrix<f64>| a.transpose() * b;
        let mut re = mul(&self.re, &other.re);
        let im = match (&self.im, &other.im) {
            (None, None) => None,
            (None, Some(oi)) => Some(mul(&self.re, oi)),
            (Some(si), None) => Some(-mul(si, &other.re)),
            (Some(si), Some(oi)) => {
                re += mul(si, oi);
                Some(mul(&self.re, oi) - mul(si, &other.re))
            }
        };
        SplitMatrix { re, im }
    }

    fn to_complex(&self) -> DMatrix<Complex64> {
        match &self.im {
            None => self.re.map(|x| Complex64::new(x, 0.0)),
            Some(im) => self.re.zip_map(im, Complex64::new),
        }
    }
}

/// Eigendecomposition of `H`, reused for every time.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    energies: Vec<f64>,
    vectors: SplitMatrix,
}

impl ExactPropagator {
    /// Real symmetric solver when `H` is real, complex hermitian otherwise.
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        let n = h.dim();
        let max_iter = 1000 * n.max(1);
        let (energies, vectors) = if h.is_real() {
            let eig = h
                .real_part()
                .try_symmetric_eigen(f64::EPSILON, max_iter)
                .ok_or_else(|| OracleError::EigendecompositionFailure(format!("no convergence for n = {n}")))?;
            (eig.eigenvalues, SplitMatrix { re: eig.eigenvectors, im: None })
        } else {
            let eig = h
                .matrix()
                .clone()
                .try_symmetric_eigen(f64::EPSILON, max_iter)
                .ok_or_else(|| OracleError::EigendecompositionFailure(format!("no convergence for n = {n}")))?;
            let v = eig.eigenvectors;
            (eig.eigenvalues, SplitMatrix { re: v.map(|z| z.re), im: Some(v.map(|z| z.im)) })
        };
        if energies.iter().any(|e| !e.is_finite()) || vectors.re.iter().any(|x| !x.is_finite()) {
            return Err(OracleError::EigendecompositionFailure("non-finite eigenpairs".to_string()));
        }
        Ok(Self { energies: energies.iter().copied().collect(), vectors })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn eigenvectors(&self) -> DMatrix<Complex64> {
        self.vectors.to_complex()
    }

    /// `e^{−iHt} ρ₀ e^{iHt}`, re-symmetrized; `t = 0` returns `ρ₀` unchanged.
    pub fn evolve(&self, rho0: &FullState, t: f64) -> Result<FullState> {
        if rho0.dim() != self.dim() {
            return Err(OracleError::DimensionMismatch { expected: self.dim(), found: rho0.dim() });
        }
        if t == 0.0 {
            return Ok(rho0.clone());
        }
        let v = self.vectors.to_complex();
        let mut vp = v.clone();
        for (c, &e) in self.energies.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -e * t);
            vp.column_mut(c).iter_mut().for_each(|z| *z *= ph);
        }
        let u = &vp * v.adjoint();
        let rho = &u * rho0.matrix() * u.adjoint();
        let sym = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(FullState { matrix: sym })
    }

    /// Reduced state along `times` for the initial product `ρ_S ⊗ ρ_B`,
    /// without forming the full state at each time.
    pub fn reduced_trajectory(
        &self,
        rho_s0: &ReducedDensityMatrix64,
        bath: &ThermalBathState,
        times: &[f64],
    ) -> Result<TimeSeries64> {
        let nb = bath.populations().len();
        if 2 * nb != self.dim() {
            return Err(OracleError::DimensionMismatch { expected: self.dim(), found: 2 * nb });
        }
        decoherence::dynamics::check_grid(times)?;
        let blocks = [self.vectors.rows(0, nb), self.vectors.rows(nb, nb)];
        let weighted = [blocks[0].scale_rows(bath.populations()), blocks[1].scale_rows(bath.populations())];

        // ρ̃ = V† (ρ_S ⊗ P) V
        let mut rho_t = DMatrix::<Complex64>::zeros(self.dim(), self.dim());
        for qa in 0..2 {
            for qb in 0..2 {
                let s = rho_s0.matrix()[qa][qb];
                if s != Complex64::new(0.0, 0.0) {
                    rho_t += blocks[qa].adjoint_mul(&weighted[qb]).to_complex() * s;
                }
            }
        }
        let entries = [(0usize, 0usize), (0, 1), (1, 1)];
        let series: Vec<Vec<Complex64>> = entries
            .par_iter()
            .map(|&(m, n)| {
                // Õ = V†(|n⟩⟨m| ⊗ 1)V and W_kl = ρ̃_kl Õ_lk.
                let o = blocks[n].adjoint_mul(&blocks[m]).to_complex();
                let w = rho_t.component_mul(&o.transpose());
                self.sandwich_series(&w, times)
            })
            .collect();

        let states = (0..times.len())
            .map(|i| {
                let r12 = series[1][i];
                ReducedDensityMatrix64::from_raw([
                    [Complex64::new(series[0][i].re, 0.0), r12],
                    [r12.conj(), Complex64::new(series[2][i].re, 0.0)],
                ])
            })
            .collect();
        Ok(TimeSeries64::new(times.to_vec(), states, Provenance::Oracle)?)
    }

    /// `Σ_kl e^{−iE_k t} W_kl e^{iE_l t}` for each `t`.
    ///
    /// Evaluated with real products only: with `W = A + iB` and
    /// `e^{iE_l t} = C + iS`, `W e^{iEt} = (AC − BS) + i(AS + BC)`.
    fn sandwich_series(&self, w: &DMatrix<Complex64>, times: &[f64]) -> Vec<Complex64> {
        let n = self.dim();
        let cos = DMatrix::<f64>::from_fn(n, times.len(), |k, i| (self.energies[k] * times[i]).cos());
        let sin = DMatrix::<f64>::from_fn(n, times.len(), |k, i| (self.energies[k] * times[i]).sin());
        let a = w.map(|z| z.re);
        let (x, y) = if w.iter().all(|z| z.im == 0.0) {
            (&a * &cos, &a * &sin)
        } else {
            let b = w.map(|z| z.im);
            (&a * &cos - &b * &sin, &a * &sin + &b * &cos)
        };
        (0..times.len())
            .map(|i| {
                let (c, s, x, y) = (cos.column(i), sin.column(i), x.column(i), y.column(i));
                let re = c.dot(&x) + s.dot(&y);
                let im = c.dot(&y) - s.dot(&x);
                Complex64::new(re, im)
            })
            .collect()
    }
}

/// `ρ_t = e^{−iHt} ρ₀ e^{iHt}` from a fresh eigendecomposition.
pub fn evolve_exact(h: &Hamiltonian, rho0: &FullState, t: f64) -> Result<FullState> {
    ExactPropagator::new(h)?.evolve(rho0, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{discretize, TruncatedFockSpace};
    use crate::hamiltonian::{build_hamiltonian, thermal_bath_state};
    use decoherence::{FormFactor64, InitialState, QubitSystem64, UvExponent};
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup(cc: Complex64, modes: usize, n_max: usize, lambda: f64) -> (Hamiltonian, ThermalBathState) {
        let ff = FormFactor64::parametric(1, UvExponent::Linear);
        let bath = discretize(&ff, modes, 6.0).unwrap();
        let fock = TruncatedFockSpace::new(modes, n_max).unwrap();
        let q = QubitSystem64::new(1.0, 0.2, -0.4, cc).unwrap();
        let h = build_hamiltonian(&q, &bath, &fock, lambda).unwrap();
        (h, thermal_bath_state(&bath, &fock, 1.0).unwrap())
    }

    fn illustration() -> ReducedDensityMatrix64 {
        InitialState::IllustrationCoherent.density_matrix().unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let (h, b) = setup(c(0.6, 0.0), 2, 2, 0.3);
        let rho0 = FullState::product(&illustration(), &b);
        assert_eq!(evolve_exact(&h, &rho0, 0.0).unwrap(), rho0);
    }

    #[test]
    fn stationary_states_do_not_move() {
        let (h, _) = setup(c(0.6, 0.2), 2, 2, 0.3);
        let prop = ExactPropagator::new(&h).unwrap();
        // A function of H commutes with H.
        let v = prop.eigenvectors();
        let w = DVector::from_iterator(h.dim(), prop.energies().iter().map(|e| c((-e).exp(), 0.0)));
        let z: Complex64 = w.iter().sum();
        let rho = &v * DMatrix::from_diagonal(&(w / z)) * v.adjoint();
        let rho0 = FullState::new((&rho + rho.adjoint()) * c(0.5, 0.0)).unwrap();
        let rho_t = prop.evolve(&rho0, 3.7).unwrap();
        let diff = (rho_t.matrix() - rho0.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn unitary_invariants_hold() {
        let (h, b) = setup(c(0.6, -0.3), 2, 3, 0.5);
        let prop = ExactPropagator::new(&h).unwrap();
        let rho0 = FullState::product(&illustration(), &b);
        let spec0 = rho0.spectrum();
        for t in [0.3, 2.0, 11.0] {
            let rho = prop.evolve(&rho0, t).unwrap();
            assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-10);
            assert!(rho.hermiticity_defect() == 0.0);
            let spec = rho.spectrum();
            let gap = spec.iter().zip(&spec0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(gap < 1e-10);
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let (_, b) = setup(c(0.0, 0.0), 2, 2, 0.0);
        let rho_s = ReducedDensityMatrix64::hermitian(0.3, c(0.2, -0.1));
        let reduced = reduce(&FullState::product(&rho_s, &b)).unwrap();
        assert!(reduced.max_abs_diff(&rho_s) < 1e-15);
        assert!((reduced.trace() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_of_entangled_state() {
        // (|0,0⟩ + |1,1⟩)/√2 with a two-level mode.
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        for &(r, cc) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(r, cc)] = c(0.5, 0.0);
        }
        let reduced = reduce(&FullState::new(m).unwrap()).unwrap();
        assert_eq!(*reduced.matrix(), [[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]]);
    }

    #[test]
    fn malformed_states_are_rejected() {
        let m = DMatrix::<Complex64>::from_element(3, 3, c(1.0 / 3.0, 0.0));
        assert!(matches!(reduce(&FullState { matrix: m.clone() }), Err(OracleError::DimensionMismatch { .. })));
        let mut bad = DMatrix::<Complex64>::identity(2, 2) * c(0.5, 0.0);
        bad[(0, 1)] = c(0.1, 0.0);
        assert!(FullState::new(bad).is_err());
        assert!(FullState::new(DMatrix::<Complex64>::identity(2, 2)).is_err());
    }

    #[test]
    fn fast_trajectory_matches_full_evolution() {
        for cc in [c(0.7, 0.0), c(0.5, 0.4)] {
            let (h, b) = setup(cc, 3, 2, 0.4);
            let prop = ExactPropagator::new(&h).unwrap();
            let rho_s = illustration();
            let rho0 = FullState::product(&rho_s, &b);
            let times = [0.0, 0.4, 1.3, 5.0];
            let fast = prop.reduced_trajectory(&rho_s, &b, &times).unwrap();
            assert_eq!(fast.provenance(), Provenance::Oracle);
            for (t, state) in fast.iter() {
                let slow = reduce(&prop.evolve(&rho0, t).unwrap()).unwrap();
                assert!(state.max_abs_diff(&slow) < 1e-12, "t={t}: {}", state.max_abs_diff(&slow));
            }
        }
    }
}
