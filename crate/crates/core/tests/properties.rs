use decoherence::system::sigma_z;
use decoherence::{
    bohr_spectrum_of, evolve_leading, qubit_from_matrices, qubit_resonances, spin_boson_to_qubit, xi, FormFactor64,
    InitialState64, QubitSystem64, ReservoirSpec64, SpinBosonParams64, UvExponent,
};
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

fn uv() -> impl Strategy<Value = UvExponent> {
    prop_oneof![Just(UvExponent::Linear), Just(UvExponent::Quadratic)]
}

fn shifted(h: &[[Complex64; 2]; 2], s: f64) -> [[Complex64; 2]; 2] {
    let mut out = *h;
    out[0][0] += s;
    out[1][1] += s;
    out
}

proptest! {
    #[test]
    fn spin_boson_map_matches_matrix_route(eps in -3.0f64..3.0, d0 in 0.0f64..3.0, hbar in 0.2f64..3.0) {
        prop_assume!(eps.abs() + d0 > 1e-3);
        let sb = SpinBosonParams64::with_hbar(eps, d0, hbar).unwrap();
        let q = spin_boson_to_qubit(&sb).unwrap();
        let r = qubit_from_matrices(&sb.hamiltonian(), &sigma_z()).unwrap();
        prop_assert!((q.delta() - r.delta()).abs() < 1e-12);
        prop_assert!((q.a().abs() - r.a().abs()).abs() < 1e-12);
        prop_assert!((q.b().abs() - r.b().abs()).abs() < 1e-12);
        prop_assert!((q.c().norm() - r.c().norm()).abs() < 1e-12);
    }

    #[test]
    fn matrix_route_ignores_energy_shifts(
        h00 in -2.0f64..2.0, h11 in -2.0f64..2.0, hr in -1.0f64..1.0, hi in -1.0f64..1.0,
        g00 in -1.0f64..1.0, g11 in -1.0f64..1.0, gr in -1.0f64..1.0, gi in -1.0f64..1.0,
        s in -10.0f64..10.0,
    ) {
        let h = [[Complex64::new(h00, 0.0), Complex64::new(hr, hi)], [Complex64::new(hr, -hi), Complex64::new(h11, 0.0)]];
        let g = [[Complex64::new(g00, 0.0), Complex64::new(gr, gi)], [Complex64::new(gr, -gi), Complex64::new(g11, 0.0)]];
        prop_assume!((h00 - h11).hypot(2.0 * hr.hypot(hi)) > 1e-3);
        let q = qubit_from_matrices(&h, &g).unwrap();
        let r = qubit_from_matrices(&shifted(&h, s), &g).unwrap();
        let tol = 1e-10 * (1.0 + s.abs());
        prop_assert!(q.c().re >= 0.0 && q.c().im == 0.0);
        prop_assert!((q.delta() - r.delta()).abs() < tol);
        prop_assert!((q.a().abs() - r.a().abs()).abs() < tol);
        prop_assert!((q.b().abs() - r.b().abs()).abs() < tol);
        prop_assert!((q.c().norm() - r.c().norm()).abs() < tol);
    }

    #[test]
    fn bohr_pairs_are_mirrored(levels in prop::collection::vec(-20i64..20, 1..7)) {
        let energies: Vec<Rational64> = levels.iter().map(|&n| Rational64::new(n, 3)).collect();
        let spec = bohr_spectrum_of(&energies, Rational64::from_integer(0)).unwrap();
        for class in spec.classes() {
            let mirror = spec.pairs(&-class.frequency).unwrap();
            let mut flipped: Vec<(usize, usize)> = class.pairs.iter().map(|&(m, n)| (n, m)).collect();
            let mut mirror = mirror.to_vec();
            flipped.sort_unstable();
            mirror.sort_unstable();
            prop_assert_eq!(flipped, mirror);
        }
    }

    #[test]
    fn xi_is_nonnegative(n in 0u32..4, m in uv(), beta in 0.1f64..10.0, eta in 0.0f64..20.0) {
        let v = xi(&FormFactor64::parametric(n, m), &ReservoirSpec64::new(beta).unwrap(), eta).unwrap();
        prop_assert!(v >= 0.0);
    }

    #[test]
    fn leading_states_stay_physical(
        n in 0u32..3, delta in 0.2f64..3.0, a in -1.0f64..1.0, b in -1.0f64..1.0, c in 0.0f64..1.0,
        beta in 0.2f64..5.0, lambda in 0.0f64..0.3, t in 0.0f64..200.0, j in 0u8..3,
    ) {
        let ff = FormFactor64::parametric(n, UvExponent::Linear);
        let res = ReservoirSpec64::new(beta).unwrap();
        let q = QubitSystem64::real(delta, a, b, c).unwrap();
        let rs = qubit_resonances(&q, &ff, &res, lambda).unwrap();
        prop_assert!(rs.eps0().im >= 0.0 && rs.eps_delta().im >= 0.0 && rs.eps_minus_delta().im >= 0.0);
        let init = if j == 0 { InitialState64::IllustrationCoherent } else { InitialState64::logic(j).unwrap() };
        let rho = evolve_leading(&init, &rs, delta, beta, t).unwrap();
        let (lo, hi) = rho.eigenvalues();
        prop_assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12, "{} {}", lo, hi);
    }
}

#[test]
fn single_precision_pipeline_tracks_double() {
    let q32 = decoherence::QubitSystem32::real(1.0, 0.0, 0.0, 1.0).unwrap();
    let rs32 = qubit_resonances(
        &q32,
        &decoherence::FormFactor32::parametric(1, UvExponent::Linear),
        &decoherence::ReservoirSpec32::new(1.0).unwrap(),
        0.1f32,
    )
    .unwrap();
    let rs64 = qubit_resonances(
        &QubitSystem64::real(1.0, 0.0, 0.0, 1.0).unwrap(),
        &FormFactor64::parametric(1, UvExponent::Linear),
        &ReservoirSpec64::new(1.0).unwrap(),
        0.1,
    )
    .unwrap();
    assert!((rs32.eps_delta().im as f64 - rs64.eps_delta().im).abs() < 1e-4 * rs64.eps_delta().im);
    assert!((rs32.eps_delta().re as f64 - rs64.eps_delta().re).abs() < 1e-4);
}
