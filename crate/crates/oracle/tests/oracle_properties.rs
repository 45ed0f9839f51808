use decoherence::{FormFactor64, InitialState, QubitSystem64, ReducedDensityMatrix64, UvExponent};
use decoherence_oracle::{
    build_hamiltonian, discretize, fit_decay_rate_checked, reduce, thermal_bath_state, Channel, DephasingModel,
    ExactPropagator, FullState, ModeTruncation, OracleError, TruncatedFockSpace,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn ohmic() -> FormFactor64 {
    FormFactor64::parametric(1, UvExponent::Linear)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_is_unitary(
        modes in 1usize..3, n_max in 1usize..4, a in -1.0f64..1.0, b in -1.0f64..1.0,
        cr in -1.0f64..1.0, ci in -1.0f64..1.0, lambda in 0.0f64..0.8, t in 0.0f64..30.0,
    ) {
        let bath = discretize(&ohmic(), modes, 6.0).unwrap();
        let fock = TruncatedFockSpace::new(modes, n_max).unwrap();
        let q = QubitSystem64::new(1.0, a, b, Complex64::new(cr, ci)).unwrap();
        let h = build_hamiltonian(&q, &bath, &fock, lambda).unwrap();
        let prop = ExactPropagator::new(&h).unwrap();
        let rho0 = FullState::product(
            &InitialState::IllustrationCoherent.density_matrix().unwrap(),
            &thermal_bath_state(&bath, &fock, 1.0).unwrap(),
        );
        let rho = prop.evolve(&rho0, t).unwrap();
        prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(rho.hermiticity_defect() == 0.0);
        let (s0, s1) = (rho0.spectrum(), rho.spectrum());
        let drift = s0.iter().zip(&s1).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(drift < 1e-10, "{}", drift);
    }

    #[test]
    fn non_demolition_oracle_is_solved_exactly(
        modes in 1usize..4, gap in 0.2f64..2.0, shift in -1.0f64..1.0, lambda in 0.0f64..0.8, beta in 0.3f64..3.0,
    ) {
        let bath = discretize(&ohmic(), modes, 6.0).unwrap();
        let fock = TruncatedFockSpace::new(modes, 3).unwrap();
        let q = QubitSystem64::real(1.0, shift, shift + gap, 0.0).unwrap();
        let prop = ExactPropagator::new(&build_hamiltonian(&q, &bath, &fock, lambda).unwrap()).unwrap();
        let rho_s = ReducedDensityMatrix64::hermitian(0.7, Complex64::new(0.3, -0.2));
        let thermal = thermal_bath_state(&bath, &fock, beta).unwrap();
        let model = DephasingModel::new(&q, &bath, beta, lambda, ModeTruncation::Fock(3)).unwrap();
        let times: Vec<f64> = (0..=10).map(|i| 0.05 * bath.recurrence_time() * i as f64).collect();
        let series = prop.reduced_trajectory(&rho_s, &thermal, &times).unwrap();
        for (t, rho) in series.iter() {
            prop_assert!(rho.max_abs_diff(&model.state(&rho_s, t)) < 1e-6);
            prop_assert!((rho.rho11().re - 0.7).abs() < 1e-10);
        }
        let full = reduce(&prop.evolve(&FullState::product(&rho_s, &thermal), times[7]).unwrap()).unwrap();
        prop_assert!(full.max_abs_diff(&series.states()[7]) < 1e-10);
    }

    #[test]
    fn fits_never_cross_half_the_recurrence_time(modes in 1usize..6, over in 1e-9f64..10.0) {
        let bath = discretize(&ohmic(), modes, 6.0).unwrap();
        let t_rec = bath.recurrence_time();
        let times: Vec<f64> = (0..50).map(|i| i as f64 * (0.5 * t_rec + over) / 49.0).collect();
        let states = times
            .iter()
            .map(|t| ReducedDensityMatrix64::hermitian(0.5, Complex64::new(0.5 * (-t).exp(), 0.0)))
            .collect();
        let series = decoherence::TimeSeries64::new(times.clone(), states, decoherence::Provenance::Oracle).unwrap();
        let t2 = *times.last().unwrap();
        let refused = matches!(
            fit_decay_rate_checked(&series, Channel::Coherence, 0.0, t2, t_rec),
            Err(OracleError::RecurrenceWindow { .. })
        );
        prop_assert!(refused);
    }
}
