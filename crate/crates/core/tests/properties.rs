use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rydberg_floquet::basis::{Boundary, ConstrainedBasis};
use rydberg_floquet::domainwall::scattering_phase;
use rydberg_floquet::drive::{DriveParams, Propagator, PulseSchedule};
use rydberg_floquet::effective::{assemble_hf, closed_form_coefficients};
use rydberg_floquet::linalg::{apply_dense, distance, expm_hermitian, inner, Krylov};
use rydberg_floquet::observables::{fmt_f64, StateVector};
use rydberg_floquet::operators::{build_number, build_pxp, number_diagonal, SparseOperator};

fn chain(l: usize) -> Arc<ConstrainedBasis> {
    Arc::new(ConstrainedBasis::new(l, Boundary::Periodic).unwrap())
}

fn state(basis: &ConstrainedBasis, seed: &[(f64, f64)]) -> StateVector {
    let amps = (0..basis.dim()).map(|k| {
        let (a, b) = seed[k % seed.len()];
        C64::new(a + 0.01 * k as f64, b)
    });
    StateVector::normalized(basis, amps.collect()).unwrap()
}

fn amps_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 7..13)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn effective_hamiltonian_is_hermitian(
        l in 4usize..10, tau in 0.1..6.0f64, eps in -1.0..1.0f64, gamma in -2.0..2.0f64, theta in -1.0..1.0f64,
    ) {
        let basis = chain(l);
        let hf = assemble_hf(closed_form_coefficients(1.0, tau, eps, gamma, theta), &basis).unwrap();
        prop_assert!(hf.hermiticity_error() < 1e-14);
    }

    #[test]
    fn cycle_is_unitary(
        tau in 0.2..6.0f64, eps in -0.8..0.8f64, gamma in -2.0..2.0f64, theta in -1.0..1.0f64, seed in amps_strategy(),
    ) {
        let basis = chain(8);
        let prop = Propagator::dense(basis.clone()).unwrap();
        let s = PulseSchedule::perturbed(1.0, tau, DriveParams { epsilon: eps, gamma, theta }).unwrap();
        let out = prop.propagate_cycle(&state(&basis, &seed), &s).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn echo_cycle_is_identity(tau in 0.1..8.0f64, omega in 0.5..2.0f64, seed in amps_strategy()) {
        let basis = chain(10);
        let prop = Propagator::krylov(basis.clone());
        let psi = state(&basis, &seed);
        let out = prop.propagate_cycle(&psi, &PulseSchedule::echo(omega, tau).unwrap()).unwrap();
        prop_assert!(distance(out.amplitudes(), psi.amplitudes()) < 1e-8);
    }

    #[test]
    fn pure_hopping_conserves_number(l in 4usize..11, tau in 0.1..6.0f64, eps in -1.0..1.0f64) {
        let basis = chain(l);
        let c = closed_form_coefficients(1.0, tau, eps, -2.0 * eps, -eps);
        prop_assert!(c.g.abs() < 1e-15);
        let hf = assemble_hf(c, &basis).unwrap();
        let n = number_diagonal(&basis);
        for (r, col, v) in hf.entries() {
            prop_assert!(v.norm() < 1e-15 || n[r] == n[col]);
        }
    }

    #[test]
    fn scattering_phase_is_unimodular(k in -PI..PI, kp in -PI..PI) {
        if let Ok(s) = scattering_phase(k, kp) {
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn krylov_matches_dense_exponential(t in -5.0..5.0f64, mu in -1.0..1.0f64, seed in amps_strategy()) {
        let basis = chain(9);
        let h = SparseOperator::linear_combination(&[(0.5, &build_pxp(&basis)), (mu, &build_number(&basis))]).unwrap();
        let psi = state(&basis, &seed);
        let mut v = psi.amplitudes().to_vec();
        Krylov { tol: 1e-12, ..Krylov::default() }.evolve(&h, t, &mut v).unwrap();
        let exact = apply_dense(&expm_hermitian(&h.to_dense(), t).unwrap(), psi.amplitudes());
        prop_assert!(distance(&v, &exact) < 1e-9);
        prop_assert!((inner(&v, &v).re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn formatted_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}
