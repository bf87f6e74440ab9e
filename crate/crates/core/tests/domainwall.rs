use std::f64::consts::PI;
use num_complex::Complex64 as C64;
use rydberg_floquet::error::Error;
use rydberg_floquet::domainwall::*;

#[test]
fn trivial_values() {
    assert_eq!(single_dispersion(0.0, 1.0), -2.0);
    assert!(single_dispersion(PI / 2.0, 1.0).abs() < 1e-15);
    assert!((scattering_phase(0.0, 0.0).unwrap() + 1.0).norm() < 1e-15);
    assert_eq!(coupling_lambda(0.0, 0.3, PairBoundary::Periodic), C64::new(0.0, 0.0));
    assert!(coupling_lambda(PI, 0.3, PairBoundary::Open).norm() < 1e-15);
    assert_eq!(resonance_offset(0.0, 1.0, 6.0), 0.0);
}

#[test]
fn pair_offset_matches_resonance() {
    for &k in &[0.1, 0.7, 2.0] {
        for l in [8, 16, 40] {
            let (v, p) = pair_energies(k, -k, 0.3, 1.1, l);
            assert!((p - v - resonance_offset(k, 0.3, 1.1)).abs() < 1e-12);
        }
    }
}

#[test]
fn singular_scattering_reported() {
    // e^{ik} + e^{-ik'} + 1 = 0 at k = 2pi/3, k' = 2pi/3
    assert!(matches!(scattering_phase(2.0 * PI / 3.0, 2.0 * PI / 3.0), Err(Error::Singular(_))));
}

#[test]
fn small_ring_matches_ed() {
    let r = validate_two_dw_sector(8, 1.0, 0.4).unwrap();
    assert_eq!(r.momenta.len(), 4);
    assert!(r.max_energy_error < 1e-9, "{r:?}");
    assert!(r.max_residual < 1e-9);
    assert!(r.max_lambda_error < 1e-10);
}
