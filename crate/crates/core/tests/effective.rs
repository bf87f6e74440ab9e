use faer::Scale;
use num_complex::Complex64 as C64;
use rydberg_floquet::basis::ConstrainedBasis;
use rydberg_floquet::drive::PulseSchedule;
use rydberg_floquet::operators::build_number;
use rydberg_floquet::effective::*;
use rydberg_floquet::basis::Boundary;
use rydberg_floquet::drive::DriveParams;

#[test]
fn reference_drive_coefficients() {
    let c = closed_form_coefficients(1.0, 2.0 * std::f64::consts::PI / 1.3, -0.45, 1.0, 0.15);
    assert!((c.j - 0.225).abs() < 1e-3);
    assert!((c.h - 0.068).abs() < 1e-3);
    assert!((c.g + 0.017).abs() < 1e-3);
}

#[test]
fn trivial_limits() {
    let c = closed_form_coefficients(1.0, 2.0, 0.0, 0.7, 0.3);
    assert_eq!((c.j, c.h, c.g), (0.35, 0.0, 0.0));
    assert_eq!(closed_form_coefficients(1.0, 2.0, 0.2, 0.7, -0.2).g, 0.0);
    let r = coefficient_report(1.0, 3.0, -0.3, 0.6, 0.3);
    assert!((r.coefficients.j - 3.0 * r.coefficients.h).abs() < 1e-15);
    assert_eq!(r.j_leading, 0.0);
    assert_eq!(r.warnings.len(), 1);
}

#[test]
fn assembled_pure_chemical_potential() {
    let b = ConstrainedBasis::new(6, Boundary::Periodic).unwrap();
    let h = assemble_hf(EffectiveCoefficients { j: 1.0, h: 0.0, g: 0.0 }, &b).unwrap();
    let d = h.diagonal_values().unwrap();
    for (k, &s) in b.states().iter().enumerate() {
        assert_eq!(d[k], -(s.count_ones() as f64));
    }
}

#[test]
fn conjugated_number_at_zero() {
    let b = ConstrainedBasis::new(6, Boundary::Periodic).unwrap();
    let ctx = MagnusContext::new(&b).unwrap();
    let n0 = ctx.conjugated_number(1.0, 0.0);
    let n = build_number(&b).to_dense();
    assert!((n0 - n).norm_l2() < 1e-12);
}

#[test]
fn log_of_exponential() {
    let b = ConstrainedBasis::new(6, Boundary::Periodic).unwrap();
    let h = assemble_hf(EffectiveCoefficients { j: 0.3, h: 0.2, g: -0.1 }, &b).unwrap().to_dense();
    let u = rydberg_floquet::linalg::expm_hermitian(&h, 0.7).unwrap();
    let back = floquet_hamiltonian(&u, 0.7).unwrap();
    assert!((back - h).norm_l2() < 1e-10);
}

#[test]
fn zero_epsilon_magnus() {
    let b = ConstrainedBasis::new(6, Boundary::Periodic).unwrap();
    let ctx = MagnusContext::new(&b).unwrap();
    let s = PulseSchedule::perturbed(1.0, 2.0, DriveParams { epsilon: 0.0, gamma: 0.4, theta: 0.1 }).unwrap();
    let h1 = ctx.magnus_hf(&s, 1).unwrap();
    let n = build_number(&b).to_dense();
    assert!((h1 - Scale(C64::new(-0.2, 0.0)) * n).norm_l2() < 1e-12);
    assert!(ctx.magnus_hf(&s, 2).is_err());
}
