use std::f64::consts::PI;
use std::sync::Arc;

use rydberg_floquet::basis::{Boundary, ConstrainedBasis};
use rydberg_floquet::coherence::*;
use rydberg_floquet::drive::Propagator;
use rydberg_floquet::Error;

fn synthetic(tc: f64, tau: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| (-(k as f64 * tau / tc).powi(2) * 8.0).exp()).collect()
}

#[test]
fn recovers_gaussian() {
    let (tau, l, ts) = (1.5, 8, 40.0);
    let s = synthetic(23.0, tau, 60);
    // F = exp(-L (t/t_c)^2) with L = 8.
    let (tc, res, r2, pts) = fit_coherence(&s, tau, l, ts, FitSettings::default()).unwrap();
    let expect = 1.0 / (1.0 / 23.0f64.powi(2) + 1.0 / ts.powi(2)).sqrt();
    assert!((tc - expect).abs() < 1e-8 * expect, "{tc} {expect}");
    assert!(res < 1e-12 && r2 > 1.0 - 1e-12);
    assert!(pts >= 5);
}

#[test]
fn perfect_fidelity_gives_t_star() {
    let (tau, l) = (2.0, 10);
    let n = cycles_needed(tau, l, T_STAR_DEFAULT, 1e-3);
    let (tc, ..) = fit_coherence(&vec![1.0; n + 1], tau, l, T_STAR_DEFAULT, FitSettings::default()).unwrap();
    assert!((tc - T_STAR_DEFAULT).abs() < 1e-9 * T_STAR_DEFAULT);
    let (tc, ..) = fit_coherence(&vec![1.0; 200], tau, l, T_STAR_ALT, FitSettings::default()).unwrap();
    assert!((tc - T_STAR_ALT).abs() < 1e-9 * T_STAR_ALT);
}

#[test]
fn time_rescaling() {
    // Halving tau with twice the samples describes the same curve.
    let a = fit_coherence(&synthetic(20.0, 2.0, 40), 2.0, 8, 50.0, FitSettings::default()).unwrap().0;
    let b = fit_coherence(&synthetic(20.0, 1.0, 80), 1.0, 8, 50.0, FitSettings::default()).unwrap().0;
    assert!((a - b).abs() < 1e-9 * a);
}

#[test]
fn growing_fidelity_is_a_fit_failure() {
    let s: Vec<f64> = (0..40).map(|k| (0.01 * (k as f64).powi(2)).exp().min(1e6)).collect();
    assert!(matches!(fit_coherence(&s, 1.0, 8, 1e6, FitSettings::default()), Err(Error::FitFailure(_))));
    assert!(matches!(fit_coherence(&[1.0, 0.5], 1.0, 8, 10.0, FitSettings::default()), Err(Error::FitFailure(_))));
    assert!(fit_coherence(&[], 1.0, 8, 10.0, FitSettings::default()).is_err());
    assert!(fit_coherence(&[1.0; 10], 1.0, 8, 0.0, FitSettings::default()).is_err());
}

#[test]
fn no_drive_keeps_fidelity() {
    let basis = Arc::new(ConstrainedBasis::new(8, Boundary::Periodic).unwrap());
    let prop = Propagator::dense(basis).unwrap();
    let s = fidelity_decay_series(&prop, 1.0, 3.0, 0.0, 10).unwrap();
    assert!(s.iter().all(|f| (f - 1.0).abs() < 1e-9), "{s:?}");
}

#[test]
fn small_drive_decays_slowly() {
    let basis = Arc::new(ConstrainedBasis::new(8, Boundary::Periodic).unwrap());
    let prop = Propagator::dense(basis).unwrap();
    let r = coherence_point(&prop, 1.0, 4.0, -0.2, T_STAR_DEFAULT, FitSettings::default()).unwrap();
    assert!(r.t_c > 0.0 && r.t_c <= T_STAR_DEFAULT * (1.0 + 1e-9));
    assert!(r.h != 0.0);
    assert_eq!(r.series[0], 1.0);
    assert!(r.series.iter().all(|f| (0.0..=1.0 + 1e-9).contains(f)));
}

#[test]
fn sweep_rejects_bad_tau() {
    assert!(sweep_coherence(&[2.0 * PI], &[0.1], 8, 1.0, T_STAR_DEFAULT, FitSettings::default()).is_err());
    assert!(sweep_coherence(&[], &[0.1], 8, 1.0, T_STAR_DEFAULT, FitSettings::default()).is_err());
}

#[test]
fn small_sweep_csv() {
    let s = sweep_coherence(&[3.0, 4.0], &[0.2, 0.3], 8, 1.0, T_STAR_DEFAULT, FitSettings::default()).unwrap();
    assert_eq!(s.cells.len(), 4);
    let csv = s.to_csv();
    assert!(csv.starts_with("tau,eps,h,t_c,h_tc,residual\n"));
    assert_eq!(csv.lines().count(), 5);
    assert!(s.argmax.is_some());
    assert!(!s.interior);
}

#[test]
fn linspace_ends() {
    assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
    assert!(linspace(0.0, 1.0, 0).is_empty());
}
