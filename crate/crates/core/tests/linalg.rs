use faer::Mat;
use num_complex::Complex64 as C64;
use rydberg_floquet::linalg::*;

fn random_symmetric(n: usize, seed: u64) -> Mat<f64> {
    let mut s = seed;
    let mut next = move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut a = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let x = next();
            a[(i, j)] = x;
            a[(j, i)] = x;
        }
    }
    a
}

#[test]
fn evolve_matches_dense_function() {
    let a = random_symmetric(30, 7);
    let eig = SymmetricEigen::new(&a).unwrap();
    let u = eig.function(|w| C64::from_polar(1.0, -0.7 * w));
    let psi: Vec<C64> = (0..30).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect();
    let mut out = psi.clone();
    eig.evolve(0.7, &mut out);
    let reference = apply_dense(&u, &psi);
    assert!(distance(&out, &reference) < 1e-10);
}

#[test]
fn krylov_matches_dense() {
    let a = random_symmetric(200, 3);
    let eig = SymmetricEigen::new(&a).unwrap();
    let op = FnOperator::new(200, |x: &[C64], y: &mut [C64]| {
        for r in 0..200 {
            y[r] = (0..200).map(|c| x[c] * a[(r, c)]).sum();
        }
    });
    let mut psi: Vec<C64> = (0..200).map(|i| C64::new((i as f64).sin(), (i as f64).cos())).collect();
    let nrm = norm(&psi);
    psi.iter_mut().for_each(|z| *z /= nrm);
    let mut dense = psi.clone();
    eig.evolve(9.0, &mut dense);
    Krylov::default().evolve(&op, 9.0, &mut psi).unwrap();
    assert!(distance(&psi, &dense) < 1e-8);
    assert!((norm(&psi) - 1.0).abs() < 1e-10);
}

#[test]
fn hermitian_exponential_is_unitary() {
    let a = random_symmetric(12, 11);
    let c = Mat::from_fn(12, 12, |r, k| C64::new(a[(r, k)], if r < k { 0.3 } else if r > k { -0.3 } else { 0.0 }));
    let u = expm_hermitian(&c, 1.3).unwrap();
    let prod = u.adjoint() * &u;
    for r in 0..12 {
        for k in 0..12 {
            let want = if r == k { 1.0 } else { 0.0 };
            assert!((prod[(r, k)] - want).norm() < 1e-12);
        }
    }
}
