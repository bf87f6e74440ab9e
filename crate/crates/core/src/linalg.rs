//! Dense spectral caches and a Lanczos exponential propagator.

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};

/// Anything that can compute `y = A x` for a Hermitian `A`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

/// Wraps a closure as a [`LinearOperator`].
pub struct FnOperator<F: Fn(&[C64], &mut [C64])> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[C64], &mut [C64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[C64], &mut [C64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        (self.f)(x, y)
    }
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition `A = V diag(w) V^T` of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    values: Vec<f64>,
    vectors: Mat<f64>,
}

impl SymmetricEigen {
    pub fn new(a: &Mat<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return invalid(format!("matrix is {}x{}", a.nrows(), a.ncols()));
        }
        let evd = a
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        let values = (0..a.nrows()).map(|i| evd.S().column_vector()[i]).collect();
        Ok(Self { values, vectors: evd.U().to_owned() })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Ascending eigenvalues.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &Mat<f64> {
        &self.vectors
    }

    /// `psi <- exp(-i t A) psi`.
    pub fn evolve(&self, t: f64, psi: &mut [C64]) {
        let n = self.dim();
        let mut x = Mat::<f64>::zeros(n, 2);
        for (i, z) in psi.iter().enumerate() {
            x[(i, 0)] = z.re;
            x[(i, 1)] = z.im;
        }
        let mut y = self.vectors.transpose() * &x;
        for (k, &w) in self.values.iter().enumerate() {
            let c = C64::new(y[(k, 0)], y[(k, 1)]) * C64::from_polar(1.0, -t * w);
            y[(k, 0)] = c.re;
            y[(k, 1)] = c.im;
        }
        let z = &self.vectors * &y;
        for (i, out) in psi.iter_mut().enumerate() {
            *out = C64::new(z[(i, 0)], z[(i, 1)]);
        }
    }

    /// Dense `V diag(f(w)) V^T`.
    pub fn function(&self, f: impl Fn(f64) -> C64) -> Mat<C64> {
        let n = self.dim();
        let phases: Vec<C64> = self.values.iter().map(|&w| f(w)).collect();
        Mat::from_fn(n, n, |r, c| {
            (0..n).map(|k| phases[k] * (self.vectors[(r, k)] * self.vectors[(c, k)])).sum()
        })
    }

    /// `V^T D V` for a diagonal `D`: the operator in the eigenbasis.
    pub fn rotate_diagonal(&self, diag: &[f64]) -> Mat<f64> {
        let n = self.dim();
        let scaled = Mat::from_fn(n, n, |r, c| diag[r] * self.vectors[(r, c)]);
        self.vectors.transpose() * &scaled
    }
}

/// Eigendecomposition of a complex Hermitian matrix: ascending values and unitary vectors.
pub fn hermitian_eigen(a: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    if a.nrows() != a.ncols() {
        return invalid(format!("matrix is {}x{}", a.nrows(), a.ncols()));
    }
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let values = (0..a.nrows()).map(|i| evd.S().column_vector()[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

/// `exp(-i t A)` for a Hermitian dense `A`.
pub fn expm_hermitian(a: &Mat<C64>, t: f64) -> Result<Mat<C64>> {
    let (w, v) = hermitian_eigen(a)?;
    let n = w.len();
    let scaled = Mat::from_fn(n, n, |r, c| v[(r, c)] * C64::from_polar(1.0, -t * w[c]));
    Ok(&scaled * v.adjoint())
}

pub fn apply_dense(a: &Mat<C64>, x: &[C64]) -> Vec<C64> {
    (0..a.nrows()).map(|r| (0..a.ncols()).map(|c| a[(r, c)] * x[c]).sum()).collect()
}

/// Lanczos approximation of `exp(-i t A) psi` with adaptive substeps.
#[derive(Debug, Clone, Copy)]
pub struct Krylov {
    /// Target error per substep, relative to the input norm.
    pub tol: f64,
    pub max_dim: usize,
}

impl Default for Krylov {
    fn default() -> Self {
        Self { tol: 1e-10, max_dim: 40 }
    }
}

impl Krylov {
    pub fn evolve(&self, op: &dyn LinearOperator, t: f64, psi: &mut [C64]) -> Result<()> {
        let n = op.dim();
        if psi.len() != n {
            return invalid(format!("state length {} vs operator dimension {n}", psi.len()));
        }
        if t == 0.0 || n == 0 {
            return Ok(());
        }
        let mut remaining = t;
        let mut step = t;
        let mut halvings = 0;
        while remaining.abs() > 0.0 {
            if step.abs() > remaining.abs() {
                step = remaining;
            }
            match self.try_step(op, step, psi)? {
                Some(next) => {
                    psi.copy_from_slice(&next);
                    remaining -= step;
                    halvings = 0;
                }
                None => {
                    step *= 0.5;
                    halvings += 1;
                    if halvings > 60 {
                        return Err(Error::NoConvergence("Krylov step underflow".into()));
                    }
                }
            }
        }
        Ok(())
    }

    fn try_step(&self, op: &dyn LinearOperator, dt: f64, psi: &[C64]) -> Result<Option<Vec<C64>>> {
        let n = op.dim();
        let beta0 = norm(psi);
        if beta0 == 0.0 {
            return Ok(Some(psi.to_vec()));
        }
        let m_max = self.max_dim.min(n);
        let mut basis: Vec<Vec<C64>> = vec![psi.iter().map(|z| z / beta0).collect()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![C64::new(0.0, 0.0); n];

        for j in 0..m_max {
            op.apply(&basis[j], &mut w);
            let a = inner(&basis[j], &w).re;
            alpha.push(a);
            // one full reorthogonalization pass
            for v in &basis {
                let c = inner(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
            let b = norm(&w);
            let exhausted = b < 1e-13 * (a.abs() + 1.0) || j + 1 == n;
            if !exhausted && j + 1 < 4.min(m_max) {
                beta.push(b);
                basis.push(w.iter().map(|z| z / b).collect());
                continue;
            }
            let coeffs = tridiagonal_expm(&alpha, &beta, dt)?;
            let err = b * coeffs[j].norm();
            if exhausted || err < self.tol {
                let mut out = vec![C64::new(0.0, 0.0); n];
                for (v, c) in basis.iter().zip(&coeffs) {
                    out.iter_mut().zip(v).for_each(|(o, vi)| *o += beta0 * c * vi);
                }
                return Ok(Some(out));
            }
            beta.push(b);
            basis.push(w.iter().map(|z| z / b).collect());
        }
        Ok(None)
    }
}

/// First column of `exp(-i dt T)` for the symmetric tridiagonal `T`.
fn tridiagonal_expm(alpha: &[f64], beta: &[f64], dt: f64) -> Result<Vec<C64>> {
    let m = alpha.len();
    let t = Mat::from_fn(m, m, |r, c| {
        if r == c {
            alpha[r]
        } else if r == c + 1 {
            beta[c]
        } else if c == r + 1 {
            beta[r]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(&t)?;
    let v = eig.vectors();
    Ok((0..m)
        .map(|r| {
            (0..m).map(|k| C64::from_polar(v[(r, k)] * v[(0, k)], -dt * eig.values()[k])).sum()
        })
        .collect())
}
