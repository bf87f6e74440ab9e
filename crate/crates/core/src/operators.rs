//! Sparse operators for the Hamiltonian terms of the driven chain.
//!
//! Every builder acts on a [`ConstrainedBasis`] and projects onto it: matrix
//! elements whose target configuration lies outside the basis are dropped.
//! For a number sector this keeps only the in-sector block.
//!
//! Pauli conventions: `|o>` (empty, bit 0) is the +1 eigenstate of `sigma^z`,
//! `sigma^x = |o><r| + |r><o|` and `sigma^y = -i|o><r| + i|r><o|`.
//! On open chains a projector on a site beyond the edge is the identity.

use std::io::Write;
use std::path::Path;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::basis::{BasisTag, ConstrainedBasis};
use crate::error::{invalid, Error, Result};
use crate::linalg::LinearOperator;

const I: C64 = C64::new(0.0, 1.0);

/// Complex operator in compressed-row layout. Entries are unique per
/// `(row, col)` and sorted; the coordinate view is [`SparseOperator::entries`].
#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    tag: BasisTag,
    hermitian: bool,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOperator {
    pub fn from_triplets(
        dim: usize,
        tag: BasisTag,
        hermitian: bool,
        mut triplets: Vec<(usize, usize, C64)>,
    ) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return invalid(format!("entry ({r}, {c}) outside dimension {dim}"));
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != C64::new(0.0, 0.0));

        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let cols = merged.iter().map(|e| e.1).collect();
        let vals = merged.iter().map(|e| e.2).collect();
        Ok(Self { dim, tag, hermitian, row_ptr, cols, vals })
    }

    pub fn diagonal(tag: BasisTag, diag: &[f64]) -> Self {
        let triplets = diag.iter().enumerate().map(|(i, &d)| (i, i, C64::new(d, 0.0))).collect();
        Self::from_triplets(diag.len(), tag, true, triplets).expect("indices in range")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[span.clone()].binary_search(&col) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Diagonal values if the operator has no off-diagonal entries.
    pub fn diagonal_values(&self) -> Option<Vec<f64>> {
        let mut d = vec![0.0; self.dim];
        for (r, c, v) in self.entries() {
            if r != c || v.im != 0.0 {
                return None;
            }
            d[r] = v.re;
        }
        Some(d)
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    /// Largest deviation from `A = A^dagger` over all stored entries.
    pub fn hermiticity_error(&self) -> f64 {
        self.entries().map(|(r, c, v)| (v - self.get(c, r).conj()).norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// `sum_k c_k A_k` over operators sharing one basis.
    pub fn linear_combination(terms: &[(f64, &SparseOperator)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return invalid("empty linear combination");
        };
        if let Some((_, bad)) = terms.iter().find(|(_, op)| op.tag != first.tag || op.dim != first.dim) {
            return invalid(format!("basis mismatch: {:?} vs {:?}", first.tag, bad.tag));
        }
        let triplets = terms
            .iter()
            .flat_map(|&(c, op)| op.entries().map(move |(r, k, v)| (r, k, v * c)))
            .collect();
        let hermitian = terms.iter().all(|(_, op)| op.hermitian);
        Self::from_triplets(first.dim, first.tag, hermitian, triplets)
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn to_dense_real(&self) -> Result<Mat<f64>> {
        if !self.is_real() {
            return invalid("operator has imaginary entries");
        }
        let mut m = Mat::<f64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v.re;
        }
        Ok(m)
    }

    /// Writes the operator as JSON: `{"dim": n, "entries": [[row, col, re, im], ...]}`.
    pub fn write_triplets(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct Dump {
            dim: usize,
            tag: BasisTag,
            entries: Vec<(usize, usize, f64, f64)>,
        }
        let dump = Dump {
            dim: self.dim,
            tag: self.tag,
            entries: self.entries().map(|(r, c, v)| (r, c, v.re, v.im)).collect(),
        };
        let mut file = std::fs::File::create(path)?;
        serde_json::to_writer(&mut file, &dump)?;
        file.write_all(b"\n")?;
        Ok(())
    }
}

impl LinearOperator for SparseOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }
}

fn diagonal_op(basis: &ConstrainedBasis, f: impl Fn(u64) -> f64) -> SparseOperator {
    let diag: Vec<f64> = basis.states().iter().map(|&s| f(s)).collect();
    SparseOperator::diagonal(basis.tag(), &diag)
}

/// Collects `<target|A|source>` for every source configuration.
fn offdiagonal_op(
    basis: &ConstrainedBasis,
    hermitian: bool,
    mut action: impl FnMut(u64, &mut Vec<(u64, C64)>),
) -> SparseOperator {
    let mut triplets = Vec::new();
    let mut buf = Vec::new();
    for (col, &src) in basis.states().iter().enumerate() {
        buf.clear();
        action(src, &mut buf);
        for &(dst, amp) in &buf {
            if let Some(row) = basis.find(dst) {
                triplets.push((row, col, amp));
            }
        }
    }
    SparseOperator::from_triplets(basis.dim(), basis.tag(), hermitian, triplets)
        .expect("indices come from the basis")
}

fn check_site(basis: &ConstrainedBasis, site: usize) -> Result<()> {
    if site >= basis.sites() {
        return Err(Error::InvalidArgument(format!(
            "site {site} out of range for {} sites",
            basis.sites()
        )));
    }
    Ok(())
}

/// `sum_i P_{i-1} sigma^x_i P_{i+1}`.
pub fn build_pxp(basis: &ConstrainedBasis) -> SparseOperator {
    offdiagonal_op(basis, true, |s, out| {
        for i in 0..basis.sites() {
            if basis.vacant(s, i, -1) && basis.vacant(s, i, 1) {
                out.push((s ^ 1 << i, C64::new(1.0, 0.0)));
            }
        }
    })
}

/// `sum_i P_{i-1} sigma^y_i P_{i+1}`.
pub fn build_pyp(basis: &ConstrainedBasis) -> SparseOperator {
    offdiagonal_op(basis, true, |s, out| {
        for i in 0..basis.sites() {
            if basis.vacant(s, i, -1) && basis.vacant(s, i, 1) {
                // <r|sigma^y|o> = i, <o|sigma^y|r> = -i
                let amp = if s >> i & 1 == 0 { I } else { -I };
                out.push((s ^ 1 << i, amp));
            }
        }
    })
}

/// `(1/2) sum_i P_{i-1} (sigma^x_i sigma^x_{i+1} + sigma^y_i sigma^y_{i+1}) P_{i+2}`:
/// moves one excitation across bond `(i, i+1)` when sites `i-1` and `i+2` are empty.
pub fn build_pxyp(basis: &ConstrainedBasis) -> SparseOperator {
    offdiagonal_op(basis, true, |s, out| {
        for i in 0..basis.sites() {
            let Some(j) = basis.neighbor(i, 1) else { continue };
            if s >> i & 1 == s >> j & 1 {
                continue;
            }
            if basis.vacant(s, i, -1) && basis.vacant(s, i, 2) {
                out.push((s ^ (1 << i | 1 << j), C64::new(1.0, 0.0)));
            }
        }
    })
}

/// `sum_i P_{i-1} sigma^z_i P_{i+1}`.
pub fn build_pzp(basis: &ConstrainedBasis) -> SparseOperator {
    diagonal_op(basis, |s| {
        (0..basis.sites())
            .filter(|&i| basis.vacant(s, i, -1) && basis.vacant(s, i, 1))
            .map(|i| if s >> i & 1 == 0 { 1.0 } else { -1.0 })
            .sum()
    })
}

/// `sum_i sigma^z_i sigma^z_{i+2}`; open chains keep only pairs inside the chain.
pub fn build_ziz(basis: &ConstrainedBasis) -> SparseOperator {
    diagonal_op(basis, |s| {
        let z = |j: usize| if s >> j & 1 == 0 { 1.0 } else { -1.0 };
        (0..basis.sites()).filter_map(|i| basis.neighbor(i, 2).map(|j| z(i) * z(j))).sum()
    })
}

/// Total Rydberg number `N = sum_i n_i`.
pub fn build_number(basis: &ConstrainedBasis) -> SparseOperator {
    diagonal_op(basis, |s| s.count_ones() as f64)
}

pub fn build_local_n(basis: &ConstrainedBasis, site: usize) -> Result<SparseOperator> {
    check_site(basis, site)?;
    Ok(diagonal_op(basis, |s| (s >> site & 1) as f64))
}

pub fn build_sigma_z(basis: &ConstrainedBasis, site: usize) -> Result<SparseOperator> {
    check_site(basis, site)?;
    Ok(diagonal_op(basis, |s| if s >> site & 1 == 0 { 1.0 } else { -1.0 }))
}

/// Diagonal of `N`, the form the propagators use for detuning kicks.
pub fn number_diagonal(basis: &ConstrainedBasis) -> Vec<f64> {
    basis.states().iter().map(|s| s.count_ones() as f64).collect()
}
