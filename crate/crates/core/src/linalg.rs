// SPDX-License-Identifier: Apache-2.0

//! Small dense complex matrix helpers.

use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix; every operator in the crate has dimension ≤ 10.
pub type Matrix = DMatrix<C64>;

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest elementwise deviation from Hermiticity, max |a_ij − conj(a_ji)|.
pub fn hermitian_deviation(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest elementwise deviation of U†U from the identity.
pub fn unitarity_deviation(u: &Matrix) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u - Matrix::identity(n, n);
    g.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Replaces `a` by (a + a†)/2.
pub fn hermitize(a: &mut Matrix) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
}

pub fn trace(a: &Matrix) -> C64 {
    a.diagonal().iter().sum()
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn eigh(a: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Matrix::from_fn(a.nrows(), a.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eigvalsh(a: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(a.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// U·A·U†.
pub fn conjugate(u: &Matrix, a: &Matrix) -> Matrix {
    u * a * u.adjoint()
}

/// Embeds a 2×2 qubit operator in the top-left block of a `dim`-level
/// identity.
pub fn embed_qubit(op: &nalgebra::Matrix2<C64>, dim: usize) -> Matrix {
    let mut m = Matrix::identity(dim, dim);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = op[(i, j)];
        }
    }
    m
}

/// Diagonal matrix with the given complex entries.
pub fn diag(entries: &[C64]) -> Matrix {
    Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}
