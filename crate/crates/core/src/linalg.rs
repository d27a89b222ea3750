//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of the Hermitian part `(m + m†)/2`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Superoperator of `X ↦ A X` under column stacking: `I ⊗ A`.
pub fn left_multiplication(a: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(a.nrows(), a.nrows());
    id.kronecker(a)
}

/// Superoperator of `X ↦ X B` under column stacking: `Bᵀ ⊗ I`.
pub fn right_multiplication(b: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(b.nrows(), b.nrows());
    b.transpose().kronecker(&id)
}

/// Column-stacked vector of a square matrix. `nalgebra` stores column-major,
/// so this is a plain copy of the backing slice.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    debug_assert_eq!(v.len(), dim * dim);
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}
