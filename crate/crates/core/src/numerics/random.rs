//! Seeded random operators and states.

use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{normalized, ComplexMatrix, Ket};
use crate::scalar::{cplx, Scalar};

fn gauss<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE-like, unit scale).
pub fn random_hermitian<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = ComplexMatrix::from_fn(dim, |_, _| cplx(gauss(rng), gauss(rng)));
    g.hermitian_part()
}

/// Real symmetric matrix with i.i.d. Gaussian entries.
pub fn random_real_symmetric<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> ComplexMatrix<T> {
    let g = ComplexMatrix::from_real_fn(dim, |_, _| gauss(rng));
    g.hermitian_part()
}

/// Unit-norm complex Gaussian ket.
pub fn random_ket<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket<T> {
    let v: Ket<T> = (0..dim).map(|_| cplx(gauss(rng), gauss(rng))).collect();
    normalized(&v).expect("Gaussian ket has nonzero norm")
}

/// Full-rank density matrix `G G† / Tr[G G†]`.
pub fn random_density<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = ComplexMatrix::from_fn(dim, |_, _| cplx(gauss(rng), gauss(rng)));
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(T::one() / tr)
}
