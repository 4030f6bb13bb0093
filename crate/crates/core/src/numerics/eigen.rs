//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and
//! functions of Hermitian matrices built on it.
//!
//! Real symmetric input stays real throughout: every rotation phase is ±1, so
//! the eigenvectors come back real. The protocol module depends on this when
//! it builds transpose-symmetric unitaries from spectral projectors.

use std::ops::Range;

use num_traits::Zero;

use super::matrix::{ComplexMatrix, Ket};
use crate::error::{Error, Result};
use crate::policy::NumericPolicy;
use crate::scalar::{real, Scalar, C};

/// `A = U diag(λ) U†` with eigenvalues ascending and eigenvectors in the
/// columns of `U`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T: Scalar> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Ket<T> {
        self.eigenvectors.column(k)
    }

    /// `U f(Λ) U†`.
    pub fn map(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let n = self.dim();
        let u = &self.eigenvectors;
        let fl: Vec<C<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .filter(|&k| !fl[k].is_zero())
                .map(|k| u[(i, k)] * fl[k] * u[(j, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.map(real)
    }

    /// Groups consecutive eigenvalues whose gap is at most
    /// `rel_tol · max(1, scale)` into blocks.
    pub fn degenerate_blocks(&self, rel_tol: T, scale: T) -> Vec<Range<usize>> {
        let tol = rel_tol * scale.max(T::one());
        let mut blocks = Vec::new();
        let mut start = 0;
        for k in 1..=self.dim() {
            if k == self.dim() || self.eigenvalues[k] - self.eigenvalues[k - 1] > tol {
                blocks.push(start..k);
                start = k;
            }
        }
        blocks
    }

    /// Orthogonal projector onto the span of eigenvectors `block`.
    pub fn spectral_projector(&self, block: Range<usize>) -> ComplexMatrix<T> {
        let n = self.dim();
        let u = &self.eigenvectors;
        ComplexMatrix::from_fn(n, |i, j| {
            block.clone().map(|k| u[(i, k)] * u[(j, k)].conj()).sum()
        })
    }

    /// Expectation values `⟨u_k|ρ|u_k⟩` (real parts).
    pub fn populations(&self, rho: &ComplexMatrix<T>) -> Vec<T> {
        (0..self.dim())
            .map(|k| {
                let v = self.eigenvector(k);
                rho.sandwich(&v, &v).re
            })
            .collect()
    }
}

/// Diagonalizes a Hermitian matrix. Deterministic: the rotation order is fixed
/// and ties in the final sort keep the original column order.
pub fn eig_hermitian<T: Scalar>(
    a: &ComplexMatrix<T>,
    policy: &NumericPolicy,
) -> Result<EigenDecomposition<T>> {
    let herm_err = a.hermiticity_error();
    if !(herm_err <= T::lit(policy.hermitian)) {
        return Err(Error::NotHermitian {
            deviation: herm_err.to_f64_lossy(),
        });
    }
    let n = a.dim();
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = real(m[(i, i)].re);
    }
    let mut v = ComplexMatrix::identity(n);
    let fro = m.frobenius();
    // f32 cannot reach the f64 default; floor the target at a few ulps.
    let rel = T::lit(policy.jacobi_rel).max(T::epsilon() * T::lit(4.0));
    let target = rel * fro;

    let mut converged = false;
    for _sweep in 0..policy.jacobi_max_sweeps {
        if off_diagonal_mass(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_mass(&m) > target {
        return Err(Error::NoConvergence {
            sweeps: policy.jacobi_max_sweeps,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        m[(x, x)]
            .re
            .partial_cmp(&m[(y, y)].re)
            .expect("finite eigenvalues")
    });
    let eigenvalues = order.iter().map(|&k| m[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `f(A) = U f(Λ) U†` for Hermitian `A`.
pub fn func_hermitian<T: Scalar>(
    a: &ComplexMatrix<T>,
    f: impl Fn(T) -> C<T>,
    policy: &NumericPolicy,
) -> Result<ComplexMatrix<T>> {
    Ok(eig_hermitian(a, policy)?.map(f))
}

fn off_diagonal_mass<T: Scalar>(m: &ComplexMatrix<T>) -> T {
    let n = m.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One two-sided rotation zeroing `m[p,q]`. With `a_pq = |a_pq| e^{iφ}` the
/// rotation is `J = D R D†`, `D = diag(1, e^{-iφ})` on (p, q) and `R` the real
/// Jacobi rotation of the phase-stripped 2x2 block.
fn rotate<T: Scalar>(m: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let b = apq.norm();
    if b == T::zero() {
        return;
    }
    let phase = apq / b;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (b + b);
    let t = {
        let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            -t
        } else {
            t
        }
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let n = m.dim();
    let cs = real(c);
    let s_ph = phase * s; // s e^{iφ}
    let s_ph_c = s_ph.conj(); // s e^{-iφ}

    // columns: A ← A J
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = cs * akp - s_ph_c * akq;
        m[(k, q)] = s_ph * akp + cs * akq;
    }
    // rows: A ← J† A
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = cs * apk - s_ph * aqk;
        m[(q, k)] = s_ph_c * apk + cs * aqk;
    }
    m[(p, q)] = C::zero();
    m[(q, p)] = C::zero();
    m[(p, p)] = real(app - t * b);
    m[(q, q)] = real(aqq + t * b);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = cs * vkp - s_ph_c * vkq;
        v[(k, q)] = s_ph * vkp + cs * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{pauli_x, pauli_y};
    use crate::numerics::random::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    #[test]
    fn diagonal_input_sorted_with_permutation_vectors() {
        let a = M::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let e = eig_hermitian(&a, &policy()).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);
        for (col, row) in [(0, 1), (1, 2), (2, 0)] {
            assert_eq!(e.eigenvectors[(row, col)].norm(), 1.0);
        }
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let e = eig_hermitian(&pauli_x::<f64>(), &policy()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y_has_complex_eigenvectors() {
        let y = pauli_y::<f64>();
        let e = eig_hermitian(&y, &policy()).unwrap();
        assert!(e.reconstruct().max_abs_diff(&y) < 1e-14);
        assert!(e.eigenvectors.imaginary_error() > 0.1);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a: M = random_hermitian(6, &mut rng);
        let e = eig_hermitian(&a, &policy()).unwrap();
        assert!(e.reconstruct().max_abs_diff(&a) <= 1e-10 * a.max_abs());
        assert!(e.eigenvectors.is_unitary(1e-10));
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn real_symmetric_input_gives_real_eigenvectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a: M = random_hermitian(7, &mut rng).real_part();
        let e = eig_hermitian(&a, &policy()).unwrap();
        assert_eq!(e.eigenvectors.imaginary_error(), 0.0);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut a = M::identity(2);
        a[(0, 1)] = C::new(1.0, 0.0);
        assert!(matches!(
            eig_hermitian(&a, &policy()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn zero_sweep_budget_reports_no_convergence() {
        let p = NumericPolicy {
            jacobi_max_sweeps: 0,
            ..NumericPolicy::default()
        };
        assert!(matches!(
            eig_hermitian(&pauli_x::<f64>(), &p),
            Err(Error::NoConvergence { sweeps: 0 })
        ));
        // already diagonal needs no sweep at all
        assert!(eig_hermitian(&M::identity(3), &p).is_ok());
    }

    #[test]
    fn func_identity_and_exponential() {
        let a = M::from_real_diagonal(&[1.0, 2.0]);
        let f = func_hermitian(&a, real, &policy()).unwrap();
        assert_eq!(f, a);
        let a = M::from_real_diagonal(&[0.0, 2f64.ln()]);
        let f = func_hermitian(&a, |x| real((-x).exp()), &policy()).unwrap();
        assert!(f.max_abs_diff(&M::from_real_diagonal(&[1.0, 0.5])) < 1e-15);
    }

    #[test]
    fn exp_i_ht_unitary_and_commuting() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: M = random_hermitian(5, &mut rng);
        let t = 0.7;
        let u = func_hermitian(&a, |x| C::from_polar(1.0, -x * t), &policy()).unwrap();
        assert!(u.is_unitary(1e-10));
        assert!(u.commutator(&a).max_abs() <= 1e-10);
    }

    #[test]
    fn degenerate_blocks_group_close_levels() {
        let a = M::from_real_diagonal(&[0.0, 1.0, 1.0 + 1e-12, 2.0, 2.0, 2.0]);
        let e = eig_hermitian(&a, &policy()).unwrap();
        let blocks = e.degenerate_blocks(1e-9, a.max_abs());
        assert_eq!(blocks, vec![0..1, 1..3, 3..6]);
        let p = e.spectral_projector(3..6);
        assert!((&p * &p).max_abs_diff(&p) < 1e-15);
        assert!((p.trace().re - 3.0).abs() < 1e-15);
    }

    #[test]
    fn f32_instantiation() {
        let a = ComplexMatrix::<f32>::from_real_fn(3, |i, j| ((i + 1) * (j + 1)) as f32 * 0.1);
        let e = eig_hermitian(&a, &policy()).unwrap();
        assert!(e.reconstruct().max_abs_diff(&a) < 1e-5);
    }
}
