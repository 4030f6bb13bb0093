//! Dense square complex matrices and kets.
//!
//! Storage is row-major. Tensor products use the left-factor-major index
//! convention `index = i_A * dim_B + i_B`, which every other module relies on.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar, C};

/// Column vector of complex amplitudes.
pub type Ket<T> = Vec<C<T>>;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Scalar> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4e}{:+.4e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C::one();
        }
        m
    }

    /// Builds a matrix from row-major entries; fails unless `entries.len()` is a
    /// perfect square.
    pub fn from_row_major(entries: Vec<C<T>>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self::from_fn(dim, |i, j| real(f(i, j)))
    }

    pub fn from_diagonal(diag: &[C<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let d: Vec<C<T>> = diag.iter().map(|&x| real(x)).collect();
        Self::from_diagonal(&d)
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[C<T>], b: &[C<T>]) -> Self {
        assert_eq!(
            a.len(),
            b.len(),
            "outer product of kets with different lengths"
        );
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &[C<T>]) -> Self {
        Self::outer(psi, psi)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<C<T>> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn column(&self, j: usize) -> Ket<T> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(real(s))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Max elementwise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "max_abs_diff on different dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// Max elementwise |A - A†|.
    pub fn hermiticity_error(&self) -> T {
        let mut err = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Max elementwise |U†U - 1|.
    pub fn unitarity_error(&self) -> T {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_error() <= tol
    }

    /// Max elementwise imaginary part.
    pub fn imaginary_error(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.im.abs()))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Kronecker product, left-factor-major: `(A⊗B)[iA*dB+iB, jA*dB+jB] = A[iA,jA]·B[iB,jB]`.
    pub fn kron(&self, other: &Self) -> Self {
        let db = other.dim;
        Self::from_fn(self.dim * db, |i, j| {
            self[(i / db, j / db)] * other[(i % db, j % db)]
        })
    }

    pub fn apply(&self, v: &[C<T>]) -> Ket<T> {
        assert_eq!(v.len(), self.dim, "matrix-vector dimension mismatch");
        (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter().zip(v).map(|(a, b)| *a * *b).sum()
            })
            .collect()
    }

    /// `A·B·A†`.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        &(a * self) * &a.adjoint()
    }

    /// `⟨u|A|v⟩`.
    pub fn sandwich(&self, u: &[C<T>], v: &[C<T>]) -> C<T> {
        inner(u, &self.apply(v))
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = real(T::lit(0.5));
        (self + &self.adjoint()).scale(half)
    }

    pub fn real_part(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| real(z.re)).collect(),
        }
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim,
            })
        }
    }
}

impl<T: Scalar> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix product of different dimensions");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o = *o + a * *b;
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix sum of different dimensions");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(
            self.dim, rhs.dim,
            "matrix difference of different dimensions"
        );
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl<T: Scalar> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.scale(real(-T::one()))
    }
}

/// `⟨a|b⟩`, conjugate-linear in the first slot.
pub fn inner<T: Scalar>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    assert_eq!(
        a.len(),
        b.len(),
        "inner product of kets with different lengths"
    );
    a.iter().zip(b).map(|(x, y)| x.conj() * *y).sum()
}

pub fn norm<T: Scalar>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Normalizes `v`; `None` when the norm is zero or not finite.
pub fn normalized<T: Scalar>(v: &[C<T>]) -> Option<Ket<T>> {
    let n = norm(v);
    if n > T::zero() && n.is_finite() {
        Some(v.iter().map(|z| *z / n).collect())
    } else {
        None
    }
}

pub fn kron_ket<T: Scalar>(a: &[C<T>], b: &[C<T>]) -> Ket<T> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| *x * *y))
        .collect()
}

pub fn basis_ket<T: Scalar>(dim: usize, index: usize) -> Ket<T> {
    let mut v = vec![C::zero(); dim];
    v[index] = C::one();
    v
}

/// Pauli matrices in the (|0⟩, |1⟩) basis. `pauli_z()` is diag(1, -1).
pub fn pauli_x<T: Scalar>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real_fn(2, |i, j| if i != j { T::one() } else { T::zero() })
}

pub fn pauli_y<T: Scalar>() -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 1)] = C::new(T::zero(), -T::one());
    m[(1, 0)] = C::new(T::zero(), T::one());
    m
}

pub fn pauli_z<T: Scalar>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real_diagonal(&[T::one(), -T::one()])
}
