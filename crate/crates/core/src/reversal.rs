//! Time reversal as a transpose taken in a declared orthonormal basis.
//!
//! For a basis `B` (columns are the basis vectors) the map is
//! `σ ↦ B (B†σB)^T B†`; on kets it is `ψ ↦ B conj(B†ψ)`. In the computational
//! basis this is plain transposition, i.e. complex conjugation of Hermitian
//! operators.

use crate::error::{Error, Result};
use crate::model::{MachineState, Setup, SetupKind};
use crate::numerics::{ComplexMatrix, Ket};
use crate::policy::NumericPolicy;
use crate::scalar::{Scalar, C};

#[derive(Debug, Clone)]
pub struct ReversalBasis<T: Scalar> {
    basis: ComplexMatrix<T>,
    description: String,
    is_identity: bool,
}

impl<T: Scalar> ReversalBasis<T> {
    /// The computational basis of a `dim`-dimensional space.
    pub fn computational(dim: usize, description: impl Into<String>) -> Self {
        Self {
            basis: ComplexMatrix::identity(dim),
            description: description.into(),
            is_identity: true,
        }
    }

    /// A basis given by the columns of `basis`, which must be unitary.
    pub fn new(
        basis: ComplexMatrix<T>,
        description: impl Into<String>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let err = basis.unitarity_error();
        if err > T::lit(policy.unitarity) {
            return Err(Error::InvalidParameter(format!(
                "reversal basis is not unitary (error {:e})",
                err.to_f64_lossy()
            )));
        }
        let is_identity = basis.max_abs_diff(&ComplexMatrix::identity(basis.dim())) == T::zero();
        Ok(Self {
            basis,
            description: description.into(),
            is_identity,
        })
    }

    /// Default basis for a built setup: the product basis the builders write
    /// their Hamiltonians in.
    pub fn for_setup(setup: &Setup<T>) -> Self {
        let description = match setup.kind {
            SetupKind::Ladder { .. } => "control ⊗ ladder ⊗ σ_z product basis",
            SetupKind::Lattice { .. } => "position ⊗ σ_z product basis",
        };
        Self::computational(setup.space.dim(), description)
    }

    /// Machine-only part of [`ReversalBasis::for_setup`].
    pub fn machine_for_setup(setup: &Setup<T>) -> Self {
        let description = match setup.kind {
            SetupKind::Ladder { .. } => "control ⊗ ladder basis",
            SetupKind::Lattice { .. } => "position basis",
        };
        Self::computational(setup.machine_dim(), description)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            basis: self.basis.kron(&other.basis),
            description: format!("{} ⊗ {}", self.description, other.description),
            is_identity: self.is_identity && other.is_identity,
        }
    }

    pub fn basis(&self) -> &ComplexMatrix<T> {
        &self.basis
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Expresses `a` in this basis: `B† a B`.
    pub fn to_basis(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        if self.is_identity {
            a.clone()
        } else {
            a.conjugate_by(&self.basis.adjoint())
        }
    }

    /// Inverse of [`to_basis`](Self::to_basis): `B a B†`.
    pub fn from_basis(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        if self.is_identity {
            a.clone()
        } else {
            a.conjugate_by(&self.basis)
        }
    }
}

/// Transpose of `sigma` in `basis`.
pub fn reverse<T: Scalar>(sigma: &ComplexMatrix<T>, basis: &ReversalBasis<T>) -> ComplexMatrix<T> {
    basis.from_basis(&basis.to_basis(sigma).transpose())
}

/// Ket form of [`reverse`]: `reverse(|ψ⟩⟨ψ|) = |ψ'⟩⟨ψ'|` with `ψ' = B conj(B†ψ)`.
pub fn reverse_ket<T: Scalar>(psi: &[C<T>], basis: &ReversalBasis<T>) -> Ket<T> {
    if basis.is_identity {
        return psi.iter().map(|z| z.conj()).collect();
    }
    let coords = basis.basis.adjoint().apply(psi);
    let conj: Ket<T> = coords.iter().map(|z| z.conj()).collect();
    basis.basis.apply(&conj)
}

pub fn reverse_state<T: Scalar>(
    psi: &MachineState<T>,
    basis: &ReversalBasis<T>,
) -> MachineState<T> {
    MachineState {
        vector: reverse_ket(&psi.vector, basis),
        label: format!("T[{}]", psi.label),
    }
}

/// Max-norm distance between `a` and its reversal.
pub fn tr_violation<T: Scalar>(a: &ComplexMatrix<T>, basis: &ReversalBasis<T>) -> T {
    let b = basis.to_basis(a);
    b.max_abs_diff(&b.transpose())
}

/// `true` iff `‖reverse(a) − a‖_max ≤ tol`.
pub fn is_tr_invariant<T: Scalar>(a: &ComplexMatrix<T>, basis: &ReversalBasis<T>, tol: T) -> bool {
    tr_violation(a, basis) <= tol
}
