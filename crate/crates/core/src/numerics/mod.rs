//! Dense complex linear-algebra kernel.

pub mod eigen;
pub mod matrix;
pub mod random;
pub mod space;

pub use eigen::{eig_hermitian, func_hermitian, EigenDecomposition};
pub use matrix::{
    basis_ket, inner, kron_ket, norm, normalized, pauli_x, pauli_y, pauli_z, ComplexMatrix, Ket,
};
pub use random::{random_density, random_hermitian, random_ket, random_real_symmetric};
pub use space::{partial_trace, tensor, HilbertSpace};
