//! Driven bipartite quantum setups (machine ⊗ system) and numerical checks of
//! the coherent Crooks equality and its corollaries.
//!
//! Everything is generic over the real scalar type `T: Scalar` (`f32` or
//! `f64`). The `*64` aliases below are what most callers want.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod numerics;
pub mod policy;
pub mod protocol;
pub mod reversal;
pub mod scalar;
pub mod thermal;
pub mod verify;

pub use error::{Error, Result};
pub use policy::NumericPolicy;
pub use scalar::{Scalar, C};

pub type Matrix64 = numerics::ComplexMatrix<f64>;
pub type Matrix32 = numerics::ComplexMatrix<f32>;
pub type Ket64 = numerics::Ket<f64>;
pub type Setup64 = model::Setup<f64>;
pub type Setup32 = model::Setup<f32>;
pub type MachineState64 = model::MachineState<f64>;
pub type Temperature64 = thermal::Temperature<f64>;
pub type Temperature32 = thermal::Temperature<f32>;
pub type ReversalBasis64 = reversal::ReversalBasis<f64>;
pub type CrooksReport64 = verify::CrooksReport<f64>;
