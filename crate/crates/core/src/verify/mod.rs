//! Residuals for every equality the framework predicts: coherent Crooks, its
//! eigenstate limit, the coherence (off-diagonal) form, the global
//! invariance behind all of them, and factorisability.
//!
//! Ratios are compared in log space throughout.

mod crooks;
mod factor;
mod global;
mod offdiag;

pub use crooks::{
    check_classical_limit, check_coherent_crooks, free_energy_change,
    gibbs_map_connection_residual, ClassicalReport, CrooksReport, CrooksStatus,
};
pub use factor::factorisability_residual;
pub use global::{
    check_global_invariance, global_invariance_violations, global_quantity, GlobalInvarianceReport,
};
pub use offdiag::{check_off_diagonal, OffDiagonalReport, SystemStateConvention};
