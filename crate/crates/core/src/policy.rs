//! Numeric policy: every tolerance used by the checks lives here.
//!
//! Values are stored as `f64` and converted at the point of use, so one policy
//! serves both scalar widths. [`NumericPolicy::scaled`] multiplies every
//! comparison tolerance by a common factor (the convergence and underflow
//! thresholds are left alone).

#[derive(Debug, Clone, PartialEq)]
pub struct NumericPolicy {
    /// Max elementwise |A - A†| accepted as Hermitian.
    pub hermitian: f64,
    /// Jacobi sweep budget.
    pub jacobi_max_sweeps: usize,
    /// Jacobi stops once off-diagonal Frobenius mass < this * ‖A‖_F.
    pub jacobi_rel: f64,
    /// Relative eigenvalue gap below which levels share a degenerate block.
    pub degeneracy_rel: f64,
    pub unitarity: f64,
    /// Commutator tolerance, relative to ‖H‖_max · ‖V‖_max.
    pub commutator_rel: f64,
    pub tr_invariance: f64,
    pub projector: f64,
    /// Region effective-Hamiltonian identity tolerance.
    pub region_identity: f64,
    /// Max probability mass a prepared or measured state may hold outside its region.
    pub region_leak: f64,
    pub norm: f64,
    pub density: f64,
    /// Residual tolerance for eigenstate checks (‖Hψ − Eψ‖).
    pub eigen_residual: f64,
    /// Probabilities below this make a ratio vacuous.
    pub vacuous_probability: f64,
    /// Log-space residual for the exact Crooks-type equalities.
    pub crooks: f64,
    /// Eigenstate-limit right-hand side against the `Ẽ` form.
    pub rhs_agreement: f64,
    /// Allowed imaginary part of the off-diagonal log ratio.
    pub offdiag_phase: f64,
    pub global_rel: f64,
    pub global_abs: f64,
    /// Factorisability residual accepted as exact.
    pub factorisability: f64,
    /// Choi positivity and trace preservation of induced channels.
    pub channel: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            jacobi_max_sweeps: 100,
            jacobi_rel: 1e-14,
            degeneracy_rel: 1e-9,
            unitarity: 1e-10,
            commutator_rel: 1e-9,
            tr_invariance: 1e-9,
            projector: 1e-12,
            region_identity: 1e-10,
            region_leak: 1e-8,
            norm: 1e-12,
            density: 1e-10,
            eigen_residual: 1e-10,
            vacuous_probability: 1e-300,
            crooks: 1e-9,
            rhs_agreement: 1e-12,
            offdiag_phase: 1e-9,
            global_rel: 1e-11,
            global_abs: 1e-14,
            factorisability: 1e-10,
            channel: 1e-10,
        }
    }
}

impl NumericPolicy {
    /// Copy with every comparison tolerance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut p = self.clone();
        for t in [
            &mut p.hermitian,
            &mut p.unitarity,
            &mut p.commutator_rel,
            &mut p.tr_invariance,
            &mut p.projector,
            &mut p.region_identity,
            &mut p.region_leak,
            &mut p.norm,
            &mut p.density,
            &mut p.eigen_residual,
            &mut p.crooks,
            &mut p.rhs_agreement,
            &mut p.offdiag_phase,
            &mut p.global_rel,
            &mut p.global_abs,
            &mut p.factorisability,
            &mut p.channel,
        ] {
            *t *= factor;
        }
        p
    }
}
