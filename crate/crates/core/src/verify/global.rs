//! Invariance of `Q(A, B) = Tr[B V K A K V†]`, `K = e^{-H/2T}`, under
//! `(A, B) → (T B, T A)`.

use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, ComplexMatrix};
use crate::policy::NumericPolicy;
use crate::protocol::relative_commutator;
use crate::reversal::{reverse, tr_violation, ReversalBasis};
use crate::scalar::{real, Scalar, C};
use crate::thermal::Temperature;

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalInvarianceReport<T: Scalar> {
    /// `Q(ρ_i, ρ_f)`, up to the common factor `e^{λ_min/T}`.
    pub q_forward: C<T>,
    /// `Q(T ρ_f, T ρ_i)`, same scaling.
    pub q_reverse: C<T>,
    pub residual: T,
    /// `global_rel · |q_forward| + global_abs`.
    pub tolerance: T,
}

impl<T: Scalar> GlobalInvarianceReport<T> {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Premises of the invariance that `h` and `v` fail, if any.
pub fn global_invariance_violations<T: Scalar>(
    h: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
    basis: &ReversalBasis<T>,
    policy: &NumericPolicy,
) -> Vec<String> {
    let mut out = Vec::new();
    let th = tr_violation(h, basis);
    if th > T::lit(policy.tr_invariance) * h.max_abs().max(T::one()) {
        out.push(format!(
            "H is not time-reversal invariant (‖H^T − H‖ = {:e})",
            th.to_f64_lossy()
        ));
    }
    let tv = tr_violation(v, basis);
    if tv > T::lit(policy.tr_invariance) {
        out.push(format!(
            "V is not time-reversal invariant (‖V^T − V‖ = {:e})",
            tv.to_f64_lossy()
        ));
    }
    let c = relative_commutator(h, v);
    if c > T::lit(policy.commutator_rel) {
        out.push(format!("[H, V] ≠ 0 (relative {:e})", c.to_f64_lossy()));
    }
    out
}

/// `Tr[b V K a K V†]` with `K = e^{-(H − λ_min)/2T}`.
pub fn global_quantity<T: Scalar>(
    h: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    temperature: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<C<T>> {
    let e = eig_hermitian(h, policy)?;
    let shift = e.eigenvalues[0];
    let half = temperature.beta() * T::lit(0.5);
    let k = e.map(|l| real((-(l - shift) * half).exp()));
    Ok((b * &a.conjugate_by(&(v * &k))).trace())
}

pub fn check_global_invariance<T: Scalar>(
    h: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
    rho_i: &ComplexMatrix<T>,
    rho_f: &ComplexMatrix<T>,
    temperature: Temperature<T>,
    basis: &ReversalBasis<T>,
    policy: &NumericPolicy,
) -> Result<GlobalInvarianceReport<T>> {
    let d = h.dim();
    for m in [v, rho_i, rho_f, basis.basis()] {
        m.check_dim(d)?;
    }
    let violations = global_invariance_violations(h, v, basis, policy);
    if !violations.is_empty() {
        return Err(Error::PreconditionViolated(violations));
    }
    let q_forward = global_quantity(h, v, rho_i, rho_f, temperature, policy)?;
    let q_reverse = global_quantity(
        h,
        v,
        &reverse(rho_f, basis),
        &reverse(rho_i, basis),
        temperature,
        policy,
    )?;
    Ok(GlobalInvarianceReport {
        q_forward,
        q_reverse,
        residual: (q_forward - q_reverse).norm(),
        tolerance: T::lit(policy.global_rel) * q_forward.norm() + T::lit(policy.global_abs),
    })
}
