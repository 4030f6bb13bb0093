//! Gibbs states, free energies, the generalized energy `Ẽ`, and the Gibbs map.
//!
//! Units: ħ = k_B = 1, so temperature carries energy units. Partition sums are
//! evaluated in log space (`ln Σ w_k e^{-E_k/T}` via log-sum-exp) so `Ẽ` stays
//! finite when `T` is far below the spectral width.
//!
//! `Ẽ_ρ(H, T)` is the cumulant generating function of the energy statistics of
//! `ρ` evaluated at `-1/T`; nothing here relies on that reading.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::MachineState;
use crate::numerics::{eig_hermitian, inner, normalized, ComplexMatrix, EigenDecomposition};
use crate::policy::NumericPolicy;
use crate::scalar::{real, Scalar};

/// Strictly positive temperature (energy units).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Temperature<T: Scalar>(T);

impl<T: Scalar> Temperature<T> {
    pub fn new(value: T) -> Result<Self> {
        if value > T::zero() && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter(format!(
                "temperature must be > 0, got {value}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    #[inline]
    pub fn beta(self) -> T {
        T::one() / self.0
    }
}

fn log_sum_exp<T: Scalar>(terms: impl Iterator<Item = T>) -> Option<T> {
    let terms: Vec<T> = terms.collect();
    let max = terms.iter().copied().fold(T::neg_infinity(), T::max);
    if !max.is_finite() {
        return None;
    }
    let s: T = terms.iter().map(|&x| (x - max).exp()).sum();
    Some(max + s.ln())
}

/// `ln Z` with `Z = Tr exp(-H/T)`.
pub fn log_partition<T: Scalar>(
    h: &ComplexMatrix<T>,
    t: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<T> {
    let e = eig_hermitian(h, policy)?;
    Ok(log_sum_exp(e.eigenvalues.iter().map(|&l| -l * t.beta())).expect("finite spectrum"))
}

pub fn partition_function<T: Scalar>(
    h: &ComplexMatrix<T>,
    t: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<T> {
    Ok(log_partition(h, t, policy)?.exp())
}

/// `F = -T ln Tr exp(-H/T)`.
pub fn free_energy<T: Scalar>(
    h: &ComplexMatrix<T>,
    t: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<T> {
    Ok(-t.value() * log_partition(h, t, policy)?)
}

/// `γ(H) = exp(-H/T) / Z`.
pub fn gibbs_state<T: Scalar>(
    h: &ComplexMatrix<T>,
    t: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<ComplexMatrix<T>> {
    let e = eig_hermitian(h, policy)?;
    let ln_z = log_sum_exp(e.eigenvalues.iter().map(|&l| -l * t.beta())).expect("finite spectrum");
    Ok(e.map(|l| real((-l * t.beta() - ln_z).exp())))
}

/// `ln Σ_k w_k exp(-E_k/T)` for eigen-populations `w`.
fn log_z_tilde<T: Scalar>(e: &EigenDecomposition<T>, w: &[T], t: Temperature<T>) -> Result<T> {
    log_sum_exp(
        e.eigenvalues
            .iter()
            .zip(w)
            .filter(|(_, &wk)| wk > T::zero())
            .map(|(&l, &wk)| wk.ln() - l * t.beta()),
    )
    .ok_or(Error::DegenerateSupport)
}

fn check_density<T: Scalar>(rho: &ComplexMatrix<T>, policy: &NumericPolicy) -> Result<()> {
    let tol = T::lit(policy.density);
    if rho.hermiticity_error() > tol
        || (rho.trace().re - T::one()).abs() > tol
        || rho.trace().im.abs() > tol
    {
        return Err(Error::InvalidParameter(
            "expected a unit-trace Hermitian density matrix".into(),
        ));
    }
    Ok(())
}

/// `Z̃_ρ(H, T) = Tr[exp(-H/T) ρ]`.
pub fn z_tilde<T: Scalar>(
    rho: &ComplexMatrix<T>,
    h: &ComplexMatrix<T>,
    t: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<T> {
    let e = eig_hermitian(h, policy)?;
    Ok(log_z_tilde(&e, &e.populations(rho), t)?.exp())
}

/// `Ẽ_ρ(H, T) = -T ln Tr[exp(-H/T) ρ]`.
pub fn e_tilde<T: Scalar>(
    rho: &ComplexMatrix<T>,
    h: &ComplexMatrix<T>,
    t: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<T> {
    check_density(rho, policy)?;
    rho.check_dim(h.dim())?;
    let e = eig_hermitian(h, policy)?;
    Ok(-t.value() * log_z_tilde(&e, &e.populations(rho), t)?)
}

/// `Ẽ` of a pure state. Populations are taken as `|⟨k|ψ⟩|²`, whose rounding
/// error is quadratic in the amplitude error; high-lying eigenstates at low
/// `T` stay accurate where the density-matrix route would not.
pub fn e_tilde_pure<T: Scalar>(
    psi: &MachineState<T>,
    h: &ComplexMatrix<T>,
    t: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<T> {
    h.check_dim(psi.dim())?;
    let e = eig_hermitian(h, policy)?;
    let w: Vec<T> = (0..e.dim())
        .map(|k| inner(&e.eigenvector(k), &psi.vector).norm_sqr())
        .collect();
    Ok(-t.value() * log_z_tilde(&e, &w, t)?)
}

/// Gibbs map `G_ρ = e^{-H/2T} ρ e^{-H/2T} / Z̃_ρ`.
pub fn gibbs_map<T: Scalar>(
    rho: &ComplexMatrix<T>,
    h: &ComplexMatrix<T>,
    t: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<ComplexMatrix<T>> {
    check_density(rho, policy)?;
    rho.check_dim(h.dim())?;
    let e = eig_hermitian(h, policy)?;
    let shift = e.eigenvalues[0];
    let half_beta = t.beta() * T::lit(0.5);
    let k = e.map(|l| real((-(l - shift) * half_beta).exp()));
    let out = &(&k * rho) * &k;
    let tr = out.trace().re;
    if !(tr > T::zero()) || tr.is_subnormal() {
        return Err(Error::DegenerateSupport);
    }
    Ok(out.scale_real(T::one() / tr))
}

/// `|φ⟩ ∝ exp(-H_M/2T) |ψ⟩`, normalized. The pure-state Gibbs map.
pub fn pair_state<T: Scalar>(
    psi: &MachineState<T>,
    h_machine: &ComplexMatrix<T>,
    t: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<MachineState<T>> {
    h_machine.check_dim(psi.dim())?;
    let e = eig_hermitian(h_machine, policy)?;
    let shift = e.eigenvalues[0];
    let half_beta = t.beta() * T::lit(0.5);
    let k = e.map(|l| real((-(l - shift) * half_beta).exp()));
    let phi = k.apply(&psi.vector);
    let v = normalized(&phi).ok_or(Error::DegenerateSupport)?;
    if v.iter().all(|z| z.is_zero()) {
        return Err(Error::DegenerateSupport);
    }
    Ok(MachineState {
        vector: v,
        label: format!("G[{}]", psi.label),
    })
}

/// Dephases `ρ` in the eigenbasis of `H` using spectral projectors, so the
/// result does not depend on the eigenvector choice inside degenerate levels.
pub fn dephase<T: Scalar>(
    rho: &ComplexMatrix<T>,
    h: &ComplexMatrix<T>,
    policy: &NumericPolicy,
) -> Result<ComplexMatrix<T>> {
    let e = eig_hermitian(h, policy)?;
    let mut out = ComplexMatrix::zeros(rho.dim());
    for block in e.degenerate_blocks(T::lit(policy.degeneracy_rel), h.max_abs()) {
        let p = e.spectral_projector(block);
        out = &out + &(&(&p * rho) * &p);
    }
    Ok(out)
}
