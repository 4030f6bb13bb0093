use crate::error::Result;
use crate::model::{MachineState, Region, Setup};
use crate::numerics::{eig_hermitian, ComplexMatrix};
use crate::policy::NumericPolicy;
use crate::scalar::{real, Scalar};
use crate::thermal::Temperature;

/// `exp(-(H − shift)·scale)`, with `shift` the smallest eigenvalue. Returns the
/// shift too so callers can keep products consistent.
fn shifted_exp<T: Scalar>(
    h: &ComplexMatrix<T>,
    scale: T,
    policy: &NumericPolicy,
) -> Result<(ComplexMatrix<T>, T)> {
    let e = eig_hermitian(h, policy)?;
    let shift = e.eigenvalues[0];
    Ok((e.map(|l| real((-(l - shift) * scale).exp())), shift))
}

/// How far `e^{-H/2T}(|ψ⟩⟨ψ| ⊗ 1)e^{-H/2T}` is from
/// `e^{-H_M/2T}|ψ⟩⟨ψ|e^{-H_M/2T} ⊗ e^{-H_S^k/T}`, in max norm relative to the
/// left side. Exact block-structured setups give roundoff.
///
/// All three exponentials are shifted by their ground energies, with the
/// full-space shift set to the sum of the other two, which rescales both sides
/// by the same factor.
pub fn factorisability_residual<T: Scalar>(
    setup: &Setup<T>,
    psi: &MachineState<T>,
    region: Region,
    temperature: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<T> {
    let half = temperature.beta() * T::lit(0.5);
    let (k_m, shift_m) = shifted_exp(&setup.h_machine, half, policy)?;
    let (k_s, shift_s) = shifted_exp(setup.h_system_in(region), temperature.beta(), policy)?;
    let h = eig_hermitian(&setup.h_total, policy)?;
    let shift = shift_m + shift_s;
    let k = h.map(|l| real((-(l - shift) * half).exp()));

    let rho = psi.density();
    let lhs = &(&k * &setup.embed_machine(&rho)) * &k;
    let rhs = rho.conjugate_by(&k_m).kron(&k_s);
    let scale = lhs.max_abs();
    if scale == T::zero() {
        return Ok(T::zero());
    }
    Ok(lhs.max_abs_diff(&rhs) / scale)
}
