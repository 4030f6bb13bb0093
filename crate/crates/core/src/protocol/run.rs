//! Prepare / evolve / measure runs and their transition probabilities.

use crate::error::{Error, Result};
use crate::model::{check_region, MachineState, Region, Setup};
use crate::numerics::{partial_trace, ComplexMatrix};
use crate::policy::NumericPolicy;
use crate::reversal::{reverse_state, ReversalBasis};
use crate::scalar::{Scalar, C};
use crate::thermal::{gibbs_state, pair_state, Temperature};

use super::unitary::unitary_violations;

/// Whether the equalities are expected to hold exactly for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Block-structured setups driven by an externally chosen unitary.
    Exact,
    /// `V = exp(-iHt)`; the equalities hold only approximately.
    Autonomous,
}

/// `Tr_S[V (X ⊗ σ) V†]` for an arbitrary machine operator `X`.
pub fn machine_output<T: Scalar>(
    setup: &Setup<T>,
    v: &ComplexMatrix<T>,
    x: &ComplexMatrix<T>,
    sigma: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    x.check_dim(setup.machine_dim())?;
    sigma.check_dim(setup.system_dim())?;
    let joint = &(v * &x.kron(sigma)) * &v.adjoint();
    partial_trace(&joint, &setup.space, &setup.machine_factors())
}

/// `Tr[(|m⟩⟨m| ⊗ 1) V (ρ ⊗ σ) V†]` for a machine density matrix `ρ`.
pub fn transition_probability_mixed<T: Scalar>(
    setup: &Setup<T>,
    v: &ComplexMatrix<T>,
    rho: &ComplexMatrix<T>,
    sigma: &ComplexMatrix<T>,
    measured: &MachineState<T>,
) -> Result<T> {
    let out = machine_output(setup, v, rho, sigma)?;
    Ok(out.sandwich(&measured.vector, &measured.vector).re)
}

/// Pure-state form of [`transition_probability_mixed`].
pub fn transition_probability<T: Scalar>(
    setup: &Setup<T>,
    v: &ComplexMatrix<T>,
    prepared: &MachineState<T>,
    sigma: &ComplexMatrix<T>,
    measured: &MachineState<T>,
) -> Result<T> {
    transition_probability_mixed(setup, v, &prepared.density(), sigma, measured)
}

/// One forward/reverse pair of the protocol at a fixed temperature.
///
/// Built from the measured states `ψ_i`, `ψ_f`; the prepared states are
/// `φ = pair_state(ψ)`. The reverse process prepares `T φ_f` and measures
/// `T ψ_i`.
#[derive(Debug, Clone)]
pub struct ProtocolRun<'a, T: Scalar> {
    pub setup: &'a Setup<T>,
    pub v: &'a ComplexMatrix<T>,
    pub variant: Variant,
    pub temperature: Temperature<T>,
    pub basis: ReversalBasis<T>,
    pub machine_basis: ReversalBasis<T>,
    pub psi_i: MachineState<T>,
    pub psi_f: MachineState<T>,
    pub phi_i: MachineState<T>,
    pub phi_f: MachineState<T>,
    pub gamma_i: ComplexMatrix<T>,
    pub gamma_f: ComplexMatrix<T>,
}

impl<'a, T: Scalar> ProtocolRun<'a, T> {
    /// Checks unitarity, energy conservation and time-reversal invariance of
    /// `v` in the setup's default basis, pairs the states and checks that all
    /// four machine states sit in their regions.
    pub fn new(
        setup: &'a Setup<T>,
        v: &'a ComplexMatrix<T>,
        variant: Variant,
        temperature: Temperature<T>,
        psi_i: MachineState<T>,
        psi_f: MachineState<T>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let basis = ReversalBasis::for_setup(setup);
        let machine_basis = ReversalBasis::machine_for_setup(setup);
        Self::with_basis(
            setup,
            v,
            variant,
            temperature,
            psi_i,
            psi_f,
            basis,
            machine_basis,
            policy,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_basis(
        setup: &'a Setup<T>,
        v: &'a ComplexMatrix<T>,
        variant: Variant,
        temperature: Temperature<T>,
        psi_i: MachineState<T>,
        psi_f: MachineState<T>,
        basis: ReversalBasis<T>,
        machine_basis: ReversalBasis<T>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        v.check_dim(setup.space.dim())?;
        basis.basis().check_dim(setup.space.dim())?;
        machine_basis.basis().check_dim(setup.machine_dim())?;
        for psi in [&psi_i, &psi_f] {
            if psi.dim() != setup.machine_dim() {
                return Err(Error::DimensionMismatch {
                    expected: setup.machine_dim(),
                    found: psi.dim(),
                });
            }
        }
        let violations = unitary_violations(&setup.h_total, v, &basis, policy);
        if !violations.is_empty() {
            return Err(Error::PreconditionViolated(violations));
        }
        let phi_i = pair_state(&psi_i, &setup.h_machine, temperature, policy)?;
        let phi_f = pair_state(&psi_f, &setup.h_machine, temperature, policy)?;
        check_region(setup, &psi_i, Region::Initial, policy)?;
        check_region(setup, &phi_i, Region::Initial, policy)?;
        check_region(setup, &psi_f, Region::Final, policy)?;
        check_region(setup, &phi_f, Region::Final, policy)?;
        let gamma_i = gibbs_state(&setup.h_system_i, temperature, policy)?;
        let gamma_f = gibbs_state(&setup.h_system_f, temperature, policy)?;
        Ok(Self {
            setup,
            v,
            variant,
            temperature,
            basis,
            machine_basis,
            psi_i,
            psi_f,
            phi_i,
            phi_f,
            gamma_i,
            gamma_f,
        })
    }

    /// Prepared and measured states of the reverse process: `(T φ_f, T ψ_i)`.
    pub fn reverse_pair(&self) -> (MachineState<T>, MachineState<T>) {
        (
            reverse_state(&self.phi_f, &self.machine_basis),
            reverse_state(&self.psi_i, &self.machine_basis),
        )
    }
}

/// `Tr[(|ψ_f⟩⟨ψ_f| ⊗ 1) V (|φ_i⟩⟨φ_i| ⊗ γ(H_S^i)) V†]`.
pub fn forward_probability<T: Scalar>(run: &ProtocolRun<T>) -> Result<T> {
    transition_probability(run.setup, run.v, &run.phi_i, &run.gamma_i, &run.psi_f)
}

/// `Tr[(T|ψ_i⟩⟨ψ_i| ⊗ 1) V (T|φ_f⟩⟨φ_f| ⊗ γ(H_S^f)) V†]`.
pub fn reverse_probability<T: Scalar>(run: &ProtocolRun<T>) -> Result<T> {
    let (prepared, measured) = run.reverse_pair();
    transition_probability(run.setup, run.v, &prepared, &run.gamma_f, &measured)
}

/// Amplitude `⟨a| Tr_S[V (X ⊗ σ) V†] |b⟩`.
pub fn transition_amplitude<T: Scalar>(
    setup: &Setup<T>,
    v: &ComplexMatrix<T>,
    x: &ComplexMatrix<T>,
    sigma: &ComplexMatrix<T>,
    a: &MachineState<T>,
    b: &MachineState<T>,
) -> Result<C<T>> {
    Ok(machine_output(setup, v, x, sigma)?.sandwich(&a.vector, &b.vector))
}
