//! Coherence version of the equality: energy coherences of the machine are
//! transported like populations.

use crate::error::{Error, Result};
use crate::model::{eigen_energy, machine_eigenstate, MachineState, Region, Setup};
use crate::numerics::ComplexMatrix;
use crate::policy::NumericPolicy;
use crate::protocol::transition_amplitude;
use crate::scalar::{Scalar, C};
use crate::thermal::{free_energy, gibbs_state, Temperature};

/// Which thermal system state enters the forward amplitude `q_+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SystemStateConvention {
    /// Forward amplitude with `γ(H_S^i)`, reverse with `γ(H_S^f)`, matching
    /// the forward and reverse probabilities. At `δ = 0` the two amplitudes
    /// are then exactly those probabilities.
    #[default]
    Consistent,
    /// `γ(H_S^f)` in both amplitudes. Agrees with `Consistent` only when
    /// `H_S^i = H_S^f`.
    FinalInBoth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffDiagonalReport<T: Scalar> {
    pub q_plus: C<T>,
    pub q_minus: C<T>,
    /// `ln q_+ − ln q_−` (principal branch).
    pub log_ratio: C<T>,
    pub energy_i: T,
    pub energy_f: T,
    /// `((E_i − E_f) − ΔF) / T`.
    pub rhs_log: T,
    /// `|ln|q_+/q_−| − rhs_log|`.
    pub magnitude_residual: T,
    /// `|arg(q_+/q_−)|`.
    pub phase: T,
}

fn region_eigenstate<T: Scalar>(
    setup: &Setup<T>,
    region: Region,
    index: i64,
    policy: &NumericPolicy,
) -> Result<MachineState<T>> {
    if index < 0 {
        let len = setup
            .projector(region)
            .trace()
            .re
            .round()
            .to_usize()
            .unwrap_or(0);
        return Err(Error::IndexOutOfLadder { index, len });
    }
    machine_eigenstate(setup, region, index as usize, policy)
}

/// `q_+^δ(f|i) = ⟨E^f| Tr_S[V (|E^i⟩⟨E^{i+δ}| ⊗ γ_+) V†] |E^{f+δ}⟩` and
/// `q_−^δ(i|f) = ⟨E^{i+δ}| Tr_S[V (|E^{f+δ}⟩⟨E^f| ⊗ γ(H_S^f)) V†] |E^i⟩`,
/// compared against `((E_i − E_f) − ΔF)/T`.
///
/// `i` and `f` index the machine eigenstates inside each region.
#[allow(clippy::too_many_arguments)]
pub fn check_off_diagonal<T: Scalar>(
    setup: &Setup<T>,
    v: &ComplexMatrix<T>,
    temperature: Temperature<T>,
    i: usize,
    f: usize,
    delta: i64,
    convention: SystemStateConvention,
    policy: &NumericPolicy,
) -> Result<OffDiagonalReport<T>> {
    let e_i = region_eigenstate(setup, Region::Initial, i as i64, policy)?;
    let e_id = region_eigenstate(setup, Region::Initial, i as i64 + delta, policy)?;
    let e_f = region_eigenstate(setup, Region::Final, f as i64, policy)?;
    let e_fd = region_eigenstate(setup, Region::Final, f as i64 + delta, policy)?;

    let gamma_i = gibbs_state(&setup.h_system_i, temperature, policy)?;
    let gamma_f = gibbs_state(&setup.h_system_f, temperature, policy)?;
    let gamma_plus = match convention {
        SystemStateConvention::Consistent => &gamma_i,
        SystemStateConvention::FinalInBoth => &gamma_f,
    };

    let x_plus = ComplexMatrix::outer(&e_i.vector, &e_id.vector);
    let q_plus = transition_amplitude(setup, v, &x_plus, gamma_plus, &e_f, &e_fd)?;
    let x_minus = ComplexMatrix::outer(&e_fd.vector, &e_f.vector);
    let q_minus = transition_amplitude(setup, v, &x_minus, &gamma_f, &e_id, &e_i)?;

    let floor = T::lit(policy.vacuous_probability);
    for q in [q_plus, q_minus] {
        if q.norm() < floor {
            return Err(Error::VacuousRatio {
                probability: q.norm().to_f64_lossy(),
            });
        }
    }

    let energy_i = eigen_energy(&setup.h_machine, &e_i.vector, policy)?;
    let energy_f = eigen_energy(&setup.h_machine, &e_f.vector, policy)?;
    let delta_f = free_energy(&setup.h_system_f, temperature, policy)?
        - free_energy(&setup.h_system_i, temperature, policy)?;
    let rhs_log = ((energy_i - energy_f) - delta_f) / temperature.value();
    let log_ratio = q_plus.ln() - q_minus.ln();
    let ratio = q_plus / q_minus;
    Ok(OffDiagonalReport {
        q_plus,
        q_minus,
        log_ratio,
        energy_i,
        energy_f,
        rhs_log,
        magnitude_residual: (q_plus.norm().ln() - q_minus.norm().ln() - rhs_log).abs(),
        phase: ratio.arg().abs(),
    })
}
