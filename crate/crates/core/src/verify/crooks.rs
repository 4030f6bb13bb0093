//! Both sides of the coherent Crooks equality and its eigenstate limit.

use crate::error::{Error, Result};
use crate::model::{eigen_energy, Region};
use crate::policy::NumericPolicy;
use crate::protocol::{
    forward_probability, reverse_probability, transition_probability_mixed, ProtocolRun, Variant,
};
use crate::scalar::Scalar;
use crate::thermal::{e_tilde_pure, free_energy, gibbs_map};

use super::factor::factorisability_residual;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrooksStatus {
    /// Block-structured setup; the equality should hold to roundoff.
    Exact,
    /// Autonomous evolution; the residual measures the approximation.
    AutonomousApproximate,
    /// A probability fell below the underflow threshold; no ratio exists.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrooksReport<T: Scalar> {
    pub p_fwd: T,
    pub p_rev: T,
    /// `ln p_fwd − ln p_rev`; `None` when vacuous.
    pub lhs_log: Option<T>,
    pub e_tilde_i: T,
    pub e_tilde_f: T,
    pub delta_e_tilde: T,
    pub delta_f: T,
    /// `(ΔẼ − ΔF) / T`.
    pub rhs_log: T,
    /// `|lhs_log − rhs_log|`; `None` when vacuous.
    pub residual: Option<T>,
    /// Worst of the two measured states, each in its own region.
    pub factorisability_residual: T,
    pub status: CrooksStatus,
}

impl<T: Scalar> CrooksReport<T> {
    pub fn is_vacuous(&self) -> bool {
        self.status == CrooksStatus::Vacuous
    }

    /// The residual, or `VacuousRatio` naming the smaller probability.
    pub fn require_residual(&self) -> Result<T> {
        self.residual.ok_or(Error::VacuousRatio {
            probability: self.p_fwd.min(self.p_rev).to_f64_lossy(),
        })
    }
}

fn check_probability<T: Scalar>(p: T, what: &str, policy: &NumericPolicy) -> Result<()> {
    let tol = T::lit(policy.norm);
    if p < -tol || p > T::one() + tol || !p.is_finite() {
        return Err(Error::InvariantViolated(format!(
            "{what} probability {p} outside [0, 1]"
        )));
    }
    Ok(())
}

/// `F(H_S^f) − F(H_S^i)`.
pub fn free_energy_change<T: Scalar>(run: &ProtocolRun<T>, policy: &NumericPolicy) -> Result<T> {
    Ok(free_energy(&run.setup.h_system_f, run.temperature, policy)?
        - free_energy(&run.setup.h_system_i, run.temperature, policy)?)
}

pub fn check_coherent_crooks<T: Scalar>(
    run: &ProtocolRun<T>,
    policy: &NumericPolicy,
) -> Result<CrooksReport<T>> {
    let p_fwd = forward_probability(run)?;
    let p_rev = reverse_probability(run)?;
    check_probability(p_fwd, "forward", policy)?;
    check_probability(p_rev, "reverse", policy)?;
    let h_m = &run.setup.h_machine;
    let t = run.temperature;
    let e_tilde_i = e_tilde_pure(&run.psi_i, h_m, t, policy)?;
    let e_tilde_f = e_tilde_pure(&run.psi_f, h_m, t, policy)?;
    let delta_e_tilde = e_tilde_i - e_tilde_f;
    let delta_f = free_energy_change(run, policy)?;
    let rhs_log = (delta_e_tilde - delta_f) / t.value();

    let floor = T::lit(policy.vacuous_probability);
    let (lhs_log, residual, status) = if p_fwd < floor || p_rev < floor {
        (None, None, CrooksStatus::Vacuous)
    } else {
        let lhs = p_fwd.ln() - p_rev.ln();
        let status = match run.variant {
            Variant::Exact => CrooksStatus::Exact,
            Variant::Autonomous => CrooksStatus::AutonomousApproximate,
        };
        (Some(lhs), Some((lhs - rhs_log).abs()), status)
    };
    let factorisability_residual =
        factorisability_residual(run.setup, &run.psi_i, Region::Initial, t, policy)?.max(
            factorisability_residual(run.setup, &run.psi_f, Region::Final, t, policy)?,
        );
    Ok(CrooksReport {
        p_fwd,
        p_rev,
        lhs_log,
        e_tilde_i,
        e_tilde_f,
        delta_e_tilde,
        delta_f,
        rhs_log,
        residual,
        factorisability_residual,
        status,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalReport<T: Scalar> {
    pub crooks: CrooksReport<T>,
    pub energy_i: T,
    pub energy_f: T,
    /// `((E_i − E_f) − ΔF) / T`.
    pub rhs_log: T,
    /// `|lhs_log − rhs_log|`; `None` when vacuous.
    pub residual: Option<T>,
    /// `|rhs_log − crooks.rhs_log|`; zero up to roundoff since `Ẽ` of an
    /// eigenstate is its energy.
    pub rhs_agreement: T,
}

/// Eigenstate form of the equality. Fails with `NotEigenstate` unless both
/// measured states are eigenstates of `H_M`.
pub fn check_classical_limit<T: Scalar>(
    run: &ProtocolRun<T>,
    policy: &NumericPolicy,
) -> Result<ClassicalReport<T>> {
    let h_m = &run.setup.h_machine;
    let energy_i = eigen_energy(h_m, &run.psi_i.vector, policy)?;
    let energy_f = eigen_energy(h_m, &run.psi_f.vector, policy)?;
    let crooks = check_coherent_crooks(run, policy)?;
    let rhs_log = ((energy_i - energy_f) - crooks.delta_f) / run.temperature.value();
    let residual = crooks.lhs_log.map(|lhs| (lhs - rhs_log).abs());
    let rhs_agreement = (rhs_log - crooks.rhs_log).abs();
    Ok(ClassicalReport {
        crooks,
        energy_i,
        energy_f,
        rhs_log,
        residual,
        rhs_agreement,
    })
}

/// `|p_fwd − Tr[(|ψ_f⟩⟨ψ_f| ⊗ 1) V (G_{ψ_i} ⊗ γ(H_S^i)) V†]|` with `G` the
/// Gibbs map on `H_M`: the paired preparation is the pure-state Gibbs map.
pub fn gibbs_map_connection_residual<T: Scalar>(
    run: &ProtocolRun<T>,
    policy: &NumericPolicy,
) -> Result<T> {
    let g = gibbs_map(
        &run.psi_i.density(),
        &run.setup.h_machine,
        run.temperature,
        policy,
    )?;
    let via_map = transition_probability_mixed(run.setup, run.v, &g, &run.gamma_i, &run.psi_f)?;
    Ok((forward_probability(run)? - via_map).abs())
}
