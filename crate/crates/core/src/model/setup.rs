//! Bipartite machine ⊗ system setups.
//!
//! The system is always the last tensor factor; everything before it is the
//! machine. Machine operators therefore embed as `op ⊗ 1_S`.

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, HilbertSpace};
use crate::policy::NumericPolicy;
use crate::scalar::Scalar;

/// The two control regions a machine state can be localised in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Initial,
    Final,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Initial => "i",
            Region::Final => "f",
        }
    }

    pub fn other(self) -> Region {
        match self {
            Region::Initial => Region::Final,
            Region::Final => Region::Initial,
        }
    }
}

/// Which builder produced a setup, with the parameters later stages need.
#[derive(Debug, Clone, PartialEq)]
pub enum SetupKind<T: Scalar> {
    /// Control qubit ⊗ uniform energy ladder ⊗ system qubit.
    Ladder { n_rungs: usize, spacing: T },
    /// Tight-binding lattice ⊗ system qubit with a position-dependent level shift.
    Lattice {
        n_sites: usize,
        hop: T,
        x_i: usize,
        x_f: usize,
        profile: Vec<T>,
    },
}

#[derive(Debug, Clone)]
pub struct Setup<T: Scalar> {
    pub kind: SetupKind<T>,
    pub space: HilbertSpace,
    pub h_machine: ComplexMatrix<T>,
    pub h_system_i: ComplexMatrix<T>,
    pub h_system_f: ComplexMatrix<T>,
    /// Bare system Hamiltonian (zero when all system energy sits in the interaction).
    pub h_system: ComplexMatrix<T>,
    pub h_interaction: ComplexMatrix<T>,
    pub pi_i: ComplexMatrix<T>,
    pub pi_f: ComplexMatrix<T>,
    pub h_total: ComplexMatrix<T>,
}

impl<T: Scalar> Setup<T> {
    /// Assembles a setup from its parts. `H_total` is formed as
    /// `H_M ⊗ 1 + 1 ⊗ H_S + H_int`; the result is validated.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        kind: SetupKind<T>,
        space: HilbertSpace,
        h_machine: ComplexMatrix<T>,
        h_system: ComplexMatrix<T>,
        h_interaction: ComplexMatrix<T>,
        h_system_i: ComplexMatrix<T>,
        h_system_f: ComplexMatrix<T>,
        pi_i: ComplexMatrix<T>,
        pi_f: ComplexMatrix<T>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let ds = space.factors().last().expect("non-empty space").1;
        let dm = space.dim() / ds;
        h_machine.check_dim(dm)?;
        pi_i.check_dim(dm)?;
        pi_f.check_dim(dm)?;
        h_system.check_dim(ds)?;
        h_system_i.check_dim(ds)?;
        h_system_f.check_dim(ds)?;
        h_interaction.check_dim(dm * ds)?;
        let h_total = &(&h_machine.kron(&ComplexMatrix::identity(ds))
            + &ComplexMatrix::identity(dm).kron(&h_system))
            + &h_interaction;
        let setup = Self {
            kind,
            space,
            h_machine,
            h_system_i,
            h_system_f,
            h_system,
            h_interaction,
            pi_i,
            pi_f,
            h_total,
        };
        setup.validate(policy)?;
        Ok(setup)
    }

    pub fn system_dim(&self) -> usize {
        self.space.factors().last().expect("non-empty space").1
    }

    pub fn machine_dim(&self) -> usize {
        self.space.dim() / self.system_dim()
    }

    pub fn system_factor(&self) -> &str {
        &self.space.factors().last().expect("non-empty space").0
    }

    pub fn machine_factors(&self) -> Vec<&str> {
        let f = self.space.factors();
        f[..f.len() - 1].iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn projector(&self, region: Region) -> &ComplexMatrix<T> {
        match region {
            Region::Initial => &self.pi_i,
            Region::Final => &self.pi_f,
        }
    }

    /// Effective system Hamiltonian while the machine sits in `region`.
    pub fn h_system_in(&self, region: Region) -> &ComplexMatrix<T> {
        match region {
            Region::Initial => &self.h_system_i,
            Region::Final => &self.h_system_f,
        }
    }

    /// `op ⊗ 1_S`.
    pub fn embed_machine(&self, op: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        op.kron(&ComplexMatrix::identity(self.system_dim()))
    }

    /// `1_M ⊗ op`.
    pub fn embed_system(&self, op: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        ComplexMatrix::identity(self.machine_dim()).kron(op)
    }

    /// Checks every structural invariant: Hermitian H_total, orthogonal region
    /// projectors, and the effective-Hamiltonian identity inside each region.
    pub fn validate(&self, policy: &NumericPolicy) -> Result<()> {
        let herm = self.h_total.hermiticity_error();
        if herm > T::lit(policy.hermitian) {
            return Err(Error::NotHermitian {
                deviation: herm.to_f64_lossy(),
            });
        }
        let ptol = T::lit(policy.projector);
        for (name, p) in [("Pi_i", &self.pi_i), ("Pi_f", &self.pi_f)] {
            if (&(p * p) - p).max_abs() > ptol || p.hermiticity_error() > ptol {
                return Err(Error::InvariantViolated(format!(
                    "{name} is not an orthogonal projector"
                )));
            }
        }
        if (&self.pi_i * &self.pi_f).max_abs() > ptol {
            return Err(Error::InvariantViolated("Pi_i·Pi_f ≠ 0".into()));
        }
        let ds = self.system_dim();
        let rtol = T::lit(policy.region_identity) * self.h_total.max_abs().max(T::one());
        for region in [Region::Initial, Region::Final] {
            let p = self.projector(region);
            let pe = self.embed_machine(p);
            let lhs = &(&pe * &self.h_total) * &pe;
            let rhs = &p.kron(self.h_system_in(region))
                + &(&(p * &self.h_machine) * p).kron(&ComplexMatrix::identity(ds));
            let err = lhs.max_abs_diff(&rhs);
            if err > rtol {
                return Err(Error::InvariantViolated(format!(
                    "effective system Hamiltonian in region {} is off by {:e}",
                    region.name(),
                    err.to_f64_lossy()
                )));
            }
        }
        Ok(())
    }
}
