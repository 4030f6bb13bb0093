//! The channel a run induces on the machine: `ρ ↦ Tr_S[V (ρ ⊗ γ) V†]`.

use crate::error::Result;
use crate::model::{Region, Setup};
use crate::numerics::{eig_hermitian, ComplexMatrix};
use crate::policy::NumericPolicy;
use crate::scalar::{Scalar, C};
use crate::thermal::{gibbs_state, Temperature};

use super::run::machine_output;

/// Forward processes start with the system thermal for `H_S^i`, reverse
/// processes for `H_S^f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn start_region(self) -> Region {
        match self {
            Direction::Forward => Region::Initial,
            Direction::Reverse => Region::Final,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InducedChannel<'a, T: Scalar> {
    setup: &'a Setup<T>,
    v: &'a ComplexMatrix<T>,
    sigma: ComplexMatrix<T>,
}

pub fn induced_channel<'a, T: Scalar>(
    setup: &'a Setup<T>,
    v: &'a ComplexMatrix<T>,
    direction: Direction,
    temperature: Temperature<T>,
    policy: &NumericPolicy,
) -> Result<InducedChannel<'a, T>> {
    v.check_dim(setup.space.dim())?;
    let sigma = gibbs_state(
        setup.h_system_in(direction.start_region()),
        temperature,
        policy,
    )?;
    Ok(InducedChannel { setup, v, sigma })
}

impl<T: Scalar> InducedChannel<'_, T> {
    pub fn system_state(&self) -> &ComplexMatrix<T> {
        &self.sigma
    }

    /// Applies the channel to any machine operator (linear extension).
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        machine_output(self.setup, self.v, rho, &self.sigma)
    }

    /// Choi matrix `Σ_jk |j⟩⟨k| ⊗ E(|j⟩⟨k|)` (input factor first).
    pub fn choi(&self) -> Result<ComplexMatrix<T>> {
        let d = self.setup.machine_dim();
        let mut choi = ComplexMatrix::zeros(d * d);
        for j in 0..d {
            for k in 0..d {
                let mut unit = ComplexMatrix::zeros(d);
                unit[(j, k)] = C::new(T::one(), T::zero());
                let out = self.apply(&unit)?;
                for a in 0..d {
                    for b in 0..d {
                        choi[(j * d + a, k * d + b)] = out[(a, b)];
                    }
                }
            }
        }
        Ok(choi)
    }

    /// Smallest Choi eigenvalue (≥ 0 for a completely positive map).
    pub fn choi_min_eigenvalue(&self, policy: &NumericPolicy) -> Result<T> {
        let choi = self.choi()?;
        Ok(eig_hermitian(&choi.hermitian_part(), policy)?.eigenvalues[0])
    }

    /// `max_jk |Tr E(|j⟩⟨k|) − δ_jk|`.
    pub fn trace_preservation_error(&self) -> Result<T> {
        let d = self.setup.machine_dim();
        let mut worst = T::zero();
        for j in 0..d {
            for k in 0..d {
                let mut unit = ComplexMatrix::zeros(d);
                unit[(j, k)] = C::new(T::one(), T::zero());
                let tr = self.apply(&unit)?.trace();
                let target = if j == k { T::one() } else { T::zero() };
                worst = worst.max((tr - C::new(target, T::zero())).norm());
            }
        }
        Ok(worst)
    }

    /// `‖E(γ(H_M)) − γ(H_M)‖_max`.
    pub fn gibbs_preservation_error(
        &self,
        temperature: Temperature<T>,
        policy: &NumericPolicy,
    ) -> Result<T> {
        let g = gibbs_state(&self.setup.h_machine, temperature, policy)?;
        Ok(self.apply(&g)?.max_abs_diff(&g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_ladder_setup, machine_eigenstate};
    use crate::protocol::{energy_conserving_unitary, transition_probability, BlockUnitary};
    use crate::reversal::ReversalBasis;

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn t(x: f64) -> Temperature<f64> {
        Temperature::new(x).unwrap()
    }

    #[test]
    fn identity_unitary_gives_identity_channel() {
        let s = build_ladder_setup::<f64>(3, 1.0, 1.0, 2.0, &policy()).unwrap();
        let v = ComplexMatrix::identity(s.space.dim());
        let ch = induced_channel(&s, &v, Direction::Forward, t(1.0), &policy()).unwrap();
        let rho = crate::numerics::random_density(
            6,
            &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2),
        );
        assert!(ch.apply(&rho).unwrap().max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn swap_channel_is_cptp() {
        let s = build_ladder_setup::<f64>(3, 1.0, 1.0, 2.0, &policy()).unwrap();
        let v = energy_conserving_unitary(
            &s,
            &BlockUnitary::swap(),
            &ReversalBasis::for_setup(&s),
            &policy(),
        )
        .unwrap();
        for dir in [Direction::Forward, Direction::Reverse] {
            let ch = induced_channel(&s, &v, dir, t(0.6), &policy()).unwrap();
            assert!(ch.choi_min_eigenvalue(&policy()).unwrap() >= -1e-10);
            assert!(ch.trace_preservation_error().unwrap() <= 1e-10);
        }
    }

    #[test]
    fn gibbs_preserved_when_system_hamiltonian_is_unchanged() {
        let s = build_ladder_setup::<f64>(4, 1.0, 1.0, 1.0, &policy()).unwrap();
        let v = energy_conserving_unitary(
            &s,
            &BlockUnitary::Random { block_seed: 5 },
            &ReversalBasis::for_setup(&s),
            &policy(),
        )
        .unwrap();
        let ch = induced_channel(&s, &v, Direction::Forward, t(0.9), &policy()).unwrap();
        assert!(ch.gibbs_preservation_error(t(0.9), &policy()).unwrap() <= 1e-10);
    }

    #[test]
    fn channel_probability_matches_full_evolution() {
        let s = build_ladder_setup::<f64>(3, 1.0, 1.0, 2.0, &policy()).unwrap();
        let v = energy_conserving_unitary(
            &s,
            &BlockUnitary::swap(),
            &ReversalBasis::for_setup(&s),
            &policy(),
        )
        .unwrap();
        let a = machine_eigenstate(&s, Region::Initial, 1, &policy()).unwrap();
        let b = machine_eigenstate(&s, Region::Final, 0, &policy()).unwrap();
        let ch = induced_channel(&s, &v, Direction::Forward, t(0.5), &policy()).unwrap();
        let via_channel = ch
            .apply(&a.density())
            .unwrap()
            .sandwich(&b.vector, &b.vector)
            .re;
        let full = transition_probability(&s, &v, &a, ch.system_state(), &b).unwrap();
        assert!((via_channel - full).abs() < 1e-12);
    }
}
