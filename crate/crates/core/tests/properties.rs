use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crooks_core::model::{build_ladder_setup, ladder_state, MachineState, Region, Setup};
use crooks_core::numerics::{
    eig_hermitian, random_density, random_hermitian, random_ket, ComplexMatrix,
};
use crooks_core::protocol::{
    energy_conserving_unitary, forward_probability, reverse_probability, BlockUnitary, ProtocolRun,
    Variant,
};
use crooks_core::reversal::{reverse, ReversalBasis};
use crooks_core::thermal::{dephase, e_tilde, e_tilde_pure, gibbs_map, Temperature};
use crooks_core::verify::check_coherent_crooks;
use crooks_core::NumericPolicy;

type M = ComplexMatrix<f64>;

fn policy() -> NumericPolicy {
    NumericPolicy::default()
}

fn t(x: f64) -> Temperature<f64> {
    Temperature::new(x).unwrap()
}

fn instance(seed: u64) -> (M, M, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(2..=5);
    let h = random_hermitian::<f64, _>(d, &mut rng);
    let rho = random_density::<f64, _>(d, &mut rng);
    (h, rho, rng)
}

fn mean_energy(h: &M, rho: &M) -> f64 {
    (h * rho).trace().re
}

proptest! {
    #[test]
    fn e_tilde_below_mean_energy(seed in any::<u64>(), temp in 0.3f64..10.0) {
        let (h, rho, _) = instance(seed);
        let e = e_tilde(&rho, &h, t(temp), &policy()).unwrap();
        prop_assert!(e <= mean_energy(&h, &rho) + 1e-10);
    }

    #[test]
    fn e_tilde_rises_toward_mean_with_temperature(seed in any::<u64>(), t1 in 0.3f64..5.0, factor in 1.0f64..10.0) {
        let (h, rho, _) = instance(seed);
        let lo = e_tilde(&rho, &h, t(t1), &policy()).unwrap();
        let hi = e_tilde(&rho, &h, t(t1 * factor), &policy()).unwrap();
        prop_assert!(lo <= hi + 1e-10);
        prop_assert!(hi <= mean_energy(&h, &rho) + 1e-10);
    }

    #[test]
    fn e_tilde_shift_and_scale_covariant(
        seed in any::<u64>(),
        temp in 0.3f64..5.0,
        c in -20.0f64..20.0,
        lambda in 0.1f64..10.0,
    ) {
        let (h, rho, _) = instance(seed);
        let p = policy();
        let e = e_tilde(&rho, &h, t(temp), &p).unwrap();
        let shifted = &h + &M::identity(h.dim()).scale_real(c);
        prop_assert!((e_tilde(&rho, &shifted, t(temp), &p).unwrap() - (e + c)).abs() <= 1e-10 * (1.0 + c.abs()));
        let scaled = e_tilde(&rho, &h.scale_real(lambda), t(temp * lambda), &p).unwrap();
        prop_assert!((scaled - lambda * e).abs() <= 1e-10 * lambda.max(1.0));
    }

    #[test]
    fn e_tilde_blind_to_coherences(seed in any::<u64>(), temp in 0.3f64..5.0) {
        let (h, rho, _) = instance(seed);
        let p = policy();
        let d = dephase(&rho, &h, &p).unwrap();
        prop_assert!((e_tilde(&d, &h, t(temp), &p).unwrap() - e_tilde(&rho, &h, t(temp), &p).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn pure_and_density_routes_agree(seed in any::<u64>(), temp in 0.5f64..5.0) {
        let (h, _, mut rng) = instance(seed);
        let psi = MachineState::normalized(&random_ket::<f64, _>(h.dim(), &mut rng), "ψ").unwrap();
        let p = policy();
        let a = e_tilde_pure(&psi, &h, t(temp), &p).unwrap();
        let b = e_tilde(&psi.density(), &h, t(temp), &p).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    /// The Gibbs map keeps pure states pure, so it does not dephase.
    #[test]
    fn gibbs_map_keeps_coherence(seed in any::<u64>(), temp in 0.3f64..5.0) {
        let (h, _, mut rng) = instance(seed);
        let p = policy();
        let psi = random_ket::<f64, _>(h.dim(), &mut rng);
        let g = gibbs_map(&M::projector(&psi), &h, t(temp), &p).unwrap();
        let purity = (&g * &g).trace().re;
        prop_assert!((purity - 1.0).abs() <= 1e-10);
        prop_assert!((g.trace().re - 1.0).abs() <= 1e-12);
        let e = eig_hermitian(&h, &p).unwrap();
        let gd = dephase(&g, &h, &p).unwrap();
        // a generic superposition keeps off-diagonal weight in the energy basis
        prop_assert!(g.max_abs_diff(&gd) > 0.0 || e.degenerate_blocks(1e-9, h.max_abs()).len() == 1);
    }

    #[test]
    fn reversal_is_an_involution(seed in any::<u64>()) {
        let (h, rho, mut rng) = instance(seed);
        let b = eig_hermitian(&random_hermitian::<f64, _>(h.dim(), &mut rng), &policy()).unwrap().eigenvectors;
        let basis = ReversalBasis::new(b, "random basis", &policy()).unwrap();
        prop_assert!(reverse(&reverse(&rho, &basis), &basis).max_abs_diff(&rho) <= 1e-12);
    }
}

struct Ladder {
    setup: Setup<f64>,
    v: M,
}

fn ladder(block_seed: u64) -> Ladder {
    let p = policy();
    let setup = build_ladder_setup(4, 1.0, 1.0, 2.0, &p).unwrap();
    let v = energy_conserving_unitary(
        &setup,
        &BlockUnitary::Random { block_seed },
        &ReversalBasis::for_setup(&setup),
        &p,
    )
    .unwrap();
    Ladder { setup, v }
}

fn random_rung_state(
    setup: &Setup<f64>,
    region: Region,
    rng: &mut ChaCha8Rng,
) -> MachineState<f64> {
    let amps = random_ket::<f64, _>(4, rng);
    ladder_state(setup, region, &amps, "random").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn probabilities_in_unit_interval_and_crooks_holds(seed in any::<u64>(), temp in 0.2f64..5.0) {
        let l = ladder(seed % 7);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = policy();
        let psi_i = random_rung_state(&l.setup, Region::Initial, &mut rng);
        let psi_f = random_rung_state(&l.setup, Region::Final, &mut rng);
        let run = ProtocolRun::new(&l.setup, &l.v, Variant::Exact, t(temp), psi_i, psi_f, &p).unwrap();
        let rep = check_coherent_crooks(&run, &p).unwrap();
        for x in [rep.p_fwd, rep.p_rev] {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&x));
        }
        if let Some(r) = rep.residual {
            prop_assert!(r <= 1e-9, "residual {r}");
        }
    }

    #[test]
    fn global_phases_do_not_matter(seed in any::<u64>(), temp in 0.2f64..5.0, a in 0.0f64..6.3, b in 0.0f64..6.3) {
        let l = ladder(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = policy();
        let psi_i = random_rung_state(&l.setup, Region::Initial, &mut rng);
        let psi_f = random_rung_state(&l.setup, Region::Final, &mut rng);
        let plain = ProtocolRun::new(&l.setup, &l.v, Variant::Exact, t(temp), psi_i.clone(), psi_f.clone(), &p).unwrap();
        let phased = ProtocolRun::new(
            &l.setup,
            &l.v,
            Variant::Exact,
            t(temp),
            psi_i.with_global_phase(a),
            psi_f.with_global_phase(b),
            &p,
        )
        .unwrap();
        let d_fwd = (forward_probability(&plain).unwrap() - forward_probability(&phased).unwrap()).abs();
        let d_rev = (reverse_probability(&plain).unwrap() - reverse_probability(&phased).unwrap()).abs();
        prop_assert!(d_fwd <= 1e-14 && d_rev <= 1e-14);
    }
}

#[test]
fn single_precision_ladder() {
    let p = NumericPolicy::default().scaled(1e5);
    let setup = build_ladder_setup::<f32>(3, 1.0, 1.0, 2.0, &p).unwrap();
    let v = energy_conserving_unitary(
        &setup,
        &BlockUnitary::swap(),
        &ReversalBasis::for_setup(&setup),
        &p,
    )
    .unwrap();
    let amps = [1.0f32, 0.5, 0.25].map(|x| num_complex::Complex::new(x, 0.0));
    let psi_i = ladder_state(&setup, Region::Initial, &amps, "i").unwrap();
    let psi_f = ladder_state(&setup, Region::Final, &amps, "f").unwrap();
    let run = ProtocolRun::new(
        &setup,
        &v,
        Variant::Exact,
        Temperature::new(1.0f32).unwrap(),
        psi_i,
        psi_f,
        &p,
    )
    .unwrap();
    let rep = check_coherent_crooks(&run, &p).unwrap();
    assert!(rep.residual.unwrap() < 1e-4, "{:?}", rep.residual);
}
