use crooks_core::model::{build_ladder_setup, ladder_state, Region};
use crooks_core::protocol::{build_unitary, BlockUnitary, EvolutionSpec, ProtocolRun, Variant};
use crooks_core::reversal::ReversalBasis;
use crooks_core::thermal::Temperature;
use crooks_core::verify::check_coherent_crooks;
use crooks_core::{NumericPolicy, C};

#[test]
fn ladder_superposition_round_trip() -> crooks_core::Result<()> {
    let policy = NumericPolicy::default();
    let setup = build_ladder_setup(4, 1.0, 1.0, 2.0, &policy)?;
    let spec = EvolutionSpec::External(BlockUnitary::swap());
    let v = build_unitary(&setup, &spec, &ReversalBasis::for_setup(&setup), &policy)?;

    let half = C::new(0.5_f64.sqrt(), 0.0);
    let zero = C::new(0.0, 0.0);
    let psi_i = ladder_state(&setup, Region::Initial, &[zero, half, half, zero], "i")?;
    let psi_f = ladder_state(&setup, Region::Final, &[half, half, zero, zero], "f")?;

    let t = Temperature::new(1.0)?;
    let run = ProtocolRun::new(&setup, &v, Variant::Exact, t, psi_i, psi_f, &policy)?;
    let report = check_coherent_crooks(&run, &policy)?;
    assert!(report.require_residual()? < 1e-10);
    Ok(())
}
