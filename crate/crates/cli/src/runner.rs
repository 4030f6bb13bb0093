//! Turns a [`Scenario`] into report rows.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crooks_core::model::{
    amplitudes_from_pairs, build_ladder_setup, build_lattice_setup, gaussian_packet,
    ladder_gaussian, ladder_state, linear_ramp, machine_eigenstate, packet_center, LatticeExtras,
    MachineState, Region, Setup,
};
use crooks_core::numerics::{random_ket, ComplexMatrix};
use crooks_core::protocol::{build_unitary, BlockUnitary, EvolutionSpec, ProtocolRun, Variant};
use crooks_core::reversal::ReversalBasis;
use crooks_core::thermal::Temperature;
use crooks_core::verify::{
    check_classical_limit, check_coherent_crooks, check_global_invariance, check_off_diagonal,
    factorisability_residual, CrooksStatus, SystemStateConvention,
};
use crooks_core::{Error, NumericPolicy, C};

use crate::error::{CliError, Result};
use crate::report::{ReportRow, Status};
use crate::scenario::{
    Check, EvolutionConfig, ProfileConfig, Scenario, SetupConfig, StateConfig, TimeConfig,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Replaces the scenario seed.
    pub seed: Option<u64>,
    /// Multiplies every comparison tolerance.
    pub tol_scale: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: None,
            tol_scale: 1.0,
        }
    }
}

/// A resolved `(ψ_i, ψ_f)` pair.
#[derive(Debug, Clone)]
struct StatePair {
    label: String,
    psi_i: MachineState<f64>,
    psi_f: MachineState<f64>,
    /// Eigenstate indices, when both states are region eigenstates by construction.
    eigen: Option<(usize, usize)>,
    /// Packet center and momentum of each state, for transit times.
    packets: Option<((f64, f64), (f64, f64))>,
}

/// A resolved state descriptor.
struct Resolved {
    state: MachineState<f64>,
    /// Region eigenstate index, when the descriptor names one.
    eigen: Option<usize>,
    /// Packet center and momentum.
    packet: Option<(f64, f64)>,
}

impl Resolved {
    fn plain(state: MachineState<f64>) -> Self {
        Self {
            state,
            eigen: None,
            packet: None,
        }
    }
}

struct Context<'a> {
    scenario: &'a Scenario,
    policy: NumericPolicy,
    setup: Setup<f64>,
    variant: Variant,
    /// Tolerances under which autonomous residuals get a pass/fail verdict.
    judge_crooks: bool,
    judge_factorisability: bool,
}

fn domain(scenario: &Scenario) -> impl Fn(Error) -> CliError + '_ {
    move |source| CliError::Domain {
        scenario: scenario.name.clone(),
        source,
    }
}

fn invalid(scenario: &Scenario, message: impl Into<String>) -> CliError {
    CliError::InvalidScenario {
        scenario: scenario.name.clone(),
        message: message.into(),
    }
}

fn build_setup(config: &SetupConfig, policy: &NumericPolicy) -> crooks_core::Result<Setup<f64>> {
    match config {
        SetupConfig::Ladder {
            n_rungs,
            spacing,
            eps_i,
            eps_f,
        } => build_ladder_setup(*n_rungs, *spacing, *eps_i, *eps_f, policy),
        SetupConfig::Lattice {
            n_sites,
            hop,
            x_i,
            x_f,
            profile,
            trap_curvature,
            trap_center,
            bare_system,
        } => {
            let profile = match profile {
                ProfileConfig::Ramp { low, high } => {
                    if !(x_i < x_f && x_f < n_sites) {
                        return Err(Error::InvalidParameter(format!(
                            "need x_i < x_f < n_sites, got x_i={x_i}, x_f={x_f}, n_sites={n_sites}"
                        )));
                    }
                    linear_ramp(*n_sites, *x_i, *x_f, *low, *high)
                }
                ProfileConfig::Values(v) => v.clone(),
            };
            let extras = LatticeExtras {
                trap_curvature: *trap_curvature,
                trap_center: *trap_center,
                bare_system: bare_system.map(|m| ComplexMatrix::from_real_fn(2, |a, b| m[a][b])),
            };
            build_lattice_setup(*n_sites, *hop, &profile, *x_i, *x_f, &extras, policy)
        }
    }
}

impl<'a> Context<'a> {
    fn resolve_state(
        &self,
        config: &StateConfig,
        region: Region,
        rng: &mut ChaCha8Rng,
    ) -> Result<Resolved> {
        let sc = self.scenario;
        let err = domain(sc);
        Ok(match config {
            StateConfig::Eigenstate(n) => Resolved {
                eigen: Some(*n),
                ..Resolved::plain(
                    machine_eigenstate(&self.setup, region, *n, &self.policy).map_err(err)?,
                )
            },
            StateConfig::Rungs {
                center,
                width,
                phase,
            } => Resolved::plain(
                ladder_gaussian(&self.setup, region, *center, *width, *phase).map_err(err)?,
            ),
            StateConfig::Amplitudes(pairs) => {
                let pairs: Vec<(f64, f64)> = pairs.iter().map(|[re, im]| (*re, *im)).collect();
                let amps = amplitudes_from_pairs(&pairs);
                Resolved::plain(
                    ladder_state(&self.setup, region, &amps, "amplitudes").map_err(err)?,
                )
            }
            StateConfig::Random {
                rungs: [lo, hi],
                support,
            } => {
                let n_rungs = match sc.setup {
                    SetupConfig::Ladder { n_rungs, .. } => n_rungs,
                    SetupConfig::Lattice { .. } => {
                        return Err(invalid(
                            sc,
                            "random states are defined on ladder setups only",
                        ))
                    }
                };
                if *hi >= n_rungs {
                    return Err(invalid(
                        sc,
                        format!("random rung range [{lo}, {hi}] exceeds {n_rungs} rungs"),
                    ));
                }
                let mut rungs: Vec<usize> = sample(rng, hi - lo + 1, *support)
                    .into_iter()
                    .map(|k| lo + k)
                    .collect();
                rungs.sort_unstable();
                let coeffs = random_ket::<f64, _>(*support, rng);
                let mut amps = vec![C::new(0.0, 0.0); n_rungs];
                for (r, c) in rungs.iter().zip(coeffs) {
                    amps[*r] = c;
                }
                let label = format!("random{rungs:?}");
                let state = ladder_state(&self.setup, region, &amps, label).map_err(err)?;
                Resolved {
                    eigen: (*support == 1).then(|| rungs[0]),
                    ..Resolved::plain(state)
                }
            }
            StateConfig::Packet {
                center,
                distance,
                width,
                momentum,
            } => {
                let c = match (center, distance) {
                    (Some(c), _) => *c,
                    (None, Some(d)) => packet_center(&self.setup, region, *d).map_err(&err)?,
                    (None, None) => unreachable!("validated at parse time"),
                };
                let state =
                    gaussian_packet(&self.setup, region, c, *width, *momentum, &self.policy)
                        .map_err(err)?;
                Resolved {
                    packet: Some((c, *momentum)),
                    ..Resolved::plain(state)
                }
            }
        })
    }

    fn resolve_pairs(&self, seed: u64) -> Result<Vec<StatePair>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for (index, pair) in self.scenario.state_pairs.iter().enumerate() {
            let base = pair.label.clone().unwrap_or_else(|| format!("pair{index}"));
            for k in 0..pair.repeat {
                let i = self.resolve_state(&pair.prepare, Region::Initial, &mut rng)?;
                let f = self.resolve_state(&pair.measure, Region::Final, &mut rng)?;
                let label = if pair.repeat > 1 {
                    format!("{base}#{k}")
                } else {
                    base.clone()
                };
                out.push(StatePair {
                    label,
                    eigen: i.eigen.zip(f.eigen),
                    packets: i.packet.zip(f.packet),
                    psi_i: i.state,
                    psi_f: f.state,
                });
            }
        }
        Ok(out)
    }

    /// `|c_f − c_i| / v` with the group velocity `v = 2·hop·|sin k|` of the
    /// prepared packet.
    fn transit_time(&self, pair: &StatePair) -> Result<f64> {
        let sc = self.scenario;
        let hop = match sc.setup {
            SetupConfig::Lattice { hop, .. } => hop,
            SetupConfig::Ladder { .. } => {
                return Err(invalid(sc, "transit time needs a lattice setup"))
            }
        };
        let ((c_i, k), (c_f, _)) = pair.packets.ok_or_else(|| {
            invalid(
                sc,
                format!("pair `{}`: transit time needs packet states", pair.label),
            )
        })?;
        let speed = 2.0 * hop.abs() * k.sin().abs();
        if speed < 1e-12 {
            return Err(invalid(
                sc,
                format!("pair `{}`: packet momentum {k} does not move", pair.label),
            ));
        }
        Ok((c_f - c_i).abs() / speed)
    }

    fn evolution_spec(&self, seed: u64) -> Option<EvolutionSpec<f64>> {
        match self.scenario.evolution {
            EvolutionConfig::DesignatedSwap { angle } => {
                Some(EvolutionSpec::External(match angle {
                    Some(angle) => BlockUnitary::DesignatedSwap { angle },
                    None => BlockUnitary::swap(),
                }))
            }
            EvolutionConfig::RandomBlock { block_seed } => {
                Some(EvolutionSpec::External(BlockUnitary::Random {
                    block_seed: block_seed.unwrap_or(seed),
                }))
            }
            EvolutionConfig::Autonomous {
                time: TimeConfig::Fixed(time),
            } => Some(EvolutionSpec::Autonomous { time }),
            EvolutionConfig::Autonomous {
                time: TimeConfig::Named(_),
            } => None,
        }
    }

    /// One unitary per pair; pairs sharing an evolution share the matrix.
    fn unitaries(
        &self,
        pairs: &[StatePair],
        seed: u64,
    ) -> Result<(Vec<ComplexMatrix<f64>>, Vec<usize>)> {
        let basis = ReversalBasis::for_setup(&self.setup);
        let build =
            |spec: &EvolutionSpec<f64>| build_unitary(&self.setup, spec, &basis, &self.policy);
        match self.evolution_spec(seed) {
            Some(spec) => Ok((
                vec![build(&spec).map_err(domain(self.scenario))?],
                vec![0; pairs.len()],
            )),
            None => {
                let times = pairs
                    .iter()
                    .map(|p| self.transit_time(p))
                    .collect::<Result<Vec<_>>>()?;
                let mut slots: BTreeMap<u64, usize> = BTreeMap::new();
                let mut distinct = Vec::new();
                let index = times
                    .iter()
                    .map(|t| {
                        *slots.entry(t.to_bits()).or_insert_with(|| {
                            distinct.push(*t);
                            distinct.len() - 1
                        })
                    })
                    .collect();
                let vs = distinct
                    .par_iter()
                    .map(|&time| build(&EvolutionSpec::Autonomous { time }))
                    .collect::<crooks_core::Result<Vec<_>>>()
                    .map_err(domain(self.scenario))?;
                Ok((vs, index))
            }
        }
    }

    /// Verdict for a residual that is only judged when exact, or when the
    /// scenario configured the tolerance explicitly.
    fn judged(&self, ok: bool, configured: bool) -> Status {
        match self.variant {
            Variant::Exact => Status::verdict(ok),
            Variant::Autonomous if configured => Status::verdict(ok),
            Variant::Autonomous => Status::Approx,
        }
    }

    fn rows_for(
        &self,
        run: &ProtocolRun<f64>,
        pair: &StatePair,
        check: Check,
    ) -> Result<Vec<ReportRow>> {
        let sc = self.scenario;
        let t = run.temperature.value();
        let p = &self.policy;
        let na = |label: &str| ReportRow::not_applicable(&sc.name, check, t, label);
        let err = domain(sc);
        let row = |label: &str| ReportRow {
            status: Status::Pass,
            ..na(label)
        };
        match check {
            Check::Crooks => {
                let rep = check_coherent_crooks(run, p).map_err(err)?;
                let status = match (rep.status, rep.residual) {
                    (CrooksStatus::Vacuous, _) | (_, None) => Status::NotApplicable,
                    (_, Some(r)) => self.judged(r <= p.crooks, self.judge_crooks),
                };
                Ok(vec![ReportRow {
                    p_fwd: Some(rep.p_fwd),
                    p_rev: Some(rep.p_rev),
                    lhs_log: rep.lhs_log,
                    rhs_log: Some(rep.rhs_log),
                    residual: rep.residual,
                    status,
                    ..row(&pair.label)
                }])
            }
            Check::Classical => match check_classical_limit(run, p) {
                Err(Error::NotEigenstate(_)) => Ok(vec![na(&pair.label)]),
                Err(e) => Err(err(e)),
                Ok(rep) => {
                    let status = match rep.residual {
                        None => Status::NotApplicable,
                        Some(r) => self.judged(
                            r <= p.crooks
                                && rep.rhs_agreement
                                    <= p.rhs_agreement * rep.rhs_log.abs().max(1.0),
                            self.judge_crooks,
                        ),
                    };
                    Ok(vec![ReportRow {
                        p_fwd: Some(rep.crooks.p_fwd),
                        p_rev: Some(rep.crooks.p_rev),
                        lhs_log: rep.crooks.lhs_log,
                        rhs_log: Some(rep.rhs_log),
                        residual: rep.residual,
                        status,
                        ..row(&pair.label)
                    }])
                }
            },
            Check::Offdiag => sc
                .offdiag_deltas
                .iter()
                .map(|&delta| {
                    let label = format!("{}/d{delta}", pair.label);
                    let Some((i, f)) = pair.eigen else {
                        return Ok(na(&label));
                    };
                    let temperature = run.temperature;
                    match check_off_diagonal(
                        &self.setup,
                        run.v,
                        temperature,
                        i,
                        f,
                        delta,
                        SystemStateConvention::Consistent,
                        p,
                    ) {
                        Err(
                            Error::VacuousRatio { .. }
                            | Error::IndexOutOfLadder { .. }
                            | Error::NotEigenstate(_),
                        ) => Ok(na(&label)),
                        Err(e) => Err(domain(sc)(e)),
                        Ok(rep) => Ok(ReportRow {
                            p_fwd: Some(rep.q_plus.norm()),
                            p_rev: Some(rep.q_minus.norm()),
                            lhs_log: Some(rep.q_plus.norm().ln() - rep.q_minus.norm().ln()),
                            rhs_log: Some(rep.rhs_log),
                            residual: Some(rep.magnitude_residual),
                            status: self.judged(
                                rep.magnitude_residual <= p.crooks && rep.phase <= p.offdiag_phase,
                                self.judge_crooks,
                            ),
                            ..row(&label)
                        }),
                    }
                })
                .collect(),
            Check::Global => {
                let rho_i = run.phi_i.density().kron(&run.gamma_i);
                let rho_f = run.psi_f.density().kron(&run.gamma_f);
                let rep = check_global_invariance(
                    &self.setup.h_total,
                    run.v,
                    &rho_i,
                    &rho_f,
                    run.temperature,
                    &run.basis,
                    p,
                )
                .map_err(err)?;
                let scale = rep.q_forward.norm();
                let log = |q: f64| (q > 0.0).then(|| q.ln());
                Ok(vec![ReportRow {
                    lhs_log: log(scale),
                    rhs_log: log(rep.q_reverse.norm()),
                    residual: Some(if scale > 0.0 {
                        rep.residual / scale
                    } else {
                        rep.residual
                    }),
                    status: Status::verdict(rep.passed()),
                    ..row(&pair.label)
                }])
            }
            Check::Factorisability => {
                let r = factorisability_residual(
                    &self.setup,
                    &run.psi_i,
                    Region::Initial,
                    run.temperature,
                    p,
                )
                .map_err(&err)?
                .max(
                    factorisability_residual(
                        &self.setup,
                        &run.psi_f,
                        Region::Final,
                        run.temperature,
                        p,
                    )
                    .map_err(&err)?,
                );
                Ok(vec![ReportRow {
                    residual: Some(r),
                    status: self.judged(r <= p.factorisability, self.judge_factorisability),
                    ..row(&pair.label)
                }])
            }
        }
    }
}

/// Evaluates every (temperature, pair, check) combination of `scenario`.
///
/// Rows come out temperature-major, then pair, then check, each in
/// declaration order. Work is spread over the current rayon pool; the output
/// does not depend on the number of threads.
pub fn run_scenario(scenario: &Scenario, options: &RunOptions) -> Result<Vec<ReportRow>> {
    let seed = options.seed.unwrap_or(scenario.seed);
    let policy = scenario
        .tolerances
        .apply(&NumericPolicy::default())
        .scaled(options.tol_scale);
    let setup = build_setup(&scenario.setup, &policy).map_err(domain(scenario))?;
    let variant = match scenario.evolution {
        EvolutionConfig::Autonomous { .. } => Variant::Autonomous,
        _ => Variant::Exact,
    };
    let ctx = Context {
        scenario,
        judge_crooks: scenario.tolerances.crooks.is_some(),
        judge_factorisability: scenario.tolerances.factorisability.is_some(),
        policy,
        setup,
        variant,
    };
    let pairs = ctx.resolve_pairs(seed)?;
    let (unitaries, which) = ctx.unitaries(&pairs, seed)?;

    let units: Vec<(f64, usize)> = scenario
        .temperature_sweep
        .iter()
        .flat_map(|&t| (0..pairs.len()).map(move |k| (t, k)))
        .collect();
    let chunks = units
        .par_iter()
        .map(|&(t, k)| {
            let pair = &pairs[k];
            let temperature = Temperature::new(t).map_err(domain(scenario))?;
            let run = ProtocolRun::new(
                &ctx.setup,
                &unitaries[which[k]],
                variant,
                temperature,
                pair.psi_i.clone(),
                pair.psi_f.clone(),
                &ctx.policy,
            )
            .map_err(domain(scenario))?;
            let mut rows = Vec::new();
            for &check in &scenario.checks {
                rows.extend(ctx.rows_for(&run, pair, check)?);
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Runs several scenarios, concatenating their rows in input order.
pub fn run_all(scenarios: &[Scenario], options: &RunOptions) -> Result<Vec<ReportRow>> {
    let parts = scenarios
        .par_iter()
        .map(|s| run_scenario(s, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}
