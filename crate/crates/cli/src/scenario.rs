//! Scenario files: TOML documents describing a setup, an evolution, a set of
//! state pairs and the checks to run on them.
//!
//! Parsing happens in two passes. The text is first read as plain TOML
//! (syntax errors carry line and column), then deserialized into
//! [`Scenario`] with unknown keys rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::Path;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crooks_core::NumericPolicy;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Crooks,
    Classical,
    Offdiag,
    Global,
    Factorisability,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Crooks,
        Check::Classical,
        Check::Offdiag,
        Check::Global,
        Check::Factorisability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Crooks => "crooks",
            Check::Classical => "classical",
            Check::Offdiag => "offdiag",
            Check::Global => "global",
            Check::Factorisability => "factorisability",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Check::Crooks => "ln P_fwd - ln P_rev against (ΔẼ - ΔF)/T for paired pure states",
            Check::Classical => "eigenstate pairs against ((E_i - E_f) - ΔF)/T",
            Check::Offdiag => {
                "coherence amplitudes q+/q- between shifted eigenstates, one row per delta"
            }
            Check::Global => "Q(ρ_i, ρ_f) = Q(Tρ_f, Tρ_i) with ρ = |φ⟩⟨φ| ⊗ γ",
            Check::Factorisability => "distance of e^{-H/2T}(ψ⊗1)e^{-H/2T} from its product form",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub temperature_sweep: Vec<f64>,
    pub checks: Vec<Check>,
    pub setup: SetupConfig,
    pub evolution: EvolutionConfig,
    pub state_pairs: Vec<PairConfig>,
    #[serde(default = "default_deltas")]
    pub offdiag_deltas: Vec<i64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Dotted key → list of values; read by the `sweep` subcommand.
    #[serde(default)]
    pub sweep: BTreeMap<String, Vec<toml::Value>>,
}

fn default_deltas() -> Vec<i64> {
    vec![0, 1, 2]
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetupConfig {
    Ladder {
        n_rungs: usize,
        #[serde(default = "one")]
        spacing: f64,
        eps_i: f64,
        eps_f: f64,
    },
    Lattice {
        n_sites: usize,
        #[serde(default = "one")]
        hop: f64,
        x_i: usize,
        x_f: usize,
        profile: ProfileConfig,
        #[serde(default)]
        trap_curvature: f64,
        trap_center: Option<f64>,
        /// Real symmetric 2×2 matrix added to both effective system Hamiltonians.
        bare_system: Option<[[f64; 2]; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Ramp { low: f64, high: f64 },
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EvolutionConfig {
    /// Two-level rotations between region-i and region-f eigenvectors.
    DesignatedSwap { angle: Option<f64> },
    /// Seeded random unitary inside each degenerate block; the seed defaults
    /// to the scenario seed.
    RandomBlock { block_seed: Option<u64> },
    /// `exp(-iHt)`; `time = "transit"` derives `t` per pair from the packet
    /// centers and momentum.
    Autonomous { time: TimeConfig },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TimeConfig {
    Fixed(f64),
    Named(NamedTime),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedTime {
    Transit,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub label: Option<String>,
    /// Number of pairs drawn from this entry; only useful with random states.
    #[serde(default = "one_usize")]
    pub repeat: usize,
    /// The state `ψ_i`; the forward process prepares its thermal pairing.
    pub prepare: StateConfig,
    /// The state `ψ_f` measured at the end of the forward process.
    pub measure: StateConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    /// Machine eigenstate by index within its region.
    Eigenstate(usize),
    /// Gaussian superposition over ladder rungs with a linear phase.
    Rungs {
        center: f64,
        width: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Explicit ladder amplitudes as `[re, im]` pairs, normalized on use.
    Amplitudes(Vec<[f64; 2]>),
    /// Random complex amplitudes on `support` distinct rungs drawn from the
    /// inclusive range `rungs`.
    Random {
        rungs: [usize; 2],
        #[serde(default = "one_usize")]
        support: usize,
    },
    /// Lattice wave packet, placed either at `center` or `distance` sites
    /// from the edge of the ramp.
    Packet {
        center: Option<f64>,
        distance: Option<f64>,
        width: f64,
        #[serde(default)]
        momentum: f64,
    },
}

/// Overrides for [`NumericPolicy`] fields.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub hermitian: Option<f64>,
    pub unitarity: Option<f64>,
    pub commutator_rel: Option<f64>,
    pub tr_invariance: Option<f64>,
    pub projector: Option<f64>,
    pub region_identity: Option<f64>,
    pub region_leak: Option<f64>,
    pub norm: Option<f64>,
    pub density: Option<f64>,
    pub eigen_residual: Option<f64>,
    pub vacuous_probability: Option<f64>,
    pub crooks: Option<f64>,
    pub rhs_agreement: Option<f64>,
    pub offdiag_phase: Option<f64>,
    pub global_rel: Option<f64>,
    pub global_abs: Option<f64>,
    pub factorisability: Option<f64>,
    pub channel: Option<f64>,
}

impl Tolerances {
    pub fn apply(&self, base: &NumericPolicy) -> NumericPolicy {
        let mut p = base.clone();
        let pairs = [
            (&mut p.hermitian, self.hermitian),
            (&mut p.unitarity, self.unitarity),
            (&mut p.commutator_rel, self.commutator_rel),
            (&mut p.tr_invariance, self.tr_invariance),
            (&mut p.projector, self.projector),
            (&mut p.region_identity, self.region_identity),
            (&mut p.region_leak, self.region_leak),
            (&mut p.norm, self.norm),
            (&mut p.density, self.density),
            (&mut p.eigen_residual, self.eigen_residual),
            (&mut p.vacuous_probability, self.vacuous_probability),
            (&mut p.crooks, self.crooks),
            (&mut p.rhs_agreement, self.rhs_agreement),
            (&mut p.offdiag_phase, self.offdiag_phase),
            (&mut p.global_rel, self.global_rel),
            (&mut p.global_abs, self.global_abs),
            (&mut p.factorisability, self.factorisability),
            (&mut p.channel, self.channel),
        ];
        for (slot, value) in pairs {
            if let Some(v) = value {
                *slot = v;
            }
        }
        p
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Best guess at the key an error is about: a backticked name in the message,
/// else the key on the line the error points at.
fn offending_key(message: &str, text: Option<&str>, span: Option<Range<usize>>) -> String {
    for marker in [
        "unknown field `",
        "missing field `",
        "unknown variant `",
        "duplicate field `",
    ] {
        if let Some(rest) = message.split(marker).nth(1) {
            if let Some(key) = rest.split('`').next() {
                return key.to_string();
            }
        }
    }
    if let Some(rest) = message.split("unexpected keys in table: ").nth(1) {
        if let Some(key) = rest.split([',', ' ']).next() {
            return key.to_string();
        }
    }
    if let (Some(text), Some(span)) = (text, span) {
        // tagged tables report type errors against the whole table; look for
        // the line holding the offending value
        if let Some(value) = message
            .strip_prefix("invalid type: ")
            .and_then(|m| m.split(", expected").next())
            .and_then(|m| m.split_once(' ').map(|(_, v)| v.trim()))
        {
            let region = &text[span.start.min(text.len())..];
            let mut body = region.lines().take(1).chain(
                region
                    .lines()
                    .skip(1)
                    .take_while(|l| !l.trim_start().starts_with('[')),
            );
            let hit = body.find_map(|line| {
                let (key, rhs) = line.split_once('=')?;
                (rhs.trim() == value).then(|| key.trim().to_string())
            });
            if let Some(key) = hit {
                return key;
            }
        }
        let start = text[..span.start.min(text.len())]
            .rfind('\n')
            .map_or(0, |i| i + 1);
        let line = text[start..].lines().next().unwrap_or("");
        if let Some((key, _)) = line.split_once('=') {
            return key.trim().to_string();
        }
        let line = line.trim();
        if line.starts_with('[') {
            return line.trim_matches(|c| c == '[' || c == ']').to_string();
        }
    }
    "<root>".to_string()
}

fn schema_error(origin: &str, err: &toml::de::Error, text: Option<&str>) -> CliError {
    let message = err.message().to_string();
    CliError::SchemaViolation {
        path: origin.to_string(),
        key: offending_key(&message, text, err.span()),
        message,
    }
}

fn violation(origin: &str, key: &str, message: impl Into<String>) -> CliError {
    CliError::SchemaViolation {
        path: origin.to_string(),
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_table(text: &str, origin: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>().map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        CliError::ConfigParse {
            path: origin.to_string(),
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })
}

impl Scenario {
    /// Parses and validates scenario text. `origin` names the source in errors.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        parse_table(text, origin)?;
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| schema_error(origin, &e, Some(text)))?;
        scenario.validate(origin)?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    fn validate(&self, origin: &str) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(violation(origin, "name", "must not be empty"));
        }
        if self.temperature_sweep.is_empty() {
            return Err(violation(
                origin,
                "temperature_sweep",
                "must list at least one temperature",
            ));
        }
        if let Some(t) = self
            .temperature_sweep
            .iter()
            .find(|t| !(t.is_finite() && **t > 0.0))
        {
            return Err(violation(
                origin,
                "temperature_sweep",
                format!("temperatures must be > 0, got {t}"),
            ));
        }
        if self.checks.is_empty() {
            return Err(violation(origin, "checks", "must list at least one check"));
        }
        if let Some(c) = self.checks.iter().duplicates().next() {
            return Err(violation(origin, "checks", format!("`{c}` listed twice")));
        }
        if self.state_pairs.is_empty() {
            return Err(violation(
                origin,
                "state_pairs",
                "must list at least one pair",
            ));
        }
        for pair in &self.state_pairs {
            if pair.repeat == 0 {
                return Err(violation(origin, "repeat", "must be ≥ 1"));
            }
            for state in [&pair.prepare, &pair.measure] {
                match state {
                    StateConfig::Random {
                        rungs: [lo, hi],
                        support,
                    } => {
                        if lo > hi || *support == 0 || *support > hi - lo + 1 {
                            return Err(violation(
                                origin,
                                "random",
                                format!("need 1 ≤ support ≤ rung count, got rungs [{lo}, {hi}] and support {support}"),
                            ));
                        }
                    }
                    StateConfig::Packet {
                        center, distance, ..
                    } if center.is_some() == distance.is_some() => {
                        return Err(violation(
                            origin,
                            "packet",
                            "give exactly one of `center` and `distance`",
                        ));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn set_path(table: &mut toml::Table, key: &str, value: toml::Value, origin: &str) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().unwrap_or(key);
    let mut cursor = table;
    for part in parts {
        cursor = cursor
            .get_mut(part)
            .and_then(toml::Value::as_table_mut)
            .ok_or_else(|| violation(origin, key, format!("sweep key: no table `{part}`")))?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

/// Expands the `[sweep]` table into one scenario per point of the Cartesian
/// product of its value lists, in key order. Point names carry the assignments,
/// e.g. `ladder[setup.eps_f=2.0;seed=1]`.
pub fn expand_sweep(text: &str, origin: &str) -> Result<Vec<Scenario>> {
    let base = Scenario::parse(text, origin)?;
    if base.sweep.is_empty() {
        return Err(violation(
            origin,
            "sweep",
            "the scenario has no [sweep] table",
        ));
    }
    if let Some((key, _)) = base.sweep.iter().find(|(_, v)| v.is_empty()) {
        return Err(violation(origin, key, "sweep list is empty"));
    }
    let mut table = parse_table(text, origin)?;
    table.remove("sweep");
    let keys: Vec<&String> = base.sweep.keys().collect();
    base.sweep
        .values()
        .map(|v| v.iter())
        .multi_cartesian_product()
        .map(|point| {
            let mut t = table.clone();
            let mut tags = Vec::with_capacity(keys.len());
            for (key, value) in keys.iter().zip(point) {
                set_path(&mut t, key, value.clone(), origin)?;
                tags.push(format!("{key}={value}"));
            }
            let mut scenario: Scenario = toml::Value::Table(t)
                .try_into()
                .map_err(|e| schema_error(origin, &e, None))?;
            scenario.name = format!("{}[{}]", scenario.name, tags.join(";"));
            scenario.validate(origin)?;
            Ok(scenario)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const LADDER: &str = r#"
name = "t"
temperature_sweep = [1.0]
checks = ["crooks"]

[setup]
kind = "ladder"
n_rungs = 3
eps_i = 1.0
eps_f = 2.0

[evolution]
kind = "designated_swap"

[[state_pairs]]
prepare = { eigenstate = 1 }
measure = { rungs = { center = 1.0, width = 0.5 } }
"#;

    #[test]
    fn parses_minimal_ladder() {
        let s = Scenario::parse(LADDER, "t.scn").unwrap();
        assert_eq!(s.seed, 0);
        assert_eq!(s.offdiag_deltas, vec![0, 1, 2]);
        assert_eq!(s.state_pairs[0].prepare, StateConfig::Eigenstate(1));
        assert!(matches!(
            s.evolution,
            EvolutionConfig::DesignatedSwap { angle: None }
        ));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = Scenario::parse("name = \"x\"\nseed = = 3\n", "bad.scn").unwrap_err();
        match err {
            CliError::ConfigParse { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_top_level_key_is_named() {
        let text = LADDER.replace("temperature_sweep", "temprature_sweep");
        match Scenario::parse(&text, "t.scn").unwrap_err() {
            CliError::SchemaViolation { key, .. } => assert_eq!(key, "temprature_sweep"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_nested_key_is_named() {
        let text = LADDER.replace("eps_f = 2.0", "eps_f = 2.0\nepsilon = 1.0");
        match Scenario::parse(&text, "t.scn").unwrap_err() {
            CliError::SchemaViolation { key, .. } => assert_eq!(key, "epsilon"),
            other => panic!("unexpected {other:?}"),
        }
        let text = LADDER.replace("width = 0.5", "width = 0.5, sigma = 1");
        match Scenario::parse(&text, "t.scn").unwrap_err() {
            CliError::SchemaViolation { key, .. } => assert_eq!(key, "sigma"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_type_names_the_line_key() {
        let text = LADDER.replace("n_rungs = 3", "n_rungs = \"three\"");
        match Scenario::parse(&text, "t.scn").unwrap_err() {
            CliError::SchemaViolation { key, .. } => assert_eq!(key, "n_rungs"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_nonpositive_temperature() {
        let text = LADDER.replace("[1.0]", "[1.0, 0.0]");
        assert!(matches!(
            Scenario::parse(&text, "t.scn"),
            Err(CliError::SchemaViolation { key, .. }) if key == "temperature_sweep"
        ));
    }

    #[test]
    fn transit_time_keyword() {
        let text = LADDER.replace(
            "kind = \"designated_swap\"",
            "kind = \"autonomous\"\ntime = \"transit\"",
        );
        let s = Scenario::parse(&text, "t.scn").unwrap();
        assert_eq!(
            s.evolution,
            EvolutionConfig::Autonomous {
                time: TimeConfig::Named(NamedTime::Transit)
            }
        );
    }

    #[test]
    fn sweep_expands_in_key_order() {
        let text = format!("{LADDER}\n[sweep]\n\"setup.eps_f\" = [1.0, 3.0]\nseed = [1, 2]\n");
        let points = expand_sweep(&text, "t.scn").unwrap();
        let names: Vec<_> = points.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "t[seed=1;setup.eps_f=1.0]",
                "t[seed=1;setup.eps_f=3.0]",
                "t[seed=2;setup.eps_f=1.0]",
                "t[seed=2;setup.eps_f=3.0]"
            ]
        );
        assert!(points.iter().all(|s| s.sweep.is_empty()));
        assert_eq!(
            points[1].setup,
            SetupConfig::Ladder {
                n_rungs: 3,
                spacing: 1.0,
                eps_i: 1.0,
                eps_f: 3.0
            }
        );
    }

    #[test]
    fn tolerance_overrides() {
        let t = Tolerances {
            crooks: Some(1e-3),
            ..Default::default()
        };
        let p = t.apply(&NumericPolicy::default());
        assert_eq!(p.crooks, 1e-3);
        assert_eq!(p.norm, NumericPolicy::default().norm);
    }
}
