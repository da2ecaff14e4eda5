//! Scenario configuration: the TOML schema, validation, and resolution.
//!
//! A scenario file fully determines an experiment: population source and
//! synthetic assignments, tiering method, plan grid, cost and trainer models,
//! agent hyper-parameters, and the run protocol (rounds, seeds, strategies).
//! Parsing is strict — unknown keys are errors naming the key — and semantic
//! validation reports *every* violation at once rather than the first.
//!
//! [`parse_config`] turns a file into a [`Scenario`]: paths resolved relative
//! to the config file, the security table loaded, and the plan grid filtered
//! to admissible plans.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plan::{valid_grid, CostModel, ParameterPlan, PlanError, SecurityTable};
use crate::tiering::Criterion;

/// How the population is partitioned into tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieringMethod {
    /// Criteria applied in order, `K^(1/β)`-way split per stage.
    Hierarchical,
    /// Flat quantile bands of past (or estimated) round time.
    Roundtime,
    /// Uniform random near-equal partition.
    Random,
    /// Flat quantile bands of recent utility gain.
    Utility,
}

/// A plan-assignment policy compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// One conservative plan for everyone.
    Baseline,
    /// One cheap plan for everyone.
    Heuristic,
    /// Static split: the cheap plan for slow tiers, the conservative one for
    /// fast tiers.
    Adaptive,
    /// The Q-learning agent picks per tier per round.
    Rl,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Baseline,
        Strategy::Heuristic,
        Strategy::Adaptive,
        Strategy::Rl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Baseline => "baseline",
            Strategy::Heuristic => "heuristic",
            Strategy::Adaptive => "adaptive",
            Strategy::Rl => "rl",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the Q-table starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QInitSpec {
    /// Zeros; with the lexicographic tie-break the agent probes
    /// cheapest-first.
    Zero,
    /// Uniform in `[0, q_init_max]`.
    Uniform,
}

fn default_security_weights() -> [f64; 3] {
    [1.0, 1.0, 1.0]
}
fn default_dirichlet_alpha() -> f64 {
    0.5
}
fn default_total_samples() -> u64 {
    50_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPopulation {
    trace: String,
    n_clients: usize,
    #[serde(default = "default_security_weights")]
    security_weights: [f64; 3],
    #[serde(default = "default_dirichlet_alpha")]
    dirichlet_alpha: f64,
    #[serde(default = "default_total_samples")]
    total_samples: u64,
}

fn default_criteria() -> Vec<Criterion> {
    vec![Criterion::Security, Criterion::Latency]
}
fn default_k() -> usize {
    9
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTiering {
    #[serde(default = "default_method")]
    method: TieringMethod,
    #[serde(default = "default_criteria")]
    criteria: Vec<Criterion>,
    #[serde(default = "default_k")]
    k: usize,
}

fn default_method() -> TieringMethod {
    TieringMethod::Hierarchical
}

impl Default for RawTiering {
    fn default() -> Self {
        Self {
            method: default_method(),
            criteria: default_criteria(),
            k: default_k(),
        }
    }
}

fn default_log_n() -> Vec<u32> {
    vec![13, 14, 15]
}
fn default_q_bits() -> Vec<u32> {
    vec![60, 100, 150, 200, 300]
}
fn default_latency_bands() -> usize {
    4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlans {
    #[serde(default = "default_log_n")]
    log_n: Vec<u32>,
    #[serde(default = "default_q_bits")]
    q_bits: Vec<u32>,
    /// Path to a security-table TOML; the shipped table when absent.
    #[serde(default)]
    security_table: Option<String>,
    #[serde(default = "default_latency_bands")]
    latency_bands: usize,
}

impl Default for RawPlans {
    fn default() -> Self {
        Self {
            log_n: default_log_n(),
            q_bits: default_q_bits(),
            security_table: None,
            latency_bands: default_latency_bands(),
        }
    }
}

/// Trainer-model knobs plus the global model's starting accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainerSpec {
    /// Asymptotic accuracy ceiling absent any precision penalty.
    pub a_max: f64,
    /// Convergence-rate constant per round.
    pub rate: f64,
    /// Per-round shared gain noise (standard deviation).
    pub noise_sd: f64,
    /// Per-client gain spread (standard deviation).
    pub heterogeneity_sd: f64,
    /// Global accuracy before round one.
    pub initial_accuracy: f64,
}

impl Default for TrainerSpec {
    fn default() -> Self {
        Self {
            a_max: 0.8,
            rate: 0.05,
            noise_sd: 0.0,
            heterogeneity_sd: 0.0,
            initial_accuracy: 0.1,
        }
    }
}

/// Agent hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RlSpec {
    /// Learning rate γ ∈ (0,1].
    pub gamma: f64,
    /// Discount factor μ ∈ [0,1).
    pub mu: f64,
    /// Exploration rate ε ∈ [0,1].
    pub epsilon: f64,
    /// Per-round multiplicative ε decay; 1.0 keeps ε constant.
    pub epsilon_decay: f64,
    /// Security-penalty coefficient α ≥ 0 in the reward.
    pub alpha: f64,
    pub q_init: QInitSpec,
    /// Upper bound of the uniform Q-init draw.
    pub q_init_max: f64,
}

impl Default for RlSpec {
    fn default() -> Self {
        Self {
            gamma: 0.1,
            mu: 0.9,
            epsilon: 0.1,
            epsilon_decay: 1.0,
            alpha: 1.0,
            q_init: QInitSpec::Uniform,
            q_init_max: 0.01,
        }
    }
}

fn default_rounds() -> u64 {
    100
}
fn default_participation() -> f64 {
    0.1
}
fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4, 5]
}
fn default_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}
fn default_model_params() -> u64 {
    11_000_000
}
fn default_parallelism() -> usize {
    4
}

/// The run protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSpec {
    pub rounds: u64,
    /// Fraction of the population sampled each round, in (0,1].
    pub participation: f64,
    pub seeds: Vec<u64>,
    pub strategies: Vec<Strategy>,
    /// Aggregated model size in parameters (drives HE cost and bytes).
    pub model_params: u64,
    /// Early-stop accuracy. When absent, runs go the full distance and
    /// convergence is measured against 95% of the run's own final accuracy.
    pub target_accuracy: Option<f64>,
    /// Concurrency bound for comparison/sweep cells.
    pub parallelism: usize,
    /// Per-tier clocks instead of synchronous rounds (default off: the
    /// server waits for the slowest tier).
    pub asynchronous: bool,
    /// Recompute the tiering each round from observed latency/utility
    /// history (default off: tier once before round one).
    pub dynamic_retiering: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            rounds: default_rounds(),
            participation: default_participation(),
            seeds: default_seeds(),
            strategies: default_strategies(),
            model_params: default_model_params(),
            target_accuracy: None,
            parallelism: default_parallelism(),
            asynchronous: false,
            dynamic_retiering: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
struct PlanPair(u32, u32);

impl From<PlanPair> for ParameterPlan {
    fn from(p: PlanPair) -> Self {
        ParameterPlan::new(p.0, p.1)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
#[derive(Default)]
struct RawStrategyPlans {
    baseline: Option<PlanPair>,
    heuristic: Option<PlanPair>,
    adaptive_low: Option<PlanPair>,
    adaptive_high: Option<PlanPair>,
}

/// The fixed plans the non-learning strategies use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StrategyPlans {
    pub baseline: ParameterPlan,
    pub heuristic: ParameterPlan,
    pub adaptive_low: ParameterPlan,
    pub adaptive_high: ParameterPlan,
}

impl Default for StrategyPlans {
    fn default() -> Self {
        Self {
            baseline: ParameterPlan::new(14, 200),
            heuristic: ParameterPlan::new(13, 100),
            adaptive_low: ParameterPlan::new(13, 100),
            adaptive_high: ParameterPlan::new(14, 200),
        }
    }
}

/// Per-axis value lists for the `sweep` verb when the CLI gives none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub alpha: Vec<f64>,
    pub k: Vec<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            alpha: vec![1.0, 5.0, 10.0],
            k: vec![4, 9, 16],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    population: RawPopulation,
    #[serde(default)]
    tiering: RawTiering,
    #[serde(default)]
    plans: RawPlans,
    #[serde(default)]
    cost_model: CostModel,
    #[serde(default)]
    trainer: TrainerSpec,
    #[serde(default)]
    rl: RlSpec,
    #[serde(default)]
    run: RunSpec,
    #[serde(default)]
    strategy_plans: RawStrategyPlans,
    #[serde(default)]
    sweep: SweepSpec,
}

/// Population source and synthetic-assignment knobs, paths resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationSpec {
    pub trace: PathBuf,
    pub n_clients: usize,
    /// Weights over the (128, 192, 256)-bit levels.
    pub security_weights: [f64; 3],
    pub dirichlet_alpha: f64,
    pub total_samples: u64,
}

/// Tiering method and shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TieringSpec {
    pub method: TieringMethod,
    /// Hierarchical criteria, outermost first (ignored by flat methods).
    pub criteria: Vec<Criterion>,
    pub k: usize,
}

/// A fully validated, resolved experiment description.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Config-file stem; names the output directory.
    pub name: String,
    pub population: PopulationSpec,
    pub tiering: TieringSpec,
    /// Admissible plan grid, lexicographically sorted.
    pub grid: Vec<ParameterPlan>,
    /// Latency-bucket count of the agent's state space.
    pub latency_bands: usize,
    pub table: SecurityTable,
    pub cost: CostModel,
    pub trainer: TrainerSpec,
    pub rl: RlSpec,
    pub run: RunSpec,
    pub strategy_plans: StrategyPlans,
    pub sweep: SweepSpec,
}

impl Scenario {
    /// The mid-grid plan used for cold-start latency keys and state bounds.
    pub fn reference_plan(&self) -> ParameterPlan {
        self.grid[self.grid.len() / 2]
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config:{}", violations.iter().map(|v| format!("\n  - {v}")).collect::<String>())]
    Invalid { violations: Vec<String> },
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Parses and fully validates a scenario file. Relative paths inside the
/// file resolve against the file's own directory.
pub fn parse_config(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    parse_config_str(&text, &base_dir, &name)
}

/// [`parse_config`] over in-memory TOML.
pub fn parse_config_str(
    text: &str,
    base_dir: &Path,
    name: &str,
) -> Result<Scenario, ScenarioError> {
    if text.trim().is_empty() {
        return Err(ScenarioError::Parse("config file is empty".into()));
    }
    let raw: RawScenario = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    resolve(raw, base_dir, name)
}

fn resolve_path(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn resolve(raw: RawScenario, base_dir: &Path, name: &str) -> Result<Scenario, ScenarioError> {
    let mut violations: Vec<String> = Vec::new();
    let mut flag = |cond: bool, msg: String| {
        if cond {
            violations.push(msg);
        }
    };

    let p = &raw.population;
    flag(
        p.trace.trim().is_empty(),
        "population.trace is empty".into(),
    );
    flag(p.n_clients == 0, "population.n_clients must be >= 1".into());
    flag(
        p.security_weights
            .iter()
            .any(|&w| !(w >= 0.0) || !w.is_finite())
            || !(p.security_weights.iter().sum::<f64>() > 0.0),
        "population.security_weights must be non-negative with a positive sum".into(),
    );
    flag(
        !(p.dirichlet_alpha > 0.0) || !p.dirichlet_alpha.is_finite(),
        "population.dirichlet_alpha must be finite and > 0".into(),
    );
    flag(
        p.total_samples == 0,
        "population.total_samples must be >= 1".into(),
    );

    let t = &raw.tiering;
    flag(t.k == 0, "tiering.k must be >= 1".into());
    if t.method == TieringMethod::Hierarchical {
        flag(
            t.criteria.is_empty(),
            "tiering.criteria must name at least one criterion for the hierarchical method".into(),
        );
        if t.k > 1 && !t.criteria.is_empty() {
            let beta = t.criteria.len();
            if crate::tiering::exact_root(t.k, beta).is_none() {
                let valid: Vec<String> = (2usize..=4)
                    .map(|m| m.pow(beta as u32).to_string())
                    .collect();
                flag(
                    true,
                    format!(
                        "tiering.k={} is not m^{} for an integer m >= 2; nearby valid values: {}",
                        t.k,
                        beta,
                        valid.join(", ")
                    ),
                );
            }
        }
    }
    if t.method == TieringMethod::Random {
        flag(
            t.k > p.n_clients,
            format!(
                "tiering.k={} exceeds population.n_clients={} (random tiering forbids empty tiers)",
                t.k, p.n_clients
            ),
        );
    }

    let pl = &raw.plans;
    flag(pl.log_n.is_empty(), "plans.log_n must be non-empty".into());
    flag(
        pl.q_bits.is_empty(),
        "plans.q_bits must be non-empty".into(),
    );
    flag(
        pl.latency_bands == 0,
        "plans.latency_bands must be >= 1".into(),
    );

    if let Err(e) = raw.cost_model.validate() {
        flag(true, format!("cost_model: {e}"));
    }

    let tr = &raw.trainer;
    flag(
        !(tr.a_max > 0.0 && tr.a_max <= 1.0),
        "trainer.a_max must be in (0,1]".into(),
    );
    flag(!(tr.rate > 0.0), "trainer.rate must be > 0".into());
    flag(
        !(tr.noise_sd >= 0.0),
        "trainer.noise_sd must be >= 0".into(),
    );
    flag(
        !(tr.heterogeneity_sd >= 0.0),
        "trainer.heterogeneity_sd must be >= 0".into(),
    );
    flag(
        !(tr.initial_accuracy >= 0.0 && tr.initial_accuracy < 1.0),
        "trainer.initial_accuracy must be in [0,1)".into(),
    );

    let rl = &raw.rl;
    flag(
        !(rl.gamma > 0.0 && rl.gamma <= 1.0),
        "rl.gamma must be in (0,1]".into(),
    );
    flag(
        !(rl.mu >= 0.0 && rl.mu < 1.0),
        "rl.mu must be in [0,1)".into(),
    );
    flag(
        !(rl.epsilon >= 0.0 && rl.epsilon <= 1.0),
        "rl.epsilon must be in [0,1]".into(),
    );
    flag(
        !(rl.epsilon_decay > 0.0 && rl.epsilon_decay <= 1.0),
        "rl.epsilon_decay must be in (0,1]".into(),
    );
    flag(!(rl.alpha >= 0.0), "rl.alpha must be >= 0".into());
    flag(!(rl.q_init_max >= 0.0), "rl.q_init_max must be >= 0".into());

    let r = &raw.run;
    flag(
        !(r.participation > 0.0 && r.participation <= 1.0),
        "run.participation must be in (0,1]".into(),
    );
    flag(r.seeds.is_empty(), "run.seeds must be non-empty".into());
    flag(
        r.strategies.is_empty(),
        "run.strategies must be non-empty".into(),
    );
    flag(r.model_params == 0, "run.model_params must be >= 1".into());
    flag(r.parallelism == 0, "run.parallelism must be >= 1".into());
    if let Some(target) = r.target_accuracy {
        flag(
            !(target > 0.0 && target <= 1.0),
            "run.target_accuracy must be in (0,1]".into(),
        );
    }

    flag(
        raw.sweep.alpha.is_empty(),
        "sweep.alpha must be non-empty".into(),
    );
    flag(raw.sweep.k.is_empty(), "sweep.k must be non-empty".into());

    // Table and grid resolution can themselves surface violations; keep
    // collecting rather than bailing.
    let table = match &pl.security_table {
        None => Some(SecurityTable::shipped()),
        Some(rel) => {
            let table_path = resolve_path(base_dir, rel);
            match std::fs::read_to_string(&table_path) {
                Err(e) => {
                    violations.push(format!(
                        "plans.security_table: cannot read {}: {e}",
                        table_path.display()
                    ));
                    None
                }
                Ok(text) => match SecurityTable::from_toml_str(&text) {
                    Ok(t) => Some(t),
                    Err(e) => {
                        violations.push(format!("plans.security_table: {e}"));
                        None
                    }
                },
            }
        }
    };

    let mut grid = Vec::new();
    let mut strategy_plans = StrategyPlans::default();
    if let Some(table) = &table {
        match valid_grid(&pl.log_n, &pl.q_bits, table) {
            Ok(g) if g.is_empty() => {
                violations.push("plans: no admissible plan in the configured grid".into())
            }
            Ok(g) => grid = g,
            Err(e) => violations.push(format!("plans: {e}")),
        }
        let defaults = StrategyPlans::default();
        let mut fixed = |name: &str, choice: Option<PlanPair>, default: ParameterPlan| {
            let plan = choice.map(ParameterPlan::from).unwrap_or(default);
            match crate::plan::validate_plan(plan, table) {
                Ok(v) if v.is_valid() => plan,
                Ok(_) => {
                    violations.push(format!(
                        "strategy_plans.{name}: plan {plan} violates the 128-bit security bound"
                    ));
                    default
                }
                Err(e) => {
                    violations.push(format!("strategy_plans.{name}: {e}"));
                    default
                }
            }
        };
        strategy_plans = StrategyPlans {
            baseline: fixed("baseline", raw.strategy_plans.baseline, defaults.baseline),
            heuristic: fixed(
                "heuristic",
                raw.strategy_plans.heuristic,
                defaults.heuristic,
            ),
            adaptive_low: fixed(
                "adaptive_low",
                raw.strategy_plans.adaptive_low,
                defaults.adaptive_low,
            ),
            adaptive_high: fixed(
                "adaptive_high",
                raw.strategy_plans.adaptive_high,
                defaults.adaptive_high,
            ),
        };
    }

    if !violations.is_empty() {
        return Err(ScenarioError::Invalid { violations });
    }

    Ok(Scenario {
        name: name.to_string(),
        population: PopulationSpec {
            trace: resolve_path(base_dir, &p.trace),
            n_clients: p.n_clients,
            security_weights: p.security_weights,
            dirichlet_alpha: p.dirichlet_alpha,
            total_samples: p.total_samples,
        },
        tiering: TieringSpec {
            method: t.method,
            criteria: t.criteria.clone(),
            k: t.k,
        },
        grid,
        latency_bands: pl.latency_bands,
        table: table.expect("violations were empty"),
        cost: raw.cost_model,
        trainer: raw.trainer,
        rl: raw.rl,
        run: raw.run.clone(),
        strategy_plans,
        sweep: raw.sweep.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> String {
        "[population]\ntrace = \"devices.csv\"\nn_clients = 100\n".to_string()
    }

    fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        parse_config_str(text, Path::new("/tmp/scenarios"), "test")
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let s = parse(&minimal()).unwrap();
        assert_eq!(s.tiering.k, 9);
        assert_eq!(s.tiering.method, TieringMethod::Hierarchical);
        assert_eq!(s.run.participation, 0.1);
        assert_eq!(s.rl.gamma, 0.1);
        assert_eq!(s.rl.mu, 0.9);
        assert_eq!(s.rl.epsilon, 0.1);
        assert_eq!(s.rl.epsilon_decay, 1.0);
        // Default grid: 3x5 combinations minus the one over-budget plan.
        assert_eq!(s.grid.len(), 14);
        assert!(!s.grid.contains(&ParameterPlan::new(13, 300)));
        assert_eq!(s.reference_plan(), ParameterPlan::new(14, 200));
        assert_eq!(s.strategy_plans.baseline, ParameterPlan::new(14, 200));
        assert_eq!(s.strategy_plans.heuristic, ParameterPlan::new(13, 100));
        // Relative trace path resolves against the config directory.
        assert_eq!(s.population.trace, Path::new("/tmp/scenarios/devices.csv"));
    }

    #[test]
    fn empty_config_rejected() {
        assert!(matches!(parse(""), Err(ScenarioError::Parse(_))));
        assert!(matches!(parse("   \n"), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn unknown_keys_named() {
        let text = format!("{}\n[run]\nroundz = 3\n", minimal());
        match parse(&text) {
            Err(ScenarioError::Parse(msg)) => assert!(msg.contains("roundz"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn k_grid_violation_suggests_valid_values() {
        let text = format!("{}\n[tiering]\nk = 7\n", minimal());
        match parse(&text) {
            Err(ScenarioError::Invalid { violations }) => {
                assert_eq!(violations.len(), 1);
                assert!(violations[0].contains("4, 9, 16"), "{violations:?}");
            }
            other => panic!("expected invalid, got {other:?}"),
        }
    }

    #[test]
    fn all_violations_reported_at_once() {
        let text = format!(
            "{}\n[run]\nparticipation = 0.0\nseeds = []\n\n[rl]\ngamma = 0.0\n",
            minimal()
        );
        match parse(&text) {
            Err(ScenarioError::Invalid { violations }) => {
                assert_eq!(violations.len(), 3, "{violations:?}");
                let joined = violations.join("; ");
                assert!(joined.contains("participation"));
                assert!(joined.contains("seeds"));
                assert!(joined.contains("gamma"));
            }
            other => panic!("expected invalid, got {other:?}"),
        }
    }

    #[test]
    fn strategy_plan_overrides_validated() {
        let text = format!("{}\n[strategy_plans]\nheuristic = [13, 300]\n", minimal());
        match parse(&text) {
            Err(ScenarioError::Invalid { violations }) => {
                assert!(violations[0].contains("heuristic"), "{violations:?}");
            }
            other => panic!("expected invalid, got {other:?}"),
        }
        let ok = format!("{}\n[strategy_plans]\nheuristic = [13, 60]\n", minimal());
        let s = parse(&ok).unwrap();
        assert_eq!(s.strategy_plans.heuristic, ParameterPlan::new(13, 60));
    }

    #[test]
    fn random_tiering_k_bound() {
        let text = format!("{}\n[tiering]\nmethod = \"random\"\nk = 200\n", minimal());
        assert!(matches!(parse(&text), Err(ScenarioError::Invalid { .. })));
    }

    #[test]
    fn k1_hierarchical_allowed() {
        let text = format!("{}\n[tiering]\nk = 1\n", minimal());
        assert!(parse(&text).is_ok());
    }

    #[test]
    fn zero_rounds_allowed() {
        let text = format!("{}\n[run]\nrounds = 0\n", minimal());
        assert_eq!(parse(&text).unwrap().run.rounds, 0);
    }

    #[test]
    fn strategies_parse_by_name() {
        let text = format!(
            "{}\n[run]\nstrategies = [\"baseline\", \"rl\"]\n",
            minimal()
        );
        let s = parse(&text).unwrap();
        assert_eq!(s.run.strategies, vec![Strategy::Baseline, Strategy::Rl]);
        let bad = format!("{}\n[run]\nstrategies = [\"sgd\"]\n", minimal());
        assert!(matches!(parse(&bad), Err(ScenarioError::Parse(_))));
    }
}
