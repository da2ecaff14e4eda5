//! The tabular Q-learning agent that picks per-tier parameter plans.
//!
//! Each tier is summarized as a [`StateId`]: the strictest security
//! requirement among its members (three bands) crossed with a bucket of its
//! mean round latency under the reference plan. Actions are the plans of a
//! finite grid. Selection is ε-greedy; rewards balance the utility gained per
//! second of tier round time against a penalty `alpha` for every participant
//! whose security requirement the tier's plan missed; updates follow the
//! standard one-step Q-learning rule
//! `Q(s,a) += gamma · (r + mu · max Q(s',·) − Q(s,a))`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::client::{ClientId, Population};
use crate::plan::ParameterPlan;
use crate::rng::{stream_rng, StreamKind};
use crate::tiering::{Criterion, KeyContext, Tiering};

/// Discretized per-tier state: `(security band, latency band)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StateId {
    /// 0 for 128-bit, 1 for 192-bit, 2 for 256-bit maximum member
    /// requirement.
    pub security_band: usize,
    /// Bucket of the tier's mean member latency.
    pub latency_band: usize,
}

impl std::fmt::Display for StateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.security_band, self.latency_band)
    }
}

/// Band index of one security level: 128 → 0, 192 → 1, 256 → 2.
pub fn security_band(security_bits: u32) -> usize {
    match security_bits {
        128 => 0,
        192 => 1,
        _ => 2,
    }
}

/// Bucket edges at the `i/buckets` quantiles of `values`, deduplicated so
/// they are strictly increasing (constant populations yield no edges, i.e. a
/// single bucket).
pub fn latency_bucket_edges(values: &[f64], buckets: usize) -> Vec<f64> {
    if values.is_empty() || buckets <= 1 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut edges: Vec<f64> = (1..buckets)
        .map(|i| sorted[i * sorted.len() / buckets])
        .collect();
    edges.dedup();
    // A quantile equal to the minimum would make bucket 0 unreachable.
    edges.retain(|&e| e > sorted[0]);
    edges
}

/// Bucket of `value` given strictly increasing `edges`: the number of edges
/// at or below it (a value exactly on an edge lands in the higher bucket).
pub fn latency_bucket(value: f64, edges: &[f64]) -> usize {
    edges.iter().filter(|&&e| value >= e).count()
}

/// Summarizes one tier's members as a state, or `None` for an empty tier.
///
/// The security band is the *maximum* member requirement — one under-served
/// client already triggers the reward penalty, so the strictest need defines
/// the state. The latency band buckets the mean member latency key (the
/// reference-plan estimate, or observed history when the context carries it).
pub fn discretize_state(
    members: &[ClientId],
    pop: &Population,
    ctx: &KeyContext,
    latency_edges: &[f64],
) -> Option<StateId> {
    if members.is_empty() {
        return None;
    }
    let max_req = members
        .iter()
        .map(|&id| pop.get(id).security_req)
        .max()
        .expect("non-empty");
    let mean_latency = members
        .iter()
        .map(|&id| Criterion::Latency.key(pop.get(id), ctx))
        .sum::<f64>()
        / members.len() as f64;
    Some(StateId {
        security_band: security_band(max_req),
        latency_band: latency_bucket(mean_latency, latency_edges),
    })
}

/// How a fresh Q-table is filled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QInit {
    /// All entries zero: with the lexicographic tie-break the agent probes
    /// plans smallest-first.
    Zero,
    /// Uniform random in `[0, max]` under the experiment seed.
    Uniform { max: f64 },
}

/// Dense Q-value table over `3 × latency_bands` states and a sorted plan
/// grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    grid: Vec<ParameterPlan>,
    latency_bands: usize,
    values: Vec<f64>,
    /// Learning rate, in `(0, 1]`.
    pub gamma: f64,
    /// Discount factor, in `[0, 1)`.
    pub mu: f64,
    /// Exploration rate, in `[0, 1]`. The simulation loop may anneal this
    /// between rounds.
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("action grid must be non-empty")]
    EmptyGrid,
    #[error("latency_bands must be >= 1")]
    NoLatencyBands,
    #[error("gamma must be in (0,1], got {0}")]
    BadGamma(f64),
    #[error("mu must be in [0,1), got {0}")]
    BadMu(f64),
    #[error("epsilon must be in [0,1], got {0}")]
    BadEpsilon(f64),
    #[error("reward needs at least one tier observation")]
    EmptyObservations,
    #[error("q-table json: {0}")]
    BadJson(String),
    #[error("q-table json key `{0}` is not of the form (sb,lb)->(log_n,q_bits)")]
    BadKey(String),
    #[error("q-table json is incomplete: expected {expected} entries, found {found}")]
    Incomplete { expected: usize, found: usize },
}

impl QTable {
    /// Builds a table over `grid` (sorted, deduplicated) and
    /// `3 × latency_bands` states, filled per `init` (the `Uniform` variant
    /// draws from the seed's Q-init stream in state-major order).
    pub fn new(
        mut grid: Vec<ParameterPlan>,
        latency_bands: usize,
        gamma: f64,
        mu: f64,
        epsilon: f64,
        init: QInit,
        seed: u64,
    ) -> Result<Self, AgentError> {
        grid.sort();
        grid.dedup();
        if grid.is_empty() {
            return Err(AgentError::EmptyGrid);
        }
        if latency_bands == 0 {
            return Err(AgentError::NoLatencyBands);
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(AgentError::BadGamma(gamma));
        }
        if !(0.0..1.0).contains(&mu) {
            return Err(AgentError::BadMu(mu));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(AgentError::BadEpsilon(epsilon));
        }
        let n = 3 * latency_bands * grid.len();
        let values = match init {
            QInit::Zero => vec![0.0; n],
            QInit::Uniform { max } => {
                let mut rng = stream_rng(seed, StreamKind::QInit, 0);
                (0..n).map(|_| rng.random::<f64>() * max).collect()
            }
        };
        Ok(Self {
            grid,
            latency_bands,
            values,
            gamma,
            mu,
            epsilon,
        })
    }

    pub fn grid(&self) -> &[ParameterPlan] {
        &self.grid
    }

    pub fn latency_bands(&self) -> usize {
        self.latency_bands
    }

    pub fn n_states(&self) -> usize {
        3 * self.latency_bands
    }

    fn state_index(&self, s: StateId) -> usize {
        assert!(s.security_band < 3 && s.latency_band < self.latency_bands);
        s.security_band * self.latency_bands + s.latency_band
    }

    /// Q-value of action index `a` in state `s`.
    pub fn q(&self, s: StateId, a: usize) -> f64 {
        self.values[self.state_index(s) * self.grid.len() + a]
    }

    /// Highest Q-value in state `s`.
    pub fn max_q(&self, s: StateId) -> f64 {
        let base = self.state_index(s) * self.grid.len();
        self.values[base..base + self.grid.len()]
            .iter()
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Index of the greedy action in `s`; equal maxima resolve to the
    /// lexicographically smallest plan (the grid is sorted, first win).
    pub fn argmax(&self, s: StateId) -> usize {
        let base = self.state_index(s) * self.grid.len();
        let mut best = 0;
        for a in 1..self.grid.len() {
            if self.values[base + a] > self.values[base + best] {
                best = a;
            }
        }
        best
    }

    /// The plan an action index names.
    pub fn plan(&self, action: usize) -> ParameterPlan {
        self.grid[action]
    }

    /// Serializes hyper-parameters and every entry, keyed
    /// `"(security_band,latency_band)->(log_n,q_bits)"`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut entries = BTreeMap::new();
        for sb in 0..3 {
            for lb in 0..self.latency_bands {
                let s = StateId {
                    security_band: sb,
                    latency_band: lb,
                };
                for (a, plan) in self.grid.iter().enumerate() {
                    entries.insert(format!("{s}->{plan}"), self.q(s, a));
                }
            }
        }
        serde_json::json!({
            "gamma": self.gamma,
            "mu": self.mu,
            "epsilon": self.epsilon,
            "latency_bands": self.latency_bands,
            "values": entries,
        })
    }

    /// Rebuilds a table from [`QTable::to_json`] output, checking that every
    /// state × action cell of the implied grid is present.
    pub fn from_json(v: &serde_json::Value) -> Result<Self, AgentError> {
        let field = |name: &str| {
            v.get(name)
                .and_then(serde_json::Value::as_f64)
                .ok_or_else(|| AgentError::BadJson(format!("missing numeric field `{name}`")))
        };
        let gamma = field("gamma")?;
        let mu = field("mu")?;
        let epsilon = field("epsilon")?;
        let latency_bands = field("latency_bands")? as usize;
        let entries = v
            .get("values")
            .and_then(serde_json::Value::as_object)
            .ok_or_else(|| AgentError::BadJson("missing `values` object".into()))?;

        let mut parsed: Vec<(StateId, ParameterPlan, f64)> = Vec::with_capacity(entries.len());
        for (key, value) in entries {
            let value = value
                .as_f64()
                .ok_or_else(|| AgentError::BadJson(format!("entry `{key}` is not a number")))?;
            let (state_part, plan_part) = key
                .split_once("->")
                .ok_or_else(|| AgentError::BadKey(key.clone()))?;
            let pair = |s: &str| -> Result<(u64, u64), AgentError> {
                let inner = s
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| AgentError::BadKey(key.clone()))?;
                let (a, b) = inner
                    .split_once(',')
                    .ok_or_else(|| AgentError::BadKey(key.clone()))?;
                Ok((
                    a.trim()
                        .parse()
                        .map_err(|_| AgentError::BadKey(key.clone()))?,
                    b.trim()
                        .parse()
                        .map_err(|_| AgentError::BadKey(key.clone()))?,
                ))
            };
            let (sb, lb) = pair(state_part)?;
            let (log_n, q_bits) = pair(plan_part)?;
            parsed.push((
                StateId {
                    security_band: sb as usize,
                    latency_band: lb as usize,
                },
                ParameterPlan::new(log_n as u32, q_bits as u32),
                value,
            ));
        }
        let mut grid: Vec<ParameterPlan> = parsed.iter().map(|(_, p, _)| *p).collect();
        grid.sort();
        grid.dedup();
        let mut table = Self::new(grid, latency_bands, gamma, mu, epsilon, QInit::Zero, 0)?;
        let expected = table.values.len();
        if parsed.len() != expected {
            return Err(AgentError::Incomplete {
                expected,
                found: parsed.len(),
            });
        }
        for (s, plan, value) in parsed {
            if s.security_band >= 3 || s.latency_band >= latency_bands {
                return Err(AgentError::BadJson(format!("state {s} out of range")));
            }
            let a = table
                .grid
                .binary_search(&plan)
                .expect("plan from parsed grid");
            let idx = table.state_index(s) * table.grid.len() + a;
            table.values[idx] = value;
        }
        Ok(table)
    }
}

/// ε-greedy selection: with probability `epsilon` a uniform action, else the
/// greedy one. Exactly one uniform draw decides the branch, so the caller's
/// generator advances deterministically.
pub fn select_action(q: &QTable, s: StateId, rng: &mut impl Rng) -> usize {
    if rng.random::<f64>() < q.epsilon {
        rng.random_range(0..q.grid().len())
    } else {
        q.argmax(s)
    }
}

/// One participant as the reward sees it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservedParticipant {
    pub id: ClientId,
    /// Accuracy-proxy gain this round.
    pub delta_util: f64,
    /// The client's required security level in bits.
    pub security_req: u32,
}

/// What one tier reported for one round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TierRoundObservation {
    pub tier: usize,
    /// Participants this round; non-empty.
    pub participants: Vec<ObservedParticipant>,
    /// The tier's round time `L_k` in seconds; strictly positive.
    pub round_time_s: f64,
    /// Security level the tier's plan actually provides, in bits.
    pub plan_security_bits: u32,
}

/// Reward-shaping coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RewardConfig {
    /// Penalty per participant whose requirement exceeds the plan's level.
    pub alpha: f64,
}

/// One tier's contribution to the round reward: utility gain per second of
/// round time, averaged over the tier's participants, minus `alpha` for each
/// participant whose security requirement went unmet.
pub fn tier_reward(obs: &TierRoundObservation, cfg: &RewardConfig) -> f64 {
    debug_assert!(obs.round_time_s > 0.0 && !obs.participants.is_empty());
    let n = obs.participants.len() as f64;
    let mut reward = 0.0;
    for p in &obs.participants {
        reward += p.delta_util / (n * obs.round_time_s);
        if obs.plan_security_bits < p.security_req {
            reward -= cfg.alpha;
        }
    }
    reward
}

/// The full round reward: the sum of every tier's [`tier_reward`].
pub fn compute_reward(
    observations: &[TierRoundObservation],
    cfg: &RewardConfig,
) -> Result<f64, AgentError> {
    if observations.is_empty() {
        return Err(AgentError::EmptyObservations);
    }
    Ok(observations.iter().map(|o| tier_reward(o, cfg)).sum())
}

/// Applies the one-step Q-learning update to entry `(s, a)` and returns the
/// new value. No other entry changes.
pub fn update_q(q: &mut QTable, s: StateId, a: usize, reward: f64, s_next: StateId) -> f64 {
    let old = q.q(s, a);
    let target = reward + q.mu * q.max_q(s_next);
    let new = old + q.gamma * (target - old);
    let idx = q.state_index(s) * q.grid().len() + a;
    q.values[idx] = new;
    new
}

/// One tier's choice for the round, kept for the post-round update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub tier: usize,
    pub state: StateId,
    pub action: usize,
    pub plan: ParameterPlan,
}

/// Discretizes every tier and ε-greedily picks its plan: one entry per tier,
/// `None` for empty tiers. Tiers are visited in index order, so the
/// generator's draw sequence is reproducible.
pub fn param_selection(
    tiering: &Tiering,
    pop: &Population,
    ctx: &KeyContext,
    latency_edges: &[f64],
    q: &QTable,
    rng: &mut impl Rng,
) -> Vec<Option<Selection>> {
    tiering
        .tiers
        .iter()
        .enumerate()
        .map(|(tier, members)| {
            discretize_state(members, pop, ctx, latency_edges).map(|state| {
                let action = select_action(q, state, rng);
                Selection {
                    tier,
                    state,
                    action,
                    plan: q.plan(action),
                }
            })
        })
        .collect()
}
