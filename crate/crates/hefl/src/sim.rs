//! The round engine: samples participants, simulates local training under
//! each plan's precision ceiling, measures straggler-bound tier round times,
//! aggregates with FedAvg, and drives the agent's observe/update loop.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::agent::{
    discretize_state, latency_bucket_edges, param_selection, tier_reward, update_q,
    ObservedParticipant, QInit, QTable, RewardConfig, Selection, StateId, TierRoundObservation,
};
use crate::client::{
    assign_data_sizes, assign_security, estimate_round_latency, load_traces, ClientError, ClientId,
    ClientProfile, Population,
};
use crate::plan::{precision_penalty, security_bits, CostModel, ParameterPlan};
use crate::rng::{stream_rng, StreamKind};
use crate::scenario::{QInitSpec, Scenario, Strategy, StrategyPlans, TieringMethod, TrainerSpec};
use crate::tiering::{
    hierarchical_tiering, random_tiering, roundtime_tiering, utility_tiering, Criterion,
    KeyContext, Tiering, TieringError,
};

/// The server-side model state the proxy trainer evolves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalModel {
    /// Accuracy proxy in `[0, 1]`.
    pub accuracy: f64,
    /// Parameter vector hook; stays `None` under the proxy trainer, which
    /// never materializes weights.
    pub params: Option<Vec<f64>>,
    /// Completed rounds.
    pub round: u64,
}

/// Saturating convergence proxy: each round closes a fixed fraction of the
/// gap between the current accuracy and the plan-limited ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrainerModel {
    /// Asymptotic accuracy ceiling absent any precision penalty, in `(0, 1]`.
    pub a_max: f64,
    /// Fraction of the remaining gap closed per round; positive.
    pub rate: f64,
    /// Standard deviation of the gain noise shared by a round's cohort.
    pub noise_sd: f64,
    /// Standard deviation of the per-client gain spread.
    pub heterogeneity_sd: f64,
}

impl From<TrainerSpec> for TrainerModel {
    fn from(s: TrainerSpec) -> Self {
        Self {
            a_max: s.a_max,
            rate: s.rate,
            noise_sd: s.noise_sd,
            heterogeneity_sd: s.heterogeneity_sd,
        }
    }
}

/// One tier's slice of a [`RoundReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TierReport {
    pub tier: usize,
    /// Plan assigned this round; `None` for empty tiers.
    pub plan: Option<ParameterPlan>,
    /// Members sampled into this round.
    pub participants: usize,
    /// Straggler-bound tier round time `L_k`; `None` when no member
    /// participated (such a tier contributes no observation).
    pub round_time_s: Option<f64>,
    /// Participants whose security requirement exceeded the plan's level.
    pub security_loss: usize,
    /// Mean accuracy-proxy gain over the tier's participants.
    pub mean_delta_util: Option<f64>,
    /// The agent's reward for this tier; `None` under static strategies and
    /// for tiers without participants.
    pub reward: Option<f64>,
}

/// What one synchronous round produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundReport {
    /// 1-based round index.
    pub round: u64,
    /// Cumulative simulated seconds once this round's stragglers finish.
    pub sim_time_s: f64,
    /// Global accuracy proxy after aggregation.
    pub global_accuracy: f64,
    pub tiers: Vec<TierReport>,
}

/// A finished strategy × seed run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub strategy: Strategy,
    pub seed: u64,
    pub reports: Vec<RoundReport>,
    /// Accuracy after the last round (the starting accuracy if no round ran).
    pub final_accuracy: f64,
    /// First simulated time at which accuracy reached the convergence
    /// target: the configured early-stop target when one is set, otherwise
    /// 95% of this run's own final accuracy.
    pub convergence_time_s: Option<f64>,
    /// 1-based round at which the convergence target was first met.
    pub convergence_round: Option<u64>,
    /// Sum of per-round security-loss counts over the whole run.
    pub total_security_loss: u64,
    /// How often each plan was assigned, per tier.
    pub plan_histograms: Vec<BTreeMap<ParameterPlan, u64>>,
    /// The learned table (`rl` strategy only).
    pub qtable: Option<QTable>,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Tiering(#[from] TieringError),
    #[error(transparent)]
    Agent(#[from] crate::agent::AgentError),
    #[error(transparent)]
    Plan(#[from] crate::plan::PlanError),
    #[error("aggregation needs at least one update")]
    EmptyAggregation,
    #[error("aggregation weights must not all be zero")]
    ZeroWeight,
    #[error("vector updates must share one length (found {0} and {1})")]
    MismatchedLengths(usize, usize),
}

/// Data-size-weighted mean of scalar updates.
pub fn fedavg(updates: &[(f64, u64)]) -> Result<f64, SimError> {
    if updates.is_empty() {
        return Err(SimError::EmptyAggregation);
    }
    let total: f64 = updates.iter().map(|&(_, w)| w as f64).sum();
    if total <= 0.0 {
        return Err(SimError::ZeroWeight);
    }
    Ok(updates.iter().map(|&(v, w)| v * w as f64).sum::<f64>() / total)
}

/// Data-size-weighted mean of vector updates, element-wise.
pub fn fedavg_vectors(updates: &[(Vec<f64>, u64)]) -> Result<Vec<f64>, SimError> {
    if updates.is_empty() {
        return Err(SimError::EmptyAggregation);
    }
    let dim = updates[0].0.len();
    for (v, _) in updates {
        if v.len() != dim {
            return Err(SimError::MismatchedLengths(dim, v.len()));
        }
    }
    let total: f64 = updates.iter().map(|&(_, w)| w as f64).sum();
    if total <= 0.0 {
        return Err(SimError::ZeroWeight);
    }
    let mut out = vec![0.0; dim];
    for (v, w) in updates {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x * *w as f64;
        }
    }
    for o in &mut out {
        *o /= total;
    }
    Ok(out)
}

/// Draws `round(rate · |pop|)` distinct participants (at least one), uniform
/// without replacement, deterministic per `(seed, round)`. Sorted by id.
pub fn sample_participants(pop: &Population, rate: f64, round: u64, seed: u64) -> Vec<ClientId> {
    let n = pop.len();
    let count = ((rate * n as f64).round() as usize).clamp(1, n);
    let mut rng = stream_rng(seed, StreamKind::Participants, round);
    let mut ids: Vec<ClientId> = rand::seq::index::sample(&mut rng, n, count)
        .into_iter()
        .map(|i| ClientId(i as u32))
        .collect();
    ids.sort_unstable();
    ids
}

/// The accuracy ceiling `plan` leaves the trainer:
/// `a_max · (1 − precision_penalty)`.
pub fn effective_ceiling(tm: &TrainerModel, plan: ParameterPlan, cost: &CostModel) -> f64 {
    tm.a_max * (1.0 - precision_penalty(plan, cost))
}

/// Gain toward ceiling `c` plus `noise`, clamped so the projected accuracy
/// `acc + delta` stays in `[0, c]`. When the ceiling has dropped below the
/// current accuracy the clamp forces the model back down to it.
fn training_delta(acc: f64, tm: &TrainerModel, c: f64, noise: f64) -> f64 {
    let gain = tm.rate * (c - acc).max(0.0);
    (gain + noise).clamp(-acc, c - acc)
}

/// One client's accuracy-proxy gain for a round: expected gain toward the
/// plan-limited ceiling, plus a round-noise draw and a client-noise draw
/// (in that order), clamped to keep the projected accuracy in `[0, c]`.
pub fn simulate_local_training(
    _client: &ClientProfile,
    g: &GlobalModel,
    tm: &TrainerModel,
    plan: ParameterPlan,
    cost: &CostModel,
    rng: &mut impl Rng,
) -> f64 {
    let c = effective_ceiling(tm, plan, cost);
    let round_z: f64 = rng.sample(StandardNormal);
    let client_z: f64 = rng.sample(StandardNormal);
    let noise = round_z * tm.noise_sd + client_z * tm.heterogeneity_sd;
    training_delta(g.accuracy, tm, c, noise)
}

/// Straggler-bound round time of a tier: the slowest participating member's
/// full latency under `plan`.
pub fn tier_round_time(
    pop: &Population,
    participants: &[ClientId],
    plan: ParameterPlan,
    cost: &CostModel,
    n_params: u64,
) -> f64 {
    debug_assert!(!participants.is_empty());
    participants
        .iter()
        .map(|&id| estimate_round_latency(pop.get(id), plan, cost, n_params))
        .fold(0.0, f64::max)
}

/// Builds the configured tiering over `pop`.
fn tier(sc: &Scenario, pop: &Population, seed: u64, ctx: &KeyContext) -> Result<Tiering, SimError> {
    let t = match sc.tiering.method {
        TieringMethod::Hierarchical => {
            hierarchical_tiering(pop, &sc.tiering.criteria, sc.tiering.k, ctx)?
        }
        TieringMethod::Roundtime => roundtime_tiering(pop, sc.tiering.k, ctx)?,
        TieringMethod::Utility => utility_tiering(pop, sc.tiering.k, ctx)?,
        TieringMethod::Random => random_tiering(pop, sc.tiering.k, seed, ctx)?,
    };
    Ok(t)
}

/// Client index → tier index.
fn tier_index(t: &Tiering, n: usize) -> Vec<usize> {
    let mut map = vec![0usize; n];
    for (tier, members) in t.tiers.iter().enumerate() {
        for &id in members {
            map[id.index()] = tier;
        }
    }
    map
}

/// The static split: tiers whose members' mean reference latency is at or
/// above the population's (upper) median count as slow and get the low plan;
/// the rest get the high one.
fn adaptive_plans(
    t: &Tiering,
    ref_latencies: &[f64],
    plans: &StrategyPlans,
) -> Vec<Option<ParameterPlan>> {
    let mut sorted = ref_latencies.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    t.tiers
        .iter()
        .map(|members| {
            if members.is_empty() {
                return None;
            }
            let mean = members
                .iter()
                .map(|id| ref_latencies[id.index()])
                .sum::<f64>()
                / members.len() as f64;
            Some(if mean >= median {
                plans.adaptive_low
            } else {
                plans.adaptive_high
            })
        })
        .collect()
}

/// Per-tier fixed plans for a non-learning strategy (`None` for empty tiers).
fn static_plans(
    strategy: Strategy,
    t: &Tiering,
    ref_latencies: &[f64],
    plans: &StrategyPlans,
) -> Vec<Option<ParameterPlan>> {
    let uniform = |p: ParameterPlan| {
        t.tiers
            .iter()
            .map(|m| if m.is_empty() { None } else { Some(p) })
            .collect()
    };
    match strategy {
        Strategy::Baseline => uniform(plans.baseline),
        Strategy::Heuristic => uniform(plans.heuristic),
        Strategy::Adaptive => adaptive_plans(t, ref_latencies, plans),
        Strategy::Rl => vec![None; t.k],
    }
}

/// One strategy × seed simulation in progress. [`Engine::run_round`] steps
/// it; [`run_experiment`] drives it to completion.
pub struct Engine<'a> {
    sc: &'a Scenario,
    strategy: Strategy,
    seed: u64,
    pop: Population,
    tiering: Tiering,
    tier_of: Vec<usize>,
    /// Latency key of every client under the reference plan; fixed, since
    /// profiles are.
    ref_latencies: Vec<f64>,
    /// State-space bucket edges, fixed at start so Q-values stay comparable
    /// across rounds.
    latency_edges: Vec<f64>,
    plans_static: Vec<Option<ParameterPlan>>,
    agent: Option<QTable>,
    reward_cfg: RewardConfig,
    trainer: TrainerModel,
    model: GlobalModel,
    clock: f64,
    tier_clocks: Vec<f64>,
    /// Per-client (sum, count) of observed round latencies.
    lat_obs: Vec<(f64, u64)>,
    /// Per-client (sum, count) of observed utility gains.
    util_obs: Vec<(f64, u64)>,
    /// Materialized history views handed to the tiering criteria once
    /// dynamic retiering has observations to work from.
    lat_view: Option<Vec<f64>>,
    util_view: Option<Vec<f64>>,
    total_security_loss: u64,
    plan_counts: Vec<BTreeMap<ParameterPlan, u64>>,
}

impl<'a> Engine<'a> {
    /// Loads the population, assigns synthetic attributes, tiers it, and
    /// prepares the strategy's plans (or its agent).
    pub fn new(sc: &'a Scenario, strategy: Strategy, seed: u64) -> Result<Self, SimError> {
        let mut pop = load_traces(&sc.population.trace, sc.population.n_clients, seed)?;
        assign_security(&mut pop, sc.population.security_weights)?;
        assign_data_sizes(
            &mut pop,
            sc.population.dirichlet_alpha,
            sc.population.total_samples,
        )?;
        let trainer = TrainerModel::from(sc.trainer);
        let ctx = KeyContext {
            cost: &sc.cost,
            n_params: sc.run.model_params,
            reference_plan: sc.reference_plan(),
            latency_history: None,
            utility_history: None,
        };
        let tiering = tier(sc, &pop, seed, &ctx)?;
        let tier_of = tier_index(&tiering, pop.len());
        let ref_latencies: Vec<f64> = pop
            .clients()
            .iter()
            .map(|c| Criterion::Latency.key(c, &ctx))
            .collect();
        let latency_edges = latency_bucket_edges(&ref_latencies, sc.latency_bands);
        let plans_static = static_plans(strategy, &tiering, &ref_latencies, &sc.strategy_plans);
        let agent = if strategy == Strategy::Rl {
            let init = match sc.rl.q_init {
                QInitSpec::Zero => QInit::Zero,
                QInitSpec::Uniform => QInit::Uniform {
                    max: sc.rl.q_init_max,
                },
            };
            Some(QTable::new(
                sc.grid.clone(),
                sc.latency_bands,
                sc.rl.gamma,
                sc.rl.mu,
                sc.rl.epsilon,
                init,
                seed,
            )?)
        } else {
            None
        };
        let n = pop.len();
        let k = tiering.k;
        Ok(Self {
            sc,
            strategy,
            seed,
            pop,
            tiering,
            tier_of,
            ref_latencies,
            latency_edges,
            plans_static,
            agent,
            reward_cfg: RewardConfig { alpha: sc.rl.alpha },
            trainer,
            model: GlobalModel {
                accuracy: sc.trainer.initial_accuracy,
                params: None,
                round: 0,
            },
            clock: 0.0,
            tier_clocks: vec![0.0; k],
            lat_obs: vec![(0.0, 0); n],
            util_obs: vec![(0.0, 0); n],
            lat_view: None,
            util_view: None,
            total_security_loss: 0,
            plan_counts: vec![BTreeMap::new(); k],
        })
    }

    pub fn population(&self) -> &Population {
        &self.pop
    }

    pub fn tiering(&self) -> &Tiering {
        &self.tiering
    }

    pub fn model(&self) -> &GlobalModel {
        &self.model
    }

    pub fn agent(&self) -> Option<&QTable> {
        self.agent.as_ref()
    }

    fn ctx(&self) -> KeyContext<'_> {
        KeyContext {
            cost: &self.sc.cost,
            n_params: self.sc.run.model_params,
            reference_plan: self.sc.reference_plan(),
            latency_history: self.lat_view.as_deref(),
            utility_history: self.util_view.as_deref(),
        }
    }

    /// Refreshes the history views and recomputes the tiering from them.
    fn retier(&mut self) -> Result<(), SimError> {
        self.lat_view = Some(
            self.lat_obs
                .iter()
                .enumerate()
                .map(|(i, &(sum, n))| {
                    if n > 0 {
                        sum / n as f64
                    } else {
                        self.ref_latencies[i]
                    }
                })
                .collect(),
        );
        self.util_view = Some(
            self.util_obs
                .iter()
                .map(|&(sum, n)| if n > 0 { sum / n as f64 } else { 0.0 })
                .collect(),
        );
        let tiering = tier(self.sc, &self.pop, self.seed, &self.ctx())?;
        self.tier_of = tier_index(&tiering, self.pop.len());
        self.plans_static = static_plans(
            self.strategy,
            &tiering,
            &self.ref_latencies,
            &self.sc.strategy_plans,
        );
        self.tiering = tiering;
        Ok(())
    }

    /// Runs the next round: sample participants, assign plans, simulate
    /// local training, measure per-tier round times and security losses,
    /// aggregate, advance the clock, and (for the agent) reward and update.
    pub fn run_round(&mut self) -> Result<RoundReport, SimError> {
        let r = self.model.round;
        let k = self.tiering.k;
        let n_params = self.sc.run.model_params;

        if self.sc.run.dynamic_retiering && r > 0 {
            self.retier()?;
        }

        let participants = sample_participants(&self.pop, self.sc.run.participation, r, self.seed);

        // Plan assignment: ε-greedy per tier for the agent, fixed otherwise.
        if let Some(q) = self.agent.as_mut() {
            let decay = self.sc.rl.epsilon_decay;
            q.epsilon = self.sc.rl.epsilon * decay.powi(r.min(i32::MAX as u64) as i32);
        }
        let (plans, selections): (Vec<Option<ParameterPlan>>, Vec<Option<Selection>>) =
            if let Some(q) = self.agent.as_ref() {
                let ctx = self.ctx();
                let mut rng = stream_rng(self.seed, StreamKind::Exploration, r);
                let selections = param_selection(
                    &self.tiering,
                    &self.pop,
                    &ctx,
                    &self.latency_edges,
                    q,
                    &mut rng,
                );
                (
                    selections.iter().map(|s| s.map(|sel| sel.plan)).collect(),
                    selections,
                )
            } else {
                (self.plans_static.clone(), vec![None; k])
            };

        // Local training: one shared round-noise draw, then one draw per
        // participant in id order.
        let mut rng = stream_rng(self.seed, StreamKind::Training, r);
        let round_z: f64 = rng.sample(StandardNormal);
        let round_noise = round_z * self.trainer.noise_sd;
        // (id, gain, projected accuracy) per participant.
        let mut deltas: Vec<(ClientId, f64, f64)> = Vec::with_capacity(participants.len());
        for &id in &participants {
            let tier = self.tier_of[id.index()];
            let plan = plans[tier].expect("a participant's tier is non-empty and planned");
            let c = effective_ceiling(&self.trainer, plan, &self.sc.cost);
            let z: f64 = rng.sample(StandardNormal);
            let noise = round_noise + z * self.trainer.heterogeneity_sd;
            let delta = training_delta(self.model.accuracy, &self.trainer, c, noise);
            deltas.push((id, delta, self.model.accuracy + delta));
        }

        // Per-tier observations.
        let mut by_tier: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &(id, _, _)) in deltas.iter().enumerate() {
            by_tier[self.tier_of[id.index()]].push(i);
        }
        let mut obs: Vec<Option<TierRoundObservation>> = vec![None; k];
        for tier in 0..k {
            if by_tier[tier].is_empty() {
                continue;
            }
            let plan = plans[tier].expect("participating tier has a plan");
            let members: Vec<ClientId> = by_tier[tier].iter().map(|&i| deltas[i].0).collect();
            obs[tier] = Some(TierRoundObservation {
                tier,
                participants: by_tier[tier]
                    .iter()
                    .map(|&i| {
                        let (id, delta, _) = deltas[i];
                        ObservedParticipant {
                            id,
                            delta_util: delta,
                            security_req: self.pop.get(id).security_req,
                        }
                    })
                    .collect(),
                round_time_s: tier_round_time(&self.pop, &members, plan, &self.sc.cost, n_params),
                plan_security_bits: security_bits(plan, &self.sc.table)?,
            });
        }

        // Aggregate projected accuracies, weighted by data size.
        let updates: Vec<(f64, u64)> = deltas
            .iter()
            .map(|&(id, _, projected)| (projected, self.pop.get(id).data_size))
            .collect();
        self.model.accuracy = fedavg(&updates)?;

        // Advance the clock: the server waits for the slowest tier unless
        // per-tier clocks are enabled.
        let round_max = obs
            .iter()
            .flatten()
            .map(|o| o.round_time_s)
            .fold(0.0, f64::max);
        if self.sc.run.asynchronous {
            for o in obs.iter().flatten() {
                self.tier_clocks[o.tier] += o.round_time_s;
            }
            self.clock = self.tier_clocks.iter().copied().fold(0.0, f64::max);
        } else {
            self.clock += round_max;
        }

        // Reward and update the agent per observed tier; the successor state
        // is the tier's state as the next selection will see it.
        let mut rewards: Vec<Option<f64>> = vec![None; k];
        let mut q_updates: Vec<(StateId, usize, f64, StateId)> = Vec::new();
        if self.agent.is_some() {
            let ctx = self.ctx();
            for tier in 0..k {
                let (Some(sel), Some(o)) = (selections[tier].as_ref(), obs[tier].as_ref()) else {
                    continue;
                };
                let reward = tier_reward(o, &self.reward_cfg);
                rewards[tier] = Some(reward);
                let s_next = discretize_state(
                    &self.tiering.tiers[tier],
                    &self.pop,
                    &ctx,
                    &self.latency_edges,
                )
                .expect("observed tier is non-empty");
                q_updates.push((sel.state, sel.action, reward, s_next));
            }
        }
        if let Some(q) = self.agent.as_mut() {
            for &(s, a, reward, s_next) in &q_updates {
                update_q(q, s, a, reward, s_next);
            }
        }

        // Bookkeeping: histories, loss tally, plan histograms.
        for o in obs.iter().flatten() {
            let plan = plans[o.tier].expect("observed tier has a plan");
            for p in &o.participants {
                let lat = estimate_round_latency(self.pop.get(p.id), plan, &self.sc.cost, n_params);
                let l = &mut self.lat_obs[p.id.index()];
                l.0 += lat;
                l.1 += 1;
                let u = &mut self.util_obs[p.id.index()];
                u.0 += p.delta_util;
                u.1 += 1;
            }
        }
        for (tier, plan) in plans.iter().enumerate() {
            if let Some(plan) = plan {
                *self.plan_counts[tier].entry(*plan).or_insert(0) += 1;
            }
        }

        self.model.round += 1;
        let tiers = (0..k)
            .map(|tier| {
                let (participants, round_time_s, security_loss, mean_delta_util) =
                    match obs[tier].as_ref() {
                        Some(o) => {
                            let losses = o
                                .participants
                                .iter()
                                .filter(|p| o.plan_security_bits < p.security_req)
                                .count();
                            let mean = o.participants.iter().map(|p| p.delta_util).sum::<f64>()
                                / o.participants.len() as f64;
                            (
                                o.participants.len(),
                                Some(o.round_time_s),
                                losses,
                                Some(mean),
                            )
                        }
                        None => (0, None, 0, None),
                    };
                self.total_security_loss += security_loss as u64;
                TierReport {
                    tier,
                    plan: plans[tier],
                    participants,
                    round_time_s,
                    security_loss,
                    mean_delta_util,
                    reward: rewards[tier],
                }
            })
            .collect();
        Ok(RoundReport {
            round: self.model.round,
            sim_time_s: self.clock,
            global_accuracy: self.model.accuracy,
            tiers,
        })
    }

    /// Wraps up into an [`ExperimentResult`] given the reports the caller
    /// collected.
    pub fn finish(self, reports: Vec<RoundReport>) -> ExperimentResult {
        let final_accuracy = reports
            .last()
            .map(|r| r.global_accuracy)
            .unwrap_or(self.sc.trainer.initial_accuracy);
        let target = self.sc.run.target_accuracy.unwrap_or(0.95 * final_accuracy);
        let converged = reports.iter().find(|r| r.global_accuracy >= target);
        ExperimentResult {
            strategy: self.strategy,
            seed: self.seed,
            final_accuracy,
            convergence_time_s: converged.map(|r| r.sim_time_s),
            convergence_round: converged.map(|r| r.round),
            total_security_loss: self.total_security_loss,
            plan_histograms: self.plan_counts,
            qtable: self.agent,
            reports,
        }
    }
}

/// Runs one strategy × seed cell: all configured rounds, or fewer when an
/// early-stop accuracy target is set and reached.
pub fn run_experiment(
    sc: &Scenario,
    strategy: Strategy,
    seed: u64,
) -> Result<ExperimentResult, SimError> {
    let mut engine = Engine::new(sc, strategy, seed)?;
    let mut reports = Vec::new();
    for _ in 0..sc.run.rounds {
        let report = engine.run_round()?;
        let accuracy = report.global_accuracy;
        reports.push(report);
        if let Some(target) = sc.run.target_accuracy {
            if accuracy >= target {
                break;
            }
        }
    }
    Ok(engine.finish(reports))
}
