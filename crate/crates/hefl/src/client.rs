//! Client profiles, trace ingestion, and per-client round-latency estimates.
//!
//! A federated population is a fixed set of [`ClientProfile`]s built from a
//! capacity trace (compute speed, bandwidth, local training time), augmented
//! with a randomly assigned per-client security requirement and a data-size
//! share drawn from a Dirichlet partition. Each augmentation is a pure
//! function of `(inputs, seed)`.

use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;
use thiserror::Error;

use crate::plan::{ciphertext_bytes, he_latency, CostModel, ParameterPlan};
use crate::rng::{stream_rng, StreamKind};

/// Index of a client within its population.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, serde::Deserialize,
)]
#[serde(transparent)]
pub struct ClientId(pub u32);

impl ClientId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ClientId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One device in the federation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClientProfile {
    pub id: ClientId,
    /// Relative compute multiplier; 1.0 is the reference device.
    pub compute_speed: f64,
    /// Uplink bandwidth in bytes per second (the trace header calls this
    /// `bandwidth_bps`; ciphertext sizes are divided by it directly).
    pub bandwidth: f64,
    /// Seconds per local epoch on the reference device.
    pub base_train_time: f64,
    /// Local sample count `|D_i|`; FedAvg weight.
    pub data_size: u64,
    /// Required classical security level in bits: 128, 192, or 256.
    pub security_req: u32,
}

impl ClientProfile {
    fn validate(&self) -> Result<(), ClientError> {
        let fail = |what: &str| {
            Err(ClientError::InvalidProfile {
                id: self.id,
                reason: what.to_string(),
            })
        };
        if !(self.compute_speed > 0.0 && self.compute_speed.is_finite()) {
            return fail("compute_speed must be finite and > 0");
        }
        if !(self.bandwidth > 0.0) {
            return fail("bandwidth must be > 0");
        }
        if !(self.base_train_time > 0.0 && self.base_train_time.is_finite()) {
            return fail("base_train_time must be finite and > 0");
        }
        if self.data_size == 0 {
            return fail("data_size must be >= 1");
        }
        if !crate::plan::SECURITY_LEVELS.contains(&self.security_req) {
            return fail("security_req must be one of 128/192/256");
        }
        Ok(())
    }
}

/// The full client set of one experiment, with the seed that produced any
/// synthetic assignment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Population {
    pub seed: u64,
    clients: Vec<ClientProfile>,
}

impl Population {
    /// Validates ids (dense, unique, in order), non-emptiness, and every
    /// profile's invariants.
    pub fn new(clients: Vec<ClientProfile>, seed: u64) -> Result<Self, ClientError> {
        if clients.is_empty() {
            return Err(ClientError::EmptyPopulation);
        }
        for (i, c) in clients.iter().enumerate() {
            if c.id.index() != i {
                return Err(ClientError::NonDenseIds { at: i, found: c.id });
            }
            c.validate()?;
        }
        Ok(Self { seed, clients })
    }

    pub fn len(&self) -> usize {
        self.clients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clients.is_empty()
    }

    pub fn clients(&self) -> &[ClientProfile] {
        &self.clients
    }

    pub fn get(&self, id: ClientId) -> &ClientProfile {
        &self.clients[id.index()]
    }
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("failed to read trace {path}: {source}")]
    TraceIo {
        path: String,
        source: std::io::Error,
    },
    #[error(
        "trace header must be exactly `compute_speed,bandwidth_bps,base_train_time_s`, got `{0}`"
    )]
    TraceHeader(String),
    #[error("trace line {line}: {reason}")]
    TraceRow { line: usize, reason: String },
    #[error("trace contains no data rows")]
    TraceEmpty,
    #[error("requested population size must be >= 1")]
    ZeroClients,
    #[error("population must be non-empty")]
    EmptyPopulation,
    #[error("client ids must be dense and in order (index {at} holds id {found})")]
    NonDenseIds { at: usize, found: ClientId },
    #[error("client {id}: {reason}")]
    InvalidProfile { id: ClientId, reason: String },
    #[error("security weights must be non-negative with a positive sum")]
    BadSecurityWeights,
    #[error("dirichlet alpha must be finite and > 0")]
    BadDirichletAlpha,
}

pub const TRACE_HEADER: &str = "compute_speed,bandwidth_bps,base_train_time_s";

/// Builds a population of exactly `n_clients` from a capacity-trace CSV.
///
/// With at least `n_clients` rows the first `n_clients` are used one-to-one;
/// with fewer, rows are sampled with replacement under `seed`. Security
/// requirements and data sizes start at their placeholder values (128 bits,
/// one sample) until [`assign_security`] / [`assign_data_sizes`] run.
pub fn load_traces(path: &Path, n_clients: usize, seed: u64) -> Result<Population, ClientError> {
    let text = std::fs::read_to_string(path).map_err(|source| ClientError::TraceIo {
        path: path.display().to_string(),
        source,
    })?;
    parse_traces(&text, n_clients, seed)
}

/// [`load_traces`] over in-memory CSV text.
pub fn parse_traces(text: &str, n_clients: usize, seed: u64) -> Result<Population, ClientError> {
    if n_clients == 0 {
        return Err(ClientError::ZeroClients);
    }
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) => break l,
            None => return Err(ClientError::TraceHeader(String::new())),
        }
    };
    if header.trim() != TRACE_HEADER {
        return Err(ClientError::TraceHeader(header.trim().to_string()));
    }
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(ClientError::TraceRow {
                line: lineno,
                reason: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let mut parsed = [0f64; 3];
        for (slot, field) in parsed.iter_mut().zip(&fields) {
            *slot = field
                .trim()
                .parse::<f64>()
                .map_err(|e| ClientError::TraceRow {
                    line: lineno,
                    reason: format!("`{}`: {e}", field.trim()),
                })?;
        }
        rows.push((parsed[0], parsed[1], parsed[2]));
    }
    if rows.is_empty() {
        return Err(ClientError::TraceEmpty);
    }

    let mut rng = stream_rng(seed, StreamKind::TraceRows, 0);
    let clients = (0..n_clients)
        .map(|i| {
            let (compute_speed, bandwidth, base_train_time) = if i < rows.len() {
                rows[i]
            } else {
                rows[rng.random_range(0..rows.len())]
            };
            ClientProfile {
                id: ClientId(i as u32),
                compute_speed,
                bandwidth,
                base_train_time,
                data_size: 1,
                security_req: 128,
            }
        })
        .collect();
    Population::new(clients, seed)
}

/// Draws each client's security requirement from the normalized `weights`
/// over (128, 192, 256)-bit levels. Deterministic under `(pop.seed,…,seed)`;
/// clients are visited in id order, one draw each.
pub fn assign_security(pop: &mut Population, weights: [f64; 3]) -> Result<(), ClientError> {
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) || !(total > 0.0) {
        return Err(ClientError::BadSecurityWeights);
    }
    let mut rng = stream_rng(pop.seed, StreamKind::SecurityReqs, 0);
    for client in &mut pop.clients {
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut level = crate::plan::SECURITY_LEVELS[2];
        for (&w, &l) in weights.iter().zip(crate::plan::SECURITY_LEVELS.iter()) {
            acc += w;
            if u < acc {
                level = l;
                break;
            }
        }
        client.security_req = level;
    }
    Ok(())
}

/// Splits `total_samples` across clients by a symmetric Dirichlet(`alpha`)
/// draw (realized as normalized Gamma(`alpha`, 1) samples), rounding each
/// share and clamping it to at least one sample.
pub fn assign_data_sizes(
    pop: &mut Population,
    alpha: f64,
    total_samples: u64,
) -> Result<(), ClientError> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(ClientError::BadDirichletAlpha);
    }
    let gamma = Gamma::new(alpha, 1.0).map_err(|_| ClientError::BadDirichletAlpha)?;
    let mut rng = stream_rng(pop.seed, StreamKind::DataSizes, 0);
    let draws: Vec<f64> = (0..pop.clients.len())
        .map(|_| gamma.sample(&mut rng))
        .collect();
    let sum: f64 = draws.iter().sum();
    let n = pop.clients.len() as f64;
    for (client, &g) in pop.clients.iter_mut().zip(&draws) {
        let share = if sum > 0.0 { g / sum } else { 1.0 / n };
        client.data_size = ((share * total_samples as f64).round() as u64).max(1);
    }
    Ok(())
}

/// The three addends of one client's round latency, reportable separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatencyBreakdown {
    /// Local training: `base_train_time / compute_speed`.
    pub train_s: f64,
    /// Encrypted-domain work.
    pub he_s: f64,
    /// Ciphertext upload: `bytes / bandwidth`.
    pub comm_s: f64,
}

impl LatencyBreakdown {
    pub fn total(&self) -> f64 {
        self.train_s + self.he_s + self.comm_s
    }
}

/// Train / HE / communication components of `client`'s latency for one round
/// under `plan`.
pub fn latency_breakdown(
    client: &ClientProfile,
    plan: ParameterPlan,
    model: &CostModel,
    n_params: u64,
) -> LatencyBreakdown {
    LatencyBreakdown {
        train_s: client.base_train_time / client.compute_speed,
        he_s: he_latency(plan, model, client.compute_speed, n_params),
        comm_s: ciphertext_bytes(plan, n_params) as f64 / client.bandwidth,
    }
}

/// Seconds `client` needs for one round under `plan`: training plus
/// encryption plus upload. Strictly increasing in `q_bits` and `log_n`.
pub fn estimate_round_latency(
    client: &ClientProfile,
    plan: ParameterPlan,
    model: &CostModel,
    n_params: u64,
) -> f64 {
    latency_breakdown(client, plan, model, n_params).total()
}
