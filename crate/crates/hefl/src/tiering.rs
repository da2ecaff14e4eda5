//! Partitioning the population into tiers.
//!
//! The primary scheme is hierarchical: criteria are applied in order, and at
//! each stage every current sub-tier is split into `m = K^(1/β)` groups —
//! fixed security bands for the security criterion, per-sub-tier quantiles
//! otherwise. Three flat baselines (past round time, random, utility) mirror
//! common clustered-FL approaches. All methods produce an exact partition:
//! disjoint tiers, full coverage, exactly `K` tiers (possibly empty when a
//! band is unpopulated).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::client::{estimate_round_latency, ClientId, ClientProfile, Population};
use crate::plan::{CostModel, ParameterPlan};
use crate::rng::{stream_rng, StreamKind};

/// One axis clients can be grouped by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Required security level in bits.
    Security,
    /// Round latency: observed history when present, otherwise the estimate
    /// under the reference plan.
    Latency,
    /// Mean recent utility gain (0 before any history exists).
    Utility,
}

/// Everything a [`Criterion`] needs to turn a profile into a scalar key.
#[derive(Debug, Clone, Copy)]
pub struct KeyContext<'a> {
    pub cost: &'a CostModel,
    pub n_params: u64,
    /// Mid-grid plan used for cold-start latency keys.
    pub reference_plan: ParameterPlan,
    /// Mean observed round latency per client id, once history exists.
    pub latency_history: Option<&'a [f64]>,
    /// Mean recent utility gain per client id, once history exists.
    pub utility_history: Option<&'a [f64]>,
}

impl Criterion {
    /// The scalar key this criterion assigns to `client`.
    pub fn key(self, client: &ClientProfile, ctx: &KeyContext) -> f64 {
        match self {
            Criterion::Security => client.security_req as f64,
            Criterion::Latency => ctx
                .latency_history
                .and_then(|h| h.get(client.id.index()))
                .copied()
                .unwrap_or_else(|| {
                    estimate_round_latency(client, ctx.reference_plan, ctx.cost, ctx.n_params)
                }),
            Criterion::Utility => ctx
                .utility_history
                .and_then(|h| h.get(client.id.index()))
                .copied()
                .unwrap_or(0.0),
        }
    }
}

/// A partition of the population into `K` tiers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tiering {
    pub k: usize,
    /// Criteria applied, outermost split first (empty for random tiering).
    pub criteria: Vec<Criterion>,
    /// Member ids per tier, each sorted ascending.
    pub tiers: Vec<Vec<ClientId>>,
    /// Per split stage: the key values at which consecutive sibling groups
    /// meet, concatenated across parents in tier order (audit data).
    pub boundaries: Vec<Vec<f64>>,
    /// Mean criterion-key vector per tier; `None` for empty tiers.
    pub centroids: Vec<Option<Vec<f64>>>,
    /// Population-wide (min, max) per criterion, used to normalize distances
    /// in [`assign_new_client`].
    pub key_ranges: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TieringError {
    #[error(
        "K={k} is not m^{beta} for an integer m >= 2; nearby valid values: {}",
        valid.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
    )]
    InvalidK {
        k: usize,
        beta: usize,
        valid: Vec<usize>,
    },
    #[error("random tiering needs K <= population size (K={k}, population {n})")]
    KTooLarge { k: usize, n: usize },
    #[error("hierarchical tiering needs at least one criterion")]
    NoCriteria,
    #[error("K must be >= 1")]
    ZeroK,
}

/// Splits `ids` into `m` groups by ascending `(key, id)`, sizes differing by
/// at most one with earlier groups taking the remainder. Returns the groups
/// and the boundary keys where consecutive groups meet.
fn quantile_split(
    ids: &[ClientId],
    m: usize,
    key_of: &dyn Fn(ClientId) -> f64,
) -> (Vec<Vec<ClientId>>, Vec<f64>) {
    let mut sorted = ids.to_vec();
    sorted.sort_by(|a, b| key_of(*a).total_cmp(&key_of(*b)).then(a.cmp(b)));
    let base = sorted.len() / m;
    let remainder = sorted.len() % m;
    let mut groups = Vec::with_capacity(m);
    let mut cuts = Vec::new();
    let mut offset = 0;
    for g in 0..m {
        let size = base + usize::from(g < remainder);
        if g > 0 && offset < sorted.len() {
            cuts.push(key_of(sorted[offset]));
        }
        groups.push(sorted[offset..offset + size].to_vec());
        offset += size;
    }
    (groups, cuts)
}

/// Fixed security bands: `m=2` gives [128,192) vs [192,256]; `m=3` gives one
/// band per level. Other `m` fall back to quantiles.
fn security_split(
    ids: &[ClientId],
    m: usize,
    key_of: &dyn Fn(ClientId) -> f64,
) -> (Vec<Vec<ClientId>>, Vec<f64>) {
    let band_edges: Vec<f64> = match m {
        2 => vec![192.0],
        3 => vec![192.0, 256.0],
        _ => return quantile_split(ids, m, key_of),
    };
    let mut groups = vec![Vec::new(); m];
    for &id in ids {
        let key = key_of(id);
        let band = band_edges.iter().filter(|&&e| key >= e).count();
        groups[band].push(id);
    }
    for g in &mut groups {
        g.sort();
    }
    (groups, band_edges)
}

/// Assembles a [`Tiering`], computing centroids and normalization ranges.
fn finish(
    pop: &Population,
    criteria: Vec<Criterion>,
    k: usize,
    tiers: Vec<Vec<ClientId>>,
    boundaries: Vec<Vec<f64>>,
    ctx: &KeyContext,
) -> Tiering {
    debug_assert_eq!(tiers.len(), k);
    let key_vec =
        |id: ClientId| -> Vec<f64> { criteria.iter().map(|c| c.key(pop.get(id), ctx)).collect() };
    let centroids = tiers
        .iter()
        .map(|tier| {
            if tier.is_empty() {
                return None;
            }
            let mut sum = vec![0.0; criteria.len()];
            for &id in tier {
                for (s, v) in sum.iter_mut().zip(key_vec(id)) {
                    *s += v;
                }
            }
            Some(sum.iter().map(|s| s / tier.len() as f64).collect())
        })
        .collect();
    let key_ranges = criteria
        .iter()
        .map(|c| {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for client in pop.clients() {
                let v = c.key(client, ctx);
                min = min.min(v);
                max = max.max(v);
            }
            (min, max)
        })
        .collect();
    Tiering {
        k,
        criteria,
        tiers: tiers
            .into_iter()
            .map(|mut t| {
                t.sort();
                t
            })
            .collect(),
        boundaries,
        centroids,
        key_ranges,
    }
}

fn all_ids(pop: &Population) -> Vec<ClientId> {
    pop.clients().iter().map(|c| c.id).collect()
}

/// Integer `beta`-th root of `k` if `k = m^beta` for `m >= 2`.
pub(crate) fn exact_root(k: usize, beta: usize) -> Option<usize> {
    let mut m = (k as f64).powf(1.0 / beta as f64).round() as usize;
    m = m.max(2);
    (m.saturating_sub(1)..=m + 1).find(|&cand| cand >= 2 && cand.pow(beta as u32) == k)
}

/// Splits the population by each criterion in turn: every sub-tier splits
/// into `m = K^(1/β)` groups per stage, ordered by the stage's key, so tier
/// indices enumerate the criterion grid in row-major order.
///
/// `K = 1` is the trivial single tier; otherwise `K` must be `m^β` for an
/// integer `m >= 2`.
pub fn hierarchical_tiering(
    pop: &Population,
    criteria: &[Criterion],
    k: usize,
    ctx: &KeyContext,
) -> Result<Tiering, TieringError> {
    if criteria.is_empty() {
        return Err(TieringError::NoCriteria);
    }
    if k == 0 {
        return Err(TieringError::ZeroK);
    }
    if k == 1 {
        return Ok(finish(
            pop,
            criteria.to_vec(),
            1,
            vec![all_ids(pop)],
            vec![],
            ctx,
        ));
    }
    let beta = criteria.len();
    let m = exact_root(k, beta).ok_or_else(|| TieringError::InvalidK {
        k,
        beta,
        valid: (2..=4).map(|m: usize| m.pow(beta as u32)).collect(),
    })?;

    let mut groups = vec![all_ids(pop)];
    let mut boundaries = Vec::with_capacity(beta);
    for criterion in criteria {
        let key_of = |id: ClientId| criterion.key(pop.get(id), ctx);
        let mut next = Vec::with_capacity(groups.len() * m);
        let mut stage_cuts = Vec::new();
        for group in &groups {
            let (split, cuts) = match criterion {
                Criterion::Security => security_split(group, m, &key_of),
                _ => quantile_split(group, m, &key_of),
            };
            stage_cuts.extend(cuts);
            next.extend(split);
        }
        groups = next;
        boundaries.push(stage_cuts);
    }
    Ok(finish(pop, criteria.to_vec(), k, groups, boundaries, ctx))
}

/// `K` quantile bands of mean past round time (cold start: the reference-plan
/// latency estimate), ascending.
pub fn roundtime_tiering(
    pop: &Population,
    k: usize,
    ctx: &KeyContext,
) -> Result<Tiering, TieringError> {
    if k == 0 {
        return Err(TieringError::ZeroK);
    }
    let criterion = Criterion::Latency;
    let key_of = |id: ClientId| criterion.key(pop.get(id), ctx);
    let (tiers, cuts) = quantile_split(&all_ids(pop), k, &key_of);
    Ok(finish(pop, vec![criterion], k, tiers, vec![cuts], ctx))
}

/// `K` quantile bands of mean recent utility gain, ascending.
pub fn utility_tiering(
    pop: &Population,
    k: usize,
    ctx: &KeyContext,
) -> Result<Tiering, TieringError> {
    if k == 0 {
        return Err(TieringError::ZeroK);
    }
    let criterion = Criterion::Utility;
    let key_of = |id: ClientId| criterion.key(pop.get(id), ctx);
    let (tiers, cuts) = quantile_split(&all_ids(pop), k, &key_of);
    Ok(finish(pop, vec![criterion], k, tiers, vec![cuts], ctx))
}

/// Uniform random partition into `K` near-equal tiers (sizes differ by at
/// most one, earlier tiers take the remainder). Deterministic under `seed`.
pub fn random_tiering(
    pop: &Population,
    k: usize,
    seed: u64,
    ctx: &KeyContext,
) -> Result<Tiering, TieringError> {
    if k == 0 {
        return Err(TieringError::ZeroK);
    }
    if k > pop.len() {
        return Err(TieringError::KTooLarge { k, n: pop.len() });
    }
    let mut ids = all_ids(pop);
    use rand::seq::SliceRandom;
    ids.shuffle(&mut stream_rng(seed, StreamKind::Tiering, 0));
    let base = ids.len() / k;
    let remainder = ids.len() % k;
    let mut tiers = Vec::with_capacity(k);
    let mut offset = 0;
    for g in 0..k {
        let size = base + usize::from(g < remainder);
        tiers.push(ids[offset..offset + size].to_vec());
        offset += size;
    }
    Ok(finish(pop, vec![], k, tiers, vec![], ctx))
}

/// The tier whose centroid is nearest to `client`'s key vector in
/// min-max-normalized Euclidean distance; ties break to the lowest index.
/// Empty tiers are never assigned. With no criteria (random tiering) every
/// distance is zero and tier 0 wins.
pub fn assign_new_client(t: &Tiering, client: &ClientProfile, ctx: &KeyContext) -> usize {
    let keys: Vec<f64> = t.criteria.iter().map(|c| c.key(client, ctx)).collect();
    let normalized = |dim: usize, v: f64| -> f64 {
        let (min, max) = t.key_ranges[dim];
        if max > min {
            (v - min) / (max - min)
        } else {
            0.0
        }
    };
    let mut best = (f64::INFINITY, 0usize);
    for (idx, centroid) in t.centroids.iter().enumerate() {
        let Some(centroid) = centroid else { continue };
        let d2: f64 = centroid
            .iter()
            .enumerate()
            .map(|(dim, &c)| {
                let d = normalized(dim, keys[dim]) - normalized(dim, c);
                d * d
            })
            .sum();
        if d2 < best.0 {
            best = (d2, idx);
        }
    }
    best.1
}
