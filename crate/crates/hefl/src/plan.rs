//! Homomorphic-encryption parameter plans and their cost models.
//!
//! A [`ParameterPlan`] names a CKKS-style configuration by its ring-dimension
//! exponent `log_n` (the polynomial degree is `2^log_n`) and the total
//! coefficient-modulus bit-length `q_bits`. Plans trade off three quantities:
//!
//! * **security** — larger rings tolerate larger moduli at a given attack
//!   cost; the [`SecurityTable`] maps `(log_n, security_bits)` to the maximum
//!   admissible `q_bits`,
//! * **latency and ciphertext size** — both grow with ring dimension and
//!   modulus length ([`he_latency`], [`ciphertext_bytes`]),
//! * **precision** — small moduli leave few scale bits and cap the utility a
//!   trained model can reach ([`precision_penalty`]).
//!
//! Everything here is a pure function of its inputs; no ciphertext math is
//! performed.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One homomorphic-encryption parameter choice.
///
/// Ordering is lexicographic `(log_n, q_bits)`, which the agent uses as a
/// deterministic tie-break: among equal-valued actions the cheapest plan (in
/// ring dimension first, modulus second) wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParameterPlan {
    /// Ring-dimension exponent; the polynomial degree is `2^log_n`.
    pub log_n: u32,
    /// Total coefficient-modulus bit-length.
    pub q_bits: u32,
}

impl ParameterPlan {
    pub fn new(log_n: u32, q_bits: u32) -> Self {
        Self { log_n, q_bits }
    }

    /// Number of plaintext slots one ciphertext packs (`2^(log_n - 1)`).
    pub fn slots(&self) -> u64 {
        1u64 << (self.log_n - 1)
    }

    /// Compact `log_n:q_bits` form used in CSV cells.
    pub fn token(&self) -> String {
        format!("{}:{}", self.log_n, self.q_bits)
    }
}

impl fmt::Display for ParameterPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.log_n, self.q_bits)
    }
}

/// Classical security levels the table speaks about, in bits.
pub const SECURITY_LEVELS: [u32; 3] = [128, 192, 256];

/// One row of the security table: at ring dimension `2^log_n`, a ciphertext
/// modulus of up to `max_q_bits` bits still provides `security_bits` of
/// classical security.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecurityRow {
    pub log_n: u32,
    pub security_bits: u32,
    pub max_q_bits: u32,
}

/// Maximum modulus budgets per ring dimension and security level.
///
/// The table is data, not code: deployments can swap in their own estimates.
/// Construction checks the structural invariants — within one ring dimension
/// the budget strictly shrinks as the required level grows, and within one
/// level it strictly grows with the ring dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SecurityTable {
    rows: Vec<SecurityRow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SecurityTableFile {
    levels: Vec<SecurityRow>,
}

impl SecurityTable {
    /// Builds a table from rows, validating the invariants.
    pub fn new(mut rows: Vec<SecurityRow>) -> Result<Self, PlanError> {
        if rows.is_empty() {
            return Err(PlanError::EmptyTable);
        }
        rows.sort_by_key(|r| (r.log_n, r.security_bits));
        for row in &rows {
            if !SECURITY_LEVELS.contains(&row.security_bits) {
                return Err(PlanError::UnknownSecurityLevel {
                    security_bits: row.security_bits,
                });
            }
        }
        for pair in rows.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a.log_n == b.log_n && a.security_bits == b.security_bits {
                return Err(PlanError::DuplicateRow {
                    log_n: a.log_n,
                    security_bits: a.security_bits,
                });
            }
            // Same ring, higher level next: budget must strictly shrink.
            if a.log_n == b.log_n && b.max_q_bits >= a.max_q_bits {
                return Err(PlanError::NotDecreasingInLevel { log_n: a.log_n });
            }
        }
        let table = Self { rows };
        for &level in &SECURITY_LEVELS {
            let budgets: Vec<(u32, u32)> = table
                .rows
                .iter()
                .filter(|r| r.security_bits == level)
                .map(|r| (r.log_n, r.max_q_bits))
                .collect();
            for pair in budgets.windows(2) {
                if pair[1].1 <= pair[0].1 {
                    return Err(PlanError::NotIncreasingInLogN {
                        security_bits: level,
                    });
                }
            }
        }
        for log_n in table.log_ns() {
            if table.lookup(log_n, 128).is_none() {
                return Err(PlanError::MissingBaselineRow { log_n });
            }
        }
        Ok(table)
    }

    /// Parses the TOML table format (`[[levels]]` rows).
    pub fn from_toml_str(s: &str) -> Result<Self, PlanError> {
        let file: SecurityTableFile =
            toml::from_str(s).map_err(|e| PlanError::TableParse(e.to_string()))?;
        Self::new(file.levels)
    }

    /// The table shipped with the crate (standard classical-security bounds
    /// for ternary secrets, ring dimensions `2^12..2^16`).
    pub fn shipped() -> Self {
        Self::from_toml_str(include_str!("../data/he_security_levels.toml"))
            .expect("shipped security table is valid")
    }

    /// Distinct ring-dimension exponents the table covers, ascending.
    pub fn log_ns(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.rows.iter().map(|r| r.log_n).collect();
        v.dedup();
        v
    }

    /// Maximum modulus bits at `(log_n, security_bits)`, if covered.
    pub fn lookup(&self, log_n: u32, security_bits: u32) -> Option<u32> {
        self.rows
            .iter()
            .find(|r| r.log_n == log_n && r.security_bits == security_bits)
            .map(|r| r.max_q_bits)
    }

    pub fn rows(&self) -> &[SecurityRow] {
        &self.rows
    }
}

/// Calibration knobs for the latency and precision models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostModel {
    /// Seconds per `degree · log2(degree) · q_bit` unit of encrypted work.
    pub he_coeff: f64,
    /// Modulus bits consumed by noise/overhead before any scale bits remain.
    pub overhead_bits: u32,
    /// Multiplicative-depth divisor: usable scale bits are split across
    /// `depth + 1` levels.
    pub depth: u32,
    /// Scale of the utility-ceiling penalty at zero precision bits.
    pub precision_coeff: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        // he_coeff calibrated so a (13,100) single-ciphertext operation costs
        // about 10.6 ms on a unit-speed client.
        Self {
            he_coeff: 1e-9,
            overhead_bits: 80,
            depth: 1,
            precision_coeff: 10.0,
        }
    }
}

impl CostModel {
    /// Checks that the real-valued coefficients are strictly positive (the
    /// integer fields are non-negative by type).
    pub fn validate(&self) -> Result<(), PlanError> {
        if !(self.he_coeff > 0.0) || !(self.precision_coeff > 0.0) {
            return Err(PlanError::NonPositiveCoefficient);
        }
        Ok(())
    }
}

/// Outcome of checking one plan against the baseline security bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanVerdict {
    Valid,
    /// `q_bits` must be positive.
    NonPositiveQBits,
    /// `q_bits` exceeds the 128-bit budget for this ring dimension.
    ExceedsBound {
        max_q_bits: u32,
    },
}

impl PlanVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, PlanVerdict::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("security table has no rows")]
    EmptyTable,
    #[error("security table row has unknown security level {security_bits} (expected one of 128/192/256)")]
    UnknownSecurityLevel { security_bits: u32 },
    #[error("security table has duplicate row for log_n={log_n}, security_bits={security_bits}")]
    DuplicateRow { log_n: u32, security_bits: u32 },
    #[error("security table budgets must strictly decrease with the level at log_n={log_n}")]
    NotDecreasingInLevel { log_n: u32 },
    #[error(
        "security table budgets must strictly increase with log_n at {security_bits}-bit security"
    )]
    NotIncreasingInLogN { security_bits: u32 },
    #[error("security table covers log_n={log_n} but has no 128-bit row for it")]
    MissingBaselineRow { log_n: u32 },
    #[error("security table: {0}")]
    TableParse(String),
    #[error("security table does not cover log_n={log_n}")]
    UnknownLogN { log_n: u32 },
    #[error("cost-model coefficients must be strictly positive")]
    NonPositiveCoefficient,
}

/// Checks `plan` against the table's 128-bit budget for its ring dimension.
///
/// A ring dimension the table does not cover is a configuration error, not an
/// invalid plan.
pub fn validate_plan(plan: ParameterPlan, table: &SecurityTable) -> Result<PlanVerdict, PlanError> {
    let max_q_bits = table
        .lookup(plan.log_n, 128)
        .ok_or(PlanError::UnknownLogN { log_n: plan.log_n })?;
    if plan.q_bits == 0 {
        return Ok(PlanVerdict::NonPositiveQBits);
    }
    if plan.q_bits > max_q_bits {
        return Ok(PlanVerdict::ExceedsBound { max_q_bits });
    }
    Ok(PlanVerdict::Valid)
}

/// The highest classical security level (in bits) the plan provides: the
/// largest level whose budget still admits `q_bits`, or 0 if even the 128-bit
/// budget is exceeded.
pub fn security_bits(plan: ParameterPlan, table: &SecurityTable) -> Result<u32, PlanError> {
    if table.lookup(plan.log_n, 128).is_none() {
        return Err(PlanError::UnknownLogN { log_n: plan.log_n });
    }
    let mut best = 0;
    for &level in &SECURITY_LEVELS {
        if let Some(max_q) = table.lookup(plan.log_n, level) {
            if plan.q_bits <= max_q {
                best = best.max(level);
            }
        }
    }
    Ok(best)
}

/// Ciphertexts needed to pack `n_params` values at `slots = 2^(log_n - 1)`
/// values per ciphertext.
pub fn n_ciphertexts(plan: ParameterPlan, n_params: u64) -> u64 {
    n_params.div_ceil(plan.slots())
}

/// Seconds of encrypted-domain work for one round of `n_params` parameters on
/// a client with relative speed `client_speed` (1.0 = reference device).
///
/// Cost per ciphertext is NTT-like: `degree · log2(degree) · q_bits`, scaled
/// by `he_coeff`. Strictly increasing in `q_bits`, strictly increasing in
/// `log_n`, exactly inverse-proportional in `client_speed`.
pub fn he_latency(plan: ParameterPlan, model: &CostModel, client_speed: f64, n_params: u64) -> f64 {
    debug_assert!(client_speed > 0.0);
    let per_ct =
        model.he_coeff * (1u64 << plan.log_n) as f64 * plan.log_n as f64 * plan.q_bits as f64;
    n_ciphertexts(plan, n_params) as f64 * per_ct / client_speed
}

/// Total upload size in bytes: each ciphertext holds two degree-`2^log_n`
/// polynomials with `q_bits`-bit coefficients.
pub fn ciphertext_bytes(plan: ParameterPlan, n_params: u64) -> u64 {
    let bits_per_ct = 2u128 * (1u128 << plan.log_n) * plan.q_bits as u128;
    (n_ciphertexts(plan, n_params) as u128 * bits_per_ct / 8) as u64
}

/// Fraction of achievable utility lost to limited ciphertext precision.
///
/// Modulus bits beyond `overhead_bits` are split across `depth + 1` levels;
/// what one level keeps are the precision bits, and the penalty decays
/// exponentially in them: `min(1, precision_coeff · 2^-precision_bits)`.
/// Non-increasing in `q_bits` and independent of `log_n`.
pub fn precision_penalty(plan: ParameterPlan, model: &CostModel) -> f64 {
    let usable = plan.q_bits as f64 - model.overhead_bits as f64;
    let precision_bits = (usable / (model.depth as f64 + 1.0)).max(0.0);
    (model.precision_coeff * (-precision_bits).exp2()).min(1.0)
}

/// Cross product of the axes, restricted to plans the table admits, sorted
/// lexicographically. A ring dimension the table does not cover is an error;
/// an over-budget `q_bits` combination is silently dropped.
pub fn valid_grid(
    log_ns: &[u32],
    q_bits: &[u32],
    table: &SecurityTable,
) -> Result<Vec<ParameterPlan>, PlanError> {
    let mut grid = Vec::new();
    for &log_n in log_ns {
        for &q in q_bits {
            let plan = ParameterPlan::new(log_n, q);
            if validate_plan(plan, table)?.is_valid() {
                grid.push(plan);
            }
        }
    }
    grid.sort();
    grid.dedup();
    Ok(grid)
}
