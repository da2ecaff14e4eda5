//! A deterministic round-based simulator of federated learning under
//! homomorphic-encryption overhead.
//!
//! Heterogeneous clients are profiled ([`client`]), grouped into tiers
//! ([`tiering`]), and assigned an encryption parameter plan per round —
//! either a fixed policy or a tabular Q-learning agent ([`agent`]) choosing
//! per tier. The cost model ([`plan`]) couples each plan to latency,
//! ciphertext size, security level, and a precision ceiling; the engine
//! ([`sim`]) turns those into round times, security-loss counts, and an
//! accuracy trajectory; the harness ([`harness`]) compares strategies and
//! sweeps sensitivities, writing byte-reproducible reports.

// Validation code writes `!(x > 0.0)` rather than `x <= 0.0` on purpose:
// the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod client;
pub mod harness;
pub mod plan;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod tiering;

/// Mirrors `book/src`: every fenced Rust block in the guide compiles and
/// runs as a doc-test here, so the chapters cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/cost-model.md")]
    pub struct CostModel;
    #[doc = include_str!("../../../book/src/population.md")]
    pub struct Population;
    #[doc = include_str!("../../../book/src/tiering.md")]
    pub struct Tiering;
    #[doc = include_str!("../../../book/src/agent.md")]
    pub struct Agent;
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub struct Simulation;
    #[doc = include_str!("../../../book/src/harness.md")]
    pub struct Harness;
}
