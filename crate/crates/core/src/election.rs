//! Cluster-head election rules.
//!
//! Every protocol reduces to a per-node probability threshold for the current
//! round; [`elect`] turns a threshold into a Bernoulli decision. The rules
//! differ only in what they feed into that threshold:
//!
//! * LEACH rotates the role through an epoch of `ceil(1/p)` rounds: a node that
//!   already served in the current epoch sits out, and the threshold for the
//!   remaining eligible nodes rises so that on average `p * N` heads are chosen.
//! * LEACH-E weights `p_opt` by the node's residual energy relative to the
//!   network mean. It needs the network-wide residual total.
//! * SEP splits `p_opt` into a normal and an advanced probability for two-level
//!   networks, each class with its own rotation epoch.
//! * SEP-M weights `p_opt` by the node's initial energy relative to the mean
//!   initial energy, again with per-node rotation.
//! * BECC uses the polarized energy factor computed by the node's previous
//!   cluster head: `T = p_opt * q_pol`, no rotation set.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::world::SimRng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElectionError {
    #[error("cluster has no members")]
    EmptyCluster,
    #[error("cluster member energy must be finite and non-negative, got {0}")]
    BadMemberEnergy(f64),
    #[error("cluster total energy is zero")]
    ZeroClusterEnergy,
    #[error("{0} needs the network-wide residual energy view")]
    MissingGlobalView(Protocol),
    #[error("{0} needs the network-wide initial energy view")]
    MissingInitialView(Protocol),
    #[error("SEP only applies to two-level networks")]
    NotTwoLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Leach,
    LeachE,
    Sep,
    SepM,
    Becc,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::Leach,
        Protocol::LeachE,
        Protocol::Sep,
        Protocol::SepM,
        Protocol::Becc,
    ];

    /// Protocols compared on two-level networks.
    pub const TWO_LEVEL: [Protocol; 4] = [
        Protocol::Leach,
        Protocol::LeachE,
        Protocol::Sep,
        Protocol::Becc,
    ];

    /// Protocols compared on multi-level networks.
    pub const MULTI_LEVEL: [Protocol; 4] = [
        Protocol::Leach,
        Protocol::LeachE,
        Protocol::SepM,
        Protocol::Becc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Leach => "LEACH",
            Protocol::LeachE => "LEACH-E",
            Protocol::Sep => "SEP",
            Protocol::SepM => "SEP-M",
            Protocol::Becc => "BECC",
        }
    }

    pub(crate) fn needs_global_view(self) -> bool {
        self == Protocol::LeachE
    }

    pub(crate) fn needs_initial_view(self) -> bool {
        self == Protocol::SepM
    }

    /// Self-election probability for the node described by `ctx`.
    pub fn threshold(self, ctx: &ElectionContext) -> Result<f64, ElectionError> {
        match self {
            Protocol::Leach => Ok(leach_threshold(ctx)),
            Protocol::LeachE => leach_e_threshold(ctx),
            Protocol::Sep => sep_threshold(ctx),
            Protocol::SepM => sep_m_threshold(ctx),
            Protocol::Becc => Ok(becc_threshold(ctx.node.q_pol_carry, ctx.p_opt)),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "leach" => Ok(Protocol::Leach),
            "leach-e" => Ok(Protocol::LeachE),
            "sep" => Ok(Protocol::Sep),
            "sep-m" => Ok(Protocol::SepM),
            "becc" => Ok(Protocol::Becc),
            _ => Err(format!(
                "unknown protocol `{s}` (expected leach, leach-e, sep, sep-m or becc)"
            )),
        }
    }
}

/// What a node knows about itself when deciding whether to stand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeView {
    pub e_res: f64,
    pub e_init: f64,
    pub rounds_since_head: Option<u64>,
    pub q_pol_carry: f64,
    pub advanced: bool,
}

/// Network-wide residual energy knowledge. Only LEACH-E relies on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalView {
    pub total_residual: f64,
    pub alive_count: usize,
}

/// Initial-energy knowledge fixed at deployment, used by SEP-M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialView {
    pub total_initial: f64,
    pub alive_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    pub lambda: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectionContext {
    pub round: u64,
    pub p_opt: f64,
    pub node: NodeView,
    pub global: Option<GlobalView>,
    pub initial: Option<InitialView>,
    pub two_level: Option<TwoLevelParams>,
}

/// Rotation epoch length for probability `p`.
pub fn rotation_epoch(p: f64) -> u64 {
    if p >= 1.0 {
        1
    } else {
        (1.0 / p).ceil() as u64
    }
}

/// Membership in the rotation set: the node has not headed a cluster since
/// the start of the current epoch.
pub fn in_rotation_set(rounds_since_head: Option<u64>, round: u64, epoch: u64) -> bool {
    match rounds_since_head {
        None => true,
        Some(since) => since > round % epoch,
    }
}

/// Rotating threshold `p / (1 - p * (r mod epoch))` for nodes in the rotation
/// set, zero otherwise.
pub fn rotation_threshold(p: f64, round: u64, rounds_since_head: Option<u64>) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    let epoch = rotation_epoch(p);
    if !in_rotation_set(rounds_since_head, round, epoch) {
        return 0.0;
    }
    let phase = (round % epoch) as f64;
    let denom = 1.0 - p * phase;
    if denom <= 0.0 {
        1.0
    } else {
        (p / denom).clamp(0.0, 1.0)
    }
}

pub fn leach_threshold(ctx: &ElectionContext) -> f64 {
    rotation_threshold(ctx.p_opt, ctx.round, ctx.node.rounds_since_head)
}

pub fn leach_e_threshold(ctx: &ElectionContext) -> Result<f64, ElectionError> {
    let g = ctx
        .global
        .ok_or(ElectionError::MissingGlobalView(Protocol::LeachE))?;
    if g.total_residual <= 0.0 {
        return Ok(0.0);
    }
    let t = ctx.p_opt * g.alive_count as f64 * ctx.node.e_res / g.total_residual;
    Ok(t.clamp(0.0, 1.0))
}

/// SEP's weighted probabilities `(p_normal, p_advanced)`.
pub fn sep_probabilities(p_opt: f64, lambda: f64, alpha: f64) -> (f64, f64) {
    let denom = 1.0 + lambda * alpha;
    (p_opt / denom, p_opt * (1.0 + alpha) / denom)
}

pub fn sep_threshold(ctx: &ElectionContext) -> Result<f64, ElectionError> {
    let tl = ctx.two_level.ok_or(ElectionError::NotTwoLevel)?;
    let (p_nrm, p_adv) = sep_probabilities(ctx.p_opt, tl.lambda, tl.alpha);
    let p = if ctx.node.advanced { p_adv } else { p_nrm };
    Ok(rotation_threshold(p, ctx.round, ctx.node.rounds_since_head))
}

/// SEP-M base probability: `p_opt` scaled by initial energy over the mean
/// initial energy of the alive population.
pub fn sep_m_probability(p_opt: f64, e_init: f64, view: &InitialView) -> f64 {
    if view.total_initial <= 0.0 {
        return 0.0;
    }
    (p_opt * view.alive_count as f64 * e_init / view.total_initial).clamp(0.0, 1.0)
}

pub fn sep_m_threshold(ctx: &ElectionContext) -> Result<f64, ElectionError> {
    let view = ctx
        .initial
        .ok_or(ElectionError::MissingInitialView(Protocol::SepM))?;
    let p = sep_m_probability(ctx.p_opt, ctx.node.e_init, &view);
    Ok(rotation_threshold(p, ctx.round, ctx.node.rounds_since_head))
}

fn check_cluster(energies: &[f64]) -> Result<f64, ElectionError> {
    if energies.is_empty() {
        return Err(ElectionError::EmptyCluster);
    }
    let mut total = 0.0;
    for &e in energies {
        if !(e >= 0.0 && e.is_finite()) {
            return Err(ElectionError::BadMemberEnergy(e));
        }
        total += e;
    }
    if total <= 0.0 {
        return Err(ElectionError::ZeroClusterEnergy);
    }
    Ok(total)
}

/// Relative energy factors of a cluster's members (head included): residual
/// energy divided by the cluster mean. They sum to the member count.
pub fn becc_relative_factors(energies: &[f64]) -> Result<Vec<f64>, ElectionError> {
    let total = check_cluster(energies)?;
    let n = energies.len() as f64;
    Ok(energies.iter().map(|e| e / total * n).collect())
}

/// Polarized energy factors: below-average members (relative factor < 1) get
/// zero, and their share is handed to the at-or-above-average members in
/// proportion to their relative factors. The cluster sum is preserved.
pub fn becc_polarized_factors(energies: &[f64]) -> Result<Vec<f64>, ElectionError> {
    let q_rel = becc_relative_factors(energies)?;
    let (mut above, mut below) = (0.0, 0.0);
    for &q in &q_rel {
        if q >= 1.0 {
            above += q;
        } else {
            below += q;
        }
    }
    // The largest factor is never below the mean, so `above >= 1`.
    let boost = 1.0 + below / above;
    Ok(q_rel
        .into_iter()
        .map(|q| if q >= 1.0 { q * boost } else { 0.0 })
        .collect())
}

pub fn becc_threshold(q_pol: f64, p_opt: f64) -> f64 {
    (p_opt * q_pol).clamp(0.0, 1.0)
}

/// One Bernoulli draw. Always consumes exactly one value from `rng`.
pub fn elect(threshold: f64, rng: &mut SimRng) -> bool {
    rng.random::<f64>() < threshold
}
