//! Node population, field geometry and initial-energy assignment.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The single random stream behind every run: ChaCha with 8 rounds, seeded
/// from a 64-bit value through `SeedableRng::seed_from_u64`.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("node count must be positive")]
    NoNodes,
    #[error("field side must be positive and finite, got {0}")]
    BadSide(f64),
    #[error("sink ({x}, {y}) lies outside the {side} m field")]
    SinkOutside { x: f64, y: f64, side: f64 },
    #[error("two-level lambda must lie in (0, 1), got {0}")]
    BadLambda(f64),
    #[error("two-level alpha must be non-negative, got {0}")]
    BadAlpha(f64),
    #[error("initial energy must be positive, got {0}")]
    BadEnergy(f64),
    #[error("lambda * N = {lambda} * {n} rounds to {advanced} advanced nodes, leaving the network homogeneous")]
    DegenerateTwoLevel { lambda: f64, n: usize, advanced: usize },
    #[error("multi-level interval [{e_min}, {e_max}] is invalid")]
    BadInterval { e_min: f64, e_max: f64 },
    #[error("total energy target {target} J is outside [{lo}, {hi}] J for this interval")]
    TargetOutOfRange { target: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        distance(*self, *other)
    }
}

pub fn distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub pos: Position,
    pub e_init: f64,
    /// Residual energy, floored at zero.
    pub e_res: f64,
    pub alive: bool,
    /// Round in which the node last served as cluster head.
    pub last_head_round: Option<u64>,
    /// Polarized energy factor handed to the node by its last cluster head.
    pub q_pol_carry: f64,
    /// Two-level networks only: node carries the boosted energy.
    pub advanced: bool,
}

impl Node {
    pub fn new(id: usize, pos: Position) -> Self {
        Self {
            id,
            pos,
            e_init: 0.0,
            e_res: 0.0,
            alive: true,
            last_head_round: None,
            q_pol_carry: 1.0,
            advanced: false,
        }
    }

    /// Rounds elapsed since the node last headed a cluster, as seen from
    /// `round`. `None` if it never has.
    pub fn rounds_since_head(&self, round: u64) -> Option<u64> {
        self.last_head_round.map(|r| round.saturating_sub(r))
    }

    fn set_initial_energy(&mut self, e: f64) {
        self.e_init = e;
        self.e_res = e;
    }
}

/// How initial energy is spread over the population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HeterogeneitySpec {
    /// A `lambda` fraction of nodes get `(1 + alpha) * e0`, the rest `e0`.
    TwoLevel { e0: f64, lambda: f64, alpha: f64 },
    /// Energies drawn uniformly on `[e_min, e_max]`, optionally rescaled so
    /// the network total is exactly `total_target`.
    MultiLevel {
        e_min: f64,
        e_max: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        total_target: Option<f64>,
    },
}

impl HeterogeneitySpec {
    pub fn validate(&self) -> Result<(), WorldError> {
        match *self {
            HeterogeneitySpec::TwoLevel { e0, lambda, alpha } => {
                if !(e0 > 0.0 && e0.is_finite()) {
                    return Err(WorldError::BadEnergy(e0));
                }
                if !(lambda > 0.0 && lambda < 1.0) {
                    return Err(WorldError::BadLambda(lambda));
                }
                if !(alpha >= 0.0 && alpha.is_finite()) {
                    return Err(WorldError::BadAlpha(alpha));
                }
            }
            HeterogeneitySpec::MultiLevel { e_min, e_max, .. } => {
                if !(e_min > 0.0 && e_max.is_finite() && e_min <= e_max) {
                    return Err(WorldError::BadInterval { e_min, e_max });
                }
            }
        }
        Ok(())
    }

    pub fn is_two_level(&self) -> bool {
        matches!(self, HeterogeneitySpec::TwoLevel { .. })
    }
}

/// `n` positions with i.i.d. uniform coordinates on `[0, side]`.
pub fn deploy_uniform(
    n: usize,
    side: f64,
    rng: &mut SimRng,
) -> Result<Vec<Position>, WorldError> {
    if n == 0 {
        return Err(WorldError::NoNodes);
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(WorldError::BadSide(side));
    }
    Ok((0..n)
        .map(|_| {
            let x = rng.random_range(0.0..=side);
            let y = rng.random_range(0.0..=side);
            Position::new(x, y)
        })
        .collect())
}

pub fn sink_position(side: f64) -> Position {
    Position::new(side / 2.0, side / 2.0)
}

/// Number of advanced nodes for a two-level split (nearest integer).
pub fn advanced_count(n: usize, lambda: f64) -> usize {
    (lambda * n as f64).round() as usize
}

pub fn assign_two_level(
    nodes: &mut [Node],
    e0: f64,
    lambda: f64,
    alpha: f64,
    rng: &mut SimRng,
) -> Result<(), WorldError> {
    HeterogeneitySpec::TwoLevel { e0, lambda, alpha }.validate()?;
    let n = nodes.len();
    let advanced = advanced_count(n, lambda);
    if advanced == 0 || advanced == n {
        return Err(WorldError::DegenerateTwoLevel {
            lambda,
            n,
            advanced,
        });
    }
    for node in nodes.iter_mut() {
        node.advanced = false;
        node.set_initial_energy(e0);
    }
    for i in index::sample(rng, n, advanced) {
        nodes[i].advanced = true;
        nodes[i].set_initial_energy((1.0 + alpha) * e0);
    }
    Ok(())
}

pub fn assign_multi_level(
    nodes: &mut [Node],
    e_min: f64,
    e_max: f64,
    total_target: Option<f64>,
    rng: &mut SimRng,
) -> Result<(), WorldError> {
    HeterogeneitySpec::MultiLevel {
        e_min,
        e_max,
        total_target,
    }
    .validate()?;
    let n = nodes.len() as f64;
    if let Some(target) = total_target {
        let (lo, hi) = (n * e_min, n * e_max);
        if !(target >= lo && target <= hi) {
            return Err(WorldError::TargetOutOfRange { target, lo, hi });
        }
    }
    let draws: Vec<f64> = nodes
        .iter()
        .map(|_| {
            if e_min == e_max {
                e_min
            } else {
                rng.random_range(e_min..=e_max)
            }
        })
        .collect();
    let scale = match total_target {
        Some(target) => target / draws.iter().sum::<f64>(),
        None => 1.0,
    };
    for (node, e) in nodes.iter_mut().zip(draws) {
        node.advanced = false;
        node.set_initial_energy(e * scale);
    }
    Ok(())
}

/// A deployed network: nodes, field and sink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub side: f64,
    pub sink: Position,
    pub nodes: Vec<Node>,
}

impl World {
    /// Deploys `n` nodes and assigns their energy, drawing from `rng` in that
    /// order.
    pub fn build(
        n: usize,
        side: f64,
        sink: Option<Position>,
        heterogeneity: &HeterogeneitySpec,
        rng: &mut SimRng,
    ) -> Result<Self, WorldError> {
        let positions = deploy_uniform(n, side, rng)?;
        let sink = sink.unwrap_or_else(|| sink_position(side));
        if !(0.0..=side).contains(&sink.x) || !(0.0..=side).contains(&sink.y) {
            return Err(WorldError::SinkOutside {
                x: sink.x,
                y: sink.y,
                side,
            });
        }
        let mut nodes: Vec<Node> = positions
            .into_iter()
            .enumerate()
            .map(|(id, pos)| Node::new(id, pos))
            .collect();
        match *heterogeneity {
            HeterogeneitySpec::TwoLevel { e0, lambda, alpha } => {
                assign_two_level(&mut nodes, e0, lambda, alpha, rng)?
            }
            HeterogeneitySpec::MultiLevel {
                e_min,
                e_max,
                total_target,
            } => assign_multi_level(&mut nodes, e_min, e_max, total_target, rng)?,
        }
        Ok(Self { side, sink, nodes })
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn alive(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.alive)
    }

    pub fn total_initial(&self) -> f64 {
        self.nodes.iter().map(|n| n.e_init).sum()
    }

    pub fn total_residual(&self) -> f64 {
        self.nodes.iter().map(|n| n.e_res).sum()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.e_res).collect()
    }
}
