//! Round execution.
//!
//! A round has two phases. During set-up, alive nodes draw against their
//! protocol's threshold (ascending id, one draw each), non-heads join the
//! nearest head and, under BECC, each head turns its members' residual
//! energies into polarized factors that the members carry into the next
//! round. If nobody is elected, every alive node sends straight to the sink.
//!
//! During steady state every alive node produces one frame. Members send it to
//! their head; a head receives its members' frames, fuses them with its own
//! and forwards one frame to the sink; direct nodes send to the sink. Control
//! traffic is free. Costs are floored at the node's residual energy and
//! deaths are recorded once, at the end of the round.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::election::{
    becc_polarized_factors, elect, ElectionContext, ElectionError, GlobalView, InitialView,
    NodeView, Protocol, TwoLevelParams,
};
use crate::radio::{agg_energy, rx_energy, tx_energy, RadioError, RadioParams};
use crate::world::{distance, seeded_rng, SimRng, World};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error("no alive nodes left to run a round")]
    NoAliveNodes,
}

/// Role of a node in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Head,
    Member { head: usize },
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub head: usize,
    /// Member ids in ascending order, head included.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// Indexed by node id; `None` for nodes that were dead at set-up.
    pub roles: Vec<Option<Role>>,
    pub clusters: Vec<Cluster>,
}

impl ClusterAssignment {
    pub fn heads(&self) -> impl Iterator<Item = usize> + '_ {
        self.clusters.iter().map(|c| c.head)
    }

    pub fn head_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn direct_count(&self) -> usize {
        self.roles
            .iter()
            .filter(|r| matches!(r, Some(Role::Direct)))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: u64,
    pub head_count: usize,
    pub direct_count: usize,
    /// Energy actually drawn from each node this round, J.
    pub spent: Vec<f64>,
    /// Nodes that died at the end of this round.
    pub deaths: Vec<usize>,
    pub sink_messages: u64,
    /// Residual energies after the round, J.
    pub residual: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    BudgetExhausted,
    AllDead,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub initial_residual: Vec<f64>,
    pub reports: Vec<RoundReport>,
    pub termination: Termination,
}

impl SimulationTrace {
    pub fn node_count(&self) -> usize {
        self.initial_residual.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

/// Election context for `node`, populated with just what the protocol uses.
fn context(
    protocol: Protocol,
    p_opt: f64,
    round: u64,
    node: &crate::world::Node,
    global: GlobalView,
    initial: InitialView,
    two_level: Option<TwoLevelParams>,
) -> ElectionContext {
    ElectionContext {
        round,
        p_opt,
        node: NodeView {
            e_res: node.e_res,
            e_init: node.e_init,
            rounds_since_head: node.rounds_since_head(round),
            q_pol_carry: node.q_pol_carry,
            advanced: node.advanced,
        },
        global: protocol.needs_global_view().then_some(global),
        initial: protocol.needs_initial_view().then_some(initial),
        two_level: if protocol == Protocol::Sep {
            two_level
        } else {
            None
        },
    }
}

/// Election, cluster formation and (for BECC) polarized factor
/// distribution.
pub fn run_setup_phase(
    world: &mut World,
    protocol: Protocol,
    p_opt: f64,
    round: u64,
    two_level: Option<TwoLevelParams>,
    rng: &mut SimRng,
) -> Result<ClusterAssignment, SimError> {
    let (mut alive_count, mut total_residual, mut total_initial) = (0usize, 0.0, 0.0);
    for n in world.alive() {
        alive_count += 1;
        total_residual += n.e_res;
        total_initial += n.e_init;
    }
    if alive_count == 0 {
        return Err(SimError::NoAliveNodes);
    }
    let global = GlobalView {
        total_residual,
        alive_count,
    };
    let initial = InitialView {
        total_initial,
        alive_count,
    };

    let mut heads = Vec::new();
    for node in world.nodes.iter().filter(|n| n.alive) {
        let ctx = context(protocol, p_opt, round, node, global, initial, two_level);
        let threshold = protocol.threshold(&ctx)?;
        if elect(threshold, rng) {
            heads.push(node.id);
        }
    }

    let mut roles = vec![None; world.nodes.len()];
    if heads.is_empty() {
        for node in world.alive() {
            roles[node.id] = Some(Role::Direct);
        }
        return Ok(ClusterAssignment {
            roles,
            clusters: Vec::new(),
        });
    }

    let mut clusters: Vec<Cluster> = heads
        .iter()
        .map(|&h| Cluster {
            head: h,
            members: Vec::new(),
        })
        .collect();
    let mut slot = vec![usize::MAX; world.nodes.len()];
    for (i, &h) in heads.iter().enumerate() {
        slot[h] = i;
        roles[h] = Some(Role::Head);
    }
    for node in world.nodes.iter().filter(|n| n.alive) {
        let ci = if slot[node.id] != usize::MAX {
            slot[node.id]
        } else {
            // Nearest head; ties go to the lower id.
            let mut best = (0, f64::INFINITY);
            for (i, &h) in heads.iter().enumerate() {
                let d = distance(node.pos, world.nodes[h].pos);
                if d < best.1 {
                    best = (i, d);
                }
            }
            roles[node.id] = Some(Role::Member { head: heads[best.0] });
            best.0
        };
        clusters[ci].members.push(node.id);
    }

    for &h in &heads {
        world.nodes[h].last_head_round = Some(round);
    }

    if protocol == Protocol::Becc {
        for cluster in &clusters {
            let energies: Vec<f64> = cluster
                .members
                .iter()
                .map(|&id| world.nodes[id].e_res)
                .collect();
            let q_pol = becc_polarized_factors(&energies)?;
            for (&id, q) in cluster.members.iter().zip(q_pol) {
                world.nodes[id].q_pol_carry = q;
            }
        }
    }

    Ok(ClusterAssignment { roles, clusters })
}

/// Data transmission, aggregation and energy accounting for one round,
/// followed by the death check.
pub fn run_steady_state(
    world: &mut World,
    assignment: &ClusterAssignment,
    radio: &RadioParams,
    round: u64,
) -> Result<RoundReport, SimError> {
    let k = radio.msg_bits;
    let n = world.nodes.len();
    let mut cost = vec![0.0; n];
    let rx = rx_energy(k, radio)?;
    for cluster in &assignment.clusters {
        let head = &world.nodes[cluster.head];
        let others = cluster.members.len() as u64 - 1;
        cost[cluster.head] = others as f64 * rx
            + agg_energy(others + 1, k, radio)?
            + tx_energy(k, distance(head.pos, world.sink), radio)?;
        for &m in &cluster.members {
            if m != cluster.head {
                cost[m] = tx_energy(k, distance(world.nodes[m].pos, head.pos), radio)?;
            }
        }
    }
    for (id, role) in assignment.roles.iter().enumerate() {
        if let Some(Role::Direct) = role {
            cost[id] = tx_energy(k, distance(world.nodes[id].pos, world.sink), radio)?;
        }
    }

    let mut spent = vec![0.0; n];
    for (node, (c, s)) in world.nodes.iter_mut().zip(cost.iter().zip(spent.iter_mut())) {
        if !node.alive {
            continue;
        }
        if *c >= node.e_res {
            *s = node.e_res;
            node.e_res = 0.0;
        } else {
            *s = *c;
            node.e_res -= c;
        }
    }

    let deaths = apply_death(world);
    let head_count = assignment.head_count();
    let direct_count = assignment.direct_count();
    Ok(RoundReport {
        round,
        head_count,
        direct_count,
        spent,
        deaths,
        sink_messages: (head_count + direct_count) as u64,
        residual: world.residuals(),
    })
}

/// Marks alive nodes without energy as dead and returns their ids.
pub fn apply_death(world: &mut World) -> Vec<usize> {
    let mut deaths = Vec::new();
    for node in world.nodes.iter_mut() {
        if node.alive && node.e_res <= 0.0 {
            node.alive = false;
            node.e_res = 0.0;
            deaths.push(node.id);
        }
    }
    deaths
}

/// A simulation in progress: one world, one random stream.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: ScenarioConfig,
    radio: RadioParams,
    two_level: Option<TwoLevelParams>,
    world: World,
    rng: SimRng,
    round: u64,
}

impl Simulation {
    pub fn new(config: &ScenarioConfig) -> Result<Self, SimError> {
        config.validate()?;
        let radio = config.radio_params()?;
        let mut rng = seeded_rng(config.seed);
        let world = World::build(
            config.nodes,
            config.field_side,
            config.sink,
            &config.heterogeneity,
            &mut rng,
        )
        .map_err(ConfigError::from)?;
        Ok(Self {
            config: config.clone(),
            radio,
            two_level: config.two_level_params(),
            world,
            rng,
            round: 0,
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Index of the next round to run.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn finished(&self) -> bool {
        self.config.rounds.is_some_and(|b| self.round >= b) || self.world.alive_count() == 0
    }

    pub fn setup_phase(&mut self) -> Result<ClusterAssignment, SimError> {
        run_setup_phase(
            &mut self.world,
            self.config.protocol,
            self.config.p_opt,
            self.round,
            self.two_level,
            &mut self.rng,
        )
    }

    pub fn steady_state(&mut self, assignment: &ClusterAssignment) -> Result<RoundReport, SimError> {
        let report = run_steady_state(&mut self.world, assignment, &self.radio, self.round)?;
        self.round += 1;
        Ok(report)
    }

    /// Runs the next round, or returns `None` once the budget is spent or the
    /// network is dead.
    pub fn step(&mut self) -> Result<Option<RoundReport>, SimError> {
        if self.finished() {
            return Ok(None);
        }
        let assignment = self.setup_phase()?;
        self.steady_state(&assignment).map(Some)
    }

    pub fn termination(&self) -> Termination {
        if self.world.alive_count() == 0 {
            Termination::AllDead
        } else {
            Termination::BudgetExhausted
        }
    }

    /// Runs until the first node dies (or the run ends) and returns the number
    /// of rounds completed before the round with the first death.
    pub fn run_to_first_death(&mut self) -> Result<u64, SimError> {
        while let Some(report) = self.step()? {
            if !report.deaths.is_empty() {
                return Ok(report.round);
            }
        }
        Ok(self.round)
    }
}

pub fn run_simulation(config: &ScenarioConfig) -> Result<SimulationTrace, SimError> {
    let mut sim = Simulation::new(config)?;
    let initial_residual = sim.world().residuals();
    let mut reports = Vec::new();
    while let Some(report) = sim.step()? {
        reports.push(report);
    }
    Ok(SimulationTrace {
        config: config.clone(),
        seed: config.seed,
        initial_residual,
        reports,
        termination: sim.termination(),
    })
}
