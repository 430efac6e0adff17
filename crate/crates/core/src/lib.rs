//! Round-based simulation of cluster-head election in wireless sensor
//! networks whose nodes start with unequal energy.
//!
//! The crate compares five election rules (LEACH, LEACH-E, SEP, SEP-M and
//! BECC) under one shared world model, radio model and steady-state
//! accounting, so the election threshold is the only thing that differs
//! between protocols.
//!
//! * [`radio`]: first-order radio energy model.
//! * [`world`]: node deployment, initial energies, seeded RNG.
//! * [`election`]: per-protocol election thresholds and the polarized energy
//!   factor.
//! * [`engine`]: set-up and steady-state phases, full runs.
//! * [`metrics`], [`experiments`], [`export`]: series, sweeps and CSV output.
//! * [`config`]: TOML scenario configuration.

pub mod config;
pub mod election;
pub mod engine;
pub mod experiments;
pub mod export;
pub mod metrics;
pub mod radio;
pub mod world;

pub use config::{ConfigError, ScenarioConfig};
pub use election::Protocol;
pub use engine::{run_simulation, RoundReport, SimError, Simulation, SimulationTrace, Termination};
pub use metrics::MetricSeries;
pub use radio::RadioParams;
pub use world::{HeterogeneitySpec, Position, World};
