//! Replicated experiments: two-level stability sweeps over `lambda` and
//! `alpha`, and the multi-level protocol comparison.
//!
//! Every run is an independent [`Simulation`], so jobs fan out over rayon.
//! Results come back in job order, keyed (protocol, grid point, seed), which
//! keeps output identical regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::election::Protocol;
use crate::engine::{run_simulation, SimError, Simulation};
use crate::metrics::{mean, median, MetricSeries, MetricsError};
use crate::world::HeterogeneitySpec;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("the {0} sweep needs a two-level base config")]
    NotTwoLevel(&'static str),
    #[error("the multi-level experiment needs a multi-level base config")]
    NotMultiLevel,
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Lambda,
    Alpha,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Alpha => "alpha",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub protocol: Protocol,
    pub value: f64,
    pub seed: u64,
    pub stability_period: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryRow {
    pub protocol: Protocol,
    pub value: f64,
    pub replicates: usize,
    pub mean_stability: f64,
    pub median_stability: f64,
}

/// Seeds `base, base + 1, ...` for `replicates` runs.
pub fn replicate_seeds(base: u64, replicates: usize) -> Vec<u64> {
    (0..replicates as u64).map(|i| base.wrapping_add(i)).collect()
}

fn stability_of(cfg: &ScenarioConfig) -> Result<u64, SimError> {
    Simulation::new(cfg)?.run_to_first_death()
}

pub fn run_sweep(
    base: &ScenarioConfig,
    param: SweepParam,
    grid: &[f64],
    replicates: usize,
) -> Result<Vec<SweepRow>, ExperimentError> {
    let HeterogeneitySpec::TwoLevel { e0, lambda, alpha } = base.heterogeneity else {
        return Err(ExperimentError::NotTwoLevel(param.column()));
    };
    if grid.is_empty() {
        return Err(ExperimentError::EmptyGrid);
    }
    let seeds = replicate_seeds(base.seed, replicates);
    let mut jobs = Vec::new();
    for protocol in Protocol::TWO_LEVEL {
        for &value in grid {
            for &seed in &seeds {
                let heterogeneity = match param {
                    SweepParam::Lambda => HeterogeneitySpec::TwoLevel { e0, lambda: value, alpha },
                    SweepParam::Alpha => HeterogeneitySpec::TwoLevel { e0, lambda, alpha: value },
                };
                let cfg = ScenarioConfig {
                    protocol,
                    seed,
                    heterogeneity,
                    ..base.clone()
                };
                jobs.push((protocol, value, seed, cfg));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(protocol, value, seed, cfg)| {
            Ok(SweepRow {
                protocol,
                value,
                seed,
                stability_period: stability_of(&cfg)?,
            })
        })
        .collect()
}

/// Stability period for every (protocol, lambda, seed), four protocols:
/// LEACH, LEACH-E, SEP and BECC.
pub fn run_sweep_lambda(
    base: &ScenarioConfig,
    lambdas: &[f64],
    replicates: usize,
) -> Result<Vec<SweepRow>, ExperimentError> {
    run_sweep(base, SweepParam::Lambda, lambdas, replicates)
}

pub fn run_sweep_alpha(
    base: &ScenarioConfig,
    alphas: &[f64],
    replicates: usize,
) -> Result<Vec<SweepRow>, ExperimentError> {
    run_sweep(base, SweepParam::Alpha, alphas, replicates)
}

/// Mean and median stability per (protocol, grid point), in first-seen order.
pub fn summarize_sweep(rows: &[SweepRow]) -> Vec<SweepSummaryRow> {
    let mut keys: Vec<(Protocol, f64)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(p, v)| p == r.protocol && v == r.value) {
            keys.push((r.protocol, r.value));
        }
    }
    keys.into_iter()
        .map(|(protocol, value)| {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.protocol == protocol && r.value == value)
                .map(|r| r.stability_period as f64)
                .collect();
            SweepSummaryRow {
                protocol,
                value,
                replicates: vals.len(),
                mean_stability: mean(&vals),
                median_stability: median(&vals),
            }
        })
        .collect()
}

/// All four multi-level protocols run on one seed's world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiLevelRun {
    pub seed: u64,
    /// Ordered as [`Protocol::MULTI_LEVEL`].
    pub series: Vec<MetricSeries>,
}

impl MultiLevelRun {
    pub fn get(&self, protocol: Protocol) -> Option<&MetricSeries> {
        self.series.iter().find(|s| s.protocol == protocol)
    }
}

/// LEACH, LEACH-E, SEP-M and BECC on identical worlds for each replicate
/// seed.
pub fn run_multilevel_experiment(
    base: &ScenarioConfig,
    replicates: usize,
) -> Result<Vec<MultiLevelRun>, ExperimentError> {
    if base.heterogeneity.is_two_level() {
        return Err(ExperimentError::NotMultiLevel);
    }
    let seeds = replicate_seeds(base.seed, replicates);
    let jobs: Vec<ScenarioConfig> = seeds
        .iter()
        .flat_map(|&seed| {
            Protocol::MULTI_LEVEL.into_iter().map(move |protocol| (seed, protocol))
        })
        .map(|(seed, protocol)| ScenarioConfig {
            protocol,
            seed,
            ..base.clone()
        })
        .collect();
    let series: Vec<MetricSeries> = jobs
        .into_par_iter()
        .map(|cfg| -> Result<MetricSeries, ExperimentError> {
            let trace = run_simulation(&cfg)?;
            Ok(MetricSeries::from_trace(&trace)?)
        })
        .collect::<Result<_, _>>()?;
    let per_seed = Protocol::MULTI_LEVEL.len();
    Ok(seeds
        .into_iter()
        .zip(series.chunks(per_seed))
        .map(|(seed, chunk)| MultiLevelRun {
            seed,
            series: chunk.to_vec(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_two_level() -> ScenarioConfig {
        ScenarioConfig {
            nodes: 40,
            field_side: 200.0,
            heterogeneity: HeterogeneitySpec::TwoLevel {
                e0: 0.05,
                lambda: 0.2,
                alpha: 3.0,
            },
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn sweep_table_cardinality_and_order() {
        let base = small_two_level();
        let rows = run_sweep_lambda(&base, &[0.1, 0.5, 0.9], 3).unwrap();
        assert_eq!(rows.len(), 4 * 3 * 3);
        assert_eq!(rows[0].protocol, Protocol::Leach);
        assert_eq!((rows[0].value, rows[0].seed), (0.1, 1));
        assert_eq!((rows[1].value, rows[1].seed), (0.1, 2));
        assert_eq!(rows.last().unwrap().protocol, Protocol::Becc);
        let again = run_sweep_lambda(&base, &[0.1, 0.5, 0.9], 3).unwrap();
        assert_eq!(rows, again);
        let summary = summarize_sweep(&rows);
        assert_eq!(summary.len(), 12);
        assert!(summary.iter().all(|s| s.replicates == 3));
    }

    #[test]
    fn sweeps_reject_wrong_base() {
        let ml = ScenarioConfig::default();
        assert!(matches!(
            run_sweep_lambda(&ml, &[0.1], 1),
            Err(ExperimentError::NotTwoLevel("lambda"))
        ));
        assert!(matches!(
            run_sweep_alpha(&ml, &[0.5], 1),
            Err(ExperimentError::NotTwoLevel("alpha"))
        ));
        assert!(matches!(
            run_sweep_alpha(&small_two_level(), &[], 1),
            Err(ExperimentError::EmptyGrid)
        ));
        assert!(matches!(
            run_multilevel_experiment(&small_two_level(), 1),
            Err(ExperimentError::NotMultiLevel)
        ));
    }

    #[test]
    fn alpha_zero_collapses_to_homogeneous_network() {
        let base = small_two_level();
        let rows = run_sweep_alpha(&base, &[0.0], 1).unwrap();
        assert_eq!(rows.len(), 4);
        // With alpha = 0, SEP degenerates to LEACH on the same world and stream.
        let leach = rows.iter().find(|r| r.protocol == Protocol::Leach).unwrap();
        let sep = rows.iter().find(|r| r.protocol == Protocol::Sep).unwrap();
        assert_eq!(leach.stability_period, sep.stability_period);
    }

    #[test]
    fn multilevel_shares_worlds_across_protocols() {
        let base = ScenarioConfig {
            nodes: 40,
            field_side: 200.0,
            heterogeneity: HeterogeneitySpec::MultiLevel {
                e_min: 0.02,
                e_max: 0.1,
                total_target: Some(2.4),
            },
            ..ScenarioConfig::default()
        };
        let runs = run_multilevel_experiment(&base, 2).unwrap();
        assert_eq!(runs.len(), 2);
        for run in &runs {
            assert_eq!(run.series.len(), 4);
            let totals: Vec<f64> = run.series.iter().map(|s| s.initial_total).collect();
            assert!(totals.iter().all(|&t| t == totals[0]));
            assert!((totals[0] - 2.4).abs() < 1e-9);
        }
    }
}
