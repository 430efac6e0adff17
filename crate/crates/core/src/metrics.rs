//! Per-round metric series derived from a [`SimulationTrace`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::election::Protocol;
use crate::engine::SimulationTrace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("trace has no rounds")]
    EmptyTrace,
}

/// Rounds completed before the round in which the first node died, or the
/// trace length if nobody died.
pub fn stability_period(trace: &SimulationTrace) -> Result<u64, MetricsError> {
    if trace.reports.is_empty() {
        return Err(MetricsError::EmptyTrace);
    }
    Ok(trace
        .reports
        .iter()
        .position(|r| !r.deaths.is_empty())
        .unwrap_or(trace.reports.len()) as u64)
}

/// Alive count after each round, read off the residual-energy snapshots.
pub fn alive_series(trace: &SimulationTrace) -> Vec<usize> {
    trace
        .reports
        .iter()
        .map(|r| r.residual.iter().filter(|&&e| e > 0.0).count())
        .collect()
}

/// Population standard deviation of `values`; zero for fewer than two.
pub fn population_stddev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt()
}

/// Standard deviation of residual energy over the nodes alive after each
/// round.
pub fn residual_stddev_series(trace: &SimulationTrace) -> Vec<f64> {
    let mut buf = Vec::with_capacity(trace.node_count());
    trace
        .reports
        .iter()
        .map(|r| {
            buf.clear();
            buf.extend(r.residual.iter().copied().filter(|&e| e > 0.0));
            population_stddev(&buf)
        })
        .collect()
}

/// Running total of messages delivered to the sink.
pub fn sink_message_series(trace: &SimulationTrace) -> Vec<u64> {
    trace
        .reports
        .iter()
        .scan(0u64, |acc, r| {
            *acc += r.sink_messages;
            Some(*acc)
        })
        .collect()
}

/// Least-squares slope of `values` against their index.
pub fn ls_slope(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let n = values.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = values.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, v) in values.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (v - my);
        sxx += dx * dx;
    }
    Some(sxy / sxx)
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Median; the mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}

/// Figure-ready series for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub protocol: Protocol,
    pub seed: u64,
    pub alive: Vec<usize>,
    pub stddev_j: Vec<f64>,
    pub sink_msgs_cum: Vec<u64>,
    pub stability_period: u64,
    pub initial_total: f64,
}

impl MetricSeries {
    pub fn from_trace(trace: &SimulationTrace) -> Result<Self, MetricsError> {
        Ok(Self {
            protocol: trace.config.protocol,
            seed: trace.seed,
            alive: alive_series(trace),
            stddev_j: residual_stddev_series(trace),
            sink_msgs_cum: sink_message_series(trace),
            stability_period: stability_period(trace)?,
            initial_total: trace.initial_residual.iter().sum(),
        })
    }

    pub fn rounds(&self) -> usize {
        self.alive.len()
    }

    pub fn final_sink_messages(&self) -> u64 {
        self.sink_msgs_cum.last().copied().unwrap_or(0)
    }

    /// Std-dev values over the rounds before the first death.
    pub fn stable_stddev(&self) -> &[f64] {
        &self.stddev_j[..self.stability_period as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;
    use crate::engine::{run_simulation, RoundReport, Termination};

    fn trace_from(reports: Vec<RoundReport>, n: usize) -> SimulationTrace {
        SimulationTrace {
            config: ScenarioConfig::default(),
            seed: 0,
            initial_residual: vec![1.0; n],
            reports,
            termination: Termination::BudgetExhausted,
        }
    }

    fn report(round: u64, residual: Vec<f64>, deaths: Vec<usize>, msgs: u64) -> RoundReport {
        RoundReport {
            round,
            head_count: msgs as usize,
            direct_count: 0,
            spent: vec![0.0; residual.len()],
            deaths,
            sink_messages: msgs,
            residual,
        }
    }

    #[test]
    fn stability_period_cases() {
        let empty = trace_from(vec![], 2);
        assert_eq!(stability_period(&empty), Err(MetricsError::EmptyTrace));

        let none = trace_from(
            (0..7).map(|r| report(r, vec![1.0, 1.0], vec![], 1)).collect(),
            2,
        );
        assert_eq!(stability_period(&none).unwrap(), 7);

        let first = trace_from(vec![report(0, vec![0.0, 1.0], vec![0], 1)], 2);
        assert_eq!(stability_period(&first).unwrap(), 0);

        let mut reports: Vec<_> = (0..91).map(|r| report(r, vec![1.0, 1.0], vec![], 1)).collect();
        reports.push(report(91, vec![0.0, 1.0], vec![0], 1));
        reports.push(report(92, vec![0.0, 0.5], vec![], 1));
        assert_eq!(stability_period(&trace_from(reports, 2)).unwrap(), 91);
    }

    #[test]
    fn stddev_cases() {
        let t = trace_from(
            vec![
                report(0, vec![2.0, 2.0, 2.0], vec![], 1),
                report(1, vec![1.0, 3.0, 0.0], vec![2], 1),
                report(2, vec![0.0, 3.0, 0.0], vec![0], 1),
            ],
            3,
        );
        assert_eq!(residual_stddev_series(&t), vec![0.0, 1.0, 0.0]);
        assert_eq!(alive_series(&t), vec![3, 2, 1]);
    }

    #[test]
    fn sink_series_is_prefix_sum() {
        let t = trace_from(
            vec![
                report(0, vec![1.0], vec![], 10),
                report(1, vec![1.0], vec![], 12),
                report(2, vec![1.0], vec![], 9),
                report(3, vec![0.0], vec![0], 0),
            ],
            1,
        );
        assert_eq!(sink_message_series(&t), vec![10, 22, 31, 31]);
    }

    #[test]
    fn helpers() {
        assert_eq!(ls_slope(&[1.0, 2.0, 3.0]), Some(1.0));
        assert_eq!(ls_slope(&[4.0]), None);
        assert!((ls_slope(&[3.0, 1.0, 2.0, 0.0]).unwrap() + 0.8).abs() < 1e-12);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(mean(&[1.0, 2.0, 6.0]), 3.0);
        assert_eq!(population_stddev(&[1.0, 3.0]), 1.0);
        assert_eq!(population_stddev(&[5.0]), 0.0);
    }

    #[test]
    fn series_invariants_on_real_run() {
        let cfg = ScenarioConfig {
            nodes: 60,
            seed: 3,
            ..ScenarioConfig::default()
        };
        let cfg = ScenarioConfig {
            heterogeneity: crate::world::HeterogeneitySpec::MultiLevel {
                e_min: 0.05,
                e_max: 0.25,
                total_target: None,
            },
            ..cfg
        };
        let trace = run_simulation(&cfg).unwrap();
        let s = MetricSeries::from_trace(&trace).unwrap();
        assert!(s.alive.windows(2).all(|w| w[1] <= w[0]));
        assert!(s.sink_msgs_cum.windows(2).all(|w| w[1] >= w[0]));
        assert!(s.stability_period as usize <= s.rounds());
        let first_drop = s.alive.iter().position(|&a| a < 60).unwrap_or(s.rounds());
        assert_eq!(first_drop as u64, s.stability_period);
        assert!(s.final_sink_messages() >= s.stability_period);
        assert_eq!(*s.alive.last().unwrap(), 0);
    }
}
