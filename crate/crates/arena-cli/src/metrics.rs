//! Run metrics and cross-algorithm aggregates.

use serde::{Deserialize, Serialize};

use arena_core::dynamics::RunOutcome;

/// The metric record of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetrics {
    /// Total iterations played, across all rounds.
    pub iterations: u64,
    /// Rounds of the outer loop actually played.
    pub rounds: u32,
    /// Whether the run ended satisfied (or, for the baselines, purely
    /// converged).
    pub converged: bool,
    /// Total iteration count at the first pure-convergence detection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations_to_convergence: Option<u64>,
    /// Welfare of the final profile.
    pub final_w: f64,
    /// Satisfaction ratio at the last iteration (zero for baselines).
    pub final_omega: f64,
    pub final_profile: Vec<usize>,
    /// Largest average regret over players and actions at the end.
    pub max_final_avg_regret: f64,
    /// `final_w / oracle_w`, present when an oracle value is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_to_optimum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_w: Option<f64>,
}

impl RunMetrics {
    pub fn from_outcome(outcome: &RunOutcome, oracle_w: Option<f64>) -> Self {
        let last = outcome.trace.records.last();
        Self {
            iterations: outcome.trace.len() as u64,
            rounds: outcome.rounds,
            converged: outcome.converged,
            iterations_to_convergence: outcome.iterations_to_convergence,
            final_w: outcome.final_welfare,
            final_omega: last.map_or(0.0, |r| r.omega),
            final_profile: outcome.final_profile.actions().to_vec(),
            max_final_avg_regret: last.map_or(0.0, |r| r.max_avg_regret),
            ratio_to_optimum: oracle_w.map(|w| outcome.final_welfare / w),
            oracle_w,
        }
    }
}

/// Per-algorithm aggregates over a common seed set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub seeds: usize,
    pub mean_final_w: f64,
    pub median_final_w: f64,
    /// Mean first-detection iteration over the seeds that converged.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_iterations_to_convergence: Option<f64>,
    pub converged_fraction: f64,
    /// Fraction of seeds whose final welfare reaches the oracle optimum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_fraction: Option<f64>,
    pub mean_cumulative_queries: f64,
    pub instance_sha256: String,
}

impl AlgorithmSummary {
    pub fn aggregate(
        algorithm: &str,
        metrics: &[RunMetrics],
        queries: &[u64],
        oracle_w: Option<f64>,
        instance_sha256: &str,
    ) -> Self {
        let finals: Vec<f64> = metrics.iter().map(|m| m.final_w).collect();
        let conv_iters: Vec<f64> = metrics
            .iter()
            .filter(|m| m.converged)
            .filter_map(|m| m.iterations_to_convergence.map(|i| i as f64))
            .collect();
        let converged = metrics.iter().filter(|m| m.converged).count();
        let oracle_fraction = oracle_w.map(|w| {
            finals.iter().filter(|&&f| f >= w - 1e-9).count() as f64 / finals.len() as f64
        });
        Self {
            algorithm: algorithm.to_string(),
            seeds: metrics.len(),
            mean_final_w: mean(&finals),
            median_final_w: median(&finals),
            mean_iterations_to_convergence: if conv_iters.is_empty() {
                None
            } else {
                Some(mean(&conv_iters))
            },
            converged_fraction: converged as f64 / metrics.len() as f64,
            oracle_fraction,
            mean_cumulative_queries: mean(&queries.iter().map(|&q| q as f64).collect::<Vec<_>>()),
            instance_sha256: instance_sha256.to_string(),
        }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}
