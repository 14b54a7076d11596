//! Summary statistics over the final objectives of a set of replicates.

use serde::Serialize;

use firefly_core::TrialRecord;

use crate::error::{HarnessError, Result};

/// Absolute slack added to every success test.
pub const SUCCESS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub replicates: usize,
    pub best: f64,
    pub worst: f64,
    pub mean: f64,
    pub median: f64,
    /// Population standard deviation.
    pub std: f64,
    pub mean_evaluations: f64,
    pub oracle: Option<f64>,
    pub tolerance: f64,
    pub success_rate: Option<f64>,
}

/// Whether `f` counts as reaching `oracle`.
pub fn is_success(f: f64, oracle: f64, tolerance: f64) -> bool {
    f <= oracle + tolerance * oracle.abs() + SUCCESS_SLACK
}

pub fn aggregate(records: &[TrialRecord], oracle: Option<f64>, tolerance: f64) -> Result<Summary> {
    let finals: Vec<f64> = records.iter().map(TrialRecord::final_objective).collect();
    let evals: Vec<u64> = records.iter().map(|r| r.evaluations).collect();
    aggregate_values(&finals, &evals, oracle, tolerance)
}

/// Statistics of final objectives given in replicate order.
pub fn aggregate_values(
    finals: &[f64],
    evaluations: &[u64],
    oracle: Option<f64>,
    tolerance: f64,
) -> Result<Summary> {
    if finals.is_empty() {
        return Err(HarnessError::Empty);
    }
    let n = finals.len() as f64;
    let mean = finals.iter().sum::<f64>() / n;
    let var = finals.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>() / n;
    let mut sorted = finals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    };
    let mean_evaluations =
        evaluations.iter().map(|&e| e as f64).sum::<f64>() / evaluations.len().max(1) as f64;
    let success_rate = oracle.map(|o| {
        finals
            .iter()
            .filter(|&&f| is_success(f, o, tolerance))
            .count() as f64
            / n
    });
    Ok(Summary {
        replicates: finals.len(),
        best: sorted[0],
        worst: sorted[sorted.len() - 1],
        mean,
        median,
        std: var.sqrt(),
        mean_evaluations,
        oracle,
        tolerance,
        success_rate,
    })
}
