//! Trace CSV and summary JSON emission.
//!
//! Floats are written in shortest round-trip form, so reruns of one config
//! produce identical bytes and parsing the CSV back yields the exact values.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use firefly_core::TrialRecord;

use crate::config::{encoding_name, EngineSpec, ExperimentConfig};
use crate::error::Result;
use crate::experiment::Outcome;
use crate::stats::Summary;

pub const TRACE_HEADER: &str = "replicate,seed,iteration,best_so_far,evaluations";
pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn trace_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in records {
        for (itr, (f, e)) in r.best_trace.iter().zip(&r.evaluation_trace).enumerate() {
            writeln!(out, "{},{},{},{},{}", r.replicate, r.seed, itr, f, e)
                .expect("writing to a String");
        }
    }
    out
}

#[derive(Serialize)]
struct BestSolution<'a> {
    replicate: usize,
    objective: f64,
    values: &'a [f64],
}

#[derive(Serialize)]
struct SummaryDocument<'a> {
    problem: &'static str,
    encoding: &'static str,
    engine: &'static str,
    variant: Option<&'static str>,
    population: usize,
    max_iter: usize,
    replicates: usize,
    seed: u64,
    summary: &'a Summary,
    final_objectives: Vec<f64>,
    best_solution: Option<BestSolution<'a>>,
}

pub fn summary_json(config: &ExperimentConfig, outcome: &Outcome) -> Result<String> {
    let best = outcome
        .records
        .iter()
        .min_by(|a, b| a.final_objective().total_cmp(&b.final_objective()))
        .map(|r| BestSolution {
            replicate: r.replicate,
            objective: r.final_objective(),
            values: &r.best.values,
        });
    let doc = SummaryDocument {
        problem: config.problem.name(),
        encoding: encoding_name(config.encoding),
        engine: config.engine.name(),
        variant: match &config.engine {
            EngineSpec::Discrete(d) => Some(d.variant.name()),
            EngineSpec::Continuous(_) => None,
        },
        population: config.engine.population(),
        max_iter: config.engine.max_iter(),
        replicates: config.replicates,
        seed: config.seed,
        summary: &outcome.summary,
        final_objectives: outcome
            .records
            .iter()
            .map(TrialRecord::final_objective)
            .collect(),
        best_solution: best,
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// Writes `trace.csv` and `summary.json` into `dir`, creating it if needed.
pub fn write_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    outcome: &Outcome,
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let trace = dir.join(TRACE_FILE);
    let summary = dir.join(SUMMARY_FILE);
    fs::write(&trace, trace_csv(&outcome.records))?;
    fs::write(&summary, summary_json(config, outcome)?)?;
    Ok((trace, summary))
}
