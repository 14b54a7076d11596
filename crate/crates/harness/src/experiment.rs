//! Runs the replicates of an experiment, in parallel and in seed order.

use rayon::prelude::*;

use firefly_core::problems::{ContinuousBenchmark, STEPPED_TABLE};
use firefly_core::{derive_seed, run, run_discrete, Encoding, ProblemDescriptor, TrialRecord};

use crate::config::{EngineSpec, ExperimentConfig, LoadedInstance, OracleSpec, ProblemSpec};
use crate::error::{HarnessError, Result};
use crate::stats::{aggregate, Summary};

/// Records of every replicate plus their summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Seed of replicate `index` under master seed `master`.
pub fn replicate_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64)
}

/// Runs one replicate of `engine` on `problem`.
pub fn run_replicate(
    engine: &EngineSpec,
    problem: &ProblemDescriptor,
    master: u64,
    index: usize,
) -> Result<TrialRecord> {
    let seed = replicate_seed(master, index);
    let mut rec = match engine {
        EngineSpec::Continuous(c) => run(problem, c, seed),
        EngineSpec::Discrete(d) => run_discrete(problem, d, seed),
    }
    .map_err(|source| HarnessError::Replicate { index, source })?;
    rec.replicate = index;
    Ok(rec)
}

/// One record per replicate, ordered by replicate index.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let problem = config.problem_descriptor()?;
    run_on(config, &problem)
}

fn run_on(config: &ExperimentConfig, problem: &ProblemDescriptor) -> Result<Vec<TrialRecord>> {
    (0..config.replicates)
        .into_par_iter()
        .map(|k| run_replicate(&config.engine, problem, config.seed, k))
        .collect()
}

/// The reference optimum requested by the config, if any.
pub fn oracle_value(config: &ExperimentConfig, instance: &LoadedInstance) -> Result<Option<f64>> {
    let exhaustive = |r: firefly_core::Result<(Vec<f64>, f64)>| {
        r.map(|(_, f)| Some(f))
            .map_err(|e| HarnessError::field("oracle", e.to_string()))
    };
    match config.oracle {
        OracleSpec::None => Ok(None),
        OracleSpec::Value(v) => Ok(Some(v)),
        OracleSpec::Exhaustive => match (instance, &config.problem) {
            (LoadedInstance::Knapsack(k), _) => exhaustive(k.brute_force()),
            (LoadedInstance::Tsp(t), _) => exhaustive(t.brute_force()),
            (
                LoadedInstance::None,
                ProblemSpec::Benchmark {
                    benchmark: ContinuousBenchmark::SteppedIntegerDemo,
                    ..
                },
            ) if config.encoding == Encoding::Integer => {
                Ok(STEPPED_TABLE.iter().copied().reduce(f64::min))
            }
            _ => Err(HarnessError::field(
                "oracle",
                format!(
                    "no exhaustive oracle for {} with this encoding",
                    config.problem.name()
                ),
            )),
        },
    }
}

/// Runs every replicate and summarizes them.
pub fn execute(config: &ExperimentConfig) -> Result<Outcome> {
    let instance = config.instance()?;
    let problem = config.problem_for(&instance)?;
    let oracle = oracle_value(config, &instance)?;
    let records = run_on(config, &problem)?;
    let summary = aggregate(&records, oracle, config.tolerance)?;
    Ok(Outcome { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn cfg(extra: &str) -> ExperimentConfig {
        parse_config(&format!(
            "problem = \"sphere\"\nsize = 3\nengine = \"continuous\"\npopulation = 6\nmax_iter = 10\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn records_ordered_by_replicate() {
        let recs = run_experiment(&cfg("replicates = 3\nseed = 4\n")).unwrap();
        assert_eq!(
            recs.iter().map(|r| r.replicate).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        for r in &recs {
            assert_eq!(r.seed, replicate_seed(4, r.replicate));
            assert_eq!(r.best_trace.len(), 11);
        }
    }

    #[test]
    fn reruns_agree_and_seeds_matter() {
        let a = run_experiment(&cfg("replicates = 4\nseed = 9\n")).unwrap();
        let b = run_experiment(&cfg("replicates = 4\nseed = 9\n")).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.same_outcome(y)));
        let c = run_experiment(&cfg("replicates = 4\nseed = 10\n")).unwrap();
        assert_ne!(a[0].best_trace, c[0].best_trace);
    }

    #[test]
    fn exhaustive_oracles() {
        let c = parse_config(
            "problem = \"knapsack\"\nsize = 8\nengine = \"discrete\"\noracle = \"exhaustive\"\nreplicates = 2\npopulation = 8\nmax_iter = 20\n",
        )
        .unwrap();
        let out = execute(&c).unwrap();
        let k = match c.instance().unwrap() {
            LoadedInstance::Knapsack(k) => k,
            _ => unreachable!(),
        };
        assert_eq!(out.summary.oracle, Some(k.brute_force().unwrap().1));

        let c =
            parse_config("problem = \"stepped\"\nengine = \"discrete\"\noracle = \"exhaustive\"\n")
                .unwrap();
        assert_eq!(oracle_value(&c, &LoadedInstance::None).unwrap(), Some(0.0));

        let c = cfg("oracle = \"exhaustive\"\n");
        assert!(matches!(execute(&c), Err(HarnessError::Config { .. })));
    }
}
