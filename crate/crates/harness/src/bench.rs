//! Oracle comparisons with pinned parameters, shared by the `bench`
//! subcommand and the acceptance suite.

use std::sync::Arc;

use rayon::prelude::*;

use firefly_core::discretize::{BinarizationRule, Discretizer, TransferFunction};
use firefly_core::problems::{ContinuousBenchmark, KnapsackInstance, TspInstance};
use firefly_core::schedules::AlphaSchedule;
use firefly_core::{
    derive_seed, run, run_discrete, ContinuousConfig, ContinuousParams, DiscreteConfig,
    DiscreteVariant, Encoding, ProblemDescriptor, RngStream, TrialRecord,
};

use crate::error::Result;
use crate::stats::is_success;

pub const KNAPSACK_ITEMS: usize = 15;
pub const KNAPSACK_INSTANCES: u64 = 10;
pub const KNAPSACK_SEED_BASE: u64 = 1000;
pub const KNAPSACK_POPULATION: usize = 30;
pub const KNAPSACK_MAX_ITER: usize = 250;
pub const KNAPSACK_REPLICATES: usize = 20;
pub const KNAPSACK_THRESHOLD: f64 = 0.70;

pub const TSP_CITIES: usize = 7;
pub const TSP_INSTANCES: u64 = 5;
pub const TSP_SEED_BASE: u64 = 2000;
pub const TSP_POPULATION: usize = 25;
pub const TSP_MAX_ITER: usize = 300;
pub const TSP_REPLICATES: usize = 20;
pub const TSP_GAMMA: f64 = 0.1;
pub const TSP_ALPHA: f64 = 2.0;
/// Relative gap to the optimum that still counts as a hit.
pub const TSP_GAP: f64 = 0.05;
pub const TSP_THRESHOLD: f64 = 0.80;

pub const STEPPED_RUNS: usize = 50;
pub const STEPPED_MASTER_SEED: u64 = 7;
pub const STEPPED_POPULATION: usize = 10;
pub const STEPPED_MAX_ITER: usize = 50;
pub const STEPPED_GAMMA: f64 = 0.1;
pub const STEPPED_ALPHA: f64 = 8.0;
pub const STEPPED_DISCRETE_THRESHOLD: f64 = 0.90;
pub const STEPPED_ROUNDED_CEILING: f64 = 0.10;

/// Outcome of one oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub hits: usize,
    pub runs: usize,
    /// Required hit rate; a lower bound unless `at_most` is set.
    pub threshold: f64,
    pub at_most: bool,
}

impl CheckResult {
    pub fn rate(&self) -> f64 {
        self.hits as f64 / self.runs as f64
    }

    pub fn passed(&self) -> bool {
        if self.at_most {
            self.rate() <= self.threshold
        } else {
            self.rate() >= self.threshold
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {}/{} = {:.3} (required {} {})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.hits,
            self.runs,
            self.rate(),
            if self.at_most { "<=" } else { ">=" },
            self.threshold
        )
    }
}

pub fn knapsack_instances() -> Vec<Arc<KnapsackInstance>> {
    (0..KNAPSACK_INSTANCES)
        .map(|k| {
            let mut rng = RngStream::new(KNAPSACK_SEED_BASE + k);
            Arc::new(KnapsackInstance::random(KNAPSACK_ITEMS, &mut rng))
        })
        .collect()
}

pub fn tsp_instances() -> Vec<Arc<TspInstance>> {
    (0..TSP_INSTANCES)
        .map(|k| {
            let mut rng = RngStream::new(TSP_SEED_BASE + k);
            Arc::new(TspInstance::random_euclidean(TSP_CITIES, &mut rng))
        })
        .collect()
}

/// Binary engine: S2 transfer with the probabilistic rule.
pub fn knapsack_config() -> ContinuousConfig {
    let mut c = ContinuousConfig::new(ContinuousParams {
        beta0: 1.0,
        gamma: 1.0,
        alpha: 0.2,
        population: KNAPSACK_POPULATION,
        max_gen: KNAPSACK_MAX_ITER,
    });
    c.discretizer = Some(Discretizer::Binary {
        transfer: TransferFunction::S2,
        rule: BinarizationRule::Probabilistic,
    });
    c
}

pub fn tsp_config() -> DiscreteConfig {
    let mut d = DiscreteConfig::new(
        DiscreteVariant::HammingBetaAlpha { gamma: TSP_GAMMA },
        TSP_POPULATION,
        TSP_MAX_ITER,
    );
    d.alpha = AlphaSchedule::Constant(TSP_ALPHA);
    d
}

pub fn stepped_discrete_config() -> DiscreteConfig {
    let mut d = DiscreteConfig::new(
        DiscreteVariant::HammingBetaAlpha {
            gamma: STEPPED_GAMMA,
        },
        STEPPED_POPULATION,
        STEPPED_MAX_ITER,
    );
    d.alpha = AlphaSchedule::Constant(STEPPED_ALPHA);
    d
}

pub fn stepped_continuous_config() -> ContinuousConfig {
    ContinuousConfig::new(ContinuousParams {
        population: STEPPED_POPULATION,
        max_gen: STEPPED_MAX_ITER,
        ..ContinuousParams::default()
    })
}

fn replicate_runs(
    problems: &[(ProblemDescriptor, u64)],
    replicates: usize,
    runner: impl Fn(&ProblemDescriptor, u64) -> firefly_core::Result<TrialRecord> + Sync,
) -> Result<Vec<Vec<TrialRecord>>> {
    problems
        .par_iter()
        .map(|(p, instance_seed)| {
            (0..replicates)
                .map(|r| Ok(runner(p, derive_seed(*instance_seed, r as u64))?))
                .collect()
        })
        .collect()
}

/// Share of runs that reach each instance's optimum `oracles[k]`.
pub fn knapsack_check(instances: &[Arc<KnapsackInstance>], oracles: &[f64]) -> Result<CheckResult> {
    let cfg = knapsack_config();
    let problems: Vec<_> = instances
        .iter()
        .enumerate()
        .map(|(k, i)| (i.problem(), KNAPSACK_SEED_BASE + k as u64))
        .collect();
    let runs = replicate_runs(&problems, KNAPSACK_REPLICATES, |p, s| run(p, &cfg, s))?;
    let hits = count_hits(&runs, oracles, 0.0);
    Ok(CheckResult {
        name: "knapsack oracle",
        hits,
        runs: runs.iter().map(Vec::len).sum(),
        threshold: KNAPSACK_THRESHOLD,
        at_most: false,
    })
}

/// Share of runs ending within `TSP_GAP` of each instance's optimum.
pub fn tsp_check(instances: &[Arc<TspInstance>], oracles: &[f64]) -> Result<CheckResult> {
    let cfg = tsp_config();
    let problems: Vec<_> = instances
        .iter()
        .enumerate()
        .map(|(k, i)| (i.problem(), TSP_SEED_BASE + k as u64))
        .collect();
    let runs = replicate_runs(&problems, TSP_REPLICATES, |p, s| run_discrete(p, &cfg, s))?;
    let hits = count_hits(&runs, oracles, TSP_GAP);
    Ok(CheckResult {
        name: "tsp oracle",
        hits,
        runs: runs.iter().map(Vec::len).sum(),
        threshold: TSP_THRESHOLD,
        at_most: false,
    })
}

fn count_hits(runs: &[Vec<TrialRecord>], oracles: &[f64], tolerance: f64) -> usize {
    runs.iter()
        .zip(oracles)
        .map(|(recs, &o)| {
            recs.iter()
                .filter(|r| is_success(r.final_objective(), o, tolerance))
                .count()
        })
        .sum()
}

/// How often the discrete engine finds `integer_argmin` on the stepped
/// benchmark, and how often rounding the continuous engine's answer does.
pub fn stepped_check(integer_argmin: f64) -> Result<(CheckResult, CheckResult)> {
    let b = ContinuousBenchmark::SteppedIntegerDemo;
    let integer = b.problem(Encoding::Integer, 1)?;
    let real = b.problem(Encoding::Real, 1)?;
    let dcfg = stepped_discrete_config();
    let ccfg = stepped_continuous_config();
    let found: Vec<(bool, bool)> = (0..STEPPED_RUNS)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(STEPPED_MASTER_SEED, r as u64);
            let d = run_discrete(&integer, &dcfg, seed)?;
            let c = run(&real, &ccfg, seed)?;
            Ok((
                d.best.values[0] == integer_argmin,
                c.best.values[0].round() == integer_argmin,
            ))
        })
        .collect::<Result<_>>()?;
    let discrete = CheckResult {
        name: "stepped discrete engine finds integer argmin",
        hits: found.iter().filter(|f| f.0).count(),
        runs: STEPPED_RUNS,
        threshold: STEPPED_DISCRETE_THRESHOLD,
        at_most: false,
    };
    let rounded = CheckResult {
        name: "stepped rounded continuous answer finds integer argmin",
        hits: found.iter().filter(|f| f.1).count(),
        runs: STEPPED_RUNS,
        threshold: STEPPED_ROUNDED_CEILING,
        at_most: true,
    };
    Ok((discrete, rounded))
}

/// Every oracle comparison, with optima from the built-in exhaustive solvers.
pub fn run_bench() -> Result<Vec<CheckResult>> {
    let ks = knapsack_instances();
    let k_opt = ks
        .iter()
        .map(|k| Ok(k.brute_force()?.1))
        .collect::<Result<Vec<_>>>()?;
    let ts = tsp_instances();
    let t_opt = ts
        .iter()
        .map(|t| Ok(t.brute_force()?.1))
        .collect::<Result<Vec<_>>>()?;
    let table = firefly_core::problems::STEPPED_TABLE;
    let argmin = (0..table.len())
        .min_by(|&a, &b| table[a].total_cmp(&table[b]))
        .expect("table is not empty") as f64;
    let (d, c) = stepped_check(argmin)?;
    Ok(vec![
        knapsack_check(&ks, &k_opt)?,
        tsp_check(&ts, &t_opt)?,
        d,
        c,
    ])
}
