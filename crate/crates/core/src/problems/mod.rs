//! Benchmark problems, instance files and exhaustive oracles.

mod benchmarks;
mod knapsack;
mod tsp;

pub use benchmarks::{ContinuousBenchmark, STEPPED_TABLE};
pub use knapsack::{KnapsackInstance, KNAPSACK_ORACLE_LIMIT};
pub use tsp::{TspInstance, TSP_ORACLE_LIMIT};

use crate::rng::RngStream;

/// Kinds of randomly generated combinatorial instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Knapsack,
    Tsp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Knapsack(KnapsackInstance),
    Tsp(TspInstance),
}

/// Generates a random instance, deterministic in `seed`.
///
/// Knapsack values and weights are uniform on `[1, 100]` with capacity half
/// the total weight. TSP cities are uniform in the unit square with Euclidean
/// distances.
pub fn random_instance(kind: InstanceKind, size: usize, seed: u64) -> Instance {
    let mut rng = RngStream::new(seed);
    match kind {
        InstanceKind::Knapsack => Instance::Knapsack(KnapsackInstance::random(size, &mut rng)),
        InstanceKind::Tsp => Instance::Tsp(TspInstance::random_euclidean(size, &mut rng)),
    }
}
