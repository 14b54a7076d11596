use std::time::{Duration, Instant};

use crate::model::{Solution, Swarm};

/// Outcome of one seeded run.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub replicate: usize,
    pub seed: u64,
    /// Best-so-far objective after initialization and after every iteration;
    /// `max_iter + 1` entries.
    pub best_trace: Vec<f64>,
    /// Cumulative evaluation count aligned with `best_trace`.
    pub evaluation_trace: Vec<u64>,
    pub best: Solution,
    pub evaluations: u64,
    pub elapsed: Duration,
}

impl TrialRecord {
    pub fn final_objective(&self) -> f64 {
        self.best.fitness()
    }

    /// Equality of everything except the wall-clock time.
    pub fn same_outcome(&self, other: &TrialRecord) -> bool {
        self.replicate == other.replicate
            && self.seed == other.seed
            && self.best_trace == other.best_trace
            && self.evaluation_trace == other.evaluation_trace
            && self.best == other.best
            && self.evaluations == other.evaluations
    }
}

/// Accumulates the per-iteration trace of a run.
pub(crate) struct Recorder {
    seed: u64,
    start: Instant,
    best_trace: Vec<f64>,
    evaluation_trace: Vec<u64>,
}

impl Recorder {
    pub(crate) fn start(seed: u64, swarm: &Swarm) -> Self {
        let mut r = Self {
            seed,
            start: Instant::now(),
            best_trace: Vec::with_capacity(swarm.max_iter + 1),
            evaluation_trace: Vec::with_capacity(swarm.max_iter + 1),
        };
        r.record(swarm);
        r
    }

    pub(crate) fn record(&mut self, swarm: &Swarm) {
        self.best_trace.push(swarm.best.fitness());
        self.evaluation_trace.push(swarm.evaluations);
    }

    pub(crate) fn finish(self, swarm: Swarm) -> TrialRecord {
        TrialRecord {
            replicate: 0,
            seed: self.seed,
            best_trace: self.best_trace,
            evaluation_trace: self.evaluation_trace,
            evaluations: swarm.evaluations,
            best: swarm.best,
            elapsed: self.start.elapsed(),
        }
    }
}
