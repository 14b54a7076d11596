//! Firefly algorithms for continuous, discretized and natively discrete
//! search spaces, with benchmark problems and exact reference solvers.
//!
//! All problems are minimized: a firefly is brighter when its objective is
//! smaller.

pub mod continuous;
pub mod discrete;
pub mod discretize;
pub mod distance;
pub mod error;
pub mod model;
pub mod problems;
pub mod record;
pub mod rng;
pub mod schedules;

pub use continuous::{
    run, ContinuousConfig, ContinuousEngine, ContinuousParams, MoveRule, UpdateMode,
};
pub use discrete::{run_discrete, DiscreteConfig, DiscreteEngine, DiscreteVariant};
pub use discretize::{BinarizationRule, Discretizer, TransferFunction};
pub use error::{Error, Result};
pub use model::{Bounds, Encoding, Objective, ProblemDescriptor, Solution, Swarm};
pub use record::TrialRecord;
pub use rng::{derive_seed, RngStream};
pub use schedules::{AlphaSchedule, GammaSchedule, RandomDirection};
