//! Fireflies moving directly in discrete spaces.

mod engine;
mod familiarity;
mod ops;

pub use engine::{
    elite_random_flight, local_search_brightest, rho_at, run_discrete, DiscreteConfig,
    DiscreteEngine, DiscreteVariant, ELITE_FLIGHT_PROBABILITY, ELITE_FRACTION, LOCAL_SEARCH_START,
};
pub use familiarity::FamiliarityMatrix;
pub use ops::{
    alpha_step, beta_bounded, beta_of_hamming, beta_step, bounded_inversion, different_arcs,
    draw_swap_count, elementary_neighbor, inversion_moves, knapsack_gate_probability,
    knapsack_move_gate, per_dim_update, random_inversion, swap_move, tsp_move_distance,
    visual_range_at, PerDimParams, SwapCount,
};
