//! Move operators that act directly on binary, integer and permutation
//! vectors.
//!
//! Permutations are kept feasible by assigning through swaps: writing value
//! `v` at position `k` swaps it with wherever `v` currently sits. Positions
//! where the two fireflies already agree are never touched by such a swap.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{Bounds, Encoding};
use crate::rng::RngStream;

fn same_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(())
}

fn require_discrete(encoding: Encoding, what: &'static str) -> Result<()> {
    if encoding.is_discrete() {
        Ok(())
    } else {
        Err(Error::IncompatibleEncoding { encoding, what })
    }
}

/// Writes `value` at position `k`, swapping for permutations.
pub(crate) fn assign(x: &mut [f64], k: usize, value: f64, encoding: Encoding) {
    if encoding == Encoding::Permutation {
        if let Some(p) = x.iter().position(|&v| v == value) {
            x.swap(k, p);
        }
    } else {
        x[k] = value;
    }
}

/// Attraction probability `1 / (1 + gamma * d^2)` at Hamming distance `d`.
pub fn beta_of_hamming(gamma: f64, d: usize) -> f64 {
    let d = d as f64;
    1.0 / (1.0 + gamma * d * d)
}

/// Copies each differing entry of `xj` into `xi` with probability `beta`.
pub fn beta_step(
    xi: &[f64],
    xj: &[f64],
    beta: f64,
    encoding: Encoding,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    beta_step_draws(xi, xj, beta, encoding, || rng.uniform())
}

pub(crate) fn beta_step_draws(
    xi: &[f64],
    xj: &[f64],
    beta: f64,
    encoding: Encoding,
    mut draw: impl FnMut() -> f64,
) -> Result<Vec<f64>> {
    same_len(xi, xj)?;
    require_discrete(encoding, "the beta step")?;
    let mut out = xi.to_vec();
    for k in 0..out.len() {
        if out[k] != xj[k] && draw() < beta {
            assign(&mut out, k, xj[k], encoding);
        }
    }
    Ok(out)
}

/// Rounded random perturbation `round(x + alpha * (u - 0.5))`, kept in
/// `bounds`; permutations are repaired by swapping.
pub fn alpha_step(
    xi: &[f64],
    alpha: f64,
    encoding: Encoding,
    bounds: &[Bounds],
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    alpha_step_draws(xi, alpha, encoding, bounds, || rng.uniform())
}

pub(crate) fn alpha_step_draws(
    xi: &[f64],
    alpha: f64,
    encoding: Encoding,
    bounds: &[Bounds],
    mut draw: impl FnMut() -> f64,
) -> Result<Vec<f64>> {
    require_discrete(encoding, "the alpha step")?;
    if bounds.len() != xi.len() {
        return Err(Error::DimensionMismatch {
            expected: xi.len(),
            actual: bounds.len(),
        });
    }
    let mut out = xi.to_vec();
    if alpha == 0.0 {
        return Ok(out);
    }
    for k in 0..out.len() {
        let target = bounds[k].clamp((out[k] + alpha * (draw() - 0.5)).round());
        if target != out[k] {
            assign(&mut out, k, target, encoding);
        }
    }
    Ok(out)
}

/// Copies `count` randomly chosen differing entries of `xj` into `xi`.
///
/// `count` is capped at the Hamming distance; identical vectors are returned
/// unchanged.
pub fn swap_move(
    xi: &[f64],
    xj: &[f64],
    count: usize,
    encoding: Encoding,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    same_len(xi, xj)?;
    require_discrete(encoding, "the swap move")?;
    if count == 0 {
        return Err(Error::param("count", "must be at least 1"));
    }
    let diffs: Vec<usize> = (0..xi.len()).filter(|&k| xi[k] != xj[k]).collect();
    let mut out = xi.to_vec();
    if diffs.is_empty() {
        return Ok(out);
    }
    let picked = rand::seq::index::sample(rng, diffs.len(), count.min(diffs.len()));
    for idx in picked {
        let k = diffs[idx];
        if out[k] != xj[k] {
            assign(&mut out, k, xj[k], encoding);
        }
    }
    Ok(out)
}

/// Which rule draws the number of copied entries for [`swap_move`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwapCount {
    /// Uniform on `[1, r]`.
    Fixed,
    /// Uniform on `[2, max(2, floor(r * gamma^itr))]`.
    Gamma { gamma: f64 },
}

/// Draws the number of entries to copy at Hamming distance `r`.
pub fn draw_swap_count(
    kind: SwapCount,
    r: usize,
    itr: usize,
    rng: &mut RngStream,
) -> Result<usize> {
    if r == 0 {
        return Err(Error::param("r", "distance must be at least 1"));
    }
    Ok(match kind {
        SwapCount::Fixed => rng.int_inclusive(1, r as i64) as usize,
        SwapCount::Gamma { gamma } => {
            let hi = ((r as f64) * gamma.powi(itr as i32)).floor();
            let hi = if hi.is_finite() {
                (hi as usize).max(2)
            } else {
                2
            };
            rng.int_inclusive(2, hi as i64) as usize
        }
    })
}

fn undirected_edges(tour: &[f64]) -> HashSet<(u64, u64)> {
    let n = tour.len();
    (0..n)
        .map(|k| {
            let a = tour[k] as u64;
            let b = tour[(k + 1) % n] as u64;
            (a.min(b), a.max(b))
        })
        .collect()
}

/// Number of undirected edges of `a`'s closed tour missing from `b`'s.
pub fn different_arcs(a: &[f64], b: &[f64]) -> Result<usize> {
    same_len(a, b)?;
    let eb = undirected_edges(b);
    Ok(undirected_edges(a).difference(&eb).count())
}

/// Tour distance `10 * A / n` with `A` the number of different arcs.
pub fn tsp_move_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    let arcs = different_arcs(a, b)?;
    Ok(10.0 * arcs as f64 / a.len() as f64)
}

/// Reverses `x[start..start + len]`.
fn invert(x: &[f64], start: usize, len: usize) -> Vec<f64> {
    let mut out = x.to_vec();
    out[start..start + len].reverse();
    out
}

/// One inversion of a uniformly chosen segment of two or more entries.
pub fn random_inversion(x: &[f64], rng: &mut RngStream) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return x.to_vec();
    }
    let a = rng.index(n);
    let mut b = rng.index(n - 1);
    if b >= a {
        b += 1;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    invert(x, lo, hi - lo + 1)
}

/// One inversion whose segment length is uniform on `[2, max_len]`.
pub fn bounded_inversion(x: &[f64], max_len: usize, rng: &mut RngStream) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return x.to_vec();
    }
    let max_len = max_len.clamp(2, n);
    let len = rng.int_inclusive(2, max_len as i64) as usize;
    let start = rng.index(n - len + 1);
    invert(x, start, len)
}

/// `m` candidate tours, each one inversion away from `xi`.
pub fn inversion_moves(xi: &[f64], m: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    (0..m).map(|_| random_inversion(xi, rng)).collect()
}

/// Visual range at iteration `itr`:
/// `3 (dv_max - dv_min) itr / (2 (max_iter - 1))` before two thirds of the
/// run, `dv_max` afterwards. The ramp is capped at `dv_max`.
pub fn visual_range_at(dv_min: f64, dv_max: f64, itr: usize, max_iter: usize) -> Result<f64> {
    if max_iter < 2 {
        return Err(Error::param(
            "max_iter",
            "visual range needs at least 2 iterations",
        ));
    }
    if !(dv_min < dv_max) {
        return Err(Error::param(
            "dv_min",
            format!("must be below dv_max ({dv_min} >= {dv_max})"),
        ));
    }
    let t = itr as f64;
    let m = max_iter as f64;
    Ok(if t < 2.0 * m / 3.0 {
        (3.0 * (dv_max - dv_min) * t / (2.0 * (m - 1.0))).min(dv_max)
    } else {
        dv_max
    })
}

/// Parameters of the per-dimension update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerDimParams {
    pub alpha: f64,
    pub beta0: f64,
    pub gamma: f64,
    /// Write 0 instead of keeping the entry when the fireflies agree on it
    /// (binary encodings only).
    pub literal_zero: bool,
}

/// Per-dimension copy: entry `k` takes `xj[k]` when
/// `alpha * |rand - 0.5| < beta0 * exp(-gamma * r^2)` and the entries differ.
pub fn per_dim_update(
    xi: &[f64],
    xj: &[f64],
    params: PerDimParams,
    r: f64,
    encoding: Encoding,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    per_dim_update_draws(xi, xj, params, r, encoding, || rng.uniform())
}

pub(crate) fn per_dim_update_draws(
    xi: &[f64],
    xj: &[f64],
    params: PerDimParams,
    r: f64,
    encoding: Encoding,
    mut draw: impl FnMut() -> f64,
) -> Result<Vec<f64>> {
    same_len(xi, xj)?;
    require_discrete(encoding, "the per-dimension update")?;
    if params.literal_zero && encoding != Encoding::Binary {
        return Err(Error::IncompatibleEncoding {
            encoding,
            what: "the literal-zero per-dimension update",
        });
    }
    let beta = params.beta0 * (-params.gamma * r * r).exp();
    let mut out = xi.to_vec();
    for k in 0..out.len() {
        let fires = params.alpha * (draw() - 0.5).abs() < beta;
        if !fires {
            continue;
        }
        if out[k] != xj[k] {
            assign(&mut out, k, xj[k], encoding);
        } else if params.literal_zero {
            out[k] = 0.0;
        }
    }
    Ok(out)
}

/// Probability `rank^(-((itr - 1) mod max_iter) / max_iter)` that a firefly
/// of the given rank moves. `itr` counts from 1.
pub fn knapsack_gate_probability(rank: usize, itr: usize, max_iter: usize) -> f64 {
    let phase = (itr as i64 - 1).rem_euclid(max_iter as i64) as f64;
    (rank as f64).powf(-phase / max_iter as f64)
}

pub fn knapsack_move_gate(
    rank: usize,
    itr: usize,
    max_iter: usize,
    rng: &mut RngStream,
) -> Result<bool> {
    if rank == 0 {
        return Err(Error::param("rank", "ranks start at 1"));
    }
    if max_iter == 0 {
        return Err(Error::param("max_iter", "must be at least 1"));
    }
    Ok(rng.uniform() < knapsack_gate_probability(rank, itr, max_iter))
}

/// Attractiveness `beta0 / (omega + r)`.
pub fn beta_bounded(beta0: f64, omega: f64, r: f64) -> f64 {
    beta0 / (omega + r)
}

/// A single elementary neighbour: one bit flip, one unit step on an integer
/// coordinate, or one segment inversion of a permutation.
pub fn elementary_neighbor(
    x: &[f64],
    encoding: Encoding,
    bounds: &[Bounds],
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    match encoding {
        Encoding::Binary => {
            let k = rng.index(x.len());
            out[k] = 1.0 - out[k];
        }
        Encoding::Integer => {
            let k = rng.index(x.len());
            let step = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
            out[k] = bounds[k].clamp(out[k] + step);
        }
        Encoding::Permutation => out = random_inversion(x, rng),
        other => {
            return Err(Error::IncompatibleEncoding {
                encoding: other,
                what: "elementary neighbour moves",
            })
        }
    }
    Ok(out)
}
