//! Mapping continuous-space updates onto binary, integer and permutation
//! values.
//!
//! Transfer functions squash a real value into `[0, 1]`; a
//! [`BinarizationRule`] then turns that probability into a bit. Integers are
//! rounded, random keys are decoded by sorting.

use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::Bounds;
use crate::rng::RngStream;

/// S-shaped and V-shaped transfer functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransferFunction {
    S1,
    S2,
    S3,
    S4,
    /// `|erf(sqrt(2) / pi * v)|`.
    V1,
    /// `|erf(sqrt(pi) / 2 * v)|`, the constant more common in the literature.
    V1Conventional,
    V2,
    V3,
    V4,
    /// `0.5 * (1 + erf(v))`.
    ErfS,
}

impl TransferFunction {
    /// The nine functions of the transfer table, in column order.
    pub const TABLE: [TransferFunction; 9] = [
        TransferFunction::S1,
        TransferFunction::S2,
        TransferFunction::S3,
        TransferFunction::S4,
        TransferFunction::V1,
        TransferFunction::V2,
        TransferFunction::V3,
        TransferFunction::V4,
        TransferFunction::ErfS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransferFunction::S1 => "S1",
            TransferFunction::S2 => "S2",
            TransferFunction::S3 => "S3",
            TransferFunction::S4 => "S4",
            TransferFunction::V1 => "V1",
            TransferFunction::V1Conventional => "V1c",
            TransferFunction::V2 => "V2",
            TransferFunction::V3 => "V3",
            TransferFunction::V4 => "V4",
            TransferFunction::ErfS => "ErfS",
        }
    }

    pub fn is_s_shaped(self) -> bool {
        matches!(
            self,
            TransferFunction::S1
                | TransferFunction::S2
                | TransferFunction::S3
                | TransferFunction::S4
                | TransferFunction::ErfS
        )
    }

    pub fn apply(self, v: f64) -> f64 {
        transfer(self, v)
    }
}

impl fmt::Display for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransferFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "S1" => TransferFunction::S1,
            "S2" => TransferFunction::S2,
            "S3" => TransferFunction::S3,
            "S4" => TransferFunction::S4,
            "V1" => TransferFunction::V1,
            "V1c" => TransferFunction::V1Conventional,
            "V2" => TransferFunction::V2,
            "V3" => TransferFunction::V3,
            "V4" => TransferFunction::V4,
            "ErfS" => TransferFunction::ErfS,
            other => {
                return Err(Error::param(
                    "transfer",
                    format!("unknown transfer function `{other}`"),
                ))
            }
        })
    }
}

fn logistic(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Evaluates a transfer function. The result always lies in `[0, 1]`.
pub fn transfer(function: TransferFunction, v: f64) -> f64 {
    match function {
        TransferFunction::S1 => logistic(2.0 * v),
        TransferFunction::S2 => logistic(v),
        TransferFunction::S3 => logistic(v / 2.0),
        TransferFunction::S4 => logistic(v / 3.0),
        TransferFunction::V1 => libm::erf(SQRT_2 / PI * v).abs(),
        TransferFunction::V1Conventional => libm::erf(PI.sqrt() / 2.0 * v).abs(),
        TransferFunction::V2 => v.abs().tanh(),
        TransferFunction::V3 => (v / (1.0 + v * v).sqrt()).abs(),
        TransferFunction::V4 => (FRAC_2_PI * (PI / 2.0 * v).atan()).abs(),
        TransferFunction::ErfS => 0.5 * (1.0 + libm::erf(v)),
    }
}

/// How a transfer probability becomes a bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinarizationRule {
    /// 1 if `rand < t`, else 0.
    Probabilistic,
    /// The best-so-far bit if `rand < t`, else 0.
    EliteProbabilistic,
    /// The complement of the previous bit if `rand < t`, else the previous bit.
    ComplementProbabilistic,
    /// 1 if `tau < tanh(|raw|)`, else 0. Draws nothing.
    TanhThreshold { tau: f64 },
}

impl BinarizationRule {
    pub fn validate(&self) -> Result<()> {
        if let BinarizationRule::TanhThreshold { tau } = *self {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(Error::param(
                    "tau",
                    format!("must lie in (0, 1), got {tau}"),
                ));
            }
        }
        Ok(())
    }
}

/// Per-component inputs to [`binarize`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BitContext {
    /// The component's bit before the update.
    pub previous: Option<f64>,
    /// The component's bit in the best-so-far solution.
    pub best: Option<f64>,
    /// The continuous value the transfer function was applied to.
    pub raw: f64,
}

/// Converts transfer probability `t` into a bit, drawing one uniform when the
/// rule is randomized.
pub fn binarize(
    rule: BinarizationRule,
    t: f64,
    context: &BitContext,
    rng: &mut RngStream,
) -> Result<f64> {
    match rule {
        BinarizationRule::TanhThreshold { .. } => binarize_with(rule, t, context, 0.0),
        _ => binarize_with(rule, t, context, rng.uniform()),
    }
}

/// [`binarize`] with the uniform draw supplied by the caller.
pub fn binarize_with(rule: BinarizationRule, t: f64, context: &BitContext, u: f64) -> Result<f64> {
    let hit = u < t;
    match rule {
        BinarizationRule::Probabilistic => Ok(if hit { 1.0 } else { 0.0 }),
        BinarizationRule::EliteProbabilistic => {
            let best = context.best.ok_or_else(|| {
                Error::Contract("elite binarization needs the best-so-far bit".into())
            })?;
            Ok(if hit { best } else { 0.0 })
        }
        BinarizationRule::ComplementProbabilistic => {
            let prev = context.previous.ok_or_else(|| {
                Error::Contract("complement binarization needs the previous bit".into())
            })?;
            Ok(if hit { 1.0 - prev } else { prev })
        }
        BinarizationRule::TanhThreshold { tau } => {
            rule.validate()?;
            Ok(if tau < context.raw.abs().tanh() {
                1.0
            } else {
                0.0
            })
        }
    }
}

/// Decodes random keys into a 1-based permutation: entry `p` is the
/// (1-based) position holding the `p`-th smallest key. Ties keep index order.
pub fn decode_random_key(keys: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    order.into_iter().map(|i| i + 1).collect()
}

/// Rounds half away from zero, then clamps into the integers of `bounds`.
pub fn round_to_integer(x: &[f64], bounds: &[Bounds]) -> Vec<f64> {
    x.iter()
        .zip(bounds)
        .map(|(v, b)| b.integral().clamp(v.round()))
        .collect()
}

/// Probability `|tanh(lambda * r)|` that a firefly at distance `r` moves.
pub fn move_gate_probability(lambda: f64, r: f64) -> f64 {
    (lambda * r).tanh().abs()
}

/// `true` iff a fresh uniform falls below `|tanh(lambda * r)|`.
pub fn move_gate(lambda: f64, r: f64, rng: &mut RngStream) -> bool {
    rng.uniform() < move_gate_probability(lambda, r)
}

/// Combined attraction and binarization of one component:
/// `round(1 / (1 + exp(-x_i + rand * (x_i - x_j))) - 0.06)`.
pub fn mixed_binary_update(x_i: f64, x_j: f64, rng: &mut RngStream) -> f64 {
    mixed_binary_update_with(x_i, x_j, rng.uniform())
}

pub fn mixed_binary_update_with(x_i: f64, x_j: f64, u: f64) -> f64 {
    let s = 1.0 / (1.0 + (-x_i + u * (x_i - x_j)).exp());
    // round(-0.06) is -0.0
    (s - 0.06).round().abs()
}

/// Post-processing applied to a continuous update before it is stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Discretizer {
    /// Transfer each component, then binarize it.
    Binary {
        transfer: TransferFunction,
        rule: BinarizationRule,
    },
    /// Round to the nearest in-bounds integer.
    Round,
    /// Keep keys in `[0, 1]`; the objective decodes them.
    RandomKey,
}

impl Discretizer {
    /// Maps the raw update of one firefly onto its encoding.
    ///
    /// `previous` is the firefly before the update and `best` the best-so-far
    /// solution; both are only read by the binary rules that need them.
    pub fn apply(
        &self,
        raw: &[f64],
        previous: &[f64],
        best: &[f64],
        bounds: &[Bounds],
        rng: &mut RngStream,
    ) -> Result<Vec<f64>> {
        match *self {
            Discretizer::Binary { transfer: f, rule } => raw
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let ctx = BitContext {
                        previous: previous.get(k).copied(),
                        best: best.get(k).copied(),
                        raw: v,
                    };
                    binarize(rule, transfer(f, v), &ctx, rng)
                })
                .collect(),
            Discretizer::Round => Ok(round_to_integer(raw, bounds)),
            Discretizer::RandomKey => Ok(raw.iter().map(|v| v.clamp(0.0, 1.0)).collect()),
        }
    }
}
