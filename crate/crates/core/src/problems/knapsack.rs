use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Encoding, ProblemDescriptor};
use crate::rng::RngStream;

/// Largest item count [`KnapsackInstance::brute_force`] will enumerate.
pub const KNAPSACK_ORACLE_LIMIT: usize = 20;

/// A 0/1 knapsack instance.
#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackInstance {
    values: Vec<f64>,
    weights: Vec<f64>,
    capacity: f64,
}

impl KnapsackInstance {
    pub fn new(values: Vec<f64>, weights: Vec<f64>, capacity: f64) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                actual: weights.len(),
            });
        }
        if values.is_empty() {
            return Err(Error::param("items", "need at least one item"));
        }
        if let Some(v) = values
            .iter()
            .chain(&weights)
            .find(|v| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::param(
                "items",
                format!("values and weights must be positive, got {v}"),
            ));
        }
        if !(capacity.is_finite() && capacity > 0.0) {
            return Err(Error::param(
                "capacity",
                format!("must be positive, got {capacity}"),
            ));
        }
        Ok(Self {
            values,
            weights,
            capacity,
        })
    }

    pub fn random(n: usize, rng: &mut RngStream) -> Self {
        let mut draw = || 1.0 + 99.0 * rng.uniform();
        let values: Vec<f64> = (0..n).map(|_| draw()).collect();
        let weights: Vec<f64> = (0..n).map(|_| draw()).collect();
        let capacity = weights.iter().sum::<f64>() / 2.0;
        Self {
            values,
            weights,
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Penalty coefficient: the sum of all item values.
    pub fn penalty(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Minimization objective of a selection.
    ///
    /// Feasible selections score `-value`. Overweight ones score
    /// `-value + M * (1 + overweight)` with `M` the sum of all values, which
    /// is strictly positive and hence worse than every feasible selection.
    pub fn eval(&self, bits: &[f64]) -> f64 {
        let (value, weight) = bits
            .iter()
            .zip(self.values.iter().zip(&self.weights))
            .filter(|(b, _)| **b != 0.0)
            .fold((0.0, 0.0), |(v, w), (_, (vi, wi))| (v + vi, w + wi));
        if weight <= self.capacity {
            -value
        } else {
            -value + self.penalty() * (1.0 + (weight - self.capacity))
        }
    }

    /// `true` when the selection fits into the knapsack.
    pub fn is_feasible(&self, bits: &[f64]) -> bool {
        let weight: f64 = bits
            .iter()
            .zip(&self.weights)
            .filter(|(b, _)| **b != 0.0)
            .map(|(_, w)| w)
            .sum();
        weight <= self.capacity
    }

    /// Binary-encoded problem over this instance.
    pub fn problem(self: &Arc<Self>) -> ProblemDescriptor {
        let inst = Arc::clone(self);
        ProblemDescriptor::new(Encoding::Binary, self.len(), vec![], move |x: &[f64]| {
            inst.eval(x)
        })
        .expect("instance has at least one item")
    }

    /// Exact optimum by enumerating all `2^n` selections.
    pub fn brute_force(&self) -> Result<(Vec<f64>, f64)> {
        let n = self.len();
        if n > KNAPSACK_ORACLE_LIMIT {
            return Err(Error::TooLarge(format!(
                "knapsack with {n} items (limit {KNAPSACK_ORACLE_LIMIT})"
            )));
        }
        let mut best_mask = 0u32;
        let mut best_value = 0.0;
        for mask in 1u32..(1 << n) {
            let mut value = 0.0;
            let mut weight = 0.0;
            for k in 0..n {
                if mask & (1 << k) != 0 {
                    value += self.values[k];
                    weight += self.weights[k];
                }
            }
            if weight <= self.capacity && value > best_value {
                best_value = value;
                best_mask = mask;
            }
        }
        let bits: Vec<f64> = (0..n)
            .map(|k| if best_mask & (1 << k) != 0 { 1.0 } else { 0.0 })
            .collect();
        let objective = self.eval(&bits);
        Ok((bits, objective))
    }

    /// Parses `n capacity` followed by `n` lines of `value weight`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header `n capacity`".into(),
        })?;
        let header = numbers(line, header, 2)?;
        let n = as_count(line, header[0])?;
        let capacity = header[1];
        let mut values = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, l) = lines.next().ok_or(Error::Parse {
                line: line + values.len() + 1,
                message: format!("expected {n} item lines, found {}", values.len()),
            })?;
            let item = numbers(line, l, 2)?;
            values.push(item[0]);
            weights.push(item[1]);
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                message: "trailing data after the last item".into(),
            });
        }
        Self::new(values, weights, capacity)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serializes in the format read by [`KnapsackInstance::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.len(), self.capacity);
        for (v, w) in self.values.iter().zip(&self.weights) {
            let _ = writeln!(out, "{v} {w}");
        }
        out
    }
}

pub(crate) fn numbers(line: usize, text: &str, expected: usize) -> Result<Vec<f64>> {
    let parsed = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("`{tok}` is not a number"),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    if parsed.len() != expected {
        return Err(Error::Parse {
            line,
            message: format!("expected {expected} fields, found {}", parsed.len()),
        });
    }
    Ok(parsed)
}

pub(crate) fn as_count(line: usize, v: f64) -> Result<usize> {
    if v.fract() != 0.0 || v < 1.0 {
        return Err(Error::Parse {
            line,
            message: format!("`{v}` is not a positive count"),
        });
    }
    Ok(v as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_items() -> KnapsackInstance {
        KnapsackInstance::new(vec![2.0, 3.0], vec![3.0, 4.0], 4.0).unwrap()
    }

    #[test]
    fn eval_examples() {
        let k = two_items();
        assert_eq!(k.eval(&[0.0, 0.0]), 0.0);
        let single = KnapsackInstance::new(vec![7.0], vec![2.0], 5.0).unwrap();
        assert_eq!(single.eval(&[1.0]), -7.0);
        assert!(k.eval(&[1.0, 1.0]) > k.eval(&[0.0, 1.0]));
        assert_eq!(k.eval(&[0.0, 1.0]), -3.0);
    }

    #[test]
    fn brute_force_small() {
        let single = KnapsackInstance::new(vec![7.0], vec![2.0], 5.0).unwrap();
        assert_eq!(single.brute_force().unwrap(), (vec![1.0], -7.0));
        assert_eq!(two_items().brute_force().unwrap(), (vec![0.0, 1.0], -3.0));
        let mut rng = RngStream::new(1);
        let big = KnapsackInstance::random(21, &mut rng);
        assert!(matches!(big.brute_force(), Err(Error::TooLarge(_))));
    }

    #[test]
    fn brute_force_dominates_random_samples() {
        let mut rng = RngStream::new(99);
        let inst = KnapsackInstance::random(10, &mut rng);
        let (_, opt) = inst.brute_force().unwrap();
        for _ in 0..10_000 {
            let bits: Vec<f64> = (0..10)
                .map(|_| if rng.uniform() < 0.5 { 1.0 } else { 0.0 })
                .collect();
            if inst.is_feasible(&bits) {
                assert!(opt <= inst.eval(&bits));
            }
        }
    }

    #[test]
    fn random_instance_construction() {
        let a = KnapsackInstance::random(12, &mut RngStream::new(5));
        let b = KnapsackInstance::random(12, &mut RngStream::new(5));
        assert_eq!(a, b);
        assert!(a.capacity() < a.weights().iter().sum::<f64>());
        assert!(a
            .values()
            .iter()
            .chain(a.weights())
            .all(|v| (1.0..=100.0).contains(v)));
    }

    #[test]
    fn text_round_trip_and_errors() {
        let inst = KnapsackInstance::random(6, &mut RngStream::new(3));
        assert_eq!(KnapsackInstance::parse(&inst.to_text()).unwrap(), inst);
        assert!(matches!(
            KnapsackInstance::parse("2 10\n1 2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            KnapsackInstance::parse("1 10\n1 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(KnapsackInstance::parse("1 10\n1 2\n3 4\n").is_err());
        assert!(KnapsackInstance::parse("1 -1\n1 2\n").is_err());
    }
}
