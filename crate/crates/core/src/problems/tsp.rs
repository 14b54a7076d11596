use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::knapsack::{as_count, numbers};
use crate::discretize::decode_random_key;
use crate::error::{Error, Result};
use crate::model::{is_permutation, Bounds, Encoding, ProblemDescriptor};
use crate::rng::RngStream;

/// Largest city count [`TspInstance::brute_force`] will enumerate.
pub const TSP_ORACLE_LIMIT: usize = 9;

/// A symmetric travelling salesman instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    n: usize,
    dist: Vec<f64>,
}

impl TspInstance {
    /// Builds an instance from a row-major `n x n` matrix.
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if n < 2 {
            return Err(Error::param("cities", "need at least two cities"));
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: row.len(),
            });
        }
        for (i, row) in matrix.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(Error::param("distances", format!("d({i},{i}) must be 0")));
            }
            for (j, &d) in row.iter().enumerate() {
                if !(d.is_finite() && d >= 0.0) || d != matrix[j][i] {
                    return Err(Error::param(
                        "distances",
                        format!("d({i},{j}) must be finite, non-negative and symmetric"),
                    ));
                }
            }
        }
        Ok(Self {
            n,
            dist: matrix.into_iter().flatten().collect(),
        })
    }

    /// Cities uniform in the unit square, Euclidean distances.
    pub fn random_euclidean(n: usize, rng: &mut RngStream) -> Self {
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.uniform(), rng.uniform())).collect();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Self { n, dist }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Distance between 0-based cities `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Closed tour length of a 1-based tour.
    pub fn eval(&self, tour: &[f64]) -> Result<f64> {
        if tour.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: tour.len(),
            });
        }
        if !is_permutation(tour) {
            return Err(Error::EncodingViolation(format!("{tour:?} is not a tour")));
        }
        Ok(self.tour_length(tour.iter().map(|&c| c as usize - 1)))
    }

    fn tour_length(&self, cities: impl Iterator<Item = usize> + Clone) -> f64 {
        let mut next = cities.clone().cycle().skip(1);
        cities
            .map(|a| {
                let b = next.next().expect("cycle is infinite");
                self.distance(a, b)
            })
            .sum()
    }

    /// Permutation-encoded problem over this instance.
    pub fn problem(self: &Arc<Self>) -> ProblemDescriptor {
        let inst = Arc::clone(self);
        ProblemDescriptor::new(Encoding::Permutation, self.n, vec![], move |x: &[f64]| {
            inst.eval(x).unwrap_or(f64::INFINITY)
        })
        .expect("instance has at least two cities")
    }

    /// Random-key problem: keys are decoded into a tour before evaluation.
    pub fn random_key_problem(self: &Arc<Self>) -> ProblemDescriptor {
        let inst = Arc::clone(self);
        ProblemDescriptor::new(
            Encoding::RandomKey,
            self.n,
            vec![Bounds::UNIT; self.n],
            move |keys: &[f64]| {
                inst.tour_length(decode_random_key(keys).into_iter().map(|c| c - 1))
            },
        )
        .expect("instance has at least two cities")
    }

    /// Exact optimum over the `(n - 1)! / 2` distinct tours, fixing city 1
    /// first and skipping mirror images.
    pub fn brute_force(&self) -> Result<(Vec<f64>, f64)> {
        let n = self.n;
        if n > TSP_ORACLE_LIMIT {
            return Err(Error::TooLarge(format!(
                "TSP with {n} cities (limit {TSP_ORACLE_LIMIT})"
            )));
        }
        let mut rest: Vec<usize> = (1..n).collect();
        let mut best: Option<(Vec<usize>, f64)> = None;
        loop {
            // a tour and its reversal coincide; keep the one with rest[0] < rest[last]
            if rest.len() < 2 || rest[0] < rest[rest.len() - 1] {
                let tour = std::iter::once(0).chain(rest.iter().copied());
                let len = self.tour_length(tour);
                if best.as_ref().is_none_or(|(_, b)| len < *b) {
                    best = Some((rest.clone(), len));
                }
            }
            if !next_permutation(&mut rest) {
                break;
            }
        }
        let (rest, len) = best.expect("at least one tour");
        let tour = std::iter::once(1.0)
            .chain(rest.into_iter().map(|c| (c + 1) as f64))
            .collect();
        Ok((tour, len))
    }

    /// Parses `n` followed by `n` rows of `n` distances.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header `n`".into(),
        })?;
        let n = as_count(line, numbers(line, header, 1)?[0])?;
        let mut matrix = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, l) = lines.next().ok_or(Error::Parse {
                line: line + matrix.len() + 1,
                message: format!("expected {n} matrix rows, found {}", matrix.len()),
            })?;
            matrix.push(numbers(line, l, n)?);
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                message: "trailing data after the last row".into(),
            });
        }
        Self::new(matrix)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serializes in the format read by [`TspInstance::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.dist.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
        out
    }
}

/// Advances to the next lexicographic permutation; `false` after the last.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len())
        .rev()
        .find(|&j| v[j] > v[i])
        .expect("exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}
