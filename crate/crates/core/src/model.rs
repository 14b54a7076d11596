//! Problem model shared by every engine: encodings, solutions, the swarm,
//! brightness comparison and ranking.
//!
//! Everything is a minimization problem. A firefly is brighter than another
//! exactly when its objective value is strictly smaller; no separate light
//! intensity is ever computed.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// How the values of a [`Solution`] are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// Unconstrained reals inside box bounds.
    Real,
    /// Bits stored as `0.0` / `1.0`.
    Binary,
    /// Whole numbers inside integer box bounds.
    Integer,
    /// A bijection of `{1, ..., n}`.
    Permutation,
    /// Keys in `[0, 1]` whose ascending order encodes a permutation.
    RandomKey,
}

impl Encoding {
    pub fn is_discrete(self) -> bool {
        matches!(
            self,
            Encoding::Binary | Encoding::Integer | Encoding::Permutation
        )
    }
}

/// Closed interval `[lower, upper]` for one coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const UNIT: Bounds = Bounds {
        lower: 0.0,
        upper: 1.0,
    };

    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::param(
                "bounds",
                format!("need finite lower < upper, got [{lower}, {upper}]"),
            ));
        }
        Ok(Self { lower, upper })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }

    /// The bounds tightened to the integers they contain.
    pub fn integral(&self) -> Bounds {
        Bounds {
            lower: self.lower.ceil(),
            upper: self.upper.floor(),
        }
    }
}

/// An objective function to be minimized.
pub trait Objective: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Dimension, encoding, feasible box and objective of a minimization problem.
#[derive(Clone)]
pub struct ProblemDescriptor {
    dimension: usize,
    encoding: Encoding,
    bounds: Vec<Bounds>,
    objective: Arc<dyn Objective>,
}

impl fmt::Debug for ProblemDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDescriptor")
            .field("dimension", &self.dimension)
            .field("encoding", &self.encoding)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

impl ProblemDescriptor {
    /// Builds a descriptor. `bounds` must have one entry per dimension for
    /// `Real` and `Integer` encodings; it is ignored for `Binary` and
    /// `Permutation`, and fixed to `[0, 1]` for `RandomKey`.
    pub fn new(
        encoding: Encoding,
        dimension: usize,
        bounds: Vec<Bounds>,
        objective: impl Objective + 'static,
    ) -> Result<Self> {
        Self::with_shared(encoding, dimension, bounds, Arc::new(objective))
    }

    pub fn with_shared(
        encoding: Encoding,
        dimension: usize,
        bounds: Vec<Bounds>,
        objective: Arc<dyn Objective>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::param("dimension", "must be at least 1"));
        }
        let bounds = match encoding {
            Encoding::Real | Encoding::Integer => {
                if bounds.len() != dimension {
                    return Err(Error::DimensionMismatch {
                        expected: dimension,
                        actual: bounds.len(),
                    });
                }
                for b in &bounds {
                    Bounds::new(b.lower, b.upper)?;
                }
                if encoding == Encoding::Integer {
                    if let Some(b) = bounds.iter().find(|b| {
                        let i = b.integral();
                        i.lower > i.upper
                    }) {
                        return Err(Error::param(
                            "bounds",
                            format!("[{}, {}] contains no integer", b.lower, b.upper),
                        ));
                    }
                    bounds.iter().map(Bounds::integral).collect()
                } else {
                    bounds
                }
            }
            Encoding::Binary => vec![Bounds::UNIT; dimension],
            Encoding::RandomKey => vec![Bounds::UNIT; dimension],
            Encoding::Permutation => vec![
                Bounds {
                    lower: 1.0,
                    upper: dimension as f64,
                };
                dimension
            ],
        };
        Ok(Self {
            dimension,
            encoding,
            bounds,
            objective,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    /// Per-coordinate bounds. Binary and random-key problems report `[0, 1]`,
    /// permutations report `[1, n]`.
    pub fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    pub fn objective(&self) -> &Arc<dyn Objective> {
        &self.objective
    }

    /// Checks that `values` is a feasible point of this problem's encoding.
    pub fn check(&self, values: &[f64]) -> Result<()> {
        check_encoding(self.encoding, &self.bounds, values)
    }
}

/// Checks the encoding invariants of `values` against `bounds`.
pub fn check_encoding(encoding: Encoding, bounds: &[Bounds], values: &[f64]) -> Result<()> {
    if values.len() != bounds.len() {
        return Err(Error::DimensionMismatch {
            expected: bounds.len(),
            actual: values.len(),
        });
    }
    let violation = |k: usize, v: f64, what: &str| {
        Err(Error::EncodingViolation(format!(
            "value {v} at index {k} is not {what}"
        )))
    };
    match encoding {
        Encoding::Real | Encoding::RandomKey => {
            for (k, (&v, b)) in values.iter().zip(bounds).enumerate() {
                if !v.is_finite() || !b.contains(v) {
                    return violation(k, v, "finite and within bounds");
                }
            }
        }
        Encoding::Binary => {
            for (k, &v) in values.iter().enumerate() {
                if v != 0.0 && v != 1.0 {
                    return violation(k, v, "a bit");
                }
            }
        }
        Encoding::Integer => {
            for (k, (&v, b)) in values.iter().zip(bounds).enumerate() {
                if v.fract() != 0.0 || !b.contains(v) {
                    return violation(k, v, "an integer within bounds");
                }
            }
        }
        Encoding::Permutation => {
            if !is_permutation(values) {
                return Err(Error::EncodingViolation(format!(
                    "{values:?} is not a permutation of 1..={}",
                    values.len()
                )));
            }
        }
    }
    Ok(())
}

/// True when `values` is a bijection of `{1, ..., len}`.
pub fn is_permutation(values: &[f64]) -> bool {
    let n = values.len();
    let mut seen = vec![false; n];
    for &v in values {
        if v.fract() != 0.0 || v < 1.0 || v > n as f64 {
            return false;
        }
        let slot = &mut seen[v as usize - 1];
        if *slot {
            return false;
        }
        *slot = true;
    }
    true
}

/// A firefly: a point of the search space and its cached objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: Vec<f64>,
    pub objective: Option<f64>,
}

impl Solution {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            objective: None,
        }
    }

    pub fn evaluated(values: Vec<f64>, objective: f64) -> Self {
        Self {
            values,
            objective: Some(objective),
        }
    }

    /// Cached objective value, or `f64::INFINITY` if never evaluated.
    pub fn fitness(&self) -> f64 {
        self.objective.unwrap_or(f64::INFINITY)
    }
}

/// Evaluates `solution` on `problem`, caches and returns the objective.
pub fn evaluate(problem: &ProblemDescriptor, solution: &mut Solution) -> Result<f64> {
    problem.check(&solution.values)?;
    let f = problem.objective.value(&solution.values);
    if f.is_nan() {
        return Err(Error::InvalidObjective(f));
    }
    solution.objective = Some(f);
    Ok(f)
}

/// `true` iff `f_a` is strictly brighter (smaller) than `f_b`.
pub fn is_brighter(f_a: f64, f_b: f64) -> Result<bool> {
    if f_a.is_nan() {
        return Err(Error::InvalidObjective(f_a));
    }
    if f_b.is_nan() {
        return Err(Error::InvalidObjective(f_b));
    }
    Ok(f_a < f_b)
}

/// Member indices ordered from brightest to dimmest, ties by index.
pub fn brightness_order(objectives: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..objectives.len()).collect();
    order.sort_by(|&a, &b| objectives[a].total_cmp(&objectives[b]));
    order
}

/// Ranks of every member, 1 = brightest. Ties go to the lower index.
pub fn rank(population: &[Solution]) -> Result<Vec<usize>> {
    let objectives = population
        .iter()
        .enumerate()
        .map(|(index, s)| match s.objective {
            Some(f) if f.is_nan() => Err(Error::InvalidObjective(f)),
            Some(f) => Ok(f),
            None => Err(Error::Unevaluated { index }),
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ranks_of(&objectives))
}

pub(crate) fn ranks_of(objectives: &[f64]) -> Vec<usize> {
    let mut ranks = vec![0; objectives.len()];
    for (r, i) in brightness_order(objectives).into_iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

/// Projects every coordinate onto its bounds.
pub fn clamp_to_bounds(x: &mut [f64], bounds: &[Bounds]) {
    for (v, b) in x.iter_mut().zip(bounds) {
        *v = b.clamp(*v);
    }
}

/// The population, the iteration counter and the best solution ever seen.
#[derive(Debug, Clone)]
pub struct Swarm {
    pub members: Vec<Solution>,
    pub iteration: usize,
    pub max_iter: usize,
    pub best: Solution,
    pub evaluations: u64,
}

impl Swarm {
    /// Builds a swarm from evaluated members.
    pub fn from_members(members: Vec<Solution>, max_iter: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::param("population", "must be at least 1"));
        }
        let ranks = rank(&members)?;
        let best_idx = ranks.iter().position(|&r| r == 1).unwrap_or(0);
        Ok(Self {
            best: members[best_idx].clone(),
            evaluations: members.len() as u64,
            members,
            iteration: 0,
            max_iter,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.members.iter().map(Solution::fitness).collect()
    }

    /// Evaluates member `i` in place, counts the evaluation and updates the
    /// best-so-far record.
    pub fn evaluate_member(&mut self, problem: &ProblemDescriptor, i: usize) -> Result<f64> {
        let f = evaluate(problem, &mut self.members[i])?;
        self.evaluations += 1;
        if f < self.best.fitness() {
            self.best = self.members[i].clone();
        }
        Ok(f)
    }

    /// Evaluates a candidate that is not (yet) a member.
    pub fn evaluate_candidate(
        &mut self,
        problem: &ProblemDescriptor,
        candidate: &mut Solution,
    ) -> Result<f64> {
        let f = evaluate(problem, candidate)?;
        self.evaluations += 1;
        if f < self.best.fitness() {
            self.best = candidate.clone();
        }
        Ok(f)
    }

    /// Index of the currently brightest member (lowest index on ties).
    pub fn brightest(&self) -> usize {
        brightness_order(&self.objectives())[0]
    }
}

/// Draws one random feasible point.
pub fn random_point(problem: &ProblemDescriptor, rng: &mut RngStream) -> Vec<f64> {
    let n = problem.dimension();
    match problem.encoding() {
        Encoding::Real | Encoding::RandomKey => problem
            .bounds()
            .iter()
            .map(|b| b.lower + rng.uniform() * b.width())
            .collect(),
        Encoding::Integer => problem
            .bounds()
            .iter()
            .map(|b| rng.int_inclusive(b.lower as i64, b.upper as i64) as f64)
            .collect(),
        Encoding::Binary => (0..n)
            .map(|_| if rng.uniform() < 0.5 { 1.0 } else { 0.0 })
            .collect(),
        Encoding::Permutation => {
            let mut p: Vec<f64> = (1..=n).map(|v| v as f64).collect();
            p.shuffle(rng);
            p
        }
    }
}

/// Draws and evaluates `n` random feasible fireflies.
pub fn init_population(
    problem: &ProblemDescriptor,
    n: usize,
    max_iter: usize,
    rng: &mut RngStream,
) -> Result<Swarm> {
    if n == 0 {
        return Err(Error::param("population", "must be at least 1"));
    }
    let members = (0..n)
        .map(|_| {
            let mut s = Solution::new(random_point(problem, rng));
            evaluate(problem, &mut s)?;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    Swarm::from_members(members, max_iter)
}
