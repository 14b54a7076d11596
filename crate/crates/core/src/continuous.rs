//! The standard firefly algorithm on real-valued vectors, and its
//! continuous-then-discretize variants for binary, integer and random-key
//! encodings.
//!
//! One generation visits the fireflies from dimmest to brightest. Each one
//! moves towards every strictly brighter firefly in turn and is re-evaluated
//! after every move, so later comparisons see the updated objective. A firefly
//! with no brighter partner, which always includes the brightest one, takes a
//! purely random step.

use crate::discretize::{mixed_binary_update, move_gate, Discretizer};
use crate::distance::{euclidean, squared_euclidean};
use crate::error::{Error, Result};
use crate::model::{
    brightness_order, clamp_to_bounds, init_population, is_brighter, Bounds, Encoding,
    ProblemDescriptor, Solution, Swarm,
};
use crate::record::{Recorder, TrialRecord};
use crate::rng::RngStream;
use crate::schedules::{AlphaSchedule, AlphaTracker, GammaSchedule, RandomDirection};

/// Attractiveness `beta0 * exp(-gamma * r^2)` at distance `r`.
pub fn attractiveness(beta0: f64, gamma: f64, r: f64) -> f64 {
    beta0 * (-gamma * r * r).exp()
}

/// Static parameters of the standard algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousParams {
    /// Attractiveness at distance zero.
    pub beta0: f64,
    /// Light absorption coefficient.
    pub gamma: f64,
    /// Randomness step length.
    pub alpha: f64,
    pub population: usize,
    pub max_gen: usize,
}

impl Default for ContinuousParams {
    fn default() -> Self {
        Self {
            beta0: 1.0,
            gamma: 1.0,
            alpha: 0.2,
            population: 25,
            max_gen: 100,
        }
    }
}

impl ContinuousParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta0.is_finite() && self.beta0 > 0.0) {
            return Err(Error::param(
                "beta0",
                format!("must be positive, got {}", self.beta0),
            ));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::param(
                "gamma",
                format!("must be >= 0, got {}", self.gamma),
            ));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::param(
                "alpha",
                format!("must be >= 0, got {}", self.alpha),
            ));
        }
        if self.population == 0 {
            return Err(Error::param("population", "must be at least 1"));
        }
        if self.max_gen == 0 {
            return Err(Error::param("max_gen", "must be at least 1"));
        }
        Ok(())
    }

    pub fn step(&self) -> StepParams {
        StepParams {
            beta0: self.beta0,
            gamma: self.gamma,
            alpha: self.alpha,
        }
    }
}

/// Parameter values in force for one move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub beta0: f64,
    pub gamma: f64,
    pub alpha: f64,
}

/// `clamp(xi + alpha * dir)` for a pre-drawn direction.
pub fn move_random_with(xi: &[f64], alpha: f64, dir: &[f64], bounds: &[Bounds]) -> Vec<f64> {
    let mut out: Vec<f64> = xi.iter().zip(dir).map(|(x, d)| x + alpha * d).collect();
    clamp_to_bounds(&mut out, bounds);
    out
}

/// Random exploration step `xi + alpha * (u - 0.5)`, clamped to `bounds`.
pub fn move_random(
    xi: &[f64],
    alpha: f64,
    bounds: &[Bounds],
    direction: &RandomDirection,
    rng: &mut RngStream,
) -> Vec<f64> {
    let dir = direction.draw(xi.len(), bounds, rng);
    move_random_with(xi, alpha, &dir, bounds)
}

/// Attraction plus exploration for a pre-drawn direction.
pub fn move_towards_with(
    xi: &[f64],
    xj: &[f64],
    step: StepParams,
    dir: &[f64],
    bounds: &[Bounds],
) -> Vec<f64> {
    let beta = step.beta0 * (-step.gamma * squared_euclidean(xi, xj)).exp();
    let mut out: Vec<f64> = xi
        .iter()
        .zip(xj)
        .zip(dir)
        .map(|((a, b), d)| a + beta * (b - a) + step.alpha * d)
        .collect();
    clamp_to_bounds(&mut out, bounds);
    out
}

/// Moves `xi` towards the strictly brighter `xj`.
pub fn move_towards(
    xi: &Solution,
    xj: &Solution,
    step: StepParams,
    bounds: &[Bounds],
    direction: &RandomDirection,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let (fi, fj) = match (xi.objective, xj.objective) {
        (Some(fi), Some(fj)) => (fi, fj),
        _ => return Err(Error::Contract("both fireflies must be evaluated".into())),
    };
    if !is_brighter(fj, fi)? {
        return Err(Error::Contract(format!(
            "target ({fj}) is not brighter than the moving firefly ({fi})"
        )));
    }
    if xi.values.len() != xj.values.len() {
        return Err(Error::DimensionMismatch {
            expected: xi.values.len(),
            actual: xj.values.len(),
        });
    }
    let dir = direction.draw(xi.values.len(), bounds, rng);
    Ok(move_towards_with(
        &xi.values, &xj.values, step, &dir, bounds,
    ))
}

/// How a firefly moves towards a brighter one.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MoveRule {
    /// Attraction plus random step.
    #[default]
    Standard,
    /// Standard move performed only with probability `|tanh(lambda * r)|`.
    Gated { lambda: f64 },
    /// Per-bit logistic update on binary encodings.
    MixedBinary,
}

/// Whether moves within a generation see each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateMode {
    /// In place and sequential; later moves see earlier ones.
    #[default]
    Asynchronous,
    /// Every firefly moves against the positions at the start of the
    /// generation and is evaluated once afterwards.
    Synchronous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousConfig {
    pub params: ContinuousParams,
    /// Overrides `params.alpha` when set.
    pub alpha_schedule: Option<AlphaSchedule>,
    /// Overrides `params.gamma` when set.
    pub gamma_schedule: Option<GammaSchedule>,
    pub direction: RandomDirection,
    pub move_rule: MoveRule,
    /// Required for binary and integer encodings.
    pub discretizer: Option<Discretizer>,
    pub update: UpdateMode,
    /// Whether the brightest firefly takes the random step every generation.
    pub brightest_random_move: bool,
}

impl Default for ContinuousConfig {
    fn default() -> Self {
        Self::new(ContinuousParams::default())
    }
}

impl ContinuousConfig {
    pub fn new(params: ContinuousParams) -> Self {
        Self {
            params,
            alpha_schedule: None,
            gamma_schedule: None,
            direction: RandomDirection::default(),
            move_rule: MoveRule::Standard,
            discretizer: None,
            update: UpdateMode::Asynchronous,
            brightest_random_move: true,
        }
    }

    pub fn validate_for(&self, problem: &ProblemDescriptor) -> Result<()> {
        self.params.validate()?;
        if let Some(s) = &self.alpha_schedule {
            s.validate()?;
        }
        if let Some(s) = &self.gamma_schedule {
            s.validate()?;
        }
        self.direction.validate()?;
        if let MoveRule::Gated { lambda } = self.move_rule {
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(Error::param(
                    "lambda",
                    format!("must be positive, got {lambda}"),
                ));
            }
        }
        if let Some(Discretizer::Binary { rule, .. }) = &self.discretizer {
            rule.validate()?;
        }
        let encoding = problem.encoding();
        let ok = matches!(
            (encoding, &self.discretizer),
            (Encoding::Real, None)
                | (Encoding::RandomKey, None | Some(Discretizer::RandomKey))
                | (Encoding::Binary, Some(Discretizer::Binary { .. }))
                | (Encoding::Integer, Some(Discretizer::Round))
        );
        if !ok {
            return Err(Error::IncompatibleEncoding {
                encoding,
                what: match self.discretizer {
                    None => "the continuous engine without a discretizer",
                    Some(Discretizer::Binary { .. }) => "binary discretization",
                    Some(Discretizer::Round) => "integer rounding",
                    Some(Discretizer::RandomKey) => "random-key discretization",
                },
            });
        }
        if self.move_rule == MoveRule::MixedBinary && encoding != Encoding::Binary {
            return Err(Error::IncompatibleEncoding {
                encoding,
                what: "the mixed binary update",
            });
        }
        Ok(())
    }
}

/// Runs generations of the continuous engine on one problem.
pub struct ContinuousEngine<'a> {
    problem: &'a ProblemDescriptor,
    config: &'a ContinuousConfig,
    alpha: AlphaTracker,
}

impl<'a> ContinuousEngine<'a> {
    pub fn new(problem: &'a ProblemDescriptor, config: &'a ContinuousConfig) -> Result<Self> {
        config.validate_for(problem)?;
        let schedule = config
            .alpha_schedule
            .unwrap_or(AlphaSchedule::Constant(config.params.alpha));
        Ok(Self {
            problem,
            config,
            alpha: AlphaTracker::new(schedule, config.params.max_gen)?,
        })
    }

    /// Parameter values for iteration `itr`.
    fn step_params(&self, itr: usize) -> Result<StepParams> {
        let gamma = match &self.config.gamma_schedule {
            Some(s) => s.gamma_at(itr, self.config.params.max_gen)?,
            None => self.config.params.gamma,
        };
        Ok(StepParams {
            beta0: self.config.params.beta0,
            gamma,
            alpha: self.alpha.value(),
        })
    }

    fn finish_move(
        &self,
        raw: Vec<f64>,
        previous: &[f64],
        best: &[f64],
        rng: &mut RngStream,
    ) -> Result<Vec<f64>> {
        match &self.config.discretizer {
            Some(d) => d.apply(&raw, previous, best, self.problem.bounds(), rng),
            None => Ok(raw),
        }
    }

    /// Proposed position of `xi` after moving towards `xj`, or `None` when
    /// the move gate keeps it in place.
    fn attract(
        &self,
        xi: &[f64],
        xj: &[f64],
        step: StepParams,
        best: &[f64],
        rng: &mut RngStream,
    ) -> Result<Option<Vec<f64>>> {
        let bounds = self.problem.bounds();
        match self.config.move_rule {
            MoveRule::MixedBinary => Ok(Some(
                xi.iter()
                    .zip(xj)
                    .map(|(&a, &b)| mixed_binary_update(a, b, rng))
                    .collect(),
            )),
            rule => {
                if let MoveRule::Gated { lambda } = rule {
                    if !move_gate(lambda, euclidean(xi, xj)?, rng) {
                        return Ok(None);
                    }
                }
                let dir = self.config.direction.draw(xi.len(), bounds, rng);
                let raw = move_towards_with(xi, xj, step, &dir, bounds);
                self.finish_move(raw, xi, best, rng).map(Some)
            }
        }
    }

    fn explore(
        &self,
        xi: &[f64],
        step: StepParams,
        best: &[f64],
        rng: &mut RngStream,
    ) -> Result<Vec<f64>> {
        let raw = move_random(
            xi,
            step.alpha,
            self.problem.bounds(),
            &self.config.direction,
            rng,
        );
        self.finish_move(raw, xi, best, rng)
    }

    /// One generation. Advances `swarm.iteration` and the α schedule.
    pub fn generation_step(&mut self, swarm: &mut Swarm, rng: &mut RngStream) -> Result<()> {
        let step = self.step_params(swarm.iteration)?;
        match self.config.update {
            UpdateMode::Asynchronous => self.step_async(swarm, step, rng)?,
            UpdateMode::Synchronous => self.step_sync(swarm, step, rng)?,
        }
        swarm.iteration += 1;
        self.alpha.advance()?;
        Ok(())
    }

    fn step_async(&self, swarm: &mut Swarm, step: StepParams, rng: &mut RngStream) -> Result<()> {
        let mut order = brightness_order(&swarm.objectives());
        order.reverse();
        let n = order.len();
        for (pos, &i) in order.iter().enumerate() {
            let mut attracted = false;
            for &j in &order[pos + 1..] {
                if !is_brighter(swarm.members[j].fitness(), swarm.members[i].fitness())? {
                    continue;
                }
                attracted = true;
                let moved = self.attract(
                    &swarm.members[i].values,
                    &swarm.members[j].values,
                    step,
                    &swarm.best.values,
                    rng,
                )?;
                if let Some(values) = moved {
                    swarm.members[i].values = values;
                    swarm.evaluate_member(self.problem, i)?;
                }
            }
            if !attracted && (pos + 1 < n || self.config.brightest_random_move) {
                let values =
                    self.explore(&swarm.members[i].values, step, &swarm.best.values, rng)?;
                swarm.members[i].values = values;
                swarm.evaluate_member(self.problem, i)?;
            }
        }
        Ok(())
    }

    fn step_sync(&self, swarm: &mut Swarm, step: StepParams, rng: &mut RngStream) -> Result<()> {
        let snapshot = swarm.members.clone();
        let mut order = brightness_order(&swarm.objectives());
        order.reverse();
        let n = order.len();
        for (pos, &i) in order.iter().enumerate() {
            let mut x = snapshot[i].values.clone();
            let mut attracted = false;
            let mut changed = false;
            for &j in &order[pos + 1..] {
                if !is_brighter(snapshot[j].fitness(), snapshot[i].fitness())? {
                    continue;
                }
                attracted = true;
                if let Some(v) =
                    self.attract(&x, &snapshot[j].values, step, &swarm.best.values, rng)?
                {
                    x = v;
                    changed = true;
                }
            }
            if !attracted && (pos + 1 < n || self.config.brightest_random_move) {
                x = self.explore(&x, step, &swarm.best.values, rng)?;
                changed = true;
            }
            if changed {
                swarm.members[i] = Solution::new(x);
            }
        }
        for i in 0..n {
            if swarm.members[i].objective.is_none() {
                swarm.evaluate_member(self.problem, i)?;
            }
        }
        Ok(())
    }
}

/// Runs the continuous engine for `params.max_gen` generations.
pub fn run(
    problem: &ProblemDescriptor,
    config: &ContinuousConfig,
    seed: u64,
) -> Result<TrialRecord> {
    let mut engine = ContinuousEngine::new(problem, config)?;
    let mut rng = RngStream::new(seed);
    let mut swarm = init_population(
        problem,
        config.params.population,
        config.params.max_gen,
        &mut rng,
    )?;
    let mut recorder = Recorder::start(seed, &swarm);
    for _ in 0..config.params.max_gen {
        engine.generation_step(&mut swarm, &mut rng)?;
        recorder.record(&swarm);
    }
    Ok(recorder.finish(swarm))
}
