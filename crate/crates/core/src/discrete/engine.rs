use crate::error::{Error, Result};
use crate::model::{
    brightness_order, init_population, is_brighter, ranks_of, Encoding, ProblemDescriptor,
    Solution, Swarm,
};
use crate::record::{Recorder, TrialRecord};
use crate::rng::RngStream;
use crate::schedules::{AlphaSchedule, AlphaTracker};

use super::familiarity::FamiliarityMatrix;
use super::ops::{
    alpha_step, beta_bounded, beta_of_hamming, beta_step, bounded_inversion, draw_swap_count,
    elementary_neighbor, knapsack_move_gate, per_dim_update, random_inversion, swap_move,
    tsp_move_distance, visual_range_at, PerDimParams, SwapCount,
};
use crate::distance::hamming_unchecked;

/// Probability that an elite firefly attempts a random flight.
pub const ELITE_FLIGHT_PROBABILITY: f64 = 0.45;
/// Fraction of the swarm, rounded up, eligible for the elite flight.
pub const ELITE_FRACTION: f64 = 0.1;
/// Fraction of the run after which the brightest firefly starts local search.
pub const LOCAL_SEARCH_START: f64 = 0.1;

/// Discrete-space update schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiscreteVariant {
    /// β-step with `beta = 1 / (1 + gamma d^2)` on Hamming distance `d`,
    /// followed by an α-step.
    HammingBetaAlpha { gamma: f64 },
    /// β-step with β taken from an evolving familiarity matrix, then α-step.
    Familiarity,
    /// Like `HammingBetaAlpha`, but with probability `1 - rho` the firefly
    /// follows the swarm's brightest instead of the brighter partner.
    RhoFollow { gamma: f64 },
    /// Copy `R ~ U[1, r]` differing entries from the brighter firefly.
    SwapFixed,
    /// Copy `R ~ U[2, max(2, r gamma^itr)]` entries; keep only improvements.
    SwapGamma { gamma: f64 },
    /// `m` inversion-mutation candidates per move; the best `N` of members
    /// and candidates survive.
    TspInversion { m: usize },
    /// Per-dimension copying restricted to brighter fireflies within an
    /// iteration-growing visual range.
    VisualRangePerDim {
        beta0: f64,
        gamma: f64,
        alpha: f64,
        dv_max: f64,
        dv_min: f64,
        literal_zero: bool,
    },
    /// Rank-gated moves with `beta = beta0 / (omega + r)`, optional elite
    /// random flight and local search of the brightest.
    KnapsackGated {
        beta0: f64,
        omega: f64,
        elite_flight: bool,
        local_search: bool,
    },
}

impl DiscreteVariant {
    pub fn name(&self) -> &'static str {
        match self {
            DiscreteVariant::HammingBetaAlpha { .. } => "hamming-beta-alpha",
            DiscreteVariant::Familiarity => "familiarity",
            DiscreteVariant::RhoFollow { .. } => "rho-follow",
            DiscreteVariant::SwapFixed => "swap-fixed",
            DiscreteVariant::SwapGamma { .. } => "swap-gamma",
            DiscreteVariant::TspInversion { .. } => "tsp-inversion",
            DiscreteVariant::VisualRangePerDim { .. } => "visual-range",
            DiscreteVariant::KnapsackGated { .. } => "knapsack-gated",
        }
    }

    fn supports(&self, encoding: Encoding) -> bool {
        match self {
            DiscreteVariant::TspInversion { .. } => encoding == Encoding::Permutation,
            DiscreteVariant::KnapsackGated { .. } => encoding == Encoding::Binary,
            DiscreteVariant::VisualRangePerDim {
                literal_zero: true, ..
            } => encoding == Encoding::Binary,
            _ => encoding.is_discrete(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let non_negative = |name, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::param(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ))
            }
        };
        match *self {
            DiscreteVariant::HammingBetaAlpha { gamma } | DiscreteVariant::RhoFollow { gamma } => {
                non_negative("gamma", gamma)
            }
            DiscreteVariant::SwapGamma { gamma } => {
                if gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param(
                        "gamma",
                        format!("must be positive, got {gamma}"),
                    ))
                }
            }
            DiscreteVariant::Familiarity | DiscreteVariant::SwapFixed => Ok(()),
            DiscreteVariant::TspInversion { m } => {
                if m >= 1 {
                    Ok(())
                } else {
                    Err(Error::param("m", "must be at least 1"))
                }
            }
            DiscreteVariant::VisualRangePerDim {
                beta0,
                gamma,
                alpha,
                dv_max,
                dv_min,
                ..
            } => {
                non_negative("beta0", beta0)?;
                non_negative("gamma", gamma)?;
                non_negative("alpha", alpha)?;
                non_negative("dv_min", dv_min)?;
                if dv_min < dv_max && dv_max.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param(
                        "dv_min",
                        format!("must be below dv_max ({dv_min} >= {dv_max})"),
                    ))
                }
            }
            DiscreteVariant::KnapsackGated { beta0, omega, .. } => {
                non_negative("beta0", beta0)?;
                if omega > 0.0 && omega.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param(
                        "omega",
                        format!("must be positive, got {omega}"),
                    ))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteConfig {
    pub variant: DiscreteVariant,
    pub population: usize,
    pub max_iter: usize,
    /// Step length of the α-step and of random moves.
    pub alpha: AlphaSchedule,
    /// Whether the brightest firefly takes a random move every generation.
    pub brightest_random_move: bool,
    /// Per-member probability of the elite random flight.
    pub elite_flight_probability: f64,
}

impl DiscreteConfig {
    pub fn new(variant: DiscreteVariant, population: usize, max_iter: usize) -> Self {
        Self {
            variant,
            population,
            max_iter,
            alpha: AlphaSchedule::Constant(1.0),
            brightest_random_move: true,
            elite_flight_probability: ELITE_FLIGHT_PROBABILITY,
        }
    }

    pub fn validate_for(&self, problem: &ProblemDescriptor) -> Result<()> {
        self.variant.validate()?;
        self.alpha.validate()?;
        if self.population == 0 {
            return Err(Error::param("population", "must be at least 1"));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter", "must be at least 1"));
        }
        if matches!(self.variant, DiscreteVariant::VisualRangePerDim { .. }) && self.max_iter < 2 {
            return Err(Error::param(
                "max_iter",
                "visual range needs at least 2 iterations",
            ));
        }
        if !(0.0..=1.0).contains(&self.elite_flight_probability) {
            return Err(Error::param(
                "elite_flight_probability",
                format!("must lie in [0, 1], got {}", self.elite_flight_probability),
            ));
        }
        if !self.variant.supports(problem.encoding()) {
            return Err(Error::IncompatibleEncoding {
                encoding: problem.encoding(),
                what: self.variant.name(),
            });
        }
        Ok(())
    }
}

/// Encoding-appropriate random flight: a bit flip, an α-step, or an
/// inversion.
fn random_flight(
    x: &[f64],
    problem: &ProblemDescriptor,
    alpha: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    match problem.encoding() {
        Encoding::Binary => elementary_neighbor(x, Encoding::Binary, problem.bounds(), rng),
        Encoding::Integer => alpha_step(x, alpha, Encoding::Integer, problem.bounds(), rng),
        Encoding::Permutation => Ok(random_inversion(x, rng)),
        other => Err(Error::IncompatibleEncoding {
            encoding: other,
            what: "random flight",
        }),
    }
}

/// Each of the top `ceil(0.1 N)` fireflies, with probability `probability`,
/// tries a random flight that is kept only if it strictly improves.
pub fn elite_random_flight(
    swarm: &mut Swarm,
    problem: &ProblemDescriptor,
    alpha: f64,
    probability: f64,
    rng: &mut RngStream,
) -> Result<()> {
    let top = (ELITE_FRACTION * swarm.len() as f64).ceil() as usize;
    let order = brightness_order(&swarm.objectives());
    for &i in order.iter().take(top) {
        if !rng.bernoulli(probability) {
            continue;
        }
        let mut candidate = Solution::new(random_flight(
            &swarm.members[i].values,
            problem,
            alpha,
            rng,
        )?);
        let f = swarm.evaluate_candidate(problem, &mut candidate)?;
        if f < swarm.members[i].fitness() {
            swarm.members[i] = candidate;
        }
    }
    Ok(())
}

/// Once more than 10% of the iterations have passed, the brightest firefly
/// tries one elementary neighbour and keeps it on strict improvement.
pub fn local_search_brightest(
    swarm: &mut Swarm,
    problem: &ProblemDescriptor,
    itr: usize,
    max_iter: usize,
    rng: &mut RngStream,
) -> Result<()> {
    if (itr as f64) <= LOCAL_SEARCH_START * max_iter as f64 {
        return Ok(());
    }
    let b = swarm.brightest();
    let neighbor = elementary_neighbor(
        &swarm.members[b].values,
        problem.encoding(),
        problem.bounds(),
        rng,
    )?;
    let mut candidate = Solution::new(neighbor);
    let f = swarm.evaluate_candidate(problem, &mut candidate)?;
    if f < swarm.members[b].fitness() {
        swarm.members[b] = candidate;
    }
    Ok(())
}

/// `0.5 + 0.5 itr / max_iter`: probability of following the brighter partner
/// rather than the swarm's brightest.
pub fn rho_at(itr: usize, max_iter: usize) -> Result<f64> {
    if max_iter == 0 || itr > max_iter {
        return Err(Error::param(
            "itr",
            format!("need 0 <= itr <= max_iter, got {itr} / {max_iter}"),
        ));
    }
    Ok(0.5 + 0.5 * itr as f64 / max_iter as f64)
}

/// Runs generations of a discrete variant on one problem.
pub struct DiscreteEngine<'a> {
    problem: &'a ProblemDescriptor,
    config: &'a DiscreteConfig,
    alpha: AlphaTracker,
    familiarity: Option<FamiliarityMatrix>,
}

impl<'a> DiscreteEngine<'a> {
    /// Familiarity variants draw their initial matrix from `rng`.
    pub fn new(
        problem: &'a ProblemDescriptor,
        config: &'a DiscreteConfig,
        rng: &mut RngStream,
    ) -> Result<Self> {
        config.validate_for(problem)?;
        let familiarity = (config.variant == DiscreteVariant::Familiarity)
            .then(|| FamiliarityMatrix::random(config.population, rng));
        Ok(Self {
            problem,
            config,
            alpha: AlphaTracker::new(config.alpha, config.max_iter)?,
            familiarity,
        })
    }

    pub fn familiarity(&self) -> Option<&FamiliarityMatrix> {
        self.familiarity.as_ref()
    }

    fn encoding(&self) -> Encoding {
        self.problem.encoding()
    }

    fn beta_alpha_move(
        &self,
        xi: &[f64],
        target: &[f64],
        beta: f64,
        alpha: f64,
        rng: &mut RngStream,
    ) -> Result<Vec<f64>> {
        let moved = beta_step(xi, target, beta, self.encoding(), rng)?;
        alpha_step(&moved, alpha, self.encoding(), self.problem.bounds(), rng)
    }

    /// One generation. Advances `swarm.iteration` and the α schedule.
    pub fn generation_step(&mut self, swarm: &mut Swarm, rng: &mut RngStream) -> Result<()> {
        if swarm.len() != self.config.population {
            return Err(Error::Contract(format!(
                "swarm has {} members, config expects {}",
                swarm.len(),
                self.config.population
            )));
        }
        match self.config.variant {
            DiscreteVariant::TspInversion { m } => self.inversion_generation(swarm, m, rng)?,
            _ => self.pairwise_generation(swarm, rng)?,
        }
        swarm.iteration += 1;
        self.alpha.advance()?;
        Ok(())
    }

    fn pairwise_generation(&mut self, swarm: &mut Swarm, rng: &mut RngStream) -> Result<()> {
        let itr = swarm.iteration;
        let max_iter = self.config.max_iter;
        let alpha = self.alpha.value();
        let start_ranks = ranks_of(&swarm.objectives());
        let mut order = brightness_order(&swarm.objectives());
        order.reverse();
        let n = order.len();
        let dv = match self.config.variant {
            DiscreteVariant::VisualRangePerDim { dv_min, dv_max, .. } => {
                visual_range_at(dv_min, dv_max, itr.min(max_iter), max_iter)?
            }
            _ => f64::INFINITY,
        };

        for (pos, &i) in order.iter().enumerate() {
            let mut attracted = false;
            for &j in &order[pos + 1..] {
                if !is_brighter(swarm.members[j].fitness(), swarm.members[i].fitness())? {
                    continue;
                }
                let r = hamming_unchecked(&swarm.members[i].values, &swarm.members[j].values);
                if r as f64 > dv {
                    continue;
                }
                attracted = true;
                self.pair_move(swarm, i, j, r, start_ranks[i], alpha, rng)?;
            }
            if !attracted && (pos + 1 < n || self.config.brightest_random_move) {
                let moved = alpha_step(
                    &swarm.members[i].values,
                    alpha,
                    self.encoding(),
                    self.problem.bounds(),
                    rng,
                )?;
                swarm.members[i].values = moved;
                swarm.evaluate_member(self.problem, i)?;
            }
        }

        match self.config.variant {
            DiscreteVariant::Familiarity => {
                let ranks = ranks_of(&swarm.objectives());
                if let Some(p) = self.familiarity.as_mut() {
                    p.update(&ranks)?;
                }
            }
            DiscreteVariant::KnapsackGated {
                elite_flight,
                local_search,
                ..
            } => {
                if elite_flight {
                    elite_random_flight(
                        swarm,
                        self.problem,
                        alpha,
                        self.config.elite_flight_probability,
                        rng,
                    )?;
                }
                if local_search {
                    local_search_brightest(swarm, self.problem, itr, max_iter, rng)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Moves member `i` towards the brighter member `j` at Hamming
    /// distance `r`.
    #[allow(clippy::too_many_arguments)]
    fn pair_move(
        &self,
        swarm: &mut Swarm,
        i: usize,
        j: usize,
        r: usize,
        rank_i: usize,
        alpha: f64,
        rng: &mut RngStream,
    ) -> Result<()> {
        let itr = swarm.iteration;
        let max_iter = self.config.max_iter;
        let enc = self.encoding();
        let xi = swarm.members[i].values.clone();
        let moved = match self.config.variant {
            DiscreteVariant::HammingBetaAlpha { gamma } => {
                let beta = beta_of_hamming(gamma, r);
                self.beta_alpha_move(&xi, &swarm.members[j].values, beta, alpha, rng)?
            }
            DiscreteVariant::Familiarity => {
                let p = self
                    .familiarity
                    .as_ref()
                    .ok_or_else(|| Error::Contract("familiarity matrix missing".into()))?;
                let beta = p.beta(i, j)?;
                self.beta_alpha_move(&xi, &swarm.members[j].values, beta, alpha, rng)?
            }
            DiscreteVariant::RhoFollow { gamma } => {
                let rho = rho_at(itr.min(max_iter), max_iter)?;
                let target = if rng.uniform() <= rho {
                    j
                } else {
                    swarm.brightest()
                };
                let xt = swarm.members[target].values.clone();
                let beta = beta_of_hamming(gamma, hamming_unchecked(&xi, &xt));
                self.beta_alpha_move(&xi, &xt, beta, alpha, rng)?
            }
            DiscreteVariant::SwapFixed | DiscreteVariant::SwapGamma { .. } => {
                if r == 0 {
                    return Ok(());
                }
                let kind = match self.config.variant {
                    DiscreteVariant::SwapGamma { gamma } => SwapCount::Gamma { gamma },
                    _ => SwapCount::Fixed,
                };
                let count = draw_swap_count(kind, r, itr, rng)?;
                let candidate = swap_move(&xi, &swarm.members[j].values, count, enc, rng)?;
                if let SwapCount::Gamma { .. } = kind {
                    let mut c = Solution::new(candidate);
                    let f = swarm.evaluate_candidate(self.problem, &mut c)?;
                    if f < swarm.members[i].fitness() {
                        swarm.members[i] = c;
                    }
                    return Ok(());
                }
                candidate
            }
            DiscreteVariant::VisualRangePerDim {
                beta0,
                gamma,
                alpha: a,
                literal_zero,
                ..
            } => {
                let params = PerDimParams {
                    alpha: a,
                    beta0,
                    gamma,
                    literal_zero,
                };
                per_dim_update(&xi, &swarm.members[j].values, params, r as f64, enc, rng)?
            }
            DiscreteVariant::KnapsackGated { beta0, omega, .. } => {
                if !knapsack_move_gate(rank_i, itr + 1, max_iter, rng)? {
                    return Ok(());
                }
                let beta = beta_bounded(beta0, omega, r as f64).min(1.0);
                self.beta_alpha_move(&xi, &swarm.members[j].values, beta, alpha, rng)?
            }
            DiscreteVariant::TspInversion { .. } => {
                return Err(Error::Contract(
                    "inversion variant has no pairwise move".into(),
                ))
            }
        };
        swarm.members[i].values = moved;
        swarm.evaluate_member(self.problem, i)?;
        Ok(())
    }

    fn inversion_generation(&self, swarm: &mut Swarm, m: usize, rng: &mut RngStream) -> Result<()> {
        let mut order = brightness_order(&swarm.objectives());
        order.reverse();
        let n = order.len();
        let mut candidates: Vec<Solution> = Vec::new();
        for (pos, &i) in order.iter().enumerate() {
            let xi = &swarm.members[i].values;
            let mut attracted = false;
            for &j in &order[pos + 1..] {
                if !is_brighter(swarm.members[j].fitness(), swarm.members[i].fitness())? {
                    continue;
                }
                attracted = true;
                // segment length bounded by the arc distance to the partner
                let r = tsp_move_distance(xi, &swarm.members[j].values)?;
                let max_len = (r.floor() as usize).max(2);
                candidates
                    .extend((0..m).map(|_| Solution::new(bounded_inversion(xi, max_len, rng))));
            }
            if !attracted && (pos + 1 < n || self.config.brightest_random_move) {
                candidates.extend((0..m).map(|_| Solution::new(random_inversion(xi, rng))));
            }
        }
        for c in candidates.iter_mut() {
            swarm.evaluate_candidate(self.problem, c)?;
        }
        let mut pool = std::mem::take(&mut swarm.members);
        pool.extend(candidates);
        let keep = brightness_order(&pool.iter().map(Solution::fitness).collect::<Vec<_>>());
        let mut slots: Vec<Option<Solution>> = pool.into_iter().map(Some).collect();
        swarm.members = keep
            .into_iter()
            .take(n)
            .map(|k| slots[k].take().expect("each index taken once"))
            .collect();
        Ok(())
    }
}

/// Runs a discrete variant for `max_iter` generations.
pub fn run_discrete(
    problem: &ProblemDescriptor,
    config: &DiscreteConfig,
    seed: u64,
) -> Result<TrialRecord> {
    config.validate_for(problem)?;
    let mut rng = RngStream::new(seed);
    let mut swarm = init_population(problem, config.population, config.max_iter, &mut rng)?;
    let mut engine = DiscreteEngine::new(problem, config, &mut rng)?;
    let mut recorder = Recorder::start(seed, &swarm);
    for _ in 0..config.max_iter {
        engine.generation_step(&mut swarm, &mut rng)?;
        recorder.record(&swarm);
    }
    Ok(recorder.finish(swarm))
}
