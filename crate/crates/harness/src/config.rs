//! Experiment configuration: a flat TOML document, validated field by field.
//!
//! See `configs/knapsack.toml` for the canonical example and the README for
//! the full key list.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use firefly_core::discretize::{BinarizationRule, Discretizer, TransferFunction};
use firefly_core::problems::{ContinuousBenchmark, KnapsackInstance, TspInstance};
use firefly_core::schedules::{
    AlphaSchedule, DirectionKind, GammaSchedule, RandomDirection, DEFAULT_LEVY_EXPONENT,
};
use firefly_core::{
    ContinuousConfig, ContinuousParams, DiscreteConfig, DiscreteVariant, Encoding, MoveRule,
    ProblemDescriptor, RngStream, UpdateMode,
};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: Option<String>,
    size: Option<usize>,
    instance_seed: Option<u64>,
    instance: Option<PathBuf>,
    engine: Option<String>,
    encoding: Option<String>,

    beta0: Option<f64>,
    gamma: Option<f64>,
    alpha: Option<f64>,
    population: Option<usize>,
    max_iter: Option<usize>,
    replicates: Option<usize>,
    seed: Option<u64>,

    transfer: Option<String>,
    binarization: Option<String>,
    tau: Option<f64>,
    move_rule: Option<String>,
    lambda: Option<f64>,
    update: Option<String>,
    brightest_random_move: Option<bool>,

    alpha_schedule: Option<String>,
    alpha0: Option<f64>,
    theta: Option<f64>,
    alpha_min: Option<f64>,
    gamma_schedule: Option<String>,
    gamma_max: Option<f64>,
    gamma_min: Option<f64>,
    direction: Option<String>,
    levy_exponent: Option<f64>,
    range_scale: Option<bool>,

    variant: Option<String>,
    m: Option<usize>,
    dv_max: Option<f64>,
    dv_min: Option<f64>,
    literal_zero: Option<bool>,
    omega: Option<f64>,
    elite_flight: Option<bool>,
    local_search: Option<bool>,
    elite_flight_probability: Option<f64>,

    oracle: Option<toml::Value>,
    tolerance: Option<f64>,
    out_dir: Option<PathBuf>,
}

/// Where a combinatorial instance comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Random { size: usize, seed: u64 },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Knapsack(InstanceSource),
    Tsp(InstanceSource),
    Benchmark {
        benchmark: ContinuousBenchmark,
        dimension: usize,
    },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Knapsack(_) => "knapsack",
            ProblemSpec::Tsp(_) => "tsp",
            ProblemSpec::Benchmark { benchmark, .. } => benchmark.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineSpec {
    Continuous(ContinuousConfig),
    Discrete(DiscreteConfig),
}

impl EngineSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EngineSpec::Continuous(c) if c.discretizer.is_some() => "discretized",
            EngineSpec::Continuous(_) => "continuous",
            EngineSpec::Discrete(_) => "discrete",
        }
    }

    pub fn population(&self) -> usize {
        match self {
            EngineSpec::Continuous(c) => c.params.population,
            EngineSpec::Discrete(d) => d.population,
        }
    }

    pub fn max_iter(&self) -> usize {
        match self {
            EngineSpec::Continuous(c) => c.params.max_gen,
            EngineSpec::Discrete(d) => d.max_iter,
        }
    }
}

/// Reference optimum used for success rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleSpec {
    None,
    /// Exhaustive enumeration of the instance.
    Exhaustive,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub encoding: Encoding,
    pub engine: EngineSpec,
    pub replicates: usize,
    /// Master seed; replicate `k` runs with `derive_seed(seed, k)`.
    pub seed: u64,
    pub oracle: OracleSpec,
    /// A run succeeds when `f <= oracle + tolerance * |oracle| + 1e-9`.
    pub tolerance: f64,
    pub out_dir: Option<PathBuf>,
}

pub fn encoding_name(e: Encoding) -> &'static str {
    match e {
        Encoding::Real => "real",
        Encoding::Binary => "binary",
        Encoding::Integer => "integer",
        Encoding::Permutation => "permutation",
        Encoding::RandomKey => "random-key",
    }
}

fn parse_encoding(s: &str) -> Result<Encoding> {
    Ok(match s {
        "real" => Encoding::Real,
        "binary" => Encoding::Binary,
        "integer" => Encoding::Integer,
        "permutation" => Encoding::Permutation,
        "random-key" => Encoding::RandomKey,
        other => return Err(unknown("encoding", other)),
    })
}

fn unknown(field: &str, value: &str) -> HarnessError {
    HarnessError::field(field, format!("unknown value `{value}`"))
}

fn required<T>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| HarnessError::field(field, "missing"))
}

/// Maps a core validation error onto the config field it concerns.
fn core_field(err: firefly_core::Error, fallback: &str) -> HarnessError {
    match err {
        firefly_core::Error::InvalidParameter { name, reason } => HarnessError::field(name, reason),
        firefly_core::Error::IncompatibleEncoding { encoding, what } => HarnessError::field(
            "encoding",
            format!(
                "{what} does not support {} encoding",
                encoding_name(encoding)
            ),
        ),
        other => HarnessError::field(fallback, other.to_string()),
    }
}

/// Parses and validates a config document. Relative instance paths are
/// resolved against the working directory.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_in(text, None)
}

/// Reads a config file; relative instance paths are resolved against the
/// file's directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_config_in(&text, path.parent())
}

fn parse_config_in(text: &str, base: Option<&Path>) -> Result<ExperimentConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| HarnessError::Syntax(e.message().to_string()))?;
    let cfg = build(raw, base)?;
    cfg.problem_descriptor()
        .and_then(|p| cfg.validate_against(&p))?;
    Ok(cfg)
}

fn build(raw: RawConfig, base: Option<&Path>) -> Result<ExperimentConfig> {
    let problem_name = required(raw.problem.clone(), "problem")?;
    let engine_name = required(raw.engine.clone(), "engine")?;
    if !matches!(
        engine_name.as_str(),
        "continuous" | "discretized" | "discrete"
    ) {
        return Err(unknown("engine", &engine_name));
    }

    let source = || -> Result<InstanceSource> {
        match (&raw.instance, raw.size) {
            (Some(_), Some(_)) => Err(HarnessError::field(
                "instance",
                "give either `instance` or `size`, not both",
            )),
            (Some(p), None) => Ok(InstanceSource::File(match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p.clone(),
            })),
            (None, Some(size)) => Ok(InstanceSource::Random {
                size,
                seed: raw.instance_seed.unwrap_or(0),
            }),
            (None, None) => Err(HarnessError::field("size", "missing")),
        }
    };
    let problem = match problem_name.as_str() {
        "knapsack" => ProblemSpec::Knapsack(source()?),
        "tsp" => ProblemSpec::Tsp(source()?),
        "sphere" | "rastrigin" | "stepped" | "stepped-integer-demo" => {
            let benchmark = match problem_name.as_str() {
                "sphere" => ContinuousBenchmark::Sphere,
                "rastrigin" => ContinuousBenchmark::Rastrigin,
                _ => ContinuousBenchmark::SteppedIntegerDemo,
            };
            if raw.instance.is_some() {
                return Err(HarnessError::field(
                    "instance",
                    "benchmarks have no instance file",
                ));
            }
            let dimension = match benchmark {
                ContinuousBenchmark::SteppedIntegerDemo => raw.size.unwrap_or(1),
                _ => required(raw.size, "size")?,
            };
            ProblemSpec::Benchmark {
                benchmark,
                dimension,
            }
        }
        other => return Err(unknown("problem", other)),
    };

    let encoding = match &raw.encoding {
        Some(e) => parse_encoding(e)?,
        None => match (&problem, engine_name.as_str()) {
            (ProblemSpec::Knapsack(_), _) => Encoding::Binary,
            (ProblemSpec::Tsp(_), "discrete") => Encoding::Permutation,
            (ProblemSpec::Tsp(_), _) => Encoding::RandomKey,
            (ProblemSpec::Benchmark { .. }, "continuous") => Encoding::Real,
            (ProblemSpec::Benchmark { .. }, _) => Encoding::Integer,
        },
    };

    let population = raw.population.unwrap_or(25);
    let max_iter = raw.max_iter.unwrap_or(100);
    let alpha = raw.alpha.unwrap_or(0.2);
    let gamma = raw.gamma.unwrap_or(1.0);
    let beta0 = raw.beta0.unwrap_or(1.0);
    let dimension = match &problem {
        ProblemSpec::Benchmark { dimension, .. } => Some(*dimension),
        ProblemSpec::Knapsack(InstanceSource::Random { size, .. })
        | ProblemSpec::Tsp(InstanceSource::Random { size, .. }) => Some(*size),
        _ => None,
    };
    let alpha_schedule = alpha_schedule(&raw, alpha, dimension)?;
    let brightest_random_move = raw.brightest_random_move.unwrap_or(true);

    let engine = if engine_name == "discrete" {
        let variant = discrete_variant(&raw, beta0, gamma, alpha)?;
        let mut d = DiscreteConfig::new(variant, population, max_iter);
        d.alpha = alpha_schedule.unwrap_or(AlphaSchedule::Constant(alpha));
        d.brightest_random_move = brightest_random_move;
        if let Some(p) = raw.elite_flight_probability {
            d.elite_flight_probability = p;
        }
        EngineSpec::Discrete(d)
    } else {
        let mut c = ContinuousConfig::new(ContinuousParams {
            beta0,
            gamma,
            alpha,
            population,
            max_gen: max_iter,
        });
        c.alpha_schedule = alpha_schedule;
        c.gamma_schedule = gamma_schedule(&raw)?;
        c.direction = direction(&raw)?;
        c.move_rule = match raw.move_rule.as_deref().unwrap_or("standard") {
            "standard" => MoveRule::Standard,
            "gated" => MoveRule::Gated {
                lambda: raw.lambda.unwrap_or(1.0),
            },
            "mixed-binary" => MoveRule::MixedBinary,
            other => return Err(unknown("move_rule", other)),
        };
        c.update = match raw.update.as_deref().unwrap_or("asynchronous") {
            "asynchronous" => UpdateMode::Asynchronous,
            "synchronous" => UpdateMode::Synchronous,
            other => return Err(unknown("update", other)),
        };
        c.brightest_random_move = brightest_random_move;
        c.discretizer = if engine_name == "discretized" {
            Some(match encoding {
                Encoding::Binary => Discretizer::Binary {
                    transfer: raw
                        .transfer
                        .as_deref()
                        .unwrap_or("S2")
                        .parse::<TransferFunction>()
                        .map_err(|_| unknown("transfer", raw.transfer.as_deref().unwrap_or("")))?,
                    rule: binarization(&raw)?,
                },
                Encoding::Integer => Discretizer::Round,
                Encoding::RandomKey => Discretizer::RandomKey,
                other => {
                    return Err(HarnessError::field(
                        "encoding",
                        format!(
                            "the discretized engine does not support {} encoding",
                            encoding_name(other)
                        ),
                    ))
                }
            })
        } else {
            None
        };
        EngineSpec::Continuous(c)
    };

    let replicates = raw.replicates.unwrap_or(10);
    if replicates == 0 {
        return Err(HarnessError::field("replicates", "must be at least 1"));
    }
    let oracle = match &raw.oracle {
        None => OracleSpec::None,
        Some(toml::Value::String(s)) if s == "none" => OracleSpec::None,
        Some(toml::Value::String(s)) if s == "exhaustive" => OracleSpec::Exhaustive,
        Some(toml::Value::Float(v)) => OracleSpec::Value(*v),
        Some(toml::Value::Integer(v)) => OracleSpec::Value(*v as f64),
        Some(other) => {
            return Err(HarnessError::field(
                "oracle",
                format!("expected \"none\", \"exhaustive\" or a number, got {other}"),
            ))
        }
    };
    let tolerance = raw.tolerance.unwrap_or(0.0);
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(HarnessError::field("tolerance", "must be finite and >= 0"));
    }

    Ok(ExperimentConfig {
        problem,
        encoding,
        engine,
        replicates,
        seed: raw.seed.unwrap_or(0),
        oracle,
        tolerance,
        out_dir: raw.out_dir,
    })
}

fn binarization(raw: &RawConfig) -> Result<BinarizationRule> {
    Ok(
        match raw.binarization.as_deref().unwrap_or("probabilistic") {
            "probabilistic" => BinarizationRule::Probabilistic,
            "elite" => BinarizationRule::EliteProbabilistic,
            "complement" => BinarizationRule::ComplementProbabilistic,
            "tanh" => BinarizationRule::TanhThreshold {
                tau: raw.tau.unwrap_or(0.5),
            },
            other => return Err(unknown("binarization", other)),
        },
    )
}

fn alpha_schedule(
    raw: &RawConfig,
    alpha: f64,
    dimension: Option<usize>,
) -> Result<Option<AlphaSchedule>> {
    let alpha0 = raw.alpha0.unwrap_or(alpha);
    Ok(Some(match raw.alpha_schedule.as_deref() {
        None => return Ok(None),
        Some("constant") => AlphaSchedule::Constant(alpha),
        Some("geometric") => AlphaSchedule::Geometric {
            alpha0,
            theta: required(raw.theta, "theta")?,
        },
        Some("per-iter-factor") => AlphaSchedule::PerIterFactor { alpha0 },
        Some("sigmoid-decay") => AlphaSchedule::SigmoidDecay { alpha0 },
        Some("linear") => AlphaSchedule::Linear {
            alpha_max: alpha0,
            alpha_min: required(raw.alpha_min, "alpha_min")?,
        },
        Some("floor-dim") => AlphaSchedule::FloorDim {
            n: dimension.ok_or_else(|| {
                HarnessError::field(
                    "alpha_schedule",
                    "floor-dim needs a problem given by `size`",
                )
            })?,
        },
        Some(other) => return Err(unknown("alpha_schedule", other)),
    }))
}

fn gamma_schedule(raw: &RawConfig) -> Result<Option<GammaSchedule>> {
    Ok(match raw.gamma_schedule.as_deref() {
        None | Some("constant") => None,
        Some("exp-ramp") => Some(GammaSchedule::ExpRamp {
            gamma_max: required(raw.gamma_max, "gamma_max")?,
            gamma_min: required(raw.gamma_min, "gamma_min")?,
        }),
        Some(other) => return Err(unknown("gamma_schedule", other)),
    })
}

fn direction(raw: &RawConfig) -> Result<RandomDirection> {
    let kind = match raw.direction.as_deref().unwrap_or("uniform") {
        "uniform" => DirectionKind::UniformCentered,
        "levy" => DirectionKind::Levy {
            exponent: raw.levy_exponent.unwrap_or(DEFAULT_LEVY_EXPONENT),
        },
        other => return Err(unknown("direction", other)),
    };
    Ok(RandomDirection {
        kind,
        range_scale: raw.range_scale.unwrap_or(false),
    })
}

fn discrete_variant(
    raw: &RawConfig,
    beta0: f64,
    gamma: f64,
    alpha: f64,
) -> Result<DiscreteVariant> {
    Ok(
        match raw.variant.as_deref().unwrap_or("hamming-beta-alpha") {
            "hamming-beta-alpha" => DiscreteVariant::HammingBetaAlpha { gamma },
            "familiarity" => DiscreteVariant::Familiarity,
            "rho-follow" => DiscreteVariant::RhoFollow { gamma },
            "swap-fixed" => DiscreteVariant::SwapFixed,
            "swap-gamma" => DiscreteVariant::SwapGamma { gamma },
            "tsp-inversion" => DiscreteVariant::TspInversion {
                m: raw.m.unwrap_or(3),
            },
            "visual-range" => DiscreteVariant::VisualRangePerDim {
                beta0,
                gamma,
                alpha,
                dv_max: raw.dv_max.unwrap_or(3.0),
                dv_min: raw.dv_min.unwrap_or(0.2),
                literal_zero: raw.literal_zero.unwrap_or(false),
            },
            "knapsack-gated" => DiscreteVariant::KnapsackGated {
                beta0,
                omega: raw.omega.unwrap_or(1.0),
                elite_flight: raw.elite_flight.unwrap_or(true),
                local_search: raw.local_search.unwrap_or(true),
            },
            other => return Err(unknown("variant", other)),
        },
    )
}

/// A combinatorial instance held by the problem it defines.
#[derive(Debug, Clone)]
pub enum LoadedInstance {
    Knapsack(Arc<KnapsackInstance>),
    Tsp(Arc<TspInstance>),
    None,
}

impl ExperimentConfig {
    /// Loads or generates the instance named by the config.
    pub fn instance(&self) -> Result<LoadedInstance> {
        let field = |e: firefly_core::Error| HarnessError::field("instance", e.to_string());
        Ok(match &self.problem {
            ProblemSpec::Knapsack(InstanceSource::Random { size, seed }) => {
                if *size == 0 {
                    return Err(HarnessError::field("size", "must be at least 1"));
                }
                LoadedInstance::Knapsack(Arc::new(KnapsackInstance::random(
                    *size,
                    &mut RngStream::new(*seed),
                )))
            }
            ProblemSpec::Knapsack(InstanceSource::File(p)) => {
                LoadedInstance::Knapsack(Arc::new(KnapsackInstance::load(p).map_err(field)?))
            }
            ProblemSpec::Tsp(InstanceSource::Random { size, seed }) => {
                if *size < 2 {
                    return Err(HarnessError::field(
                        "size",
                        "a tour needs at least 2 cities",
                    ));
                }
                LoadedInstance::Tsp(Arc::new(TspInstance::random_euclidean(
                    *size,
                    &mut RngStream::new(*seed),
                )))
            }
            ProblemSpec::Tsp(InstanceSource::File(p)) => {
                LoadedInstance::Tsp(Arc::new(TspInstance::load(p).map_err(field)?))
            }
            ProblemSpec::Benchmark { .. } => LoadedInstance::None,
        })
    }

    /// Builds the problem the engine will optimize.
    pub fn problem_descriptor(&self) -> Result<ProblemDescriptor> {
        self.problem_for(&self.instance()?)
    }

    pub fn problem_for(&self, instance: &LoadedInstance) -> Result<ProblemDescriptor> {
        let wrong = || {
            HarnessError::field(
                "encoding",
                format!(
                    "{} does not support {} encoding",
                    self.problem.name(),
                    encoding_name(self.encoding)
                ),
            )
        };
        match (instance, &self.problem) {
            (LoadedInstance::Knapsack(k), _) => {
                if self.encoding != Encoding::Binary {
                    return Err(wrong());
                }
                Ok(k.problem())
            }
            (LoadedInstance::Tsp(t), _) => match self.encoding {
                Encoding::Permutation => Ok(t.problem()),
                Encoding::RandomKey => Ok(t.random_key_problem()),
                _ => Err(wrong()),
            },
            (
                LoadedInstance::None,
                ProblemSpec::Benchmark {
                    benchmark,
                    dimension,
                },
            ) => {
                if *dimension == 0 {
                    return Err(HarnessError::field("size", "must be at least 1"));
                }
                benchmark
                    .problem(self.encoding, *dimension)
                    .map_err(|e| core_field(e, "size"))
            }
            (LoadedInstance::None, _) => Err(HarnessError::field("problem", "instance missing")),
        }
    }

    fn validate_against(&self, problem: &ProblemDescriptor) -> Result<()> {
        match &self.engine {
            EngineSpec::Continuous(c) => c.validate_for(problem),
            EngineSpec::Discrete(d) => d.validate_for(problem),
        }
        .map_err(|e| core_field(e, "engine"))
    }
}
