//! Iteration-dependent parameter rules and random step directions.
//!
//! Iterations are counted from `0` (before the first generation) to
//! `max_iter` (after the last one).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::Bounds;
use crate::rng::RngStream;

/// Multiplier applied every iteration by [`AlphaSchedule::PerIterFactor`],
/// raised to `1 / max_iter`.
pub const PER_ITER_TARGET_RATIO: f64 = 1e-4 / 9.0;

/// Randomness step length as a function of the iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSchedule {
    Constant(f64),
    /// `alpha0 * theta^itr`.
    Geometric {
        alpha0: f64,
        theta: f64,
    },
    /// `alpha *= (1e-4 / 9)^(1 / max_iter)` once per iteration.
    PerIterFactor {
        alpha0: f64,
    },
    /// `alpha0 - 1 / (1 + exp(-(itr - max_iter / 2)))`.
    SigmoidDecay {
        alpha0: f64,
    },
    /// Linear interpolation from `alpha_max` at 0 to `alpha_min` at `max_iter`.
    Linear {
        alpha_max: f64,
        alpha_min: f64,
    },
    /// `floor(n - itr / max_iter * n)`, tied to the problem dimension.
    FloorDim {
        n: usize,
    },
}

impl AlphaSchedule {
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
            AlphaSchedule::Constant(a) => non_negative("alpha", a),
            AlphaSchedule::Geometric { alpha0, theta } => {
                non_negative("alpha0", alpha0)?;
                if theta > 0.0 && theta < 1.0 {
                    Ok(())
                } else {
                    Err(Error::param(
                        "theta",
                        format!("must lie in (0, 1), got {theta}"),
                    ))
                }
            }
            AlphaSchedule::PerIterFactor { alpha0 } => non_negative("alpha0", alpha0),
            AlphaSchedule::SigmoidDecay { alpha0 } => {
                if alpha0.is_finite() && alpha0 >= 1.0 {
                    Ok(())
                } else {
                    Err(Error::param(
                        "alpha0",
                        format!(
                            "sigmoid decay needs alpha0 >= 1 to stay non-negative, got {alpha0}"
                        ),
                    ))
                }
            }
            AlphaSchedule::Linear {
                alpha_max,
                alpha_min,
            } => {
                non_negative("alpha_min", alpha_min)?;
                non_negative("alpha_max", alpha_max)?;
                if alpha_min <= alpha_max {
                    Ok(())
                } else {
                    Err(Error::param(
                        "alpha_min",
                        format!("must not exceed alpha_max ({alpha_min} > {alpha_max})"),
                    ))
                }
            }
            AlphaSchedule::FloorDim { n } => {
                if n >= 1 {
                    Ok(())
                } else {
                    Err(Error::param("n", "must be at least 1"))
                }
            }
        }
    }

    /// Step length at iteration `itr`.
    ///
    /// `previous` is the value returned for `itr - 1`; only
    /// [`AlphaSchedule::PerIterFactor`] reads it, and falls back to `alpha0`
    /// when it is absent or `itr == 0`.
    pub fn alpha_at(&self, itr: usize, max_iter: usize, previous: Option<f64>) -> Result<f64> {
        self.validate()?;
        if max_iter == 0 {
            return Err(Error::param("max_iter", "must be at least 1"));
        }
        if itr > max_iter {
            return Err(Error::param(
                "itr",
                format!("{itr} exceeds max_iter {max_iter}"),
            ));
        }
        let t = itr as f64;
        let tmax = max_iter as f64;
        Ok(match *self {
            AlphaSchedule::Constant(a) => a,
            AlphaSchedule::Geometric { alpha0, theta } => alpha0 * theta.powi(itr as i32),
            AlphaSchedule::PerIterFactor { alpha0 } => match (itr, previous) {
                (0, _) | (_, None) => alpha0,
                (_, Some(prev)) => prev * PER_ITER_TARGET_RATIO.powf(1.0 / tmax),
            },
            AlphaSchedule::SigmoidDecay { alpha0 } => {
                alpha0 - 1.0 / (1.0 + (-(t - tmax / 2.0)).exp())
            }
            AlphaSchedule::Linear {
                alpha_max,
                alpha_min,
            } => alpha_max - (t / tmax) * (alpha_max - alpha_min),
            AlphaSchedule::FloorDim { n } => ((n * (max_iter - itr)) / max_iter) as f64,
        })
    }
}

/// Carries the state a running engine needs to follow an [`AlphaSchedule`].
#[derive(Debug, Clone)]
pub struct AlphaTracker {
    schedule: AlphaSchedule,
    max_iter: usize,
    current: Option<f64>,
    itr: usize,
}

impl AlphaTracker {
    pub fn new(schedule: AlphaSchedule, max_iter: usize) -> Result<Self> {
        let mut tracker = Self {
            schedule,
            max_iter,
            current: None,
            itr: 0,
        };
        tracker.current = Some(schedule.alpha_at(0, max_iter, None)?);
        Ok(tracker)
    }

    pub fn value(&self) -> f64 {
        self.current.unwrap_or(0.0)
    }

    pub fn iteration(&self) -> usize {
        self.itr
    }

    /// Moves to the next iteration and returns the new step length.
    pub fn advance(&mut self) -> Result<f64> {
        self.itr += 1;
        let v = self
            .schedule
            .alpha_at(self.itr.min(self.max_iter), self.max_iter, self.current)?;
        self.current = Some(v);
        Ok(v)
    }
}

/// Light absorption coefficient as a function of the iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaSchedule {
    Constant(f64),
    /// `gamma_max * exp(itr / max_iter * ln(gamma_min / gamma_max))`.
    ExpRamp {
        gamma_max: f64,
        gamma_min: f64,
    },
}

impl GammaSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GammaSchedule::Constant(g) if g.is_finite() && g >= 0.0 => Ok(()),
            GammaSchedule::Constant(g) => Err(Error::param(
                "gamma",
                format!("must be finite and >= 0, got {g}"),
            )),
            GammaSchedule::ExpRamp {
                gamma_max,
                gamma_min,
            } => {
                for (name, v) in [("gamma_max", gamma_max), ("gamma_min", gamma_min)] {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::param(name, format!("must be positive, got {v}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn gamma_at(&self, itr: usize, max_iter: usize) -> Result<f64> {
        self.validate()?;
        if max_iter == 0 {
            return Err(Error::param("max_iter", "must be at least 1"));
        }
        Ok(match *self {
            GammaSchedule::Constant(g) => g,
            GammaSchedule::ExpRamp { gamma_min, .. } if itr >= max_iter => gamma_min,
            GammaSchedule::ExpRamp {
                gamma_max,
                gamma_min,
            } => {
                let frac = itr as f64 / max_iter as f64;
                gamma_max * (frac * (gamma_min / gamma_max).ln()).exp()
            }
        })
    }
}

/// Distribution of the random step direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectionKind {
    /// `u - 0.5` per component, `u` uniform on `[0, 1)`.
    UniformCentered,
    /// Symmetric Lévy-stable steps from Mantegna's construction.
    Levy { exponent: f64 },
}

pub const DEFAULT_LEVY_EXPONENT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomDirection {
    pub kind: DirectionKind,
    /// Multiply each component by `upper - lower` of its coordinate.
    pub range_scale: bool,
}

impl Default for RandomDirection {
    fn default() -> Self {
        Self {
            kind: DirectionKind::UniformCentered,
            range_scale: false,
        }
    }
}

impl RandomDirection {
    pub fn uniform() -> Self {
        Self::default()
    }

    pub fn levy(exponent: f64) -> Self {
        Self {
            kind: DirectionKind::Levy { exponent },
            range_scale: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let DirectionKind::Levy { exponent } = self.kind {
            if !(exponent > 0.0 && exponent <= 2.0) {
                return Err(Error::param(
                    "levy_exponent",
                    format!("must lie in (0, 2], got {exponent}"),
                ));
            }
        }
        Ok(())
    }

    /// Draws one direction vector. `bounds` is only read when range scaling
    /// is on, and must then have `dim` entries.
    pub fn draw(&self, dim: usize, bounds: &[Bounds], rng: &mut RngStream) -> Vec<f64> {
        let mut v: Vec<f64> = match self.kind {
            DirectionKind::UniformCentered => (0..dim).map(|_| rng.uniform() - 0.5).collect(),
            DirectionKind::Levy { exponent } => {
                let sigma = mantegna_sigma(exponent);
                (0..dim)
                    .map(|_| {
                        let u = rng.normal() * sigma;
                        let w = rng.normal();
                        u / w.abs().powf(1.0 / exponent)
                    })
                    .collect()
            }
        };
        if self.range_scale {
            for (c, b) in v.iter_mut().zip(bounds) {
                *c *= b.width();
            }
        }
        v
    }
}

/// Scale of the numerator normal in Mantegna's algorithm.
pub fn mantegna_sigma(beta: f64) -> f64 {
    let num = libm::tgamma(1.0 + beta) * (PI * beta / 2.0).sin();
    let den = libm::tgamma((1.0 + beta) / 2.0) * beta * 2f64.powf((beta - 1.0) / 2.0);
    (num / den).powf(1.0 / beta)
}

/// Value of an α schedule at every iteration `0..=max_iter`.
pub fn emit_curve(schedule: &AlphaSchedule, max_iter: usize) -> Result<Vec<(usize, f64)>> {
    if max_iter == 0 {
        return Err(Error::param("max_iter", "must be at least 1"));
    }
    let mut prev = None;
    (0..=max_iter)
        .map(|itr| {
            let v = schedule.alpha_at(itr, max_iter, prev)?;
            prev = Some(v);
            Ok((itr, v))
        })
        .collect()
}

/// Value of a γ schedule at every iteration `0..=max_iter`.
pub fn emit_gamma_curve(schedule: &GammaSchedule, max_iter: usize) -> Result<Vec<(usize, f64)>> {
    (0..=max_iter)
        .map(|itr| Ok((itr, schedule.gamma_at(itr, max_iter)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn all_alpha() -> Vec<AlphaSchedule> {
        vec![
            AlphaSchedule::Constant(0.3),
            AlphaSchedule::Geometric {
                alpha0: 2.5,
                theta: 0.95,
            },
            AlphaSchedule::PerIterFactor { alpha0: 2.5 },
            AlphaSchedule::SigmoidDecay { alpha0: 2.5 },
            AlphaSchedule::Linear {
                alpha_max: 2.5,
                alpha_min: 0.1,
            },
            AlphaSchedule::FloorDim { n: 5 },
        ]
    }

    #[test]
    fn alpha_examples() {
        let g = AlphaSchedule::Geometric {
            alpha0: 2.5,
            theta: 0.95,
        };
        assert_eq!(g.alpha_at(0, 100, None).unwrap(), 2.5);
        let l = AlphaSchedule::Linear {
            alpha_max: 2.5,
            alpha_min: 0.1,
        };
        assert!((l.alpha_at(100, 100, None).unwrap() - 0.1).abs() < TOL);
        let s = AlphaSchedule::SigmoidDecay { alpha0: 2.5 };
        assert!((s.alpha_at(50, 100, None).unwrap() - 2.0).abs() < TOL);
        let f = AlphaSchedule::FloorDim { n: 5 };
        assert_eq!(f.alpha_at(0, 100, None).unwrap(), 5.0);
        assert_eq!(f.alpha_at(100, 100, None).unwrap(), 0.0);
    }

    #[test]
    fn alpha_rejects_invalid_parameters() {
        for bad in [
            AlphaSchedule::Geometric {
                alpha0: 1.0,
                theta: 1.0,
            },
            AlphaSchedule::Geometric {
                alpha0: 1.0,
                theta: 0.0,
            },
            AlphaSchedule::Linear {
                alpha_max: 0.1,
                alpha_min: 2.5,
            },
            AlphaSchedule::SigmoidDecay { alpha0: 0.5 },
            AlphaSchedule::FloorDim { n: 0 },
            AlphaSchedule::Constant(-1.0),
        ] {
            assert!(bad.alpha_at(0, 10, None).is_err(), "{bad:?}");
        }
        assert!(AlphaSchedule::Constant(1.0).alpha_at(0, 0, None).is_err());
        assert!(AlphaSchedule::Constant(1.0).alpha_at(11, 10, None).is_err());
    }

    #[test]
    fn per_iter_factor_compounds_to_target_ratio() {
        for max_iter in [1, 7, 100, 500] {
            let curve =
                emit_curve(&AlphaSchedule::PerIterFactor { alpha0: 2.5 }, max_iter).unwrap();
            let last = curve.last().unwrap().1;
            let expected = 2.5 * PER_ITER_TARGET_RATIO;
            assert!(
                ((last - expected) / expected).abs() < 1e-9,
                "{max_iter}: {last}"
            );
        }
    }

    #[test]
    fn alpha_tracker_follows_curve() {
        for s in all_alpha() {
            let curve = emit_curve(&s, 40).unwrap();
            let mut t = AlphaTracker::new(s, 40).unwrap();
            assert_eq!(t.value(), curve[0].1);
            for &(itr, v) in &curve[1..] {
                assert_eq!(t.advance().unwrap(), v, "{s:?} at {itr}");
                assert_eq!(t.iteration(), itr);
            }
        }
    }

    #[test]
    fn every_alpha_schedule_non_increasing() {
        for s in all_alpha() {
            let curve = emit_curve(&s, 200).unwrap();
            for w in curve.windows(2) {
                assert!(w[1].1 <= w[0].1, "{s:?} rises at {}", w[1].0);
                assert!(w[1].1 >= 0.0);
            }
        }
    }

    #[test]
    fn geometric_strictly_decreasing_and_floor_staircase() {
        let g = emit_curve(
            &AlphaSchedule::Geometric {
                alpha0: 2.5,
                theta: 0.9,
            },
            100,
        )
        .unwrap();
        assert!(g.windows(2).all(|w| w[1].1 < w[0].1));
        let f = emit_curve(&AlphaSchedule::FloorDim { n: 7 }, 100).unwrap();
        assert!(f.iter().all(|(_, v)| v.fract() == 0.0));
        assert_eq!(f[0].1, 7.0);
        assert_eq!(f[100].1, 0.0);
    }

    #[test]
    fn gamma_examples() {
        let r = GammaSchedule::ExpRamp {
            gamma_max: 1.0,
            gamma_min: 0.01,
        };
        assert!((r.gamma_at(0, 100).unwrap() - 1.0).abs() < TOL);
        assert!((r.gamma_at(100, 100).unwrap() - 0.01).abs() < TOL);
        assert!((r.gamma_at(50, 100).unwrap() - 0.1).abs() < TOL);
        assert_eq!(GammaSchedule::Constant(0.4).gamma_at(3, 10).unwrap(), 0.4);
        assert!(GammaSchedule::ExpRamp {
            gamma_max: 0.0,
            gamma_min: 0.1
        }
        .gamma_at(0, 10)
        .is_err());
        let c = emit_gamma_curve(&r, 10).unwrap();
        assert!(c.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn uniform_direction_range() {
        let mut rng = RngStream::new(5);
        let d = RandomDirection::uniform().draw(10_000, &[], &mut rng);
        assert!(d.iter().all(|c| (-0.5..0.5).contains(c)));
    }

    #[test]
    fn range_scale_on_unit_bounds_is_identity() {
        let bounds = vec![Bounds::UNIT; 8];
        let plain = RandomDirection::uniform().draw(8, &bounds, &mut RngStream::new(9));
        let scaled = RandomDirection {
            range_scale: true,
            ..RandomDirection::uniform()
        }
        .draw(8, &bounds, &mut RngStream::new(9));
        assert_eq!(plain, scaled);
        let wide = vec![Bounds::new(-5.0, 5.0).unwrap(); 8];
        let scaled = RandomDirection {
            range_scale: true,
            ..RandomDirection::uniform()
        }
        .draw(8, &wide, &mut RngStream::new(9));
        for (p, s) in plain.iter().zip(&scaled) {
            assert!((s - 10.0 * p).abs() < TOL);
        }
    }

    #[test]
    fn levy_has_heavy_tails() {
        let mut rng = RngStream::new(21);
        let d = RandomDirection::levy(DEFAULT_LEVY_EXPONENT).draw(100_000, &[], &mut rng);
        let n = d.len() as f64;
        let mean = d.iter().sum::<f64>() / n;
        let m2 = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m4 = d.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        assert!(m4 / (m2 * m2) > 3.0);
    }

    #[test]
    fn mantegna_sigma_reference_value() {
        // sigma_u for beta = 1.5, evaluated from the Gamma-function closed form.
        assert!((mantegna_sigma(1.5) - 0.696_574_502_557_697_6).abs() < 1e-12);
    }
}
