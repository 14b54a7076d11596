use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{Bounds, Encoding, ProblemDescriptor};

/// Values of the stepped demo at the integers `0..=10`. The integer minimum
/// is at 1.
pub const STEPPED_TABLE: [f64; 11] = [4.0, 0.0, 3.0, 3.5, 2.0, 1.0, 1.0, 2.0, 3.5, 4.0, 5.0];

/// Depth and width of the dip carved between the integers around 5.5.
const STEPPED_DIP_DEPTH: f64 = 3.0;
const STEPPED_DIP_CENTER: f64 = 5.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuousBenchmark {
    Sphere,
    Rastrigin,
    /// One-dimensional function on `[0, 10]` that equals [`STEPPED_TABLE`] at
    /// the integers and dips to -2 at 5.5 in between. Rounding its continuous
    /// minimizer gives 6 while the integer minimizer is 1.
    SteppedIntegerDemo,
}

impl ContinuousBenchmark {
    pub fn name(self) -> &'static str {
        match self {
            ContinuousBenchmark::Sphere => "sphere",
            ContinuousBenchmark::Rastrigin => "rastrigin",
            ContinuousBenchmark::SteppedIntegerDemo => "stepped-integer-demo",
        }
    }

    /// Default search box per coordinate.
    pub fn default_bounds(self) -> Bounds {
        match self {
            ContinuousBenchmark::Sphere | ContinuousBenchmark::Rastrigin => Bounds {
                lower: -5.12,
                upper: 5.12,
            },
            ContinuousBenchmark::SteppedIntegerDemo => Bounds {
                lower: 0.0,
                upper: 10.0,
            },
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            ContinuousBenchmark::Sphere => x.iter().map(|v| v * v).sum(),
            ContinuousBenchmark::Rastrigin => {
                10.0 * x.len() as f64
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                        .sum::<f64>()
            }
            ContinuousBenchmark::SteppedIntegerDemo => stepped(x[0]),
        }
    }

    /// Checked evaluation: `x` must have the right length and lie in bounds.
    pub fn eval_checked(self, x: &[f64], bounds: &[Bounds]) -> Result<f64> {
        if self == ContinuousBenchmark::SteppedIntegerDemo && x.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: x.len(),
            });
        }
        if x.len() != bounds.len() {
            return Err(Error::DimensionMismatch {
                expected: bounds.len(),
                actual: x.len(),
            });
        }
        if let Some((v, b)) = x.iter().zip(bounds).find(|(v, b)| !b.contains(**v)) {
            return Err(Error::EncodingViolation(format!(
                "{v} outside [{}, {}]",
                b.lower, b.upper
            )));
        }
        Ok(self.eval(x))
    }

    /// Problem over the default box with the given encoding
    /// (`Real` or `Integer`).
    pub fn problem(self, encoding: Encoding, dimension: usize) -> Result<ProblemDescriptor> {
        if !matches!(encoding, Encoding::Real | Encoding::Integer) {
            return Err(Error::IncompatibleEncoding {
                encoding,
                what: "continuous benchmark",
            });
        }
        if self == ContinuousBenchmark::SteppedIntegerDemo && dimension != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: dimension,
            });
        }
        ProblemDescriptor::new(
            encoding,
            dimension,
            vec![self.default_bounds(); dimension],
            move |x: &[f64]| self.eval(x),
        )
    }
}

fn stepped(x: f64) -> f64 {
    let x = x.clamp(0.0, 10.0);
    let k = (x.floor() as usize).min(STEPPED_TABLE.len() - 2);
    let t = x - k as f64;
    let linear = STEPPED_TABLE[k] * (1.0 - t) + STEPPED_TABLE[k + 1] * t;
    // sin(pi * t) vanishes exactly at the integers, so f(k) is the table value.
    let bump = (PI * t).sin().powi(2) * (-(x - STEPPED_DIP_CENTER).powi(2) / 2.0).exp();
    linear - STEPPED_DIP_DEPTH * bump
}
