//! Schedule series and transfer-function tables as CSV.

use std::fmt::Write as _;

use firefly_core::discrete::visual_range_at;
use firefly_core::discretize::{transfer, TransferFunction};
use firefly_core::schedules::{emit_curve, emit_gamma_curve, AlphaSchedule, GammaSchedule};
use firefly_core::Result;

/// A series that can be emitted by `curves`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Alpha(AlphaSchedule),
    Gamma(GammaSchedule),
    VisualRange { dv_min: f64, dv_max: f64 },
}

/// `iteration,value` rows for `itr = 0..=max_iter`.
pub fn curve_csv(curve: &Curve, max_iter: usize) -> Result<String> {
    let rows = match curve {
        Curve::Alpha(s) => emit_curve(s, max_iter)?,
        Curve::Gamma(s) => emit_gamma_curve(s, max_iter)?,
        Curve::VisualRange { dv_min, dv_max } => (0..=max_iter)
            .map(|itr| Ok((itr, visual_range_at(*dv_min, *dv_max, itr, max_iter)?)))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut out = String::from("iteration,value\n");
    for (itr, v) in rows {
        writeln!(out, "{itr},{v}").expect("writing to a String");
    }
    Ok(out)
}

/// The nine table functions on `points` evenly spaced values of `[from, to]`.
pub fn transfer_table_csv(from: f64, to: f64, points: usize) -> Result<String> {
    if points == 0 {
        return Err(firefly_core::Error::InvalidParameter {
            name: "points",
            reason: "must be at least 1".into(),
        });
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(firefly_core::Error::InvalidParameter {
            name: "from",
            reason: "range ends must be finite".into(),
        });
    }
    let mut out = String::from("x");
    for f in TransferFunction::TABLE {
        write!(out, ",{f}").expect("writing to a String");
    }
    out.push('\n');
    for i in 0..points {
        let x = if points == 1 {
            from
        } else {
            from + (to - from) * i as f64 / (points - 1) as f64
        };
        write!(out, "{x}").expect("writing to a String");
        for f in TransferFunction::TABLE {
            write!(out, ",{}", transfer(f, x)).expect("writing to a String");
        }
        out.push('\n');
    }
    Ok(out)
}
