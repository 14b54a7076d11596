use crate::error::{Error, Result};

fn same_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(())
}

/// Euclidean distance between two real vectors.
pub fn euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    same_len(x, y)?;
    Ok(squared_euclidean(x, y).sqrt())
}

pub(crate) fn squared_euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Number of positions at which `x` and `y` differ.
pub fn hamming(x: &[f64], y: &[f64]) -> Result<usize> {
    same_len(x, y)?;
    Ok(hamming_unchecked(x, y))
}

pub(crate) fn hamming_unchecked(x: &[f64], y: &[f64]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}
