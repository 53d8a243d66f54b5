use crate::error::{Error, Result};

/// Per-run accuracy and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub rmse: f64,
    pub ae: f64,
    pub elapsed: f64,
    pub degeneracy_count: usize,
}

fn check(estimates: &[f64], truth: &[f64]) -> Result<()> {
    if estimates.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: estimates.len(),
            right: truth.len(),
        });
    }
    if estimates.is_empty() {
        return Err(Error::Empty("estimates"));
    }
    Ok(())
}

/// Root-mean-square error.
pub fn rmse(estimates: &[f64], truth: &[f64]) -> Result<f64> {
    check(estimates, truth)?;
    let sq: f64 = estimates.iter().zip(truth).map(|(e, t)| (e - t) * (e - t)).sum();
    Ok((sq / estimates.len() as f64).sqrt())
}

/// Mean absolute error.
pub fn abs_error(estimates: &[f64], truth: &[f64]) -> Result<f64> {
    check(estimates, truth)?;
    let s: f64 = estimates.iter().zip(truth).map(|(e, t)| (e - t).abs()).sum();
    Ok(s / estimates.len() as f64)
}
