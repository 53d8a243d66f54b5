//! Log-space importance weight bookkeeping.

use crate::error::{Error, Result};

/// log Σ exp(x_i). Returns −∞ for an empty slice or when every entry is −∞.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || !max.is_finite() {
        return max;
    }
    let sum: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Normalizes log-weights in place so that Σ exp(w_i) = 1.
///
/// Fails with [`Error::DegenerateCloud`] when every weight is log-zero; the
/// slice is left untouched in that case.
pub fn normalize(log_weights: &mut [f64]) -> Result<()> {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::DegenerateCloud);
    }
    if !max.is_finite() {
        return Err(Error::NonFinite("log-weight".into()));
    }
    let sum: f64 = log_weights.iter().map(|&w| (w - max).exp()).sum();
    let shift = max + sum.ln();
    for w in log_weights.iter_mut() {
        *w -= shift;
    }
    Ok(())
}

/// Returns a normalized copy.
pub fn normalized(log_weights: &[f64]) -> Result<Vec<f64>> {
    let mut out = log_weights.to_vec();
    normalize(&mut out)?;
    Ok(out)
}

/// Effective sample size 1 / Σ w_i² of normalized log-weights, clamped to [1, N].
pub fn ess(log_weights: &[f64]) -> f64 {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return 1.0;
    }
    let sum_sq: f64 = log_weights.iter().map(|&w| (2.0 * (w - max)).exp()).sum();
    let sum: f64 = log_weights.iter().map(|&w| (w - max).exp()).sum();
    // (Σ w)² / Σ w² is invariant to the common shift by max
    (sum * sum / sum_sq).clamp(1.0, log_weights.len() as f64)
}

/// Weighted mean Σ w_i x_i for normalized log-weights.
pub fn weighted_mean(states: &[f64], log_weights: &[f64]) -> f64 {
    states
        .iter()
        .zip(log_weights)
        .map(|(&x, &w)| if w == f64::NEG_INFINITY { 0.0 } else { x * w.exp() })
        .sum()
}

/// Linear weights from normalized log-weights.
pub fn linear(log_weights: &[f64]) -> Vec<f64> {
    log_weights.iter().map(|w| w.exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ln(x: f64) -> f64 {
        x.ln()
    }

    #[test]
    fn normalize_examples() {
        let w = normalized(&[0.0, 0.0]).unwrap();
        assert!(w.iter().all(|&x| (x - ln(0.5)).abs() < 1e-15));
        let w = normalized(&[-700.0, -700.0, -700.0]).unwrap();
        assert!(w.iter().all(|&x| (x.exp() - 1.0 / 3.0).abs() < 1e-12));
        let w = normalized(&[ln(3.0), 0.0]).unwrap();
        assert!((w[0] - ln(0.75)).abs() < 1e-15 && (w[1] - ln(0.25)).abs() < 1e-15);
    }

    #[test]
    fn all_log_zero_is_degenerate() {
        let mut w = vec![f64::NEG_INFINITY; 4];
        assert_eq!(normalize(&mut w), Err(Error::DegenerateCloud));
        assert!(w.iter().all(|x| *x == f64::NEG_INFINITY));
    }

    #[test]
    fn partial_log_zero_stays_zero() {
        let w = normalized(&[f64::NEG_INFINITY, 1.0, f64::NEG_INFINITY, 1.0]).unwrap();
        assert_eq!(w[0], f64::NEG_INFINITY);
        assert!((w[1].exp() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ess_examples() {
        let uniform = vec![-(100f64.ln()); 100];
        assert!((ess(&uniform) - 100.0).abs() < 1e-9);
        let mut one_hot = vec![f64::NEG_INFINITY; 100];
        one_hot[17] = 0.0;
        assert_eq!(ess(&one_hot), 1.0);
        let half = [ln(0.5), ln(0.5), f64::NEG_INFINITY, f64::NEG_INFINITY];
        assert!((ess(&half) - 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn normalized_weights_sum_to_one(raw in prop::collection::vec(-800.0f64..50.0, 2..300)) {
            let w = normalized(&raw).unwrap();
            let total: f64 = w.iter().map(|x| x.exp()).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(w.iter().all(|x| x.exp() >= 0.0));
        }

        #[test]
        fn ess_within_bounds(raw in prop::collection::vec(-60.0f64..10.0, 1..300)) {
            let w = normalized(&raw).unwrap();
            let e = ess(&w);
            prop_assert!(e >= 1.0 && e <= w.len() as f64 + 1e-9);
        }

        #[test]
        fn ess_is_n_iff_uniform(n in 2usize..200, bump in 1e-3f64..5.0, idx in 0usize..200) {
            let mut raw = vec![0.0; n];
            let w = normalized(&raw).unwrap();
            prop_assert!((ess(&w) - n as f64).abs() < 1e-9 * n as f64);
            raw[idx % n] += bump;
            let w = normalized(&raw).unwrap();
            prop_assert!(ess(&w) < n as f64 - 1e-9);
        }
    }
}
