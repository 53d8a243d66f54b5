//! Multinomial and systematic resampling.
//!
//! Both schemes give particle i an expected N·w_i offspring. Multinomial draws
//! N sorted uniforms from normalized exponential spacings and walks the
//! cumulative weights once; systematic uses a single uniform offset on a
//! regular grid.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::ParticleCloud;
use crate::error::{invalid, Error, Result};

/// Tolerance on Σ w − 1 before the input is rejected as unnormalized.
const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleScheme {
    #[default]
    Multinomial,
    Systematic,
}

impl std::str::FromStr for ResampleScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multinomial" => Ok(Self::Multinomial),
            "systematic" => Ok(Self::Systematic),
            other => Err(invalid(format!("unknown resampling scheme '{other}'"))),
        }
    }
}

/// Draws `n` ancestor indices from normalized linear `weights` into `out`.
pub fn resample_indices<R: Rng + ?Sized>(
    weights: &[f64],
    n: usize,
    scheme: ResampleScheme,
    rng: &mut R,
    out: &mut Vec<usize>,
) -> Result<()> {
    let total: f64 = weights.iter().sum();
    if !((total - 1.0).abs() < NORMALIZATION_TOL) || weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::Unnormalized(total));
    }
    out.clear();
    out.reserve(n);
    let last = weights.len() - 1;
    let mut cumulative = weights[0];
    let mut i = 0usize;
    match scheme {
        ResampleScheme::Multinomial => {
            let spacings: Vec<f64> = (0..=n).map(|_| Exp1.sample(rng)).collect();
            let norm: f64 = spacings.iter().sum();
            let mut acc = 0.0;
            for s in &spacings[..n] {
                acc += s;
                let u = acc / norm;
                while u > cumulative && i < last {
                    i += 1;
                    cumulative += weights[i];
                }
                out.push(i);
            }
        }
        ResampleScheme::Systematic => {
            let step = 1.0 / n as f64;
            let offset = rng.random::<f64>() * step;
            for k in 0..n {
                let u = offset + k as f64 * step;
                while u > cumulative && i < last {
                    i += 1;
                    cumulative += weights[i];
                }
                out.push(i);
            }
        }
    }
    // zero-weight particles are never selected, even at the end of the walk
    for idx in out.iter_mut() {
        if weights[*idx] == 0.0 {
            *idx = (0..*idx)
                .rev()
                .chain(*idx + 1..weights.len())
                .find(|&j| weights[j] > 0.0)
                .expect("normalized weights have positive mass");
        }
    }
    Ok(())
}

/// Resamples the cloud; returns the new cloud with uniform weights and the
/// ancestor index of every offspring.
pub fn resample<R: Rng + ?Sized>(
    cloud: &ParticleCloud,
    scheme: ResampleScheme,
    rng: &mut R,
) -> Result<(ParticleCloud, Vec<usize>)> {
    let weights: Vec<f64> = cloud.log_weights.iter().map(|w| w.exp()).collect();
    let n = cloud.len();
    let mut ancestors = Vec::with_capacity(n);
    resample_indices(&weights, n, scheme, rng, &mut ancestors)?;
    let states = ancestors.iter().map(|&a| cloud.states[a]).collect();
    Ok((
        ParticleCloud {
            states,
            log_weights: vec![-(n as f64).ln(); n],
            t: cloud.t,
        },
        ancestors,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::seed::rng_from_seed;
    use proptest::prelude::*;

    fn cloud(states: Vec<f64>, weights: &[f64]) -> ParticleCloud {
        ParticleCloud {
            states,
            log_weights: weights.iter().map(|w| w.ln()).collect(),
            t: 0,
        }
    }

    #[test]
    fn one_hot_copies_single_particle() {
        let mut rng = rng_from_seed(1);
        for scheme in [ResampleScheme::Multinomial, ResampleScheme::Systematic] {
            let c = cloud(vec![1.0, 2.0, 3.0, 4.0, 5.0], &[0.0, 0.0, 1.0, 0.0, 0.0]);
            let (out, anc) = resample(&c, scheme, &mut rng).unwrap();
            assert!(anc.iter().all(|&a| a == 2));
            assert!(out.states.iter().all(|&s| s == 3.0));
            assert_eq!(out.len(), 5);
        }
    }

    #[test]
    fn systematic_keeps_each_uniform_particle_once() {
        let mut rng = rng_from_seed(2);
        let n = 37;
        let c = cloud((0..n).map(|i| i as f64).collect(), &vec![1.0 / n as f64; n]);
        let (_, mut anc) = resample(&c, ResampleScheme::Systematic, &mut rng).unwrap();
        anc.sort_unstable();
        assert_eq!(anc, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn multinomial_binomial_expectation() {
        let mut rng = rng_from_seed(3);
        let weights = [0.7, 0.3];
        let reps = 100_000;
        let mut out = Vec::new();
        let mut copies_of_first = 0usize;
        for _ in 0..reps {
            resample_indices(&weights, 2, ResampleScheme::Multinomial, &mut rng, &mut out).unwrap();
            copies_of_first += out.iter().filter(|&&a| a == 0).count();
        }
        let mean = copies_of_first as f64 / reps as f64;
        assert!((mean - 1.4).abs() < 0.01, "{mean}");
    }

    #[test]
    fn rejects_unnormalized_weights() {
        let mut rng = rng_from_seed(4);
        let c = cloud(vec![0.0, 1.0], &[0.6, 0.6]);
        assert!(matches!(
            resample(&c, ResampleScheme::Multinomial, &mut rng),
            Err(Error::Unnormalized(_))
        ));
    }

    #[test]
    fn resampled_mean_is_unbiased() {
        let mut rng = rng_from_seed(5);
        let n = 50;
        let states: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
        let raw: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let target: f64 = states.iter().zip(&w).map(|(s, w)| s * w).sum();
        for scheme in [ResampleScheme::Multinomial, ResampleScheme::Systematic] {
            let reps = 10_000;
            let c = cloud(states.clone(), &w);
            let means: Vec<f64> = (0..reps)
                .map(|_| {
                    let (out, _) = resample(&c, scheme, &mut rng).unwrap();
                    out.states.iter().sum::<f64>() / n as f64
                })
                .collect();
            let m = crate::stats::mean(&means);
            let se = (crate::stats::variance(&means) / reps as f64).sqrt();
            assert!(
                (m - target).abs() < 4.0 * se.max(1e-12),
                "{scheme:?}: {m} vs {target} (se {se})"
            );
        }
    }

    proptest! {
        #[test]
        fn preserves_size_and_skips_zero_weights(
            raw in prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], 2..64),
            seed in any::<u64>(),
            systematic in any::<bool>(),
        ) {
            prop_assume!(raw.iter().any(|&w| w > 0.0));
            let total: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let scheme = if systematic { ResampleScheme::Systematic } else { ResampleScheme::Multinomial };
            let mut rng = rng_from_seed(seed);
            let mut out = Vec::new();
            resample_indices(&w, w.len(), scheme, &mut rng, &mut out).unwrap();
            prop_assert_eq!(out.len(), w.len());
            prop_assert!(out.iter().all(|&a| w[a] > 0.0));
        }
    }
}
