//! ABC-SMC baseline: a bootstrap filter with a uniform kernel whose width is
//! re-chosen each step as a percentile of the pseudo-observation distances.

use std::time::Instant;

use rand::Rng;

use super::resample::resample_indices;
use super::weights::{ess, normalize, weighted_mean};
use super::{FilterConfig, FilterOutput, ParticleCloud, ResamplePolicy};
use crate::error::{invalid, Error, Result};
use crate::svm::StateSpaceModel;

/// The ⌈p·N⌉-th smallest distance.
pub fn percentile_threshold(distances: &[f64], p: f64) -> Result<f64> {
    if distances.is_empty() {
        return Err(Error::Empty("distances"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("percentile must lie in (0, 1], got {p}")));
    }
    let n = distances.len();
    let k = ((p * n as f64).ceil() as usize).clamp(1, n);
    let mut scratch = distances.to_vec();
    let (_, kth, _) = scratch.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
    Ok(*kth)
}

/// Per-step record of the baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct SmcStep {
    pub epsilon: f64,
    pub survivors: usize,
    pub degenerate: bool,
    pub ess: f64,
    /// Weighted mean before any resampling.
    pub mean: f64,
    pub resampled: bool,
}

/// Propagate, weight by the percentile indicator, then resample per policy.
pub fn abc_smc_step<M, R>(
    cloud: &mut ParticleCloud,
    y: f64,
    model: &M,
    config: &FilterConfig,
    rng: &mut R,
) -> Result<SmcStep>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    let n = cloud.len();
    if n == 0 {
        return Err(Error::Empty("particle cloud"));
    }
    let mut distances = Vec::with_capacity(n);
    for x in cloud.states.iter_mut() {
        *x = model.transition_sample(*x, rng);
        distances.push((model.observe_sample(*x, rng) - y).abs());
    }
    let epsilon = percentile_threshold(&distances, config.smc_percentile)?;
    let mut survivors = 0;
    for (w, d) in cloud.log_weights.iter_mut().zip(&distances) {
        // ties at ε are kept
        if *d <= epsilon {
            survivors += 1;
        } else {
            *w = f64::NEG_INFINITY;
        }
    }
    let degenerate = match normalize(&mut cloud.log_weights) {
        Ok(()) => false,
        Err(Error::DegenerateCloud) => {
            cloud.log_weights.fill(-(n as f64).ln());
            true
        }
        Err(e) => return Err(e),
    };
    cloud.t += 1;
    let mean = weighted_mean(&cloud.states, &cloud.log_weights);
    let step_ess = ess(&cloud.log_weights);

    let resampled = match config.resample_policy {
        ResamplePolicy::EveryStep => true,
        ResamplePolicy::EssThreshold(n0) => step_ess < n0,
    };
    if resampled {
        let linear: Vec<f64> = cloud.log_weights.iter().map(|w| w.exp()).collect();
        let mut ancestors = Vec::with_capacity(n);
        resample_indices(&linear, n, config.resample_scheme, rng, &mut ancestors)?;
        cloud.states = ancestors.iter().map(|&a| cloud.states[a]).collect();
        cloud.log_weights.fill(-(n as f64).ln());
    }
    Ok(SmcStep {
        epsilon,
        survivors,
        degenerate,
        ess: step_ess,
        mean,
        resampled,
    })
}

pub fn abc_smc_run<M, R>(data: &[f64], model: &M, config: &FilterConfig, rng: &mut R) -> Result<FilterOutput>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    if data.is_empty() {
        return Err(Error::Empty("observations"));
    }
    if data.iter().any(|y| !y.is_finite()) {
        return Err(invalid("observations must be finite"));
    }
    config.validate()?;
    let start = Instant::now();
    let n = config.n_particles;
    let initial = (0..n).map(|_| model.initial_sample(rng)).collect();
    let mut cloud = ParticleCloud::uniform(initial, 0);

    let mut out = FilterOutput {
        filtered_mean: Vec::with_capacity(data.len()),
        ess_trace: Vec::with_capacity(data.len()),
        resample_count: 0,
        degeneracy_count: 0,
        elapsed: 0.0,
    };
    for &y in data {
        let step = abc_smc_step(&mut cloud, y, model, config, rng)?;
        out.filtered_mean.push(step.mean);
        out.ess_trace.push(step.ess);
        out.resample_count += step.resampled as usize;
        out.degeneracy_count += step.degenerate as usize;
    }
    out.elapsed = start.elapsed().as_secs_f64();
    Ok(out)
}
