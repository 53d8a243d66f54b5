//! ABC auxiliary particle filter.
//!
//! One step from t−1 to t:
//!
//! 1. First-stage weights `w_i ∝ w̃_i · p̂(y_t | ξ(x_i))`, ξ the transition mean.
//! 2. Resample by the first-stage weights (per the resampling policy).
//! 3. Propagate each survivor through the transition density.
//! 4. Simulate one pseudo-observation per particle.
//! 5. Second-stage weights `w̃_i ∝ K_ε(y_sim_i − y_t) / p̂(y_t | ξ(x_parent(i)))`.
//! 6. Normalize.
//!
//! Because particles are proposed from the transition density itself, the
//! q/p factor of the general auxiliary weight cancels and never needs an
//! observation or transition density evaluation.

use std::time::Instant;

use rand::Rng;

use super::resample::resample_indices;
use super::weights::{ess, normalize, weighted_mean};
use super::{FilterConfig, FilterOutput, ParticleCloud, ResamplePolicy};
use crate::error::{invalid, Error, Result};
use crate::proposals::{Lookahead, TProposal};
use crate::svm::StateSpaceModel;

/// What happened during one filter step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    /// Parent index of every particle after selection.
    pub ancestors: Vec<usize>,
    pub resampled: bool,
    /// All second-stage weights were zero and the cloud was reset to uniform.
    pub degenerate: bool,
    /// ESS of the normalized second-stage weights.
    pub ess: f64,
}

/// Advances `cloud` from t−1 to t given observation `y`.
pub fn abc_apf_step<M, L, R>(
    cloud: &mut ParticleCloud,
    y: f64,
    model: &M,
    lookahead: &L,
    config: &FilterConfig,
    rng: &mut R,
) -> Result<StepDiagnostics>
where
    M: StateSpaceModel,
    L: Lookahead + ?Sized,
    R: Rng + ?Sized,
{
    let n = cloud.len();
    if n == 0 {
        return Err(Error::Empty("particle cloud"));
    }
    let log_phat = if lookahead.ignores_state() {
        vec![lookahead.log_phat(y, 0.0)?; n]
    } else {
        cloud
            .states
            .iter()
            .map(|&x| lookahead.log_phat(y, model.transition_mean(x)))
            .collect::<Result<Vec<f64>>>()?
    };
    let mut first_stage: Vec<f64> = cloud.log_weights.iter().zip(&log_phat).map(|(w, p)| w + p).collect();
    normalize(&mut first_stage)?;

    let resampled = match config.resample_policy {
        ResamplePolicy::EveryStep => true,
        ResamplePolicy::EssThreshold(n0) => ess(&first_stage) < n0,
    };
    let mut ancestors = Vec::with_capacity(n);
    let selected_log_weight: Vec<f64> = if resampled {
        let linear: Vec<f64> = first_stage.iter().map(|w| w.exp()).collect();
        resample_indices(&linear, n, config.resample_scheme, rng, &mut ancestors)?;
        vec![-(n as f64).ln(); n]
    } else {
        ancestors.extend(0..n);
        first_stage
    };

    let kernel = config.kernel;
    let mut states = Vec::with_capacity(n);
    let mut log_weights = Vec::with_capacity(n);
    for (i, &parent) in ancestors.iter().enumerate() {
        let x = model.transition_sample(cloud.states[parent], rng);
        let y_sim = model.observe_sample(x, rng);
        states.push(x);
        log_weights.push(selected_log_weight[i] + kernel.log_kernel(y_sim - y) - log_phat[parent]);
    }

    let degenerate = match normalize(&mut log_weights) {
        Ok(()) => false,
        Err(Error::DegenerateCloud) => {
            log_weights.fill(-(n as f64).ln());
            true
        }
        Err(e) => return Err(e),
    };
    cloud.states = states;
    cloud.log_weights = log_weights;
    cloud.t += 1;
    Ok(StepDiagnostics {
        ancestors,
        resampled,
        degenerate,
        ess: ess(&cloud.log_weights),
    })
}

/// Runs the filter over `data` (y_1..y_T) using the lookahead from `config.proposal`.
pub fn abc_apf_run<M, R>(data: &[f64], model: &M, config: &FilterConfig, rng: &mut R) -> Result<FilterOutput>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    let lookahead = TProposal::new(config.proposal);
    abc_apf_run_with(data, model, &lookahead, config, rng)
}

/// [`abc_apf_run`] with an explicit first-stage weighting function.
pub fn abc_apf_run_with<M, L, R>(
    data: &[f64],
    model: &M,
    lookahead: &L,
    config: &FilterConfig,
    rng: &mut R,
) -> Result<FilterOutput>
where
    M: StateSpaceModel,
    L: Lookahead + ?Sized,
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

    let mut filtered_mean = Vec::with_capacity(data.len());
    let mut ess_trace = Vec::with_capacity(data.len());
    let mut resample_count = 0;
    let mut degeneracy_count = 0;
    for &y in data {
        let diag = abc_apf_step(&mut cloud, y, model, lookahead, config, rng)?;
        resample_count += diag.resampled as usize;
        degeneracy_count += diag.degenerate as usize;
        filtered_mean.push(weighted_mean(&cloud.states, &cloud.log_weights));
        ess_trace.push(diag.ess);
    }
    Ok(FilterOutput {
        filtered_mean,
        ess_trace,
        resample_count,
        degeneracy_count,
        elapsed: start.elapsed().as_secs_f64(),
    })
}
