//! Particle filters for scalar state-space models whose observation density
//! cannot be evaluated but can be simulated from.
//!
//! All weights are held as normalized log-weights; an exact zero weight is
//! `f64::NEG_INFINITY`.

pub mod apf;
pub mod kalman;
pub mod resample;
pub mod smc;
pub mod weights;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernels::KernelSpec;
use crate::proposals::{ProposalKind, ProposalSpec};

pub use apf::{abc_apf_run, abc_apf_run_with, abc_apf_step, StepDiagnostics};
pub use kalman::{kalman_run, KalmanOutput, LinearGaussian};
pub use resample::{resample, ResampleScheme};
pub use smc::{abc_smc_run, abc_smc_step, percentile_threshold};
pub use weights::{ess, normalize};

/// Weighted particle approximation of the filtering distribution at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud {
    pub states: Vec<f64>,
    pub log_weights: Vec<f64>,
    pub t: usize,
}

impl ParticleCloud {
    /// Cloud with uniform weights.
    pub fn uniform(states: Vec<f64>, t: usize) -> Self {
        let n = states.len();
        Self {
            states,
            log_weights: vec![-(n as f64).ln(); n],
            t,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Posterior mean estimate Σ w_i x_i.
    pub fn mean(&self) -> f64 {
        weights::weighted_mean(&self.states, &self.log_weights)
    }

    pub fn ess(&self) -> f64 {
        weights::ess(&self.log_weights)
    }

    pub fn weight_sum(&self) -> f64 {
        self.log_weights.iter().map(|w| w.exp()).sum()
    }
}

/// When to resample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ResamplePolicy {
    #[default]
    EveryStep,
    /// Resample only when the ESS drops below the threshold.
    EssThreshold(f64),
}

impl std::str::FromStr for ResamplePolicy {
    type Err = Error;

    /// `every` or `ess:N0`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "every" || s == "every-step" {
            return Ok(Self::EveryStep);
        }
        if let Some(rest) = s.strip_prefix("ess:") {
            let n0: f64 = rest
                .parse()
                .map_err(|_| invalid(format!("bad ESS threshold '{rest}'")))?;
            return Ok(Self::EssThreshold(n0));
        }
        Err(invalid(format!("unknown resample policy '{s}'")))
    }
}

impl std::fmt::Display for ResamplePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::EveryStep => write!(f, "every"),
            Self::EssThreshold(n0) => write!(f, "ess:{n0}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    AbcApf,
    AbcSmc,
}

impl Algorithm {
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::AbcApf => "abc-apf",
            Algorithm::AbcSmc => "abc-smc",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abc-apf" => Ok(Self::AbcApf),
            "abc-smc" => Ok(Self::AbcSmc),
            other => Err(invalid(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub n_particles: usize,
    pub kernel: KernelSpec,
    pub proposal: ProposalSpec,
    pub resample_policy: ResamplePolicy,
    pub resample_scheme: ResampleScheme,
    /// Fraction of closest pseudo-observations kept by the ABC-SMC baseline.
    pub smc_percentile: f64,
}

impl FilterConfig {
    pub fn new(
        n_particles: usize,
        kernel: KernelSpec,
        proposal: ProposalSpec,
        resample_policy: ResamplePolicy,
        resample_scheme: ResampleScheme,
        smc_percentile: f64,
    ) -> Result<Self> {
        let cfg = Self {
            n_particles,
            kernel,
            proposal,
            resample_policy,
            resample_scheme,
            smc_percentile,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// N particles, Gaussian kernel of bandwidth ε, the given proposal,
    /// multinomial resampling at every step.
    pub fn apf(n_particles: usize, epsilon: f64, proposal: ProposalKind) -> Result<Self> {
        Self::new(
            n_particles,
            KernelSpec::gaussian(epsilon)?,
            ProposalSpec::with_default_dof(proposal),
            ResamplePolicy::EveryStep,
            ResampleScheme::Multinomial,
            0.25,
        )
    }

    /// N particles, uniform kernel at percentile `p`, resampling every step.
    pub fn smc(n_particles: usize, percentile: f64) -> Result<Self> {
        Self::new(
            n_particles,
            KernelSpec::uniform(1.0)?,
            ProposalSpec::with_default_dof(ProposalKind::CentralT),
            ResamplePolicy::EveryStep,
            ResampleScheme::Multinomial,
            percentile,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles < 2 {
            return Err(invalid("at least two particles are required"));
        }
        if let ResamplePolicy::EssThreshold(n0) = self.resample_policy {
            if !(1.0..=self.n_particles as f64).contains(&n0) {
                return Err(invalid(format!("ESS threshold {n0} outside [1, N]")));
            }
        }
        // P_ε = 1 keeps every particle and is allowed as the bootstrap limit
        if !(self.smc_percentile > 0.0 && self.smc_percentile <= 1.0) {
            return Err(invalid(format!(
                "SMC percentile must lie in (0, 1], got {}",
                self.smc_percentile
            )));
        }
        KernelSpec::new(self.kernel.kind, self.kernel.epsilon)?;
        ProposalSpec::new(self.proposal.kind, self.proposal.dof)?;
        Ok(())
    }
}

/// Result of a full filter pass over y_1..y_T.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    /// E[x_t | y_1:t] estimates for t = 1..T.
    pub filtered_mean: Vec<f64>,
    pub ess_trace: Vec<f64>,
    pub resample_count: usize,
    pub degeneracy_count: usize,
    /// Wall-clock seconds for the pass.
    pub elapsed: f64,
}

impl FilterOutput {
    /// Equality ignoring the wall-clock field.
    pub fn same_estimates(&self, other: &Self) -> bool {
        self.filtered_mean == other.filtered_mean
            && self.ess_trace == other.ess_trace
            && self.resample_count == other.resample_count
            && self.degeneracy_count == other.degeneracy_count
    }
}
