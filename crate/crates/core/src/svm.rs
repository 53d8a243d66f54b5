//! Stochastic volatility model with α-stable return noise:
//!
//! ```text
//! y_t = exp(h_t / 2) v_t,          v_t ~ S(α, β, σ_v, 0)
//! h_t = μ + φ h_{t−1} + σ_h w_t,   w_t ~ N(0, 1)
//! h_0 ~ N(μ / (1 − φ), σ_h² / (1 − φ²))
//! ```

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::experiment::seed::rng_from_seed;
use crate::stable::{StableParams, StableSampler};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// A scalar hidden Markov model the filters can run on.
///
/// Only simulation is required of the observation side; the filters never
/// evaluate an observation density.
pub trait StateSpaceModel: Sync {
    fn initial_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;

    /// E[x_t | x_{t−1} = prev].
    fn transition_mean(&self, prev: f64) -> f64;

    fn transition_sample<R: Rng + ?Sized>(&self, prev: f64, rng: &mut R) -> f64;

    fn observe_sample<R: Rng + ?Sized>(&self, state: f64, rng: &mut R) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    mu: f64,
    phi: f64,
    sigma_h: f64,
    obs_noise: StableParams,
    sampler: StableSampler,
}

impl SvmParams {
    pub fn new(mu: f64, phi: f64, sigma_h: f64, alpha: f64, beta: f64, sigma_v: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(invalid(format!("mu must be finite, got {mu}")));
        }
        if !(phi.abs() < 1.0) {
            return Err(invalid(format!("|phi| must be < 1 for stationarity, got {phi}")));
        }
        if !(sigma_h > 0.0) || !sigma_h.is_finite() {
            return Err(invalid(format!("sigma_h must be > 0, got {sigma_h}")));
        }
        if !(sigma_v > 0.0) {
            return Err(invalid(format!("sigma_v must be > 0, got {sigma_v}")));
        }
        let obs_noise = StableParams::new(alpha, beta, sigma_v, 0.0)?;
        Ok(Self {
            mu,
            phi,
            sigma_h,
            obs_noise,
            sampler: StableSampler::new(obs_noise),
        })
    }

    /// The simulation-study setting: α = 1.75, β = 0.1, μ = −0.2, φ = 0.95,
    /// σ_h = 0.6, σ_v = 0.8.
    pub fn reference() -> Self {
        Self::new(-0.2, 0.95, 0.6, 1.75, 0.1, 0.8).expect("valid reference parameters")
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn sigma_h(&self) -> f64 {
        self.sigma_h
    }

    pub fn obs_noise(&self) -> &StableParams {
        &self.obs_noise
    }

    pub fn stationary_mean(&self) -> f64 {
        self.mu / (1.0 - self.phi)
    }

    pub fn stationary_variance(&self) -> f64 {
        self.sigma_h * self.sigma_h / (1.0 - self.phi * self.phi)
    }

    /// Gaussian log-density of h_next given h_prev.
    pub fn transition_logpdf(&self, h_next: f64, h_prev: f64) -> f64 {
        let z = (h_next - self.transition_mean(h_prev)) / self.sigma_h;
        -HALF_LN_2PI - self.sigma_h.ln() - 0.5 * z * z
    }
}

impl StateSpaceModel for SvmParams {
    fn initial_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.stationary_mean() + self.stationary_variance().sqrt() * z
    }

    #[inline]
    fn transition_mean(&self, prev: f64) -> f64 {
        self.mu + self.phi * prev
    }

    #[inline]
    fn transition_sample<R: Rng + ?Sized>(&self, prev: f64, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.transition_mean(prev) + self.sigma_h * z
    }

    #[inline]
    fn observe_sample<R: Rng + ?Sized>(&self, state: f64, rng: &mut R) -> f64 {
        (0.5 * state).exp() * self.sampler.sample(rng)
    }
}

/// A simulated path: `h[0..=T]` and `y[1..=T]` (stored as `y[0..T]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub h: Vec<f64>,
    pub y: Vec<f64>,
    pub seed: Option<u64>,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.y.len()
    }

    /// True states for t = 1..=T.
    pub fn states(&self) -> &[f64] {
        &self.h[1..]
    }

    pub fn validate(&self) -> Result<()> {
        if self.h.len() != self.y.len() + 1 {
            return Err(Error::LengthMismatch {
                left: self.h.len(),
                right: self.y.len() + 1,
            });
        }
        if let Some(t) = self.h.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("h[{t}]")));
        }
        if let Some(t) = self.y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("y[{}]", t + 1)));
        }
        Ok(())
    }
}

pub fn simulate<M: StateSpaceModel, R: Rng + ?Sized>(model: &M, horizon: usize, rng: &mut R) -> Result<Trajectory> {
    if horizon < 1 {
        return Err(invalid("horizon must be at least 1"));
    }
    let mut h = Vec::with_capacity(horizon + 1);
    let mut y = Vec::with_capacity(horizon);
    h.push(model.initial_sample(rng));
    for t in 1..=horizon {
        let next = model.transition_sample(h[t - 1], rng);
        h.push(next);
        y.push(model.observe_sample(next, rng));
    }
    let traj = Trajectory { h, y, seed: None };
    traj.validate()?;
    Ok(traj)
}

/// [`simulate`] on a fresh stream seeded with `seed`; the seed is recorded.
pub fn simulate_seeded<M: StateSpaceModel>(model: &M, horizon: usize, seed: u64) -> Result<Trajectory> {
    let mut rng = rng_from_seed(seed);
    let mut traj = simulate(model, horizon, &mut rng)?;
    traj.seed = Some(seed);
    Ok(traj)
}
