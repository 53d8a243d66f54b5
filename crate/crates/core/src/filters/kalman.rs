//! Exact filtering for the scalar linear-Gaussian model
//!
//! ```text
//! x_t = μ + φ x_{t−1} + σ_h w_t
//! y_t = x_t + σ_y v_t
//! ```
//!
//! Used as the reference the particle filters are checked against.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::svm::StateSpaceModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearGaussian {
    pub mu: f64,
    pub phi: f64,
    pub sigma_h: f64,
    pub sigma_y: f64,
    pub prior_mean: f64,
    pub prior_var: f64,
}

impl LinearGaussian {
    /// Model started from its stationary law; requires |φ| < 1.
    pub fn new(mu: f64, phi: f64, sigma_h: f64, sigma_y: f64) -> Result<Self> {
        if !(phi.abs() < 1.0) {
            return Err(invalid(format!("stationary prior needs |phi| < 1, got {phi}")));
        }
        Self::with_prior(
            mu,
            phi,
            sigma_h,
            sigma_y,
            mu / (1.0 - phi),
            sigma_h * sigma_h / (1.0 - phi * phi),
        )
    }

    /// Model with an explicit Gaussian prior on x_0; any finite φ is allowed.
    pub fn with_prior(mu: f64, phi: f64, sigma_h: f64, sigma_y: f64, prior_mean: f64, prior_var: f64) -> Result<Self> {
        if !(sigma_h > 0.0 && sigma_y > 0.0) {
            return Err(invalid("noise scales must be positive"));
        }
        if !(prior_var >= 0.0) || !prior_mean.is_finite() || !mu.is_finite() || !phi.is_finite() {
            return Err(invalid(
                "prior and coefficients must be finite with nonnegative variance",
            ));
        }
        Ok(Self {
            mu,
            phi,
            sigma_h,
            sigma_y,
            prior_mean,
            prior_var,
        })
    }
}

impl StateSpaceModel for LinearGaussian {
    fn initial_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.prior_mean + self.prior_var.sqrt() * z
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
        let z: f64 = StandardNormal.sample(rng);
        state + self.sigma_y * z
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanOutput {
    /// E[x_t | y_1:t], t = 1..T.
    pub means: Vec<f64>,
    /// Var[x_t | y_1:t], t = 1..T.
    pub variances: Vec<f64>,
}

pub fn kalman_run(model: &LinearGaussian, data: &[f64]) -> Result<KalmanOutput> {
    if data.is_empty() {
        return Err(Error::Empty("observations"));
    }
    let obs_var = model.sigma_y * model.sigma_y;
    let state_var = model.sigma_h * model.sigma_h;
    let mut m = model.prior_mean;
    let mut p = model.prior_var;
    let mut means = Vec::with_capacity(data.len());
    let mut variances = Vec::with_capacity(data.len());
    for &y in data {
        let m_pred = model.mu + model.phi * m;
        let p_pred = model.phi * model.phi * p + state_var;
        let gain = p_pred / (p_pred + obs_var);
        m = m_pred + gain * (y - m_pred);
        p = (1.0 - gain) * p_pred;
        means.push(m);
        variances.push(p);
    }
    Ok(KalmanOutput { means, variances })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_three_steps() {
        // μ=0, φ=1, σ_h=1, σ_y=1, x_0 ~ N(0, 1), y = (1, −1, 2):
        // P⁻=2, K=2/3 → m=2/3,  P=2/3
        // P⁻=5/3, K=5/8 → m=−3/8, P=5/8
        // P⁻=13/8, K=13/21 → m=23/21, P=13/21
        let model = LinearGaussian::with_prior(0.0, 1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let out = kalman_run(&model, &[1.0, -1.0, 2.0]).unwrap();
        let means = [2.0 / 3.0, -3.0 / 8.0, 23.0 / 21.0];
        let vars = [2.0 / 3.0, 5.0 / 8.0, 13.0 / 21.0];
        for t in 0..3 {
            assert!((out.means[t] - means[t]).abs() < 1e-14);
            assert!((out.variances[t] - vars[t]).abs() < 1e-14);
        }
    }

    #[test]
    fn stationary_prior_rejects_unit_root() {
        assert!(LinearGaussian::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(LinearGaussian::new(0.0, 0.9, 0.5, 0.5).is_ok());
    }

    #[test]
    fn precise_observations_pin_the_state() {
        let model = LinearGaussian::new(0.0, 0.9, 0.5, 1e-6).unwrap();
        let ys = [0.3, -1.2, 2.5, 0.0];
        let out = kalman_run(&model, &ys).unwrap();
        for (m, y) in out.means.iter().zip(ys) {
            assert!((m - y).abs() < 1e-9);
        }
    }

    #[test]
    fn quiet_state_shrinks_geometrically() {
        let x0 = 2.0;
        let phi: f64 = 0.8;
        let model = LinearGaussian::with_prior(0.0, phi, 1e-9, 1.0, x0, 0.0).unwrap();
        let out = kalman_run(&model, &[5.0, -3.0, 10.0, 0.0]).unwrap();
        for (t, m) in out.means.iter().enumerate() {
            assert!((m - phi.powi(t as i32 + 1) * x0).abs() < 1e-9);
        }
    }
}
