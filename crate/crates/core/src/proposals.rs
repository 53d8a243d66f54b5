//! First-stage lookahead densities p̂(y_t | ξ(x_{t−1})) for the auxiliary filter.
//!
//! All three variants are Student-t with `dof` degrees of freedom (2 by
//! default), chosen because their tails dominate the Gaussian ABC kernel:
//!
//! - `CentralT`: `f_t(y)`; ignores the state.
//! - `ShiftedT`: `f_t(y − ξ)`, with ξ the transition mean.
//! - `NoncentralT`: the non-central t density with non-centrality ξ at `y`,
//!   evaluated through its power series in `x λ`.
//!
//! The ideal lookahead would be the observation density at ξ, which is not
//! available for stable noise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};

pub const DEFAULT_DOF: f64 = 2.0;

/// Relative size of the last series term at truncation.
const SERIES_RTOL: f64 = 1e-12;
const SERIES_MAX_TERMS: usize = 20_000;
/// Below this ratio of |sum| to the sum of magnitudes the alternating series
/// has lost too many digits and the integral form is used instead.
const CANCELLATION_LIMIT: f64 = 1e-6;
/// Largest r² for which the series terms stay comfortably inside f64 range.
const SERIES_MAX_R2: f64 = 1200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProposalKind {
    CentralT,
    ShiftedT,
    NoncentralT,
}

impl ProposalKind {
    pub fn label(&self) -> &'static str {
        match self {
            ProposalKind::CentralT => "central-t",
            ProposalKind::ShiftedT => "shifted-t",
            ProposalKind::NoncentralT => "noncentral-t",
        }
    }
}

impl std::str::FromStr for ProposalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "central-t" | "central_t" => Ok(ProposalKind::CentralT),
            "shifted-t" | "shifted_t" => Ok(ProposalKind::ShiftedT),
            "noncentral-t" | "noncentral_t" => Ok(ProposalKind::NoncentralT),
            other => Err(invalid(format!("unknown proposal '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProposalSpec {
    pub kind: ProposalKind,
    pub dof: f64,
}

impl ProposalSpec {
    pub fn new(kind: ProposalKind, dof: f64) -> Result<Self> {
        if !(dof > 0.0) || !dof.is_finite() {
            return Err(invalid(format!("degrees of freedom must be > 0, got {dof}")));
        }
        Ok(Self { kind, dof })
    }

    pub fn with_default_dof(kind: ProposalKind) -> Self {
        Self { kind, dof: DEFAULT_DOF }
    }
}

/// Anything that can act as the first-stage weighting function.
///
/// Only ratios of p̂ across particles and the matching second-stage
/// correction matter, so implementations may be unnormalized.
pub trait Lookahead: Sync {
    fn log_phat(&self, y: f64, xi: f64) -> Result<f64>;

    /// True when `log_phat` ignores `xi`, so one evaluation serves every particle.
    fn ignores_state(&self) -> bool {
        false
    }
}

/// A [`ProposalSpec`] with its normalizing constants precomputed.
#[derive(Debug, Clone, Copy)]
pub struct TProposal {
    spec: ProposalSpec,
    // log Γ((ν+1)/2) − log Γ(ν/2) − ½ log(νπ)
    central_const: f64,
    // (ν/2) log ν − ½ log π − log Γ(ν/2) + log Γ((ν+1)/2)
    nc_const: f64,
    // Γ((ν+2)/2) / Γ((ν+1)/2)
    nc_odd_lead: f64,
}

impl TProposal {
    pub fn new(spec: ProposalSpec) -> Self {
        let nu = spec.dof;
        let lg_half = ln_gamma(nu / 2.0);
        let lg_half_plus = ln_gamma((nu + 1.0) / 2.0);
        Self {
            spec,
            central_const: lg_half_plus - lg_half - 0.5 * (nu * PI).ln(),
            nc_const: 0.5 * nu * nu.ln() - 0.5 * PI.ln() - lg_half + lg_half_plus,
            nc_odd_lead: (ln_gamma((nu + 2.0) / 2.0) - lg_half_plus).exp(),
        }
    }

    pub fn spec(&self) -> &ProposalSpec {
        &self.spec
    }

    /// Central t log-density with the configured degrees of freedom.
    #[inline]
    pub fn log_t(&self, x: f64) -> f64 {
        let nu = self.spec.dof;
        self.central_const - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()
    }

    /// Non-central t log-density with non-centrality `lambda`.
    pub fn log_noncentral_t(&self, x: f64, lambda: f64) -> Result<f64> {
        let nu = self.spec.dof;
        let q = nu + x * x;
        let r = std::f64::consts::SQRT_2 * x * lambda / q.sqrt();
        let prefix = self.nc_const - 0.5 * lambda * lambda - 0.5 * (nu + 1.0) * q.ln();
        let r2 = r * r;
        if r2 <= SERIES_MAX_R2 {
            let (sum, magnitude) = self.series(r, r2)?;
            if sum > CANCELLATION_LIMIT * magnitude {
                return Ok(prefix + sum.ln());
            }
        }
        self.log_noncentral_t_integral(x, lambda)
    }

    // Σ_j [Γ((ν+j+1)/2) / Γ((ν+1)/2)] r^j / j!, split into even and odd chains.
    fn series(&self, r: f64, r2: f64) -> Result<(f64, f64)> {
        let nu = self.spec.dof;
        let mut even_term = 1.0;
        let mut odd_term = self.nc_odd_lead * r;
        let mut even = even_term;
        let mut odd = odd_term;
        let mut magnitude = even_term + odd_term.abs();
        let mut j = 0usize;
        loop {
            let jf = j as f64;
            let even_ratio = 0.5 * (nu + jf + 1.0) * r2 / ((jf + 1.0) * (jf + 2.0));
            let odd_ratio = 0.5 * (nu + jf + 2.0) * r2 / ((jf + 2.0) * (jf + 3.0));
            even_term *= even_ratio;
            odd_term *= odd_ratio;
            even += even_term;
            odd += odd_term;
            magnitude += even_term + odd_term.abs();
            j += 2;
            let last = even_term + odd_term.abs();
            if even_ratio < 1.0 && odd_ratio < 1.0 && last <= SERIES_RTOL * magnitude {
                return Ok((even + odd, magnitude));
            }
            if j >= SERIES_MAX_TERMS {
                return Err(Error::SeriesDivergence { terms: j });
            }
        }
    }

    /// Integral form f(x) = C e^{−λ²/2} ∫_0^∞ s^ν exp(−a s² + b s) ds with
    /// a = (ν + x²)/2 and b = xλ, used when the series cancels badly.
    fn log_noncentral_t_integral(&self, x: f64, lambda: f64) -> Result<f64> {
        let nu = self.spec.dof;
        let a = 0.5 * (nu + x * x);
        let b = x * lambda;
        let log_g = |s: f64| nu * s.ln() - a * s * s + b * s;
        let peak = (b + (b * b + 8.0 * a * nu).sqrt()) / (4.0 * a);
        let peak_log = log_g(peak);
        let width = 1.0 / (2.0 * a).sqrt();
        let upper = peak + 40.0 * width;
        let scaled = integrate(
            |s| if s <= 0.0 { 0.0 } else { (log_g(s) - peak_log).exp() },
            0.0,
            upper,
            QuadratureOptions::new(1e-13 * width).with_initial_panels(16),
        )?;
        let log_c = std::f64::consts::LN_2 + 0.5 * nu * nu.ln()
            - 0.5 * (2.0 * PI).ln()
            - 0.5 * nu * std::f64::consts::LN_2
            - ln_gamma(nu / 2.0);
        Ok(log_c - 0.5 * lambda * lambda + peak_log + scaled.ln())
    }
}

impl Lookahead for TProposal {
    #[inline]
    fn log_phat(&self, y: f64, xi: f64) -> Result<f64> {
        match self.spec.kind {
            ProposalKind::CentralT => Ok(self.log_t(y)),
            ProposalKind::ShiftedT => Ok(self.log_t(y - xi)),
            ProposalKind::NoncentralT => self.log_noncentral_t(y, xi),
        }
    }

    fn ignores_state(&self) -> bool {
        self.spec.kind == ProposalKind::CentralT
    }
}

/// log p̂(y | ξ) for a single evaluation.
pub fn log_phat(spec: &ProposalSpec, y: f64, xi: f64) -> Result<f64> {
    TProposal::new(*spec).log_phat(y, xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prop(kind: ProposalKind) -> TProposal {
        TProposal::new(ProposalSpec::with_default_dof(kind))
    }

    // Non-central t density from its defining mixture: X = (Z + λ)/S with
    // S² ~ χ²_ν/ν, integrated over s by composite Simpson.
    fn nct_density_by_mixture(x: f64, nu: f64, lambda: f64) -> f64 {
        let log_norm = std::f64::consts::LN_2 + 0.5 * nu * (0.5 * nu).ln() - ln_gamma(0.5 * nu);
        let g = |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            let chi = (log_norm + (nu - 1.0) * s.ln() - 0.5 * nu * s * s).exp();
            let z = x * s - lambda;
            s * (-0.5 * z * z).exp() / (2.0 * PI).sqrt() * chi
        };
        let n = 200_000;
        let hi = 30.0;
        let h = hi / n as f64;
        let mut acc = g(0.0) + g(hi);
        for i in 1..n {
            acc += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn t2_closed_form_values() {
        let c = prop(ProposalKind::CentralT);
        assert!((c.log_phat(0.0, 99.0).unwrap() + 1.039_720_770_839_917_9).abs() < 1e-12);
        let s = prop(ProposalKind::ShiftedT);
        assert!((s.log_phat(3.0, 3.0).unwrap() + 1.039_720_770_839_917_9).abs() < 1e-12);
        let nc = prop(ProposalKind::NoncentralT);
        let expected = (1.0 / (2.0 * 2f64.sqrt()) * 1.5f64.powf(-1.5)).ln();
        assert!((nc.log_phat(1.0, 0.0).unwrap() - expected).abs() < 1e-12);
        assert!((expected + 1.647_918_433_002_164_6).abs() < 1e-12);
    }

    #[test]
    fn noncentral_matches_mixture_quadrature() {
        let nc = prop(ProposalKind::NoncentralT);
        let v = nc.log_phat(2.0, 1.5).unwrap().exp();
        let oracle = nct_density_by_mixture(2.0, 2.0, 1.5);
        assert!((v - oracle).abs() < 1e-10, "{v} vs {oracle}");
        assert!((v - 0.229_608_076_065_050).abs() < 1e-12);
        for &(x, l, nu) in &[
            (-1.3, 2.0, 2.0),
            (0.4, -4.0, 2.0),
            (3.0, -4.5, 2.0),
            (-2.5, -6.0, 5.0),
            (1.0, 0.7, 0.8),
        ] {
            let p = TProposal::new(ProposalSpec::new(ProposalKind::NoncentralT, nu).unwrap());
            let v = p.log_noncentral_t(x, l).unwrap().exp();
            let oracle = nct_density_by_mixture(x, nu, l);
            assert!(
                ((v - oracle) / oracle).abs() < 1e-7,
                "x={x} λ={l} ν={nu}: {v} vs {oracle}"
            );
        }
    }

    #[test]
    fn series_and_integral_forms_agree() {
        let nc = prop(ProposalKind::NoncentralT);
        for &(x, l) in &[(0.5, 1.0), (-0.7, -2.0), (1.5, -1.2), (-2.0, 3.0), (4.0, 4.0)] {
            let s = nc.log_noncentral_t(x, l).unwrap();
            let q = nc.log_noncentral_t_integral(x, l).unwrap();
            assert!((s - q).abs() < 1e-9, "x={x} λ={l}: {s} vs {q}");
        }
    }

    #[test]
    fn strongly_cancelling_arguments_stay_finite() {
        let nc = prop(ProposalKind::NoncentralT);
        for &(x, l) in &[(50.0, -12.0), (-30.0, 20.0), (1e6, -8.0), (1e-3, -30.0)] {
            let v = nc.log_noncentral_t(x, l).unwrap();
            assert!(v.is_finite(), "x={x} λ={l}");
        }
    }

    #[test]
    fn each_density_integrates_to_one() {
        // central and shifted t₂ have tails ~ 1/x³; integrate on a wide grid
        // and add the analytic tail mass beyond it (1/(2L²) per side for t₂ is
        // the leading term, below the tolerance at L = 1e3).
        for (kind, xi) in [
            (ProposalKind::CentralT, 0.0),
            (ProposalKind::ShiftedT, -3.5),
            (ProposalKind::NoncentralT, -2.0),
            (ProposalKind::NoncentralT, 1.5),
        ] {
            let p = prop(kind);
            let total = integrate(
                |u| {
                    // x = tan(u) maps the line onto (−π/2, π/2)
                    let x = u.tan();
                    let jac = 1.0 + x * x;
                    p.log_phat(x, xi).unwrap().exp() * jac
                },
                -PI / 2.0 + 1e-12,
                PI / 2.0 - 1e-12,
                QuadratureOptions::new(1e-9).with_initial_panels(64),
            )
            .unwrap();
            assert!((total - 1.0).abs() < 1e-4, "{kind:?}: {total}");
        }
    }

    #[test]
    fn heavier_tails_than_gaussian_kernel() {
        let t = prop(ProposalKind::CentralT);
        let kernel = crate::kernels::KernelSpec::gaussian(0.25).unwrap();
        let ratio_at = |u: f64| t.log_phat(u, 0.0).unwrap() - kernel.log_kernel(u);
        assert!(ratio_at(20.0 * 0.25) > ratio_at(10.0 * 0.25));
        assert!(ratio_at(20.0 * 0.25) > 40.0);
    }

    #[test]
    fn rejects_bad_dof_and_parses_names() {
        assert!(ProposalSpec::new(ProposalKind::CentralT, 0.0).is_err());
        assert_eq!("shifted-t".parse::<ProposalKind>().unwrap(), ProposalKind::ShiftedT);
        assert!("gamma".parse::<ProposalKind>().is_err());
    }

    proptest! {
        #[test]
        fn shifted_is_translation_invariant(y in -20.0f64..20.0, xi in -10.0f64..10.0, c in -5.0f64..5.0) {
            let s = prop(ProposalKind::ShiftedT);
            let a = s.log_phat(y, xi).unwrap();
            let b = s.log_phat(y + c, xi + c).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn noncentral_at_zero_is_central(y in -40.0f64..40.0) {
            let nc = prop(ProposalKind::NoncentralT);
            let c = prop(ProposalKind::CentralT);
            prop_assert!((nc.log_phat(y, 0.0).unwrap() - c.log_phat(y, 0.0).unwrap()).abs() < 1e-10);
        }
    }
}
