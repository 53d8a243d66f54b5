//! ABC smoothing kernels `K_ε(u) = ε⁻¹ K(u/ε)`, evaluated in log space.
//!
//! Zero kernel mass is represented by `f64::NEG_INFINITY`, which the weight
//! arithmetic in [`crate::filters::weights`] treats as an exact zero.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Gaussian,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub epsilon: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(invalid(format!("kernel bandwidth must be > 0, got {epsilon}")));
        }
        Ok(Self { kind, epsilon })
    }

    pub fn gaussian(epsilon: f64) -> Result<Self> {
        Self::new(KernelKind::Gaussian, epsilon)
    }

    pub fn uniform(epsilon: f64) -> Result<Self> {
        Self::new(KernelKind::Uniform, epsilon)
    }

    #[inline]
    pub fn log_kernel(&self, u: f64) -> f64 {
        log_kernel(self, u)
    }
}

/// log K_ε(u): the N(0, ε²) log-density, or log(1/2ε) on `|u| ≤ ε` for the
/// uniform kernel.
#[inline]
pub fn log_kernel(spec: &KernelSpec, u: f64) -> f64 {
    let eps = spec.epsilon;
    match spec.kind {
        KernelKind::Gaussian => {
            let z = u / eps;
            let v = -HALF_LN_2PI - eps.ln() - 0.5 * z * z;
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        }
        KernelKind::Uniform => {
            if u.abs() <= eps {
                -(2.0 * eps).ln()
            } else {
                f64::NEG_INFINITY
            }
        }
    }
}
