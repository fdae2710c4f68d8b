//! Hardening laws: Voce isotropic saturation and Chaboche kinematic
//! hardening with Armstrong-Frederick recall.
//!
//! The yield stress evolves as
//!
//! ```text
//! sigma_y(k) = sigma0 + (sigma_inf - sigma0) * (1 - exp(-a k))
//! ```
//!
//! and each backstress component follows
//!
//! ```text
//! beta_k_dot = (2/3) h_k eps_p_dot - gamma_dot b_k beta_k
//! ```
//!
//! where b = 0 degenerates to the linear Prager law. Under monotonic uniaxial
//! flow with b > 0 the axial backstress contribution saturates at h/b; the
//! analytic saturation oracle lives here so the drivers and the test suites
//! share one implementation.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HardeningError {
    #[error("invalid hardening parameter: {0}")]
    InvalidParameter(String),
    #[error("backstress component {index} has zero recall; no saturation exists")]
    NoSaturation { index: usize },
}

/// Voce isotropic hardening parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicHardening {
    pub sigma0: f64,
    pub sigma_inf: f64,
    pub a: f64,
}

impl IsotropicHardening {
    pub fn new(sigma0: f64, sigma_inf: f64, a: f64) -> Result<Self, HardeningError> {
        if !(sigma0 > 0.0) {
            return Err(HardeningError::InvalidParameter(format!(
                "sigma0 must be positive, got {sigma0}"
            )));
        }
        if !(sigma_inf >= sigma0) {
            return Err(HardeningError::InvalidParameter(format!(
                "sigma_inf ({sigma_inf}) must be >= sigma0 ({sigma0})"
            )));
        }
        if !(a >= 0.0) {
            return Err(HardeningError::InvalidParameter(format!(
                "saturation rate a must be non-negative, got {a}"
            )));
        }
        Ok(Self { sigma0, sigma_inf, a })
    }

    /// Constant yield stress (no isotropic hardening).
    pub fn perfect(sigma_y: f64) -> Result<Self, HardeningError> {
        Self::new(sigma_y, sigma_y, 0.0)
    }

    /// Current yield stress. Contract: k >= 0.
    pub fn yield_stress(&self, k: f64) -> f64 {
        assert!(k >= 0.0, "plastic internal variable must be non-negative, got {k}");
        self.sigma0 + (self.sigma_inf - self.sigma0) * (1.0 - (-self.a * k).exp())
    }

    /// d sigma_y / dk. Contract: k >= 0.
    pub fn yield_stress_slope(&self, k: f64) -> f64 {
        assert!(k >= 0.0, "plastic internal variable must be non-negative, got {k}");
        self.a * (self.sigma_inf - self.sigma0) * (-self.a * k).exp()
    }
}

/// One Armstrong-Frederick backstress component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackstressComponent {
    pub h: f64,
    pub b: f64,
}

impl BackstressComponent {
    pub fn new(h: f64, b: f64) -> Result<Self, HardeningError> {
        if !(h >= 0.0) {
            return Err(HardeningError::InvalidParameter(format!(
                "hardening modulus h must be non-negative, got {h}"
            )));
        }
        if !(b >= 0.0) {
            return Err(HardeningError::InvalidParameter(format!(
                "recall parameter b must be non-negative, got {b}"
            )));
        }
        Ok(Self { h, b })
    }
}

/// Ordered set of backstress components; empty means no kinematic hardening.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChabocheSet {
    pub components: Vec<BackstressComponent>,
}

impl ChabocheSet {
    pub fn new(components: Vec<BackstressComponent>) -> Self {
        Self { components }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Asymptotic axial flow-stress contribution sum(h_k / b_k) under
    /// monotonic uniaxial flow. Errors if any component has b = 0 (a Prager
    /// component grows without bound).
    pub fn saturated_amplitude(&self) -> Result<f64, HardeningError> {
        let mut total = 0.0;
        for (index, c) in self.components.iter().enumerate() {
            if c.b == 0.0 {
                return Err(HardeningError::NoSaturation { index });
            }
            total += c.h / c.b;
        }
        Ok(total)
    }
}
