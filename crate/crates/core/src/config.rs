//! Numerical tolerances shared by the checks and the command-line reports.

use serde::{Deserialize, Serialize};

/// Environment variable holding a positive factor applied to every tolerance.
pub const TOLERANCE_SCALE_VAR: &str = "ZEROCURVE_TOL_OVERRIDE";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `|det T - 1|` for transfer matrices.
    pub det: f64,
    /// Numerical transfer matrices against closed forms.
    pub closed_form: f64,
    /// Time and joint cocycle residuals.
    pub cocycle: f64,
    /// m-function shift property and cutoff sensitivity.
    pub m_shift: f64,
    /// Composition law of the Möbius action.
    pub lft: f64,
    /// Relative bound-state drift along a KdV evolution.
    pub isospectral: f64,
    /// Finite-difference residual of the K equation.
    pub obstruction: f64,
    /// `sup |det(H^V_xx) - 4V|`.
    pub convert: f64,
    /// Evolved soliton against the travelling profile.
    pub soliton: f64,
    /// Drift of `∫V dx` under the KdV solver.
    pub mass: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            det: 1e-8,
            closed_form: 1e-7,
            cocycle: 1e-6,
            m_shift: 1e-5,
            lft: 1e-10,
            isospectral: 0.01,
            obstruction: 1e-4,
            convert: 1e-4,
            soliton: 1e-3,
            mass: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("tolerance `{name}` must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{TOLERANCE_SCALE_VAR} must be a positive number, got `{0}`")]
    BadScale(String),
}

impl Tolerances {
    pub fn entries(&self) -> [(&'static str, f64); 10] {
        [
            ("det", self.det),
            ("closed_form", self.closed_form),
            ("cocycle", self.cocycle),
            ("m_shift", self.m_shift),
            ("lft", self.lft),
            ("isospectral", self.isospectral),
            ("obstruction", self.obstruction),
            ("convert", self.convert),
            ("soliton", self.soliton),
            ("mass", self.mass),
        ]
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self
            .entries()
            .into_iter()
            .find(|(_, v)| !(v.is_finite() && *v > 0.0))
        {
            Some((name, value)) => Err(ConfigError::NonPositive { name, value }),
            None => Ok(()),
        }
    }

    pub fn scaled(&self, factor: f64) -> Tolerances {
        Tolerances {
            det: self.det * factor,
            closed_form: self.closed_form * factor,
            cocycle: self.cocycle * factor,
            m_shift: self.m_shift * factor,
            lft: self.lft * factor,
            isospectral: self.isospectral * factor,
            obstruction: self.obstruction * factor,
            convert: self.convert * factor,
            soliton: self.soliton * factor,
            mass: self.mass * factor,
        }
    }

    /// Applies the scale from [`TOLERANCE_SCALE_VAR`] if it is set.
    pub fn with_env_scale(&self) -> Result<Tolerances, ConfigError> {
        match std::env::var(TOLERANCE_SCALE_VAR) {
            Ok(raw) => self.with_scale_text(&raw),
            Err(_) => Ok(*self),
        }
    }

    pub fn with_scale_text(&self, raw: &str) -> Result<Tolerances, ConfigError> {
        match raw.trim().parse::<f64>() {
            Ok(factor) if factor.is_finite() && factor > 0.0 => Ok(self.scaled(factor)),
            _ => Err(ConfigError::BadScale(raw.to_string())),
        }
    }
}
