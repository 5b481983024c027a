use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable that overrides the default `abs_tol`.
pub const TOL_ENV: &str = "LORCURV_TOL";

/// Numerical tolerances. `classification_tol` drives every sign/zero
/// decision (discriminants, pivots, signatures); the other two bound
/// residual checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub classification_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            classification_tol: 1e-7,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(self) -> Result<Self> {
        for (name, v) in [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("classification_tol", self.classification_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(self)
    }

    /// Defaults, with `abs_tol` taken from `LORCURV_TOL` when set.
    pub fn from_env() -> Result<Self> {
        let mut t = Self::default();
        if let Ok(s) = std::env::var(TOL_ENV) {
            t.abs_tol = s.trim().parse().map_err(|_| {
                Error::InvalidTolerance(format!("{TOL_ENV}={s:?} is not a number"))
            })?;
        }
        t.validate()
    }

    /// `|a - b| <= abs_tol + rel_tol * max(|a|, |b|)`.
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }
}
