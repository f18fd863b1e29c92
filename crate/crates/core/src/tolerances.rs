//! Named tolerance knobs with their defaults, overridable by key.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max distance of slope/2π from an integer for a quantized segment.
    pub slope: f64,
    /// Slopes farther than this from {0,1,2} and not bracketing a kink are unresolved.
    pub unresolved: f64,
    /// Intercept agreement for the ℓ₁ and ℓ₂ lines, nats.
    pub intercept: f64,
    /// Absolute slack added to `sigma · stdError` in bound checks.
    pub bound_slack: f64,
    /// Standard errors of statistical slack.
    pub sigma: f64,
    /// Below this (plus `sigma · stdError`), `L(0)` counts as zero.
    pub zero_le: f64,
    /// Residual at which the large-ε line is considered reached.
    pub asymptote: f64,
    /// Gaps with a larger slope residual are bisected.
    pub refine: f64,
    /// Bisections per grid gap before a non-integer slope is final.
    pub refine_depth: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slope: 0.1,
            unresolved: 0.15,
            intercept: 0.05,
            bound_slack: 0.02,
            sigma: 3.0,
            zero_le: 0.01,
            asymptote: 5e-3,
            refine: 0.02,
            refine_depth: 4,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 9] = [
        "slope",
        "unresolved",
        "intercept",
        "bound_slack",
        "sigma",
        "zero_le",
        "asymptote",
        "refine",
        "refine_depth",
    ];

    /// Overrides one knob by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |reason: String| LabError::InvalidParameter {
            name: "tolerance",
            reason,
        };
        if key == "refine_depth" {
            self.refine_depth = value
                .trim()
                .parse()
                .map_err(|e| bad(format!("refine_depth={value}: {e}")))?;
            return Ok(());
        }
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|e| bad(format!("{key}={value}: {e}")))?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(bad(format!("{key}={value} must be finite and nonnegative")));
        }
        let slot = match key {
            "slope" => &mut self.slope,
            "unresolved" => &mut self.unresolved,
            "intercept" => &mut self.intercept,
            "bound_slack" => &mut self.bound_slack,
            "sigma" => &mut self.sigma,
            "zero_le" => &mut self.zero_le,
            "asymptote" => &mut self.asymptote,
            "refine" => &mut self.refine,
            _ => return Err(bad(format!("unknown key {key:?}"))),
        };
        *slot = v;
        Ok(())
    }

    /// Parses `KEY=VAL`.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| LabError::InvalidParameter {
            name: "tolerance",
            reason: format!("expected KEY=VAL, got {assignment:?}"),
        })?;
        self.set(k.trim(), v)
    }
}
