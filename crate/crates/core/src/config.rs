//! Numerical tolerances shared by every analysis.

use serde::{Deserialize, Serialize};

/// Environment variable that multiplies every tolerance.
pub const TOLERANCE_SCALE_ENV: &str = "WLAB_TOLERANCE_SCALE";

/// All tolerance knobs in one record.
///
/// Floating point only enters through root finding, residues and
/// quadrature; everything downstream of multiplicity extraction is exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Identity of two points on the sphere (relative to `max(1, |a|, |b|)`).
    pub eps_pt: f64,
    /// Root residual bound used to validate computed roots.
    pub eps_res: f64,
    /// Relative threshold under which a Euclidean remainder counts as zero.
    pub eps_gcd: f64,
    /// Period condition threshold, relative to the coefficient scale of the data.
    pub eps_period: f64,
    /// A coefficient that is this small relative to the magnitude of the
    /// terms that produced it is treated as an exact cancellation.
    pub eps_coeff: f64,
    /// Relative stopping tolerance of the adaptive curvature quadrature.
    pub quad_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_pt: 1e-8,
            eps_res: 1e-9,
            eps_gcd: 1e-8,
            eps_period: 1e-10,
            eps_coeff: 1e-11,
            quad_rel: 1e-3,
        }
    }
}

impl Tolerances {
    /// Every tolerance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            eps_pt: self.eps_pt * factor,
            eps_res: self.eps_res * factor,
            eps_gcd: self.eps_gcd * factor,
            eps_period: self.eps_period * factor,
            eps_coeff: self.eps_coeff * factor,
            quad_rel: self.quad_rel * factor,
        }
    }

    /// Defaults scaled by `WLAB_TOLERANCE_SCALE` when it is set to a positive number.
    pub fn from_env() -> Self {
        let base = Self::default();
        match std::env::var(TOLERANCE_SCALE_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
        {
            Some(f) if f.is_finite() && f > 0.0 => base.scaled(f),
            _ => base,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_is_uniform() {
        let t = Tolerances::default().scaled(10.0);
        assert_eq!(t.eps_pt, 1e-7);
        assert_eq!(t.quad_rel, 1e-2);
    }
}
