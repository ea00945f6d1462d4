use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Piecewise-linear cutoff in the distance `t` above the reference surface:
/// `α = 1` for `t ≤ δ`, linear descent on `[δ, γ]`, `α = 0` for `t ≥ γ`.
///
/// With this orientation the flattening transform moves the reference
/// surface onto the sampled one and leaves the plane `x3 = h` fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffFn {
    delta: f64,
    gamma: f64,
}

impl CutoffFn {
    /// Requires `0 ≤ δ < γ`. The slope bound `1/(γ−δ) < 1/(γ−2δ)` additionally
    /// needs `δ < γ/2`; see [`CutoffFn::meets_slope_bound`].
    pub fn new(delta: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Constraint(format!("cutoff gap gamma must be positive, got {gamma}")));
        }
        if !(delta >= 0.0 && delta < gamma) {
            return Err(Error::Constraint(format!("need 0 <= delta < gamma, got delta = {delta}, gamma = {gamma}")));
        }
        Ok(Self { delta, gamma })
    }

    /// The cutoff with `δ = 0`: a linear blend over the whole gap, which turns
    /// the transform into a boundary-fitted vertical stretch.
    pub fn boundary_fitted(gamma: f64) -> Result<Self> {
        Self::new(0.0, gamma)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= self.delta {
            1.0
        } else if t >= self.gamma {
            0.0
        } else {
            (self.gamma - t) / (self.gamma - self.delta)
        }
    }

    /// Derivative, taking the left limit at the kinks.
    pub fn slope(&self, t: f64) -> f64 {
        if t <= self.delta || t > self.gamma {
            0.0
        } else {
            -1.0 / (self.gamma - self.delta)
        }
    }

    pub fn max_slope(&self) -> f64 {
        1.0 / (self.gamma - self.delta)
    }

    /// `sup|α′| < 1/(γ − 2δ)`, which holds for every `δ ∈ (0, γ/2)`.
    pub fn meets_slope_bound(&self) -> bool {
        self.delta > 0.0 && 2.0 * self.delta < self.gamma && self.max_slope() < 1.0 / (self.gamma - 2.0 * self.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_and_support() {
        let c = CutoffFn::new(0.1, 1.0).unwrap();
        assert_eq!(c.value(0.0), 1.0);
        assert_eq!(c.value(0.1), 1.0);
        assert_eq!(c.value(1.0), 0.0);
        assert_eq!(c.value(3.0), 0.0);
        assert!((c.value(0.55) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn slope_bound_holds_below_half_gap() {
        for k in 1..50 {
            let delta = 0.5 * k as f64 / 50.0;
            let c = CutoffFn::new(delta, 1.0).unwrap();
            assert!(c.meets_slope_bound(), "delta = {delta}");
        }
        assert!(!CutoffFn::new(0.6, 1.0).unwrap().meets_slope_bound());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CutoffFn::new(-0.1, 1.0).is_err());
        assert!(CutoffFn::new(1.0, 1.0).is_err());
        assert!(CutoffFn::new(0.1, 0.0).is_err());
    }
}
