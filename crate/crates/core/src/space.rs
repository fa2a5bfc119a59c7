//! Box-shaped search spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-dimension lower/upper bounds of the feasible box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    /// Builds a space from explicit bounds. Requires `lower[j] < upper[j]`
    /// for every dimension and at least one dimension.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::invalid("search space needs at least one dimension"));
        }
        if lower.len() != upper.len() {
            return Err(Error::invalid(format!(
                "bound length mismatch: {} lower vs {} upper",
                lower.len(),
                upper.len()
            )));
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::invalid(format!(
                    "dimension {j}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Same `[lower, upper]` interval in every one of `dim` dimensions.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Saturates `x` into the box in place. The caller guarantees matching
    /// dimension; use [`clamp_to_bounds`] for a checked version.
    pub(crate) fn clamp_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            // NaN coordinates collapse onto the lower bound.
            *v = if v.is_nan() { *lo } else { v.clamp(*lo, *hi) };
        }
    }
}

/// Returns `position` saturated component-wise into `space`.
pub fn clamp_to_bounds(position: &[f64], space: &SearchSpace) -> Result<Vec<f64>> {
    if position.len() != space.dim() {
        return Err(Error::invalid(format!(
            "position has dimension {}, space has {}",
            position.len(),
            space.dim()
        )));
    }
    let mut out = position.to_vec();
    space.clamp_in_place(&mut out);
    Ok(out)
}
