//! Nearest-neighbour distance profiles.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Strictly positive distances sorted in descending order, at least two of them.
///
/// Ties are kept: every formula built on a profile depends only on the
/// multiset of distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfile {
    d: Vec<f64>,
}

impl DistanceProfile {
    /// Validates and sorts `ds` into a profile.
    pub fn new(mut ds: Vec<f64>) -> Result<Self> {
        if ds.len() < 2 {
            return Err(Error::TooFewPoints(ds.len()));
        }
        if let Some((index, &value)) = ds
            .iter()
            .enumerate()
            .find(|(_, &x)| !(x.is_finite() && x > 0.0))
        {
            return Err(Error::NonPositiveDistance { index, value });
        }
        ds.sort_unstable_by(|a, b| b.total_cmp(a));
        Ok(Self { d: ds })
    }

    pub fn distances(&self) -> &[f64] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    /// Always false; profiles hold at least two entries.
    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Natural logs of the distances, in profile (descending) order.
    pub fn logs(&self) -> Vec<f64> {
        self.d.iter().map(|x| x.ln()).collect()
    }

    /// Mean distance `μ`.
    pub fn mean(&self) -> f64 {
        crate::sum::sum(self.d.iter().copied()) / self.d.len() as f64
    }

    /// The profile divided by its mean, so the step density on `[0, 1)` has unit mass.
    pub fn normalized(&self) -> DistanceProfile {
        let mu = self.mean();
        DistanceProfile {
            d: self.d.iter().map(|x| x / mu).collect(),
        }
    }

    /// Every distance multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<DistanceProfile> {
        DistanceProfile::new(self.d.iter().map(|x| x * lambda).collect())
    }

    /// Every distance raised to the power `r > 0`.
    pub fn powered(&self, r: f64) -> Result<DistanceProfile> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("power must be positive, got {r}")));
        }
        DistanceProfile::new(self.d.iter().map(|x| x.powf(r)).collect())
    }
}

/// Builds a [`DistanceProfile`] from raw distances.
pub fn make_profile(ds: &[f64]) -> Result<DistanceProfile> {
    DistanceProfile::new(ds.to_vec())
}
