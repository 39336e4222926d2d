//! Exact nearest-neighbour distances under the Euclidean metric.

mod brute;
mod kdtree;

pub use kdtree::KdTree;

use crate::error::{Error, Result};
use crate::profile::DistanceProfile;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// `k ≥ 2` points in `R^m`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coords: Vec<f64>,
    dim: usize,
}

impl PointCloud {
    pub fn new(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("point dimension must be positive".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not split into rows of {dim}",
                coords.len()
            )));
        }
        let k = coords.len() / dim;
        if k < 2 {
            return Err(Error::TooFewPoints(k));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite coordinate in point {}",
                pos / dim
            )));
        }
        Ok(Self { coords, dim })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::InvalidArgument(format!(
                "row {i} has {} coordinates, expected {dim}",
                rows[i].len()
            )));
        }
        Self::new(rows.concat(), dim)
    }

    /// One-dimensional cloud.
    pub fn from_values(xs: Vec<f64>) -> Result<Self> {
        Self::new(xs, 1)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Drops exact duplicate rows, keeping the first occurrence of each.
    pub fn dedupe(&self) -> Result<Self> {
        let mut seen = HashSet::with_capacity(self.len());
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.points() {
            // -0.0 and 0.0 are the same point
            let key: Vec<u64> = p.iter().map(|c| (c + 0.0).to_bits()).collect();
            if seen.insert(key) {
                coords.extend_from_slice(p);
            }
        }
        Self::new(coords, self.dim)
    }

    /// Applies `x → a·x + b` to every coordinate.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        Self::new(self.coords.iter().map(|x| a * x + b).collect(), self.dim)
    }
}

/// 1-D distance definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Distance from each point to its nearest neighbour.
    #[default]
    Nearest,
    /// The `k − 1` gaps between consecutive sorted points.
    Consecutive,
}

/// Nearest-neighbour search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// k-d tree up to [`KDTREE_MAX_DIM`] dimensions, brute force above.
    #[default]
    Auto,
    KdTree,
    Brute,
}

/// Highest dimension for which [`Engine::Auto`] picks the k-d tree.
pub const KDTREE_MAX_DIM: usize = 10;

/// Squared Euclidean distance, accumulated in coordinate order.
#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

/// Per-point nearest-neighbour distances, indexed like the cloud's rows.
pub fn nn_per_point(pc: &PointCloud, engine: Engine) -> Result<Vec<f64>> {
    let use_tree = match engine {
        Engine::Auto => pc.dim() <= KDTREE_MAX_DIM,
        Engine::KdTree => true,
        Engine::Brute => false,
    };
    let squared = if use_tree {
        KdTree::build(pc).nearest_all()
    } else {
        brute::nearest_all(pc)
    };
    if let Some(index) = squared.iter().position(|&d| d == 0.0) {
        return Err(Error::DuplicatePoint { index });
    }
    Ok(squared.into_iter().map(f64::sqrt).collect())
}

/// Nearest-neighbour distance profile of a point cloud.
pub fn nn_distances(pc: &PointCloud, engine: Engine) -> Result<DistanceProfile> {
    DistanceProfile::new(nn_per_point(pc, engine)?)
}

/// Distance profile of real numbers: one sort, then adjacent gaps.
pub fn nn_distances_1d(xs: &[f64], mode: Mode) -> Result<DistanceProfile> {
    if xs.len() < 2 {
        return Err(Error::TooFewPoints(xs.len()));
    }
    if let Some(pos) = xs.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite value at index {pos}")));
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_unstable_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let gaps: Vec<f64> = order.windows(2).map(|w| xs[w[1]] - xs[w[0]]).collect();
    if let Some(g) = gaps.iter().position(|&g| g == 0.0) {
        return Err(Error::DuplicatePoint {
            index: order[g + 1].max(order[g]),
        });
    }
    let ds = match mode {
        Mode::Consecutive => gaps,
        Mode::Nearest => {
            let k = xs.len();
            (0..k)
                .map(|i| match i {
                    0 => gaps[0],
                    _ if i == k - 1 => gaps[k - 2],
                    _ => gaps[i - 1].min(gaps[i]),
                })
                .collect()
        }
    };
    DistanceProfile::new(ds)
}
