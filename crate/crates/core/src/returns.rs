//! Log returns of price series and their sliding-window embeddings.

use crate::error::{Error, Result};
use crate::io::fmt_num;
use crate::nn::{nn_distances, Engine, PointCloud};
use crate::slide::rho12;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Log returns `u_i = ln(x_{i+1}/x_i)` of a price series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub u: Vec<f64>,
    pub label: String,
}

impl ReturnSeries {
    pub fn new(u: Vec<f64>, label: impl Into<String>) -> Self {
        Self { u, label: label.into() }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// The series under `u → a·u + b`.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        Self::new(self.u.iter().map(|x| a * x + b).collect(), self.label.clone())
    }
}

pub fn log_returns(prices: &[f64], label: impl Into<String>) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(Error::TooFewPoints(prices.len()));
    }
    if let Some(i) = prices.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::NonPositivePrice {
            line: i + 1,
            value: prices[i],
        });
    }
    let u = prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    Ok(ReturnSeries::new(u, label))
}

/// How many windows an embedding uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Windows {
    /// Every maximal window: `len − n + 1`.
    #[default]
    All,
    /// The first `r` windows.
    Count(usize),
}

impl Windows {
    fn resolve(self, len: usize, depth: usize) -> Result<usize> {
        let too_short = || Error::SeriesTooShort {
            len,
            depth,
            windows: match self {
                Windows::All => 1,
                Windows::Count(r) => r,
            },
        };
        if depth == 0 || len < depth {
            return Err(too_short());
        }
        match self {
            Windows::All => Ok(len - depth + 1),
            Windows::Count(r) if r >= 1 && len >= depth + r - 1 => Ok(r),
            Windows::Count(_) => Err(too_short()),
        }
    }
}

/// Overlapping windows `(u_j, …, u_{j+n−1})` as points of `Rⁿ`.
pub fn delay_embed(rs: &ReturnSeries, n: usize, windows: Windows) -> Result<PointCloud> {
    let r = windows.resolve(rs.len(), n)?;
    let coords = rs.u.windows(n).take(r).flatten().copied().collect();
    PointCloud::new(coords, n)
}

/// One row of a ρ-curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoRow {
    pub n: usize,
    pub rho1: f64,
    pub rho2: f64,
    pub windows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoCurve {
    pub label: String,
    pub rows: Vec<RhoRow>,
}

impl RhoCurve {
    pub const CSV_HEADER: &'static str = "n,rho1,rho2,windows";

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.n, fmt_num(r.rho1), fmt_num(r.rho2), r.windows));
        }
        s
    }
}

fn embedded_rhos(rs: &ReturnSeries, n: usize, windows: Windows) -> Result<RhoRow> {
    let pc = delay_embed(rs, n, windows)?;
    let (rho1, rho2) = rho12(&nn_distances(&pc, Engine::Auto)?);
    Ok(RhoRow {
        n,
        rho1,
        rho2,
        windows: pc.len(),
    })
}

/// `ρ₁` and `ρ₂` of the embedding at every depth in `depths`, which must be
/// strictly increasing.
pub fn rho_curve(rs: &ReturnSeries, depths: &[usize], windows: Windows) -> Result<RhoCurve> {
    if depths.is_empty() {
        return Err(Error::InvalidArgument("no embedding depths requested".into()));
    }
    if depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("embedding depths must be strictly increasing".into()));
    }
    let rows = depths
        .par_iter()
        .map(|&n| embedded_rhos(rs, n, windows))
        .collect::<Result<Vec<_>>>()?;
    Ok(RhoCurve {
        label: rs.label.clone(),
        rows,
    })
}

/// A labelled `(ρ₂, ρ₁)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub label: String,
    pub rho2: f64,
    pub rho1: f64,
}

impl ScatterPoint {
    pub const CSV_HEADER: &'static str = "label,rho2,rho1";
}

/// Writes scatter points as CSV; labels are quoted when needed.
pub fn scatter_csv(points: &[ScatterPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(ScatterPoint::CSV_HEADER.split(','))
        .and_then(|_| {
            points.iter().try_for_each(|p| {
                w.write_record([p.label.clone(), fmt_num(p.rho2), fmt_num(p.rho1)])
            })
        })
        .expect("writing to memory cannot fail");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

/// `(ρ₂(T_n), ρ₁(T_n))` over all windows.
pub fn scatter_point(rs: &ReturnSeries, n: usize) -> Result<ScatterPoint> {
    let row = embedded_rhos(rs, n, Windows::All)?;
    Ok(ScatterPoint {
        label: rs.label.clone(),
        rho2: row.rho2,
        rho1: row.rho1,
    })
}
