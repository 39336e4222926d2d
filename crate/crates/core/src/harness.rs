//! Monte Carlo experiments: replicate summaries, reference clouds, a
//! normality test and tangibility checks.
//!
//! Replicate `r` always draws from stream `r` of the experiment seed and
//! results are reduced in replicate order, so every output is independent of
//! the thread count.

use crate::error::{Error, Result};
use crate::generators::{draw, draw_series, sample_stream, stream_rng, SourceKind, SourceSpec};
use crate::io::fmt_num;
use crate::nn::{nn_distances, nn_distances_1d, Engine, Mode};
use crate::returns::{delay_embed, ReturnSeries, ScatterPoint, Windows};
use crate::slide::rho12;
use crate::special::{dimension_from_rho2, tangible_target};
use crate::sum::mean_sd;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Mean and SD of `ρ₁`, `ρ₂` over replicate samples of one source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub kind: SourceKind,
    pub size: usize,
    pub reps: usize,
    pub seed: u64,
    pub mu1: f64,
    pub sigma1: f64,
    pub mu2: f64,
    pub sigma2: f64,
}

impl ExperimentSummary {
    pub const CSV_HEADER: &'static str = "kind,m,size,reps,mu1,sigma1,mu2,sigma2,dim_est1,dim_est2";

    /// `1/μ₁`.
    pub fn dim_est1(&self) -> f64 {
        1.0 / self.mu1
    }

    /// Dimension implied by `μ₂`; `None` when `μ₂ ≥ 0`.
    pub fn dim_est2(&self) -> Option<f64> {
        dimension_from_rho2(self.mu2).ok()
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.kind.name(),
            self.kind.dim(),
            self.size,
            self.reps,
            fmt_num(self.mu1),
            fmt_num(self.sigma1),
            fmt_num(self.mu2),
            fmt_num(self.sigma2),
            fmt_num(self.dim_est1()),
            self.dim_est2().map(fmt_num).unwrap_or_default(),
        )
    }
}

/// Summary rows as CSV. An undefined `dim_est2` is left empty.
pub fn summaries_csv(rows: &[ExperimentSummary]) -> String {
    let mut s = format!("{}\n", ExperimentSummary::CSV_HEADER);
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// `(ρ₁, ρ₂)` of each replicate, in replicate order.
pub fn replicate_values(kind: SourceKind, size: usize, reps: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let spec = SourceSpec::new(kind, size, Some(seed));
    spec.validate()?;
    (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let pc = sample_stream(&spec, r)?;
            Ok(rho12(&nn_distances(&pc, Engine::Auto)?))
        })
        .collect()
}

pub fn replicate(kind: SourceKind, size: usize, reps: usize, seed: u64) -> Result<ExperimentSummary> {
    if reps < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 replicates, got {reps}")));
    }
    let values = replicate_values(kind, size, reps, seed)?;
    let (r1, r2): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
    let (mu1, sigma1) = mean_sd(&r1);
    let (mu2, sigma2) = mean_sd(&r2);
    Ok(ExperimentSummary {
        kind,
        size,
        reps,
        seed,
        mu1,
        sigma1,
        mu2,
        sigma2,
    })
}

/// The ten standard sources: uniform, normal, exponential, `1/(2√x)`,
/// uniform cubes of dimension 2 to 4, bivariate normal, Cantor, Sierpinski.
pub fn standard_rows() -> Vec<SourceKind> {
    vec![
        SourceKind::UniformCube { m: 1 },
        SourceKind::Normal,
        SourceKind::Exponential,
        SourceKind::SqrtPower,
        SourceKind::UniformCube { m: 2 },
        SourceKind::UniformCube { m: 3 },
        SourceKind::UniformCube { m: 4 },
        SourceKind::BivariateNormal,
        SourceKind::Cantor,
        SourceKind::Sierpinski,
    ]
}

/// Runs [`replicate`] for every row with the same size, count and seed.
pub fn table_run(rows: &[SourceKind], size: usize, reps: usize, seed: u64) -> Result<Vec<ExperimentSummary>> {
    rows.iter().map(|&k| replicate(k, size, reps, seed)).collect()
}

/// Relative discrepancy allowed by [`tangibility_check`] by default.
pub const TANGIBILITY_TOLERANCE: f64 = 0.03;

/// A summary compared against the limits of a tangible source of dimension `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangibilityReport {
    pub d: f64,
    pub mu1: f64,
    pub target1: f64,
    pub mu2: f64,
    pub target2: f64,
    pub dim_est1: f64,
    pub dim_est2: f64,
    /// `|1/μ₁ − d| / d`.
    pub discrepancy1: f64,
    /// `|dim(μ₂) − d| / d`.
    pub discrepancy2: f64,
    pub tolerance: f64,
    pub consistent: bool,
}

pub fn tangibility_check(summary: &ExperimentSummary, d: f64, tolerance: f64) -> Result<TangibilityReport> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("dimension must be positive, got {d}")));
    }
    let dim_est1 = summary.dim_est1();
    let dim_est2 = dimension_from_rho2(summary.mu2)?;
    let discrepancy1 = (dim_est1 - d).abs() / d;
    let discrepancy2 = (dim_est2 - d).abs() / d;
    Ok(TangibilityReport {
        d,
        mu1: summary.mu1,
        target1: 1.0 / d,
        mu2: summary.mu2,
        target2: tangible_target(d, 2),
        dim_est1,
        dim_est2,
        discrepancy1,
        discrepancy2,
        tolerance,
        consistent: discrepancy1 <= tolerance && discrepancy2 <= tolerance,
    })
}

/// Where the samples of a reference cloud come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Fixed { kind: SourceKind },
    /// Stable laws with `α ~ U(1, 2)` and `β ~ U(0, 1)` drawn per sample.
    StableRandom,
}

/// One sample's statistics in a reference cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub label: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub rho2: f64,
    pub rho1: f64,
}

impl From<&CloudPoint> for ScatterPoint {
    fn from(p: &CloudPoint) -> Self {
        ScatterPoint {
            label: p.label.clone(),
            rho2: p.rho2,
            rho1: p.rho1,
        }
    }
}

/// Statistics of one series: the 1-D nearest-neighbour profile, or the
/// depth-`n` embedding when `embed_n` is given.
fn series_stats(u: &[f64], embed_n: Option<usize>) -> Result<(f64, f64)> {
    let profile = match embed_n {
        None => nn_distances_1d(u, Mode::Nearest)?,
        Some(n) => {
            let rs = ReturnSeries::new(u.to_vec(), "");
            nn_distances(&delay_embed(&rs, n, Windows::All)?, Engine::Auto)?
        }
    };
    Ok(rho12(&profile))
}

/// `count` points `(ρ₂, ρ₁)`, each from one sample of `sample_len` draws.
///
/// With `embed_n` the draws are treated as a return series and embedded at
/// that depth, which requires a one-dimensional source.
pub fn cloud(
    family: Family,
    count: usize,
    embed_n: Option<usize>,
    sample_len: usize,
    seed: u64,
) -> Result<Vec<CloudPoint>> {
    if count == 0 {
        return Err(Error::InvalidArgument("cloud needs at least one point".into()));
    }
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let (kind, alpha, beta) = match family {
                Family::Fixed { kind } => (kind, None, None),
                Family::StableRandom => {
                    let alpha = 1.0 + rng.random::<f64>();
                    let beta = rng.random::<f64>();
                    (SourceKind::Stable { alpha, beta }, Some(alpha), Some(beta))
                }
            };
            let (rho1, rho2) = match embed_n {
                Some(_) => series_stats(&draw_series(kind, sample_len, &mut rng)?, embed_n)?,
                None => rho12(&nn_distances(&draw(kind, sample_len, &mut rng)?, Engine::Auto)?),
            };
            let label = match (alpha, beta) {
                (Some(a), Some(b)) => format!("stable a={a:.6} b={b:.6}"),
                _ => kind.to_string(),
            };
            Ok(CloudPoint {
                label,
                alpha,
                beta,
                rho2,
                rho1,
            })
        })
        .collect()
}

/// Shortest sample accepted by [`normality_test`].
pub const MIN_TEST_LENGTH: usize = 50;

/// Outcome of the Monte Carlo normality test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub rho1: f64,
    pub rho2: f64,
    pub null: String,
    pub length: usize,
    pub embed_n: Option<usize>,
    pub reps: usize,
    /// Squared Mahalanobis distance of the observed pair from the null cloud.
    pub distance2: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
}

/// Mean and inverse covariance of a cloud of pairs.
fn moments(cloud: &[(f64, f64)]) -> Result<((f64, f64), [f64; 3])> {
    let n = cloud.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = cloud.iter().copied().unzip();
    let mx = crate::sum::sum(xs.iter().copied()) / n;
    let my = crate::sum::sum(ys.iter().copied()) / n;
    let sxx = crate::sum::sum(xs.iter().map(|x| (x - mx) * (x - mx))) / (n - 1.0);
    let syy = crate::sum::sum(ys.iter().map(|y| (y - my) * (y - my))) / (n - 1.0);
    let sxy = crate::sum::sum(xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my))) / (n - 1.0);
    let det = sxx * syy - sxy * sxy;
    if !(det > 0.0) {
        return Err(Error::InvalidArgument("null cloud covariance is singular".into()));
    }
    Ok(((mx, my), [syy / det, -sxy / det, sxx / det]))
}

fn mahalanobis2(p: (f64, f64), mean: (f64, f64), inv: &[f64; 3]) -> f64 {
    let (dx, dy) = (p.0 - mean.0, p.1 - mean.1);
    inv[0] * dx * dx + 2.0 * inv[1] * dx * dy + inv[2] * dy * dy
}

/// Tests `data` for normality at level `alpha`.
///
/// The null cloud holds `(ρ₁, ρ₂)` of `reps` standard-normal samples of the
/// same length; location and scale need no estimation because both statistics
/// are affine invariant. The p-value is the Monte Carlo tail fraction
/// `(1 + #{null D² ≥ observed D²}) / (reps + 1)` of squared Mahalanobis
/// distance from the null mean.
pub fn normality_test(
    data: &[f64],
    embed_n: Option<usize>,
    reps: usize,
    seed: u64,
    alpha: f64,
) -> Result<TestReport> {
    if data.len() < MIN_TEST_LENGTH {
        return Err(Error::InvalidArgument(format!(
            "normality test needs at least {MIN_TEST_LENGTH} values, got {}",
            data.len()
        )));
    }
    if reps < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 null replicates, got {reps}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let observed = series_stats(data, embed_n)?;
    let null: Vec<(f64, f64)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r);
            series_stats(&draw_series(SourceKind::Normal, data.len(), &mut rng)?, embed_n)
        })
        .collect::<Result<_>>()?;
    let (mean, inv) = moments(&null)?;
    let distance2 = mahalanobis2(observed, mean, &inv);
    let extreme = null.iter().filter(|&&p| mahalanobis2(p, mean, &inv) >= distance2).count();
    let p_value = (1 + extreme) as f64 / (reps + 1) as f64;
    Ok(TestReport {
        rho1: observed.0,
        rho2: observed.1,
        null: "normal".into(),
        length: data.len(),
        embed_n,
        reps,
        distance2,
        p_value,
        alpha,
        reject: p_value <= alpha,
    })
}

/// Settings read from an experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: SourceKind,
    pub size: usize,
    pub reps: usize,
    pub seed: u64,
}

/// Default sample size of an experiment file without `size`.
pub const DEFAULT_SIZE: usize = 10_000;
/// Default replicate count of an experiment file without `reps`.
pub const DEFAULT_REPS: usize = 100;

/// Parses `key = value` lines. Recognised keys: `kind`, `m`, `alpha`, `beta`,
/// `size`, `reps`, `seed`. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut kind = None;
    let (mut m, mut alpha, mut beta) = (None, None, None);
    let (mut size, mut reps, mut seed) = (DEFAULT_SIZE, DEFAULT_REPS, None);
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected key = value, got '{content}'"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |e: &dyn std::fmt::Display| Error::Parse {
            line,
            message: format!("bad value for {key}: {e}"),
        };
        match key {
            "kind" => kind = Some(value.to_string()),
            "m" => m = Some(value.parse().map_err(|e| bad(&e))?),
            "alpha" => alpha = Some(value.parse().map_err(|e| bad(&e))?),
            "beta" => beta = Some(value.parse().map_err(|e| bad(&e))?),
            "size" => size = value.parse().map_err(|e| bad(&e))?,
            "reps" => reps = value.parse().map_err(|e| bad(&e))?,
            "seed" => seed = Some(value.parse().map_err(|e| bad(&e))?),
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key '{other}'"),
                })
            }
        }
    }
    let kind = kind.ok_or_else(|| Error::BadSpec("experiment file has no kind".into()))?;
    let kind = SourceKind::parse(&kind, m, alpha, beta)?;
    let seed = seed.ok_or_else(|| Error::BadSpec("experiment file has no seed".into()))?;
    Ok(ExperimentConfig { kind, size, reps, seed })
}
