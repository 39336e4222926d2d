//! Slide function of a distance profile and its right-derivatives at zero.
//!
//! For a profile `d_1 ≥ … ≥ d_n > 0` the step function `f_D` takes the value
//! `d_i` on `[(i−1)/n, i/n)`. The slide function `σ(t)` is the genial entropy
//! of `f_D^t / ∫f_D^t`; the slide numbers are its right-derivatives at `t = 0`.
//! [`rho1`] and [`rho2`] are closed forms for the first two derivatives,
//! [`rho1_fd`] and [`rho2_fd`] recover them independently by Richardson
//! extrapolation of one-sided differences of [`slide_function_step`].

use crate::error::{Error, Result};
use crate::profile::DistanceProfile;
use crate::sum::Neumaier;
use serde::{Deserialize, Serialize};

/// A `(ρ₁, ρ₂)` pair computed from one point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlideEstimate {
    pub rho1: f64,
    pub rho2: f64,
    /// Number of distances in the profile.
    pub n: usize,
    pub provenance: String,
}

impl SlideEstimate {
    pub fn from_profile(p: &DistanceProfile, provenance: impl Into<String>) -> Self {
        Self {
            rho1: rho1(p),
            rho2: rho2(p),
            n: p.len(),
            provenance: provenance.into(),
        }
    }
}

/// `i ln i` with `0 ln 0 = 0`.
#[inline]
fn xlogx(i: usize) -> f64 {
    if i <= 1 {
        0.0
    } else {
        let x = i as f64;
        x * x.ln()
    }
}

/// First slide number ρ₁.
///
/// `(1/n) Σ_{i=2}^{n−1} i ln(i) ln(d_{i+1}/d_i) + (ln n / n) Σ_{i=1}^{n−1} ln(d_i/d_n)`.
pub fn rho1(p: &DistanceProfile) -> f64 {
    let logs = p.logs();
    let n = logs.len();
    let last = logs[n - 1];

    let mut weighted = Neumaier::new();
    for i in 2..n {
        // 1-based i: d_i = logs[i-1], d_{i+1} = logs[i]
        weighted.add(xlogx(i) * (logs[i] - logs[i - 1]));
    }
    let mut spread = Neumaier::new();
    for &l in &logs[..n - 1] {
        spread.add(l - last);
    }
    let nf = n as f64;
    weighted.value() / nf + nf.ln() / nf * spread.value()
}

/// Second slide number ρ₂.
///
/// Evaluated on logs centred at their mean; the expression is invariant
/// under rescaling the profile, and centring keeps `n S₂ − S₁²` and
/// `(S₁ − n ln d_n)²` well conditioned.
pub fn rho2(p: &DistanceProfile) -> f64 {
    let raw = p.logs();
    let n = raw.len();
    let nf = n as f64;
    let centre = crate::sum::sum(raw.iter().copied()) / nf;
    let logs: Vec<f64> = raw.iter().map(|l| l - centre).collect();
    let last = logs[n - 1];

    let s1 = crate::sum::sum(logs.iter().copied());
    let s2 = crate::sum::sum(logs.iter().map(|l| l * l));
    let s3 = crate::sum::sum(logs[..n - 1].iter().map(|l| (l - last) * (l - last)));

    let mut cross = Neumaier::new();
    for i in 1..n {
        // 1-based i: log d_i = logs[i-1], log d_{i+1} = logs[i]
        let (li, lnext) = (logs[i - 1], logs[i]);
        cross.add(xlogx(i) * (lnext - li) * (2.0 * s1 - nf * (li + lnext)));
    }
    let head = s1 - nf * last;
    let mut total = Neumaier::new();
    total.add(cross.value());
    total.add(nf.ln() * (2.0 * head * head - nf * s3));
    total.add(nf * s2);
    total.add(-s1 * s1);
    -total.value() / (nf * nf)
}

/// Both slide numbers of a profile.
pub fn rho12(p: &DistanceProfile) -> (f64, f64) {
    (rho1(p), rho2(p))
}

/// Precomputed pieces of `σ(t)` for repeated evaluation.
///
/// With weights `w_i = d_i^t / Σ_j d_j^t` the slide function of a step
/// profile is `σ(t) = −Σ w_i ln w_i − Σ w_i c_i`, where
/// `c_i = i ln i − (i−1) ln(i−1)`. Since `Σ c_i = n ln n` this is evaluated as
/// `ln(Z/n) − t⟨ℓ⟩ − ⟨c − ln n⟩` with `expm1` so that `σ` keeps its relative
/// accuracy as `t → 0`.
#[derive(Debug, Clone)]
pub struct SlideFunction {
    /// Logs of the distances centred at their mean (geometric-mean rescaling).
    logs: Vec<f64>,
    /// `c_i − ln n`.
    offsets: Vec<f64>,
    max_abs_log: f64,
}

/// Largest `t·|ln d_i|` accepted before reporting overflow.
const EXP_LIMIT: f64 = 600.0;

impl SlideFunction {
    pub fn new(p: &DistanceProfile) -> Self {
        let raw = p.logs();
        let n = raw.len();
        let centre = crate::sum::sum(raw.iter().copied()) / n as f64;
        let logs: Vec<f64> = raw.iter().map(|l| l - centre).collect();
        let ln_n = (n as f64).ln();
        let offsets = (1..=n)
            .map(|i| {
                let c = if i == 1 {
                    0.0
                } else {
                    let prev = (i - 1) as f64;
                    (i as f64).ln() + prev * (1.0 / prev).ln_1p()
                };
                c - ln_n
            })
            .collect();
        let max_abs_log = logs.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        Self {
            logs,
            offsets,
            max_abs_log,
        }
    }

    /// `σ(t)` for `t ≥ 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "slide function needs finite t >= 0, got {t}"
            )));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        if t * self.max_abs_log > EXP_LIMIT {
            return Err(Error::Overflow { t });
        }
        let n = self.logs.len() as f64;
        let mut excess = Neumaier::new(); // Σ expm1(tℓ_i)
        let mut log_moment = Neumaier::new(); // Σ ℓ_i e^{tℓ_i}
        let mut offset_moment = Neumaier::new(); // Σ (c_i − ln n) e^{tℓ_i}
        for (&l, &c) in self.logs.iter().zip(&self.offsets) {
            let e = (t * l).exp_m1();
            excess.add(e);
            log_moment.add(l);
            log_moment.add(l * e);
            // Σ (c_i − ln n) vanishes identically, leaving only the e-weighted part
            offset_moment.add(c * e);
        }
        let rel = excess.value() / n;
        let z = n * (1.0 + rel);
        let sigma = rel.ln_1p() - t * log_moment.value() / z - offset_moment.value() / z;
        Ok(sigma)
    }
}

/// Slide function `σ(t)` of the step density built from `p`.
pub fn slide_function_step(p: &DistanceProfile, t: f64) -> Result<f64> {
    SlideFunction::new(p).eval(t)
}

/// Initial step of the one-sided difference oracles.
pub const FD_STEP: f64 = 1e-3;
/// Number of step halvings combined by Richardson extrapolation.
pub const FD_LEVELS: usize = 3;

/// Richardson table on `h0, h0/2, …` for an estimate with error series in `h, h², …`.
fn richardson(mut level: Vec<f64>, noise_floor: f64) -> Result<f64> {
    let mut corrections = Vec::new();
    let mut order = 1;
    while level.len() > 1 {
        let factor = f64::from(1u32 << order);
        let next: Vec<f64> = level
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        corrections.push((next[next.len() - 1] - level[level.len() - 1]).abs());
        level = next;
        order += 1;
    }
    let estimate = level[0];
    if !estimate.is_finite() {
        return Err(Error::OracleUnstable {
            previous: f64::NAN,
            last: f64::NAN,
        });
    }
    if let [.., previous, last] = corrections[..] {
        let floor = noise_floor * estimate.abs().max(1.0);
        if last > previous && last > floor {
            return Err(Error::OracleUnstable { previous, last });
        }
    }
    Ok(estimate)
}

/// Right-sided derivative of order `order` at zero.
///
/// Forward differences `Δ^k f(0) / h^k` on `h0, h0/2, …` (`FD_LEVELS` levels)
/// followed by Richardson extrapolation. Only `f(t)` for `t ≥ 0` is sampled.
pub fn right_derivative<F>(f: F, order: u32, h0: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if order == 0 || order > 8 {
        return Err(Error::InvalidArgument(format!(
            "derivative order must be in 1..=8, got {order}"
        )));
    }
    let k = order as usize;
    // binomial coefficients C(k, j)
    let mut binom = vec![1.0f64; k + 1];
    for j in 1..=k {
        binom[j] = binom[j - 1] * (k + 1 - j) as f64 / j as f64;
    }
    let mut level = Vec::with_capacity(FD_LEVELS);
    for lvl in 0..FD_LEVELS {
        let h = h0 / f64::from(1u32 << lvl);
        let mut acc = Neumaier::new();
        for (j, c) in binom.iter().enumerate() {
            let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc.add(sign * c * f(j as f64 * h)?);
        }
        level.push(acc.value() / h.powi(order as i32));
    }
    let noise_floor = match order {
        1 => 1e-10,
        2 => 1e-7,
        _ => 1e-4,
    };
    richardson(level, noise_floor)
}

/// Finite-difference estimate of ρ₁ from `σ(h)/h` (right-sided).
pub fn rho1_fd(p: &DistanceProfile) -> Result<f64> {
    let sigma = SlideFunction::new(p);
    right_derivative(|t| sigma.eval(t), 1, FD_STEP)
}

/// Finite-difference estimate of ρ₂ from `(σ(2h) − 2σ(h) + σ(0)) / h²`.
pub fn rho2_fd(p: &DistanceProfile) -> Result<f64> {
    let sigma = SlideFunction::new(p);
    right_derivative(|t| sigma.eval(t), 2, FD_STEP)
}
