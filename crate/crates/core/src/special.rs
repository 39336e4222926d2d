//! Special functions, the reference slide function of `−ln x`, and
//! tangibility targets.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ζ(2) … ζ(10).
const ZETA_TABLE: [f64; 9] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_37,
    1.017_343_061_984_449,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
];

/// Riemann zeta at an integer `s ≥ 2`.
pub fn zeta(s: u32) -> f64 {
    assert!(s >= 2, "zeta diverges at s = {s}");
    if let Some(&z) = ZETA_TABLE.get((s - 2) as usize) {
        return z;
    }
    // s ≥ 11: the tail after k terms is below k^{1-s}/(s-1) < 1e-12 for k = 16
    let mut total = 0.0;
    for k in (1..=16u32).rev() {
        total += f64::from(k).powi(-(s as i32));
    }
    total
}

/// Shift `x` upwards by recurrence until it is at least this large, then
/// use the asymptotic series.
const ASYMPTOTIC_FROM: f64 = 10.0;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs x > 0, got {x}");
    let mut x = x;
    let mut shift = 0.0;
    while x < ASYMPTOTIC_FROM {
        shift += x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360_360.0 + inv2 / 156.0))))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series - shift
}

/// Digamma `Ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma needs x > 0, got {x}");
    let mut x = x;
    let mut shift = 0.0;
    while x < ASYMPTOTIC_FROM {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32_760.0 - inv2 / 12.0))))));
    x.ln() - 0.5 / x - series - shift
}

/// Slide function of the corner density `−ln x` on `(0, 1)`:
/// `σ(t) = −1 + t − tΨ(t) + ln Γ(1 + t)`.
///
/// Uses `tΨ(t) = tΨ(1 + t) − 1`, which removes the pole at `t = 0`.
pub fn log_slide_reference(t: f64) -> f64 {
    assert!(t >= 0.0, "reference slide function needs t >= 0, got {t}");
    if t == 0.0 {
        return 0.0;
    }
    t - t * digamma(1.0 + t) + ln_gamma(1.0 + t)
}

/// Slide number of order `n` for a tangible process of dimension `d`:
/// `1/d` for `n = 1`, `(−1)^{n+1} (n−1)! (n−1) ζ(n) / d^n` beyond.
pub fn tangible_target(d: f64, n: u32) -> f64 {
    assert!(d > 0.0 && d.is_finite(), "dimension must be positive, got {d}");
    assert!(n >= 1, "order must be at least 1");
    if n == 1 {
        return 1.0 / d;
    }
    let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
    let factorial: f64 = (1..n).map(f64::from).product();
    sign * factorial * f64::from(n - 1) * zeta(n) / d.powi(n as i32)
}

/// A tangibility target `ρ_n = value` at dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangibilityTarget {
    pub dimension: f64,
    pub order: u32,
    pub value: f64,
}

impl TangibilityTarget {
    pub fn new(dimension: f64, order: u32) -> Self {
        Self {
            dimension,
            order,
            value: tangible_target(dimension, order),
        }
    }
}

/// Dimension of a tangible process recovered from ρ₂: `π / √(−6 ρ₂)`.
pub fn dimension_from_rho2(rho2: f64) -> Result<f64> {
    if !(rho2 < 0.0) {
        return Err(Error::NonNegativeRho2(rho2));
    }
    Ok(PI / (-6.0 * rho2).sqrt())
}
