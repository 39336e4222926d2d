//! Genial entropy `G(f) = −1 − ∫ f ln(x f) dx` of corner densities.
//!
//! Step densities are evaluated exactly piece by piece; a constant piece `c`
//! on `[u, v]` contributes `−∫_u^v c (1 + ln(xc)) dx = cu ln(cu) − cv ln(cv)`,
//! and the pieces sum to `G` once the total mass is one. General densities go
//! through double-exponential quadrature.

use crate::error::{Error, Result};
use crate::profile::DistanceProfile;
use crate::sum::Neumaier;
use std::f64::consts::PI;

/// Tolerance on `Σ e_i (t_i − t_{i−1}) = 1` for a normalized step density.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Monotone decreasing piecewise-constant density anchored at zero.
///
/// Piece `i` has value `values[i]` on `[breakpoints[i], breakpoints[i+1])`,
/// with `breakpoints[0] = 0`. Values are strictly decreasing and positive;
/// equal neighbouring values are merged on construction and zero-width
/// pieces dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDensity {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepDensity {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(Error::BadDensity(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::BadDensity("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] >= w[0]) || !w[1].is_finite()) {
            return Err(Error::BadDensity("breakpoints must be finite and nondecreasing".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::BadDensity("values must be finite and positive".into()));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::BadDensity("values must be nonincreasing".into()));
        }

        let mut bp = vec![0.0];
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            let right = breakpoints[i + 1];
            if right == breakpoints[i] {
                continue;
            }
            match vals.last() {
                Some(&last) if last == v => *bp.last_mut().unwrap() = right,
                _ => {
                    vals.push(v);
                    bp.push(right);
                }
            }
        }
        if vals.is_empty() {
            return Err(Error::BadDensity("density has zero support".into()));
        }
        Ok(Self {
            breakpoints: bp,
            values: vals,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        crate::sum::sum(
            self.values
                .iter()
                .zip(self.breakpoints.windows(2))
                .map(|(v, w)| v * (w[1] - w[0])),
        )
    }

    pub fn is_normalized(&self) -> bool {
        (self.mass() - 1.0).abs() <= MASS_TOLERANCE
    }

    /// `h(z) = f(z/λ)/λ` on `λI`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("dilation must be positive, got {lambda}")));
        }
        StepDensity::new(
            self.breakpoints.iter().map(|t| t * lambda).collect(),
            self.values.iter().map(|v| v / lambda).collect(),
        )
    }

    /// `f_D`: value `d_i` on `[(i−1)/n, i/n)`.
    pub fn from_profile(p: &DistanceProfile) -> Self {
        let n = p.len();
        let breakpoints = (0..=n).map(|i| i as f64 / n as f64).collect();
        StepDensity::new(breakpoints, p.distances().to_vec())
            .expect("a valid profile always yields a valid step density")
    }

    /// `f_{D*}`: the profile divided by its mean, a unit-mass density on `[0, 1)`.
    pub fn profile_density(p: &DistanceProfile) -> Self {
        Self::from_profile(&p.normalized())
    }

    /// `1 − L_{D*}`: one minus the empirical CDF of the normalized profile,
    /// a corner density on `[0, ∞)` that vanishes beyond the largest distance.
    pub fn complement_ecdf(p: &DistanceProfile) -> Self {
        let star = p.normalized();
        let d = star.distances();
        let n = d.len() as f64;
        // distinct values e_1 > … > e_m and t_i = (last index holding e_i) / n
        let mut levels: Vec<(f64, f64)> = Vec::new();
        for (i, &e) in d.iter().enumerate() {
            let t = (i + 1) as f64 / n;
            match levels.last_mut() {
                Some(last) if last.0 == e => last.1 = t,
                _ => levels.push((e, t)),
            }
        }
        // value t_i on [e_{i+1}, e_i), e_{m+1} = 0
        let mut breakpoints = vec![0.0];
        let mut values = Vec::with_capacity(levels.len());
        for &(e, t) in levels.iter().rev() {
            breakpoints.push(e);
            values.push(t);
        }
        StepDensity::new(breakpoints, values)
            .expect("complement of a valid profile is a valid step density")
    }
}

/// `x ln x` with `0 ln 0 = 0`.
#[inline]
fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Exact genial entropy of a normalized step density.
pub fn genial_entropy_step(s: &StepDensity) -> Result<f64> {
    let mass = s.mass();
    if (mass - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::NotNormalized { mass });
    }
    let mut acc = Neumaier::new();
    for (v, w) in s.values.iter().zip(s.breakpoints.windows(2)) {
        acc.add(xlnx(w[0] * v));
        acc.add(-xlnx(w[1] * v));
    }
    Ok(acc.value())
}

/// Genial entropy of `1 − L_{D*}` built from the profile.
pub fn genial_entropy_complement_ecdf(p: &DistanceProfile) -> Result<f64> {
    genial_entropy_step(&StepDensity::complement_ecdf(p))
}

/// Support of a corner density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `[0, b]` (endpoints may be singular).
    Bounded(f64),
    /// `[0, ∞)`.
    HalfLine,
}

/// Largest |τ| sampled by the double-exponential rule; beyond it every
/// abscissa has over- or underflowed.
const TAU_MAX: f64 = 6.0;
const MAX_LEVEL: u32 = 12;

/// `∫ g` over `domain` by tanh-sinh (bounded) or exp-sinh (half line)
/// quadrature. Both rules cluster nodes at `x = 0`, which absorbs the
/// integrable endpoint singularities of corner densities.
pub fn integrate<G>(g: G, domain: Domain, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    if let Domain::Bounded(b) = domain {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("bounded domain needs b > 0, got {b}")));
        }
    }
    // node at parameter τ: (x, dx/dτ)
    let node = |tau: f64| -> Option<(f64, f64)> {
        let u = PI * tau.sinh();
        match domain {
            Domain::HalfLine => {
                let x = u.exp();
                let w = x * PI * tau.cosh();
                (x > 0.0 && x.is_finite() && w.is_finite()).then_some((x, w))
            }
            Domain::Bounded(b) => {
                // y = 1 / (1 + e^u), computed from whichever side keeps precision
                let (y, one_minus_y) = if u >= 0.0 {
                    let e = (-u).exp();
                    (e / (1.0 + e), 1.0 / (1.0 + e))
                } else {
                    let e = u.exp();
                    (1.0 / (1.0 + e), e / (1.0 + e))
                };
                let x = b * y;
                let w = b * PI * tau.cosh() * y * one_minus_y;
                (x > 0.0 && x < b && w > 0.0).then_some((x, w))
            }
        }
    };
    let term = |tau: f64| -> f64 {
        match node(tau) {
            Some((x, w)) => {
                let v = g(x) * w;
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            }
            None => 0.0,
        }
    };

    let mut step = 0.5;
    let mut sum = Neumaier::new();
    sum.add(term(0.0));
    let mut k = 1;
    while k as f64 * step <= TAU_MAX {
        let tau = k as f64 * step;
        sum.add(term(tau));
        sum.add(term(-tau));
        k += 1;
    }
    let mut estimate = sum.value() * step;
    let mut change = f64::INFINITY;
    for _ in 0..MAX_LEVEL {
        step /= 2.0;
        // new nodes are the odd multiples of the halved step
        let mut k = 1;
        while k as f64 * step <= TAU_MAX {
            let tau = k as f64 * step;
            sum.add(term(tau));
            sum.add(term(-tau));
            k += 2;
        }
        let next = sum.value() * step;
        change = (next - estimate).abs();
        estimate = next;
        if change <= tol * 1e-2 * estimate.abs().max(1.0) {
            return Ok(estimate);
        }
    }
    Err(Error::QuadratureNoConvergence { estimate, change })
}

/// Genial entropy of a corner density given as a callback, to within `tol`.
pub fn genial_entropy_quadrature<F>(f: F, domain: Domain, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let integral = integrate(
        |x| {
            let fx = f(x);
            if fx == 0.0 {
                0.0
            } else {
                fx * (x * fx).ln()
            }
        },
        domain,
        tol,
    )?;
    Ok(-1.0 - integral)
}
