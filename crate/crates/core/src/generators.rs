//! Seeded point sources.
//!
//! Every random source draws from a ChaCha8 stream selected by
//! `(seed, stream)`, so replicate `r` of an experiment is the same cloud no
//! matter how many workers run or in what order.

use crate::error::{Error, Result};
use crate::nn::PointCloud;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

/// Source family of a point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceKind {
    /// i.i.d. uniform coordinates on `[0, 1]^m`.
    UniformCube { m: usize },
    Normal,
    /// Two i.i.d. standard normal coordinates.
    BivariateNormal,
    Exponential,
    /// Density `1/(2√x)` on `[0, 1]`.
    SqrtPower,
    Laplace,
    Cauchy,
    /// `S(α, β, 1, 0)`.
    Stable { alpha: f64, beta: f64 },
    Cantor,
    Sierpinski,
    /// `x₀ = 0, x_{i+1} = x_i + cos(i)`; deterministic.
    CosWalk,
    /// The first `k` primes; deterministic.
    Primes,
}

impl SourceKind {
    /// Parses a kind name; `m` applies to `uniform-cube`, `alpha`/`beta` to `stable`.
    pub fn parse(name: &str, m: Option<usize>, alpha: Option<f64>, beta: Option<f64>) -> Result<Self> {
        let kind = match name {
            "uniform" => SourceKind::UniformCube { m: m.unwrap_or(1) },
            "uniform-cube" => SourceKind::UniformCube {
                m: m.ok_or_else(|| Error::BadSpec("uniform-cube needs m".into()))?,
            },
            "normal" => SourceKind::Normal,
            "bivariate-normal" => SourceKind::BivariateNormal,
            "exponential" => SourceKind::Exponential,
            "sqrt-power" => SourceKind::SqrtPower,
            "laplace" => SourceKind::Laplace,
            "cauchy" => SourceKind::Cauchy,
            "stable" => SourceKind::Stable {
                alpha: alpha.ok_or_else(|| Error::BadSpec("stable needs alpha".into()))?,
                beta: beta.unwrap_or(0.0),
            },
            "cantor" => SourceKind::Cantor,
            "sierpinski" => SourceKind::Sierpinski,
            "cos-walk" => SourceKind::CosWalk,
            "primes" => SourceKind::Primes,
            other => return Err(Error::BadSpec(format!("unknown source kind '{other}'"))),
        };
        kind.validate()?;
        Ok(kind)
    }

    pub fn name(&self) -> &'static str {
        match self {
            SourceKind::UniformCube { .. } => "uniform-cube",
            SourceKind::Normal => "normal",
            SourceKind::BivariateNormal => "bivariate-normal",
            SourceKind::Exponential => "exponential",
            SourceKind::SqrtPower => "sqrt-power",
            SourceKind::Laplace => "laplace",
            SourceKind::Cauchy => "cauchy",
            SourceKind::Stable { .. } => "stable",
            SourceKind::Cantor => "cantor",
            SourceKind::Sierpinski => "sierpinski",
            SourceKind::CosWalk => "cos-walk",
            SourceKind::Primes => "primes",
        }
    }

    /// Dimension of the points produced.
    pub fn dim(&self) -> usize {
        match self {
            SourceKind::UniformCube { m } => *m,
            SourceKind::BivariateNormal | SourceKind::Sierpinski => 2,
            _ => 1,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, SourceKind::CosWalk | SourceKind::Primes)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SourceKind::UniformCube { m: 0 } => {
                Err(Error::BadSpec("uniform-cube needs m >= 1".into()))
            }
            SourceKind::Stable { alpha, beta } => {
                if !(alpha > 0.0 && alpha <= 2.0) {
                    Err(Error::BadSpec(format!("stable alpha must be in (0, 2], got {alpha}")))
                } else if !(-1.0..=1.0).contains(&beta) {
                    Err(Error::BadSpec(format!("stable beta must be in [-1, 1], got {beta}")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceKind::UniformCube { m } => write!(f, "uniform-cube({m})"),
            SourceKind::Stable { alpha, beta } => write!(f, "stable({alpha}, {beta})"),
            other => f.write_str(other.name()),
        }
    }
}

/// A source kind with sample size and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub size: usize,
    /// Required for random kinds, ignored by deterministic ones.
    pub seed: Option<u64>,
}

impl SourceSpec {
    pub fn new(kind: SourceKind, size: usize, seed: Option<u64>) -> Self {
        Self { kind, size, seed }
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        if self.size < 2 {
            return Err(Error::BadSpec(format!("sample size must be >= 2, got {}", self.size)));
        }
        if self.seed.is_none() && !self.kind.is_deterministic() {
            return Err(Error::BadSpec(format!("{} needs an explicit seed", self.kind)));
        }
        Ok(())
    }
}

/// RNG for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws the cloud described by `spec` from stream 0.
pub fn sample(spec: &SourceSpec) -> Result<PointCloud> {
    sample_stream(spec, 0)
}

/// Draws the cloud described by `spec` from the given stream of its seed.
pub fn sample_stream(spec: &SourceSpec, stream: u64) -> Result<PointCloud> {
    spec.validate()?;
    let k = spec.size;
    match spec.kind {
        SourceKind::CosWalk => return PointCloud::from_values(cos_walk(k)),
        SourceKind::Primes => return PointCloud::from_values(primes(k)),
        _ => {}
    }
    let mut rng = stream_rng(spec.seed.unwrap_or_default(), stream);
    draw(spec.kind, k, &mut rng)
}

/// Draws `k` points of a random kind from `rng`.
pub fn draw<R: Rng + ?Sized>(kind: SourceKind, k: usize, rng: &mut R) -> Result<PointCloud> {
    kind.validate()?;
    if k < 2 {
        return Err(Error::BadSpec(format!("sample size must be >= 2, got {k}")));
    }
    let dim = kind.dim();
    let coords: Vec<f64> = match kind {
        SourceKind::UniformCube { m } => (0..k * m).map(|_| rng.random::<f64>()).collect(),
        SourceKind::Normal => (0..k).map(|_| StandardNormal.sample(rng)).collect(),
        SourceKind::BivariateNormal => (0..2 * k).map(|_| StandardNormal.sample(rng)).collect(),
        SourceKind::Exponential => (0..k).map(|_| Exp1.sample(rng)).collect(),
        SourceKind::SqrtPower => (0..k)
            .map(|_| {
                let u: f64 = rng.random();
                u * u
            })
            .collect(),
        SourceKind::Laplace => (0..k).map(|_| laplace(rng)).collect(),
        SourceKind::Cauchy => {
            let c = Cauchy::new(0.0, 1.0).expect("unit Cauchy is valid");
            (0..k).map(|_| c.sample(rng)).collect()
        }
        SourceKind::Stable { alpha, beta } => (0..k).map(|_| stable(alpha, beta, rng)).collect(),
        SourceKind::Cantor => cantor_values(k, rng)?,
        SourceKind::Sierpinski => sierpinski_coords(k, SIERPINSKI_BURN_IN, rng),
        SourceKind::CosWalk => cos_walk(k),
        SourceKind::Primes => primes(k),
    };
    PointCloud::new(coords, dim)
}

/// Draws `len` scalar values of a one-dimensional kind.
pub fn draw_series<R: Rng + ?Sized>(kind: SourceKind, len: usize, rng: &mut R) -> Result<Vec<f64>> {
    if kind.dim() != 1 {
        return Err(Error::BadSpec(format!("{kind} is not one-dimensional")));
    }
    Ok(draw(kind, len, rng)?.coords().to_vec())
}

/// Standard Laplace variate as a difference of two unit exponentials.
pub fn laplace<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let a: f64 = Exp1.sample(rng);
    let b: f64 = Exp1.sample(rng);
    a - b
}

/// One `S(α, β, 1, 0)` variate by the Chambers–Mallows–Stuck transform of a
/// uniform angle `V ∈ (−π/2, π/2)` and a unit exponential `W`.
pub fn stable<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> f64 {
    let v = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break PI * (u - 0.5);
        }
    };
    let w: f64 = Exp1.sample(rng);
    cms_transform(alpha, beta, v, w)
}

/// The CMS map `(V, W) → X`.
pub fn cms_transform(alpha: f64, beta: f64, v: f64, w: f64) -> f64 {
    if alpha == 1.0 {
        let a = FRAC_PI_2 + beta * v;
        (a * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / a).ln()) / FRAC_PI_2
    } else {
        let zeta = beta * (PI * alpha / 2.0).tan();
        let b = zeta.atan() / alpha;
        let s = (1.0 + zeta * zeta).powf(1.0 / (2.0 * alpha));
        let av = alpha * (v + b);
        s * av.sin() / v.cos().powf(1.0 / alpha) * ((v - av).cos() / w).powf((1.0 - alpha) / alpha)
    }
}

/// `k` draws from `S(α, β, 1, 0)` on stream 0 of `seed`.
pub fn sample_stable(alpha: f64, beta: f64, k: usize, seed: u64) -> Result<PointCloud> {
    sample(&SourceSpec::new(SourceKind::Stable { alpha, beta }, k, Some(seed)))
}

/// Ternary digits per Cantor point.
pub const CANTOR_DIGITS: u32 = 40;
/// Redraws allowed for one Cantor point that collides with an earlier one.
pub const CANTOR_MAX_REDRAWS: usize = 100;

/// `Σ_{i=1}^{40} a_i / 3^i` with `a_i = 2·bit_i`.
fn cantor_value(bits: u64) -> f64 {
    let mut v = 0.0;
    for i in (0..CANTOR_DIGITS).rev() {
        let digit = if bits >> i & 1 == 1 { 2.0 } else { 0.0 };
        v = (v + digit) / 3.0;
    }
    v
}

fn cantor_values<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Vec<f64>> {
    let mut seen = HashSet::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut attempts = 0;
        loop {
            let v = cantor_value(rng.random::<u64>());
            if seen.insert(v.to_bits()) {
                out.push(v);
                break;
            }
            attempts += 1;
            if attempts >= CANTOR_MAX_REDRAWS {
                return Err(Error::BadSpec("cantor: no distinct point after 100 redraws".into()));
            }
        }
    }
    Ok(out)
}

/// `k` points of the middle-thirds Cantor set on stream 0 of `seed`.
pub fn cantor_points(k: usize, seed: u64) -> Result<PointCloud> {
    sample(&SourceSpec::new(SourceKind::Cantor, k, Some(seed)))
}

/// Vertices of the chaos-game triangle (unit equilateral).
pub const SIERPINSKI_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.866_025_403_784_438_6]];
pub const SIERPINSKI_BURN_IN: usize = 100;

fn sierpinski_coords<R: Rng + ?Sized>(k: usize, burn_in: usize, rng: &mut R) -> Vec<f64> {
    let mut p = SIERPINSKI_VERTICES[rng.random_range(0..3)];
    let mut out = Vec::with_capacity(2 * k);
    for step in 0..burn_in + k {
        let v = SIERPINSKI_VERTICES[rng.random_range(0..3)];
        p = [(p[0] + v[0]) / 2.0, (p[1] + v[1]) / 2.0];
        if step >= burn_in {
            out.extend_from_slice(&p);
        }
    }
    out
}

/// Chaos-game points of the Sierpinski triangle; the first `burn_in` iterates are discarded.
pub fn sierpinski_points(k: usize, seed: u64, burn_in: usize) -> Result<PointCloud> {
    if k < 2 {
        return Err(Error::BadSpec(format!("sample size must be >= 2, got {k}")));
    }
    let mut rng = stream_rng(seed, 0);
    PointCloud::new(sierpinski_coords(k, burn_in, &mut rng), 2)
}

/// First `k` iterates of `x_{i+1} = x_i + cos(i)` from `x₀ = 0`.
pub fn cos_walk(k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0.0;
    for i in 0..k {
        out.push(x);
        x += (i as f64).cos();
    }
    out
}

/// First `k` primes, by a segmented sieve of Eratosthenes.
pub fn primes(k: usize) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    // p_k < k (ln k + ln ln k) for k ≥ 6
    let limit = if k < 6 {
        15
    } else {
        let kf = k as f64;
        (kf * (kf.ln() + kf.ln().ln())).ceil() as usize + 1
    };
    let root = (limit as f64).sqrt() as usize + 1;
    let mut small = vec![true; root + 1];
    let mut base = Vec::new();
    for i in 2..=root {
        if small[i] {
            base.push(i);
            let mut j = i * i;
            while j <= root {
                small[j] = false;
                j += i;
            }
        }
    }

    const SEGMENT: usize = 1 << 18;
    let mut out = Vec::with_capacity(k);
    let mut seg = vec![true; SEGMENT];
    let mut low = 2;
    while low <= limit && out.len() < k {
        let high = (low + SEGMENT).min(limit + 1);
        seg[..high - low].fill(true);
        for &p in &base {
            if p * p >= high {
                break;
            }
            let first = (p * p).max(low.div_ceil(p) * p);
            let mut j = first;
            while j < high {
                seg[j - low] = false;
                j += p;
            }
        }
        for (off, &is_prime) in seg[..high - low].iter().enumerate() {
            if is_prime {
                out.push((low + off) as f64);
                if out.len() == k {
                    break;
                }
            }
        }
        low = high;
    }
    out
}
