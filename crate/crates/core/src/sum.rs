//! Compensated accumulation.
//!
//! The slide formulas subtract large, nearly equal sums of logarithms and
//! divide by `n²`, so plain left-to-right summation loses digits at large
//! `n`. Neumaier's variant of Kahan summation keeps the error at O(ε)
//! independent of the number of terms and also handles terms larger than
//! the running sum.

/// Running compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Neumaier>().value()
}

/// Arithmetic mean and sample (n − 1) standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum(xs.iter().copied()) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    (mean, (ss / (n - 1) as f64).sqrt())
}
