//! Compensated accumulation and streaming mean/variance.
//!
//! Trial metrics are reduced block-by-block in a fixed order so that results
//! are bit-identical for any worker count; Neumaier compensation keeps the
//! block merges exact enough that the block size does not matter either.

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
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

    pub fn merge(&mut self, other: &Accumulator) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Streaming first and second moments of one scalar metric.
#[derive(Debug, Clone, Default)]
pub struct MeanVar {
    n: u64,
    sum: Accumulator,
    sum_sq: Accumulator,
}

impl MeanVar {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        self.n += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    pub fn merge(&mut self, other: &MeanVar) {
        self.n += other.n;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        self.sum.value() / self.n as f64
    }

    /// Sample variance (n-1 denominator), clamped at zero.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let m = self.mean();
        ((self.sum_sq.value() - n * m * m) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn std_err(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        crate::mathx::sqrt(self.variance() / self.n as f64)
    }

    /// Normal-approximation confidence interval at `z` standard errors.
    pub fn ci(&self, z: f64) -> (f64, f64) {
        let m = self.mean();
        let half = z * self.std_err();
        (m - half, m + half)
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * crate::mathx::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        let mut acc = Accumulator::new();
        acc.add(1e16);
        for _ in 0..1000 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.value(), 1000.0);
    }

    #[test]
    fn block_merge_matches_sequential() {
        let xs: alloc::vec::Vec<f64> = (0..10_000).map(|i| ((i * 2654435761u64) % 1000) as f64 * 1e-3).collect();
        let mut seq = MeanVar::new();
        for &x in &xs {
            seq.add(x);
        }
        let mut merged = MeanVar::new();
        for chunk in xs.chunks(128) {
            let mut b = MeanVar::new();
            for &x in chunk {
                b.add(x);
            }
            merged.merge(&b);
        }
        assert_eq!(seq.mean().to_bits(), merged.mean().to_bits());
        assert!((seq.variance() - merged.variance()).abs() < 1e-12);
    }

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!(lo < 0.5 && hi > 0.5 && lo > 0.39 && hi < 0.61);
        let (lo, hi) = wilson_interval(0, 100, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.06);
    }
}
