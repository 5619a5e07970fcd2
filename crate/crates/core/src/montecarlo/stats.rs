//! Mergeable summary statistics. Hop counts are integers, so sums are kept
//! exactly and merging is order-independent.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn ci95_halfwidth(&self) -> f64 {
        Z95 * self.stderr
    }

    pub fn ci95(&self) -> (f64, f64) {
        let h = self.ci95_halfwidth();
        (self.value - h, self.value + h)
    }

    pub fn covers(&self, x: f64) -> bool {
        let (lo, hi) = self.ci95();
        lo <= x && x <= hi
    }
}

/// Exact running sums of non-negative integer observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountStats {
    pub count: u64,
    pub sum: u64,
    pub sum_sq: u128,
}

impl CountStats {
    pub fn push(&mut self, x: u64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += (x as u128) * (x as u128);
    }

    pub fn merge(&mut self, other: &CountStats) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        self.sum as f64 / self.count as f64
    }

    /// Sample mean with the standard error of the mean.
    pub fn estimate(&self) -> Estimate {
        let n = self.count as f64;
        if self.count < 2 {
            return Estimate {
                value: self.mean(),
                stderr: 0.0,
            };
        }
        let s = self.sum as f64;
        let var = ((self.sum_sq as f64 - s * s / n) / (n - 1.0)).max(0.0);
        Estimate {
            value: s / n,
            stderr: (var / n).sqrt(),
        }
    }
}

/// Binomial proportion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Proportion {
    pub hits: u64,
    pub total: u64,
}

impl Proportion {
    pub fn record(&mut self, hit: bool) {
        self.total += 1;
        self.hits += hit as u64;
    }

    pub fn merge(&mut self, other: &Proportion) {
        self.hits += other.hits;
        self.total += other.total;
    }

    pub fn estimate(&self) -> Estimate {
        if self.total == 0 {
            return Estimate {
                value: f64::NAN,
                stderr: 0.0,
            };
        }
        let n = self.total as f64;
        let p = self.hits as f64 / n;
        Estimate {
            value: p,
            stderr: (p * (1.0 - p) / n).sqrt(),
        }
    }

    /// 95% Wilson score interval; stays non-degenerate at 0 or 1 hits.
    pub fn wilson95(&self) -> (f64, f64) {
        if self.total == 0 {
            return (0.0, 1.0);
        }
        let n = self.total as f64;
        let p = self.hits as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        ((centre - half).max(0.0), (centre + half).min(1.0))
    }
}

/// Adds `other` into `acc`, growing `acc` as needed.
pub fn merge_histogram(acc: &mut Vec<u64>, other: &[u64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

pub fn bump(hist: &mut Vec<u64>, bin: usize) {
    if hist.len() <= bin {
        hist.resize(bin + 1, 0);
    }
    hist[bin] += 1;
}

/// Lower median of a sample.
pub fn median(values: &[u64]) -> Option<u64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    Some(v[(v.len() - 1) / 2])
}
