//! Small numeric accumulators shared by the enumeration and sampling code.

/// Compensated (Neumaier) summation.
///
/// Enumeration averages add up to millions of terms of similar magnitude;
/// carrying the rounding compensation keeps the result independent of how
/// badly the running sum grows relative to individual terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Welford's online mean and variance.
///
/// Values are pushed in a fixed order (enumeration order, or sample index
/// order for Monte Carlo) so that results are reproducible bit for bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    sum_sq_diff: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.sum_sq_diff += delta * (value - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 for fewer than two values.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            // Clamp tiny negative rounding residue from the update formula.
            (self.sum_sq_diff / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Standard error of the mean; 0 for fewer than two values.
    pub fn standard_error(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}
