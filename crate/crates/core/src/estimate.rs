use serde::{Deserialize, Serialize};

/// A Monte-Carlo point estimate in the log domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    /// Analytic or sampled (lower, upper) bounds, when the model has them.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl VolumeEstimate {
    pub fn new(value: f64, stderr: f64, samples: usize) -> Self {
        Self {
            value,
            stderr,
            samples,
            lower: None,
            upper: None,
        }
    }

    pub fn with_bounds(mut self, lower: f64, upper: f64) -> Self {
        self.lower = Some(lower);
        self.upper = Some(upper);
        self
    }

    /// Whether `lower - k·se ≤ value ≤ upper + k·se` for whichever bounds are present.
    pub fn within_bounds(&self, k: f64) -> bool {
        let slack = k * self.stderr;
        self.lower.map_or(true, |lo| lo - slack <= self.value)
            && self.upper.map_or(true, |hi| self.value <= hi + slack)
    }
}

/// Sample mean and standard error of the mean, summed in index order.
pub(crate) fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Fixed-order pairwise summation; the result depends only on the slice.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
