use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid and data-generation settings for the ridge risk-curve experiment.
///
/// Missing fields in a deserialized config fall back to [`Default`], the
/// desk-scale grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub alpha_values: Vec<f64>,
    pub d_grid: Vec<usize>,
    pub d_true: usize,
    /// Per-coordinate variance of the true coefficients.
    pub beta_var: f64,
    pub noise_var: f64,
    pub folds: usize,
    pub seed: u64,
}

pub const DESK_D_GRID: [usize; 23] = [
    10, 25, 50, 75, 100, 125, 150, 175, 200, 225, 250, 260, 270, 280, 290, 300, 325, 350, 400, 450,
    500, 550, 600,
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_values: vec![300],
            alpha_values: vec![1e-2, 1.0, 1e2],
            d_grid: DESK_D_GRID.to_vec(),
            d_true: 150,
            beta_var: 0.25,
            noise_var: 1.0,
            folds: 10,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// All three sample sizes with `d` from 1 to 2500.
    pub fn full() -> Self {
        let mut d_grid = vec![1, 5];
        d_grid.extend((10..=1000).step_by(10));
        d_grid.extend((1050..=2500).step_by(50));
        Self {
            n_values: vec![300, 600, 900],
            d_grid,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::precondition(m));
        if self.n_values.is_empty() || self.alpha_values.is_empty() || self.d_grid.is_empty() {
            return fail("n_values, alpha_values and d_grid must be nonempty".into());
        }
        if self.folds < 2 {
            return fail(format!("folds must be at least 2, got {}", self.folds));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < self.folds) {
            return fail(format!("n = {n} is smaller than the fold count {}", self.folds));
        }
        if self.d_grid[0] == 0 || self.d_grid.windows(2).any(|w| w[0] >= w[1]) {
            return fail("d_grid must be positive and strictly ascending".into());
        }
        if self.alpha_values.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return fail("ridge constants must be positive".into());
        }
        if self.d_true == 0 {
            return fail("d_true must be positive".into());
        }
        if !(self.beta_var > 0.0) || !(self.noise_var >= 0.0) {
            return fail("beta_var must be positive and noise_var nonnegative".into());
        }
        Ok(())
    }

    /// Largest fitted dimension; data are generated with at least `d_true`
    /// columns.
    pub fn d_max(&self) -> usize {
        self.d_grid.last().copied().unwrap_or(0).max(self.d_true)
    }

    /// Soft problems worth reporting but not fatal.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let (Some(lo), Some(hi)) = (self.d_grid.first(), self.d_grid.last()) {
            if self.d_true < *lo || self.d_true > *hi {
                out.push(format!(
                    "d_true = {} lies outside the fitted range [{lo}, {hi}]",
                    self.d_true
                ));
            }
        }
        out
    }
}
