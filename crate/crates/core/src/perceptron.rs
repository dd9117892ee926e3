//! Volume of the stochastic sigmoid perceptron `y = f(w·x) + ε`.
//!
//! With `x ~ N(0, I_D)` the metric is `G(w) = σ⁻²·(c1·I + (c2 − c1)·ûûᵀ)`
//! where `û = w/‖w‖` and, for `ξ ~ N(0, 1)`,
//!
//! ```text
//! c1(w) = E[f′(wξ)]      c2(w) = E[ξ² f′(wξ)]
//! ```
//!
//! so `det G = σ^{−2D}·c1^{D−1}·c2` and the volume reduces to a radial
//! integral over `w = ‖w‖`, truncated at `w_max`.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{mean_and_stderr, pairwise_sum, VolumeEstimate};
use crate::numerics::{par_draws, RngStream};
use crate::regression::log_ball_volume;

pub const DEFAULT_W_MAX: f64 = 10.0;
pub const DEFAULT_GRID_POINTS: usize = 200;
pub const DEFAULT_SAMPLES: usize = 20_000;
pub const MIN_GRID_POINTS: usize = 8;

/// Smallest positive grid point as a fraction of `w_max`.
const GRID_START: f64 = 1e-4;
/// Batches used for the volume standard error.
const BATCHES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Sigmoid,
}

impl Activation {
    /// `f′(z)`, bounded by ¼.
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => {
                let e = (-z.abs()).exp();
                e / ((1.0 + e) * (1.0 + e))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerceptronSpec {
    pub d: usize,
    pub noise_var: f64,
    pub w_max: f64,
    #[serde(default)]
    pub activation: Activation,
    /// Include the `w^{D−1}` polar-coordinate factor in the integrand.
    #[serde(default)]
    pub radial_weight: bool,
}

impl PerceptronSpec {
    pub fn new(d: usize, noise_var: f64) -> Result<Self> {
        let spec = Self {
            d,
            noise_var,
            w_max: DEFAULT_W_MAX,
            activation: Activation::Sigmoid,
            radial_weight: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::precondition("perceptron needs d ≥ 1"));
        }
        if !(self.noise_var > 0.0) || !self.noise_var.is_finite() {
            return Err(Error::precondition(format!(
                "noise variance must be positive, got {}",
                self.noise_var
            )));
        }
        if !(self.w_max > 0.0) || !self.w_max.is_finite() {
            return Err(Error::precondition(format!(
                "w_max must be positive, got {}",
                self.w_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c1_stderr: f64,
    pub c2_stderr: f64,
}

/// Standard normal draws shared by every `w` on a grid.
#[derive(Debug, Clone)]
pub struct XiPanel(Vec<f64>);

impl XiPanel {
    pub fn draw(samples: usize, rng: &RngStream) -> Self {
        Self(par_draws(rng, samples, |r| StandardNormal.sample(r)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficients(&self, w: f64, activation: Activation) -> CCoefficients {
        assert!(w >= 0.0, "w must be nonnegative, got {w}");
        let (d1, d2) = self.terms(w, activation);
        let (c1, c1_stderr) = mean_and_stderr(&d1);
        let (c2, c2_stderr) = mean_and_stderr(&d2);
        CCoefficients {
            c1,
            c2,
            c1_stderr,
            c2_stderr,
        }
    }

    fn terms(&self, w: f64, activation: Activation) -> (Vec<f64>, Vec<f64>) {
        self.0
            .iter()
            .map(|&xi| {
                let g = activation.derivative(w * xi);
                (g, xi * xi * g)
            })
            .unzip()
    }
}

/// Monte-Carlo `c1(w)`, `c2(w)` for the sigmoid.
pub fn c_coefficients(w: f64, samples: usize, rng: &RngStream) -> CCoefficients {
    XiPanel::draw(samples, rng).coefficients(w, Activation::Sigmoid)
}

/// `(D−1)·log c1 + log c2 − D·log σ²`.
pub fn log_det_from_coefficients(c1: f64, c2: f64, d: usize, noise_var: f64, w: f64) -> Result<f64> {
    if !(c2 > 0.0) {
        return Err(Error::NonPositiveCoefficient { name: "c2", value: c2, w });
    }
    let c1_term = if d > 1 {
        if !(c1 > 0.0) {
            return Err(Error::NonPositiveCoefficient { name: "c1", value: c1, w });
        }
        (d - 1) as f64 * c1.ln()
    } else {
        0.0
    };
    Ok(c1_term + c2.ln() - d as f64 * noise_var.ln())
}

/// `log det G(w)` with Monte-Carlo coefficients.
pub fn metric_log_det(w: f64, d: usize, noise_var: f64, samples: usize, rng: &RngStream) -> Result<f64> {
    let c = c_coefficients(w, samples, rng);
    log_det_from_coefficients(c.c1, c.c2, d, noise_var, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
    /// `½ log(c2·c1^{D−1})`, plus `(D−1)·log w` with the radial weight.
    pub log_integrand: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronVolume {
    pub estimate: VolumeEstimate,
    /// `log(integrand(w_max)·w_max)`, a rough size for the truncated tail.
    pub log_tail: f64,
    pub grid: Vec<GridPoint>,
}

/// `0` followed by `points − 1` log-spaced values up to `w_max`.
pub fn radial_grid(w_max: f64, points: usize) -> Vec<f64> {
    let lo = (w_max * GRID_START).ln();
    let hi = w_max.ln();
    let steps = (points - 2) as f64;
    std::iter::once(0.0)
        .chain((0..points - 1).map(|k| {
            if k == points - 2 {
                w_max
            } else {
                (lo + (hi - lo) * k as f64 / steps).exp()
            }
        }))
        .collect()
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Log of the trapezoid rule over `(w, log g)` pairs.
fn log_trapezoid(w: &[f64], log_g: &[f64]) -> f64 {
    let terms: Vec<f64> = w
        .windows(2)
        .zip(log_g.windows(2))
        .map(|(ws, gs)| (ws[1] - ws[0]).ln() + log_add_exp(gs[0], gs[1]) - std::f64::consts::LN_2)
        .collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let scaled: Vec<f64> = terms.iter().map(|t| (t - m).exp()).collect();
    m + pairwise_sum(&scaled).ln()
}

fn log_integrand(spec: &PerceptronSpec, w: f64, c1: f64, c2: f64) -> Result<f64> {
    // σ² enters only through the prefactor
    let mut v = 0.5 * log_det_from_coefficients(c1, c2, spec.d, 1.0, w)?;
    if spec.radial_weight && spec.d > 1 {
        v += (spec.d - 1) as f64 * w.ln();
    }
    Ok(v)
}

/// `log B^D(1) − (D/2)·log σ² + log ∫₀^{w_max} √(c2·c1^{D−1}) dw`.
///
/// The coefficients share one `ξ` panel across the grid. The standard error
/// comes from the spread of the same integral over disjoint panel batches.
pub fn perceptron_log_volume(
    spec: &PerceptronSpec,
    grid_points: usize,
    samples: usize,
    rng: &RngStream,
) -> Result<PerceptronVolume> {
    spec.validate()?;
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::precondition(format!(
            "need at least {MIN_GRID_POINTS} grid points, got {grid_points}"
        )));
    }
    if samples < 2 * BATCHES {
        return Err(Error::precondition(format!(
            "need at least {} samples, got {samples}",
            2 * BATCHES
        )));
    }
    let panel = XiPanel::draw(samples, rng);
    let ws = radial_grid(spec.w_max, grid_points);
    let batch = samples / BATCHES;

    let mut grid = Vec::with_capacity(ws.len());
    let mut batch_logs = vec![Vec::with_capacity(ws.len()); BATCHES];
    for &w in &ws {
        let (d1, d2) = panel.terms(w, spec.activation);
        let n = samples as f64;
        let (c1, c2) = (pairwise_sum(&d1) / n, pairwise_sum(&d2) / n);
        grid.push(GridPoint {
            w,
            c1,
            c2,
            log_integrand: log_integrand(spec, w, c1, c2)?,
        });
        for (b, logs) in batch_logs.iter_mut().enumerate() {
            let r = b * batch..(b + 1) * batch;
            let m = batch as f64;
            let (b1, b2) = (pairwise_sum(&d1[r.clone()]) / m, pairwise_sum(&d2[r]) / m);
            logs.push(log_integrand(spec, w, b1, b2)?);
        }
    }

    let log_g: Vec<f64> = grid.iter().map(|p| p.log_integrand).collect();
    let prefactor = log_ball_volume(spec.d, 1.0) - 0.5 * spec.d as f64 * spec.noise_var.ln();
    let value = prefactor + log_trapezoid(&ws, &log_g);
    let per_batch: Vec<f64> = batch_logs.iter().map(|l| log_trapezoid(&ws, l)).collect();
    let (_, stderr) = mean_and_stderr(&per_batch);

    let last = grid.last().expect("grid is nonempty");
    Ok(PerceptronVolume {
        estimate: VolumeEstimate::new(value, stderr, samples),
        log_tail: prefactor + last.log_integrand + spec.w_max.ln(),
        grid,
    })
}
