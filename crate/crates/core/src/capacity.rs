//! Capacity of the real Gaussian linear channel `y = Xβ + ε`.
//!
//! With `X_ij ~ N(0, 1)` and a maximum-entropy prior `β_i ~ N(0, P/D)`,
//!
//! ```text
//! C = ½ E[log det(I_N + (SNR/D)·XXᵀ)]
//! ```
//!
//! [`capacity_mc`] estimates the expectation by Monte Carlo over `X`. The
//! analytic bounds come from Jensen (upper) and Minkowski plus the Wishart
//! expected log-determinant (lower); both switch form at `D = N`.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::mean_and_stderr;
use crate::numerics::{digamma, par_draws, Cholesky, RngStream, StreamRng, SymmetricMatrix};

pub const DEFAULT_SAMPLES: usize = 2000;

/// Below this SNR the high-SNR limit `(N/2)·log SNR` is not a meaningful
/// approximation and estimates carry a warning flag.
pub const HIGH_SNR_THRESHOLD: f64 = 10.0;

/// Monte-Carlo capacity in nats, with the analytic bounds attached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Set when `snr < 10`: [`capacity_limit`] should not be read as an
    /// approximation of this value.
    pub low_snr: bool,
}

impl CapacityEstimate {
    pub fn within_bounds(&self, k: f64) -> bool {
        let slack = k * self.stderr;
        self.lower_bound - slack <= self.value && self.value <= self.upper_bound + slack
    }
}

fn check_positive(d: usize, n: usize, snr: f64) -> Result<()> {
    if d == 0 || n == 0 {
        return Err(Error::precondition(format!(
            "dimensions must be positive (d = {d}, n = {n})"
        )));
    }
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::precondition(format!("snr must be positive, got {snr}")));
    }
    Ok(())
}

pub(crate) fn standard_normal_matrix(rows: usize, cols: usize, rng: &mut StreamRng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// `½ log det(I_N + (snr/d)·XXᵀ)` for one realisation of `X` (N×D).
///
/// Always works on the N×N side, so the cost is `O(N²D + N³)`.
pub fn capacity_statistic(x: &DMatrix<f64>, snr: f64) -> f64 {
    let d = x.ncols() as f64;
    let m = SymmetricMatrix::gram_of_rows(x).scaled_shifted(snr / d, 1.0);
    // I + PSD has every eigenvalue ≥ 1, so the factorization cannot fail
    0.5 * Cholesky::new(&m, 0.0)
        .expect("identity plus PSD is positive definite")
        .log_det()
}

/// Monte-Carlo estimate of the channel capacity with `samples` draws of `X`.
pub fn capacity_mc(
    d: usize,
    n: usize,
    snr: f64,
    samples: usize,
    rng: &RngStream,
) -> Result<CapacityEstimate> {
    check_positive(d, n, snr)?;
    if samples < 2 {
        return Err(Error::precondition("capacity_mc needs at least 2 samples"));
    }
    let draws = par_draws(rng, samples, |r| {
        capacity_statistic(&standard_normal_matrix(n, d, r), snr)
    });
    let (value, stderr) = mean_and_stderr(&draws);
    Ok(CapacityEstimate {
        value,
        stderr,
        samples,
        lower_bound: capacity_lower_bound(d, n, snr)?,
        upper_bound: capacity_upper_bound(d, n, snr)?,
        low_snr: snr < HIGH_SNR_THRESHOLD,
    })
}

/// Jensen upper bound: `(D/2)·log((N/D)·snr + 1)` for `D ≤ N`, otherwise
/// `(N/2)·log(snr + 1)`.
pub fn capacity_upper_bound(d: usize, n: usize, snr: f64) -> Result<f64> {
    check_positive(d, n, snr)?;
    let (df, nf) = (d as f64, n as f64);
    Ok(if d <= n {
        0.5 * df * (nf / df * snr).ln_1p()
    } else {
        0.5 * nf * snr.ln_1p()
    })
}

/// Minkowski / Wishart lower bound.
///
/// For `D ≤ N`: `(D/2)·log(2·snr/D) + ½ Σ_{i=1..D} Ψ((N−i+1)/2)`, and the
/// same with `D` and `N` exchanged inside the sum (but not in `2·snr/D`)
/// when `D > N`.
pub fn capacity_lower_bound(d: usize, n: usize, snr: f64) -> Result<f64> {
    check_positive(d, n, snr)?;
    let (small, large) = if d <= n { (d, n) } else { (n, d) };
    let log_term = 0.5 * small as f64 * (2.0 * snr / d as f64).ln();
    let mut psi_sum = 0.0;
    for i in 1..=small {
        psi_sum += digamma((large - i + 1) as f64 / 2.0)?;
    }
    Ok(log_term + 0.5 * psi_sum)
}

/// High-SNR limit of the `D ≫ N` capacity, `(N/2)·log snr`.
///
/// Only meaningful for `snr ≫ 1`; the caller is responsible for that.
pub fn capacity_limit(n: usize, snr: f64) -> f64 {
    0.5 * n as f64 * snr.ln()
}

/// `E[log det W]` for `W = XᵀX ~ Wishart(n, I_d)`:
/// `Σ_{i=1..d} Ψ((n−i+1)/2) + d·log 2`.
pub fn expected_wishart_logdet(d: usize, n: usize) -> Result<f64> {
    if d == 0 || n < d {
        return Err(Error::precondition(format!(
            "Wishart log-det needs n ≥ d ≥ 1 (d = {d}, n = {n})"
        )));
    }
    let mut s = d as f64 * std::f64::consts::LN_2;
    for i in 1..=d {
        s += digamma((n - i + 1) as f64 / 2.0)?;
    }
    Ok(s)
}

/// Log of the number of noise balls `B^N(√(Nσ²))` that fit in the codeword
/// ball `B^N(√(NP + Nσ²))`: `(N/2)·log(1 + P/σ²)`.
pub fn awgn_packing_count(n: usize, power: f64, noise_var: f64) -> Result<f64> {
    if n == 0 || power < 0.0 || !(noise_var > 0.0) {
        return Err(Error::precondition(format!(
            "awgn_packing_count needs n ≥ 1, power ≥ 0, noise_var > 0 (got {n}, {power}, {noise_var})"
        )));
    }
    let nf = n as f64;
    let ratio = (nf * power + nf * noise_var) / (nf * noise_var);
    Ok(0.5 * nf * ratio.ln())
}
