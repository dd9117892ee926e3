use serde::{Deserialize, Serialize};

use super::coords::{metric_tensor, reduced_metric_diagonal, sample_eta};
use super::Lattice;
use crate::error::{Error, Result};
use crate::estimate::{mean_and_stderr, VolumeEstimate};
use crate::numerics::{ln_gamma, par_draws, Cholesky, RngStream};

/// Largest tolerated fraction of draws whose reduced metric cannot be
/// factored.
pub const MAX_REJECTION_RATE: f64 = 0.01;

/// `log(1/Γ(D))`, the log-volume of the probability simplex over `D` atoms.
pub fn log_simplex_volume(d: usize) -> f64 {
    assert!(d >= 1, "simplex needs at least one atom");
    -ln_gamma(d as f64)
}

/// Per-draw log quantities of the reduced metric `G'(δ)`.
#[derive(Debug, Clone, Copy)]
struct Draw {
    /// `½ log det G' = Σ log M_ii`.
    half_log_det: f64,
    /// `½ Σ log G'_ii`.
    half_log_diag: f64,
}

/// Monte-Carlo lattice log-volume with both sandwich bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeVolume {
    /// `log E[√det G'] − log Γ(D)`, with `lower`/`upper` filled in.
    pub estimate: VolumeEstimate,
    pub lower_stderr: f64,
    pub upper_stderr: f64,
    /// Draws dropped because `G'` failed to factor after the jitter ladder.
    pub rejected: usize,
    /// `log Γ(D)` subtracted from each term.
    pub log_gamma_d: f64,
}

/// `log(mean exp(xs))` and its delta-method standard error.
fn log_mean_exp(xs: &[f64]) -> (f64, f64) {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return (max, f64::NAN);
    }
    let scaled: Vec<f64> = xs.iter().map(|x| (x - max).exp()).collect();
    let (mean, se) = mean_and_stderr(&scaled);
    (max + mean.ln(), se / mean)
}

fn draw_metric(lat: &Lattice, rng: &mut crate::numerics::StreamRng) -> Option<Draw> {
    let (_, eta) = sample_eta(lat, rng);
    let half_log_diag = 0.5 * reduced_metric_diagonal(&eta).iter().map(|g| g.ln()).sum::<f64>();
    let g = metric_tensor(lat, &eta);
    let chol = Cholesky::new(&g, 0.0).ok()?;
    Some(Draw {
        half_log_det: chol.diagonal().map(f64::ln).sum(),
        half_log_diag,
    })
}

/// Monte-Carlo estimate of `log V` for a lattice model, with the
/// Cholesky-diagonal lower bound and Hadamard upper bound computed on the
/// same draws.
///
/// `δ` has `D` components and the reduced metric is `(D−1)`-dimensional;
/// the simplex correction is `−log Γ(D)`.
pub fn lattice_log_volume_mc(
    lat: &Lattice,
    samples: usize,
    rng: &RngStream,
) -> Result<LatticeVolume> {
    if samples < 2 {
        return Err(Error::precondition("lattice volume needs at least 2 samples"));
    }
    if lat.size() < 2 {
        return Err(Error::precondition("lattice volume needs D ≥ 2"));
    }
    let draws: Vec<Draw> = par_draws(rng, samples, |r| draw_metric(lat, r))
        .into_iter()
        .flatten()
        .collect();
    let rejected = samples - draws.len();
    if rejected as f64 > MAX_REJECTION_RATE * samples as f64 || draws.len() < 2 {
        return Err(Error::RejectionRate { rejected, samples });
    }
    let log_gamma_d = ln_gamma(lat.size() as f64);
    let half_log_det: Vec<f64> = draws.iter().map(|d| d.half_log_det).collect();
    let half_log_diag: Vec<f64> = draws.iter().map(|d| d.half_log_diag).collect();

    let (value, stderr) = log_mean_exp(&half_log_det);
    let (lower, lower_stderr) = mean_and_stderr(&half_log_det);
    let (upper, upper_stderr) = log_mean_exp(&half_log_diag);

    let estimate = VolumeEstimate::new(value - log_gamma_d, stderr, draws.len())
        .with_bounds(lower - log_gamma_d, upper - log_gamma_d);
    Ok(LatticeVolume {
        estimate,
        lower_stderr,
        upper_stderr,
        rejected,
        log_gamma_d,
    })
}

/// `(lower, upper)` bounds on `log V`, from the same draws as
/// [`lattice_log_volume_mc`].
pub fn lattice_volume_bounds(lat: &Lattice, samples: usize, rng: &RngStream) -> Result<(f64, f64)> {
    let v = lattice_log_volume_mc(lat, samples, rng)?;
    Ok((
        v.estimate.lower.expect("bounds attached"),
        v.estimate.upper.expect("bounds attached"),
    ))
}

/// Hadamard upper bound `log E[√Π G'_ii] − log Γ(D)` alone.
///
/// Needs only the metric diagonal, so it scales to Boolean lattices far
/// beyond what a dense factorization allows.
pub fn hadamard_upper_bound(lat: &Lattice, samples: usize, rng: &RngStream) -> Result<VolumeEstimate> {
    if samples < 2 {
        return Err(Error::precondition("upper bound needs at least 2 samples"));
    }
    if lat.size() < 2 {
        return Err(Error::precondition("upper bound needs D ≥ 2"));
    }
    let logs = par_draws(rng, samples, |r| {
        let (_, eta) = sample_eta(lat, r);
        0.5 * reduced_metric_diagonal(&eta).iter().map(|g| g.ln()).sum::<f64>()
    });
    let (value, stderr) = log_mean_exp(&logs);
    Ok(VolumeEstimate::new(value - ln_gamma(lat.size() as f64), stderr, samples))
}

/// `(D−1)/2·log(¼) − log Γ(D)`: every `G'_ii = η_i(1−η_i) ≤ ¼`.
pub fn upper_bound_majorant(d: usize) -> f64 {
    assert!(d >= 1);
    0.5 * (d - 1) as f64 * 0.25f64.ln() - ln_gamma(d as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub d: usize,
    pub upper: f64,
    pub upper_stderr: f64,
    pub majorant: f64,
}

/// Upper-bound table over a family of lattices of increasing size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitTable {
    pub rows: Vec<LimitRow>,
    /// First row index from which the upper bound strictly decreases through
    /// the end of the table.
    pub decreasing_from: Option<usize>,
}

/// Evaluates the Hadamard upper bound across `family` and locates the
/// point after which it strictly decreases.
pub fn limiting_volume_check(
    family: &[Lattice],
    samples: usize,
    rng: &RngStream,
) -> Result<LimitTable> {
    if family.windows(2).any(|w| w[0].size() >= w[1].size()) {
        return Err(Error::precondition("lattice family must be ordered by increasing D"));
    }
    let rows = family
        .iter()
        .enumerate()
        .map(|(k, lat)| {
            let est = hadamard_upper_bound(lat, samples, &rng.child(k as u64))?;
            Ok(LimitRow {
                d: lat.size(),
                upper: est.value,
                upper_stderr: est.stderr,
                majorant: upper_bound_majorant(lat.size()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let decreasing_from = if rows.is_empty() {
        None
    } else {
        let mut start = rows.len() - 1;
        while start > 0 && rows[start - 1].upper > rows[start].upper {
            start -= 1;
        }
        (start + 1 < rows.len()).then_some(start)
    };
    Ok(LimitTable {
        rows,
        decreasing_from,
    })
}
