//! Log-volumes and MDL bounds for isotropic, power-constrained linear
//! regression `y = Xβ + ε`, `‖β‖² ≤ P`, `ε ~ N(0, σ²)`.
//!
//! The hard power constraint enters only through the ball term
//! `log(B^D(√P)/σ^D)`; `β` is never sampled here.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::capacity::{self, standard_normal_matrix};
use crate::error::{Error, Result};
use crate::estimate::VolumeEstimate;
use crate::numerics::{ln_gamma, log_det_psd, RngStream, SymmetricMatrix};

/// `(D, N, P, σ²)` for one regression model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionModelSpec {
    pub d: usize,
    pub n: usize,
    pub power: f64,
    pub noise_var: f64,
}

impl RegressionModelSpec {
    pub fn new(d: usize, n: usize, power: f64, noise_var: f64) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::precondition(format!(
                "d and n must be positive (d = {d}, n = {n})"
            )));
        }
        if !(power > 0.0 && power.is_finite()) || !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::precondition(format!(
                "power and noise_var must be positive (P = {power}, σ² = {noise_var})"
            )));
        }
        Ok(Self {
            d,
            n,
            power,
            noise_var,
        })
    }

    /// `P / σ²`.
    pub fn snr(&self) -> f64 {
        self.power / self.noise_var
    }

    /// Ridge constant `D / SNR`.
    pub fn alpha(&self) -> f64 {
        self.d as f64 / self.snr()
    }

    /// `log(B^D(√P) / σ^D)`.
    pub fn distinguishability(&self) -> f64 {
        log_ball_volume(self.d, self.power.sqrt()) - 0.5 * self.d as f64 * self.noise_var.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    SeededGaussian { seed: u64, stream_id: u64 },
    External,
}

/// An `N×D` covariate matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    data: DMatrix<f64>,
    provenance: Provenance,
}

impl DesignMatrix {
    /// `X_ij ~ N(0, 1)` drawn from `rng`.
    pub fn seeded_gaussian(rows: usize, cols: usize, rng: &RngStream) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::precondition("design matrix must be at least 1x1"));
        }
        let data = standard_normal_matrix(rows, cols, &mut rng.rng());
        Ok(Self {
            data,
            provenance: Provenance::SeededGaussian {
                seed: rng.seed,
                stream_id: rng.stream_id,
            },
        })
    }

    pub fn from_matrix(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::precondition("design matrix must be at least 1x1"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::precondition("design matrix has non-finite entries"));
        }
        Ok(Self {
            data,
            provenance: Provenance::External,
        })
    }

    pub fn from_row_slice(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::precondition(format!(
                "expected {} values for a {rows}x{cols} matrix, got {}",
                rows * cols,
                values.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(rows, cols, values))
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    fn check_spec(&self, spec: &RegressionModelSpec) -> Result<()> {
        if spec.d != self.cols() || spec.n != self.rows() {
            return Err(Error::precondition(format!(
                "spec (D = {}, N = {}) does not match a {}x{} design",
                spec.d,
                spec.n,
                self.rows(),
                self.cols()
            )));
        }
        Ok(())
    }
}

/// `log B^dim(radius) = (dim/2)·log π − log Γ(dim/2 + 1) + dim·log radius`.
///
/// # Panics
/// If `dim == 0` or `radius ≤ 0`.
pub fn log_ball_volume(dim: usize, radius: f64) -> f64 {
    assert!(dim >= 1, "ball dimension must be positive");
    assert!(radius > 0.0, "ball radius must be positive, got {radius}");
    let d = dim as f64;
    0.5 * d * PI.ln() - ln_gamma(0.5 * d + 1.0) + d * radius.ln()
}

/// `log V = ½ log det(XᵀX) + log(B^D(√P)/σ^D)`.
///
/// Fails with [`Error::Singular`] when `D > N`: `XᵀX` then has a null space
/// and the regularized variant must be used instead.
pub fn log_volume(x: &DesignMatrix, spec: &RegressionModelSpec) -> Result<f64> {
    x.check_spec(spec)?;
    Ok(0.5 * shifted_log_det(x, 0.0)? + spec.distinguishability())
}

/// `log V_reg = ½ log det(α·I + XᵀX) + log(B^D(√P)/σ^D)` with `α = D/SNR`.
pub fn regularized_log_volume(x: &DesignMatrix, spec: &RegressionModelSpec) -> Result<f64> {
    x.check_spec(spec)?;
    Ok(0.5 * shifted_log_det(x, spec.alpha())? + spec.distinguishability())
}

/// `f(α) = log det(α·I_D + XᵀX)`, nondecreasing in `α`.
///
/// For `D > N` and `α > 0` the determinant is taken on the `N×N` side:
/// `f(α) = (D − N)·log α + log det(α·I_N + XXᵀ)`.
pub fn shifted_log_det(x: &DesignMatrix, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain {
            function: "shifted_log_det",
            value: alpha,
        });
    }
    let (n, d) = (x.rows(), x.cols());
    if alpha == 0.0 {
        if d > n {
            return Err(Error::Singular { smallest_pivot: 0.0 });
        }
        return log_det_psd(&SymmetricMatrix::gram_of_columns(x.as_matrix()), 0.0);
    }
    if d > n {
        let small = SymmetricMatrix::gram_of_rows(x.as_matrix()).scaled_shifted(1.0, alpha);
        Ok((d - n) as f64 * alpha.ln() + log_det_psd(&small, 0.0)?)
    } else {
        let m = SymmetricMatrix::gram_of_columns(x.as_matrix()).scaled_shifted(1.0, alpha);
        log_det_psd(&m, 0.0)
    }
}

/// `E_X[log V_reg] = C + log(B^D(√P)/σ^D) + (D/2)·log α`, with the capacity
/// `C` estimated by Monte Carlo on `rng`.
///
/// The returned bounds are the capacity bounds shifted by the same offset.
pub fn mean_regularized_log_volume(
    spec: &RegressionModelSpec,
    samples: usize,
    rng: &RngStream,
) -> Result<VolumeEstimate> {
    let cap = capacity::capacity_mc(spec.d, spec.n, spec.snr(), samples, rng)?;
    let offset = spec.distinguishability() + 0.5 * spec.d as f64 * spec.alpha().ln();
    Ok(VolumeEstimate::new(cap.value + offset, cap.stderr, samples)
        .with_bounds(cap.lower_bound + offset, cap.upper_bound + offset))
}

/// Classical-regime (`D ≤ N`) bound on `E[log V_reg]` under `N ≫ α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBound {
    /// `(D/2)·log N + log(B^D(√P)/σ^D)`.
    pub value: f64,
    /// `(D/2)·log(N + α) + log(B^D(√P)/σ^D)`, before dropping `α`.
    pub exact: f64,
    /// False when `N < 10·α`, where dropping `α` against `N` is not justified.
    pub approximation_valid: bool,
}

pub fn classical_regime_bound(spec: &RegressionModelSpec) -> Result<ClassicalBound> {
    if spec.d > spec.n {
        return Err(Error::precondition(format!(
            "classical bound needs D ≤ N (D = {}, N = {})",
            spec.d, spec.n
        )));
    }
    Ok(classical_bound_at(spec, spec.n as f64))
}

/// [`classical_regime_bound`] with a real-valued sample count.
pub fn classical_bound_at(spec: &RegressionModelSpec, n: f64) -> ClassicalBound {
    let half_d = 0.5 * spec.d as f64;
    let ball = spec.distinguishability();
    let alpha = spec.alpha();
    ClassicalBound {
        value: half_d * n.ln() + ball,
        exact: half_d * (n + alpha).ln() + ball,
        approximation_valid: n >= 10.0 * alpha,
    }
}

/// Modern-regime (`D > N`) bound:
/// `(N/2)·log(SNR + 1) + log(B^D(√P)/σ^D) + (D/2)·log α`.
pub fn modern_regime_bound(spec: &RegressionModelSpec) -> Result<f64> {
    require_modern(spec)?;
    Ok(0.5 * spec.n as f64 * spec.snr().ln_1p()
        + spec.distinguishability()
        + 0.5 * spec.d as f64 * spec.alpha().ln())
}

/// Upper bound on the MDL code length in the modern regime:
/// `(D/2)·log(N·D/(2πe)) + (N/2)·log(SNR + 1) + log B^D(1)`.
pub fn mdl_upper_bound(spec: &RegressionModelSpec) -> Result<f64> {
    require_modern(spec)?;
    let (d, n) = (spec.d as f64, spec.n as f64);
    Ok(0.5 * d * (n * d / (2.0 * PI * E)).ln()
        + 0.5 * n * spec.snr().ln_1p()
        + log_ball_volume(spec.d, 1.0))
}

fn require_modern(spec: &RegressionModelSpec) -> Result<()> {
    if spec.d <= spec.n {
        return Err(Error::precondition(format!(
            "modern-regime bound needs D > N (D = {}, N = {})",
            spec.d, spec.n
        )));
    }
    Ok(())
}

/// Sphere-packing log-ratio `log(V₂/V₁) = ½ log det(SNR·XXᵀ/D)` of the
/// signal ellipsoid to the noise ball.
pub fn sphere_packing_log_ratio(x: &DesignMatrix, spec: &RegressionModelSpec) -> Result<f64> {
    x.check_spec(spec)?;
    if x.cols() < x.rows() {
        // rank(XXᵀ) ≤ D < N
        return Err(Error::Singular { smallest_pivot: 0.0 });
    }
    let m = SymmetricMatrix::gram_of_rows(x.as_matrix()).scaled_shifted(spec.snr() / spec.d as f64, 0.0);
    Ok(0.5 * log_det_psd(&m, 0.0)?)
}
