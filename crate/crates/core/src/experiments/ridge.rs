use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Normal};

use crate::capacity::standard_normal_matrix;
use crate::error::{Error, Result};
use crate::numerics::{Cholesky, RngStream, SymmetricMatrix};

/// Synthetic regression data: `y = X[:, ..d_true]·β + ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub beta_true: DVector<f64>,
}

impl Dataset {
    /// `‖β_true‖² / noise_var`.
    pub fn empirical_snr(&self, noise_var: f64) -> f64 {
        self.beta_true.norm_squared() / noise_var
    }
}

/// Draws `X ~ N(0,1)^{n×d_max}`, `β_i ~ N(0, beta_var)` and
/// `ε_i ~ N(0, noise_var)` from three child streams of `rng`.
pub fn generate_dataset(
    n: usize,
    d_max: usize,
    d_true: usize,
    beta_var: f64,
    noise_var: f64,
    rng: &RngStream,
) -> Result<Dataset> {
    if d_true > d_max {
        return Err(Error::precondition(format!(
            "d_true = {d_true} exceeds the generated width {d_max}"
        )));
    }
    if !(beta_var > 0.0) || !(noise_var >= 0.0) {
        return Err(Error::precondition("variances must be nonnegative (beta_var positive)"));
    }
    let x = standard_normal_matrix(n, d_max, &mut rng.child(0).rng());
    let beta = Normal::new(0.0, beta_var.sqrt()).expect("positive scale");
    let mut r = rng.child(1).rng();
    let beta_true = DVector::from_fn(d_true, |_, _| beta.sample(&mut r));
    let mut r = rng.child(2).rng();
    let noise_sd = noise_var.sqrt();
    let eps = DVector::from_fn(n, |_, _| {
        let z: f64 = rand_distr::StandardNormal.sample(&mut r);
        noise_sd * z
    });
    let y = x.columns(0, d_true) * &beta_true + eps;
    Ok(Dataset { x, y, beta_true })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::precondition(format!(
            "ridge constant must be nonnegative, got {alpha}"
        )));
    }
    Ok(())
}

/// Solves `(XᵀX + αI)β = Xᵀy` directly.
pub fn ridge_fit_primal(x: &DMatrix<f64>, y: &DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    check_alpha(alpha)?;
    let g = SymmetricMatrix::gram_of_columns(x);
    Ok(Cholesky::exact(&g, alpha)?.solve(&x.tr_mul(y)))
}

/// `β = Xᵀ(XXᵀ + αI)⁻¹y`, the same solution through an `n×n` system.
pub fn ridge_fit_dual(x: &DMatrix<f64>, y: &DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        return Err(Error::precondition("the dual route needs alpha > 0"));
    }
    let k = SymmetricMatrix::gram_of_rows(x);
    Ok(x.tr_mul(&Cholesky::exact(&k, alpha)?.solve(y)))
}

/// Ridge estimate, through the smaller of the two systems. With `α = 0`
/// the primal system is used and fails when `XᵀX` is singular.
pub fn ridge_fit(x: &DMatrix<f64>, y: &DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    if x.nrows() != y.len() {
        return Err(Error::precondition(format!(
            "design has {} rows but y has {} entries",
            x.nrows(),
            y.len()
        )));
    }
    if x.ncols() > x.nrows() && alpha > 0.0 {
        ridge_fit_dual(x, y, alpha)
    } else {
        ridge_fit_primal(x, y, alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_design_halves_y() {
        let x = DMatrix::identity(3, 3);
        let y = DVector::from_vec(vec![2.0, -4.0, 1.0]);
        let b = ridge_fit(&x, &y, 1.0).unwrap();
        assert!((b - &y / 2.0).norm() < 1e-15);
    }

    #[test]
    fn heavy_shrinkage() {
        let ds = generate_dataset(30, 10, 5, 1.0, 1.0, &RngStream::new(1)).unwrap();
        let norms: Vec<f64> = [1.0, 1e3, 1e6, 1e9]
            .iter()
            .map(|&a| ridge_fit(&ds.x, &ds.y, a).unwrap().norm())
            .collect();
        assert!(norms.windows(2).all(|w| w[1] < w[0]));
        assert!(norms[3] < 1e-6);
    }

    #[test]
    fn primal_and_dual_agree() {
        let ds = generate_dataset(20, 50, 10, 0.25, 1.0, &RngStream::new(2)).unwrap();
        for alpha in [1e-2, 1.0, 1e2] {
            let p = ridge_fit_primal(&ds.x, &ds.y, alpha).unwrap();
            let d = ridge_fit_dual(&ds.x, &ds.y, alpha).unwrap();
            assert!((p - d).amax() < 1e-8, "alpha={alpha}");
        }
    }

    #[test]
    fn unregularized_rank_deficient_fails() {
        let ds = generate_dataset(10, 20, 5, 1.0, 1.0, &RngStream::new(3)).unwrap();
        assert!(matches!(ridge_fit(&ds.x, &ds.y, 0.0), Err(Error::Singular { .. })));
    }

    #[test]
    fn noiseless_interpolation() {
        let ds = generate_dataset(40, 10, 10, 0.25, 0.0, &RngStream::new(4)).unwrap();
        let b = ridge_fit(&ds.x, &ds.y, 0.0).unwrap();
        assert!((&ds.x * b - &ds.y).amax() < 1e-10);
    }

    #[test]
    fn dataset_is_reproducible_and_centred() {
        let a = generate_dataset(10_000, 3, 2, 0.25, 1.0, &RngStream::new(5)).unwrap();
        let b = generate_dataset(10_000, 3, 2, 0.25, 1.0, &RngStream::new(5)).unwrap();
        assert_eq!(a, b);
        let bound = 4.0 / (10_000f64).sqrt();
        for j in 0..3 {
            assert!(a.x.column(j).mean().abs() < bound);
        }
        assert!(generate_dataset(10, 3, 4, 0.25, 1.0, &RngStream::new(5)).is_err());
    }
}
