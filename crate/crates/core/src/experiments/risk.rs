use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::ridge::{generate_dataset, Dataset};
use crate::error::Result;
use crate::estimate::mean_and_stderr;
use crate::numerics::{Cholesky, RngStream, SymmetricMatrix};

/// One `(n, d, α)` cell of the risk curve, averaged over folds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskRecord {
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub fold_count: usize,
    pub train_mse: f64,
    pub train_se: f64,
    pub test_mse: f64,
    pub test_se: f64,
    pub beta_norm_sq: f64,
    pub empirical_snr: f64,
    pub seed: u64,
}

/// Records in grid order: `n` outermost, then `α`, then `d`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RiskCurve {
    pub records: Vec<RiskRecord>,
}

impl RiskCurve {
    /// Distinct `(n, α)` pairs in first-seen order.
    pub fn series_keys(&self) -> Vec<(usize, f64)> {
        let mut keys: Vec<(usize, f64)> = Vec::new();
        for r in &self.records {
            if !keys.iter().any(|&(n, a)| n == r.n && a == r.alpha) {
                keys.push((r.n, r.alpha));
            }
        }
        keys
    }

    /// Records for one `(n, α)` pair, ordered by `d`.
    pub fn series(&self, n: usize, alpha: f64) -> Vec<RiskRecord> {
        let mut s: Vec<RiskRecord> = self
            .records
            .iter()
            .filter(|r| r.n == n && r.alpha == alpha)
            .copied()
            .collect();
        s.sort_by_key(|r| r.d);
        s
    }

    /// Record with the largest value of `key` among `d ≥ d_from`.
    pub fn argmax(
        &self,
        n: usize,
        alpha: f64,
        d_from: usize,
        key: impl Fn(&RiskRecord) -> f64,
    ) -> Option<RiskRecord> {
        self.series(n, alpha)
            .into_iter()
            .filter(|r| r.d >= d_from)
            .max_by(|a, b| key(a).total_cmp(&key(b)))
    }
}

/// Seeded shuffle of `0..n`, cut into `folds` contiguous blocks whose sizes
/// differ by at most one.
pub fn fold_partition(n: usize, folds: usize, rng: &RngStream) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng.rng());
    (0..folds)
        .map(|k| idx[k * n / folds..(k + 1) * n / folds].to_vec())
        .collect()
}

struct Split {
    train_x: DMatrix<f64>,
    train_y: DVector<f64>,
    test_x: DMatrix<f64>,
    test_y: DVector<f64>,
}

fn split(ds: &Dataset, test: &[usize]) -> Split {
    let mut in_test = vec![false; ds.y.len()];
    test.iter().for_each(|&i| in_test[i] = true);
    let train: Vec<usize> = (0..ds.y.len()).filter(|&i| !in_test[i]).collect();
    Split {
        train_x: ds.x.select_rows(&train),
        train_y: ds.y.select_rows(&train),
        test_x: ds.x.select_rows(test),
        test_y: ds.y.select_rows(test),
    }
}

#[derive(Debug, Clone, Copy)]
struct FoldStats {
    train_mse: f64,
    test_mse: f64,
    beta_norm_sq: f64,
}

fn mse(x: &DMatrix<f64>, beta: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (x * beta - y).norm_squared() / y.len() as f64
}

/// Fits every ridge constant at dimension `d` from one Gram matrix.
fn fit_cell(s: &Split, d: usize, alphas: &[f64]) -> Result<Vec<FoldStats>> {
    let xt = s.train_x.columns(0, d).into_owned();
    let xv = s.test_x.columns(0, d).into_owned();
    let primal = d <= xt.nrows();
    let (gram, rhs) = if primal {
        (SymmetricMatrix::gram_of_columns(&xt), xt.tr_mul(&s.train_y))
    } else {
        (SymmetricMatrix::gram_of_rows(&xt), s.train_y.clone())
    };
    alphas
        .iter()
        .map(|&alpha| {
            let sol = Cholesky::exact(&gram, alpha)?.solve(&rhs);
            let beta = if primal { sol } else { xt.tr_mul(&sol) };
            Ok(FoldStats {
                train_mse: mse(&xt, &beta, &s.train_y),
                test_mse: mse(&xv, &beta, &s.test_y),
                beta_norm_sq: beta.norm_squared(),
            })
        })
        .collect()
}

/// K-fold ridge risk curves over the whole `(n, α, d)` grid.
///
/// Each `n` gets its own dataset (fits at dimension `d` use its first `d`
/// columns) and fold permutation. Cells run in parallel; every cell is
/// computed sequentially, so results do not depend on the worker count.
pub fn kfold_curve(config: &ExperimentConfig) -> Result<RiskCurve> {
    config.validate()?;
    let root = RngStream::new(config.seed);
    let mut records = Vec::new();
    for &n in &config.n_values {
        let stream = root.child(n as u64);
        let ds = generate_dataset(
            n,
            config.d_max(),
            config.d_true,
            config.beta_var,
            config.noise_var,
            &stream.child(0),
        )?;
        let splits: Vec<Split> = fold_partition(n, config.folds, &stream.child(1))
            .iter()
            .map(|test| split(&ds, test))
            .collect();
        let cells: Vec<(usize, usize)> = (0..config.d_grid.len())
            .flat_map(|j| (0..config.folds).map(move |f| (j, f)))
            .collect();
        let stats: Vec<Vec<FoldStats>> = cells
            .par_iter()
            .map(|&(j, f)| fit_cell(&splits[f], config.d_grid[j], &config.alpha_values))
            .collect::<Result<_>>()?;

        let snr = if config.noise_var > 0.0 {
            ds.empirical_snr(config.noise_var)
        } else {
            f64::INFINITY
        };
        for (a, &alpha) in config.alpha_values.iter().enumerate() {
            for (j, &d) in config.d_grid.iter().enumerate() {
                let folds = &stats[j * config.folds..(j + 1) * config.folds];
                let pick = |g: fn(&FoldStats) -> f64| -> Vec<f64> {
                    folds.iter().map(|f| g(&f[a])).collect()
                };
                let (train_mse, train_se) = mean_and_stderr(&pick(|s| s.train_mse));
                let (test_mse, test_se) = mean_and_stderr(&pick(|s| s.test_mse));
                let (beta_norm_sq, _) = mean_and_stderr(&pick(|s| s.beta_norm_sq));
                records.push(RiskRecord {
                    n,
                    d,
                    alpha,
                    fold_count: config.folds,
                    train_mse,
                    train_se,
                    test_mse,
                    test_se,
                    beta_norm_sq,
                    empirical_snr: snr,
                    seed: config.seed,
                });
            }
        }
    }
    Ok(RiskCurve { records })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_covers_rows_once() {
        for (n, k) in [(300, 10), (37, 4), (10, 10)] {
            let parts = fold_partition(n, k, &RngStream::new(1));
            assert_eq!(parts.len(), k);
            let mut all: Vec<usize> = parts.concat();
            all.sort_unstable();
            assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
            assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn noiseless_recovery() {
        let cfg = ExperimentConfig {
            n_values: vec![200],
            alpha_values: vec![1e-8],
            d_grid: vec![20],
            d_true: 20,
            noise_var: 0.0,
            folds: 5,
            ..Default::default()
        };
        let curve = kfold_curve(&cfg).unwrap();
        assert_eq!(curve.records.len(), 1);
        assert!(curve.records[0].test_mse < 1e-10, "{:?}", curve.records[0]);
    }

    #[test]
    fn small_grid_shape_and_order() {
        let cfg = ExperimentConfig {
            n_values: vec![40, 60],
            alpha_values: vec![1.0, 10.0],
            d_grid: vec![5, 20, 80],
            d_true: 10,
            folds: 4,
            seed: 3,
            ..Default::default()
        };
        let curve = kfold_curve(&cfg).unwrap();
        assert_eq!(curve.records.len(), 12);
        assert_eq!(curve.series_keys(), vec![(40, 1.0), (40, 10.0), (60, 1.0), (60, 10.0)]);
        assert_eq!(curve.records[0].d, 5);
        assert_eq!(curve.records[3].alpha, 10.0);
        for r in &curve.records {
            assert!(r.train_mse >= 0.0 && r.test_mse >= 0.0 && r.beta_norm_sq >= 0.0);
            assert_eq!(r.fold_count, 4);
        }
        assert_eq!(curve, kfold_curve(&cfg).unwrap());
    }
}
