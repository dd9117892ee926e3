//! Fixed inputs shared by the benchmarks.

use mdlvol_core::experiments::{generate_dataset, Dataset};
use mdlvol_core::regression::DesignMatrix;
use mdlvol_core::{RngStream, SymmetricMatrix};

pub const SEED: u64 = 7;

pub fn design(rows: usize, cols: usize) -> DesignMatrix {
    DesignMatrix::seeded_gaussian(rows, cols, &RngStream::new(SEED)).expect("valid shape")
}

/// `I + XᵀX` for a Gaussian design, positive definite by construction.
pub fn shifted_gram(rows: usize, cols: usize) -> SymmetricMatrix {
    SymmetricMatrix::gram_of_columns(design(rows, cols).as_matrix()).scaled_shifted(1.0, 1.0)
}

pub fn ridge_dataset(n: usize, d: usize) -> Dataset {
    generate_dataset(n, d, d / 2, 0.25, 1.0, &RngStream::new(SEED)).expect("valid dataset")
}
