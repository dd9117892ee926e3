use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Jitter multipliers, scaled by `trace / dim`, tried in order when a
/// factorization fails.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];

/// Dense real symmetric matrix. Entry `(i, j)` and `(j, i)` are stored
/// bit-identically.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Builds the matrix from the lower triangle produced by `f(i, j)`, `j ≤ i`.
    pub fn from_lower_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            for i in j..dim {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self(m)
    }

    /// Wraps `m` after checking exact symmetry.
    pub fn try_from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::precondition(format!(
                "matrix is {}x{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        for j in 0..m.ncols() {
            for i in j + 1..m.nrows() {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::precondition(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    /// Copies the lower triangle of `m` over the upper one.
    pub fn from_lower(mut m: DMatrix<f64>) -> Self {
        assert!(m.is_square());
        let n = m.nrows();
        for j in 0..n {
            for i in j + 1..n {
                m[(j, i)] = m[(i, j)];
            }
        }
        Self(m)
    }

    /// `XᵀX` (columns' Gram matrix).
    pub fn gram_of_columns(x: &DMatrix<f64>) -> Self {
        Self::from_lower(x.tr_mul(x))
    }

    /// `XXᵀ` (rows' Gram matrix).
    pub fn gram_of_rows(x: &DMatrix<f64>) -> Self {
        Self::from_lower(x * x.transpose())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }

    /// `a·self + shift·I`.
    pub fn scaled_shifted(&self, a: f64, shift: f64) -> Self {
        let mut m = &self.0 * a;
        for i in 0..self.dim() {
            m[(i, i)] += shift;
        }
        Self(m)
    }

    pub fn block_diagonal(a: &Self, b: &Self) -> Self {
        let (n, m) = (a.dim(), b.dim());
        let mut out = DMatrix::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&a.0);
        out.view_mut((n, n), (m, m)).copy_from(&b.0);
        Self(out)
    }
}

/// Lower-triangular factor `L` with `m + jitter·I = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: DMatrix<f64>,
    jitter: f64,
}

impl Cholesky {
    /// Factors `m + jitter·I`, walking [`JITTER_LADDER`] on failure.
    pub fn new(m: &SymmetricMatrix, jitter: f64) -> Result<Self> {
        let dim = m.dim();
        if dim == 0 {
            return Ok(Self {
                l: DMatrix::zeros(0, 0),
                jitter,
            });
        }
        let scale = {
            let t = m.trace() / dim as f64;
            if t > 0.0 && t.is_finite() {
                t
            } else {
                1.0
            }
        };
        let mut smallest = f64::INFINITY;
        for rung in JITTER_LADDER {
            let total = jitter + rung * scale;
            if rung > 0.0 && total == jitter {
                continue;
            }
            match factor(m.as_matrix(), total) {
                Ok(l) => return Ok(Self { l, jitter: total }),
                Err(pivot) => smallest = smallest.min(pivot),
            }
        }
        Err(Error::Singular {
            smallest_pivot: smallest,
        })
    }

    /// Factors `m + jitter·I` exactly once, without the ladder.
    pub fn exact(m: &SymmetricMatrix, jitter: f64) -> Result<Self> {
        factor(m.as_matrix(), jitter)
            .map(|l| Self { l, jitter })
            .map_err(|p| Error::Singular { smallest_pivot: p })
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// Total diagonal shift that was applied.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.l.nrows()).map(|i| self.l[(i, i)])
    }

    /// `log det(m + jitter·I) = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.diagonal().map(f64::ln).sum::<f64>()
    }

    /// Solves `(m + jitter·I) x = b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.l.nrows();
        let mut x = b.clone();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[(i, k)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[(k, i)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }
}

/// Column-oriented Cholesky of `a + shift·I`. Returns the offending pivot on
/// failure. A pivot below `dim·ε·max|a_ii|` counts as a failure.
fn factor(a: &DMatrix<f64>, shift: f64) -> std::result::Result<DMatrix<f64>, f64> {
    let n = a.nrows();
    let max_diag = (0..n)
        .map(|i| (a[(i, i)] + shift).abs())
        .fold(0.0f64, f64::max);
    let tol = n as f64 * f64::EPSILON * max_diag;
    let mut l = a.clone();
    for i in 0..n {
        l[(i, i)] += shift;
    }
    for j in 0..n {
        let mut d = l[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > tol) || !d.is_finite() {
            return Err(d);
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = l[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    for j in 1..n {
        for i in 0..j {
            l[(i, j)] = 0.0;
        }
    }
    Ok(l)
}

/// Log-determinant of `m + jitter·I` via Cholesky, in the log domain.
///
/// Retries with the jitter ladder before returning [`Error::Singular`],
/// which carries the smallest pivot seen.
pub fn log_det_psd(m: &SymmetricMatrix, jitter: f64) -> Result<f64> {
    if !(jitter >= 0.0) {
        return Err(Error::Domain {
            function: "log_det_psd",
            value: jitter,
        });
    }
    Cholesky::new(m, jitter).map(|c| c.log_det())
}
