use rand_distr::{Distribution, Exp1};

use super::Lattice;
use crate::error::{Error, Result};
use crate::numerics::{StreamRng, SymmetricMatrix};

const SIMPLEX_TOL: f64 = 1e-9;

/// Expectation coordinates `η_p = Σ_{q ≥ p} P(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaCoordinates(Vec<f64>);

impl EtaCoordinates {
    /// The least element carries the total mass, which is exactly 1.
    fn pinned(mut values: Vec<f64>) -> Self {
        values[0] = 1.0;
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `p ≤ q ⇒ η_p ≥ η_q`, checked over the lattice's generating pairs.
    pub fn is_order_compatible(&self, lat: &Lattice) -> bool {
        lat.cover_pairs()
            .into_iter()
            .all(|(p, q)| self.0[p] >= self.0[q])
    }
}

/// `η = Z·P` for a distribution `probs` over the lattice elements.
pub fn eta_from_distribution(lat: &Lattice, probs: &[f64]) -> Result<EtaCoordinates> {
    if probs.len() != lat.size() {
        return Err(Error::precondition(format!(
            "{} probabilities for a lattice of size {}",
            probs.len(),
            lat.size()
        )));
    }
    let sum: f64 = probs.iter().sum();
    let min = probs.iter().copied().fold(f64::INFINITY, f64::min);
    if (sum - 1.0).abs() > SIMPLEX_TOL || min < -SIMPLEX_TOL || !sum.is_finite() {
        return Err(Error::NotOnSimplex { sum, min });
    }
    Ok(EtaCoordinates::pinned(lat.zeta_apply(probs)))
}

/// Full metric `G_ij = η_{i∨j} − η_i η_j` over all `D` elements. Its first
/// row and column vanish because `η_1 = 1`.
pub fn full_metric_tensor(lat: &Lattice, eta: &EtaCoordinates) -> SymmetricMatrix {
    metric_block(lat, eta.values(), 0)
}

/// Metric restricted to `η' = (η_2, …, η_D)`, a `(D−1)×(D−1)` matrix.
pub fn metric_tensor(lat: &Lattice, eta: &EtaCoordinates) -> SymmetricMatrix {
    metric_block(lat, eta.values(), 1)
}

fn metric_block(lat: &Lattice, eta: &[f64], skip: usize) -> SymmetricMatrix {
    let dim = lat.size() - skip;
    SymmetricMatrix::from_lower_fn(dim, |a, b| {
        let (i, j) = (a + skip, b + skip);
        eta[lat.join(i, j)] - eta[i] * eta[j]
    })
}

/// Diagonal of the reduced metric, `η_i − η_i²` for `i = 2..D`.
pub fn reduced_metric_diagonal(eta: &EtaCoordinates) -> Vec<f64> {
    eta.values()[1..].iter().map(|e| e - e * e).collect()
}

/// One uniform draw on the probability simplex over the lattice elements
/// (`δ ~ Dirichlet(1, …, 1)` from normalised unit exponentials), mapped to
/// `η = Z·δ`.
pub fn sample_eta(lat: &Lattice, rng: &mut StreamRng) -> (Vec<f64>, EtaCoordinates) {
    let mut delta: Vec<f64> = (0..lat.size()).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = delta.iter().sum();
    for v in &mut delta {
        *v /= total;
    }
    let eta = lat.zeta_apply(&delta);
    (delta, EtaCoordinates::pinned(eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_boolean_lattice, build_lattice_from_covers};
    use crate::numerics::RngStream;

    #[test]
    fn point_mass_on_bottom() {
        let l = build_boolean_lattice(2).unwrap();
        let eta = eta_from_distribution(&l, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(eta.values(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn uniform_on_boolean_two() {
        let l = build_boolean_lattice(2).unwrap();
        let eta = eta_from_distribution(&l, &[0.25; 4]).unwrap();
        assert_eq!(eta.values(), [1.0, 0.5, 0.5, 0.25]);
        assert!(eta.is_order_compatible(&l));
    }

    #[test]
    fn eta_bottom_is_total_mass() {
        let l = build_boolean_lattice(3).unwrap();
        let p = [0.3, 0.1, 0.05, 0.15, 0.1, 0.1, 0.1, 0.1];
        let eta = eta_from_distribution(&l, &p).unwrap();
        assert!((eta.values()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eta_matches_dense_zeta_product() {
        let l = build_boolean_lattice(3).unwrap();
        let p = [0.3, 0.1, 0.05, 0.15, 0.1, 0.1, 0.1, 0.1];
        let z = l.zeta_matrix().unwrap();
        let dense = z * nalgebra::DVector::from_column_slice(&p);
        let eta = eta_from_distribution(&l, &p).unwrap();
        for (a, b) in eta.values().iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn simplex_violation() {
        let l = build_boolean_lattice(1).unwrap();
        assert!(matches!(
            eta_from_distribution(&l, &[0.7, 0.7]),
            Err(Error::NotOnSimplex { .. })
        ));
        assert!(eta_from_distribution(&l, &[1.5, -0.5]).is_err());
        assert!(eta_from_distribution(&l, &[1.0]).is_err());
    }

    #[test]
    fn metric_tensor_boolean_two_uniform() {
        let l = build_boolean_lattice(2).unwrap();
        let eta = eta_from_distribution(&l, &[0.25; 4]).unwrap();
        let g = metric_tensor(&l, &eta);
        let expect = [
            [0.25, 0.0, 0.125],
            [0.0, 0.25, 0.125],
            [0.125, 0.125, 0.1875],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!((g.get(i, j) - v).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn full_metric_first_row_is_zero() {
        let l = build_boolean_lattice(3).unwrap();
        let mut rng = RngStream::new(3).rng();
        for _ in 0..20 {
            let (_, eta) = sample_eta(&l, &mut rng);
            let g = full_metric_tensor(&l, &eta);
            for j in 0..l.size() {
                assert_eq!(g.get(0, j), 0.0);
            }
            for (i, d) in reduced_metric_diagonal(&eta).iter().enumerate() {
                assert!(*d >= 0.0);
                assert_eq!(*d, metric_tensor(&l, &eta).get(i, i));
            }
        }
    }

    #[test]
    fn sampled_eta_is_valid() {
        let diamond =
            build_lattice_from_covers(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], None).unwrap();
        for lat in [build_boolean_lattice(3).unwrap(), diamond] {
            let mut rng = RngStream::new(11).rng();
            for _ in 0..100 {
                let (delta, eta) = sample_eta(&lat, &mut rng);
                assert!((delta.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(eta.is_order_compatible(&lat));
                assert!(eta.values().iter().all(|&e| (0.0..=1.0 + 1e-12).contains(&e)));
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let l = build_boolean_lattice(2).unwrap();
        let a = sample_eta(&l, &mut RngStream::new(5).rng());
        let b = sample_eta(&l, &mut RngStream::new(5).rng());
        assert_eq!(a, b);
    }

    #[test]
    fn two_chain_marginal_is_uniform() {
        // Dirichlet(1,1) ⇒ η₂ = δ₂ ~ U(0,1); Kolmogorov–Smirnov distance
        let l = build_boolean_lattice(1).unwrap();
        let mut rng = RngStream::new(21).rng();
        let mut xs: Vec<f64> = (0..10_000).map(|_| sample_eta(&l, &mut rng).1.values()[1]).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "KS = {ks}");
    }
}
