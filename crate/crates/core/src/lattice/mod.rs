//! Statistical lattice models (fully observable Boltzmann machines and
//! their generalisations).
//!
//! A distribution over a finite lattice `(P, ≤)` has expectation
//! coordinates `η_p = Σ_{q ≥ p} P(q)` and Fisher metric
//! `G_ij = η_{i∨j} − η_i η_j`. Dropping the least element (whose row is
//! identically zero) leaves a positive definite `(D−1)×(D−1)` metric `G'`.
//!
//! The manifold volume is estimated by sampling `δ` uniformly on the
//! probability simplex (`η = Zδ` has unit Jacobian because `Z` is unit upper
//! triangular in any linear extension):
//!
//! ```text
//! E[Σ log M_ii] − log Γ(D)  ≤  log V  ≤  log E[√Π G'_ii] − log Γ(D)
//! ```
//!
//! with `G' = MᵀM` the Cholesky factorization.

mod coords;
mod order;
mod volume;

pub use coords::{
    eta_from_distribution, full_metric_tensor, metric_tensor, reduced_metric_diagonal,
    sample_eta, EtaCoordinates,
};
pub use order::{
    build_boolean_lattice, build_lattice_from_covers, Lattice, LatticeSpec, MAX_BOOLEAN_ORDER,
    MAX_DENSE_ZETA, MAX_GENERAL_SIZE,
};
pub use volume::{
    hadamard_upper_bound, lattice_log_volume_mc, lattice_volume_bounds, limiting_volume_check,
    log_simplex_volume, upper_bound_majorant, LatticeVolume, LimitRow, LimitTable,
    MAX_REJECTION_RATE,
};
