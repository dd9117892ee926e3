//! Minimum-description-length code lengths and information-manifold
//! log-volumes.
//!
//! The crate covers four model families:
//!
//! | Module | Model | Main quantities |
//! |--------|-------|-----------------|
//! | [`regression`] | isotropic power-constrained linear regression | `log V`, `log V_reg`, regime bounds |
//! | [`capacity`] | Gaussian linear channel `y = Xβ + ε` | Monte-Carlo capacity, digamma / Jensen bounds |
//! | [`lattice`] | statistical lattice models (Boltzmann machines) | η-coordinates, metric tensor, volume bounds |
//! | [`perceptron`] | stochastic sigmoid perceptron | Amari coefficients, log-volume |
//!
//! [`experiments`] reproduces the ridge double-descent risk curves and the
//! lattice MDL curve as deterministic tables.
//!
//! Every volume and determinant is carried in the log domain. All sampling
//! goes through [`RngStream`], so a `(seed, stream_id)` pair pins a result
//! regardless of how many worker threads run the draws.

pub mod capacity;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod lattice;
pub mod numerics;
pub mod perceptron;
pub mod regression;

pub use error::{Error, Result};
pub use estimate::VolumeEstimate;
pub use numerics::{RngStream, SymmetricMatrix};
