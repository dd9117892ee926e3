//! Shared numerical kernels: log-determinants, special functions and
//! reproducible random streams.

mod linalg;
mod rng;
mod special;

pub use linalg::{log_det_psd, Cholesky, SymmetricMatrix, JITTER_LADDER};
pub use rng::{RngStream, StreamRng, CHUNK};
pub use special::{digamma, log_gamma, EULER_GAMMA};

pub(crate) use rng::par_draws;
pub(crate) use special::ln_gamma_pos as ln_gamma;
