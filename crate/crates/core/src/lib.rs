//! Multivariate data depth for anomaly detection.
//!
//! The crate computes Mahalanobis, halfspace (Tukey), projection (symmetric and
//! asymmetric), simplicial and simplicial volume (Oja) depths, exactly where that
//! is tractable and by direction search on the unit sphere otherwise. On top of
//! the depth kernels it provides threshold-based anomaly detectors, explanation
//! artifacts built from depth-minimizing directions, and seeded generators for
//! the synthetic benchmark scenarios.
//!
//! Module map:
//!
//! * [`linalg`]: data containers, moment estimates, whitening.
//! * [`robust`]: median, MAD and univariate depth/outlyingness.
//! * [`depths`]: exact depth notions and brute-force oracles.
//! * [`optimize`]: RS, RRS and spherical Nelder-Mead direction search.
//! * [`detect`]: models, thresholds, the box rule and persistence.
//! * [`explain`]: optimal directions, projection sequences, similarity matrices.
//! * [`bench`]: scenarios, the p-metric and the repetition harness.

pub mod bench;
pub mod depths;
pub mod detect;
pub mod error;
pub mod explain;
pub mod linalg;
pub mod optimize;
pub mod robust;
pub mod seeding;

pub use depths::{DepthNotion, DepthValue, Exactness};
pub use error::{DepthError, Result};
pub use linalg::{DataMatrix, LocationScatter, UnitDirection};
