//! Isotropic Gaussian vector random fields on compact two-point homogeneous
//! spaces: spheres and the real, complex, quaternionic and octonionic
//! projective spaces.
//!
//! Covariances are Jacobi series `C(ρ; t) = Σ B_n(t) P_n^{(α,β)}(cos ρ)`.
//! The crate evaluates and validates such series ([`spectral`]), simulates
//! fields from them ([`simulate`]), and checks the underlying identities
//! numerically ([`verify`]).

// Negated float comparisons (`!(x < y)`) deliberately treat NaN as failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod rng;
pub mod simulate;
pub mod spaces;
pub mod specialfn;
pub mod spectral;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::Mat;
pub use simulate::{matrix_sqrt, simulate_spatial, simulate_spatiotemporal, Realization, Simulator};
pub use spaces::{make_space, Point, Quaternion, SpaceFamily, SpaceParams};
pub use specialfn::{JacobiParams, QuadratureRule};
pub use spectral::{
    eval_cov, eval_cov_symmetrized, truncation_bound, CovarianceSeries, LagDomain, Model, ScalarCorrelation,
    SpatialModel, SpatioTemporalModel, TailEnvelope, TemporalKernel, ValidityReport,
};
pub use verify::MCEstimate;
