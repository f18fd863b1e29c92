//! Numerical laboratory for the generalized Harper cocycle
//! `A(x) = [[E − 2a1 cos 2πx − 2a2 cos 4πx, −1], [1, 0]]` over the rotation
//! `x ↦ x + α`, and its complexification `x ↦ x + iε`.
//!
//! Everything is generic over [`Real`]; the aliases below fix `f64`.

pub mod bounds;
pub mod cocycle;
pub mod engine;
pub mod error;
pub mod oracles;
pub mod scalar;
pub mod sum;
pub mod tolerances;

pub use cocycle::{
    potential_value, product_log_norm, product_norm_floor, transfer_matrix, NormKind,
};
pub use engine::{le_estimate, le_profile, Membership, Regime};
pub use error::{LabError, Result};
pub use scalar::{golden_mean, Real};
pub use tolerances::Tolerances;

pub type Params = cocycle::ModelParams<f64>;
pub type Phase = cocycle::PhasePoint<f64>;
pub type Matrix = cocycle::TransferMatrix<f64>;
pub type Estimate = engine::LeEstimate<f64>;
pub type SamplingPlan = engine::Sampling<f64>;
pub type Profile = engine::LeProfile<f64>;
pub type ProfileSettings = engine::ProfileConfig<f64>;
pub type Bounds = bounds::BoundReport<f64>;
