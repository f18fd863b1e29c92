//! Lyapunov exponent estimation and analysis of the ε-profile.

mod estimate;
mod profile;

pub use estimate::{le_estimate, LeEstimate, Sampling};
pub use profile::{
    acceleration_at, asymptote_residual, classify_profile, default_acceleration_step, le_profile,
    spectrum_membership, AccelerationReport, LeProfile, Membership, ProfileConfig, Regime,
    SegmentKind, Segment,
};
