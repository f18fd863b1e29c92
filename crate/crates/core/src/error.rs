use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("factor {index} has |v| = {value}, need |v| > 2")]
    FactorTooSmall { index: usize, value: f64 },

    #[error("orbit point {index} has |potential| = {value} <= 2")]
    OrbitBelowTwo { index: usize, value: f64 },

    #[error("|a1/a2| = {ratio} is below 100, epsilon0 undefined")]
    RatioTooSmall { ratio: f64 },

    #[error("a2 = 0: quantity undefined")]
    VanishingA2,

    #[error("a1 = 0: quantity undefined")]
    VanishingA1,

    #[error("nonpositive logarithm argument {0}")]
    NonpositiveLogArgument(f64),

    #[error("near-singular integrand: min modulus {0:e} on the grid")]
    NearSingular(f64),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
