use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero after substitution: {0}")]
    DivisionByZeroAfterSubstitution(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("classes belong to different models")]
    ModelMismatch,
    #[error("localization sum is not a global class: {0}")]
    NonGlobalClass(String),
    #[error("factor with vanishing scalar part: {0}")]
    NonInvertibleFactor(String),
    #[error("denominator not invertible in the ambient localization: {0}")]
    NonInvertibleDenominator(String),
    #[error("factor mixes unit-root and non-unit-root zeros: {0}")]
    MixedFactor(String),
    #[error("pole at the expansion point: {0}")]
    PoleAtExpansionPoint(String),
    #[error("multiplier does not telescope to a supported closed form: {0}")]
    NonTelescoping(String),
    #[error("series term without positive valuation: {0}")]
    NoPositiveValuation(String),
    #[error("reduction leaves the target profile: {0}")]
    InvalidReduction(String),
    #[error("profile violation: {0}")]
    ProfileViolation(String),
    #[error("form does not match parameter mode: {0}")]
    FormModeMismatch(String),
    #[error("target config has no Chern roots for index {0}")]
    MissingChernRoots(usize),
    #[error("non-equivariant limit is singular: {0}")]
    LimitSingular(String),
    #[error("limit moves a plus-side factor across the polarization: {0}")]
    PlusMinusLeak(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
