//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point must lie in the upper half-plane, got imaginary part {0}")]
    InvalidPoint(f64),

    #[error("weight k must be an even integer >= 4, got {0}")]
    InvalidWeight(i64),

    #[error("argument {name} = {value} outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("tail target {target:e} not reached below the resource ceiling (best bound {achieved:e})")]
    TailNotAchievable { target: f64, achieved: f64 },

    #[error("matrix ({0}, {1}; {2}, {3}) does not have determinant 1")]
    NotUnimodular(i64, i64, i64, i64),

    #[error("matrix is not in Gamma_0(4): lower-left entry {0} is not divisible by 4")]
    NotInGamma04(i64),

    #[error("finite-difference estimates disagree: order 2 and order 4 differ by {gap:e} (allowed {allowed:e})")]
    StepTooLarge { gap: f64, allowed: f64 },

    #[error("point lies within {distance:e} of a geodesic (guard {guard:e})")]
    NearGeodesic { distance: f64, guard: f64 },

    #[error("quadrature did not stabilise after {refinements} refinements (last change {change:e})")]
    QuadratureDivergence { refinements: usize, change: f64 },

    #[error("{samples} samples cannot resolve frequencies up to {max_frequency}")]
    Aliasing { max_frequency: i64, samples: usize },

    #[error("discriminant {0} outside the supported range |D| <= 1e6")]
    DiscriminantRange(i64),

    #[error("invalid input: {0}")]
    Invalid(String),
}
