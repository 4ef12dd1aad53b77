//! Stationary metrics, orbit-space calculus and Bartnik boundary data.

pub mod bartnik;
pub mod fd;
pub mod fixtures;
pub mod linearized;
pub mod metric;
pub mod quotient;
pub mod tensor;
pub mod verify;

use thiserror::Error;

pub use fd::{FdConfig, Jet, Point};
pub use fixtures::{fixture, Fixture, FixtureName};
pub use metric::{assemble_adm, assemble_projection, field, Field, Metric4, ProjectionTriple, StationaryTriple};

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("shift is not timelike-compatible at {point:?}: N² = {lapse_sq}, |X|² = {shift_sq}")]
    Causality { point: Point, lapse_sq: f64, shift_sq: f64 },
    #[error("spatial metric is not positive definite at {point:?}")]
    NotRiemannian { point: Point },
    #[error("Killing norm u = {u} is not positive at {point:?}")]
    NonPositiveNorm { point: Point, u: f64 },
    #[error("metric is not Lorentzian at {point:?}")]
    NotLorentzian { point: Point },
    #[error("unknown or invalid fixture `{0}`")]
    UnknownFixture(String),
    #[error("point at radius {radius} lies inside the excluded region (need r >= {required})")]
    InsideExcluded { radius: f64, required: f64 },
    #[error("boundary sphere is degenerate: {0}")]
    DegenerateBoundary(String),
    #[error("time translation is not spacelike-preserving: {0}")]
    TranslationTooLarge(String),
}
