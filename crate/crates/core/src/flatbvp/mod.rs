//! Spectral solver for the linearized gauged boundary value problem at the flat exterior.

pub mod conditions;
pub mod data;
pub mod harmonics;
pub mod oracle;
pub mod solve;
pub mod system;
pub mod verify;

use thiserror::Error;

pub use data::BoundaryData;
pub use solve::{kernel_check, solve, KernelRun, ResidualPoints, Solution, SolveReport};
pub use system::{assemble, ModeSystem, Spectrum};

#[derive(Debug, Error)]
pub enum FlatError {
    #[error("point at radius {0} lies inside the unit sphere")]
    InsideBoundary(f64),
    #[error("truncation degree {0} is too small (need L >= 2)")]
    Truncation(usize),
    #[error("invalid boundary data: {0}")]
    InvalidData(String),
    #[error("ill-posed truncation: kernel of dimension {kernel_dim} is not spanned by the asymptotic Poincaré modes (sigma_min = {sigma_min:e})")]
    IllPosed { kernel_dim: usize, sigma_min: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}
