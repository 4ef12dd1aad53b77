//! Verification toolkit for the linearized stationary Bartnik boundary value problem.

pub mod adn;
pub mod cli;
pub mod flatbvp;
pub mod geometry;
pub mod report;
pub mod symbols;
pub mod symring;
