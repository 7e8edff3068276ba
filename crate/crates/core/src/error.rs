// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U^dagger U - 1| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("pulse angle {0} outside (-2pi, 2pi]")]
    InvalidAngle(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("peak at eta = {peak} not resolved on the grid: {reason}")]
    PeakNotResolved { peak: f64, reason: String },

    #[error("need at least {required} samples, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    #[error("invalid spin: 2I = {0} (need 1 <= 2I + 1 <= 100)")]
    InvalidSpin(i64),

    #[error("invalid state partition: {0}")]
    InvalidPartition(String),

    #[error("drive level m = {m} is not a member of group {group}")]
    DriveLevelNotInGroup { m: String, group: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
