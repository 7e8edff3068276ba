// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulation toolkit for ensemble two-qubit gates in rare-earth-doped
//! crystals.
//!
//! * [`qmath`]: dense complex matrices, Hermitian eigensolver and exponential.
//! * [`gate`]: the echo-refocused CNOT pulse sequence on two ZZ-coupled ions.
//! * [`holeburn`]: interaction-strength holeburning by repeated gates.
//! * [`composite`]: BB1-style composite ZZ evolutions against coupling errors.
//! * [`broadening`]: Monte Carlo dipole-dipole shift statistics.
//! * [`hyperfine`]: pseudo-quadrupole structure and cyclic-transition readout.
//!
//! The generic numerics are parameterised by [`Real`]; the aliases below fix
//! the scalar to `f64`, which is what the rest of the crate uses.

pub mod broadening;
pub mod composite;
pub mod error;
pub mod gate;
pub mod holeburn;
pub mod hyperfine;
pub mod qmath;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex matrix over `f64`.
pub type ComplexMatrix = qmath::Matrix<f64>;
/// Complex matrix over `f32`.
pub type ComplexMatrix32 = qmath::Matrix<f32>;
/// Pair Hamiltonian over `f64`.
pub type TwoIonHamiltonian = gate::TwoIonHamiltonian<f64>;
/// Free-evolution schedule over `f64`.
pub type GateSchedule = gate::GateSchedule<f64>;
pub type PulseSpec = gate::PulseSpec<f64>;
pub type LocalZFit = gate::LocalZFit<f64>;
/// Hyperfine parameters over `f64`.
pub type QuadrupoleParams = hyperfine::QuadrupoleParams<f64>;
