// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! Composite ZZ evolutions robust to coupling-strength errors.
//!
//! A segment `(θ, φ)` is the Ising evolution `exp(-iθ(1+ε) ZZ/2)` viewed in a
//! target-ion frame `W(φ) = 1 ⊗ Rz(φ)Ry(π/2)`, so its generator is
//! `Z ⊗ (cos φ X + sin φ Y)`. The frame phases play the role of pulse phases
//! in a BB1 sequence and the relative error `ε` the role of a Rabi error.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gate::{compose_cnot_sequence, local_z_cnot_equivalence, GateSchedule, Ion, PulseSpec, TwoIonHamiltonian};
use crate::qmath::{kron, rotation, Matrix, Pauli};
use crate::quadrature::gauss_legendre;

/// How the relative coupling error is distributed over the ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spread {
    Point,
    /// Uniform on `[ε - half_width, ε + half_width]`.
    Uniform { half_width: f64 },
}

/// Relative coupling error `ε`, with actual coupling `η(1+ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InhomogeneityModel {
    epsilon: f64,
    spread: Spread,
}

impl InhomogeneityModel {
    pub fn new(epsilon: f64, spread: Spread) -> Result<Self> {
        let hw = match spread {
            Spread::Point => 0.0,
            Spread::Uniform { half_width } => half_width,
        };
        if !(hw >= 0.0 && hw.is_finite()) {
            return Err(Error::InvalidParameter { name: "half_width", reason: format!("must be finite and >= 0, got {hw}") });
        }
        if !(epsilon.abs() + hw < 1.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("support of ε must lie inside (-1, 1), got {epsilon} ± {hw}"),
            });
        }
        Ok(Self { epsilon, spread })
    }

    pub fn point(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, Spread::Point)
    }

    pub fn uniform(center: f64, half_width: f64) -> Result<Self> {
        Self::new(center, Spread::Uniform { half_width })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn spread(&self) -> Spread {
        self.spread
    }
}

/// One composite segment: nominal ZZ angle and frame phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub angle: f64,
    pub phase: f64,
}

/// Ordered list of segments, first applied first.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSchedule {
    segments: Vec<Segment>,
}

impl CompositeSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter { name: "segments", reason: "empty schedule".into() });
        }
        if segments.iter().any(|s| !s.angle.is_finite() || !s.phase.is_finite()) {
            return Err(Error::InvalidParameter { name: "segments", reason: "non-finite angle or phase".into() });
        }
        Ok(Self { segments })
    }

    /// `(π, φ1), (2π, 3φ1), (π, φ1), (θ, 0)` with `φ1 = arccos(-θ/4π)`.
    pub fn bb1(target_theta: f64) -> Result<Self> {
        if !(target_theta > 0.0 && target_theta < TAU) {
            return Err(Error::InvalidAngle(target_theta));
        }
        let phi1 = (-target_theta / (4.0 * PI)).acos();
        Self::new(vec![
            Segment { angle: PI, phase: phi1 },
            Segment { angle: TAU, phase: 3.0 * phi1 },
            Segment { angle: PI, phase: phi1 },
            Segment { angle: target_theta, phase: 0.0 },
        ])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Net evolution with every angle scaled by `1+ε`, in the lab frame.
    pub fn unitary(&self, epsilon: f64) -> Matrix<f64> {
        let inner = self.segments.iter().fold(Matrix::identity(4), |acc, s| {
            let w = frame(s.phase);
            let seg = &(&w * &zz_evolution(s.angle * (1.0 + epsilon))) * &w.dagger();
            &seg * &acc
        });
        let w0 = frame(0.0);
        &(&w0.dagger() * &inner) * &w0
    }
}

/// `exp(-iθ Z⊗Z / 2)`.
pub fn zz_evolution(theta: f64) -> Matrix<f64> {
    let m = Complex::from_polar(1.0, -theta / 2.0);
    let p = m.conj();
    Matrix::from_diagonal(&[m, p, p, m])
}

fn frame(phi: f64) -> Matrix<f64> {
    let local = &rotation(Pauli::Z, phi) * &rotation(Pauli::Y, FRAC_PI_2);
    kron(&Matrix::identity(2), &local)
}

/// The plain refocused CNOT with coupling `1+ε` and nominal `Δt = π/4`.
pub fn naive_gate(epsilon: f64) -> Matrix<f64> {
    let h = TwoIonHamiltonian::coupling(1.0 + epsilon);
    let sched = GateSchedule::new(FRAC_PI_4, 0).expect("positive dt");
    compose_cnot_sequence(&h, &sched)
}

/// Composite ZZ evolution of nominal angle `target_theta` at error `ε`.
pub fn bb1_style_gate(epsilon: f64, target_theta: f64) -> Result<Matrix<f64>> {
    Ok(CompositeSchedule::bb1(target_theta)?.unitary(epsilon))
}

// Puts a ZZ evolution between the single-ion pulses of the refocused CNOT.
fn in_cnot_frame(zz: &Matrix<f64>) -> Matrix<f64> {
    let p = |ion, axis, angle| PulseSpec::new(ion, axis, angle).expect("valid pulse").unitary();
    let u1 = p(Ion::One, Pauli::Y, FRAC_PI_2);
    let u3 = p(Ion::One, Pauli::Y, PI);
    let u4 = p(Ion::Two, Pauli::Y, PI);
    let u6 = p(Ion::One, Pauli::X, FRAC_PI_2);
    let u7 = p(Ion::Two, Pauli::Y, PI);
    [zz, &u4, &u3, &u1].iter().fold(&u7 * &u6, |acc, m| &acc * *m)
}

/// CNOT with the ZZ core replaced by the composite `π/2` evolution.
pub fn composite_cnot(epsilon: f64) -> Matrix<f64> {
    in_cnot_frame(&CompositeSchedule::bb1(FRAC_PI_2).expect("π/2 in range").unitary(epsilon))
}

/// CNOT frame around an arbitrary ZZ angle; `naive_gate(ε)` equals
/// `cnot_frame_gate((1+ε)π/2)` up to global phase.
pub fn cnot_frame_gate(zz_theta: f64) -> Matrix<f64> {
    in_cnot_frame(&zz_evolution(zz_theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Naive,
    Composite,
}

impl GateKind {
    pub fn unitary(self, epsilon: f64) -> Matrix<f64> {
        match self {
            GateKind::Naive => naive_gate(epsilon),
            GateKind::Composite => composite_cnot(epsilon),
        }
    }
}

/// CNOT fidelity after the optimal local-Z correction.
pub fn cnot_fidelity(kind: GateKind, epsilon: f64) -> Result<f64> {
    Ok(local_z_cnot_equivalence(&kind.unitary(epsilon))?.fidelity.min(1.0))
}

pub fn infidelity(kind: GateKind, epsilon: f64) -> Result<f64> {
    Ok(1.0 - cnot_fidelity(kind, epsilon)?)
}

/// Mean CNOT fidelity over the ε distribution; `samples` quadrature nodes
/// for a uniform spread.
pub fn ensemble_average_fidelity(model: InhomogeneityModel, kind: GateKind, samples: usize) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParameter { name: "samples", reason: "need at least one".into() });
    }
    match model.spread {
        Spread::Point => cnot_fidelity(kind, model.epsilon),
        Spread::Uniform { half_width } => {
            let (a, b) = (model.epsilon - half_width, model.epsilon + half_width);
            let (x, w) = gauss_legendre(samples);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let f: Vec<f64> = x.par_iter().map(|&xi| cnot_fidelity(kind, mid + half * xi)).collect::<Result<_>>()?;
            Ok(f.iter().zip(&w).map(|(fi, wi)| fi * wi).sum::<f64>() / 2.0)
        }
    }
}

/// One row of the infidelity-versus-ε table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub epsilon: f64,
    pub naive_infidelity: f64,
    pub composite_infidelity: f64,
}

pub fn scaling_table(epsilons: &[f64]) -> Result<Vec<ScalingRow>> {
    epsilons
        .par_iter()
        .map(|&e| {
            Ok(ScalingRow {
                epsilon: e,
                naive_infidelity: infidelity(GateKind::Naive, e)?,
                composite_infidelity: infidelity(GateKind::Composite, e)?,
            })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}
