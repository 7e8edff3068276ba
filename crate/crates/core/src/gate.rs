// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! Echo-refocused CNOT on two ZZ-coupled ions.
//!
//! Basis order is `|c t⟩ = |00⟩, |01⟩, |10⟩, |11⟩` with the control ion
//! ([`Ion::Two`]) as the left tensor factor and the target ion ([`Ion::One`])
//! on the right. Ion 1 is the one that receives the opening `Y_{π/2}` pulse.
//!
//! All pulses are instantaneous rotations `exp(-i·angle·σ/2)`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::qmath::{eigh, expm_hermitian, kron, rotation, Matrix, Pauli};
use crate::scalar::{cis, Real};

/// Which ion of the coupled pair an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ion {
    /// Target ion, right tensor factor.
    One,
    /// Control ion, left tensor factor.
    Two,
}

impl Ion {
    pub fn other(self) -> Self {
        match self {
            Ion::One => Ion::Two,
            Ion::Two => Ion::One,
        }
    }
}

/// Lift a single-ion 2×2 operator into the 4-dimensional pair space.
pub fn embed<T: Real>(ion: Ion, op: &Matrix<T>) -> Matrix<T> {
    match ion {
        Ion::Two => kron(op, &Matrix::identity(2)),
        Ion::One => kron(&Matrix::identity(2), op),
    }
}

/// Interaction-picture Hamiltonian `δ1/2 Z1 + δ2/2 Z2 + η/2 Z1 Z2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoIonHamiltonian<T> {
    pub delta1: T,
    pub delta2: T,
    /// ZZ coupling; dipole-dipole shifts are signed, so any sign is allowed.
    pub eta: T,
}

impl<T: Real> TwoIonHamiltonian<T> {
    pub fn new(delta1: T, delta2: T, eta: T) -> Result<Self> {
        for (name, v) in [("delta1", delta1), ("delta2", delta2), ("eta", eta)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("{v} is not finite") });
            }
        }
        Ok(Self { delta1, delta2, eta })
    }

    /// Pure coupling, no detunings.
    pub fn coupling(eta: T) -> Self {
        Self { delta1: T::zero(), delta2: T::zero(), eta }
    }

    pub fn with_eta(self, eta: T) -> Self {
        Self { eta, ..self }
    }
}

/// The 4×4 matrix of `h`; diagonal in the computational basis.
pub fn hamiltonian_matrix<T: Real>(h: &TwoIonHamiltonian<T>) -> Matrix<T> {
    let half = T::lit(0.5);
    // sign of Z on each basis state: (control, target)
    let diag: Vec<T> = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .iter()
        .map(|&(z2, z1)| {
            let (z1, z2) = (T::lit(z1), T::lit(z2));
            half * (h.delta1 * z1 + h.delta2 * z2 + h.eta * z1 * z2)
        })
        .collect();
    Matrix::from_real_diagonal(&diag)
}

/// Instantaneous single-ion rotation about X or Y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec<T> {
    ion: Ion,
    axis: Pauli,
    angle: T,
}

impl<T: Real> PulseSpec<T> {
    pub fn new(ion: Ion, axis: Pauli, angle: T) -> Result<Self> {
        if axis == Pauli::Z {
            return Err(Error::InvalidParameter {
                name: "axis",
                reason: "optical pulses rotate about X or Y".into(),
            });
        }
        let two_pi = T::TAU();
        if !(angle > -two_pi && angle <= two_pi) {
            return Err(Error::InvalidAngle(angle.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { ion, axis, angle })
    }

    pub fn ion(&self) -> Ion {
        self.ion
    }

    pub fn axis(&self) -> Pauli {
        self.axis
    }

    pub fn angle(&self) -> T {
        self.angle
    }

    /// 4×4 unitary of the pulse.
    pub fn unitary(&self) -> Matrix<T> {
        embed(self.ion, &rotation(self.axis, self.angle))
    }

    fn swapped(self) -> Self {
        Self { ion: self.ion.other(), ..self }
    }
}

/// Free-evolution interval and the odd-multiple index it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSchedule<T> {
    dt: T,
    n: u32,
}

impl<T: Real> GateSchedule<T> {
    /// Explicit interval; `n` is informational.
    pub fn new(dt: T, n: u32) -> Result<Self> {
        if !(dt > T::zero() && dt.is_finite()) {
            return Err(Error::InvalidParameter { name: "dt", reason: format!("{dt} must be positive") });
        }
        Ok(Self { dt, n })
    }

    /// `Δt = (4n+1)π/(4|η|)`, the interval that makes the sequence CNOT-class.
    pub fn for_eta(eta: T, n: u32) -> Result<Self> {
        let k = T::from_u32(4 * n + 1).expect("small integer");
        Self::new(k * T::PI() / (T::lit(4.0) * eta.abs()), n)
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

/// One element of a pulse sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step<T> {
    Pulse(PulseSpec<T>),
    /// Free evolution under the pair Hamiltonian for the given time.
    Free(T),
}

/// Time-ordered list of pulses and free-evolution intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence<T> {
    steps: Vec<Step<T>>,
}

impl<T: Real> PulseSequence<T> {
    pub fn new(steps: Vec<Step<T>>) -> Self {
        Self { steps }
    }

    /// The seven-step refocused CNOT:
    /// `Y_{π/2}(1), Δt, Y_π(1), Y_π(2), Δt, X_{π/2}(1), Y_π(2)`.
    pub fn refocused_cnot(dt: T) -> Self {
        let pi = T::PI();
        let half_pi = T::FRAC_PI_2();
        let pulse = |ion, axis, angle| Step::Pulse(PulseSpec::new(ion, axis, angle).expect("valid pulse"));
        Self::new(vec![
            pulse(Ion::One, Pauli::Y, half_pi),
            Step::Free(dt),
            pulse(Ion::One, Pauli::Y, pi),
            pulse(Ion::Two, Pauli::Y, pi),
            Step::Free(dt),
            pulse(Ion::One, Pauli::X, half_pi),
            pulse(Ion::Two, Pauli::Y, pi),
        ])
    }

    /// Same sequence with control and target exchanged.
    pub fn with_roles_swapped(&self) -> Self {
        let steps = self
            .steps
            .iter()
            .map(|s| match *s {
                Step::Pulse(p) => Step::Pulse(p.swapped()),
                Step::Free(t) => Step::Free(t),
            })
            .collect();
        Self { steps }
    }

    pub fn steps(&self) -> &[Step<T>] {
        &self.steps
    }

    /// Total unitary, first step applied first.
    pub fn unitary(&self, h: &TwoIonHamiltonian<T>) -> Matrix<T> {
        let hm = hamiltonian_matrix(h);
        self.steps.iter().fold(Matrix::identity(4), |acc, step| {
            let u = match *step {
                Step::Pulse(p) => p.unitary(),
                Step::Free(t) => expm_hermitian(&hm, t).expect("pair Hamiltonian is Hermitian"),
            };
            &u * &acc
        })
    }
}

/// `U = U7 U6 U5 U4 U3 U2 U1` for the refocused CNOT sequence.
pub fn compose_cnot_sequence<T: Real>(h: &TwoIonHamiltonian<T>, sched: &GateSchedule<T>) -> Matrix<T> {
    PulseSequence::refocused_cnot(sched.dt).unitary(h)
}

/// General-θ gate, `θ = 2ηΔt`, built by composition at `η = 1`, `δ = 0`.
pub fn gate_theta_matrix<T: Real>(theta: T) -> Matrix<T> {
    let steps = PulseSequence::refocused_cnot(theta / T::lit(2.0));
    steps.unitary(&TwoIonHamiltonian::coupling(T::one()))
}

/// Standard CNOT with the left factor as control.
pub fn cnot<T: Real>() -> Matrix<T> {
    Matrix::from_rows(&[
        &[(1., 0.), (0., 0.), (0., 0.), (0., 0.)],
        &[(0., 0.), (1., 0.), (0., 0.), (0., 0.)],
        &[(0., 0.), (0., 0.), (0., 0.), (1., 0.)],
        &[(0., 0.), (0., 0.), (1., 0.), (0., 0.)],
    ])
}

/// The `Δt = (4n+1)π/4` limit of the sequence, without its global phase.
pub fn refocused_cnot_limit<T: Real>() -> Matrix<T> {
    Matrix::from_rows(&[
        &[(-1., 0.), (0., 0.), (0., 0.), (0., 0.)],
        &[(0., 0.), (0., 1.), (0., 0.), (0., 0.)],
        &[(0., 0.), (0., 0.), (0., 0.), (0., 1.)],
        &[(0., 0.), (0., 0.), (1., 0.), (0., 0.)],
    ])
}

/// Result of fitting `target ≈ e^{iφ} (Rz(α)⊗Rz(β)) · u · (Rz(γ)⊗Rz(ζ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalZFit<T> {
    /// `|tr(target† · D_pre · u · D_post)|² / 16` at the optimum.
    pub fidelity: T,
    /// `[α, β, γ, ζ]`: pre (left) control/target angles, then post (right).
    pub angles: [T; 4],
    /// Argument of the optimal trace.
    pub phase: T,
}

const GRID_POINTS: usize = 16;
const MAX_SWEEPS: usize = 20_000;

// Rz(a)⊗Rz(b) = diag(exp(-i(s·a + t·b)/2)) with these (s, t) per basis state.
const Z_SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

struct LocalZObjective<T> {
    // conj(target_jk) · u_jk
    w: [[Complex<T>; 4]; 4],
}

impl<T: Real> LocalZObjective<T> {
    fn new(u: &Matrix<T>, target: &Matrix<T>) -> Self {
        let mut w = [[Complex::zero(); 4]; 4];
        for (j, row) in w.iter_mut().enumerate() {
            for (k, x) in row.iter_mut().enumerate() {
                *x = target[(j, k)].conj() * u[(j, k)];
            }
        }
        Self { w }
    }

    fn phases(a: T, b: T) -> [Complex<T>; 4] {
        let half = T::lit(0.5);
        Z_SIGNS.map(|(s, t)| cis(-(T::lit(s) * a + T::lit(t) * b) * half))
    }

    /// Sign of angle `coord` on term `(j, k)`.
    fn sign(coord: usize, j: usize, k: usize) -> T {
        let s = match coord {
            0 => Z_SIGNS[j].0,
            1 => Z_SIGNS[j].1,
            2 => Z_SIGNS[k].0,
            _ => Z_SIGNS[k].1,
        };
        T::lit(s)
    }

    fn trace(&self, x: &[T; 4]) -> Complex<T> {
        let pre = Self::phases(x[0], x[1]);
        let post = Self::phases(x[2], x[3]);
        let mut tr = Complex::zero();
        for j in 0..4 {
            for k in 0..4 {
                tr = tr + pre[j] * self.w[j][k] * post[k];
            }
        }
        tr
    }

    fn gradient(&self, x: &[T; 4]) -> [T; 4] {
        let pre = Self::phases(x[0], x[1]);
        let post = Self::phases(x[2], x[3]);
        let tr = self.trace(x);
        let mut d = [Complex::zero(); 4];
        for j in 0..4 {
            for k in 0..4 {
                let term = pre[j] * self.w[j][k] * post[k];
                for (c, dc) in d.iter_mut().enumerate() {
                    *dc = *dc + term * Complex::new(T::zero(), -Self::sign(c, j, k) * T::lit(0.5));
                }
            }
        }
        d.map(|dc| T::lit(2.0) * (tr.conj() * dc).re / T::lit(16.0))
    }

    /// Exact maximiser of `|tr|²` along one angle, others fixed.
    fn best_coordinate(&self, x: &[T; 4], coord: usize) -> T {
        let mut y = *x;
        y[coord] = T::zero();
        let pre = Self::phases(y[0], y[1]);
        let post = Self::phases(y[2], y[3]);
        let (mut plus, mut minus) = (Complex::<T>::zero(), Complex::<T>::zero());
        for j in 0..4 {
            for k in 0..4 {
                let term = pre[j] * self.w[j][k] * post[k];
                if Self::sign(coord, j, k) > T::zero() {
                    plus = plus + term;
                } else {
                    minus = minus + term;
                }
            }
        }
        // |A e^{-ix/2} + B e^{ix/2}|² peaks at x = arg(A·conj(B)).
        let z = plus * minus.conj();
        if z.is_zero() {
            x[coord]
        } else {
            z.arg()
        }
    }
}

fn check_two_qubit_unitary<T: Real>(u: &Matrix<T>) -> Result<()> {
    if u.rows() != 4 || u.cols() != 4 {
        return Err(Error::DimensionMismatch { expected: "4x4".into(), got: format!("{}x{}", u.rows(), u.cols()) });
    }
    let dev = u.unitarity_deviation();
    if !(dev <= T::UNITARY_TOL) {
        return Err(Error::NotUnitary { deviation: dev.to_f64().unwrap_or(f64::INFINITY) });
    }
    Ok(())
}

/// Best fidelity of `u` to `target` allowing Z rotations on both ions
/// before and after, and a global phase.
///
/// Coarse grid (16 points per angle) followed by cyclic coordinate ascent
/// with the exact one-dimensional maximiser, until the gradient norm drops
/// below [`Real::GRAD_TOL`].
pub fn local_z_equivalence<T: Real>(u: &Matrix<T>, target: &Matrix<T>) -> Result<LocalZFit<T>> {
    check_two_qubit_unitary(u)?;
    check_two_qubit_unitary(target)?;
    let obj = LocalZObjective::new(u, target);

    let step = T::TAU() / T::from_usize(GRID_POINTS).expect("small");
    let grid: Vec<T> = (0..GRID_POINTS).map(|i| T::from_usize(i).expect("small") * step).collect();
    let mut best = ([T::zero(); 4], T::neg_infinity());
    for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                for &d in &grid {
                    let x = [a, b, c, d];
                    let f = obj.trace(&x).norm_sqr();
                    if f > best.1 {
                        best = (x, f);
                    }
                }
            }
        }
    }

    let mut x = best.0;
    let norm = |g: [T; 4]| g.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
    let mut grad = norm(obj.gradient(&x));
    let mut sweeps = 0;
    while grad >= T::GRAD_TOL {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { iterations: sweeps, residual: grad.to_f64().unwrap_or(f64::NAN) });
        }
        for coord in 0..4 {
            x[coord] = obj.best_coordinate(&x, coord);
        }
        grad = norm(obj.gradient(&x));
        sweeps += 1;
    }

    let tr = obj.trace(&x);
    Ok(LocalZFit { fidelity: tr.norm_sqr() / T::lit(16.0), angles: x, phase: tr.arg() })
}

/// [`local_z_equivalence`] against the standard CNOT.
pub fn local_z_cnot_equivalence<T: Real>(u: &Matrix<T>) -> Result<LocalZFit<T>> {
    local_z_equivalence(u, &cnot())
}

/// Largest operator-Schmidt weight `σ_max² / Σσ²` of a two-qubit operator.
///
/// Equals 1 exactly when `u` is a tensor product of single-ion operators,
/// and 1/2 for CNOT.
pub fn local_fidelity<T: Real>(u: &Matrix<T>) -> Result<T> {
    if u.rows() != 4 || u.cols() != 4 {
        return Err(Error::DimensionMismatch { expected: "4x4".into(), got: format!("{}x{}", u.rows(), u.cols()) });
    }
    // Realignment R[(i1 j1), (i2 j2)] = U[(i1 i2), (j1 j2)].
    let r = Matrix::from_fn(4, 4, |a, b| {
        let (i1, j1) = (a / 2, a % 2);
        let (i2, j2) = (b / 2, b % 2);
        u[(2 * i1 + i2, 2 * j1 + j2)]
    });
    let gram = &r * &r.dagger();
    let weights = eigh(&gram)?.values;
    let total = weights.iter().fold(T::zero(), |acc, &w| acc + w);
    Ok(weights[3] / total)
}
