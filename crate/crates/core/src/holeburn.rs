// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! Interaction-strength holeburning.
//!
//! Both ions start in `|0⟩`. Each cycle applies the refocused CNOT sequence,
//! lets every excited ion relax, and routes a fraction `1 - branching` of the
//! decays into an auxiliary hyperfine level, where the pair is lost for good.
//! Pairs whose coupling makes the gate return `|00⟩` to itself survive; the
//! rest are gradually pumped away.
//!
//! During free evolution each ion's `|1⟩` decays at rate `γ`: back to `|0⟩`
//! at rate `γ·b` (a Lindblad jump) and into the auxiliary level at rate
//! `γ·(1 - b)`. Pulses are instantaneous and lossless.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gate::{embed, hamiltonian_matrix, Ion, PulseSequence, Step, TwoIonHamiltonian};
use crate::qmath::{expm, kron, Matrix};

type M = Matrix<f64>;

/// Number of excited ions in each pair basis state `|00⟩, |01⟩, |10⟩, |11⟩`.
const EXCITATIONS: [i32; 4] = [0, 1, 1, 2];

#[derive(Debug, Clone, PartialEq)]
pub struct HoleburnConfig {
    /// Spontaneous emission rate, in units where `η = 1`.
    pub gamma: f64,
    /// Free evolution per half-gate.
    pub dt: f64,
    /// Gate applications for [`survival_fraction`].
    pub cycles: usize,
    /// Probability that a decay returns the ion to `|0⟩` rather than the auxiliary level.
    pub branching: f64,
    pub eta_grid: Vec<f64>,
    /// Cycle counts reported by [`holeburn_sweep`]; empty means `[cycles]`.
    pub checkpoints: Vec<usize>,
    /// Complete relaxation between gates; otherwise the state carries over.
    pub relax_fully: bool,
    /// Alternate control and target every cycle.
    pub swap_roles: bool,
}

impl Default for HoleburnConfig {
    fn default() -> Self {
        Self {
            gamma: 0.1,
            dt: std::f64::consts::FRAC_PI_4,
            cycles: 50,
            branching: 0.5,
            eta_grid: uniform_grid(0.0, 8.0, 0.02),
            checkpoints: vec![1, 5, 20, 50],
            relax_fully: true,
            swap_roles: false,
        }
    }
}

impl HoleburnConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| Err(Error::InvalidParameter { name, reason: reason.into() });
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad("gamma", "must be finite and >= 0");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", "must be finite and > 0");
        }
        if !(0.0..=1.0).contains(&self.branching) {
            return bad("branching", "must lie in [0, 1]");
        }
        if self.cycles < 1 {
            return bad("cycles", "must be >= 1");
        }
        if self.eta_grid.is_empty() {
            return bad("eta_grid", "must not be empty");
        }
        if self.eta_grid.iter().any(|e| !e.is_finite()) {
            return bad("eta_grid", "entries must be finite");
        }
        if self.checkpoints.contains(&0) {
            return bad("checkpoints", "cycle counts must be >= 1");
        }
        Ok(())
    }

    fn checkpoint_list(&self) -> Vec<usize> {
        let mut cps = if self.checkpoints.is_empty() { vec![self.cycles] } else { self.checkpoints.clone() };
        cps.sort_unstable();
        cps.dedup();
        cps
    }
}

/// `start, start + step, ...` up to and including `stop` (within rounding).
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0, "grid step must be positive");
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

/// Pair density matrix plus the population absorbed into the auxiliary level.
#[derive(Debug, Clone, PartialEq)]
pub struct IonState {
    pub rho: M,
    pub auxiliary: f64,
}

impl IonState {
    /// Both ions in `|0⟩`.
    pub fn ground() -> Self {
        let mut rho = M::zeros(4, 4);
        rho[(0, 0)] = Complex::new(1.0, 0.0);
        Self { rho, auxiliary: 0.0 }
    }

    /// Population not yet absorbed.
    pub fn survival(&self) -> f64 {
        self.rho.trace().re
    }

    /// `tr ρ + auxiliary`; stays at 1.
    pub fn total_population(&self) -> f64 {
        self.survival() + self.auxiliary
    }

    fn apply_unitary(&mut self, u: &M) {
        self.rho = &(u * &self.rho) * &u.dagger();
    }

    fn apply_propagator(&mut self, prop: &M) {
        let mut v = self.rho.as_slice().to_vec();
        v.push(Complex::new(self.auxiliary, 0.0));
        let out: Vec<Complex<f64>> = (0..17)
            .map(|r| (0..17).fold(Complex::zero(), |acc, c| acc + prop[(r, c)] * v[c]))
            .collect();
        self.rho = M::new(4, 4, out[..16].to_vec()).expect("16 entries");
        self.auxiliary = out[16].re;
    }

    /// Complete relaxation: each excited ion returns to `|0⟩` with
    /// probability `branching`, otherwise the pair is absorbed.
    fn relax(&mut self, branching: f64) {
        let kept: f64 = EXCITATIONS
            .iter()
            .enumerate()
            .map(|(k, &m)| self.rho[(k, k)].re * branching.powi(m))
            .sum();
        self.auxiliary += self.survival() - kept;
        self.rho = M::zeros(4, 4);
        self.rho[(0, 0)] = Complex::new(kept, 0.0);
    }
}

fn lowering() -> M {
    M::from_rows(&[&[(0., 0.), (1., 0.)], &[(0., 0.), (0., 0.)]])
}

fn excited_projector() -> M {
    M::from_real_diagonal(&[0.0, 1.0])
}

/// Generator of the master equation acting on `(vec_row_major(ρ), aux)`.
pub(crate) fn generator(eta: f64, gamma: f64, branching: f64) -> M {
    let h = hamiltonian_matrix(&TwoIonHamiltonian::coupling(eta));
    let n_exc = embed(Ion::One, &excited_projector()) + embed(Ion::Two, &excited_projector());
    let id = M::identity(4);
    let i = Complex::new(0.0, 1.0);
    let re = |x: f64| Complex::new(x, 0.0);

    // vec(AρB) = (A ⊗ Bᵀ) vec(ρ) for row-major vec; all operators here are real.
    let mut core = kron(&h, &id).scale(-i) + kron(&id, &h).scale(i);
    core = core - (kron(&n_exc, &id) + kron(&id, &n_exc)).scale(re(gamma / 2.0));
    for ion in [Ion::One, Ion::Two] {
        let l = embed(ion, &lowering());
        core = core + kron(&l, &l).scale(re(gamma * branching));
    }

    let mut g = M::zeros(17, 17);
    for r in 0..16 {
        for c in 0..16 {
            g[(r, c)] = core[(r, c)];
        }
    }
    for k in 0..4 {
        g[(16, 5 * k)] = re(gamma * (1.0 - branching) * f64::from(EXCITATIONS[k]));
    }
    g
}

/// Survival and absorbed population after a given number of gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRecord {
    pub cycle: usize,
    pub survival: f64,
    pub auxiliary: f64,
}

/// Runs the selection loop at one coupling and reports the requested cycle counts.
pub fn simulate(cfg: &HoleburnConfig, eta: f64, checkpoints: &[usize]) -> Vec<CycleRecord> {
    let forward = PulseSequence::refocused_cnot(cfg.dt);
    let swapped = forward.with_roles_swapped();
    let propagator = expm(&generator(eta, cfg.gamma, cfg.branching).scale(Complex::new(cfg.dt, 0.0)));
    let pulses = |seq: &PulseSequence<f64>| -> Vec<Option<M>> {
        seq.steps()
            .iter()
            .map(|s| match s {
                Step::Pulse(p) => Some(p.unitary()),
                Step::Free(_) => None,
            })
            .collect()
    };
    let forward_ops = pulses(&forward);
    let swapped_ops = pulses(&swapped);

    let last = checkpoints.iter().copied().max().unwrap_or(0);
    let mut state = IonState::ground();
    let mut out = Vec::with_capacity(checkpoints.len());
    for cycle in 1..=last {
        let ops = if cfg.swap_roles && cycle % 2 == 0 { &swapped_ops } else { &forward_ops };
        for op in ops {
            match op {
                Some(u) => state.apply_unitary(u),
                None => state.apply_propagator(&propagator),
            }
        }
        if cfg.relax_fully {
            state.relax(cfg.branching);
        }
        if checkpoints.contains(&cycle) {
            out.push(CycleRecord { cycle, survival: state.survival(), auxiliary: state.auxiliary });
        }
    }
    out
}

/// Population left outside the auxiliary level after `cfg.cycles` gates.
pub fn survival_fraction(cfg: &HoleburnConfig, eta: f64) -> f64 {
    simulate(cfg, eta, &[cfg.cycles])[0].survival
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub cycle: usize,
    pub survival: f64,
    pub auxiliary: f64,
}

/// Survival over the whole `eta_grid` at every checkpoint, sorted by
/// `(eta, cycle)`.
pub fn holeburn_sweep(cfg: &HoleburnConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let checkpoints = cfg.checkpoint_list();
    let mut etas = cfg.eta_grid.clone();
    etas.sort_by(f64::total_cmp);
    let rows = etas
        .par_iter()
        .flat_map_iter(|&eta| {
            simulate(cfg, eta, &checkpoints).into_iter().map(move |r| SweepRow {
                eta,
                cycle: r.cycle,
                survival: r.survival,
                auxiliary: r.auxiliary,
            })
        })
        .collect();
    Ok(rows)
}

/// `(eta, survival)` at one checkpoint, sorted by eta.
pub fn profile(rows: &[SweepRow], cycle: usize) -> Vec<(f64, f64)> {
    let mut p: Vec<_> = rows.iter().filter(|r| r.cycle == cycle).map(|r| (r.eta, r.survival)).collect();
    p.sort_by(|a, b| a.0.total_cmp(&b.0));
    p
}

/// Interior local maxima of a profile.
pub fn local_maxima(profile: &[(f64, f64)]) -> Vec<f64> {
    profile
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1)
        .map(|w| w[1].0)
        .collect()
}

/// Full width at half maximum of the survival peak nearest `peak_eta`,
/// by linear interpolation between grid points.
pub fn selection_width(rows: &[SweepRow], peak_eta: f64, cycle: usize) -> Result<f64> {
    let prof = profile(rows, cycle);
    let unresolved = |reason: &str| Error::PeakNotResolved { peak: peak_eta, reason: reason.into() };
    if prof.len() < 3 {
        return Err(unresolved("fewer than three grid points at this cycle"));
    }
    let (lo, hi) = prof
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, s)| (lo.min(s), hi.max(s)));
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Err(unresolved("flat profile"));
    }

    let mut i = prof
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 .0 - peak_eta).abs().total_cmp(&(b.1 .0 - peak_eta).abs()))
        .map(|(i, _)| i)
        .expect("non-empty");
    // climb to the local maximum
    loop {
        if i > 0 && prof[i - 1].1 > prof[i].1 {
            i -= 1;
        } else if i + 1 < prof.len() && prof[i + 1].1 > prof[i].1 {
            i += 1;
        } else {
            break;
        }
    }
    let peak = prof[i].1;
    let half = peak / 2.0;
    // A profile that only touches half maximum counts as crossing it.
    let at_or_below = |s: f64| s <= half + 1e-12 * peak.abs();
    let crossing = |a: (f64, f64), b: (f64, f64)| {
        if (b.1 - a.1).abs() < f64::EPSILON {
            b.0
        } else {
            a.0 + (half - a.1) * (b.0 - a.0) / (b.1 - a.1)
        }
    };

    let left = (0..i)
        .rev()
        .find(|&j| at_or_below(prof[j].1))
        .map(|j| crossing(prof[j + 1], prof[j]))
        .ok_or_else(|| unresolved("survival at the lower grid edge exceeds half maximum"))?;
    let right = (i + 1..prof.len())
        .find(|&j| at_or_below(prof[j].1))
        .map(|j| crossing(prof[j - 1], prof[j]))
        .ok_or_else(|| unresolved("survival at the upper grid edge exceeds half maximum"))?;
    Ok(right - left)
}
