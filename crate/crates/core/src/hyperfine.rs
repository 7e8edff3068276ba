// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! Pseudo-quadrupole hyperfine structure and cyclic-transition readout.
//!
//! Spin states are ordered `m = I, I-1, …, -I` and `m` is carried as the
//! integer `2m` throughout.

use std::fmt;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::qmath::{eigh, expm, Matrix};
use crate::scalar::Real;

/// Nuclear spin `I`, stored as `2I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    /// Largest `2I` with `2I + 1 <= 100`.
    pub const MAX_TWICE: u32 = 99;

    pub fn from_twice(twice: i64) -> Result<Self> {
        if (1..=Self::MAX_TWICE as i64).contains(&twice) {
            Ok(Self { twice: twice as u32 })
        } else {
            Err(Error::InvalidSpin(twice))
        }
    }

    pub fn new(i: f64) -> Result<Self> {
        let twice = 2.0 * i;
        if twice.fract() != 0.0 || !twice.is_finite() {
            return Err(Error::InvalidSpin(twice.round() as i64));
        }
        Self::from_twice(twice as i64)
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    pub fn is_half_integer(self) -> bool {
        self.twice % 2 == 1
    }

    /// `2m` of basis state `k`.
    pub fn twice_m(self, k: usize) -> i64 {
        self.twice as i64 - 2 * k as i64
    }

    /// Basis index of `2m`, if it is a valid projection.
    pub fn index_of(self, twice_m: i64) -> Option<usize> {
        let t = self.twice as i64;
        ((-t..=t).contains(&twice_m) && (t - twice_m) % 2 == 0).then(|| ((t - twice_m) / 2) as usize)
    }
}

impl Default for Spin {
    fn default() -> Self {
        Self { twice: 5 }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_half(self.twice as i64))
    }
}

/// `2m` rendered as `5/2`, `-1`, …
pub fn format_half(twice: i64) -> String {
    if twice % 2 == 0 {
        format!("{}", twice / 2)
    } else {
        format!("{twice}/2")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperators<T> {
    pub ix: Matrix<T>,
    pub iy: Matrix<T>,
    pub iz: Matrix<T>,
}

/// Angular-momentum matrices for spin `I`.
pub fn spin_operators<T: Real>(spin: Spin) -> SpinOperators<T> {
    let n = spin.dim();
    let i = T::lit(spin.value());
    let half = T::lit(0.5);
    let m = |k: usize| T::lit(spin.twice_m(k) as f64 / 2.0);
    // ⟨m+1|I+|m⟩ sits at (k-1, k)
    let raise = Matrix::from_fn(n, n, |r, c| {
        if c == r + 1 {
            Complex::new((i * (i + T::one()) - m(c) * (m(c) + T::one())).sqrt(), T::zero())
        } else {
            Complex::zero()
        }
    });
    let lower = raise.dagger();
    let ix = (raise.clone() + lower.clone()).scale(Complex::new(half, T::zero()));
    let iy = (raise - lower).scale(Complex::new(T::zero(), -half));
    let iz = Matrix::from_real_diagonal(&(0..n).map(m).collect::<Vec<_>>());
    SpinOperators { ix, iy, iz }
}

/// Pseudo-quadrupole plus Zeeman parameters, all in frequency units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrupoleParams<T> {
    pub d: T,
    pub e: T,
    /// Coefficient of `Iz`.
    pub bz: T,
    /// Coefficient of `Ix`; zero except for diagnostics.
    pub bx: T,
    pub spin: Spin,
}

impl<T: Real> QuadrupoleParams<T> {
    pub fn new(d: T, e: T, bz: T, spin: Spin) -> Result<Self> {
        for (name, v) in [("d", d), ("e", e), ("bz", bz)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("must be finite, got {v}") });
            }
        }
        Ok(Self { d, e, bz, bx: T::zero(), spin })
    }

    pub fn with_transverse(mut self, bx: T) -> Self {
        self.bx = bx;
        self
    }

    pub fn with_bz(mut self, bz: T) -> Self {
        self.bz = bz;
        self
    }
}

impl<T: Real> Default for QuadrupoleParams<T> {
    fn default() -> Self {
        Self { d: T::one(), e: T::zero(), bz: T::zero(), bx: T::zero(), spin: Spin::default() }
    }
}

/// `D(Iz² − I(I+1)/3) + E(Ix² − Iy²) + bz·Iz + bx·Ix`.
pub fn pseudoquad_hamiltonian<T: Real>(p: &QuadrupoleParams<T>) -> Matrix<T> {
    let SpinOperators { ix, iy, iz } = spin_operators::<T>(p.spin);
    let n = p.spin.dim();
    let i = T::lit(p.spin.value());
    let c = |x: T| Complex::new(x, T::zero());
    let id = Matrix::identity(n);
    let axial = &iz * &iz - id.scale(c(i * (i + T::one()) / T::lit(3.0)));
    let rhombic = &ix * &ix - &iy * &iy;
    axial.scale(c(p.d)) + rhombic.scale(c(p.e)) + iz.scale(c(p.bz)) + ix.scale(c(p.bx))
}

/// One of the two closed groups of `Iz` states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    /// Contains `m = +1/2` (or `m = 0` for integer spin).
    A,
    B,
}

impl Group {
    pub fn other(self) -> Self {
        match self {
            Group::A => Group::B,
            Group::B => Group::A,
        }
    }

    fn index(self) -> usize {
        match self {
            Group::A => 0,
            Group::B => 1,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::A => "A",
            Group::B => "B",
        })
    }
}

/// Default group of `2m`: `2m ≡ 1 (mod 4)` for half-integer spin, even `m`
/// for integer spin. `Ix² − Iy²` only changes `m` by 2, so this is closed.
pub fn default_group(twice_m: i64) -> Group {
    let r = twice_m.rem_euclid(4);
    if r == 1 || r == 0 {
        Group::A
    } else {
        Group::B
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateGroup {
    /// `2m` values, descending.
    pub members: Vec<i64>,
}

impl StateGroup {
    pub fn contains(&self, twice_m: i64) -> bool {
        self.members.contains(&twice_m)
    }
}

impl fmt::Display for StateGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|&m| format_half(m)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Split of the basis into groups A and B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    spin: Spin,
    groups: [StateGroup; 2],
}

impl Partition {
    pub fn standard(spin: Spin) -> Self {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for k in 0..spin.dim() {
            let m = spin.twice_m(k);
            match default_group(m) {
                Group::A => a.push(m),
                Group::B => b.push(m),
            }
        }
        Self { spin, groups: [StateGroup { members: a }, StateGroup { members: b }] }
    }

    /// A user-supplied split; every basis state must appear exactly once.
    pub fn new(spin: Spin, a: Vec<i64>, b: Vec<i64>) -> Result<Self> {
        let mut seen = vec![false; spin.dim()];
        for &m in a.iter().chain(&b) {
            let k = spin
                .index_of(m)
                .ok_or_else(|| Error::InvalidPartition(format!("m = {} is not a state of I = {spin}", format_half(m))))?;
            if seen[k] {
                return Err(Error::InvalidPartition(format!("m = {} listed twice", format_half(m))));
            }
            seen[k] = true;
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("m = {} missing", format_half(spin.twice_m(k)))));
        }
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidPartition("both groups must be nonempty".into()));
        }
        let sorted = |mut v: Vec<i64>| {
            v.sort_unstable_by(|x, y| y.cmp(x));
            StateGroup { members: v }
        };
        Ok(Self { spin, groups: [sorted(a), sorted(b)] })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn group(&self, g: Group) -> &StateGroup {
        &self.groups[g.index()]
    }

    /// Group of basis state `k`.
    pub fn group_of_index(&self, k: usize) -> Group {
        if self.groups[0].contains(self.spin.twice_m(k)) {
            Group::A
        } else {
            Group::B
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureReport<T> {
    /// Largest `|⟨b|H|a⟩|` with `a`, `b` in different groups.
    pub max_cross_element: T,
    /// Smallest dominant-group weight over all eigenvectors.
    pub group_eigvec_purity: T,
}

/// Closure check against the standard partition.
pub fn group_closure_check<T: Real>(p: &QuadrupoleParams<T>) -> Result<ClosureReport<T>> {
    group_closure_check_with(p, &Partition::standard(p.spin))
}

pub fn group_closure_check_with<T: Real>(p: &QuadrupoleParams<T>, partition: &Partition) -> Result<ClosureReport<T>> {
    if partition.spin != p.spin {
        return Err(Error::InvalidPartition(format!("partition is for I = {}, parameters for I = {}", partition.spin, p.spin)));
    }
    let h = pseudoquad_hamiltonian(p);
    let n = p.spin.dim();
    let mut cross = T::zero();
    for r in 0..n {
        for c in 0..n {
            if partition.group_of_index(r) != partition.group_of_index(c) {
                cross = cross.max(h[(r, c)].norm());
            }
        }
    }
    let purity = levels_with(p, partition)?.iter().map(|l| l.purity).fold(T::one(), T::min);
    Ok(ClosureReport { max_cross_element: cross, group_eigvec_purity: purity })
}

/// An eigenstate of the Hamiltonian with its group label.
#[derive(Debug, Clone, PartialEq)]
pub struct Level<T> {
    pub energy: T,
    /// Dominant group.
    pub group: Group,
    /// Weight in the dominant group.
    pub purity: T,
    /// Amplitudes in the `m = I … -I` basis.
    pub vector: Vec<Complex<T>>,
}

/// Eigenstates in ascending energy, labelled by the standard partition.
pub fn levels<T: Real>(p: &QuadrupoleParams<T>) -> Result<Vec<Level<T>>> {
    levels_with(p, &Partition::standard(p.spin))
}

fn levels_with<T: Real>(p: &QuadrupoleParams<T>, partition: &Partition) -> Result<Vec<Level<T>>> {
    let h = pseudoquad_hamiltonian(p);
    let eig = eigh(&h)?;
    let n = p.spin.dim();
    Ok((0..n)
        .map(|j| {
            let vector: Vec<Complex<T>> = (0..n).map(|k| eig.vectors[(k, j)]).collect();
            let wa = (0..n)
                .filter(|&k| partition.group_of_index(k) == Group::A)
                .fold(T::zero(), |acc, k| acc + vector[k].norm_sqr());
            let total = vector.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr());
            let wa = wa / total;
            let (group, purity) = if wa >= T::lit(0.5) { (Group::A, wa) } else { (Group::B, T::one() - wa) };
            Level { energy: eig.values[j], group, purity, vector }
        })
        .collect())
}

/// Relative gap below which two eigenvalues count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct KramersReport<T> {
    /// Index ranges (into ascending levels) of degenerate clusters.
    pub clusters: Vec<Vec<usize>>,
    /// Every cluster has exactly two members.
    pub all_doublets: bool,
    /// Every doublet has one member from each group.
    pub one_per_group: bool,
    /// Largest splitting inside a cluster.
    pub max_intra_gap: T,
    /// Smallest gap between neighbouring clusters.
    pub min_inter_gap: T,
}

/// Groups degenerate eigenvalues (gap `< 1e-10·‖H‖`) and checks pairing.
pub fn kramers_check<T: Real>(p: &QuadrupoleParams<T>) -> Result<KramersReport<T>> {
    let lv = levels(p)?;
    let scale = lv.iter().fold(T::zero(), |acc, l| acc.max(l.energy.abs()));
    let tol = T::lit(DEGENERACY_TOL) * scale;
    let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
    let mut max_intra = T::zero();
    let mut min_inter = T::infinity();
    for j in 1..lv.len() {
        let gap = lv[j].energy - lv[j - 1].energy;
        if gap <= tol {
            clusters.last_mut().expect("nonempty").push(j);
            max_intra = max_intra.max(gap);
        } else {
            clusters.push(vec![j]);
            min_inter = min_inter.min(gap);
        }
    }
    let all_doublets = clusters.iter().all(|c| c.len() == 2);
    let one_per_group = all_doublets && clusters.iter().all(|c| lv[c[0]].group != lv[c[1]].group);
    Ok(KramersReport { clusters, all_doublets, one_per_group, max_intra_gap: max_intra, min_inter_gap: min_inter })
}

/// Splittings `E[2k+1] − E[2k]` of consecutive ascending levels, which are
/// the Zeeman-split doublets while `bz` is small against the zero-field gaps.
pub fn doublet_splittings<T: Real>(p: &QuadrupoleParams<T>) -> Result<Vec<T>> {
    let lv = levels(p)?;
    Ok(lv.chunks_exact(2).map(|c| c[1].energy - c[0].energy).collect())
}

/// Optically driven ground level, named by group and `2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriveLevel {
    pub group: Group,
    pub twice_m: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicConfig {
    pub ground: QuadrupoleParams<f64>,
    pub excited: QuadrupoleParams<f64>,
    pub drive: DriveLevel,
    pub rf_repump: bool,
    pub duration: f64,
    /// Optical pumping rate between the driven pair.
    pub rate: f64,
    /// Total spontaneous emission rate of each excited level.
    pub emission_rate: f64,
    /// Pairwise RF rate between ground levels of the driven group.
    pub repump_rate: f64,
    /// Number of equal intervals in the returned trace.
    pub trace_points: usize,
}

impl Default for CyclicConfig {
    fn default() -> Self {
        Self {
            ground: QuadrupoleParams::default(),
            excited: QuadrupoleParams { d: 0.6, e: 0.1, ..QuadrupoleParams::default() },
            drive: DriveLevel { group: Group::A, twice_m: 1 },
            rf_repump: true,
            duration: 100.0,
            rate: 1.0,
            emission_rate: 1.0,
            repump_rate: 10.0,
            trace_points: 100,
        }
    }
}

impl CyclicConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ground.spin != self.excited.spin {
            return Err(Error::InvalidParameter {
                name: "spin",
                reason: format!("ground I = {} but excited I = {}", self.ground.spin, self.excited.spin),
            });
        }
        for (name, v) in [
            ("duration", self.duration),
            ("rate", self.rate),
            ("emission_rate", self.emission_rate),
            ("repump_rate", self.repump_rate),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter { name, reason: format!("must be finite and >= 0, got {v}") });
            }
        }
        if self.trace_points == 0 {
            return Err(Error::InvalidParameter { name: "trace_points", reason: "need at least one interval".into() });
        }
        let partition = Partition::standard(self.ground.spin);
        let group = partition.group(self.drive.group);
        if !group.contains(self.drive.twice_m) {
            return Err(Error::DriveLevelNotInGroup {
                m: format_half(self.drive.twice_m),
                group: format!("{} {group}", self.drive.group),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub time: f64,
    pub excited_population: f64,
    pub photons: f64,
    /// Population outside the driven group.
    pub leaked: f64,
    pub total_population: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicResult {
    pub photons_emitted: f64,
    pub leaked_population: f64,
    /// Largest `|Σ P − 1|` along the trace.
    pub max_population_error: f64,
    pub trace: Vec<TracePoint>,
}

/// Rate-equation model on ground and excited eigenstates plus a photon counter.
#[derive(Debug, Clone)]
pub struct RateModel {
    /// `dP/dt = A P`; last component is the emitted photon count.
    pub generator: Vec<Vec<f64>>,
    pub initial: Vec<f64>,
    /// Group label of each level (ground first, then excited).
    pub groups: Vec<Group>,
    pub driven_group: Group,
    /// Number of levels per manifold.
    pub dim: usize,
}

fn closest(levels: &[Level<f64>], target: &[Complex<f64>], group: Group) -> usize {
    let overlap = |l: &Level<f64>| l.vector.iter().zip(target).map(|(a, b)| a.conj() * b).sum::<Complex<f64>>().norm_sqr();
    (0..levels.len())
        .filter(|&j| levels[j].group == group)
        .max_by(|&a, &b| overlap(&levels[a]).total_cmp(&overlap(&levels[b])))
        .expect("group nonempty")
}

impl RateModel {
    pub fn new(cfg: &CyclicConfig) -> Result<Self> {
        cfg.validate()?;
        let spin = cfg.ground.spin;
        let d = spin.dim();
        let gl = levels(&cfg.ground)?;
        let el = levels(&cfg.excited)?;
        let mut basis = vec![Complex::zero(); d];
        basis[spin.index_of(cfg.drive.twice_m).expect("validated")] = Complex::new(1.0, 0.0);
        let g_star = closest(&gl, &basis, cfg.drive.group);
        let e_star = d + closest(&el, &gl[g_star].vector, cfg.drive.group);

        let groups: Vec<Group> = gl.iter().chain(&el).map(|l| l.group).collect();
        let n = 2 * d + 1;
        let mut a = vec![vec![0.0; n]; n];
        let mut link = |from: usize, to: usize, k: f64| {
            a[to][from] += k;
            a[from][from] -= k;
        };
        link(g_star, e_star, cfg.rate);
        link(e_star, g_star, cfg.rate);
        for j in d..2 * d {
            let targets: Vec<usize> = (0..d).filter(|&i| groups[i] == groups[j]).collect();
            for &i in &targets {
                link(j, i, cfg.emission_rate / targets.len() as f64);
            }
        }
        if cfg.rf_repump {
            for i in 0..d {
                for k in 0..d {
                    if i != k && groups[i] == cfg.drive.group && groups[k] == cfg.drive.group {
                        link(k, i, cfg.repump_rate);
                    }
                }
            }
        }
        for j in d..2 * d {
            a[2 * d][j] += cfg.emission_rate;
        }
        let mut initial = vec![0.0; n];
        initial[g_star] = 1.0;
        Ok(Self { generator: a, initial, groups, driven_group: cfg.drive.group, dim: d })
    }

    fn point(&self, time: f64, p: &[f64]) -> TracePoint {
        let d = self.dim;
        TracePoint {
            time,
            excited_population: p[d..2 * d].iter().sum(),
            photons: p[2 * d],
            leaked: (0..2 * d).filter(|&j| self.groups[j] != self.driven_group).map(|j| p[j]).sum(),
            total_population: p[..2 * d].iter().sum(),
        }
    }
}

/// Integrates the readout rate equations exactly over `trace_points` equal
/// intervals.
pub fn cyclic_transition_sim(cfg: &CyclicConfig) -> Result<CyclicResult> {
    let model = RateModel::new(cfg)?;
    let n = model.initial.len();
    let h = cfg.duration / cfg.trace_points as f64;
    let a = Matrix::from_fn(n, n, |r, c| Complex::new(model.generator[r][c] * h, 0.0));
    let step = expm(&a);
    let mut p = model.initial.clone();
    let mut trace = vec![model.point(0.0, &p)];
    for k in 1..=cfg.trace_points {
        p = (0..n).map(|r| (0..n).map(|c| step[(r, c)].re * p[c]).sum()).collect();
        trace.push(model.point(k as f64 * h, &p));
    }
    let last = *trace.last().expect("nonempty");
    let max_population_error = trace.iter().map(|t| (t.total_population - 1.0).abs()).fold(0.0, f64::max);
    Ok(CyclicResult { photons_emitted: last.photons, leaked_population: last.leaked, max_population_error, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{pauli, Pauli};
    use proptest::prelude::*;

    fn spin(i: f64) -> Spin {
        Spin::new(i).unwrap()
    }

    fn params(d: f64, e: f64, bz: f64) -> QuadrupoleParams<f64> {
        QuadrupoleParams::new(d, e, bz, spin(2.5)).unwrap()
    }

    fn comm(a: &Matrix<f64>, b: &Matrix<f64>) -> Matrix<f64> {
        a * b - b * a
    }

    fn check_algebra(s: Spin) {
        let SpinOperators { ix, iy, iz } = spin_operators::<f64>(s);
        let i = Complex::new(0.0, 1.0);
        assert!((comm(&ix, &iy) - iz.scale(i)).max_abs() < 1e-12, "I={s}");
        assert!((comm(&iy, &iz) - ix.scale(i)).max_abs() < 1e-12, "I={s}");
        assert!((comm(&iz, &ix) - iy.scale(i)).max_abs() < 1e-12, "I={s}");
        let j = s.value();
        let cas = &ix * &ix + &iy * &iy + &iz * &iz;
        assert!((cas - Matrix::identity(s.dim()).scale(Complex::new(j * (j + 1.0), 0.0))).max_abs() < 1e-12, "I={s}");
    }

    #[test]
    fn spin_half_is_half_pauli() {
        let ops = spin_operators::<f64>(spin(0.5));
        let h = Complex::new(0.5, 0.0);
        assert!((ops.ix - pauli(Pauli::X).scale(h)).max_abs() < 1e-15);
        assert!((ops.iy - pauli(Pauli::Y).scale(h)).max_abs() < 1e-15);
        assert!((ops.iz - pauli(Pauli::Z).scale(h)).max_abs() < 1e-15);
    }

    #[test]
    fn five_halves_ladder() {
        let SpinOperators { ix, iy, iz } = spin_operators::<f64>(spin(2.5));
        let diag: Vec<f64> = iz.diagonal().iter().map(|c| c.re).collect();
        assert_eq!(diag, vec![2.5, 1.5, 0.5, -0.5, -1.5, -2.5]);
        let plus = ix + iy.scale(Complex::new(0.0, 1.0));
        // rows/cols: m = 5/2, 3/2, 1/2, -1/2, ...
        assert!((plus[(1, 2)].re - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!((plus[(0, 1)].re - 5f64.sqrt()).abs() < 1e-14);
        assert!((plus[(2, 3)].re - 3.0).abs() < 1e-14);
        assert!(plus[(2, 1)].norm() < 1e-15);
    }

    #[test]
    fn commutators_and_casimir() {
        for i in [0.5, 1.0, 1.5, 2.5, 3.5] {
            check_algebra(spin(i));
        }
    }

    #[test]
    fn spin_limits() {
        assert!(Spin::from_twice(99).is_ok());
        assert_eq!(Spin::from_twice(100), Err(Error::InvalidSpin(100)));
        assert_eq!(Spin::from_twice(0), Err(Error::InvalidSpin(0)));
        assert!(Spin::new(1.25).is_err());
        assert_eq!(spin(2.5).index_of(-3), Some(4));
        assert_eq!(spin(2.5).index_of(2), None);
    }

    #[test]
    fn axial_eigenvalues() {
        let d = 1.7;
        let lv = levels(&params(d, 0.0, 0.0)).unwrap();
        let want = [-8.0 / 3.0, -8.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0, 10.0 / 3.0, 10.0 / 3.0];
        for (l, w) in lv.iter().zip(want) {
            assert!((l.energy - w * d).abs() < 1e-12, "{} vs {}", l.energy, w * d);
        }
    }

    #[test]
    fn pure_zeeman() {
        let b = 0.37;
        let lv = levels(&params(0.0, 0.0, b)).unwrap();
        for (l, m) in lv.iter().zip([-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]) {
            assert!((l.energy - b * m).abs() < 1e-14);
        }
    }

    #[test]
    fn traceless_without_field() {
        let h = pseudoquad_hamiltonian(&params(1.3, 0.4, 0.0));
        assert!(h.trace().norm() < 1e-13);
        assert!(h.is_hermitian(1e-15));
    }

    #[test]
    fn rhombic_doublets() {
        let r = kramers_check(&params(1.0, 0.1, 0.0)).unwrap();
        assert_eq!(r.clusters.len(), 3);
        assert!(r.all_doublets && r.one_per_group);
        assert!(r.max_intra_gap < 1e-12);
        assert!(r.min_inter_gap > 0.01);
    }

    #[test]
    fn standard_groups() {
        let p = Partition::standard(spin(2.5));
        assert_eq!(p.group(Group::A).members, vec![5, 1, -3]);
        assert_eq!(p.group(Group::B).members, vec![3, -1, -5]);
        assert_eq!(p.group(Group::A).to_string(), "{5/2, 1/2, -3/2}");
        let q = Partition::standard(spin(1.0));
        assert_eq!(q.group(Group::A).members, vec![0]);
    }

    #[test]
    fn partition_validation() {
        let s = spin(1.5);
        assert!(Partition::new(s, vec![3, -1], vec![1, -3]).is_ok());
        assert!(matches!(Partition::new(s, vec![3, -1], vec![1]), Err(Error::InvalidPartition(_))));
        assert!(Partition::new(s, vec![3, -1, 1], vec![1, -3]).is_err());
        assert!(Partition::new(s, vec![3, -1, 2], vec![1, -3]).is_err());
        assert!(Partition::new(s, vec![3, -1, 1, -3], vec![]).is_err());
        let p = QuadrupoleParams::new(1.0, 0.2, 0.0, spin(2.5)).unwrap();
        assert!(group_closure_check_with(&p, &Partition::standard(s)).is_err());
    }

    #[test]
    fn wrong_partition_is_not_closed() {
        let s = spin(2.5);
        let naive = Partition::new(s, vec![5, 3, 1], vec![-1, -3, -5]).unwrap();
        let r = group_closure_check_with(&params(1.0, 0.3, 0.0), &naive).unwrap();
        assert!(r.max_cross_element > 0.1);
    }

    #[test]
    fn closure_and_purity() {
        let r = group_closure_check(&params(1.0, 0.3, 0.0)).unwrap();
        assert!(r.max_cross_element < 1e-14);
        assert!((r.group_eigvec_purity - 1.0).abs() < 1e-12);
        let t = group_closure_check(&params(1.0, 0.3, 0.0).with_transverse(0.05)).unwrap();
        assert!(t.max_cross_element > 0.01);
        assert!(t.group_eigvec_purity < 1.0 - 1e-6);
    }

    #[test]
    fn zeeman_splitting_is_linear() {
        let bs = crate::composite::log_space(1e-4, 1e-2, 7);
        let split: Vec<Vec<f64>> = bs.iter().map(|&b| doublet_splittings(&params(1.0, 0.1, b)).unwrap()).collect();
        for k in 0..3 {
            let ys: Vec<f64> = split.iter().map(|s| s[k]).collect();
            let slope = crate::composite::loglog_slope(&bs, &ys);
            assert!((slope - 1.0).abs() < 0.05, "doublet {k}: {slope}");
        }
        for &b in &bs {
            assert!(group_closure_check(&params(1.0, 0.1, b)).unwrap().max_cross_element < 1e-14);
        }
    }

    #[test]
    fn integer_spin_has_no_doublets() {
        let p = QuadrupoleParams::new(1.0, 0.2, 0.0, spin(1.0)).unwrap();
        assert!(!kramers_check(&p).unwrap().all_doublets);
        assert!(group_closure_check(&p).unwrap().max_cross_element < 1e-14);
    }

    #[test]
    fn f32_spectrum() {
        let p = QuadrupoleParams::<f32>::new(1.0, 0.0, 0.0, spin(2.5)).unwrap();
        let lv = levels(&p).unwrap();
        assert!((lv[5].energy - 10.0 / 3.0).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn algebra_any_spin(twice in 1i64..=30) {
            check_algebra(Spin::from_twice(twice).unwrap());
        }

        #[test]
        fn closed_for_random_params(d in -5.0f64..5.0, e in -2.0f64..2.0, bz in -1.0f64..1.0) {
            let r = group_closure_check(&params(d, e, bz)).unwrap();
            prop_assert!(r.max_cross_element < 1e-14);
            prop_assert!((r.group_eigvec_purity - 1.0).abs() < 1e-12);
        }

        #[test]
        fn kramers_for_random_params(d in 0.5f64..3.0, e in 0.0f64..0.5, twice in prop::sample::select(vec![1i64, 3, 5, 7])) {
            let p = QuadrupoleParams::new(d, e, 0.0, Spin::from_twice(twice).unwrap()).unwrap();
            let r = kramers_check(&p).unwrap();
            prop_assert!(r.all_doublets && r.one_per_group);
        }
    }

    // --- readout rate equations ---

    fn cfg(rf: bool, duration: f64) -> CyclicConfig {
        CyclicConfig { rf_repump: rf, duration, trace_points: 200, ..CyclicConfig::default() }
    }

    fn steady_photon_rate(r: f64, g: f64, k: f64) -> f64 {
        // x: driven ground, y: each other group member, z: driven excited
        let zx = r / (r + g);
        let x = 1.0 / (3.0 + zx + 2.0 * g * zx / (3.0 * k));
        g * zx * x
    }

    fn rk4(model: &RateModel, t: f64, steps: usize) -> Vec<f64> {
        let a = &model.generator;
        let f = |p: &[f64]| -> Vec<f64> { a.iter().map(|row| row.iter().zip(p).map(|(x, y)| x * y).sum()).collect() };
        let h = t / steps as f64;
        let mut p = model.initial.clone();
        for _ in 0..steps {
            let k1 = f(&p);
            let y: Vec<f64> = p.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
            let k2 = f(&y);
            let y: Vec<f64> = p.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
            let k3 = f(&y);
            let y: Vec<f64> = p.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
            let k4 = f(&y);
            for i in 0..p.len() {
                p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        p
    }

    #[test]
    fn twelve_levels_for_five_halves() {
        let m = RateModel::new(&cfg(true, 1.0)).unwrap();
        assert_eq!(m.dim, 6);
        assert_eq!(m.generator.len(), 13);
    }

    #[test]
    fn exact_propagation_matches_rk4() {
        for rf in [true, false] {
            let c = CyclicConfig { duration: 5.0, trace_points: 1, ..cfg(rf, 5.0) };
            let model = RateModel::new(&c).unwrap();
            let oracle = rk4(&model, 5.0, 20_000);
            let res = cyclic_transition_sim(&c).unwrap();
            let last = res.trace.last().unwrap();
            assert!((last.photons - oracle[12]).abs() < 1e-10);
            assert!((last.excited_population - oracle[6..12].iter().sum::<f64>()).abs() < 1e-10);
        }
    }

    #[test]
    fn repump_gives_steady_cycling() {
        let res = cyclic_transition_sim(&cfg(true, 200.0)).unwrap();
        let at = |t: f64| res.trace.iter().find(|p| (p.time - t).abs() < 1e-9).unwrap().photons;
        let rate = steady_photon_rate(1.0, 1.0, 10.0);
        assert!(((at(200.0) - at(100.0)) / 100.0 - rate).abs() < 1e-9 * rate);
        assert!(((at(100.0) - at(50.0)) / 50.0 - rate).abs() < 1e-9 * rate);
        assert!(res.leaked_population.abs() < 1e-12);
        assert!(res.trace.iter().all(|p| p.leaked.abs() < 1e-12));
        assert!(res.max_population_error < 1e-9);
    }

    #[test]
    fn no_repump_saturates() {
        // each emission shelves the ion with probability 2/3, so 1/(2/3) photons on average
        let res = cyclic_transition_sim(&cfg(false, 200.0)).unwrap();
        assert!((res.photons_emitted - 1.5).abs() < 1e-9, "{}", res.photons_emitted);
        let mid = res.trace[100].photons;
        assert!(res.photons_emitted - mid < 1e-6);
        assert!(res.leaked_population.abs() < 1e-12);
        assert!(res.max_population_error < 1e-9);
    }

    #[test]
    fn zero_rate_emits_nothing() {
        let res = cyclic_transition_sim(&CyclicConfig { rate: 0.0, ..cfg(true, 50.0) }).unwrap();
        assert_eq!(res.photons_emitted, 0.0);
    }

    #[test]
    fn other_group_and_field() {
        let c = CyclicConfig {
            drive: DriveLevel { group: Group::B, twice_m: -5 },
            ground: params(1.0, 0.2, 0.05),
            excited: params(0.7, 0.1, 0.03),
            ..cfg(true, 100.0)
        };
        let res = cyclic_transition_sim(&c).unwrap();
        assert!(res.leaked_population.abs() < 1e-12);
        assert!(res.photons_emitted > 1.0);
    }

    #[test]
    fn drive_level_must_be_in_group() {
        let c = CyclicConfig { drive: DriveLevel { group: Group::A, twice_m: -1 }, ..cfg(true, 1.0) };
        let err = cyclic_transition_sim(&c).unwrap_err();
        assert_eq!(err, Error::DriveLevelNotInGroup { m: "-1/2".into(), group: "A {5/2, 1/2, -3/2}".into() });
        let bad = CyclicConfig { excited: QuadrupoleParams { spin: spin(1.5), ..params(1.0, 0.0, 0.0) }, ..cfg(true, 1.0) };
        assert!(cyclic_transition_sim(&bad).is_err());
        assert!(cyclic_transition_sim(&CyclicConfig { rate: -1.0, ..cfg(true, 1.0) }).is_err());
    }
}
