// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! Dipole-dipole frequency shifts from a random field of perturbers.
//!
//! Perturbers are a Poisson process inside a sphere around the probed ion.
//! They are generated in the volume coordinate `x = 4πr³/3`, where the
//! process has exponential gaps with rate equal to the density, so the
//! configuration inside radius `R` does not depend on anything outside it.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Samples are drawn in batches of this size, batch `k` seeded with `seed ^ k`.
pub const BATCH_SIZE: usize = 1024;
/// Smallest sample count accepted by [`broadened_profile`].
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngularFactor {
    /// `1 - 3cos²ϑ` with isotropic orientation.
    #[default]
    Dipole,
    /// `±1` with equal probability.
    Sign,
}

impl AngularFactor {
    /// Mean of `|factor|` over orientations.
    pub fn mean_abs(self) -> f64 {
        match self {
            AngularFactor::Dipole => 4.0 / (3.0 * 3f64.sqrt()),
            AngularFactor::Sign => 1.0,
        }
    }

    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            AngularFactor::Dipole => {
                let u: f64 = rng.random_range(-1.0..=1.0);
                1.0 - 3.0 * u * u
            }
            AngularFactor::Sign => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturberField {
    density: f64,
    coupling: f64,
    sample_radius: f64,
    seed: u64,
    angular: AngularFactor,
}

impl PerturberField {
    pub fn new(density: f64, coupling: f64, sample_radius: f64, seed: u64) -> Result<Self> {
        if !(density >= 0.0 && density.is_finite()) {
            return Err(Error::InvalidParameter { name: "density", reason: format!("must be finite and >= 0, got {density}") });
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(Error::InvalidParameter { name: "coupling", reason: format!("must be finite and > 0, got {coupling}") });
        }
        if !(sample_radius > 0.0 && sample_radius.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sample_radius",
                reason: format!("must be finite and > 0, got {sample_radius}"),
            });
        }
        Ok(Self { density, coupling, sample_radius, seed, angular: AngularFactor::Dipole })
    }

    /// Field whose sphere holds `mean_count` perturbers on average.
    ///
    /// At zero density the radius is 1.
    pub fn with_mean_count(density: f64, coupling: f64, mean_count: f64, seed: u64) -> Result<Self> {
        if !(mean_count > 0.0 && mean_count.is_finite()) {
            return Err(Error::InvalidParameter { name: "mean_count", reason: format!("must be finite and > 0, got {mean_count}") });
        }
        let radius = if density > 0.0 { (3.0 * mean_count / (4.0 * PI * density)).cbrt() } else { 1.0 };
        Self::new(density, coupling, radius, seed)
    }

    pub fn with_angular(mut self, angular: AngularFactor) -> Self {
        self.angular = angular;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_radius(self, sample_radius: f64) -> Result<Self> {
        Ok(Self::new(self.density, self.coupling, sample_radius, self.seed)?.with_angular(self.angular))
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn sample_radius(&self) -> f64 {
        self.sample_radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn angular(&self) -> AngularFactor {
        self.angular
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.sample_radius.powi(3)
    }

    /// Expected number of perturbers in the sphere.
    pub fn mean_count(&self) -> f64 {
        self.density * self.volume()
    }
}

/// Shift from one perturber at distance `r` and polar angle `acos(cos_theta)`.
pub fn pair_shift(coupling: f64, r: f64, cos_theta: f64) -> f64 {
    coupling * (1.0 - 3.0 * cos_theta * cos_theta) / r.powi(3)
}

/// Total shift for one random perturber configuration.
pub fn sample_shift<R: Rng + ?Sized>(field: &PerturberField, rng: &mut R) -> f64 {
    if field.density == 0.0 {
        return 0.0;
    }
    let gaps = Exp::new(field.density).expect("positive rate");
    let v = field.volume();
    let mut x = 0.0;
    let mut shift = 0.0;
    loop {
        x += gaps.sample(rng);
        if x > v {
            return shift;
        }
        // C·f/r³ with r³ = 3x/4π
        shift += field.coupling * field.angular.draw(rng) * 4.0 * PI / (3.0 * x);
    }
}

/// `n` shifts, identical for identical fields regardless of thread count.
pub fn sample_shifts(field: &PerturberField, n: usize) -> Vec<f64> {
    let batches = n.div_ceil(BATCH_SIZE);
    let parts: Vec<Vec<f64>> = (0..batches)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(field.seed ^ k as u64);
            let len = BATCH_SIZE.min(n - k * BATCH_SIZE);
            (0..len).map(|_| sample_shift(field, &mut rng)).collect()
        })
        .collect();
    parts.concat()
}

/// Lorentzian CDF; a zero width is a unit step at the center.
pub fn lorentzian_cdf(x: f64, center: f64, fwhm: f64) -> f64 {
    if fwhm > 0.0 {
        0.5 + ((x - center) / (0.5 * fwhm)).atan() / PI
    } else if x >= center {
        1.0
    } else {
        0.0
    }
}

/// Left limit of [`lorentzian_cdf`].
fn lorentzian_cdf_left(x: f64, center: f64, fwhm: f64) -> f64 {
    if fwhm > 0.0 || x != center {
        lorentzian_cdf(x, center, fwhm)
    } else {
        0.0
    }
}

/// Width of the infinite-volume shift distribution, `2·(π/2)·(4π/3)·n·C·⟨|f|⟩`.
pub fn dilute_limit_fwhm(density: f64, coupling: f64, angular: AngularFactor) -> f64 {
    4.0 * PI * PI / 3.0 * density * coupling * angular.mean_abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftDistribution {
    /// Shifts in draw order.
    pub samples: Vec<f64>,
    /// Median.
    pub fitted_center: f64,
    /// Interquartile range, which equals the FWHM for a Lorentzian.
    pub fitted_fwhm: f64,
    /// Kolmogorov–Smirnov distance to the fitted Lorentzian.
    pub ks_distance: f64,
}

/// Sample the shift distribution and fit a Lorentzian by quartiles.
pub fn broadened_profile(field: &PerturberField, n_samples: usize) -> Result<ShiftDistribution> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { required: MIN_SAMPLES, got: n_samples });
    }
    let samples = sample_shifts(field, n_samples);
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    let center = quantile(&sorted, 0.5);
    let fwhm = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let ks_distance = ks_distance(&sorted, |x| lorentzian_cdf(x, center, fwhm), |x| lorentzian_cdf_left(x, center, fwhm));
    Ok(ShiftDistribution { samples, fitted_center: center, fitted_fwhm: fwhm, ks_distance })
}

/// Linearly interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

// Sup distance between the empirical CDF and `cdf`, counting ties once.
fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64, cdf_left: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        d = d.max((cdf_left(x) - i as f64 / n).abs());
        d = d.max((j as f64 / n - cdf(x)).abs());
        i = j;
    }
    d
}
