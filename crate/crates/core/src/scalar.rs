// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction shared by the linear-algebra, gate and hyperfine code.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point type the generic numerics are written against.
///
/// The associated tolerances are the precision-dependent thresholds used by
/// input validation and iterative refinement.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Entrywise tolerance when checking `M = M†`.
    const HERMITIAN_TOL: Self;
    /// Entrywise tolerance when checking `U†U = 1`.
    const UNITARY_TOL: Self;
    /// Stopping threshold on the gradient norm of iterative maximisers.
    const GRAD_TOL: Self;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f64 {
    const HERMITIAN_TOL: Self = 1e-10;
    const UNITARY_TOL: Self = 1e-10;
    const GRAD_TOL: Self = 1e-10;
}

impl Real for f32 {
    const HERMITIAN_TOL: Self = 1e-4;
    const UNITARY_TOL: Self = 1e-4;
    const GRAD_TOL: Self = 1e-4;
}

/// `e^{iφ}`.
#[inline]
pub fn cis<T: Real>(phi: T) -> Complex<T> {
    Complex::new(phi.cos(), phi.sin())
}
