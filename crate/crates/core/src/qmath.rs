// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra for the small operators used throughout the
//! crate: Pauli and spin matrices, two-qubit unitaries, density matrices.
//!
//! Everything is row-major and sized at run time. The dimensions involved
//! (2, 4, 6, up to ~100) are small enough that plain loops beat any
//! blocking scheme.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cis, Real};

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Square diagonal matrix.
    pub fn from_diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, d) in diag.iter().enumerate() {
            m[(k, k)] = *d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let diag: Vec<_> = diag.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self::from_diagonal(&diag)
    }

    /// Builds a matrix from row slices of `(re, im)` pairs. Panics on ragged input.
    pub fn from_rows(rows: &[&[(f64, f64)]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |r, c| {
            let (re, im) = rows[r][c];
            Complex::new(T::lit(re), T::lit(im))
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entries in row-major order.
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn trace(&self) -> Complex<T> {
        self.diagonal().into_iter().fold(Complex::zero(), |acc, z| acc + z)
    }

    /// Largest entry modulus; NaN if any entry is NaN.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| nan_max(acc, z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// `max |M - M†|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut dev = T::zero();
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = nan_max(dev, (self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `max |U†U - 1|`; infinite for non-square input.
    pub fn unitarity_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        (&self.dagger() * self - Self::identity(self.rows)).max_abs()
    }

    fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)].is_zero()))
    }

    /// `tr(self† · other)` without forming the product.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.data
            .iter()
            .zip(&other.data)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Element type conversion, e.g. for comparing an `f32` computation
    /// against its `f64` counterpart.
    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| {
                    Complex::new(
                        U::from_f64(z.re.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::nan),
                        U::from_f64(z.im.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::nan),
                    )
                })
                .collect(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    fn check_square_pair(&self, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrices".into(),
                got: format!("{}x{}", self.rows, self.cols),
            });
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] = out[(r, c)] + a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

impl<T: Real> Mul for Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: Matrix<T>) -> Matrix<T> {
        &self * &rhs
    }
}

impl<T: Real> Add for Matrix<T> {
    type Output = Matrix<T>;

    fn add(mut self, rhs: Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        for (a, b) in self.data.iter_mut().zip(rhs.data) {
            *a = *a + b;
        }
        self
    }
}

impl<T: Real> Sub for Matrix<T> {
    type Output = Matrix<T>;

    fn sub(mut self, rhs: Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        for (a, b) in self.data.iter_mut().zip(rhs.data) {
            *a = *a - b;
        }
        self
    }
}

/// Rotation axis / Pauli operator label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// The 2×2 Pauli matrix for `axis`.
pub fn pauli<T: Real>(axis: Pauli) -> Matrix<T> {
    let (o, l, i) = (Complex::zero(), Complex::one(), Complex::i());
    let data = match axis {
        Pauli::X => vec![o, l, l, o],
        Pauli::Y => vec![o, -i, i, o],
        Pauli::Z => vec![l, o, o, -l],
    };
    Matrix { rows: 2, cols: 2, data }
}

/// `exp(-i·angle·σ/2)` in closed form.
pub fn rotation<T: Real>(axis: Pauli, angle: T) -> Matrix<T> {
    let half = angle / T::lit(2.0);
    let c = Complex::new(half.cos(), T::zero());
    let s = Complex::new(T::zero(), -half.sin());
    Matrix::identity(2).scale(c) + pauli(axis).scale(s)
}

/// Tensor product; `a` is the left (most significant) factor.
pub fn kron<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    Matrix::from_fn(rows, cols, |r, c| a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)])
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigh<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors, one per column, matching `values`.
    pub vectors: Matrix<T>,
}

const MAX_JACOBI_SWEEPS: usize = 100;

/// Hermitian eigensolver (cyclic complex Jacobi).
///
/// Rotations are only applied to pairs with a non-zero coupling, so exact
/// zero blocks in the input stay exactly zero and eigenvectors of a
/// block-diagonal matrix never mix blocks.
pub fn eigh<T: Real>(h: &Matrix<T>) -> Result<Eigh<T>> {
    let dev = h.hermitian_deviation();
    if !(dev <= T::HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation: dev.to_f64().unwrap_or(f64::INFINITY) });
    }
    let n = h.rows;
    let mut a = h.clone();
    let mut v = Matrix::<T>::identity(n);
    let scale = h.frobenius_norm();
    let two = T::lit(2.0);

    let mut converged = n < 2;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: T = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .fold(T::zero(), |acc, (p, q)| acc + a[(p, q)].norm_sqr());
        if off.sqrt() <= T::epsilon() * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let abs = apq.norm();
                if abs.is_zero() {
                    continue;
                }
                let phase = apq / abs;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (two * abs);
                let t = if tau.is_zero() {
                    T::one()
                } else {
                    tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let jpp = Complex::new(c, T::zero());
                let jpq = Complex::new(s, T::zero());
                let jqp = phase.conj() * (-s);
                let jqq = phase.conj() * c;

                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)].im = T::zero();
                a[(q, q)].im = T::zero();
            }
        }
    }
    if !converged {
        let off: T = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .fold(T::zero(), |acc, (p, q)| acc + a[(p, q)].norm_sqr());
        return Err(Error::NoConvergence {
            iterations: MAX_JACOBI_SWEEPS,
            residual: off.sqrt().to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigh { values, vectors })
}

/// `exp(-i·h·t)` for Hermitian `h`.
pub fn expm_hermitian<T: Real>(h: &Matrix<T>, t: T) -> Result<Matrix<T>> {
    let dev = h.hermitian_deviation();
    if !(dev <= T::HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation: dev.to_f64().unwrap_or(f64::INFINITY) });
    }
    if h.is_diagonal() {
        let phases: Vec<_> = h.diagonal().iter().map(|d| cis(-d.re * t)).collect();
        return Ok(Matrix::from_diagonal(&phases));
    }
    let Eigh { values, vectors } = eigh(h)?;
    let n = h.rows;
    let phases: Vec<_> = values.iter().map(|&l| cis(-l * t)).collect();
    Ok(Matrix::from_fn(n, n, |r, c| {
        (0..n).fold(Complex::zero(), |acc, k| acc + vectors[(r, k)] * phases[k] * vectors[(c, k)].conj())
    }))
}

// `max` that lets NaN through, so deviation checks fail on NaN input.
fn nan_max<T: Real>(a: T, b: T) -> T {
    if a.is_nan() || b.is_nan() {
        T::nan()
    } else {
        a.max(b)
    }
}

/// `min_φ max|a - e^{iφ} b|`, with the phase taken from `tr(b†a)`.
pub fn global_phase_distance<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<T> {
    a.check_square_pair(b)?;
    let overlap = b.inner(a);
    let aligned = if overlap.is_zero() { b.clone() } else { b.scale(overlap / overlap.norm()) };
    Ok((a.clone() - aligned).max_abs())
}

/// Gate fidelity `|tr(v†u)|² / d²`.
pub fn frobenius_fidelity<T: Real>(u: &Matrix<T>, v: &Matrix<T>) -> Result<T> {
    u.check_square_pair(v)?;
    let d = T::from_usize(u.rows).expect("dimension fits");
    Ok(v.inner(u).norm_sqr() / (d * d))
}

/// `exp(A)` for a general small matrix: Taylor series with scaling and squaring.
pub fn expm(a: &Matrix<f64>) -> Matrix<f64> {
    let norm1 = (0..a.cols())
        .map(|c| (0..a.rows()).map(|r| a[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a.scale(Complex::new(0.5f64.powi(squarings), 0.0));

    let n = a.rows();
    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=30 {
        term = (&term * &b).scale(Complex::new(1.0 / k as f64, 0.0));
        sum = sum + term.clone();
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    type M = Matrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn cnot() -> M {
        M::from_rows(&[
            &[(1., 0.), (0., 0.), (0., 0.), (0., 0.)],
            &[(0., 0.), (1., 0.), (0., 0.), (0., 0.)],
            &[(0., 0.), (0., 0.), (0., 0.), (1., 0.)],
            &[(0., 0.), (0., 0.), (1., 0.), (0., 0.)],
        ])
    }

    #[test]
    fn pauli_matrices() {
        assert_eq!(pauli::<f64>(Pauli::Z), M::from_real_diagonal(&[1.0, -1.0]));
        assert_eq!(pauli::<f64>(Pauli::X), M::from_rows(&[&[(0., 0.), (1., 0.)], &[(1., 0.), (0., 0.)]]));
        assert_eq!(pauli::<f64>(Pauli::Y), M::from_rows(&[&[(0., 0.), (0., -1.)], &[(0., 1.), (0., 0.)]]));
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            let p = pauli::<f64>(axis);
            assert!(p.is_hermitian(0.0));
            assert_eq!(p.unitarity_deviation(), 0.0);
            assert_eq!(p.trace(), c(0.0, 0.0));
        }
    }

    #[test]
    fn kron_conventions() {
        let i2 = M::identity(2);
        let z = pauli::<f64>(Pauli::Z);
        assert_eq!(kron(&i2, &i2), M::identity(4));
        assert_eq!(kron(&z, &i2), M::from_real_diagonal(&[1., 1., -1., -1.]));
        assert_eq!(kron(&i2, &z), M::from_real_diagonal(&[1., -1., 1., -1.]));
        assert_eq!(kron(&M::identity(2), &M::identity(3)).rows(), 6);
    }

    #[test]
    fn expm_examples() {
        let z2 = pauli::<f64>(Pauli::Z).scale(c(0.5, 0.0));
        let u = expm_hermitian(&z2, PI).unwrap();
        assert!((u - M::from_diagonal(&[c(0., -1.), c(0., 1.)])).max_abs() < 1e-15);

        let y2 = pauli::<f64>(Pauli::Y).scale(c(0.5, 0.0));
        let u = expm_hermitian(&y2, PI / 2.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let want = M::from_rows(&[&[(r, 0.), (-r, 0.)], &[(r, 0.), (r, 0.)]]);
        assert!((u - want).max_abs() < 1e-15);
        assert!((rotation(Pauli::Y, PI / 2.0) - expm_hermitian(&y2, PI / 2.0).unwrap()).max_abs() < 1e-15);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m = M::from_rows(&[&[(0., 0.), (1., 0.)], &[(0., 0.), (0., 0.)]]);
        assert!(matches!(expm_hermitian(&m, 1.0), Err(Error::NotHermitian { .. })));
        assert!(matches!(eigh(&M::zeros(2, 3)), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn dense_expm_matches_closed_form_rotation() {
        // (X + Z)/√2 is a Pauli along the x-z diagonal: exp(-iθn·σ/2) = cos(θ/2) - i sin(θ/2) n·σ.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let n_sigma = (pauli::<f64>(Pauli::X) + pauli(Pauli::Z)).scale(c(r, 0.0));
        let theta = 1.234;
        let u = expm_hermitian(&n_sigma.scale(c(0.5, 0.0)), theta).unwrap();
        let want = M::identity(2).scale(c((theta / 2.0).cos(), 0.0)) + n_sigma.scale(c(0.0, -(theta / 2.0).sin()));
        assert!((u - want).max_abs() < 1e-14);
    }

    #[test]
    fn phase_distance_examples() {
        let i4 = M::identity(4);
        assert!(global_phase_distance(&i4, &i4.scale(c(0., 1.))).unwrap() < 1e-15);
        let d = global_phase_distance(&pauli::<f64>(Pauli::Z), &pauli(Pauli::X)).unwrap();
        assert!(d >= 1.0);
        assert!(global_phase_distance(&i4, &M::identity(2)).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let cx = cnot();
        assert!((frobenius_fidelity(&cx, &cx).unwrap() - 1.0).abs() < 1e-15);
        // tr(CNOT) = 2 (diagonal 1, 1, 0, 0).
        assert!((frobenius_fidelity(&M::identity(4), &cx).unwrap() - 4.0 / 16.0).abs() < 1e-15);
        assert!(frobenius_fidelity(&cx, &M::identity(2)).is_err());
    }

    #[test]
    fn fidelity_of_small_rotation_is_quadratic() {
        // F(exp(-iεZ⊗Z/2), 1) = cos²(ε/2) = 1 - ε²/4 + O(ε⁴).
        let zz = kron(&pauli::<f64>(Pauli::Z), &pauli(Pauli::Z)).scale(c(0.5, 0.0));
        for eps in [1e-2, 1e-3, 1e-4] {
            let u = expm_hermitian(&zz, eps).unwrap();
            let infid = 1.0 - frobenius_fidelity(&u, &M::identity(4)).unwrap();
            assert!((infid / (eps * eps) - 0.25).abs() < 1e-3, "eps={eps} ratio={}", infid / (eps * eps));
        }
    }

    #[test]
    fn matrix_shape_errors() {
        assert!(M::new(2, 2, vec![c(0., 0.); 3]).is_err());
        assert!(M::new(2, 2, vec![c(0., 0.); 4]).is_ok());
    }

    #[test]
    fn f32_rotation_matches_f64() {
        let a = rotation::<f32>(Pauli::X, 0.3);
        let b = rotation::<f64>(Pauli::X, 0.3);
        assert!((a.cast::<f64>() - b).max_abs() < 1e-6);
    }

    fn arb_complex() -> impl Strategy<Value = Complex<f64>> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex::new(re, im))
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = M> {
        proptest::collection::vec(arb_complex(), n * n).prop_map(move |d| M::new(n, n, d).unwrap())
    }

    fn arb_hermitian(n: usize) -> impl Strategy<Value = M> {
        arb_matrix(n).prop_map(|a| (a.clone() + a.dagger()).scale(Complex::new(0.5, 0.0)))
    }

    proptest! {
        #[test]
        fn kron_mixed_product(a in arb_matrix(2), b in arb_matrix(2), cm in arb_matrix(2), d in arb_matrix(2)) {
            let lhs = &kron(&a, &b) * &kron(&cm, &d);
            let rhs = kron(&(&a * &cm), &(&b * &d));
            prop_assert!((lhs - rhs).max_abs() < 1e-12);
        }

        #[test]
        fn kron_associative(a in arb_matrix(2), b in arb_matrix(2), cm in arb_matrix(2)) {
            let lhs = kron(&kron(&a, &b), &cm);
            let rhs = kron(&a, &kron(&b, &cm));
            prop_assert!((lhs - rhs).max_abs() < 1e-12);
        }

        #[test]
        fn expm_is_unitary(h in arb_hermitian(4), t in -10.0..10.0f64) {
            let u = expm_hermitian(&h, t).unwrap();
            prop_assert!(u.unitarity_deviation() < 1e-12);
        }

        #[test]
        fn eigh_reconstructs(h in arb_hermitian(6)) {
            let Eigh { values, vectors } = eigh(&h).unwrap();
            prop_assert!(vectors.unitarity_deviation() < 1e-12);
            let lam = M::from_real_diagonal(&values);
            let back = &(&vectors * &lam) * &vectors.dagger();
            prop_assert!((back - h).max_abs() < 1e-12);
            prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn phase_distance_ignores_global_phase(h in arb_hermitian(4), phi in -10.0..10.0f64) {
            let a = expm_hermitian(&h, 1.0).unwrap();
            let b = a.scale(cis(phi));
            prop_assert!(global_phase_distance(&a, &b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn nan_entries_fail_checks() {
        let mut m = Matrix::<f64>::identity(2);
        m[(0, 1)] = Complex::new(f64::NAN, 0.0);
        assert!(m.max_abs().is_nan());
        assert!(!m.is_hermitian(1.0));
        assert!(m.unitarity_deviation().is_nan());
        assert!(global_phase_distance(&m, &Matrix::identity(2)).unwrap().is_nan());
    }
}
