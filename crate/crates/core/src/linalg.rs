//! Fixed-dimension complex linear algebra for one and two qubits.
//!
//! Kets live in `C^N` and operators are dense `N×N` row-major matrices, with
//! `N ∈ {2, 4}` in practice. Two-qubit amplitudes use the index
//! `2·s + a`, where `s` is the system (control) bit and `a` the ancilla bit.

use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Builds a complex number, rejecting NaN and infinite components.
pub fn finite_complex<T: Scalar>(re: T, im: T) -> Result<Complex<T>> {
    if re.is_finite() && im.is_finite() {
        Ok(Complex::new(re, im))
    } else {
        Err(Error::InvalidInput(format!(
            "complex components must be finite, got ({re}, {im})"
        )))
    }
}

/// Both components finite.
pub fn complex_is_finite<T: Scalar>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[inline]
fn c<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
fn zero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
fn one<T: Scalar>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// A (not necessarily normalized) ket in `C^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket<T, const N: usize>(pub [Complex<T>; N]);

pub type Vec2<T> = Ket<T, 2>;
pub type Vec4<T> = Ket<T, 4>;

impl<T: Scalar, const N: usize> Ket<T, N> {
    pub fn new(amplitudes: [Complex<T>; N]) -> Self {
        Ket(amplitudes)
    }

    pub fn zeros() -> Self {
        Ket([zero(); N])
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(k: usize) -> Self {
        let mut v = Self::zeros();
        v.0[k] = one();
        v
    }

    pub fn from_real(amplitudes: [T; N]) -> Self {
        Ket(amplitudes.map(|x| c(x, T::zero())))
    }

    pub fn amplitudes(&self) -> &[Complex<T>; N] {
        &self.0
    }

    pub fn norm_sqr(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: Complex<T>) -> Self {
        Ket(self.0.map(|z| z * k))
    }

    pub fn scale_real(&self, k: T) -> Self {
        Ket(self.0.map(|z| z * k))
    }

    /// `⟨self|other⟩`; the receiver is conjugated.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(zero(), |acc, (b, k)| acc + b.conj() * k)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(complex_is_finite)
    }

    /// Divides by the norm. Fails on the zero vector.
    pub fn normalized(&self) -> Result<UnitKet<T, N>> {
        let n = self.norm();
        if !n.is_finite() || n <= T::zero() {
            return Err(Error::NotNormalized {
                norm_sqr: self.norm_sqr().to_f64_lossy(),
            });
        }
        Ok(UnitKet(self.scale_real(n.recip())))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(T::zero(), |m, (x, y)| m.max((x - y).norm()))
    }
}

impl<T: Scalar, const N: usize> Index<usize> for Ket<T, N> {
    type Output = Complex<T>;
    fn index(&self, k: usize) -> &Complex<T> {
        &self.0[k]
    }
}

impl<T: Scalar, const N: usize> Add for Ket<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for (o, r) in out.0.iter_mut().zip(rhs.0) {
            *o = *o + r;
        }
        out
    }
}

impl<T: Scalar, const N: usize> Sub for Ket<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for (o, r) in out.0.iter_mut().zip(rhs.0) {
            *o = *o - r;
        }
        out
    }
}

/// A ket whose squared norm is 1 within [`Scalar::norm_tol`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitKet<T, const N: usize>(Ket<T, N>);

pub type UnitVec2<T> = UnitKet<T, 2>;
pub type UnitVec4<T> = UnitKet<T, 4>;

impl<T: Scalar, const N: usize> UnitKet<T, N> {
    /// Accepts `v` only if `|‖v‖² − 1| ≤ norm_tol`; the vector is stored as given.
    pub fn new(v: Ket<T, N>) -> Result<Self> {
        let n2 = v.norm_sqr();
        if v.is_finite() && (n2 - T::one()).abs() <= T::norm_tol() {
            Ok(UnitKet(v))
        } else {
            Err(Error::NotNormalized {
                norm_sqr: n2.to_f64_lossy(),
            })
        }
    }

    pub fn basis(k: usize) -> Self {
        UnitKet(Ket::basis(k))
    }

    pub fn as_ket(&self) -> &Ket<T, N> {
        &self.0
    }

    pub fn into_ket(self) -> Ket<T, N> {
        self.0
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.0.inner(&other.0)
    }

    /// `|⟨self|other⟩|`, the phase-insensitive overlap used for state equality.
    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm()
    }
}

impl<T: Scalar, const N: usize> Index<usize> for UnitKet<T, N> {
    type Output = Complex<T>;
    fn index(&self, k: usize) -> &Complex<T> {
        &self.0 .0[k]
    }
}

impl<T: Scalar> UnitVec2<T> {
    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn from_bloch(theta: T, phi: T) -> Self {
        let half = theta / T::lit(2.0);
        UnitKet(Ket([c(half.cos(), T::zero()), Complex::from_polar(half.sin(), phi)]))
    }

    /// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
    pub fn bloch_vector(&self) -> [T; 3] {
        let (a, b) = (self[0], self[1]);
        let cross = a.conj() * b;
        let two = T::lit(2.0);
        [two * cross.re, two * cross.im, a.norm_sqr() - b.norm_sqr()]
    }
}

/// `⟨bra|ket⟩` with the first argument conjugated.
pub fn inner<T: Scalar, const N: usize>(bra: &Ket<T, N>, ket: &Ket<T, N>) -> Complex<T> {
    bra.inner(ket)
}

/// `|sys⟩ ⊗ |anc⟩`, with the system as the major index.
pub fn tensor<T: Scalar>(sys: &Vec2<T>, anc: &Vec2<T>) -> Vec4<T> {
    let mut out = Vec4::zeros();
    for s in 0..2 {
        for a in 0..2 {
            out.0[2 * s + a] = sys[s] * anc[a];
        }
    }
    out
}

/// Dense row-major `N×N` complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix<T, const N: usize>(pub [[Complex<T>; N]; N]);

pub type Operator2<T> = Matrix<T, 2>;
pub type Operator4<T> = Matrix<T, 4>;

impl<T: Scalar, const N: usize> Matrix<T, N> {
    pub fn zeros() -> Self {
        Matrix([[zero(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for k in 0..N {
            m.0[k][k] = one();
        }
        m
    }

    pub fn diag(d: [Complex<T>; N]) -> Self {
        let mut m = Self::zeros();
        for (k, dk) in d.into_iter().enumerate() {
            m.0[k][k] = dk;
        }
        m
    }

    pub fn entry(&self, r: usize, col: usize) -> Complex<T> {
        self.0[r][col]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for col in 0..N {
                m.0[col][r] = self.0[r][col].conj();
            }
        }
        m
    }

    pub fn scale(&self, k: Complex<T>) -> Self {
        Matrix(self.0.map(|row| row.map(|z| z * k)))
    }

    pub fn trace(&self) -> Complex<T> {
        (0..N).fold(zero(), |acc, k| acc + self.0[k][k])
    }

    pub fn apply(&self, v: &Ket<T, N>) -> Ket<T, N> {
        let mut out = Ket::zeros();
        for r in 0..N {
            out.0[r] = (0..N).fold(zero(), |acc, col| acc + self.0[r][col] * v.0[col]);
        }
        out
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &Ket<T, N>, v: &Ket<T, N>) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for col in 0..N {
                m.0[r][col] = u.0[r] * v.0[col].conj();
            }
        }
        m
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for r in 0..N {
            for col in 0..N {
                m = m.max((self.0[r][col] - other.0[r][col]).norm());
            }
        }
        m
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Self::identity()) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|row| row.iter()).all(complex_is_finite)
    }
}

impl<T: Scalar> Operator2<T> {
    pub fn new(entries: [[Complex<T>; 2]; 2]) -> Self {
        Matrix(entries)
    }

    pub fn pauli_x() -> Self {
        Matrix([[zero(), one()], [one(), zero()]])
    }

    pub fn pauli_y() -> Self {
        Matrix([[zero(), c(T::zero(), -T::one())], [c(T::zero(), T::one()), zero()]])
    }

    pub fn pauli_z() -> Self {
        Matrix::diag([one(), -one::<T>()])
    }

    pub fn determinant(&self) -> Complex<T> {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

impl<T: Scalar, const N: usize> Mul for Matrix<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for col in 0..N {
                m.0[r][col] = (0..N).fold(zero(), |acc, k| acc + self.0[r][k] * rhs.0[k][col]);
            }
        }
        m
    }
}

impl<T: Scalar, const N: usize> Mul<Ket<T, N>> for Matrix<T, N> {
    type Output = Ket<T, N>;
    fn mul(self, rhs: Ket<T, N>) -> Ket<T, N> {
        self.apply(&rhs)
    }
}

impl<T: Scalar, const N: usize> Add for Matrix<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for r in 0..N {
            for col in 0..N {
                m.0[r][col] = m.0[r][col] + rhs.0[r][col];
            }
        }
        m
    }
}

impl<T: Scalar, const N: usize> Sub for Matrix<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for r in 0..N {
            for col in 0..N {
                m.0[r][col] = m.0[r][col] - rhs.0[r][col];
            }
        }
        m
    }
}

impl<T: Scalar, const N: usize> Neg for Matrix<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Matrix(self.0.map(|row| row.map(|z| -z)))
    }
}

/// `exp(G)` for an arbitrary complex 2×2 matrix.
///
/// Splits `G = t·I + M` with `M` traceless. Since `M² = −det(M)·I`, the
/// exponential of the traceless part is `cos(q)·I + sinc(q)·M` with
/// `q² = det(M)`; both `cos` and `sinc` are even in `q`, so the square-root
/// branch does not matter. Complex `q` (non-Hermitian generators) is fine.
pub fn mat_exp_2x2<T: Scalar>(g: &Operator2<T>) -> Operator2<T> {
    let half = T::lit(0.5);
    let t = (g.0[0][0] + g.0[1][1]) * half;
    let traceless = *g - Operator2::identity().scale(t);
    let q2 = traceless.determinant();
    let q = q2.sqrt();
    let (cos_q, sinc_q) = if q.norm() < T::lit(1e-3) {
        // Taylor tails are below 1e-21 at this radius.
        let q4 = q2 * q2;
        (
            one::<T>() - q2 * half + q4 * T::lit(1.0 / 24.0),
            one::<T>() - q2 * T::lit(1.0 / 6.0) + q4 * T::lit(1.0 / 120.0),
        )
    } else {
        (q.cos(), q.sin() / q)
    };
    let scalar = t.exp();
    (Operator2::identity().scale(cos_q) + traceless.scale(sinc_q)).scale(scalar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    type C = Complex<f64>;

    fn taylor_exp(g: &Operator2<f64>, terms: usize) -> Operator2<f64> {
        let mut sum = Operator2::identity();
        let mut term = Operator2::identity();
        for k in 1..terms {
            term = (term * *g).scale(C::new(1.0 / k as f64, 0.0));
            sum = sum + term;
        }
        sum
    }

    #[test]
    fn tensor_of_basis_and_superpositions() {
        let k0 = Vec2::<f64>::basis(0);
        let k1 = Vec2::<f64>::basis(1);
        assert_eq!(tensor(&k0, &k0), Vec4::basis(0));
        assert_eq!(tensor(&k1, &k1), Vec4::basis(3));
        let plus = Vec2::from_real([FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let minus = Vec2::from_real([FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
        let want = Vec4::from_real([0.5, -0.5, 0.5, -0.5]);
        assert!(tensor(&plus, &minus).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn inner_conjugates_the_bra() {
        let k0 = Vec2::<f64>::basis(0);
        let k1 = Vec2::<f64>::basis(1);
        assert_eq!(inner(&k0, &k1), C::new(0.0, 0.0));
        assert_eq!(inner(&k0, &k0), C::new(1.0, 0.0));
        let bra = Vec2::from_real([FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
        let ket = Vec2::new([C::new(FRAC_1_SQRT_2, 0.0), C::new(0.0, FRAC_1_SQRT_2)]);
        // (1·1 + (−1)·i)/2
        let z = inner(&bra, &ket);
        assert_abs_diff_eq!(z.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn unit_refinement_tolerance() {
        assert!(UnitVec2::new(Vec2::from_real([1.0, 1e-5])).is_ok());
        assert!(UnitVec2::new(Vec2::from_real([1.0, 1e-4])).is_err());
        assert!(UnitVec2::new(Vec2::from_real([f64::NAN, 0.0])).is_err());
        assert!(Vec2::<f64>::zeros().normalized().is_err());
    }

    #[test]
    fn finite_complex_rejects_nan_and_inf() {
        assert!(finite_complex(1.0, 2.0).is_ok());
        assert!(finite_complex(f64::NAN, 0.0).is_err());
        assert!(finite_complex(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = mat_exp_2x2(&Operator2::<f64>::zeros());
        assert_eq!(e.max_abs_diff(&Operator2::identity()), 0.0);
    }

    #[test]
    fn exp_of_diagonal_generators() {
        let g = Operator2::diag([C::new(0.0, -PI / 2.0), C::new(0.0, PI / 2.0)]);
        let want = Operator2::diag([C::new(0.0, -1.0), C::new(0.0, 1.0)]);
        assert!(mat_exp_2x2(&g).max_abs_diff(&want) < 1e-15);

        let (a, phi) = (0.1, 0.3);
        let g = Operator2::diag([C::new(0.0, 0.0), C::new(-a, phi)]);
        let want = Operator2::diag([C::new(1.0, 0.0), C::from_polar((-a).exp(), phi)]);
        assert!(mat_exp_2x2(&g).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn exp_matches_taylor_on_a_nilpotent_and_near_nilpotent_input() {
        let n = Operator2::new([[C::new(0.0, 0.0), C::new(1.0, 0.0)], [C::new(0.0, 0.0); 2]]);
        let want = Operator2::new([
            [C::new(1.0, 0.0), C::new(1.0, 0.0)],
            [C::new(0.0, 0.0), C::new(1.0, 0.0)],
        ]);
        assert!(mat_exp_2x2(&n).max_abs_diff(&want) < 1e-15);

        let g = Operator2::new([
            [C::new(1e-5, 2e-5), C::new(0.3, -0.1)],
            [C::new(1e-9, 0.0), C::new(-0.2, 0.05)],
        ]);
        assert!(mat_exp_2x2(&g).max_abs_diff(&taylor_exp(&g, 30)) < 1e-14);
    }

    #[test]
    fn single_precision_exponential() {
        type C32 = Complex<f32>;
        let g = Operator2::<f32>::pauli_x().scale(C32::new(0.0, -std::f32::consts::FRAC_PI_2));
        let want = Operator2::pauli_x().scale(C32::new(0.0, -1.0));
        assert!(mat_exp_2x2(&g).max_abs_diff(&want) < 1e-6);
    }

    #[test]
    fn bloch_vector_of_eigenstates() {
        let x = UnitVec2::<f64>::from_bloch(PI / 2.0, 0.0).bloch_vector();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-15);
        let y = UnitVec2::<f64>::from_bloch(PI / 2.0, PI / 2.0).bloch_vector();
        assert_abs_diff_eq!(y[1], 1.0, epsilon = 1e-15);
        let z = UnitVec2::<f64>::from_bloch(PI, 0.0).bloch_vector();
        assert_abs_diff_eq!(z[2], -1.0, epsilon = 1e-15);
    }
}
