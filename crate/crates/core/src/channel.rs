//! Lossy phase shift: a relative phase `φ` accompanied by relative absorption `a`.
//!
//! The exact single-Kraus operator is `diag(1, e^{−a} e^{iφ})`; together with
//! `diag(0, √(1 − e^{−2a}))` it forms a trace-preserving channel. The
//! first-order `(1 − a)` forms are kept separately and only used to check
//! the small-absorption expansions.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gate::SystemPrep;
use crate::linalg::{Operator2, UnitVec2};
use crate::scalar::Scalar;

/// Cross phase `phi` and relative absorption `a ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAbsorbParams<T> {
    phi: T,
    a: T,
}

impl<T: Scalar> PhaseAbsorbParams<T> {
    /// Upper bound on `a` for the small-absorption entry points.
    pub fn small_absorption_limit() -> T {
        T::lit(0.5)
    }

    pub fn new(phi: T, a: T) -> Result<Self> {
        if !phi.is_finite() || !a.is_finite() {
            return Err(Error::InvalidInput("phase and absorption must be finite".into()));
        }
        if a < T::zero() {
            return Err(Error::InvalidInput(format!("absorption a = {a} must be >= 0")));
        }
        Ok(PhaseAbsorbParams { phi, a })
    }

    /// Same as [`PhaseAbsorbParams::new`] with `a ≤ 0.5` additionally enforced.
    pub fn small(phi: T, a: T) -> Result<Self> {
        let p = Self::new(phi, a)?;
        if a > Self::small_absorption_limit() {
            return Err(Error::InvalidInput(format!(
                "absorption a = {a} exceeds the small-absorption limit 0.5"
            )));
        }
        Ok(p)
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn a(&self) -> T {
        self.a
    }
}

/// Hermitian, unit-trace 2×2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2<T>(Operator2<T>);

impl<T: Scalar> DensityMatrix2<T> {
    pub fn pure(psi: &UnitVec2<T>) -> Self {
        DensityMatrix2(Operator2::outer(psi.as_ket(), psi.as_ket()))
    }

    pub fn matrix(&self) -> &Operator2<T> {
        &self.0
    }

    pub fn trace(&self) -> T {
        self.0.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [T; 2] {
        hermitian_eigenvalues(&self.0)
    }

    /// `½‖self − other‖₁`.
    pub fn trace_distance(&self, other: &Self) -> T {
        let [l0, l1] = hermitian_eigenvalues(&(self.0 - other.0));
        (l0.abs() + l1.abs()) / T::lit(2.0)
    }
}

fn hermitian_eigenvalues<T: Scalar>(m: &Operator2<T>) -> [T; 2] {
    let two = T::lit(2.0);
    let (d0, d1) = (m.0[0][0].re, m.0[1][1].re);
    let mid = (d0 + d1) / two;
    let half_gap = ((d0 - d1) / two).hypot(m.0[0][1].norm());
    [mid - half_gap, mid + half_gap]
}

/// The two Kraus operators of the lossy phase channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausPair<T> {
    pub k0: Operator2<T>,
    pub k1: Operator2<T>,
}

impl<T: Scalar> KrausPair<T> {
    /// `K0†K0 + K1†K1`.
    pub fn completeness(&self) -> Operator2<T> {
        self.k0.adjoint() * self.k0 + self.k1.adjoint() * self.k1
    }
}

/// Ancilla-less application of the lossy phase gate to the system qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineResult<T> {
    pub state: UnitVec2<T>,
    /// `cos²(θ/2) + e^{−2a} sin²(θ/2)`.
    pub p_n: T,
    /// Exact polar shift of the renormalized state.
    pub delta_theta: T,
}

/// `diag(1, e^{−a} e^{iφ})`.
pub fn nonunitary_rz<T: Scalar>(params: &PhaseAbsorbParams<T>) -> Operator2<T> {
    Operator2::diag([
        Complex::new(T::one(), T::zero()),
        Complex::from_polar((-params.a).exp(), params.phi),
    ])
}

/// `diag(e^{−iφ/2}, e^{−a} e^{iφ/2})`: the centered form, equal to
/// [`nonunitary_rz`] times the global phase `e^{−iφ/2}`.
pub fn nonunitary_rz_centered<T: Scalar>(params: &PhaseAbsorbParams<T>) -> Operator2<T> {
    let h = params.phi / T::lit(2.0);
    Operator2::diag([
        Complex::from_polar(T::one(), -h),
        Complex::from_polar((-params.a).exp(), h),
    ])
}

/// First-order operator `diag(1, (1 − a) e^{iφ})`.
pub fn nonunitary_rz_first_order<T: Scalar>(params: &PhaseAbsorbParams<T>) -> Operator2<T> {
    Operator2::diag([
        Complex::new(T::one(), T::zero()),
        Complex::from_polar(T::one() - params.a, params.phi),
    ])
}

/// `K0 = nonunitary_rz(params)`, `K1 = diag(0, √(1 − e^{−2a}))`.
pub fn kraus_pair<T: Scalar>(params: &PhaseAbsorbParams<T>) -> KrausPair<T> {
    // 1 − e^{−2a} via exp_m1 keeps full relative precision at tiny a.
    let loss = -(-(params.a + params.a)).exp_m1();
    KrausPair {
        k0: nonunitary_rz(params),
        k1: Operator2::diag([
            Complex::new(T::zero(), T::zero()),
            Complex::new(loss.max(T::zero()).sqrt(), T::zero()),
        ]),
    }
}

/// `ρ = K0|ψ⟩⟨ψ|K0† + K1|ψ⟩⟨ψ|K1†`, renormalized by its trace.
pub fn exact_channel_output<T: Scalar>(params: &PhaseAbsorbParams<T>, psi: &UnitVec2<T>) -> DensityMatrix2<T> {
    let kp = kraus_pair(params);
    let rho_in = Operator2::outer(psi.as_ket(), psi.as_ket());
    let rho = kp.k0 * rho_in * kp.k0.adjoint() + kp.k1 * rho_in * kp.k1.adjoint();
    let tr = rho.trace().re;
    if tr != T::one() && tr > T::zero() {
        DensityMatrix2(rho.scale(Complex::new(tr.recip(), T::zero())))
    } else {
        DensityMatrix2(rho)
    }
}

/// Trace distance between the exact channel output and the renormalized
/// `K0`-only state; what the single-Kraus approximation discards.
pub fn single_kraus_gap<T: Scalar>(params: &PhaseAbsorbParams<T>, psi: &UnitVec2<T>) -> T {
    let exact = exact_channel_output(params, psi);
    let kept = nonunitary_rz(params).apply(psi.as_ket());
    match kept.normalized() {
        Ok(state) => exact.trace_distance(&DensityMatrix2::pure(&state)),
        // K0 annihilates ψ only if a = ∞ on |1⟩; nothing is kept.
        Err(_) => T::one(),
    }
}

/// Ancilla-less baseline: renormalized `K0|ψ⟩`, its probability and polar shift.
pub fn baseline_direct<T: Scalar>(params: &PhaseAbsorbParams<T>, prep: &SystemPrep<T>) -> BaselineResult<T> {
    let (s, c) = (prep.theta() / T::lit(2.0)).sin_cos();
    let damp = (-params.a).exp();
    let p_n = c * c + damp * damp * s * s;
    let state = nonunitary_rz(params)
        .apply(prep.state().as_ket())
        .normalized()
        .expect("K0 keeps the |0> amplitude or a damped |1> amplitude");
    // 2·atan(e^{−a} tan(θ/2)) written with atan2 so θ = π maps to Δθ = 0.
    let delta_theta = T::lit(2.0) * (damp * s).atan2(c) - prep.theta();
    BaselineResult {
        state,
        p_n,
        delta_theta,
    }
}

/// First-order `Δθ ≈ −a sin θ`.
pub fn delta_theta_first_order<T: Scalar>(a: T, theta: T) -> T {
    -a * theta.sin()
}

/// First-order `p_N ≈ 1 − 2a sin²(θ/2)`.
pub fn baseline_probability_first_order<T: Scalar>(a: T, theta: T) -> T {
    let s = (theta / T::lit(2.0)).sin();
    T::one() - T::lit(2.0) * a * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vec2;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    type C = Complex<f64>;

    fn params(phi: f64, a: f64) -> PhaseAbsorbParams<f64> {
        PhaseAbsorbParams::new(phi, a).unwrap()
    }

    #[test]
    fn nonunitary_rz_examples() {
        assert_eq!(nonunitary_rz(&params(0.0, 0.0)), Operator2::identity());
        let flip = nonunitary_rz(&params(PI, 0.0));
        assert!(flip.max_abs_diff(&Operator2::pauli_z()) < 1e-15);
        let m = nonunitary_rz(&params(0.3, 0.1));
        assert_abs_diff_eq!(m.entry(1, 1).norm(), 0.904_837_418_035_959_6, epsilon = 1e-15);
        assert_abs_diff_eq!(m.entry(1, 1).arg(), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn centered_form_differs_by_global_phase() {
        let p = params(0.7, 0.2);
        let want = nonunitary_rz(&p).scale(C::from_polar(1.0, -0.35));
        assert!(nonunitary_rz_centered(&p).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn kraus_examples() {
        let kp = kraus_pair(&params(0.4, 0.0));
        assert_eq!(kp.k1, Operator2::zeros());
        assert!(kp.k0.is_unitary(1e-15));

        let kp = kraus_pair(&params(0.0, 0.01));
        assert!(kp.completeness().max_abs_diff(&Operator2::identity()) <= 1e-15);

        let kp = kraus_pair(&params(0.2, 0.1));
        let want = (1.0 - (-0.2_f64).exp()).sqrt();
        assert_abs_diff_eq!(kp.k1.entry(1, 1).re, want, epsilon = 1e-15);
        assert_abs_diff_eq!(kp.k1.entry(1, 1).re, 0.425_757_262_9, epsilon = 1e-9);
    }

    #[test]
    fn parameter_validation() {
        assert!(PhaseAbsorbParams::new(0.0, -1e-3).is_err());
        assert!(PhaseAbsorbParams::new(f64::INFINITY, 0.0).is_err());
        assert!(PhaseAbsorbParams::new(0.0, 5.0).is_ok());
        assert!(PhaseAbsorbParams::small(0.0, 0.6).is_err());
        assert!(PhaseAbsorbParams::small(0.0, 0.5).is_ok());
    }

    #[test]
    fn channel_output_examples() {
        let zero = UnitVec2::basis(0);
        for (phi, a) in [(0.0, 0.0), (1.0, 0.3), (-2.0, 4.0)] {
            let rho = exact_channel_output(&params(phi, a), &zero);
            assert!(rho.matrix().max_abs_diff(&DensityMatrix2::pure(&zero).matrix().clone()) < 1e-15);
        }

        let psi = UnitVec2::from_bloch(1.2, 0.4);
        let p = params(0.9, 0.0);
        let rotated = nonunitary_rz(&p).apply(psi.as_ket()).normalized().unwrap();
        let rho = exact_channel_output(&p, &psi);
        assert!(rho.matrix().max_abs_diff(DensityMatrix2::pure(&rotated).matrix()) < 1e-15);

        // (|0⟩+|1⟩)/√2, a = 0.1, φ = 0: ρ = ½[[1, e^{−a}], [e^{−a}, e^{−2a} + (1 − e^{−2a})]]
        let plus = UnitVec2::new(Vec2::from_real([FRAC_1_SQRT_2, FRAC_1_SQRT_2])).unwrap();
        let rho = exact_channel_output(&params(0.0, 0.1), &plus);
        let e = (-0.1_f64).exp();
        let want = Operator2::new([
            [C::new(0.5, 0.0), C::new(0.5 * e, 0.0)],
            [C::new(0.5 * e, 0.0), C::new(0.5, 0.0)],
        ]);
        assert!(rho.matrix().max_abs_diff(&want) < 1e-15);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn single_kraus_gap_examples() {
        let plus = UnitVec2::from_bloch(PI / 2.0, 0.0);
        assert!(single_kraus_gap(&params(0.3, 0.0), &plus) < 1e-15);
        assert!(single_kraus_gap(&params(0.3, 0.2), &UnitVec2::basis(0)) < 1e-16);
        let ratio = single_kraus_gap(&params(0.0, 1e-2), &plus) / single_kraus_gap(&params(0.0, 1e-3), &plus);
        assert!((ratio - 10.0).abs() <= 1.5, "ratio {ratio}");
    }

    #[test]
    fn baseline_examples() {
        let prep = SystemPrep::new(PI / 2.0, 0.0).unwrap();
        let b = baseline_direct(&params(0.2, 0.0), &prep);
        assert!(b.delta_theta.abs() < 1e-15);
        assert_abs_diff_eq!(b.p_n, 1.0, epsilon = 1e-15);

        let b = baseline_direct(&params(0.0, 0.01), &prep);
        let want = 2.0 * (-0.01_f64).exp().atan() - PI / 2.0;
        assert_abs_diff_eq!(b.delta_theta, want, epsilon = 1e-15);
        assert_abs_diff_eq!(b.delta_theta, -0.01, epsilon = 1e-5);
        assert_abs_diff_eq!(b.p_n, 0.5 + 0.5 * (-0.02_f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(b.p_n, 0.990_099, epsilon = 1e-6);
        assert_abs_diff_eq!(baseline_probability_first_order(0.01, PI / 2.0), 0.99, epsilon = 1e-15);

        // Renormalized state sits at polar angle θ + Δθ.
        let want = UnitVec2::from_bloch(PI / 2.0 + b.delta_theta, 0.0);
        assert_abs_diff_eq!(b.state.fidelity(&want), 1.0, epsilon = 1e-14);

        let at_pi = baseline_direct(&params(0.0, 0.3), &SystemPrep::new(PI, 0.0).unwrap());
        assert!(at_pi.delta_theta.abs() < 1e-12);
        assert!(at_pi.delta_theta.is_finite());
    }
}
