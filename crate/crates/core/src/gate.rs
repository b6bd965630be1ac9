//! The modular-value controlled gate.
//!
//! A system qubit `|ψ⟩` controls a single-qubit operation `N` on an ancilla
//! prepared in `|i⟩`. After the joint gate `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ N` the
//! ancilla is projected onto `|f⟩`, and only then is the system kept. The
//! surviving system state is
//!
//! ```text
//! |ψ̃_f⟩ = ⟨f|i⟩ [cos(θ/2)|0⟩ + N_m e^{iξ} sin(θ/2)|1⟩],   N_m = ⟨f|N|i⟩ / ⟨f|i⟩
//! ```
//!
//! which is a y-rotation by `−θ_m` and a z-rotation by `Ω_m = arg N_m`. All
//! state comparisons are up to a global phase.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{mat_exp_2x2, tensor, Operator2, Operator4, UnitVec2, Vec2};
use crate::scalar::{principal_angle, Scalar};

/// Polar/azimuthal preparation `cos(θ/2)|0⟩ + e^{iξ} sin(θ/2)|1⟩` of the system qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemPrep<T> {
    theta: T,
    xi: T,
}

impl<T: Scalar> SystemPrep<T> {
    /// `theta` must lie in `[0, π]`; `xi` is wrapped onto `(−π, π]`.
    pub fn new(theta: T, xi: T) -> Result<Self> {
        if !theta.is_finite() || !xi.is_finite() {
            return Err(Error::InvalidInput("system angles must be finite".into()));
        }
        if theta < T::zero() || theta > T::PI() {
            return Err(Error::InvalidInput(format!(
                "polar angle theta = {theta} outside [0, pi]"
            )));
        }
        Ok(SystemPrep {
            theta,
            xi: principal_angle(xi),
        })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn xi(&self) -> T {
        self.xi
    }

    pub fn state(&self) -> UnitVec2<T> {
        UnitVec2::from_bloch(self.theta, self.xi)
    }
}

/// Ancilla preselection `|i⟩` and postselection `|f⟩`, with `⟨f|i⟩` cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionPair<T> {
    pre: UnitVec2<T>,
    post: UnitVec2<T>,
    overlap: Complex<T>,
}

impl<T: Scalar> SelectionPair<T> {
    pub fn new(pre: UnitVec2<T>, post: UnitVec2<T>) -> Self {
        let overlap = post.inner(&pre);
        SelectionPair { pre, post, overlap }
    }

    pub fn pre(&self) -> &UnitVec2<T> {
        &self.pre
    }

    pub fn post(&self) -> &UnitVec2<T> {
        &self.post
    }

    /// `⟨f|i⟩`.
    pub fn overlap(&self) -> Complex<T> {
        self.overlap
    }

    pub fn is_orthogonal(&self) -> bool {
        self.overlap.norm() <= T::overlap_floor()
    }
}

/// `N_m = |N_m| e^{iΩ_m}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularValue<T> {
    pub value: Complex<T>,
    pub magnitude: T,
    /// Principal argument in `(−π, π]`.
    pub omega_m: T,
}

impl<T: Scalar> ModularValue<T> {
    pub fn from_value(value: Complex<T>) -> Self {
        let omega = if value.norm() == T::zero() {
            T::zero()
        } else {
            principal_angle(value.arg())
        };
        ModularValue {
            value,
            magnitude: value.norm(),
            omega_m: omega,
        }
    }
}

/// Modular value, or the marker that `|f⟩ ⟂ |i⟩` left it undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modular<T> {
    Value(ModularValue<T>),
    OrthogonalSelection,
}

impl<T: Scalar> Modular<T> {
    pub fn value(&self) -> Option<&ModularValue<T>> {
        match self {
            Modular::Value(m) => Some(m),
            Modular::OrthogonalSelection => None,
        }
    }
}

/// Everything the gate produces for one (prep, selection, N) instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateOutcome<T> {
    /// `⟨f|N_{S,A}(|ψ⟩⊗|i⟩)`, contracted over the ancilla.
    pub unnormalized_final: Vec2<T>,
    pub success_probability: T,
    /// Present only when the success probability exceeds [`Scalar::probability_floor`].
    pub final_state: Option<UnitVec2<T>>,
    pub modular: Modular<T>,
    /// `θ_m`, defined together with the modular value.
    pub theta_m: Option<T>,
    /// `Ω_m`, defined together with the modular value.
    pub omega_m: Option<T>,
}

impl<T: Scalar> GateOutcome<T> {
    pub fn normalized(&self) -> Result<&UnitVec2<T>> {
        self.final_state.as_ref().ok_or(Error::ZeroProbability {
            probability: self.success_probability.to_f64_lossy(),
        })
    }
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ N` with the system qubit as control (major index).
pub fn controlled_gate<T: Scalar>(n: &Operator2<T>) -> Operator4<T> {
    let mut out = Operator4::identity();
    for r in 0..2 {
        for col in 0..2 {
            out.0[2 + r][2 + col] = n.0[r][col];
        }
    }
    out
}

/// `exp(−i·g·O)`; `g` may be complex, in which case the result is nonunitary.
pub fn generator_gate<T: Scalar>(o: &Operator2<T>, g: Complex<T>) -> Operator2<T> {
    let minus_i = Complex::new(T::zero(), -T::one());
    mat_exp_2x2(&o.scale(minus_i * g))
}

/// `⟨f|N|i⟩ / ⟨f|i⟩`.
pub fn modular_value<T: Scalar>(n: &Operator2<T>, sel: &SelectionPair<T>) -> Result<ModularValue<T>> {
    if sel.is_orthogonal() {
        return Err(Error::OrthogonalSelection {
            overlap: sel.overlap().norm().to_f64_lossy(),
        });
    }
    let num = sel.post().as_ket().inner(&n.apply(sel.pre().as_ket()));
    Ok(ModularValue::from_value(num / sel.overlap()))
}

/// Azimuthal rotation `θ_m` induced by a modular value of magnitude `magnitude`.
///
/// Uses `θ_m = 2·atan2((1−|N_m|) sin(θ/2) cos(θ/2), cos²(θ/2) + |N_m| sin²(θ/2))`,
/// which satisfies `tan((θ−θ_m)/2) = |N_m| tan(θ/2)` on `(0, π)` and stays
/// finite at `θ = π`. The result lies in `[−π, π]`.
pub fn theta_m<T: Scalar>(magnitude: T, theta: T) -> T {
    let half = theta / T::lit(2.0);
    let (s, c) = half.sin_cos();
    let y = (T::one() - magnitude) * s * c;
    let x = c * c + magnitude * s * s;
    T::lit(2.0) * y.atan2(x)
}

/// Runs the gate and postselection without failing on zero probability.
pub fn postselect<T: Scalar>(prep: &SystemPrep<T>, sel: &SelectionPair<T>, n: &Operator2<T>) -> GateOutcome<T> {
    let joint = tensor(prep.state().as_ket(), sel.pre().as_ket());
    let evolved = controlled_gate(n).apply(&joint);
    let f = sel.post();
    let mut unnormalized = Vec2::zeros();
    for s in 0..2 {
        unnormalized.0[s] = f[0].conj() * evolved[2 * s] + f[1].conj() * evolved[2 * s + 1];
    }
    let p = unnormalized.norm_sqr();
    let final_state = if p > T::probability_floor() {
        unnormalized.normalized().ok()
    } else {
        None
    };
    let modular = match modular_value(n, sel) {
        Ok(m) => Modular::Value(m),
        Err(_) => Modular::OrthogonalSelection,
    };
    let (theta_m_val, omega_m) = match &modular {
        Modular::Value(m) => (Some(theta_m(m.magnitude, prep.theta())), Some(m.omega_m)),
        Modular::OrthogonalSelection => (None, None),
    };
    GateOutcome {
        unnormalized_final: unnormalized,
        success_probability: p,
        final_state,
        modular,
        theta_m: theta_m_val,
        omega_m,
    }
}

/// Runs the gate and postselection; fails with `ZeroProbability` when nothing survives.
pub fn apply_and_postselect<T: Scalar>(
    prep: &SystemPrep<T>,
    sel: &SelectionPair<T>,
    n: &Operator2<T>,
) -> Result<GateOutcome<T>> {
    let out = postselect(prep, sel, n);
    out.normalized()?;
    Ok(out)
}

/// `|⟨f|i⟩|² [cos²(θ/2) + |N_m|² sin²(θ/2)]`.
pub fn success_probability_closed_form<T: Scalar>(
    prep: &SystemPrep<T>,
    sel: &SelectionPair<T>,
    m: &ModularValue<T>,
) -> T {
    let (s, c) = (prep.theta() / T::lit(2.0)).sin_cos();
    sel.overlap().norm_sqr() * (c * c + m.magnitude * m.magnitude * s * s)
}

/// `R_z(β) = diag(e^{−iβ/2}, e^{iβ/2})`.
pub fn rz<T: Scalar>(beta: T) -> Operator2<T> {
    let h = beta / T::lit(2.0);
    Operator2::diag([Complex::from_polar(T::one(), -h), Complex::from_polar(T::one(), h)])
}

/// `R_y(β) = [[cos(β/2), −sin(β/2)], [sin(β/2), cos(β/2)]]`.
pub fn ry<T: Scalar>(beta: T) -> Operator2<T> {
    let (s, c) = (beta / T::lit(2.0)).sin_cos();
    let re = |x: T| Complex::new(x, T::zero());
    Operator2::new([[re(c), re(-s)], [re(s), re(c)]])
}

/// Deterministic single-qubit route to the postselected state.
///
/// Returns `R_z(Ω_m) · [R_z(ξ) R_y(−θ_m) R_z(−ξ)] |ψ⟩`: the polar rotation is
/// taken about the equatorial axis orthogonal to the state's own azimuth `ξ`,
/// so that the output equals the gate's `final_state` for every `ξ`. At
/// `ξ = 0` this is exactly `R_z(Ω_m) R_y(−θ_m) |ψ⟩`.
pub fn equivalent_local_rotations<T: Scalar>(prep: &SystemPrep<T>, m: &ModularValue<T>) -> UnitVec2<T> {
    let tm = theta_m(m.magnitude, prep.theta());
    let xi = prep.xi();
    let u = rz(m.omega_m) * rz(xi) * ry(-tm) * rz(-xi);
    UnitVec2::new(u.apply(prep.state().as_ket())).expect("product of unitaries preserves the norm")
}

/// The literal `R_z(Ω_m) R_y(−θ_m) |ψ⟩`, valid as a gate equivalent when `ξ ∈ {0, π}`.
pub fn yz_rotations<T: Scalar>(prep: &SystemPrep<T>, m: &ModularValue<T>) -> UnitVec2<T> {
    let tm = theta_m(m.magnitude, prep.theta());
    let u = rz(m.omega_m) * ry(-tm);
    UnitVec2::new(u.apply(prep.state().as_ket())).expect("product of unitaries preserves the norm")
}
