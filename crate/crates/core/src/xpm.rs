//! Postselected cross phase modulation.
//!
//! A weak coherent state truncated to `{|0⟩, |1⟩}` is the system qubit; a
//! single control photon is the ancilla, preselected in `(|−⟩ − |+⟩)/√2`
//! (with `|−⟩ ↦ index 0`, `|+⟩ ↦ index 1`). The one-photon component applies
//! the lossy phase gate to the ancilla, which is then postselected on one of
//! two families:
//!
//! * ε-family: `((cos ε − sin ε)|−⟩ + (cos ε + sin ε)|+⟩)/√2`, overlap `−sin ε`;
//! * δ-family: `(|−⟩ + e^{−iδ}|+⟩)/√2`, overlap `(1 − e^{iδ})/2`.
//!
//! Five asymptotic regimes come with closed-form approximations of the
//! modular value `R_m`. They are reproduced here verbatim so that they can be
//! compared with the exact value; they are claims under test, not ground
//! truth. Measured against the exact oracle:
//!
//! * magnitudes agree with every regime formula at leading order;
//! * the lossless ε-family phase slope is `arg R_m / φ → (1 + tan ε)/(2 tan ε)`,
//!   i.e. `≈ 1/(2ε)` rather than `1/ε`;
//! * the δ-family absorption-induced phase is `≈ a/δ` rather than `2a/δ`;
//! * in the absorption-dominated ε regime the exact value is `≈ 1 − a/(2ε)`,
//!   opposite in sign to the formula's `−(1 − a/(2ε))`;
//! * in the absorption-dominated δ regime `R_m ≈ 1 + i a/δ`, so its phase
//!   sits near `π/2` rather than near `π`.
//!
//! A factor-of-two rescaling of ε and δ would reconcile the phase slopes;
//! the reports record the measured constants rather than choose a convention.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::channel::{nonunitary_rz, PhaseAbsorbParams};
use crate::error::{Error, Result};
use crate::gate::{controlled_gate, modular_value, postselect, GateOutcome, ModularValue, SelectionPair, SystemPrep};
use crate::linalg::{complex_is_finite, Operator4, UnitVec2, Vec2};
use crate::scalar::{principal_angle, Scalar};

/// Weak coherent state `|α⟩ ≈ (|0⟩ + α|1⟩)/√(1 + |α|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentTruncation<T> {
    alpha: Complex<T>,
    prep: SystemPrep<T>,
}

impl<T: Scalar> CoherentTruncation<T> {
    pub fn max_abs_alpha() -> T {
        T::lit(0.3)
    }

    /// Rejects `|α| > 0.3`, beyond which the two-level truncation is not meaningful.
    pub fn new(alpha: Complex<T>) -> Result<Self> {
        if !complex_is_finite(&alpha) {
            return Err(Error::InvalidInput("alpha must be finite".into()));
        }
        let r = alpha.norm();
        if r > Self::max_abs_alpha() {
            return Err(Error::InvalidInput(format!(
                "|alpha| = {r} exceeds the truncation limit 0.3"
            )));
        }
        let xi = if r == T::zero() { T::zero() } else { alpha.arg() };
        let prep = SystemPrep::new(T::lit(2.0) * r.atan(), xi)?;
        Ok(CoherentTruncation { alpha, prep })
    }

    pub fn from_polar(abs: T, arg: T) -> Result<Self> {
        if abs < T::zero() {
            return Err(Error::InvalidInput(format!("|alpha| = {abs} must be >= 0")));
        }
        Self::new(Complex::from_polar(abs, arg))
    }

    pub fn alpha(&self) -> Complex<T> {
        self.alpha
    }

    pub fn prep(&self) -> &SystemPrep<T> {
        &self.prep
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PostselectionKind {
    Epsilon,
    Delta,
}

impl PostselectionKind {
    pub fn name(&self) -> &'static str {
        match self {
            PostselectionKind::Epsilon => "epsilon",
            PostselectionKind::Delta => "delta",
        }
    }
}

/// One member of the ε- or δ-postselection family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostselectionFamily<T> {
    kind: PostselectionKind,
    angle: T,
}

impl<T: Scalar> PostselectionFamily<T> {
    /// `|angle| < π/2`. A zero angle is accepted; it makes the selection orthogonal.
    pub fn new(kind: PostselectionKind, angle: T) -> Result<Self> {
        if !angle.is_finite() || angle.abs() >= T::FRAC_PI_2() {
            return Err(Error::InvalidInput(format!(
                "postselection angle {angle} must satisfy |angle| < pi/2"
            )));
        }
        Ok(PostselectionFamily { kind, angle })
    }

    pub fn epsilon(angle: T) -> Result<Self> {
        Self::new(PostselectionKind::Epsilon, angle)
    }

    pub fn delta(angle: T) -> Result<Self> {
        Self::new(PostselectionKind::Delta, angle)
    }

    pub fn kind(&self) -> PostselectionKind {
        self.kind
    }

    pub fn angle(&self) -> T {
        self.angle
    }

    /// Closed-form `⟨f|i⟩`.
    pub fn overlap_closed_form(&self) -> Complex<T> {
        match self.kind {
            PostselectionKind::Epsilon => Complex::new(-self.angle.sin(), T::zero()),
            PostselectionKind::Delta => {
                let half = T::lit(0.5);
                (Complex::new(T::one(), T::zero()) - Complex::from_polar(T::one(), self.angle)) * half
            }
        }
    }
}

/// `(|−⟩ − |+⟩)/√2`.
pub fn xpm_preselection<T: Scalar>() -> UnitVec2<T> {
    let h = T::FRAC_1_SQRT_2();
    UnitVec2::new(Vec2::from_real([h, -h])).expect("unit by construction")
}

pub fn postselection_state<T: Scalar>(fam: &PostselectionFamily<T>) -> UnitVec2<T> {
    let h = T::FRAC_1_SQRT_2();
    let v = match fam.kind {
        PostselectionKind::Epsilon => {
            let (s, c) = fam.angle.sin_cos();
            Vec2::from_real([(c - s) * h, (c + s) * h])
        }
        PostselectionKind::Delta => Vec2::new([Complex::new(h, T::zero()), Complex::from_polar(h, -fam.angle)]),
    };
    UnitVec2::new(v).expect("unit by construction")
}

pub fn xpm_selection<T: Scalar>(fam: &PostselectionFamily<T>) -> SelectionPair<T> {
    SelectionPair::new(xpm_preselection(), postselection_state(fam))
}

/// Joint gate with the truncated coherent state as control.
pub fn xpm_joint_gate<T: Scalar>(params: &PhaseAbsorbParams<T>) -> Operator4<T> {
    controlled_gate(&nonunitary_rz(params))
}

/// Exact `R_m = ⟨f|R_z^{NU}|i⟩ / ⟨f|i⟩`.
pub fn exact_rm<T: Scalar>(params: &PhaseAbsorbParams<T>, fam: &PostselectionFamily<T>) -> Result<ModularValue<T>> {
    modular_value(&nonunitary_rz(params), &xpm_selection(fam))
}

/// Full gate outcome for the truncated coherent state.
pub fn xpm_outcome<T: Scalar>(
    params: &PhaseAbsorbParams<T>,
    fam: &PostselectionFamily<T>,
    alpha: &CoherentTruncation<T>,
) -> GateOutcome<T> {
    postselect(alpha.prep(), &xpm_selection(fam), &nonunitary_rz(params))
}

/// `d arg(R_m)/dφ` at `φ = 0`, by central difference on the exact value.
pub fn phase_slope<T: Scalar>(a: T, fam: &PostselectionFamily<T>) -> Result<T> {
    let h = T::lit(1e-6) * fam.angle().abs().max(a).max(T::lit(1e-6));
    let up = exact_rm(&PhaseAbsorbParams::new(h, a)?, fam)?.omega_m;
    let down = exact_rm(&PhaseAbsorbParams::new(-h, a)?, fam)?.omega_m;
    Ok(principal_angle(up - down) / (h + h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeId {
    /// `φ ≪ a ≪ |ε| ≪ 1`
    EpsDominant,
    /// `φ ≪ |ε| ≪ a ≪ 1`
    AbsDominant,
    /// `a = 0`, `φ ≪ |ε| ≪ 1`
    Lossless,
    /// `φ ≪ a ≪ |δ| ≪ 1`
    DeltaDominant,
    /// `φ ≪ |δ| ≪ a ≪ 1`
    DeltaAbsDominant,
}

impl RegimeId {
    pub const ALL: [RegimeId; 5] = [
        RegimeId::EpsDominant,
        RegimeId::AbsDominant,
        RegimeId::Lossless,
        RegimeId::DeltaDominant,
        RegimeId::DeltaAbsDominant,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RegimeId::EpsDominant => "eps-dominant",
            RegimeId::AbsDominant => "abs-dominant",
            RegimeId::Lossless => "lossless",
            RegimeId::DeltaDominant => "delta-dominant",
            RegimeId::DeltaAbsDominant => "delta-abs-dominant",
        }
    }

    pub fn family_kind(&self) -> PostselectionKind {
        match self {
            RegimeId::EpsDominant | RegimeId::AbsDominant | RegimeId::Lossless => PostselectionKind::Epsilon,
            RegimeId::DeltaDominant | RegimeId::DeltaAbsDominant => PostselectionKind::Delta,
        }
    }

    pub fn for_kind(kind: PostselectionKind) -> impl Iterator<Item = RegimeId> {
        Self::ALL.into_iter().filter(move |r| r.family_kind() == kind)
    }
}

impl fmt::Display for RegimeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegimeId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown regime '{s}'")))
    }
}

/// Minimum ratio between consecutive scales for `x ≪ y`.
pub const HIERARCHY_RATIO: f64 = 10.0;

/// A regime together with the point `(φ, a, angle)` it is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeSpec<T> {
    pub id: RegimeId,
    pub phi: T,
    pub a: T,
    /// ε or δ, depending on the regime's family.
    pub angle: T,
}

impl<T: Scalar> RegimeSpec<T> {
    pub fn new(id: RegimeId, phi: T, a: T, angle: T) -> Self {
        RegimeSpec { id, phi, a, angle }
    }

    pub fn params(&self) -> Result<PhaseAbsorbParams<T>> {
        PhaseAbsorbParams::small(self.phi, self.a)
    }

    pub fn family(&self) -> Result<PostselectionFamily<T>> {
        PostselectionFamily::new(self.id.family_kind(), self.angle)
    }

    /// Checks `angle ≠ 0` and the regime's scale ordering with ratio ≥ 10.
    pub fn check_hierarchy(&self) -> Result<()> {
        let violation = |detail: String| Error::HierarchyViolation {
            regime: self.id.name().to_string(),
            detail,
        };
        if self.angle == T::zero() {
            return Err(violation("postselection angle must be nonzero".into()));
        }
        if self.a < T::zero() {
            return Err(violation("absorption must be >= 0".into()));
        }
        let phi = self.phi.abs();
        let a = self.a;
        let ang = self.angle.abs();
        let unit = T::one();
        let chain: Vec<(&str, T, &str, T)> = match self.id {
            RegimeId::EpsDominant | RegimeId::DeltaDominant => {
                vec![("phi", phi, "a", a), ("a", a, "angle", ang), ("angle", ang, "1", unit)]
            }
            RegimeId::AbsDominant | RegimeId::DeltaAbsDominant => {
                vec![("phi", phi, "angle", ang), ("angle", ang, "a", a), ("a", a, "1", unit)]
            }
            RegimeId::Lossless => {
                if self.a != T::zero() {
                    return Err(violation(format!("absorption must be 0, got {a}")));
                }
                vec![("phi", phi, "angle", ang), ("angle", ang, "1", unit)]
            }
        };
        for (small_name, small, large_name, large) in chain {
            if !much_less(small, large) {
                return Err(violation(format!(
                    "{small_name} = {small} is not <= {large_name} / {HIERARCHY_RATIO} (= {large})"
                )));
            }
        }
        Ok(())
    }
}

fn much_less<T: Scalar>(small: T, large: T) -> bool {
    small * T::lit(HIERARCHY_RATIO) <= large * T::lit(1.0 + 1e-12)
}

/// The regime's closed-form approximation of `R_m`.
pub fn regime_approx<T: Scalar>(spec: &RegimeSpec<T>) -> Result<Complex<T>> {
    spec.check_hierarchy()?;
    let (phi, a, ang) = (spec.phi, spec.a, spec.angle);
    let two = T::lit(2.0);
    let one = T::one();
    let z = match spec.id {
        RegimeId::EpsDominant => Complex::from_polar(one - a / (two * ang), phi / ang),
        RegimeId::AbsDominant => -Complex::from_polar(one - a / (two * ang), -two * phi / a),
        RegimeId::Lossless => Complex::from_polar(one, phi / ang),
        RegimeId::DeltaDominant => Complex::from_polar((one - a / two) * (one + phi / ang), phi + two * a / ang),
        RegimeId::DeltaAbsDominant => -Complex::from_polar(a / ang, -two * ang / a),
    };
    Ok(z)
}

/// The regime's approximate success probability for `|α| = alpha_abs`.
///
/// The lossless regime has no separately stated probability; it uses the
/// ε-family leading term `ε²`.
pub fn regime_probability_approx<T: Scalar>(spec: &RegimeSpec<T>, alpha_abs: T) -> Result<T> {
    spec.check_hierarchy()?;
    let (a, ang) = (spec.a, spec.angle);
    let four = T::lit(4.0);
    let al2 = alpha_abs * alpha_abs;
    Ok(match spec.id {
        RegimeId::EpsDominant | RegimeId::Lossless => ang * ang,
        RegimeId::AbsDominant => ang * ang + a * a * al2 / four,
        RegimeId::DeltaDominant => ang * ang / four,
        RegimeId::DeltaAbsDominant => ang * ang / four * (T::one() + al2 * (a / ang) * (a / ang)),
    })
}

/// Exact-versus-approximate comparison at one regime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport<T> {
    pub exact_rm: Complex<T>,
    pub approx_rm: Complex<T>,
    /// `||exact| − |approx|| / |exact|`.
    pub mag_rel_err: T,
    /// `arg(exact) − arg(approx)` on the principal branch.
    pub phase_diff: T,
    pub p_exact: T,
    pub p_approx: T,
    /// `arg(R_m)/φ`, absent when `φ = 0`.
    pub amplification: Option<T>,
    /// `1 − |R_m|`.
    pub effective_absorption: T,
}

/// Compares the exact quantities for `alpha` against the regime formulas.
pub fn regime_report<T: Scalar>(spec: &RegimeSpec<T>, alpha: &CoherentTruncation<T>) -> Result<RegimeReport<T>> {
    let approx = regime_approx(spec)?;
    let p_approx = regime_probability_approx(spec, alpha.alpha().norm())?;
    let params = spec.params()?;
    let fam = spec.family()?;
    let exact = exact_rm(&params, &fam)?;
    let outcome = xpm_outcome(&params, &fam, alpha);
    Ok(compare(&exact, approx, outcome.success_probability, p_approx, spec.phi))
}

/// Fills the comparison fields from already computed exact and approximate values.
pub fn compare<T: Scalar>(
    exact: &ModularValue<T>,
    approx: Complex<T>,
    p_exact: T,
    p_approx: T,
    phi: T,
) -> RegimeReport<T> {
    let mag_rel_err = (exact.magnitude - approx.norm()).abs() / exact.magnitude;
    let approx_arg = if approx.norm() == T::zero() {
        T::zero()
    } else {
        approx.arg()
    };
    RegimeReport {
        exact_rm: exact.value,
        approx_rm: approx,
        mag_rel_err,
        phase_diff: principal_angle(exact.omega_m - approx_arg),
        p_exact,
        p_approx,
        amplification: amplification(exact, phi),
        effective_absorption: T::one() - exact.magnitude,
    }
}

/// `arg(R_m)/φ`, or `None` at `φ = 0`.
pub fn amplification<T: Scalar>(exact: &ModularValue<T>, phi: T) -> Option<T> {
    (phi != T::zero()).then(|| exact.omega_m / phi)
}

/// Regimes whose hierarchy admits `(φ, a, angle)` for the given family.
pub fn applicable_regime<T: Scalar>(kind: PostselectionKind, phi: T, a: T, angle: T) -> Option<RegimeId> {
    RegimeId::for_kind(kind).find(|id| RegimeSpec::new(*id, phi, a, angle).check_hierarchy().is_ok())
}
