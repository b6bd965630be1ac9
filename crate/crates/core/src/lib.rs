//! Exact simulation of a postselection-controlled ("modular-value") two-qubit gate.
//!
//! A system qubit conditionally drives an operation `N` on an ancilla; the
//! ancilla is pre- and postselected, and the surviving system state is fixed
//! by the modular value `⟨f|N|i⟩/⟨f|i⟩`. The crate evaluates this exactly,
//! models a lossy cross-phase gate as the conditional operation, and compares
//! the exact results with small-parameter regime approximations.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod channel;
pub mod error;
pub mod gate;
pub mod linalg;
pub mod scalar;
pub mod xpm;

pub use num_complex::Complex;

pub use channel::{
    baseline_direct, exact_channel_output, kraus_pair, nonunitary_rz, nonunitary_rz_centered, single_kraus_gap,
    BaselineResult, DensityMatrix2, KrausPair, PhaseAbsorbParams,
};
pub use error::{Error, Result};
pub use gate::{
    apply_and_postselect, controlled_gate, equivalent_local_rotations, generator_gate, modular_value, postselect,
    theta_m, GateOutcome, Modular, ModularValue, SelectionPair, SystemPrep,
};
pub use linalg::{
    inner, mat_exp_2x2, tensor, Ket, Matrix, Operator2, Operator4, UnitKet, UnitVec2, UnitVec4, Vec2, Vec4,
};
pub use scalar::{principal_angle, Scalar};
pub use xpm::{
    exact_rm, postselection_state, regime_approx, regime_report, xpm_joint_gate, xpm_preselection, CoherentTruncation,
    PostselectionFamily, PostselectionKind, RegimeId, RegimeReport, RegimeSpec,
};

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;

pub type Vec2f64 = Vec2<f64>;
pub type Vec4f64 = Vec4<f64>;
pub type UnitVec2f64 = UnitVec2<f64>;
pub type UnitVec4f64 = UnitVec4<f64>;
pub type Operator2f64 = Operator2<f64>;
pub type Operator4f64 = Operator4<f64>;
pub type SystemPrepf64 = SystemPrep<f64>;
pub type SelectionPairf64 = SelectionPair<f64>;
pub type ModularValuef64 = ModularValue<f64>;
pub type GateOutcomef64 = GateOutcome<f64>;
pub type PhaseAbsorbParamsf64 = PhaseAbsorbParams<f64>;
pub type KrausPairf64 = KrausPair<f64>;
pub type DensityMatrix2f64 = DensityMatrix2<f64>;
pub type BaselineResultf64 = BaselineResult<f64>;
pub type CoherentTruncationf64 = CoherentTruncation<f64>;
pub type PostselectionFamilyf64 = PostselectionFamily<f64>;
pub type RegimeSpecf64 = RegimeSpec<f64>;
pub type RegimeReportf64 = RegimeReport<f64>;

pub type Vec2f32 = Vec2<f32>;
pub type UnitVec2f32 = UnitVec2<f32>;
pub type Operator2f32 = Operator2<f32>;
pub type Operator4f32 = Operator4<f32>;
