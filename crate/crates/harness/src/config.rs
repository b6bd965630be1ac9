//! Run configuration: scenarios, parameter grids, and the TOML config file.
//!
//! Every setting can come from a `--config` file or a flag; flags win.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use modgate_core::gate::{generator_gate, SelectionPair, SystemPrep};
use modgate_core::linalg::{finite_complex, Operator2, UnitVec2};
use modgate_core::xpm::{xpm_selection, CoherentTruncation, PostselectionFamily, PostselectionKind, RegimeId};
use modgate_core::{nonunitary_rz, PhaseAbsorbParams, C64};
use serde::Deserialize;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Arbitrary ancilla selection and generator `N = exp(−i g O)`.
    Generic,
    XpmEpsilon,
    XpmDelta,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Generic => "generic",
            Scenario::XpmEpsilon => "xpm-epsilon",
            Scenario::XpmDelta => "xpm-delta",
        }
    }

    pub fn family_kind(&self) -> PostselectionKind {
        match self {
            Scenario::XpmDelta => PostselectionKind::Delta,
            _ => PostselectionKind::Epsilon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    JsonLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(&self) -> Operator2<f64> {
        match self {
            Pauli::I => Operator2::identity(),
            Pauli::X => Operator2::pauli_x(),
            Pauli::Y => Operator2::pauli_y(),
            Pauli::Z => Operator2::pauli_z(),
        }
    }
}

/// One parameter axis of a sweep.
///
/// Text form: `0.1,0.2,0.3` (explicit list), `lin:MIN:MAX:COUNT` or
/// `log:MIN:MAX:COUNT` (log-spaced, positive endpoints).
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    List(Vec<f64>),
    Linear { min: f64, max: f64, count: usize },
    Log { min: f64, max: f64, count: usize },
}

impl GridSpec {
    pub fn single(x: f64) -> Self {
        GridSpec::List(vec![x])
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        let bad = |m: String| Err(HarnessError::Config(m));
        let out = match *self {
            GridSpec::List(ref v) => v.clone(),
            GridSpec::Linear { min, max, count } | GridSpec::Log { min, max, count } => {
                if count == 0 {
                    return bad("grid range needs count >= 1".into());
                }
                let log = matches!(self, GridSpec::Log { .. });
                if log && !(min > 0.0 && max > 0.0) {
                    return bad(format!("log range needs positive endpoints, got {min}..{max}"));
                }
                // Endpoints are reproduced exactly; interior points are interpolated.
                (0..count)
                    .map(|k| match k {
                        0 => min,
                        k if k == count - 1 => max,
                        k => {
                            let t = k as f64 / (count - 1) as f64;
                            if log {
                                min * (max / min).powf(t)
                            } else {
                                min + (max - min) * t
                            }
                        }
                    })
                    .collect()
            }
        };
        if out.is_empty() {
            return bad("grid must be nonempty".into());
        }
        if let Some(x) = out.iter().find(|x| !x.is_finite()) {
            return bad(format!("grid value {x} is not finite"));
        }
        Ok(out)
    }
}

impl FromStr for GridSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| HarnessError::Config(format!("bad number '{t}' in grid '{s}': {e}")))
        };
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("lin:").or_else(|| s.strip_prefix("log:")) {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(HarnessError::Config(format!("range '{s}' must be KIND:MIN:MAX:COUNT")));
            }
            let count = parts[2]
                .trim()
                .parse::<usize>()
                .map_err(|e| HarnessError::Config(format!("bad count in '{s}': {e}")))?;
            let (min, max) = (num(parts[0])?, num(parts[1])?);
            return Ok(if s.starts_with("log:") {
                GridSpec::Log { min, max, count }
            } else {
                GridSpec::Linear { min, max, count }
            });
        }
        let list = s.split(',').map(num).collect::<Result<Vec<_>>>()?;
        Ok(GridSpec::List(list))
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            List(Vec<f64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(GridSpec::single(x)),
            Raw::List(v) => Ok(GridSpec::List(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Scalar gate inputs shared by `eval` and `sample`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateArgs {
    #[arg(long, value_enum)]
    pub scenario: Option<Scenario>,

    /// System polar angle θ (generic scenario).
    #[arg(long)]
    pub theta: Option<f64>,
    /// System relative phase ξ (generic scenario).
    #[arg(long)]
    pub xi: Option<f64>,
    /// Ancilla preselection Bloch angles (generic scenario).
    #[arg(long)]
    pub pre_theta: Option<f64>,
    #[arg(long)]
    pub pre_phi: Option<f64>,
    /// Ancilla postselection Bloch angles (generic scenario).
    #[arg(long)]
    pub post_theta: Option<f64>,
    #[arg(long)]
    pub post_phi: Option<f64>,
    /// Generator `O` in `N = exp(−i g O)` (generic scenario).
    #[arg(long, value_enum)]
    pub op: Option<Pauli>,
    #[arg(long)]
    pub g_re: Option<f64>,
    #[arg(long)]
    pub g_im: Option<f64>,
    /// Explicit `N` as `re,im;re,im;re,im;re,im` (row major); overrides `--op`.
    #[arg(long)]
    pub matrix: Option<String>,

    /// Cross phase φ.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Relative absorption a.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Coherent amplitude |α|.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Coherent amplitude phase arg α.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_arg: Option<f64>,

    /// Regime to compare against (`auto` picks the first whose hierarchy holds).
    #[arg(long)]
    pub regime: Option<String>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),* $(,)?) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl GateArgs {
    /// `self` with every field set in `flags` replaced.
    pub fn overlay(mut self, flags: &GateArgs) -> Self {
        overlay!(self, flags; scenario, theta, xi, pre_theta, pre_phi, post_theta, post_phi,
            op, g_re, g_im, matrix, phi, a, eps, delta, alpha, alpha_arg, regime);
        self
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario.unwrap_or(Scenario::XpmEpsilon)
    }

    pub fn resolve(&self) -> Result<GateInputs> {
        let scenario = self.scenario();
        let regime = RegimeChoice::parse(self.regime.as_deref())?;
        match scenario {
            Scenario::Generic => {
                let prep = SystemPrep::new(self.theta.unwrap_or(FRAC_PI_2), self.xi.unwrap_or(0.0))?;
                let pre = UnitVec2::from_bloch(self.pre_theta.unwrap_or(FRAC_PI_2), self.pre_phi.unwrap_or(PI));
                // Default postselection: the ε = 0.1 member of the ε-family.
                let post =
                    UnitVec2::from_bloch(self.post_theta.unwrap_or(FRAC_PI_2 + 0.2), self.post_phi.unwrap_or(0.0));
                let n = match &self.matrix {
                    Some(text) => parse_matrix(text)?,
                    None => {
                        let g = finite_complex(self.g_re.unwrap_or(0.0), self.g_im.unwrap_or(0.0))?;
                        generator_gate(&self.op.unwrap_or(Pauli::Z).matrix(), g)
                    }
                };
                Ok(GateInputs {
                    scenario,
                    prep,
                    selection: SelectionPair::new(pre, post),
                    n,
                    xpm: None,
                    regime,
                })
            }
            Scenario::XpmEpsilon | Scenario::XpmDelta => {
                let params = PhaseAbsorbParams::new(self.phi.unwrap_or(0.0), self.a.unwrap_or(0.0))?;
                let angle = match scenario {
                    Scenario::XpmEpsilon => self.eps,
                    _ => self.delta,
                }
                .unwrap_or(0.1);
                let family = PostselectionFamily::new(scenario.family_kind(), angle)?;
                let alpha = CoherentTruncation::from_polar(self.alpha.unwrap_or(0.05), self.alpha_arg.unwrap_or(0.0))?;
                Ok(GateInputs {
                    scenario,
                    prep: *alpha.prep(),
                    selection: xpm_selection(&family),
                    n: nonunitary_rz(&params),
                    xpm: Some(XpmInputs { params, family, alpha }),
                    regime,
                })
            }
        }
    }
}

fn parse_matrix(text: &str) -> Result<Operator2<f64>> {
    let entries = text
        .split(';')
        .map(|pair| {
            let parts: Vec<&str> = pair.split(',').collect();
            if parts.len() != 2 {
                return Err(HarnessError::Config(format!("matrix entry '{pair}' must be 're,im'")));
            }
            let p = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| HarnessError::Config(format!("bad matrix number '{t}': {e}")))
            };
            Ok(finite_complex(p(parts[0])?, p(parts[1])?)?)
        })
        .collect::<Result<Vec<C64>>>()?;
    if entries.len() != 4 {
        return Err(HarnessError::Config(format!(
            "matrix needs 4 entries, got {}",
            entries.len()
        )));
    }
    Ok(Operator2::new([[entries[0], entries[1]], [entries[2], entries[3]]]))
}

/// Regime used for the approximation fields.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RegimeChoice {
    /// First regime of the scenario's family whose hierarchy holds at the point.
    #[default]
    Auto,
    Off,
    Fixed(RegimeId),
}

impl RegimeChoice {
    /// `auto` (or absent), `none`, or a regime name.
    pub fn parse(text: Option<&str>) -> Result<Self> {
        Ok(match text {
            None | Some("auto") => RegimeChoice::Auto,
            Some("none") => RegimeChoice::Off,
            Some(name) => RegimeChoice::Fixed(name.parse()?),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct XpmInputs {
    pub params: PhaseAbsorbParams<f64>,
    pub family: PostselectionFamily<f64>,
    pub alpha: CoherentTruncation<f64>,
}

/// Fully validated gate instance.
#[derive(Debug, Clone, Copy)]
pub struct GateInputs {
    pub scenario: Scenario,
    pub prep: SystemPrep<f64>,
    pub selection: SelectionPair<f64>,
    pub n: Operator2<f64>,
    pub xpm: Option<XpmInputs>,
    pub regime: RegimeChoice,
}

/// Sweep grids; each axis defaults to a single value.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub scenario: Option<Scenario>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<GridSpec>,
    #[arg(long)]
    pub a: Option<GridSpec>,
    /// ε or δ, depending on the scenario.
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<GridSpec>,
    #[arg(long)]
    pub alpha_abs: Option<GridSpec>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_arg: Option<GridSpec>,
    /// Regime for the approximation columns: `auto`, `none`, or a regime name.
    #[arg(long)]
    pub regime: Option<String>,
}

impl SweepArgs {
    pub fn overlay(mut self, flags: &SweepArgs) -> Self {
        overlay!(self, flags; scenario, phi, a, angle, alpha_abs, alpha_arg, regime);
        self
    }

    pub fn resolve(&self) -> Result<SweepConfig> {
        let axis = |g: &Option<GridSpec>, default: f64| g.clone().unwrap_or(GridSpec::single(default)).values();
        Ok(SweepConfig {
            scenario: self.scenario.unwrap_or(Scenario::XpmEpsilon),
            phi: axis(&self.phi, 0.0)?,
            a: axis(&self.a, 0.0)?,
            angle: axis(&self.angle, 0.1)?,
            alpha_abs: axis(&self.alpha_abs, 0.05)?,
            alpha_arg: axis(&self.alpha_arg, 0.0)?,
            regime: RegimeChoice::parse(self.regime.as_deref())?,
        })
    }
}

/// Expanded sweep grid, evaluated in lexicographic order (φ, a, angle, |α|, arg α).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub phi: Vec<f64>,
    pub a: Vec<f64>,
    pub angle: Vec<f64>,
    pub alpha_abs: Vec<f64>,
    pub alpha_arg: Vec<f64>,
    pub regime: RegimeChoice,
}

impl SweepConfig {
    pub fn len(&self) -> usize {
        self.phi.len() * self.a.len() * self.angle.len() * self.alpha_abs.len() * self.alpha_arg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &phi in &self.phi {
            for &a in &self.a {
                for &angle in &self.angle {
                    for &alpha_abs in &self.alpha_abs {
                        for &alpha_arg in &self.alpha_arg {
                            out.push(SweepPoint {
                                phi,
                                a,
                                angle,
                                alpha_abs,
                                alpha_arg,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub phi: f64,
    pub a: f64,
    pub angle: f64,
    pub alpha_abs: f64,
    pub alpha_arg: f64,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleArgs {
    /// Number of postselection attempts.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Tomography bases, any subset of `xyz`.
    #[arg(long)]
    pub bases: Option<String>,
}

impl SampleArgs {
    pub fn overlay(mut self, flags: &SampleArgs) -> Self {
        overlay!(self, flags; trials, bases);
        self
    }
}

/// Contents of a `--config` TOML file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub gate: GateArgs,
    pub sweep: SweepArgs,
    pub sample: SampleArgs,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_text_forms() {
        assert_eq!(
            "0.1, 0.2".parse::<GridSpec>().unwrap().values().unwrap(),
            vec![0.1, 0.2]
        );
        let lin = "lin:0:1:3".parse::<GridSpec>().unwrap().values().unwrap();
        assert_eq!(lin, vec![0.0, 0.5, 1.0]);
        let log = "log:1e-6:1e-4:3".parse::<GridSpec>().unwrap().values().unwrap();
        assert_eq!(log[0], 1e-6);
        assert!((log[1] - 1e-5).abs() < 1e-18);
        assert_eq!(log[2], 1e-4);
        assert!("log:0:1:3".parse::<GridSpec>().unwrap().values().is_err());
        assert!("lin:0:1:0".parse::<GridSpec>().unwrap().values().is_err());
        assert!("lin:0:1".parse::<GridSpec>().is_err());
        assert!("a,b".parse::<GridSpec>().is_err());
    }

    #[test]
    fn config_file_and_flag_overlay() {
        let cfg = ConfigFile::parse(
            r#"
            seed = 9
            format = "json-lines"
            [gate]
            scenario = "xpm-delta"
            phi = 0.0
            a = 1e-2
            delta = 1e-3
            [sweep]
            phi = "log:1e-6:1e-4:3"
            a = [1e-3]
            angle = 0.01
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.format, Some(OutputFormat::JsonLines));
        let flags = GateArgs {
            a: Some(2e-2),
            ..Default::default()
        };
        let merged = cfg.gate.clone().overlay(&flags);
        assert_eq!(merged.a, Some(2e-2));
        assert_eq!(merged.delta, Some(1e-3));
        assert_eq!(merged.scenario(), Scenario::XpmDelta);
        let sweep = cfg.sweep.resolve().unwrap();
        assert_eq!(sweep.len(), 3);
        assert_eq!(sweep.angle, vec![0.01]);
        assert!(ConfigFile::parse("bogus = 1").is_err());
    }

    #[test]
    fn generic_defaults_resolve() {
        let g = GateArgs {
            scenario: Some(Scenario::Generic),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        // Default selection reproduces the ε = 0.1 overlap −sin(0.1) up to phase.
        assert!((g.selection.overlap().norm() - 0.1_f64.sin()).abs() < 1e-12);
        assert!(g.n.max_abs_diff(&Operator2::identity()) < 1e-15);
        let m = parse_matrix("1,0;0,0;0,0;1,0").unwrap();
        assert_eq!(m, Operator2::identity());
        assert!(parse_matrix("1,0;0,0").is_err());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let bad_alpha = GateArgs {
            alpha: Some(0.5),
            ..Default::default()
        };
        assert!(bad_alpha.resolve().is_err());
        let bad_a = GateArgs {
            a: Some(-1.0),
            ..Default::default()
        };
        assert_eq!(
            bad_a.resolve().unwrap_err().exit_code(),
            crate::error::exit::INVALID_INPUT
        );
        let bad_regime = GateArgs {
            regime: Some("nope".into()),
            ..Default::default()
        };
        assert!(bad_regime.resolve().is_err());
    }
}
