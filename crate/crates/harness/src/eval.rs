//! Single-shot gate evaluation.

use std::io::Write;

use modgate_core::gate::{postselect, GateOutcome, Modular};
use modgate_core::xpm::{applicable_regime, regime_report, RegimeId, RegimeReport, RegimeSpec};
use modgate_core::Error;
use serde_json::{Map, Value};

use crate::config::{GateInputs, OutputFormat, RegimeChoice};
use crate::error::Result;
use crate::sweep::fmt_num;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Text(String),
    Count(u64),
    Num(Option<f64>),
}

impl Field {
    fn text(&self) -> String {
        match self {
            Field::Text(s) => s.clone(),
            Field::Count(n) => n.to_string(),
            Field::Num(x) => x.map(fmt_num).unwrap_or_default(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Text(s) => Value::String(s.clone()),
            Field::Count(n) => Value::from(*n),
            Field::Num(x) => x
                .and_then(serde_json::Number::from_f64)
                .map(Value::Number)
                .unwrap_or(Value::Null),
        }
    }
}

/// Exact outcome plus the regime comparison, when one applies.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub scenario: &'static str,
    pub outcome: GateOutcome<f64>,
    pub regime: Option<(RegimeId, RegimeReport<f64>)>,
}

/// Runs the gate; fails on orthogonal selection or zero success probability.
pub fn run_eval(inputs: &GateInputs) -> Result<EvalRecord> {
    let outcome = postselect(&inputs.prep, &inputs.selection, &inputs.n);
    if let Modular::OrthogonalSelection = outcome.modular {
        return Err(Error::OrthogonalSelection {
            overlap: inputs.selection.overlap().norm(),
        }
        .into());
    }
    outcome.normalized()?;
    let regime = match inputs.xpm {
        None => None,
        Some(x) => {
            let (phi, a, angle) = (x.params.phi(), x.params.a(), x.family.angle());
            let id = match inputs.regime {
                RegimeChoice::Off => None,
                RegimeChoice::Fixed(id) => Some(id),
                RegimeChoice::Auto => applicable_regime(x.family.kind(), phi, a, angle),
            };
            match id {
                Some(id) => {
                    if id.family_kind() != x.family.kind() {
                        return Err(Error::InvalidInput(format!(
                            "regime {id} belongs to the {} family",
                            id.family_kind().name()
                        ))
                        .into());
                    }
                    Some((id, regime_report(&RegimeSpec::new(id, phi, a, angle), &x.alpha)?))
                }
                None => None,
            }
        }
    };
    Ok(EvalRecord {
        scenario: inputs.scenario.name(),
        outcome,
        regime,
    })
}

impl EvalRecord {
    pub fn fields(&self) -> Vec<(&'static str, Field)> {
        let o = &self.outcome;
        let m = o.modular.value();
        let state = o.final_state.as_ref();
        let amp = |k: usize, im: bool| Field::Num(state.map(|s| if im { s[k].im } else { s[k].re }));
        let mut out = vec![
            ("scenario", Field::Text(self.scenario.to_string())),
            ("nm_re", Field::Num(m.map(|m| m.value.re))),
            ("nm_im", Field::Num(m.map(|m| m.value.im))),
            ("nm_abs", Field::Num(m.map(|m| m.magnitude))),
            ("nm_arg", Field::Num(m.map(|m| m.omega_m))),
            ("p", Field::Num(Some(o.success_probability))),
            ("theta_m", Field::Num(o.theta_m)),
            ("omega_m", Field::Num(o.omega_m)),
            ("final_0_re", amp(0, false)),
            ("final_0_im", amp(0, true)),
            ("final_1_re", amp(1, false)),
            ("final_1_im", amp(1, true)),
        ];
        let (id, r) = match &self.regime {
            Some((id, r)) => (Some(id.name().to_string()), Some(r)),
            None => (None, None),
        };
        out.extend([
            ("regime", Field::Text(id.unwrap_or_default())),
            ("approx_rm_abs", Field::Num(r.map(|r| r.approx_rm.norm()))),
            ("approx_rm_arg", Field::Num(r.map(|r| r.approx_rm.arg()))),
            ("p_approx", Field::Num(r.map(|r| r.p_approx))),
            ("mag_rel_err", Field::Num(r.map(|r| r.mag_rel_err))),
            ("phase_diff", Field::Num(r.map(|r| r.phase_diff))),
            ("amplification", Field::Num(r.and_then(|r| r.amplification))),
            ("effective_absorption", Field::Num(r.map(|r| r.effective_absorption))),
        ]);
        out
    }

    /// Writes the record as `key = value` lines, or as csv / json-lines when a format is given.
    pub fn write<W: Write>(&self, format: Option<OutputFormat>, out: W) -> Result<()> {
        write_record(&self.fields(), format, out)
    }
}

/// Writes one keyed record as `key = value` lines, or as csv / json-lines when a format is given.
pub fn write_record<W: Write>(
    fields: &[(&'static str, Field)],
    format: Option<OutputFormat>,
    mut out: W,
) -> Result<()> {
    match format {
        None => {
            for (k, v) in fields {
                writeln!(out, "{k} = {}", v.text())?;
            }
        }
        Some(OutputFormat::Csv) => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(fields.iter().map(|(k, _)| *k))?;
            w.write_record(fields.iter().map(|(_, v)| v.text()))?;
            w.flush()?;
        }
        Some(OutputFormat::JsonLines) => {
            let map: Map<String, Value> = fields.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
            serde_json::to_writer(&mut out, &Value::Object(map))?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{GateArgs, Scenario};
    use crate::error::exit;

    fn eval(args: GateArgs) -> Result<EvalRecord> {
        run_eval(&args.resolve()?)
    }

    #[test]
    fn identity_gate_gives_unit_modular_value() {
        let r = eval(GateArgs {
            phi: Some(0.0),
            a: Some(0.0),
            eps: Some(0.1),
            alpha: Some(0.05),
            ..Default::default()
        })
        .unwrap();
        let m = r.outcome.modular.value().unwrap();
        assert!((m.value - modgate_core::C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((r.outcome.success_probability - 0.1_f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn generic_theta_zero_keeps_ground_state() {
        let r = eval(GateArgs {
            scenario: Some(Scenario::Generic),
            theta: Some(0.0),
            g_re: Some(0.3),
            ..Default::default()
        })
        .unwrap();
        let s = r.outcome.final_state.unwrap();
        assert!((s[0].norm() - 1.0).abs() < 1e-15);
        assert!((r.outcome.success_probability - 0.1_f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn delta_absorption_dominated_magnitude() {
        let r = eval(GateArgs {
            scenario: Some(Scenario::XpmDelta),
            phi: Some(0.0),
            a: Some(1e-2),
            delta: Some(1e-3),
            alpha: Some(0.05),
            ..Default::default()
        })
        .unwrap();
        let mag = r.outcome.modular.value().unwrap().magnitude;
        assert!((mag - 10.0).abs() < 0.1, "{mag}");
        assert_eq!(r.regime.unwrap().0, RegimeId::DeltaAbsDominant);
    }

    #[test]
    fn error_exit_codes() {
        let orth = eval(GateArgs {
            eps: Some(0.0),
            phi: Some(1e-3),
            ..Default::default()
        })
        .unwrap_err();
        assert_eq!(orth.exit_code(), exit::ORTHOGONAL_SELECTION);
        // N projects out the only populated level.
        let zero = eval(GateArgs {
            scenario: Some(Scenario::Generic),
            theta: Some(std::f64::consts::PI),
            matrix: Some("0,0;0,0;0,0;1,0".into()),
            pre_theta: Some(0.0),
            post_theta: Some(std::f64::consts::PI / 2.0),
            ..Default::default()
        })
        .unwrap_err();
        assert_eq!(zero.exit_code(), exit::ZERO_PROBABILITY);
    }

    #[test]
    fn text_and_csv_output() {
        let r = eval(GateArgs::default()).unwrap();
        let mut text = Vec::new();
        r.write(None, &mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        assert!(text.starts_with("scenario = xpm-epsilon\n"));
        let mut csv = Vec::new();
        r.write(Some(OutputFormat::Csv), &mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert_eq!(csv.lines().count(), 2);
    }
}
