//! Parameter sweeps with a fixed tabular schema.

use std::io::Write;

use modgate_core::gate::{generator_gate, postselect, ModularValue};
use modgate_core::xpm::{
    amplification, applicable_regime, compare, regime_approx, regime_probability_approx, xpm_outcome, xpm_selection,
    CoherentTruncation, PostselectionFamily, RegimeSpec,
};
use modgate_core::{Complex, Operator2, PhaseAbsorbParams};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::config::{OutputFormat, RegimeChoice, Scenario, SweepConfig, SweepPoint};
use crate::error::Result;

/// Output columns, in order.
pub const COLUMNS: [&str; 21] = [
    "scenario",
    "phi",
    "a",
    "angle_kind",
    "angle",
    "alpha_abs",
    "alpha_arg",
    "rm_re",
    "rm_im",
    "rm_abs",
    "rm_arg",
    "p_exact",
    "theta_m",
    "omega_m",
    "approx_rm_abs",
    "approx_rm_arg",
    "p_approx",
    "mag_rel_err",
    "phase_diff",
    "amplification",
    "effective_absorption",
];

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario: &'static str,
    pub point: SweepPoint,
    pub angle_kind: &'static str,
    pub rm: Option<ModularValue<f64>>,
    pub p_exact: f64,
    pub theta_m: Option<f64>,
    pub approx_rm: Option<Complex<f64>>,
    pub p_approx: Option<f64>,
    pub mag_rel_err: Option<f64>,
    pub phase_diff: Option<f64>,
    pub amplification: Option<f64>,
    pub effective_absorption: Option<f64>,
}

/// 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepRow {
    fn numbers(&self) -> [Option<f64>; 19] {
        let p = &self.point;
        let rm = self.rm.as_ref();
        [
            Some(p.phi),
            Some(p.a),
            Some(p.angle),
            Some(p.alpha_abs),
            Some(p.alpha_arg),
            rm.map(|m| m.value.re),
            rm.map(|m| m.value.im),
            rm.map(|m| m.magnitude),
            rm.map(|m| m.omega_m),
            Some(self.p_exact),
            self.theta_m,
            rm.map(|m| m.omega_m),
            self.approx_rm.map(|z| z.norm()),
            self.approx_rm.map(|z| if z.norm() == 0.0 { 0.0 } else { z.arg() }),
            self.p_approx,
            self.mag_rel_err,
            self.phase_diff,
            self.amplification,
            self.effective_absorption,
        ]
    }

    /// Fields as text, empty where not applicable.
    pub fn fields(&self) -> Vec<String> {
        let n = self.numbers();
        let num = |i: usize| n[i].map(fmt_num).unwrap_or_default();
        let mut out = Vec::with_capacity(COLUMNS.len());
        out.push(self.scenario.to_string());
        out.push(num(0));
        out.push(num(1));
        out.push(self.angle_kind.to_string());
        out.extend((2..19).map(num));
        out
    }

    /// JSON object keyed by column name, `null` where not applicable.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (key, field) in COLUMNS.iter().zip(self.fields()) {
            let v = match (key, field.is_empty()) {
                (_, true) => Value::Null,
                (&"scenario" | &"angle_kind", false) => Value::String(field),
                // Parsing the 17-digit text back gives the original value.
                _ => serde_json::Number::from_f64(field.parse().unwrap_or(f64::NAN))
                    .map(Value::Number)
                    .unwrap_or(Value::Null),
            };
            map.insert(key.to_string(), v);
        }
        Value::Object(map)
    }
}

/// Generic-scenario conditional operation `exp(−i (φ + i a)/2 · σ_z)`.
pub fn generic_operator(phi: f64, a: f64) -> Operator2<f64> {
    generator_gate(&Operator2::pauli_z(), Complex::new(phi / 2.0, a / 2.0))
}

/// Evaluates one grid point.
pub fn evaluate_point(scenario: Scenario, point: &SweepPoint, regime: RegimeChoice) -> Result<SweepRow> {
    let alpha = CoherentTruncation::from_polar(point.alpha_abs, point.alpha_arg)?;
    let kind = scenario.family_kind();
    let family = PostselectionFamily::new(kind, point.angle)?;
    let (outcome, xpm_params) = match scenario {
        Scenario::Generic => {
            PhaseAbsorbParams::new(point.phi, point.a)?;
            let n = generic_operator(point.phi, point.a);
            (postselect(alpha.prep(), &xpm_selection(&family), &n), None)
        }
        Scenario::XpmEpsilon | Scenario::XpmDelta => {
            let params = PhaseAbsorbParams::new(point.phi, point.a)?;
            (xpm_outcome(&params, &family, &alpha), Some(params))
        }
    };
    let rm = outcome.modular.value().copied();
    let mut row = SweepRow {
        scenario: scenario.name(),
        point: *point,
        angle_kind: kind.name(),
        rm,
        p_exact: outcome.success_probability,
        theta_m: outcome.theta_m,
        approx_rm: None,
        p_approx: None,
        mag_rel_err: None,
        phase_diff: None,
        amplification: rm.as_ref().and_then(|m| amplification(m, point.phi)),
        effective_absorption: rm.map(|m| 1.0 - m.magnitude),
    };
    let id = match (xpm_params, regime) {
        (None, _) | (_, RegimeChoice::Off) => None,
        (Some(_), RegimeChoice::Fixed(id)) => Some(id),
        (Some(_), RegimeChoice::Auto) => applicable_regime(kind, point.phi, point.a, point.angle),
    };
    if let (Some(id), Some(m)) = (id, rm.as_ref()) {
        if id.family_kind() != kind {
            return Err(modgate_core::Error::InvalidInput(format!(
                "regime {id} belongs to the {} family",
                id.family_kind().name()
            ))
            .into());
        }
        let spec = RegimeSpec::new(id, point.phi, point.a, point.angle);
        let approx = regime_approx(&spec)?;
        let p_approx = regime_probability_approx(&spec, point.alpha_abs)?;
        let r = compare(m, approx, row.p_exact, p_approx, point.phi);
        row.approx_rm = Some(r.approx_rm);
        row.p_approx = Some(r.p_approx);
        row.mag_rel_err = Some(r.mag_rel_err);
        row.phase_diff = Some(r.phase_diff);
    }
    Ok(row)
}

/// Evaluates every grid point concurrently; rows come back in grid order.
pub fn evaluate_grid(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config
        .points()
        .par_iter()
        .map(|p| evaluate_point(config.scenario, p, config.regime))
        .collect()
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(COLUMNS)?;
            for row in rows {
                w.write_record(row.fields())?;
            }
            w.flush()?;
        }
        OutputFormat::JsonLines => {
            let mut out = std::io::BufWriter::new(out);
            for row in rows {
                serde_json::to_writer(&mut out, &row.to_json())?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Evaluates the grid and writes it; returns the number of data rows.
pub fn run_sweep<W: Write>(config: &SweepConfig, format: OutputFormat, out: W) -> Result<usize> {
    let rows = evaluate_grid(config)?;
    write_rows(&rows, format, out)?;
    Ok(rows.len())
}
