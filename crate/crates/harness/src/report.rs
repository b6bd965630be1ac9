//! Regime validation report: exact values against the closed-form regime
//! approximations at canonical points of each regime's hierarchy.

use std::io::Write;

use modgate_core::xpm::{
    exact_rm, regime_report, CoherentTruncation, PostselectionFamily, RegimeId, RegimeReport, RegimeSpec,
};
use modgate_core::PhaseAbsorbParams;

use crate::error::Result;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            pass,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSection {
    pub id: RegimeId,
    pub points: Vec<(RegimeSpec<f64>, RegimeReport<f64>)>,
    /// Measured expansion constants, with the value the formula implies.
    pub constants: Vec<(String, f64, f64)>,
    pub checks: Vec<Check>,
}

impl RegimeSection {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// `(φ, a, angle)` points at which each regime is evaluated.
pub fn canonical_points(id: RegimeId) -> Vec<(f64, f64, f64)> {
    match id {
        RegimeId::EpsDominant => vec![(1e-5, 1e-3, 1e-2)],
        RegimeId::AbsDominant => vec![(1e-6, 1e-2, 1e-3)],
        RegimeId::Lossless => vec![(1e-5, 0.0, 1e-2), (1e-5, 0.0, 1e-3)],
        RegimeId::DeltaDominant => vec![(1e-5, 1e-3, 1e-2)],
        RegimeId::DeltaAbsDominant => vec![(0.0, 1e-2, 1e-3)],
    }
}

fn rm(phi: f64, a: f64, fam: &PostselectionFamily<f64>) -> Result<modgate_core::ModularValue<f64>> {
    Ok(exact_rm(&PhaseAbsorbParams::new(phi, a)?, fam)?)
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    ((x - target) / target).abs() <= rel
}

pub fn regime_section(id: RegimeId, alpha_abs: f64) -> Result<RegimeSection> {
    let alpha = CoherentTruncation::from_polar(alpha_abs, 0.0)?;
    let mut points = Vec::new();
    let mut checks = Vec::new();
    let mut constants = Vec::new();
    for (phi, a, angle) in canonical_points(id) {
        let spec = RegimeSpec::new(id, phi, a, angle);
        let r = regime_report(&spec, &alpha)?;
        let at = format!("phi={phi:e} a={a:e} angle={angle:e}");
        checks.push(Check::new(
            "magnitude within 10%",
            r.mag_rel_err <= 0.1,
            format!("{at}: rel err {:.3e}", r.mag_rel_err),
        ));
        checks.push(Check::new(
            "success probability within 10%",
            within(r.p_exact, r.p_approx, 0.1),
            format!("{at}: p_exact {:.6e}, formula {:.6e}", r.p_exact, r.p_approx),
        ));
        points.push((spec, r));
    }
    match id {
        RegimeId::Lossless => {
            for &(_, _, eps) in &canonical_points(id) {
                let fam = PostselectionFamily::epsilon(eps)?;
                let phi = 1e-5;
                let slope = rm(phi, 0.0, &fam)?.omega_m / phi;
                constants.push((format!("arg(R_m)/phi * eps at eps={eps:e}"), slope * eps, 1.0));
            }
            let fam = PostselectionFamily::epsilon(1e-2)?;
            let slopes = [1e-6, 1e-5, 1e-4]
                .iter()
                .map(|&phi| Ok(rm(phi, 0.0, &fam)?.omega_m / phi))
                .collect::<Result<Vec<f64>>>()?;
            let spread = slopes.iter().map(|s| (s / slopes[0] - 1.0).abs()).fold(0.0, f64::max);
            checks.push(Check::new(
                "amplification independent of phi (0.1%)",
                spread <= 1e-3,
                format!("eps=1e-2, phi in [1e-6, 1e-4]: max spread {spread:.3e}"),
            ));
            let by_eps = [1e-1, 1e-2, 1e-3]
                .iter()
                .map(|&e| Ok(rm(1e-6, 0.0, &PostselectionFamily::epsilon(e)?)?.omega_m / 1e-6))
                .collect::<Result<Vec<f64>>>()?;
            checks.push(Check::new(
                "amplification grows as eps shrinks",
                by_eps.windows(2).all(|w| w[1] > w[0]),
                format!(
                    "eps = 1e-1, 1e-2, 1e-3: {:.4e}, {:.4e}, {:.4e}",
                    by_eps[0], by_eps[1], by_eps[2]
                ),
            ));
        }
        RegimeId::EpsDominant => {
            let (_, r) = &points[0];
            checks.push(Check::new(
                "effective absorption 1 - |R_m| positive",
                r.effective_absorption > 0.0,
                format!("1 - |R_m| = {:.6e}", r.effective_absorption),
            ));
            let (phi, a, eps) = canonical_points(id)[0];
            let fam = PostselectionFamily::epsilon(eps)?;
            let slope = rm(phi, a, &fam)?.omega_m / phi;
            constants.push(("arg(R_m)/phi * eps".into(), slope * eps, 1.0));
            let loss = (1.0 - rm(0.0, a, &fam)?.magnitude) * 2.0 * eps / a;
            constants.push(("(1 - |R_m|) * 2 eps / a".into(), loss, 1.0));
        }
        RegimeId::AbsDominant => {
            let (_, r) = &points[0];
            constants.push((
                "Re R_m / |approx|".into(),
                r.exact_rm.re / r.approx_rm.norm(),
                r.approx_rm.re / r.approx_rm.norm(),
            ));
        }
        RegimeId::DeltaDominant => {
            let (_, a, delta) = canonical_points(id)[0];
            let fam = PostselectionFamily::delta(delta)?;
            let phase = rm(0.0, a, &fam)?.omega_m;
            constants.push(("arg(R_m) * delta / a at phi=0".into(), phase * delta / a, 2.0));
        }
        RegimeId::DeltaAbsDominant => {
            let (_, r) = &points[0];
            let (_, a, delta) = canonical_points(id)[0];
            let scaled = r.exact_rm.norm() * delta / a;
            checks.push(Check::new(
                "|R_m| delta / a within 5% of 1",
                (scaled - 1.0).abs() <= 0.05,
                format!("|R_m| delta / a = {scaled:.6}"),
            ));
            constants.push(("arg(R_m)".into(), r.exact_rm.arg(), r.approx_rm.arg()));
        }
    }
    Ok(RegimeSection {
        id,
        points,
        constants,
        checks,
    })
}

pub fn run_report(ids: &[RegimeId], alpha_abs: f64) -> Result<Vec<RegimeSection>> {
    ids.iter().map(|&id| regime_section(id, alpha_abs)).collect()
}

pub fn write_report<W: Write>(sections: &[RegimeSection], alpha_abs: f64, mut out: W) -> Result<()> {
    writeln!(out, "regime report, |alpha| = {alpha_abs}")?;
    for s in sections {
        writeln!(out)?;
        writeln!(out, "[{}] family {}", s.id, s.id.family_kind().name())?;
        for (spec, r) in &s.points {
            writeln!(
                out,
                "  phi = {:e}, a = {:e}, angle = {:e}",
                spec.phi, spec.a, spec.angle
            )?;
            writeln!(
                out,
                "    exact   |R_m| = {:.10e}  arg = {:+.10e}",
                r.exact_rm.norm(),
                r.exact_rm.arg()
            )?;
            writeln!(
                out,
                "    formula |R_m| = {:.10e}  arg = {:+.10e}",
                r.approx_rm.norm(),
                r.approx_rm.arg()
            )?;
            writeln!(
                out,
                "    mag_rel_err = {:.4e}  phase_diff = {:+.4e}",
                r.mag_rel_err, r.phase_diff
            )?;
            writeln!(out, "    p_exact = {:.6e}  p_approx = {:.6e}", r.p_exact, r.p_approx)?;
            writeln!(out, "    effective_absorption = {:+.6e}", r.effective_absorption)?;
            if let Some(amp) = r.amplification {
                writeln!(out, "    amplification arg(R_m)/phi = {amp:.6e}")?;
            }
        }
        for (name, measured, formula) in &s.constants {
            writeln!(out, "  measured {name} = {measured:.6} (formula {formula:.6})")?;
        }
        for c in &s.checks {
            writeln!(
                out,
                "  {} {}: {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
    }
    Ok(())
}
