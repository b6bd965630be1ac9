//! Seeded Monte Carlo of postselection clicks and single-qubit tomography.
//!
//! Each run draws from `ChaCha8Rng` seeded with `seed` on substream `stream`,
//! so independent points (for example sweep grid indices) never share draws.
//! The number of successful postselections is `Binomial(trials, p)`; the
//! successes are split round-robin over the requested bases (X, Y, Z in that
//! order) and each basis yields `Binomial(n_b, (1 + r_b)/2)` plus outcomes,
//! where `r_b` is the exact Bloch component of the postselected state.

use std::fmt;
use std::str::FromStr;

use modgate_core::gate::{GateOutcome, SystemPrep};
use modgate_core::principal_angle;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::eval::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn index(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["x", "y", "z"][self.index()])
    }
}

/// Parses a basis set such as `xyz` or `x,z`; duplicates collapse.
pub fn parse_bases(text: &str) -> Result<Vec<Basis>> {
    let mut out = Vec::new();
    for ch in text.chars().filter(|c| !matches!(c, ',' | ' ')) {
        let b = match ch.to_ascii_lowercase() {
            'x' => Basis::X,
            'y' => Basis::Y,
            'z' => Basis::Z,
            _ => return Err(HarnessError::Config(format!("unknown basis '{ch}' in '{text}'"))),
        };
        out.push(b);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

impl FromStr for Basis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match parse_bases(s)?.as_slice() {
            [b] => Ok(*b),
            _ => Err(HarnessError::Config(format!("expected one basis, got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleConfig {
    trials: u64,
    seed: u64,
    stream: u64,
    bases: Vec<Basis>,
}

impl SampleConfig {
    pub fn new(trials: u64, seed: u64, bases: &[Basis]) -> Result<Self> {
        if trials == 0 {
            return Err(HarnessError::Config("trials must be >= 1".into()));
        }
        let mut bases = bases.to_vec();
        bases.sort();
        bases.dedup();
        Ok(SampleConfig {
            trials,
            seed,
            stream: 0,
            bases,
        })
    }

    /// Selects the RNG substream, e.g. a grid index.
    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }
}

/// Counts and mean for one measured basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisCounts {
    pub basis: Basis,
    pub shots: u64,
    pub plus: u64,
    /// Outcome mean `2·plus/shots − 1`.
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleEstimate {
    pub trials: u64,
    pub successes: u64,
    pub p_exact: f64,
    pub p_hat: f64,
    /// `√(p̂(1 − p̂)/trials)`.
    pub p_stderr: f64,
    /// Present when at least one postselection succeeded.
    pub tomography: Option<Tomography>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tomography {
    pub counts: Vec<BasisCounts>,
    /// `(x̂, ŷ, ẑ)`; unmeasured components are `None`.
    pub bloch_hat: [Option<f64>; 3],
    /// `arccos ẑ`, when Z was measured.
    pub theta_f_hat: Option<f64>,
    pub theta_f_stderr: Option<f64>,
    /// `atan2(ŷ, x̂)`, when X and Y were measured.
    pub phase_hat: Option<f64>,
    pub phase_stderr: Option<f64>,
}

fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    Binomial::new(n, p.clamp(0.0, 1.0))
        .expect("probability clamped to [0, 1]")
        .sample(rng)
}

/// Simulates `config.trials()` postselection attempts on `outcome`.
///
/// A zero success probability gives `p̂ = 0` and no tomography; callers decide
/// whether that is an error.
pub fn run_sample(outcome: &GateOutcome<f64>, config: &SampleConfig) -> SampleEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(config.stream);
    let n = config.trials;
    let p_exact = outcome.success_probability;
    let successes = match outcome.final_state {
        Some(_) => binomial(&mut rng, n, p_exact),
        None => 0,
    };
    let p_hat = successes as f64 / n as f64;
    let p_stderr = (p_hat * (1.0 - p_hat) / n as f64).sqrt();
    let tomography = match (&outcome.final_state, successes) {
        (Some(state), s) if s > 0 && !config.bases.is_empty() => {
            Some(tomography(&mut rng, state.bloch_vector(), s, &config.bases))
        }
        _ => None,
    };
    SampleEstimate {
        trials: n,
        successes,
        p_exact,
        p_hat,
        p_stderr,
        tomography,
    }
}

fn tomography(rng: &mut ChaCha8Rng, bloch: [f64; 3], successes: u64, bases: &[Basis]) -> Tomography {
    let k = bases.len() as u64;
    let mut counts = Vec::with_capacity(bases.len());
    let mut bloch_hat = [None; 3];
    let mut sigma = [None; 3];
    for (j, &b) in bases.iter().enumerate() {
        let shots = successes / k + u64::from((j as u64) < successes % k);
        if shots == 0 {
            continue;
        }
        let r = bloch[b.index()].clamp(-1.0, 1.0);
        let plus = binomial(rng, shots, (1.0 + r) / 2.0);
        let mean = 2.0 * plus as f64 / shots as f64 - 1.0;
        let stderr = ((1.0 - mean * mean).max(0.0) / shots as f64).sqrt();
        bloch_hat[b.index()] = Some(mean);
        sigma[b.index()] = Some((stderr, shots));
        counts.push(BasisCounts {
            basis: b,
            shots,
            plus,
            mean,
            stderr,
        });
    }
    let (theta_f_hat, theta_f_stderr) = match (bloch_hat[2], sigma[2]) {
        // d(arccos z)/dz · σ_z with σ_z² = (1 − ẑ²)/n reduces to 1/√n.
        (Some(z), Some((_, shots))) => (Some(z.clamp(-1.0, 1.0).acos()), Some(1.0 / (shots as f64).sqrt())),
        _ => (None, None),
    };
    let (phase_hat, phase_stderr) = match (bloch_hat[0], bloch_hat[1], sigma[0], sigma[1]) {
        (Some(x), Some(y), Some((sx, _)), Some((sy, _))) => {
            let r2 = x * x + y * y;
            let se = ((y * y * sx * sx + x * x * sy * sy) / (r2 * r2)).sqrt();
            (Some(y.atan2(x)), Some(se))
        }
        _ => (None, None),
    };
    Tomography {
        counts,
        bloch_hat,
        theta_f_hat,
        theta_f_stderr,
        phase_hat,
        phase_stderr,
    }
}

impl SampleEstimate {
    /// Keyed fields for output, with the analytic angles when known.
    pub fn fields(&self, analytic: Option<(f64, f64)>) -> Vec<(&'static str, Field)> {
        let t = self.tomography.as_ref();
        let b = |k: usize| Field::Num(t.and_then(|t| t.bloch_hat[k]));
        vec![
            ("trials", Field::Count(self.trials)),
            ("successes", Field::Count(self.successes)),
            ("p_exact", Field::Num(Some(self.p_exact))),
            ("p_hat", Field::Num(Some(self.p_hat))),
            ("p_stderr", Field::Num(Some(self.p_stderr))),
            ("bloch_x", b(0)),
            ("bloch_y", b(1)),
            ("bloch_z", b(2)),
            ("theta_f_hat", Field::Num(t.and_then(|t| t.theta_f_hat))),
            ("theta_f_stderr", Field::Num(t.and_then(|t| t.theta_f_stderr))),
            ("theta_f_exact", Field::Num(analytic.map(|x| x.0))),
            ("phase_hat", Field::Num(t.and_then(|t| t.phase_hat))),
            ("phase_stderr", Field::Num(t.and_then(|t| t.phase_stderr))),
            ("phase_exact", Field::Num(analytic.map(|x| x.1))),
        ]
    }
}

/// Analytic polar angle `θ − θ_m` and azimuth `ξ + Ω_m` of the postselected state.
pub fn analytic_angles(prep: &SystemPrep<f64>, outcome: &GateOutcome<f64>) -> Option<(f64, f64)> {
    let tm = outcome.theta_m?;
    let om = outcome.omega_m?;
    Some((prep.theta() - tm, principal_angle(prep.xi() + om)))
}
