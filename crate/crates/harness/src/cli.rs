//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use modgate_core::xpm::RegimeId;

use crate::config::{ConfigFile, GateArgs, OutputFormat, SampleArgs, SweepArgs};
use crate::error::{exit, HarnessError, Result};
use crate::eval::{run_eval, write_record};
use crate::report::{run_report, write_report, DEFAULT_ALPHA};
use crate::sample::{analytic_angles, parse_bases, run_sample, Basis, SampleConfig};
use crate::sweep::run_sweep;

#[derive(Debug, Parser)]
#[command(
    name = "modgate",
    version,
    about = "Postselected controlled-gate evaluation, sweeps, sampling and regime reports"
)]
pub struct Cli {
    /// RNG seed for `sample`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// TOML file with `seed`, `out`, `format` and `[gate]`, `[sweep]`, `[sample]` tables.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one gate instance.
    Eval(GateArgs),
    /// Evaluate a parameter grid, one row per point.
    Sweep(SweepArgs),
    /// Monte Carlo of postselection and tomography for one gate instance.
    Sample(SampleCmd),
    /// Compare exact values with the regime approximations.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SampleCmd {
    #[command(flatten)]
    pub gate: GateArgs,
    #[command(flatten)]
    pub sample: SampleArgs,
    /// RNG substream index.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Regime name, or `all`.
    #[arg(long, default_value = "all")]
    pub regime: String,
    /// Coherent amplitude |α| used for success probabilities.
    #[arg(long)]
    pub alpha: Option<f64>,
}

fn with_output<F>(path: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => f(stdout)?,
    }
    Ok(())
}

/// Runs a parsed command line, writing normal output to `stdout` and notes to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let out = cli.out.clone().or(file.out.clone());
    let format = cli.format.or(file.format);
    match &cli.command {
        Command::Eval(flags) => {
            let inputs = file.gate.clone().overlay(flags).resolve()?;
            let record = run_eval(&inputs)?;
            with_output(out.as_deref(), stdout, |w| record.write(format, w))
        }
        Command::Sweep(flags) => {
            let config = file.sweep.clone().overlay(flags).resolve()?;
            let mut rows = 0;
            with_output(out.as_deref(), stdout, |w| {
                rows = run_sweep(&config, format.unwrap_or_default(), w)?;
                Ok(())
            })?;
            if let Some(p) = &out {
                writeln!(stderr, "wrote {rows} rows to {}", p.display())?;
            }
            Ok(())
        }
        Command::Sample(cmd) => {
            let inputs = file.gate.clone().overlay(&cmd.gate).resolve()?;
            let sample = file.sample.clone().overlay(&cmd.sample);
            let bases = match &sample.bases {
                Some(text) => parse_bases(text)?,
                None => Basis::ALL.to_vec(),
            };
            let config = SampleConfig::new(sample.trials.unwrap_or(10_000), seed, &bases)?.with_stream(cmd.stream);
            let outcome = modgate_core::postselect(&inputs.prep, &inputs.selection, &inputs.n);
            let estimate = run_sample(&outcome, &config);
            let fields = estimate.fields(analytic_angles(&inputs.prep, &outcome));
            with_output(out.as_deref(), stdout, |w| write_record(&fields, format, w))?;
            outcome.normalized()?;
            Ok(())
        }
        Command::Report(args) => {
            let ids: Vec<RegimeId> = match args.regime.as_str() {
                "all" => RegimeId::ALL.to_vec(),
                name => vec![name.parse()?],
            };
            let alpha = args.alpha.or(file.gate.alpha).unwrap_or(DEFAULT_ALPHA);
            let sections = run_report(&ids, alpha)?;
            with_output(out.as_deref(), stdout, |w| write_report(&sections, alpha, w))
        }
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::INVALID_INPUT } else { exit::OK };
        }
    };
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    let mut stderr = io::stderr();
    match run(&cli, &mut stdout, &mut stderr) {
        Ok(()) => match stdout.flush() {
            Ok(()) => exit::OK,
            Err(e) => report_error(&HarnessError::Io(e)),
        },
        Err(e) => {
            let _ = stdout.flush();
            report_error(&e)
        }
    }
}

fn report_error(e: &HarnessError) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}
