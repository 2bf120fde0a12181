//! Command-line driver: argument model and the `run` entry point.

use std::io::Write;
use std::ops::Range;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, ErrorKind};
use crate::format::{parse_instance, serialize_instance};
use crate::generate::{generate, Shape};
use crate::instance::{check_hypothesis, Diagnostic, HypothesisMode, Instance};
use crate::l0::Rv;
use crate::oracle::GridSpec;
use crate::rational::parse_q;
use crate::report::{BatchReport, OracleBlock, Report, TraceBlock, VerifyBlock};
use crate::verifier::{trace_proof, verify, TraceOptions, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Verify,
    Trace,
    Oracle,
    Gen,
}

/// Half-open seed range `a..b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedRange(pub Range<u64>);

impl FromStr for SeedRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|e| format!("bad range start: {e}"))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|e| format!("bad range end: {e}"))?;
        if a >= b {
            return Err(format!("empty seed range {s:?}"));
        }
        Ok(SeedRange(a..b))
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "l0-simons",
    version,
    about = "Exact verifier for the random Simons inequality on finite probability spaces"
)]
pub struct Cli {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Constant δ for trace mode, as "p/q".
    #[arg(long)]
    pub delta: Option<String>,
    /// Truncation N for trace mode; defaults to the tail-bound rule.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Lattice resolution k for oracle mode.
    #[arg(long, default_value_t = 200)]
    pub grid: u32,
    /// Seed for gen mode and for hypothesis sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Generated shape: atoms,base_points,preamble,cycle.
    #[arg(long, default_value = "2,3,1,2")]
    pub shape: Shape,
    /// Run a batch over generated instances instead of --instance.
    #[arg(long)]
    pub seeds: Option<SeedRange>,
    #[arg(long, default_value_t = 4096)]
    pub cap_selections: u128,
    /// Samples for the attainment check when S is explicit.
    #[arg(long, default_value_t = 64)]
    pub hypothesis_samples: usize,
    /// Write the report (or generated instance) here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Diagnostics(Vec<Diagnostic>),
    Error(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Diagnostics(_) | Failure::Usage(_) => EXIT_INVALID,
            Failure::Error(e) => match e.kind() {
                ErrorKind::Resource => EXIT_RESOURCE,
                ErrorKind::Hypothesis => EXIT_CHECK_FAILED,
                ErrorKind::Structural | ErrorKind::Domain => EXIT_INVALID,
            },
        }
    }

    fn lines(&self) -> Vec<String> {
        match self {
            Failure::Diagnostics(d) => d.iter().map(|d| format!("error: {d}")).collect(),
            Failure::Error(e) => vec![format!("error: {e}")],
            Failure::Usage(m) => vec![format!("error: {m}")],
        }
    }
}

impl Cli {
    fn hypothesis_mode(&self) -> HypothesisMode {
        HypothesisMode::Sampled {
            samples: self.hypothesis_samples,
            seed: self.seed,
        }
    }

    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            cap: self.cap_selections,
            hypothesis: self.hypothesis_mode(),
        }
    }

    fn trace_options(&self, instance: &Instance) -> Result<TraceOptions, Failure> {
        let delta = match &self.delta {
            None => None,
            Some(text) => {
                let d = parse_q(text).map_err(|e| Failure::Usage(format!("--delta: {e}")))?;
                Some(Rv::constant(instance.space(), d))
            }
        };
        Ok(TraceOptions {
            delta,
            steps: self.steps,
            cap: self.cap_selections,
            hypothesis: self.hypothesis_mode(),
        })
    }

    fn load(&self) -> Result<Instance, Failure> {
        let path = self
            .instance
            .as_ref()
            .ok_or_else(|| Failure::Usage("--instance or --seeds is required".into()))?;
        parse_instance(path).map_err(Failure::Diagnostics)
    }

    fn single(&self, instance: &Instance) -> Result<Report, Failure> {
        match self.mode {
            Mode::Verify => {
                let res = verify(instance, &self.verify_options())?;
                let mut report = Report::new("verify", instance, &res.hypothesis);
                report.pass = res.holds;
                report.verify = Some(VerifyBlock::from(&res));
                Ok(report)
            }
            Mode::Trace => {
                let trace = trace_proof(instance, &self.trace_options(instance)?)?;
                let mut report = Report::new("trace", instance, &trace.hypothesis);
                let block = TraceBlock::new(instance, &trace);
                report.pass = block.all_slacks_pass;
                report.trace = Some(block);
                Ok(report)
            }
            Mode::Oracle => {
                let grid = GridSpec::new(self.grid)?;
                let hypothesis = check_hypothesis(instance, self.hypothesis_mode())?;
                let block: OracleBlock =
                    crate::report::oracle_comparison(instance, grid, self.cap_selections)?;
                let mut report = Report::new("oracle", instance, &hypothesis);
                report.pass = block.pass();
                report.oracle = Some(block);
                Ok(report)
            }
            Mode::Gen => unreachable!("gen does not produce a report"),
        }
    }

    fn execute(&self) -> Result<(String, bool), Failure> {
        if self.mode == Mode::Gen {
            let instance = generate(self.seed, self.shape)?;
            return Ok((serialize_instance(&instance), true));
        }
        let mode = match self.mode {
            Mode::Verify => "verify",
            Mode::Trace => "trace",
            _ => "oracle",
        };
        let (json, pass) = match &self.seeds {
            None => {
                let report = self.single(&self.load()?)?;
                (serde_json::to_string_pretty(&report), report.pass)
            }
            Some(SeedRange(range)) => {
                self.shape.check()?;
                let seeds: Vec<u64> = range.clone().collect();
                let reports = seeds
                    .par_iter()
                    .map(|&seed| self.single(&generate(seed, self.shape)?))
                    .collect::<Result<Vec<_>, _>>()?;
                let pass = reports.iter().all(|r| r.pass);
                let batch = BatchReport {
                    mode,
                    shape: self.shape.to_string(),
                    seeds,
                    reports,
                    pass,
                };
                (serde_json::to_string_pretty(&batch), pass)
            }
        };
        let mut json = json.expect("reports serialize");
        json.push('\n');
        Ok((json, pass))
    }
}

/// Runs the CLI; returns the process exit code. Reports go to `out` (or
/// `--out`), diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cli.execute() {
        Ok((text, pass)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| e.to_string()),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: cannot write output: {e}");
                return EXIT_INVALID;
            }
            if pass {
                EXIT_OK
            } else {
                let _ = writeln!(err, "check failed; see report");
                EXIT_CHECK_FAILED
            }
        }
        Err(failure) => {
            for line in failure.lines() {
                let _ = writeln!(err, "{line}");
            }
            failure.exit_code()
        }
    }
}
