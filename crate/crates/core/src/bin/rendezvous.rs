//! Command-line front end.
//!
//! Exit codes: 0 success, 1 bound violation, 2 oracle disagreement,
//! 3 input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rendezvous_core::error::Error;
use rendezvous_core::harness::{run_sweep, run_verify, RunKind, RunSummary, SweepSpec};
use rendezvous_core::sim::trace::write_jsonl;
use rendezvous_core::sim::{run_scenario, Scenario, Trajectory};
use rendezvous_core::{AgentId, Scalar};

const EXIT_VIOLATION: u8 = 1;
const EXIT_DISAGREEMENT: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rendezvous",
    version,
    about = "Simulate two sniffing agents meeting in the plane"
)]
struct Cli {
    /// Use the published LoseContact guard, which skips the last label bit.
    #[arg(long, global = true)]
    strict_paper_loop: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its report, trace and samples.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// JSONL trace output.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Sampled positions `time,x_a,y_a,x_b,y_b,dist`.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Report output; printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Per-run summary in the sweep format.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run a seeded sweep and aggregate the bound report.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the executor with the dense-sampling oracle.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "1/1024")]
        dt: Scalar,
        /// Report output; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(Error),
    Exit(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::io(path.display().to_string(), e))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => write(p, format!("{text}\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn sample_csv(scenario: &Scenario, trajectory: &Trajectory, end: &Scalar) -> String {
    let later = scenario.later_start();
    let span = scenario.vertical_gap() + scenario.horizontal_gap();
    let step = if span.is_positive() {
        span / Scalar::from_int(1024)
    } else {
        Scalar::pow2_neg(10)
    };
    let mut out = String::from("time,x_a,y_a,x_b,y_b,dist\n");
    let mut t = later;
    while let (Some(a), Some(b)) = (
        trajectory.position_at(AgentId::A, &t),
        trajectory.position_at(AgentId::B, &t),
    ) {
        let d = rendezvous_core::geometry::squared_distance(&a, &b).sqrt_floor(32);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t.to_decimal(6),
            a.x.to_decimal(6),
            a.y.to_decimal(6),
            b.x.to_decimal(6),
            b.y.to_decimal(6),
            d.to_decimal(6)
        ));
        if &t >= end {
            break;
        }
        t = (&t + &step).min(end.clone());
    }
    out
}

fn cmd_run(
    strict: bool,
    scenario: &Path,
    trace: Option<&Path>,
    csv: Option<&Path>,
    report: Option<&Path>,
    summary: Option<&Path>,
) -> Result<(), Failure> {
    let mut s = Scenario::from_json(&read(scenario)?).map_err(Error::from)?;
    s.strict_paper_loop |= strict;
    let out = run_scenario(&s)?;
    if let Some(path) = trace {
        let file = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        write_jsonl(&out.trace, std::io::BufWriter::new(file))
            .map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    if let Some(path) = csv {
        let trajectory = Trajectory::from_trace(&out.trace);
        write(path, sample_csv(&s, &trajectory, &out.report.end_time))?;
    }
    if let Some(path) = summary {
        let line = serde_json::to_string(&RunSummary::from_report(
            0,
            RunKind::Random,
            &s,
            &out.report,
        ))
        .map_err(Error::from)?;
        write(path, line + "\n")?;
    }
    emit(report, &out.report.to_json())?;
    if out.report.bound.as_ref().and_then(|b| b.holds) == Some(false) {
        return Err(Failure::Exit(EXIT_VIOLATION));
    }
    Ok(())
}

fn load_spec(path: &Path, strict: bool) -> Result<SweepSpec, Error> {
    let mut spec = SweepSpec::from_json(&read(path)?)?;
    spec.strict_paper_loop |= strict;
    Ok(spec)
}

fn cmd_sweep(strict: bool, spec: &Path, out: &Path) -> Result<(), Failure> {
    let spec = load_spec(spec, strict)?;
    let output = run_sweep(&spec);
    output.write(out)?;
    let r = &output.report;
    eprintln!(
        "{} runs, {} met, {} violations, {} unmet, {} errors; max ratio {}",
        r.runs,
        r.met,
        r.violations.len(),
        r.unmet.len(),
        r.errors.len(),
        r.ratios.max.map_or("n/a".into(), |m| format!("{m:.4}"))
    );
    if !r.passed() {
        return Err(Failure::Exit(EXIT_VIOLATION));
    }
    Ok(())
}

fn cmd_verify(strict: bool, spec: &Path, dt: &Scalar, out: Option<&Path>) -> Result<(), Failure> {
    let spec = load_spec(spec, strict)?;
    if !dt.is_positive() {
        return Err(
            Error::from(rendezvous_core::InputError::NonPositiveStep(dt.to_string())).into(),
        );
    }
    let report = run_verify(&spec, dt);
    emit(out, &report.to_json())?;
    eprintln!(
        "{} scenarios: {} agree, {} excluded, {} disagree",
        report.scenarios,
        report.agreed,
        report.excluded.len(),
        report.disagreements.len()
    );
    if !report.passed() {
        for d in &report.disagreements {
            eprintln!(
                "scenario {}: {}\n{}",
                d.index,
                d.reason,
                d.scenario.to_json()
            );
        }
        return Err(Failure::Exit(EXIT_DISAGREEMENT));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.strict_paper_loop;
    let result = match &cli.command {
        Command::Run {
            scenario,
            trace,
            csv,
            report,
            summary,
        } => cmd_run(
            strict,
            scenario,
            trace.as_deref(),
            csv.as_deref(),
            report.as_deref(),
            summary.as_deref(),
        ),
        Command::Sweep { spec, out } => cmd_sweep(strict, spec, out),
        Command::Verify { spec, dt, out } => cmd_verify(strict, spec, dt, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Exit(code)) => ExitCode::from(code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Simulation(_) => EXIT_VIOLATION,
                _ => EXIT_INPUT,
            };
            ExitCode::from(code)
        }
    }
}
