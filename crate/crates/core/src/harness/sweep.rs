use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{probe_trial, sweep_scenarios, Generated, RunKind};
use super::spec::{SweepSpec, GENERATOR};
use crate::error::Error;
use crate::scalar::Scalar;
use crate::sim::{run_scenario, Bracket, MeetingReport, Model, Outcome, Scenario};

pub const BOUND_REPORT_SCHEMA_VERSION: u32 = 1;

/// Largest allowed ratio between the worst normalized times of the largest
/// and the smallest binary grid cells.
pub const DRIFT_FACTOR: f64 = 4.0;

/// One run, as written to `runs.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub index: usize,
    pub kind: RunKind,
    pub scenario: Scenario,
    pub outcome: Option<Outcome>,
    pub met: bool,
    pub out_of_contract: bool,
    pub time: Option<Bracket>,
    /// Meeting time over `x+y` (monotone) or `rho*lambda` (binary).
    pub ratio: Option<f64>,
    pub bound: Option<String>,
    pub bound_holds: Option<bool>,
    pub leading: [Option<bool>; 2],
    pub first_differing_bit: Option<usize>,
    pub error: Option<String>,
}

impl RunSummary {
    pub fn from_report(
        index: usize,
        kind: RunKind,
        scenario: &Scenario,
        report: &MeetingReport,
    ) -> Self {
        let scale = match scenario.model {
            Model::Monotone => &report.x + &report.y,
            Model::Binary => {
                report.rho.clone().unwrap_or_else(Scalar::one) * Scalar::from(report.lambda as u64)
            }
        };
        let ratio = report.time_upper().map(|t| (t / &scale).to_f64());
        RunSummary {
            index,
            kind,
            scenario: scenario.clone(),
            outcome: Some(report.outcome),
            met: report.met,
            out_of_contract: report.out_of_contract,
            time: report.time_from_later_start.clone(),
            ratio,
            bound: report
                .bound
                .as_ref()
                .map(|b| format!("{} = {}", b.name, b.limit)),
            bound_holds: report.bound.as_ref().and_then(|b| b.holds),
            leading: [report.agents.a.leading, report.agents.b.leading],
            first_differing_bit: report.first_differing_bit,
            error: None,
        }
    }

    fn failed(g: &Generated, error: String) -> Self {
        RunSummary {
            index: g.index,
            kind: g.kind,
            scenario: g.scenario.clone(),
            outcome: None,
            met: false,
            out_of_contract: g.scenario.out_of_contract(),
            time: None,
            ratio: None,
            bound: None,
            bound_holds: None,
            leading: [None, None],
            first_differing_bit: g.scenario.first_differing_bit(),
            error: Some(error),
        }
    }

    pub fn run(g: &Generated) -> Self {
        match run_scenario(&g.scenario) {
            Ok(out) => RunSummary::from_report(g.index, g.kind, &g.scenario, &out.report),
            Err(e) => RunSummary::failed(g, e.to_string()),
        }
    }

    fn leaders(&self) -> usize {
        self.leading.iter().filter(|l| **l == Some(true)).count()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub runs: usize,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    /// Run index attaining `max`.
    pub argmax: Option<usize>,
}

impl RatioStats {
    fn of<'a>(runs: impl Iterator<Item = &'a RunSummary>) -> Self {
        let mut stats = RatioStats::default();
        let mut sum = 0.0;
        for r in runs {
            let Some(ratio) = r.ratio else { continue };
            stats.runs += 1;
            sum += ratio;
            if stats.max.is_none_or(|m| ratio > m) {
                stats.max = Some(ratio);
                stats.argmax = Some(r.index);
            }
        }
        if stats.runs > 0 {
            stats.mean = Some(sum / stats.runs as f64);
        }
        stats
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub bound: String,
    pub time: Option<Bracket>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub rho: Scalar,
    #[serde(rename = "L")]
    pub label_size: u64,
    pub lambda: usize,
    pub stats: RatioStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftGuard {
    pub smallest_cell: (Scalar, u64),
    pub largest_cell: (Scalar, u64),
    pub smallest_max: f64,
    pub largest_max: f64,
    pub factor: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SymmetryStats {
    /// Runs where exactly one agent was marked leading.
    pub broken: usize,
    /// Runs that met before either agent decided.
    pub met_before_decision: usize,
    pub failures: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutOfContract {
    pub runs: usize,
    pub both_halted: usize,
    /// Out-of-contract runs that did not end with both agents halted.
    pub other: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub lambda: u32,
    pub worst_time: Scalar,
    pub worst_time_decimal: String,
    pub mean_time: f64,
    /// `rho * lambda`.
    pub reference: Scalar,
    pub ratio: f64,
    pub unmet: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub rho: Scalar,
    pub trials: usize,
    pub points: Vec<ProbePoint>,
    pub nondecreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub generator: String,
    pub seed: u64,
    pub model: Model,
    pub runs: usize,
    pub met: usize,
    pub ratios: RatioStats,
    /// Runs whose labels first differ in the last bit.
    pub worst_case_labels: RatioStats,
    pub special_pairs: RatioStats,
    pub violations: Vec<Violation>,
    /// In-contract runs that did not meet.
    pub unmet: Vec<usize>,
    pub errors: Vec<(usize, String)>,
    pub cells: Vec<CellStats>,
    pub drift_guard: Option<DriftGuard>,
    pub symmetry: Option<SymmetryStats>,
    pub out_of_contract: OutOfContract,
    pub probe: Option<ProbeReport>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
            && self.unmet.is_empty()
            && self.errors.is_empty()
            && self.out_of_contract.other.is_empty()
            && self.symmetry.as_ref().is_none_or(|s| s.failures.is_empty())
            && self.drift_guard.as_ref().is_none_or(|d| d.holds)
            && self.probe.as_ref().is_none_or(|p| p.nondecreasing)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub report: BoundReport,
    pub runs: Vec<RunSummary>,
}

impl SweepOutput {
    /// Writes `bound_report.json`, `runs.jsonl` and, with a probe,
    /// `probe.csv`.
    pub fn write(&self, dir: &Path) -> Result<(), Error> {
        let io = |p: &Path| {
            let p = p.display().to_string();
            move |e| Error::io(p, e)
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let report_path = dir.join("bound_report.json");
        fs::write(&report_path, self.report.to_json() + "\n").map_err(io(&report_path))?;
        let mut lines = String::new();
        for r in &self.runs {
            lines.push_str(&serde_json::to_string(r)?);
            lines.push('\n');
        }
        let runs_path = dir.join("runs.jsonl");
        fs::write(&runs_path, lines).map_err(io(&runs_path))?;
        if let Some(probe) = &self.report.probe {
            let mut csv = String::from("lambda,worst_time,mean_time,rho_lambda\n");
            for p in &probe.points {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    p.lambda,
                    p.worst_time_decimal,
                    p.mean_time,
                    p.reference.to_decimal(0)
                ));
            }
            let probe_path = dir.join("probe.csv");
            fs::write(&probe_path, csv).map_err(io(&probe_path))?;
        }
        Ok(())
    }
}

fn run_probe(spec: &SweepSpec) -> Option<ProbeReport> {
    let probe = spec.probe.as_ref()?;
    let trials: Vec<Vec<(u32, Option<Scalar>)>> = (0..probe.trials)
        .into_par_iter()
        .map(|t| {
            probe_trial(spec, t)
                .into_iter()
                .map(|(lambda, s)| {
                    let time = run_scenario(&s)
                        .ok()
                        .and_then(|o| o.report.time_upper().cloned());
                    (lambda, time)
                })
                .collect()
        })
        .collect();
    let points: Vec<ProbePoint> = probe
        .lambdas
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let times: Vec<&Scalar> = trials.iter().filter_map(|t| t[i].1.as_ref()).collect();
            let unmet = trials.len() - times.len();
            let worst = times.iter().map(|t| (*t).clone()).max().unwrap_or_default();
            let mean = times.iter().map(|t| t.to_f64()).sum::<f64>() / times.len().max(1) as f64;
            let reference = &probe.rho * Scalar::from(lambda as u64);
            ProbePoint {
                lambda,
                worst_time_decimal: worst.to_decimal(6),
                ratio: (&worst / &reference).to_f64(),
                worst_time: worst,
                mean_time: mean,
                reference,
                unmet,
            }
        })
        .collect();
    let mut order: Vec<&ProbePoint> = points.iter().collect();
    order.sort_by_key(|p| p.lambda);
    let nondecreasing = order.windows(2).all(|w| w[0].worst_time <= w[1].worst_time)
        && points.iter().all(|p| p.unmet == 0);
    Some(ProbeReport {
        rho: probe.rho.clone(),
        trials: probe.trials,
        points,
        nondecreasing,
    })
}

fn binary_cells(spec: &SweepSpec, runs: &[RunSummary]) -> (Vec<CellStats>, Option<DriftGuard>) {
    let mut groups: BTreeMap<(Scalar, u64), Vec<&RunSummary>> = BTreeMap::new();
    for r in runs.iter().filter(|r| !r.out_of_contract) {
        let key = (
            r.scenario.rho.clone().unwrap_or_default(),
            r.scenario.space.size(),
        );
        groups.entry(key).or_default().push(r);
    }
    let cells: Vec<CellStats> = groups
        .into_iter()
        .map(|((rho, size), rs)| CellStats {
            lambda: rs[0].scenario.space.lambda(),
            rho,
            label_size: size,
            stats: RatioStats::of(rs.into_iter()),
        })
        .collect();
    let smallest = (
        spec.rho.iter().min().cloned().unwrap_or_default(),
        spec.label_sizes.iter().copied().min().unwrap_or(0),
    );
    let largest = (
        spec.rho.iter().max().cloned().unwrap_or_default(),
        spec.label_sizes.iter().copied().max().unwrap_or(0),
    );
    let max_of = |key: &(Scalar, u64)| {
        cells
            .iter()
            .find(|c| c.rho == key.0 && c.label_size == key.1)
            .and_then(|c| c.stats.max)
    };
    let guard = match (max_of(&smallest), max_of(&largest)) {
        (Some(small), Some(large)) if smallest != largest => Some(DriftGuard {
            holds: large <= DRIFT_FACTOR * small,
            factor: large / small,
            smallest_cell: smallest,
            largest_cell: largest,
            smallest_max: small,
            largest_max: large,
        }),
        _ => None,
    };
    (cells, guard)
}

pub fn aggregate(spec: &SweepSpec, runs: &[RunSummary], probe: Option<ProbeReport>) -> BoundReport {
    let mut violations = Vec::new();
    let mut unmet = Vec::new();
    let mut errors = Vec::new();
    let mut out = OutOfContract::default();
    for r in runs {
        if let Some(e) = &r.error {
            errors.push((r.index, e.clone()));
            continue;
        }
        if r.out_of_contract {
            out.runs += 1;
            if r.outcome == Some(Outcome::BothHalted) {
                out.both_halted += 1;
            } else {
                out.other.push(r.index);
            }
            continue;
        }
        if !r.met {
            unmet.push(r.index);
        }
        if r.bound_holds == Some(false) {
            violations.push(Violation {
                index: r.index,
                bound: r.bound.clone().unwrap_or_default(),
                time: r.time.clone(),
            });
        }
    }
    let in_contract = || runs.iter().filter(|r| !r.out_of_contract);
    let symmetry = (spec.model == Model::Binary).then(|| {
        let mut s = SymmetryStats::default();
        for r in in_contract().filter(|r| r.error.is_none()) {
            match (r.leaders(), r.met) {
                (1, _) => s.broken += 1,
                (0, true) => s.met_before_decision += 1,
                _ => s.failures.push(r.index),
            }
        }
        s
    });
    let (cells, drift_guard) = if spec.model == Model::Binary {
        binary_cells(spec, runs)
    } else {
        (Vec::new(), None)
    };
    BoundReport {
        schema_version: BOUND_REPORT_SCHEMA_VERSION,
        generator: GENERATOR.to_string(),
        seed: spec.seed,
        model: spec.model,
        runs: runs.len(),
        met: runs.iter().filter(|r| r.met).count(),
        ratios: RatioStats::of(in_contract()),
        worst_case_labels: RatioStats::of(
            in_contract().filter(|r| r.first_differing_bit == Some(r.scenario.space.lambda())),
        ),
        special_pairs: RatioStats::of(runs.iter().filter(|r| r.kind == RunKind::SpecialPair)),
        violations,
        unmet,
        errors,
        cells,
        drift_guard,
        symmetry,
        out_of_contract: out,
        probe,
    }
}

/// Generates every scenario of a sweep, runs them in parallel and
/// aggregates. Results are ordered by scenario index.
pub fn run_sweep(spec: &SweepSpec) -> SweepOutput {
    let runs: Vec<RunSummary> = sweep_scenarios(spec)
        .par_iter()
        .map(RunSummary::run)
        .collect();
    let report = aggregate(spec, &runs, run_probe(spec));
    SweepOutput { report, runs }
}
