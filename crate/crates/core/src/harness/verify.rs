use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{sweep_scenarios, Generated};
use super::spec::{SweepSpec, GENERATOR};
use crate::error::Error;
use crate::oracle::{compare, oracle_run, Agreement, OracleConfig};
use crate::scalar::Scalar;
use crate::sim::{run_scenario, Scenario};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checked {
    pub index: usize,
    pub agreement: Agreement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub index: usize,
    pub reason: String,
    /// Ready to pass to `run --scenario`.
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub generator: String,
    pub seed: u64,
    pub dt: Scalar,
    pub scenarios: usize,
    pub agreed: usize,
    pub excluded: Vec<(usize, String)>,
    pub disagreements: Vec<Disagreement>,
    /// Largest oracle time minus the executor's lower touch bound.
    pub max_gap: Option<Scalar>,
    pub max_gap_decimal: Option<String>,
    pub mean_gap: Option<f64>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the executor and the oracle on one scenario.
pub fn check(scenario: &Scenario, dt: &Scalar) -> Result<Agreement, Error> {
    let out = run_scenario(scenario)?;
    let verdict = oracle_run(&OracleConfig::new(scenario.clone()).with_dt(dt.clone()))?;
    let limit = scenario.later_start() + scenario.effective_budget();
    Ok(compare(&out.report, &verdict, dt, &limit))
}

pub fn verify_scenarios(seed: u64, generated: &[Generated], dt: &Scalar) -> VerifyReport {
    let checked: Vec<(usize, Result<Agreement, String>)> = generated
        .par_iter()
        .map(|g| (g.index, check(&g.scenario, dt).map_err(|e| e.to_string())))
        .collect();
    let mut report = VerifyReport {
        generator: GENERATOR.to_string(),
        seed,
        dt: dt.clone(),
        scenarios: generated.len(),
        agreed: 0,
        excluded: Vec::new(),
        disagreements: Vec::new(),
        max_gap: None,
        max_gap_decimal: None,
        mean_gap: None,
    };
    let mut gaps = Vec::new();
    for ((index, result), g) in checked.into_iter().zip(generated) {
        match result {
            Ok(Agreement::Agree { gap }) => {
                report.agreed += 1;
                gaps.extend(gap);
            }
            Ok(Agreement::Excluded { reason }) => report.excluded.push((index, reason)),
            Ok(Agreement::Disagree { reason }) | Err(reason) => {
                report.disagreements.push(Disagreement {
                    index,
                    reason,
                    scenario: g.scenario.clone(),
                })
            }
        }
    }
    if !gaps.is_empty() {
        let max = gaps.iter().max().cloned().expect("non-empty");
        report.max_gap_decimal = Some(max.to_decimal(12));
        report.max_gap = Some(max);
        report.mean_gap = Some(gaps.iter().map(Scalar::to_f64).sum::<f64>() / gaps.len() as f64);
    }
    report
}

pub fn run_verify(spec: &SweepSpec, dt: &Scalar) -> VerifyReport {
    verify_scenarios(spec.seed, &sweep_scenarios(spec), dt)
}
