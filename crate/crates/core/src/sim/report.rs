use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scenario::Model;
use super::trace::{TouchRecord, DECIMAL_DIGITS};
use crate::geometry::Point;
use crate::kernel::Phase;
use crate::scalar::Scalar;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Met,
    BothHalted,
    BudgetExhausted,
}

/// A rational interval `[lo, hi]` containing a possibly irrational value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: Scalar,
    pub hi: Scalar,
    pub decimal: String,
}

impl Bracket {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        let decimal = lo.midpoint(&hi).to_decimal(DECIMAL_DIGITS);
        Bracket { lo, hi, decimal }
    }
}

/// Comparison of the meeting time with a reference bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// `x+y+8`, `x+y+5` or `rho*lambda`.
    pub name: String,
    pub limit: Scalar,
    /// `None` when the bound is a reference scale rather than a guarantee.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSummary {
    pub label: u64,
    pub transformed_label: String,
    pub start: Scalar,
    /// Time spent per procedure. An action cut short by an irrational touch
    /// instant is charged up to the upper end of the touch bracket.
    pub phase_durations: BTreeMap<Phase, Scalar>,
    pub final_phase: Phase,
    pub final_position: Point,
    pub actions: u64,
    /// Binary model: symmetry-breaking flag once decided.
    pub leading: Option<bool>,
    /// Monotone model: vertical separation when this agent began its
    /// horizontal approach.
    pub vertical_gap_entering_horizontal: Option<Scalar>,
}

impl AgentSummary {
    pub fn phase_time(&self, phase: Phase) -> Scalar {
        self.phase_durations
            .get(&phase)
            .cloned()
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentPair {
    pub a: AgentSummary,
    pub b: AgentSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeetingReport {
    pub schema_version: u32,
    pub model: Model,
    pub outcome: Outcome,
    pub met: bool,
    pub out_of_contract: bool,
    pub simultaneous: bool,
    pub touch: Option<TouchRecord>,
    /// Touch instant minus the later start.
    pub time_from_later_start: Option<Bracket>,
    pub later_start: Scalar,
    pub end_time: Scalar,
    pub initial_distance_sq: Scalar,
    pub initial_distance: String,
    /// Initial vertical separation.
    pub x: Scalar,
    /// Initial horizontal separation.
    pub y: Scalar,
    pub rho: Option<Scalar>,
    pub lambda: usize,
    pub first_differing_bit: Option<usize>,
    pub bound: Option<BoundCheck>,
    pub agents: AgentPair,
    pub trace_events: usize,
}

impl MeetingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Upper end of the meeting time measured from the later start.
    pub fn time_upper(&self) -> Option<&Scalar> {
        self.time_from_later_start.as_ref().map(|b| &b.hi)
    }

    pub fn time_lower(&self) -> Option<&Scalar> {
        self.time_from_later_start.as_ref().map(|b| &b.lo)
    }
}
