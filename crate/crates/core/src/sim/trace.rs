//! Trace events and their JSONL encoding.
//!
//! Schema version 1: one JSON object per line with fields `v`, `seq`,
//! `time` (exact rational text), `time_dec` (12-digit decimal), `agent`
//! (`"a"`, `"b"` or null) and `kind`, plus kind-specific fields:
//!
//! | kind               | extra fields                          |
//! |--------------------|---------------------------------------|
//! | `appear`           | `pos`                                 |
//! | `action_end`       | `pos`                                 |
//! | `reading`          | `reading` (`absent`/`present`/`near`/`far`) |
//! | `action_begin`     | `action`, `phase`, `pos`              |
//! | `halt`             | `phase`, `pos`                        |
//! | `meeting`          | `touch`, `pos_a`, `pos_b`             |
//! | `budget_exhausted` | none                                  |
//!
//! Within one instant events are ordered `action_end`, `appear`, `reading`,
//! `action_begin`/`halt`, then `meeting`/`budget_exhausted`, and by agent
//! within a kind. For a `meeting` the `time` field holds the exact instant
//! when rational and the bracket midpoint otherwise.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::geometry::{Point, TouchTime};
use crate::kernel::{Action, AgentId, Phase};
use crate::scalar::Scalar;

pub const TRACE_SCHEMA_VERSION: u32 = 1;
pub const DECIMAL_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReadingRecord {
    Absent,
    Present,
    Near,
    Far,
}

/// Exact touch instant as printed in traces and reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TouchRecord {
    pub exact: Option<Scalar>,
    pub lo: Scalar,
    pub hi: Scalar,
    pub decimal: String,
    pub width: Scalar,
    pub tangential: bool,
}

impl From<&TouchTime> for TouchRecord {
    fn from(t: &TouchTime) -> Self {
        TouchRecord {
            exact: t.exact().cloned(),
            lo: t.lo().clone(),
            hi: t.hi().clone(),
            decimal: t.representative().to_decimal(DECIMAL_DIGITS),
            width: t.width(),
            tangential: t.is_tangential(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    ActionEnd {
        pos: Point,
    },
    Appear {
        pos: Point,
    },
    Reading {
        reading: ReadingRecord,
    },
    ActionBegin {
        action: Action,
        phase: Phase,
        pos: Point,
    },
    Halt {
        phase: Phase,
        pos: Point,
    },
    Meeting {
        touch: TouchRecord,
        pos_a: Point,
        pos_b: Point,
    },
    BudgetExhausted,
}

impl EventKind {
    /// Tie-break rank within one instant.
    pub fn rank(&self) -> u8 {
        match self {
            EventKind::ActionEnd { .. } => 0,
            EventKind::Appear { .. } => 1,
            EventKind::Reading { .. } => 2,
            EventKind::ActionBegin { .. } | EventKind::Halt { .. } => 3,
            EventKind::Meeting { .. } | EventKind::BudgetExhausted => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub v: u32,
    pub seq: u64,
    pub time: Scalar,
    pub time_dec: String,
    pub agent: Option<AgentId>,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl TraceEvent {
    pub fn new(seq: u64, time: Scalar, agent: Option<AgentId>, kind: EventKind) -> Self {
        TraceEvent {
            v: TRACE_SCHEMA_VERSION,
            seq,
            time_dec: time.to_decimal(DECIMAL_DIGITS),
            time,
            agent,
            kind,
        }
    }

    /// Total order key: time, kind rank, agent.
    pub fn order_key(&self) -> (&Scalar, u8, Option<AgentId>) {
        (&self.time, self.kind.rank(), self.agent)
    }
}

pub fn write_jsonl<W: Write>(events: &[TraceEvent], mut out: W) -> io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn to_jsonl(events: &[TraceEvent]) -> String {
    let mut buf = Vec::new();
    write_jsonl(events, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn read_jsonl(text: &str) -> Result<Vec<TraceEvent>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
