//! Continuous-time execution of two agent programs.

pub mod executor;
pub mod report;
pub mod scenario;
pub mod trace;

pub use executor::{
    run_scenario, AnyExecutor, BinarySensor, Executor, MonotoneSensor, RunOutput, Sensor, Status,
};
pub use report::{AgentPair, AgentSummary, BoundCheck, Bracket, MeetingReport, Outcome};
pub use scenario::{Model, Scenario};
pub use trace::{EventKind, ReadingRecord, TouchRecord, TraceEvent};

use crate::geometry::{MotionSegment, Point};
use crate::kernel::AgentId;
use crate::scalar::Scalar;

/// Piecewise-linear path of one agent rebuilt from a trace.
#[derive(Debug, Clone)]
pub struct Path {
    pub appear: Option<(Scalar, Point)>,
    /// Non-overlapping, sorted by start time.
    pub segments: Vec<MotionSegment>,
}

impl Path {
    /// Position at `t`, or `None` before the agent appears. Between and
    /// after segments the agent rests where the previous one ended.
    pub fn position_at(&self, t: &Scalar) -> Option<Point> {
        let (start, origin) = self.appear.as_ref()?;
        if t < start {
            return None;
        }
        let idx = self.segments.partition_point(|s| &s.start_time <= t);
        Some(match idx {
            0 => origin.clone(),
            i => {
                let seg = &self.segments[i - 1];
                if t <= &seg.end_time {
                    seg.position_at(t)
                } else {
                    seg.end_point()
                }
            }
        })
    }
}

/// Both agents' paths as recorded in a trace.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub paths: [Path; 2],
}

impl Trajectory {
    pub fn from_trace(events: &[TraceEvent]) -> Self {
        let mut paths = [
            Path {
                appear: None,
                segments: Vec::new(),
            },
            Path {
                appear: None,
                segments: Vec::new(),
            },
        ];
        for e in events {
            let Some(agent) = e.agent else { continue };
            let path = &mut paths[agent.index()];
            match &e.kind {
                EventKind::Appear { pos } => path.appear = Some((e.time.clone(), pos.clone())),
                EventKind::ActionBegin { action, pos, .. } => {
                    let duration = action.duration().expect("begun actions have durations");
                    let seg = MotionSegment::new(
                        e.time.clone(),
                        &e.time + duration,
                        pos.clone(),
                        action.velocity(),
                    )
                    .expect("durations are positive");
                    path.segments.push(seg);
                }
                _ => {}
            }
        }
        Trajectory { paths }
    }

    pub fn position_at(&self, agent: AgentId, t: &Scalar) -> Option<Point> {
        self.paths[agent.index()].position_at(t)
    }
}
