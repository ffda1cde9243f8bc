//! Event-driven executor for two agents on an exact global timeline.
//!
//! Between consecutive instants (appearances and action ends) both agents
//! move linearly, so the first touch in that interval is found exactly with
//! [`first_touch_time`]. A touch ends the run before any later reading is
//! delivered.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::report::{
    AgentPair, AgentSummary, BoundCheck, Bracket, MeetingReport, Outcome, REPORT_SCHEMA_VERSION,
};
use super::scenario::{Model, Scenario};
use super::trace::{EventKind, ReadingRecord, TouchRecord, TraceEvent};
use crate::binary::BinaryAgent;
use crate::error::{Error, SimulationError};
use crate::geometry::{
    first_touch_time, squared_distance, MotionSegment, Point, TouchTime, DEFAULT_BRACKET_BITS,
};
use crate::kernel::{
    Action, AgentId, AgentProgram, BinaryReading, LevelMap, MonotoneReading, Phase,
};
use crate::monotone::MonotoneAgent;
use crate::scalar::Scalar;

/// Turns the partner's presence and squared distance into a reading.
pub trait Sensor {
    type Reading;
    fn read(&self, partner_present: bool, dist_sq: &Scalar) -> (Self::Reading, ReadingRecord);
}

#[derive(Debug, Clone, Copy)]
pub struct MonotoneSensor(pub LevelMap);

impl Sensor for MonotoneSensor {
    type Reading = MonotoneReading;
    fn read(&self, partner_present: bool, dist_sq: &Scalar) -> (MonotoneReading, ReadingRecord) {
        let reading = self.0.sense(partner_present, dist_sq);
        let record = match reading {
            MonotoneReading::Absent => ReadingRecord::Absent,
            MonotoneReading::Present(_) => ReadingRecord::Present,
        };
        (reading, record)
    }
}

#[derive(Debug, Clone)]
pub struct BinarySensor {
    pub rho_sq: Scalar,
}

impl Sensor for BinarySensor {
    type Reading = BinaryReading;
    fn read(&self, partner_present: bool, dist_sq: &Scalar) -> (BinaryReading, ReadingRecord) {
        let reading = BinaryReading::sense(partner_present, dist_sq, &self.rho_sq);
        let record = match reading {
            BinaryReading::Near => ReadingRecord::Near,
            BinaryReading::Far => ReadingRecord::Far,
        };
        (reading, record)
    }
}

#[derive(Debug, Clone)]
enum Activity {
    Absent,
    /// Present and waiting for its reading at the current instant.
    Idle,
    Acting {
        segment: MotionSegment,
        phase: Phase,
    },
    Halted,
}

struct Slot<P> {
    id: AgentId,
    start: Scalar,
    program: P,
    /// Position at the last instant the activity changed.
    pos: Point,
    activity: Activity,
    phase_durations: BTreeMap<Phase, Scalar>,
    final_phase: Phase,
    actions: u64,
    vertical_gap_entering_horizontal: Option<Scalar>,
}

impl<P> Slot<P> {
    fn present(&self) -> bool {
        !matches!(self.activity, Activity::Absent)
    }

    fn position_at(&self, t: &Scalar) -> Point {
        match &self.activity {
            Activity::Acting { segment, .. } => segment.position_at(t),
            _ => self.pos.clone(),
        }
    }

    fn segment_over(&self, t0: &Scalar, t1: &Scalar) -> MotionSegment {
        match &self.activity {
            Activity::Acting { segment, .. } => segment.clone(),
            _ => MotionSegment::inert(t0.clone(), t1.clone(), self.pos.clone()).expect("t0 <= t1"),
        }
    }

    fn charge(&mut self, phase: Phase, duration: Scalar) {
        let entry = self.phase_durations.entry(phase).or_default();
        *entry += &duration;
    }
}

/// Where the executor stands after one advance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Running,
    Finished(Outcome),
}

pub struct Executor<P: AgentProgram, S: Sensor<Reading = P::Reading>> {
    scenario: Scenario,
    sensor: S,
    slots: [Slot<P>; 2],
    now: Scalar,
    limit: Scalar,
    bracket_bits: u32,
    trace: Vec<TraceEvent>,
    outcome: Option<Outcome>,
    touch: Option<TouchTime>,
}

/// Output of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: MeetingReport,
    pub trace: Vec<TraceEvent>,
}

impl<P: AgentProgram, S: Sensor<Reading = P::Reading>> Executor<P, S> {
    pub fn new(scenario: &Scenario, sensor: S, programs: [P; 2]) -> Result<Self, Error> {
        scenario.validate()?;
        let [prog_a, prog_b] = programs;
        let slot = |id, start: &Scalar, program, pos: &Point| Slot {
            id,
            start: start.clone(),
            program,
            pos: pos.clone(),
            activity: Activity::Absent,
            phase_durations: BTreeMap::new(),
            final_phase: Phase::Appearance,
            actions: 0,
            vertical_gap_entering_horizontal: None,
        };
        let first = scenario.start_a.clone().min(scenario.start_b.clone());
        let mut exec = Executor {
            sensor,
            slots: [
                slot(AgentId::A, &scenario.start_a, prog_a, &scenario.pos_a),
                slot(AgentId::B, &scenario.start_b, prog_b, &scenario.pos_b),
            ],
            now: first.clone(),
            limit: scenario.later_start() + scenario.effective_budget(),
            bracket_bits: DEFAULT_BRACKET_BITS,
            trace: Vec::new(),
            outcome: None,
            touch: None,
            scenario: scenario.clone(),
        };
        exec.process_instant(&first)?;
        Ok(exec)
    }

    pub fn with_bracket_bits(mut self, bits: u32) -> Self {
        self.bracket_bits = bits;
        self
    }

    pub fn now(&self) -> &Scalar {
        &self.now
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn programs(&self) -> [&P; 2] {
        [&self.slots[0].program, &self.slots[1].program]
    }

    fn emit(&mut self, time: Scalar, agent: Option<AgentId>, kind: EventKind) {
        let seq = self.trace.len() as u64;
        self.trace.push(TraceEvent::new(seq, time, agent, kind));
    }

    fn next_event_time(&self) -> Option<Scalar> {
        self.slots
            .iter()
            .filter_map(|s| match &s.activity {
                Activity::Absent => Some(s.start.clone()),
                Activity::Acting { segment, .. } => Some(segment.end_time.clone()),
                Activity::Idle | Activity::Halted => None,
            })
            .min()
    }

    /// Move the clock to the next appearance or action end, unless a touch
    /// or the budget ends the run first.
    pub fn advance_to_next_event(&mut self) -> Result<Status, Error> {
        if let Some(outcome) = self.outcome {
            return Ok(Status::Finished(outcome));
        }
        let Some(next) = self.next_event_time() else {
            self.finish(Outcome::BothHalted, self.now.clone());
            return Ok(Status::Finished(Outcome::BothHalted));
        };
        let horizon = if next <= self.limit {
            next.clone()
        } else {
            self.limit.clone()
        };
        if self.slots.iter().all(Slot::present) && horizon >= self.now {
            let seg_a = self.slots[0].segment_over(&self.now, &horizon);
            let seg_b = self.slots[1].segment_over(&self.now, &horizon);
            let touch = first_touch_time(
                &seg_a,
                &seg_b,
                &self.now,
                &horizon,
                &Scalar::one(),
                self.bracket_bits,
            )
            .expect("both segments cover the scanned interval");
            if let Some(touch) = touch {
                self.meet(touch);
                return Ok(Status::Finished(Outcome::Met));
            }
        }
        if next > self.limit {
            let limit = self.limit.clone();
            self.emit(limit.clone(), None, EventKind::BudgetExhausted);
            self.finish(Outcome::BudgetExhausted, limit);
            return Ok(Status::Finished(Outcome::BudgetExhausted));
        }
        self.now = next.clone();
        self.process_instant(&next)?;
        Ok(match self.outcome {
            Some(o) => Status::Finished(o),
            None => Status::Running,
        })
    }

    fn process_instant(&mut self, t: &Scalar) -> Result<(), Error> {
        let mut needs_reading = [false, false];
        for idx in 0..2 {
            let slot = &mut self.slots[idx];
            if let Activity::Acting { segment, phase } = &slot.activity {
                if &segment.end_time == t {
                    let (pos, phase, duration) = (
                        segment.end_point(),
                        *phase,
                        &segment.end_time - &segment.start_time,
                    );
                    slot.charge(phase, duration);
                    slot.pos = pos.clone();
                    slot.activity = Activity::Idle;
                    needs_reading[idx] = true;
                    let id = slot.id;
                    self.emit(t.clone(), Some(id), EventKind::ActionEnd { pos });
                }
            }
        }
        for idx in 0..2 {
            let slot = &mut self.slots[idx];
            if matches!(slot.activity, Activity::Absent) && &slot.start == t {
                slot.activity = Activity::Idle;
                needs_reading[idx] = true;
                let (id, pos) = (slot.id, slot.pos.clone());
                self.emit(t.clone(), Some(id), EventKind::Appear { pos });
            }
        }
        if self.slots.iter().all(Slot::present) {
            let d2 = squared_distance(&self.slots[0].position_at(t), &self.slots[1].position_at(t));
            if d2 <= Scalar::one() {
                let seg_a = self.slots[0].segment_over(t, t);
                let seg_b = self.slots[1].segment_over(t, t);
                let touch =
                    first_touch_time(&seg_a, &seg_b, t, t, &Scalar::one(), self.bracket_bits)
                        .expect("degenerate interval is covered")
                        .expect("already within touching distance");
                self.meet(touch);
                return Ok(());
            }
        }

        let mut readings: [Option<S::Reading>; 2] = [None, None];
        for idx in (0..2).filter(|&i| needs_reading[i]) {
            let partner = &self.slots[1 - idx];
            let partner_present = partner.present();
            let dist_sq = squared_distance(&self.slots[idx].pos, &partner.position_at(t));
            let (reading, record) = self.sensor.read(partner_present, &dist_sq);
            readings[idx] = Some(reading);
            let id = self.slots[idx].id;
            self.emit(t.clone(), Some(id), EventKind::Reading { reading: record });
        }
        for idx in 0..2 {
            let Some(reading) = readings[idx].take() else {
                continue;
            };
            let action = match self.slots[idx].program.step(reading) {
                Ok(action) => action,
                Err(violation) => {
                    return Err(SimulationError::Protocol {
                        agent: self.slots[idx].id,
                        violation,
                        trace: self.trace.clone(),
                    }
                    .into())
                }
            };
            self.begin(idx, t, action);
        }
        Ok(())
    }

    fn begin(&mut self, idx: usize, t: &Scalar, action: Action) {
        let other_y = self.slots[1 - idx].position_at(t).y;
        let slot = &mut self.slots[idx];
        let phase = slot.program.phase();
        slot.final_phase = phase;
        let (id, pos) = (slot.id, slot.pos.clone());
        match action.duration().cloned() {
            None => {
                slot.activity = Activity::Halted;
                self.emit(t.clone(), Some(id), EventKind::Halt { phase, pos });
            }
            Some(duration) => {
                if phase == Phase::HorizontalApproach
                    && slot.vertical_gap_entering_horizontal.is_none()
                {
                    slot.vertical_gap_entering_horizontal = Some((&pos.y - &other_y).abs());
                }
                let segment =
                    MotionSegment::new(t.clone(), t + &duration, pos.clone(), action.velocity())
                        .expect("durations are positive");
                slot.activity = Activity::Acting { segment, phase };
                slot.actions += 1;
                self.emit(
                    t.clone(),
                    Some(id),
                    EventKind::ActionBegin { action, phase, pos },
                );
            }
        }
    }

    fn meet(&mut self, touch: TouchTime) {
        let at = touch.representative();
        let record = TouchRecord::from(&touch);
        let pos_a = self.slots[0].position_at(&at);
        let pos_b = self.slots[1].position_at(&at);
        self.emit(
            at.clone(),
            None,
            EventKind::Meeting {
                touch: record,
                pos_a,
                pos_b,
            },
        );
        let charge_until = touch.hi().clone();
        self.touch = Some(touch);
        self.settle_partial(&charge_until, &at);
        self.now = at.clone();
        self.outcome = Some(Outcome::Met);
    }

    fn finish(&mut self, outcome: Outcome, at: Scalar) {
        self.settle_partial(&at, &at);
        self.now = at;
        self.outcome = Some(outcome);
    }

    /// Charge interrupted actions up to `charge_until` and freeze positions
    /// at `at`.
    fn settle_partial(&mut self, charge_until: &Scalar, at: &Scalar) {
        for slot in &mut self.slots {
            if let Activity::Acting { segment, phase } = slot.activity.clone() {
                let end = charge_until.clone().min(segment.end_time.clone());
                slot.charge(phase, end - &segment.start_time);
                slot.pos = segment.position_at(at);
            }
        }
    }

    pub fn run(mut self) -> Result<RunOutput, Error> {
        while self.advance_to_next_event()? == Status::Running {}
        let report = self.build_report();
        Ok(RunOutput {
            report,
            trace: self.trace,
        })
    }

    fn build_report(&self) -> MeetingReport {
        let s = &self.scenario;
        let later = s.later_start();
        let (x, y) = (s.vertical_gap(), s.horizontal_gap());
        let outcome = self.outcome.expect("run finished");
        let touch = self.touch.as_ref();
        let time_from_later_start = touch.map(|t| {
            let (lo, hi) = t.bracket_minus(&later);
            Bracket::new(lo, hi)
        });
        let bound = match s.model {
            Model::Monotone => {
                let (name, extra, strict) = if s.simultaneous() {
                    ("x+y+5", 5, true)
                } else {
                    ("x+y+8", 8, false)
                };
                let limit = &x + &y + Scalar::from_int(extra);
                let deadline = &later + &limit;
                let holds = touch.is_some_and(|t| match t.cmp_scalar(&deadline) {
                    Ordering::Less => true,
                    Ordering::Equal => !strict,
                    Ordering::Greater => false,
                });
                Some(BoundCheck {
                    name: name.to_string(),
                    limit,
                    holds: Some(holds),
                })
            }
            Model::Binary => s.rho.as_ref().map(|rho| BoundCheck {
                name: "rho*lambda".to_string(),
                limit: rho * Scalar::from(s.space.lambda() as u64),
                holds: None,
            }),
        };
        let d2 = s.initial_distance_sq();
        let summary = |slot: &Slot<P>, label: u64| AgentSummary {
            label,
            transformed_label: s
                .space
                .transform(label)
                .map(|t| t.to_string())
                .unwrap_or_default(),
            start: slot.start.clone(),
            phase_durations: slot.phase_durations.clone(),
            final_phase: slot.final_phase,
            final_position: slot.position_at(&self.now),
            actions: slot.actions,
            leading: slot.program.leading(),
            vertical_gap_entering_horizontal: slot.vertical_gap_entering_horizontal.clone(),
        };
        MeetingReport {
            schema_version: REPORT_SCHEMA_VERSION,
            model: s.model,
            outcome,
            met: outcome == Outcome::Met,
            out_of_contract: s.out_of_contract(),
            simultaneous: s.simultaneous(),
            touch: touch.map(TouchRecord::from),
            time_from_later_start,
            later_start: later,
            end_time: self.now.clone(),
            initial_distance: d2.sqrt_floor(48).to_decimal(super::trace::DECIMAL_DIGITS),
            initial_distance_sq: d2,
            x,
            y,
            rho: s.rho.clone(),
            lambda: s.space.lambda(),
            first_differing_bit: s.first_differing_bit(),
            bound,
            agents: AgentPair {
                a: summary(&self.slots[0], s.label_a),
                b: summary(&self.slots[1], s.label_b),
            },
            trace_events: self.trace.len(),
        }
    }
}

/// Executor specialised to the scenario's sensing model.
pub enum AnyExecutor {
    Monotone(Executor<MonotoneAgent, MonotoneSensor>),
    Binary(Executor<BinaryAgent, BinarySensor>),
}

impl AnyExecutor {
    pub fn new(scenario: &Scenario) -> Result<Self, Error> {
        scenario.validate()?;
        let ta = scenario.space.transform(scenario.label_a)?;
        let tb = scenario.space.transform(scenario.label_b)?;
        Ok(match scenario.model {
            Model::Monotone => AnyExecutor::Monotone(Executor::new(
                scenario,
                MonotoneSensor(scenario.distortion.unwrap_or_default()),
                [MonotoneAgent::new(ta), MonotoneAgent::new(tb)],
            )?),
            Model::Binary => {
                let rho_sq = scenario
                    .rho_sq()
                    .expect("validated binary scenario has rho");
                let strict = scenario.strict_paper_loop;
                AnyExecutor::Binary(Executor::new(
                    scenario,
                    BinarySensor { rho_sq },
                    [BinaryAgent::new(ta, strict), BinaryAgent::new(tb, strict)],
                )?)
            }
        })
    }

    pub fn advance_to_next_event(&mut self) -> Result<Status, Error> {
        match self {
            AnyExecutor::Monotone(e) => e.advance_to_next_event(),
            AnyExecutor::Binary(e) => e.advance_to_next_event(),
        }
    }

    pub fn now(&self) -> &Scalar {
        match self {
            AnyExecutor::Monotone(e) => e.now(),
            AnyExecutor::Binary(e) => e.now(),
        }
    }

    pub fn trace(&self) -> &[TraceEvent] {
        match self {
            AnyExecutor::Monotone(e) => e.trace(),
            AnyExecutor::Binary(e) => e.trace(),
        }
    }

    pub fn run(self) -> Result<RunOutput, Error> {
        match self {
            AnyExecutor::Monotone(e) => e.run(),
            AnyExecutor::Binary(e) => e.run(),
        }
    }
}

/// Simulate a scenario until the agents touch, both halt, or the budget
/// runs out.
pub fn run_scenario(scenario: &Scenario) -> Result<RunOutput, Error> {
    AnyExecutor::new(scenario)?.run()
}
