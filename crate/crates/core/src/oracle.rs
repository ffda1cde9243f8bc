//! Dense-sampling reference engine.
//!
//! Replays the same agent programs on its own event loop and declares a
//! meeting at the first sampled instant with squared distance at most 1.
//! Samples are the grid `later_start + k*dt` plus every event instant. It
//! never solves for touch times, so it fails independently of the executor.
//!
//! Each agent moves at speed at most 1, so the distance shrinks by at most
//! `2 * elapsed`. Grid points that cannot reach distance 1 by that bound are
//! skipped without being evaluated; this is exact, not a heuristic.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::binary::BinaryAgent;
use crate::error::{Error, InputError, SimulationError};
use crate::geometry::{squared_distance, MotionSegment, Point};
use crate::kernel::{AgentId, AgentProgram};
use crate::monotone::MonotoneAgent;
use crate::scalar::Scalar;
use crate::sim::executor::{BinarySensor, MonotoneSensor, Sensor};
use crate::sim::{MeetingReport, Model, Scenario};

/// Bits kept when bounding distances from below for the skip.
const SKIP_SQRT_BITS: u32 = 20;

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub dt: Scalar,
    pub scenario: Scenario,
    /// Evaluate and keep every grid sample; disables skipping.
    pub record_samples: bool,
}

impl OracleConfig {
    pub fn new(scenario: Scenario) -> Self {
        OracleConfig {
            dt: default_dt(),
            scenario,
            record_samples: false,
        }
    }

    pub fn with_dt(mut self, dt: Scalar) -> Self {
        self.dt = dt;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_samples = true;
        self
    }
}

/// `2^-10`.
pub fn default_dt() -> Scalar {
    Scalar::pow2_neg(10)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub time: Scalar,
    pub pos_a: Option<Point>,
    pub pos_b: Option<Point>,
    pub dist_sq: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub met: bool,
    /// First sampled instant with squared distance at most 1.
    pub time: Option<Scalar>,
    /// Number of instants at which the distance was evaluated.
    pub evaluated: u64,
    pub samples: Vec<Sample>,
}

struct Agent<P> {
    start: Scalar,
    program: P,
    pos: Point,
    present: bool,
    segment: Option<MotionSegment>,
}

impl<P> Agent<P> {
    fn position_at(&self, t: &Scalar) -> Point {
        match &self.segment {
            Some(seg) => seg.position_at(t),
            None => self.pos.clone(),
        }
    }

    fn next_event(&self) -> Option<Scalar> {
        if !self.present {
            return Some(self.start.clone());
        }
        self.segment.as_ref().map(|s| s.end_time.clone())
    }
}

pub fn oracle_run(cfg: &OracleConfig) -> Result<OracleVerdict, Error> {
    let s = &cfg.scenario;
    s.validate()?;
    if !cfg.dt.is_positive() {
        return Err(InputError::NonPositiveStep(cfg.dt.to_string()).into());
    }
    let ta = s.space.transform(s.label_a)?;
    let tb = s.space.transform(s.label_b)?;
    match s.model {
        Model::Monotone => Sampler::new(
            cfg,
            MonotoneSensor(s.distortion.unwrap_or_default()),
            [MonotoneAgent::new(ta), MonotoneAgent::new(tb)],
        )
        .run(),
        Model::Binary => {
            let rho_sq = s.rho_sq().expect("validated binary scenario has rho");
            let strict = s.strict_paper_loop;
            Sampler::new(
                cfg,
                BinarySensor { rho_sq },
                [BinaryAgent::new(ta, strict), BinaryAgent::new(tb, strict)],
            )
            .run()
        }
    }
}

struct Sampler<'a, P, S> {
    cfg: &'a OracleConfig,
    sensor: S,
    agents: [Agent<P>; 2],
    later: Scalar,
    limit: Scalar,
    verdict: OracleVerdict,
}

impl<'a, P: AgentProgram, S: Sensor<Reading = P::Reading>> Sampler<'a, P, S> {
    fn new(cfg: &'a OracleConfig, sensor: S, programs: [P; 2]) -> Self {
        let s = &cfg.scenario;
        let [pa, pb] = programs;
        let agent = |start: &Scalar, program, pos: &Point| Agent {
            start: start.clone(),
            program,
            pos: pos.clone(),
            present: false,
            segment: None,
        };
        let later = s.later_start();
        Sampler {
            cfg,
            sensor,
            agents: [
                agent(&s.start_a, pa, &s.pos_a),
                agent(&s.start_b, pb, &s.pos_b),
            ],
            limit: &later + s.effective_budget(),
            later,
            verdict: OracleVerdict {
                met: false,
                time: None,
                evaluated: 0,
                samples: Vec::new(),
            },
        }
    }

    fn grid_time(&self, k: &Scalar) -> Scalar {
        &self.later + k * &self.cfg.dt
    }

    /// Evaluates the distance at `t`; the flag reports a meeting.
    fn sample(&mut self, t: &Scalar, record: bool) -> (bool, Option<Scalar>) {
        let both = self.agents.iter().all(|a| a.present);
        let pa = self.agents[0]
            .present
            .then(|| self.agents[0].position_at(t));
        let pb = self.agents[1]
            .present
            .then(|| self.agents[1].position_at(t));
        let d2 = match (&pa, &pb) {
            (Some(a), Some(b)) => Some(squared_distance(a, b)),
            _ => None,
        };
        if both {
            self.verdict.evaluated += 1;
        }
        if record {
            self.verdict.samples.push(Sample {
                time: t.clone(),
                pos_a: pa,
                pos_b: pb,
                dist_sq: d2.clone(),
            });
        }
        let met = both && d2.as_ref().is_some_and(|d| d <= &Scalar::one());
        if met {
            self.verdict.met = true;
            self.verdict.time = Some(t.clone());
        }
        (met, d2)
    }

    /// Grid index of the next sample worth evaluating after index `k`.
    fn next_index(&self, k: &Scalar, dist_sq: Option<&Scalar>) -> Scalar {
        let step = Scalar::one();
        let Some(d2) = dist_sq.filter(|_| !self.cfg.record_samples) else {
            return k + step;
        };
        let lower = d2.sqrt_floor(SKIP_SQRT_BITS);
        let slack = &lower - Scalar::one();
        if !slack.is_positive() {
            return k + step;
        }
        let jumps = Scalar::from_bigint((slack / (Scalar::from_int(2) * &self.cfg.dt)).ceil());
        k + jumps.max(step)
    }

    fn run(mut self) -> Result<OracleVerdict, Error> {
        let mut k = Scalar::zero();
        let mut grid = self.grid_time(&k);
        loop {
            let next_event = self.agents.iter().filter_map(Agent::next_event).min();
            let event_first = match &next_event {
                Some(e) => e <= &grid,
                None => false,
            };
            if event_first {
                let t = next_event.expect("checked above");
                if t > self.limit {
                    break;
                }
                self.process_events(&t)?;
                let on_grid = t == grid;
                let (met, d2) = self.sample(&t, on_grid && self.cfg.record_samples);
                if met {
                    break;
                }
                if on_grid {
                    k = self.next_index(&k, d2.as_ref());
                    grid = self.grid_time(&k);
                }
                continue;
            }
            if grid > self.limit {
                break;
            }
            if next_event.is_none() && !self.cfg.record_samples {
                // Nothing will move again; one evaluation decides.
                self.sample(&grid, false);
                break;
            }
            let (met, d2) = self.sample(&grid.clone(), self.cfg.record_samples);
            if met {
                break;
            }
            k = self.next_index(&k, d2.as_ref());
            grid = self.grid_time(&k);
        }
        Ok(self.verdict)
    }

    fn process_events(&mut self, t: &Scalar) -> Result<(), Error> {
        let mut reads = [false, false];
        for (i, a) in self.agents.iter_mut().enumerate() {
            if let Some(seg) = &a.segment {
                if &seg.end_time == t {
                    a.pos = seg.end_point();
                    a.segment = None;
                    reads[i] = true;
                }
            }
        }
        for (i, a) in self.agents.iter_mut().enumerate() {
            if !a.present && &a.start == t {
                a.present = true;
                reads[i] = true;
            }
        }
        let mut readings = [None, None];
        for i in (0..2).filter(|&i| reads[i]) {
            let other = &self.agents[1 - i];
            let d2 = squared_distance(&self.agents[i].pos, &other.position_at(t));
            readings[i] = Some(self.sensor.read(other.present, &d2).0);
        }
        for (i, reading) in readings.into_iter().enumerate() {
            let Some(reading) = reading else { continue };
            let a = &mut self.agents[i];
            let action =
                a.program
                    .step(reading)
                    .map_err(|violation| SimulationError::Protocol {
                        agent: if i == 0 { AgentId::A } else { AgentId::B },
                        violation,
                        trace: Vec::new(),
                    })?;
            if let Some(d) = action.duration() {
                let seg = MotionSegment::new(t.clone(), t + d, a.pos.clone(), action.velocity())
                    .expect("durations are positive");
                a.segment = Some(seg);
            }
        }
        Ok(())
    }
}

/// How one executor report compares with the oracle verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Agreement {
    /// Same verdict; `gap` is oracle time minus the executor's lower touch
    /// bound when both met.
    Agree {
        gap: Option<Scalar>,
    },
    /// Not comparable by sampling: tangential touch, or a touch within `dt`
    /// of the budget.
    Excluded {
        reason: String,
    },
    Disagree {
        reason: String,
    },
}

impl Agreement {
    pub fn is_disagreement(&self) -> bool {
        matches!(self, Agreement::Disagree { .. })
    }
}

pub fn compare(
    report: &MeetingReport,
    verdict: &OracleVerdict,
    dt: &Scalar,
    limit: &Scalar,
) -> Agreement {
    if let Some(touch) = &report.touch {
        if touch.tangential {
            return Agreement::Excluded {
                reason: "tangential touch".into(),
            };
        }
        if &(&touch.hi + dt) > limit {
            return Agreement::Excluded {
                reason: "touch within dt of the budget".into(),
            };
        }
    }
    match (report.met, verdict.time.as_ref()) {
        (false, None) => Agreement::Agree { gap: None },
        (true, None) => Agreement::Disagree {
            reason: "executor met, oracle did not".into(),
        },
        (false, Some(t)) => Agreement::Disagree {
            reason: format!("oracle met at {t}, executor did not"),
        },
        (true, Some(t)) => {
            let touch = report.touch.as_ref().expect("met reports carry a touch");
            let late = &touch.hi + dt;
            match (t.cmp(&touch.lo), t.cmp(&late)) {
                (Ordering::Less, _) => Agreement::Disagree {
                    reason: format!(
                        "oracle time {t} before touch bracket [{}, {}]",
                        touch.lo, touch.hi
                    ),
                },
                (_, Ordering::Greater) => Agreement::Disagree {
                    reason: format!("oracle time {t} later than touch + dt ({late})"),
                },
                _ => Agreement::Agree {
                    gap: Some(t - &touch.lo),
                },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::LabelSpace;

    #[test]
    fn static_pair_at_distance_one_meets_at_first_sample() {
        let s = Scenario::monotone(
            LabelSpace::new(4).unwrap(),
            (1, 2),
            Point::from_ints(0, 0),
            Point::from_ints(0, 1),
        );
        let v = oracle_run(&OracleConfig::new(s)).unwrap();
        assert!(v.met);
        assert_eq!(v.time, Some(Scalar::zero()));
    }

    #[test]
    fn skip_evaluates_far_fewer_samples() {
        let s = Scenario::monotone(
            LabelSpace::new(4).unwrap(),
            (1, 2),
            Point::from_ints(0, 0),
            Point::from_ints(0, 10),
        )
        .with_starts(Scalar::zero(), Scalar::from_int(5));
        let dense = oracle_run(&OracleConfig::new(s.clone()).recording()).unwrap();
        let sparse = oracle_run(&OracleConfig::new(s)).unwrap();
        assert_eq!(dense.time, sparse.time);
        assert!(
            sparse.evaluated * 4 < dense.evaluated,
            "{} vs {}",
            sparse.evaluated,
            dense.evaluated
        );
    }

    #[test]
    fn rejects_non_positive_step() {
        let s = Scenario::monotone(
            LabelSpace::new(4).unwrap(),
            (1, 2),
            Point::from_ints(0, 0),
            Point::from_ints(0, 3),
        );
        let cfg = OracleConfig::new(s).with_dt(Scalar::zero());
        assert!(matches!(
            oracle_run(&cfg),
            Err(Error::Input(InputError::NonPositiveStep(_)))
        ));
    }
}
