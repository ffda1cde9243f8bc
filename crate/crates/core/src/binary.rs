//! Meeting algorithm for the binary sensing model.
//!
//! Agents that sense each other on appearance walk North or wait, one label
//! bit at a time and for doubling durations, until contact is lost. Each
//! pass ends with a North move common to all labels, so an agent alone in
//! the plane drifts away even when its label is all zeros. Contact can only
//! be lost while one agent moves and the other waits, so exactly one agent
//! (the leading one) learns it moved away. The other halts. The
//! leading agent then locates the two points of its vertical line at
//! distance rho from the halted agent, returns to their midpoint, which lies
//! on the halted agent's horizontal line up to the step error, and sweeps
//! that line East and West with doubling leaps.

use crate::error::ProtocolViolation;
use crate::geometry::Direction;
use crate::kernel::{Action, AgentProgram, BinaryReading, Phase};
use crate::labels::TransformedLabel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    AwaitAppearance,
    LoseContact,
    ReturnSouth,
    TriangleDescent,
    MidpointReturn,
    /// Leg 0: East `d`, leg 1: West `2d`, leg 2: East `d`.
    Leap(u8),
    Halted,
}

/// Program state of one agent running the binary-model algorithm.
#[derive(Debug, Clone)]
pub struct BinaryAgent {
    label: TransformedLabel,
    strict_loop: bool,
    stage: Stage,
    /// Pass length in `LoseContact`, leap length in the final sweep.
    d: Scalar,
    /// Next bit to process (1-based) in the current pass.
    bit: usize,
    /// Bit whose processing lost contact.
    lost_at: usize,
    leading: Option<bool>,
    /// Half-unit steps taken South during the triangle descent.
    descent_steps: u64,
    passes: u32,
}

impl BinaryAgent {
    /// `strict_loop` reproduces the published inner loop: bits `1..lambda`
    /// and no closing move. The default processes every bit, then the
    /// closing move as bit `lambda + 1`.
    pub fn new(label: TransformedLabel, strict_loop: bool) -> Self {
        BinaryAgent {
            label,
            strict_loop,
            stage: Stage::AwaitAppearance,
            d: Scalar::one(),
            bit: 1,
            lost_at: 0,
            leading: None,
            descent_steps: 0,
            passes: 0,
        }
    }

    fn last_bit(&self) -> usize {
        if self.strict_loop {
            self.label.len() - 1
        } else {
            self.label.len() + 1
        }
    }

    /// Label bit `i`, with the closing move at `lambda + 1` counting as 1.
    fn moves_on(&self, i: usize) -> bool {
        i > self.label.len() || self.label.bit(i)
    }

    /// Number of completed or started `LoseContact` passes.
    pub fn passes(&self) -> u32 {
        self.passes
    }

    /// Bit index during which contact was lost.
    pub fn contact_lost_at(&self) -> Option<usize> {
        (self.lost_at > 0).then_some(self.lost_at)
    }

    pub fn descent_steps(&self) -> u64 {
        self.descent_steps
    }

    fn bit_action(&mut self) -> Action {
        self.stage = Stage::LoseContact;
        if self.moves_on(self.bit) {
            Action::go(Direction::N, self.d.clone())
        } else {
            Action::wait(self.d.clone())
        }
    }

    fn start_pass(&mut self) -> Result<Action, ProtocolViolation> {
        if self.last_bit() == 0 {
            return Err(ProtocolViolation::EmptyLabelLoop(self.label.len()));
        }
        self.passes += 1;
        self.bit = 1;
        Ok(self.bit_action())
    }

    fn half_step(&mut self, direction: Direction, stage: Stage) -> Action {
        self.stage = stage;
        Action::go(direction, Scalar::ratio(1, 2))
    }
}

impl AgentProgram for BinaryAgent {
    type Reading = BinaryReading;

    fn step(&mut self, reading: BinaryReading) -> Result<Action, ProtocolViolation> {
        let near = reading == BinaryReading::Near;
        match self.stage {
            Stage::AwaitAppearance => {
                if near {
                    self.start_pass()
                } else {
                    self.stage = Stage::Halted;
                    Ok(Action::HaltForever)
                }
            }
            Stage::LoseContact => {
                self.bit += 1;
                if near {
                    if self.bit <= self.last_bit() {
                        return Ok(self.bit_action());
                    }
                    self.d = &self.d * Scalar::from_int(2);
                    return self.start_pass();
                }
                self.lost_at = self.bit - 1;
                if self.moves_on(self.lost_at) {
                    self.leading = Some(true);
                    Ok(self.half_step(Direction::S, Stage::ReturnSouth))
                } else {
                    self.leading = Some(false);
                    self.stage = Stage::Halted;
                    Ok(Action::HaltForever)
                }
            }
            Stage::ReturnSouth => {
                if near {
                    // TriangleSearch: first step South is unconditional
                    self.descent_steps = 0;
                    Ok(self.half_step(Direction::S, Stage::TriangleDescent))
                } else {
                    Ok(self.half_step(Direction::S, Stage::ReturnSouth))
                }
            }
            Stage::TriangleDescent => {
                self.descent_steps += 1;
                if near {
                    return Ok(self.half_step(Direction::S, Stage::TriangleDescent));
                }
                let back = self.descent_steps.div_ceil(2);
                self.stage = Stage::MidpointReturn;
                Ok(Action::go(
                    Direction::N,
                    Scalar::from(back) * Scalar::ratio(1, 2),
                ))
            }
            Stage::MidpointReturn => {
                self.d = Scalar::one();
                self.stage = Stage::Leap(0);
                Ok(Action::go(Direction::E, self.d.clone()))
            }
            Stage::Leap(leg) => {
                let action = match leg {
                    0 => Action::go(Direction::W, &self.d * Scalar::from_int(2)),
                    1 => Action::go(Direction::E, self.d.clone()),
                    _ => {
                        self.d = &self.d * Scalar::from_int(2);
                        Action::go(Direction::E, self.d.clone())
                    }
                };
                self.stage = Stage::Leap((leg + 1) % 3);
                Ok(action)
            }
            Stage::Halted => Err(ProtocolViolation::ReadingAfterHalt),
        }
    }

    fn phase(&self) -> Phase {
        match self.stage {
            Stage::AwaitAppearance => Phase::Appearance,
            Stage::LoseContact => Phase::LoseContact,
            Stage::ReturnSouth => Phase::ReturnSouth,
            Stage::TriangleDescent => Phase::TriangleDescent,
            Stage::MidpointReturn => Phase::MidpointReturn,
            Stage::Leap(_) => Phase::HorizontalLeaps,
            Stage::Halted => Phase::InertForever,
        }
    }

    fn leading(&self) -> Option<bool> {
        self.leading
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::LabelSpace;
    use BinaryReading::{Far, Near};

    fn agent(label: u64, size: u64, strict: bool) -> BinaryAgent {
        BinaryAgent::new(
            LabelSpace::new(size).unwrap().transform(label).unwrap(),
            strict,
        )
    }

    fn mv(d: Direction, num: i64, den: i64) -> Action {
        Action::go(d, Scalar::ratio(num, den))
    }

    #[test]
    fn far_on_appearance_halts() {
        let mut a = agent(1, 4, false);
        assert_eq!(a.step(Far), Ok(Action::HaltForever));
        assert_eq!(a.phase(), Phase::InertForever);
        assert_eq!(a.step(Near), Err(ProtocolViolation::ReadingAfterHalt));
    }

    #[test]
    fn first_bit_decides_move_or_wait() {
        // L = 4: label 2 = 10, label 1 = 01
        assert_eq!(agent(2, 4, false).step(Near), Ok(mv(Direction::N, 1, 1)));
        assert_eq!(
            agent(1, 4, false).step(Near),
            Ok(Action::wait(Scalar::one()))
        );
    }

    #[test]
    fn passes_double_and_cover_every_bit() {
        let mut a = agent(1, 4, false); // 01
        assert_eq!(a.step(Near), Ok(Action::wait(Scalar::from_int(1))));
        assert_eq!(a.step(Near), Ok(mv(Direction::N, 1, 1)));
        assert_eq!(a.step(Near), Ok(mv(Direction::N, 1, 1)));
        assert_eq!(a.step(Near), Ok(Action::wait(Scalar::from_int(2))));
        assert_eq!(a.step(Near), Ok(mv(Direction::N, 2, 1)));
        assert_eq!(a.passes(), 2);
    }

    #[test]
    fn zero_label_still_moves_once_per_pass() {
        let mut a = agent(0, 4, false); // 00
        assert_eq!(a.step(Near), Ok(Action::wait(Scalar::from_int(1))));
        assert_eq!(a.step(Near), Ok(Action::wait(Scalar::from_int(1))));
        assert_eq!(a.step(Near), Ok(mv(Direction::N, 1, 1)));
        assert_eq!(a.step(Far), Ok(mv(Direction::S, 1, 2)));
        assert_eq!(a.leading(), Some(true));
        assert_eq!(a.contact_lost_at(), Some(3));
    }

    #[test]
    fn strict_zero_label_never_moves() {
        let mut a = agent(0, 8, true); // 000
        for d in [1, 1, 2, 2, 4, 4] {
            assert_eq!(a.step(Near), Ok(Action::wait(Scalar::from_int(d))));
        }
    }

    #[test]
    fn strict_loop_skips_last_bit() {
        let mut a = agent(1, 4, true); // 01: only bit 1 is ever processed
        assert_eq!(a.step(Near), Ok(Action::wait(Scalar::from_int(1))));
        assert_eq!(a.step(Near), Ok(Action::wait(Scalar::from_int(2))));
        assert_eq!(a.step(Near), Ok(Action::wait(Scalar::from_int(4))));
    }

    #[test]
    fn strict_loop_with_one_bit_labels_cannot_progress() {
        let mut a = agent(1, 2, true);
        assert_eq!(a.step(Near), Err(ProtocolViolation::EmptyLabelLoop(1)));
    }

    #[test]
    fn waiting_agent_that_loses_contact_halts() {
        let mut a = agent(1, 4, false);
        a.step(Near).unwrap();
        assert_eq!(a.step(Far), Ok(Action::HaltForever));
        assert_eq!(a.leading(), Some(false));
        assert_eq!(a.contact_lost_at(), Some(1));
    }

    #[test]
    fn leading_agent_full_search_sequence() {
        let mut a = agent(2, 4, false); // 10
        assert_eq!(a.step(Near), Ok(mv(Direction::N, 1, 1)));
        assert_eq!(a.step(Far), Ok(mv(Direction::S, 1, 2)));
        assert_eq!(a.leading(), Some(true));
        assert_eq!(a.phase(), Phase::ReturnSouth);
        assert_eq!(a.step(Far), Ok(mv(Direction::S, 1, 2)));
        // contact regained: descent starts with an unconditional step
        assert_eq!(a.step(Near), Ok(mv(Direction::S, 1, 2)));
        assert_eq!(a.phase(), Phase::TriangleDescent);
        assert_eq!(a.step(Near), Ok(mv(Direction::S, 1, 2)));
        assert_eq!(a.step(Near), Ok(mv(Direction::S, 1, 2)));
        // t = 3 steps: back North by ceil(3/2) / 2 = 1
        assert_eq!(a.step(Far), Ok(mv(Direction::N, 1, 1)));
        assert_eq!(a.descent_steps(), 3);
        assert_eq!(a.step(Far), Ok(mv(Direction::E, 1, 1)));
        assert_eq!(a.step(Far), Ok(mv(Direction::W, 2, 1)));
        assert_eq!(a.step(Far), Ok(mv(Direction::E, 1, 1)));
        assert_eq!(a.step(Near), Ok(mv(Direction::E, 2, 1)));
        assert_eq!(a.step(Far), Ok(mv(Direction::W, 4, 1)));
        assert_eq!(a.phase(), Phase::HorizontalLeaps);
    }
}
