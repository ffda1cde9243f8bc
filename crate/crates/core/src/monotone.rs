//! Meeting algorithm for the monotone sensing model.
//!
//! The program first approaches its partner vertically, then horizontally.
//! An absent partner on appearance means the partner arrives later, so the
//! agent stays put. Otherwise two unit moves North reveal whether the
//! partner is inert (the distance changes) or started simultaneously (it
//! does not); in the latter case a label-driven dance with halving step
//! lengths breaks the symmetry before both agents approach each other.
//!
//! Every procedure is expressed as a stage of an explicit state machine:
//! each reading is delivered at the end of the action chosen in the
//! previous step.

use crate::error::ProtocolViolation;
use crate::geometry::Direction;
use crate::kernel::{compare_levels, Action, AgentProgram, Compare, Level, MonotoneReading, Phase};
use crate::labels::TransformedLabel;
use crate::scalar::Scalar;

/// Axis an approach works on; decides what follows once it is done.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Vertical,
    Horizontal,
}

/// Parameters of one `GetCloser` loop.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Approach {
    direction: Direction,
    step: Scalar,
    axis: Axis,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Stage {
    AwaitAppearance,
    /// First `move(N, 1)` of the vertical approach.
    FirstNorth,
    /// Second `move(N, 1)` after an unchanged distance.
    SecondNorth,
    /// A move undoing the previous one; the approach starts once it ends.
    Backtrack(Approach),
    /// Inside `GetCloser`.
    Approaching(Approach),
    /// Dance move for bit `bit`, `attempt` 1 or 2.
    Dance {
        bit: usize,
        attempt: u8,
    },
    /// First horizontal probe move.
    HorizontalProbe(Direction),
    Finished,
    InertForever,
}

/// Program state of one agent running the monotone-model algorithm.
#[derive(Debug, Clone)]
pub struct MonotoneAgent {
    label: TransformedLabel,
    stage: Stage,
    compare: Compare,
    simultaneous: bool,
    /// Index of the bit that broke symmetry (0 while unset).
    broken_bit: usize,
    current: Option<Level>,
}

impl MonotoneAgent {
    pub fn new(label: TransformedLabel) -> Self {
        MonotoneAgent {
            label,
            stage: Stage::AwaitAppearance,
            compare: Compare::Equal,
            simultaneous: false,
            broken_bit: 0,
            current: None,
        }
    }

    pub fn simultaneous(&self) -> bool {
        self.simultaneous
    }

    /// Bit index at which the dance ended, if it ran.
    pub fn symmetry_bit(&self) -> Option<usize> {
        (self.broken_bit > 0).then_some(self.broken_bit)
    }

    pub fn compare(&self) -> Compare {
        self.compare
    }

    fn present_level(reading: MonotoneReading) -> Result<Level, ProtocolViolation> {
        match reading {
            MonotoneReading::Present(level) => Ok(level),
            MonotoneReading::Absent => Err(ProtocolViolation::AgentDisappeared),
        }
    }

    /// `Test`: P <- C, C <- reading, compare P with C.
    fn test(&mut self, reading: MonotoneReading) -> Result<(), ProtocolViolation> {
        let level = Self::present_level(reading)?;
        if let Some(previous) = &self.current {
            self.compare = compare_levels(previous, &level);
        }
        self.current = Some(level);
        Ok(())
    }

    /// `GetCloser`: keep stepping while the last test said `smaller`.
    fn get_closer(&mut self, approach: Approach) -> Action {
        if self.compare == Compare::Smaller {
            let action = Action::go(approach.direction, approach.step.clone());
            self.stage = Stage::Approaching(approach);
            action
        } else {
            match approach.axis {
                Axis::Vertical => self.begin_horizontal(),
                Axis::Horizontal => {
                    self.stage = Stage::Finished;
                    Action::HaltForever
                }
            }
        }
    }

    fn backtrack(&mut self, direction: Direction, length: Scalar, then: Approach) -> Action {
        self.stage = Stage::Backtrack(then);
        Action::go(direction, length)
    }

    fn dance_move(&mut self, bit: usize, attempt: u8) -> Action {
        let direction = if self.label.bit(bit) {
            Direction::N
        } else {
            Direction::S
        };
        self.stage = Stage::Dance { bit, attempt };
        Action::go(direction, Scalar::pow2_neg(bit as u32))
    }

    fn after_dance(&mut self) -> Action {
        let j = self.broken_bit;
        let one_bit = self.label.bit(j);
        let quarter = Scalar::ratio(1, 4);
        // the 1-bit agent approaches North from below or South from above
        let (toward_if_restored, toward_if_kept) = if one_bit {
            (Direction::N, Direction::S)
        } else {
            (Direction::S, Direction::N)
        };
        match self.compare {
            Compare::Smaller => {
                let back = toward_if_restored.opposite();
                self.backtrack(
                    back,
                    Scalar::pow2_neg(j as u32),
                    Approach {
                        direction: toward_if_restored,
                        step: quarter,
                        axis: Axis::Vertical,
                    },
                )
            }
            _ => {
                // no backtrack: the agents approach from where they stand
                self.compare = Compare::Smaller;
                self.get_closer(Approach {
                    direction: toward_if_kept,
                    step: quarter,
                    axis: Axis::Vertical,
                })
            }
        }
    }

    fn begin_horizontal(&mut self) -> Action {
        let direction = if !self.simultaneous || self.label.bit(self.broken_bit) {
            Direction::E
        } else {
            Direction::W
        };
        self.stage = Stage::HorizontalProbe(direction);
        Action::go(direction, Scalar::one())
    }
}

impl AgentProgram for MonotoneAgent {
    type Reading = MonotoneReading;

    fn step(&mut self, reading: MonotoneReading) -> Result<Action, ProtocolViolation> {
        let one = Scalar::one;
        let half = || Scalar::ratio(1, 2);
        match std::mem::replace(&mut self.stage, Stage::Finished) {
            Stage::AwaitAppearance => match reading {
                MonotoneReading::Absent => {
                    self.stage = Stage::InertForever;
                    Ok(Action::HaltForever)
                }
                MonotoneReading::Present(level) => {
                    self.current = Some(level);
                    self.stage = Stage::FirstNorth;
                    Ok(Action::go(Direction::N, one()))
                }
            },
            Stage::FirstNorth => {
                self.test(reading)?;
                Ok(match self.compare {
                    Compare::Smaller => self.get_closer(Approach {
                        direction: Direction::N,
                        step: half(),
                        axis: Axis::Vertical,
                    }),
                    Compare::Larger => self.backtrack(
                        Direction::S,
                        one(),
                        Approach {
                            direction: Direction::S,
                            step: half(),
                            axis: Axis::Vertical,
                        },
                    ),
                    Compare::Equal => {
                        self.stage = Stage::SecondNorth;
                        Action::go(Direction::N, one())
                    }
                })
            }
            Stage::SecondNorth => {
                self.test(reading)?;
                if self.compare == Compare::Larger {
                    Ok(self.backtrack(
                        Direction::S,
                        one(),
                        Approach {
                            direction: Direction::S,
                            step: half(),
                            axis: Axis::Vertical,
                        },
                    ))
                } else {
                    self.simultaneous = true;
                    Ok(self.dance_move(1, 1))
                }
            }
            Stage::Backtrack(approach) => {
                // back where the previous comparison started, which was the
                // closer of the two positions
                self.current = Some(Self::present_level(reading)?);
                self.compare = Compare::Smaller;
                Ok(self.get_closer(approach))
            }
            Stage::Approaching(approach) => {
                self.test(reading)?;
                Ok(self.get_closer(approach))
            }
            Stage::Dance { bit, attempt } => {
                self.test(reading)?;
                if self.compare != Compare::Equal {
                    self.broken_bit = bit;
                    return Ok(self.after_dance());
                }
                if attempt == 1 {
                    Ok(self.dance_move(bit, 2))
                } else if bit < self.label.len() {
                    Ok(self.dance_move(bit + 1, 1))
                } else {
                    Err(ProtocolViolation::LabelsExhausted(self.label.len()))
                }
            }
            Stage::HorizontalProbe(direction) => {
                self.test(reading)?;
                let approach = |direction| Approach {
                    direction,
                    step: Scalar::one(),
                    axis: Axis::Horizontal,
                };
                if self.compare == Compare::Smaller {
                    Ok(self.get_closer(approach(direction)))
                } else {
                    let back = direction.opposite();
                    Ok(self.backtrack(back, one(), approach(back)))
                }
            }
            Stage::Finished | Stage::InertForever => Err(ProtocolViolation::ReadingAfterHalt),
        }
    }

    fn phase(&self) -> Phase {
        match &self.stage {
            Stage::AwaitAppearance => Phase::Appearance,
            Stage::FirstNorth | Stage::SecondNorth => Phase::VerticalApproach,
            Stage::Backtrack(a) | Stage::Approaching(a) => match a.axis {
                Axis::Vertical => Phase::VerticalApproach,
                Axis::Horizontal => Phase::HorizontalApproach,
            },
            Stage::Dance { .. } => Phase::Dance,
            Stage::HorizontalProbe(_) => Phase::HorizontalApproach,
            Stage::Finished => Phase::Finished,
            Stage::InertForever => Phase::InertForever,
        }
    }
}
