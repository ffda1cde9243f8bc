//! The contract between agent programs and the executor.
//!
//! A program is a deterministic reactive machine: it receives one sensor
//! reading on appearance and one at the end of every action, and answers
//! each reading with its next action. Programs only ever see the reading
//! types defined here, which expose exactly what the sensing models allow.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ProtocolViolation;
use crate::geometry::{Direction, Velocity};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentId {
    A,
    B,
}

impl AgentId {
    pub fn other(self) -> AgentId {
        match self {
            AgentId::A => AgentId::B,
            AgentId::B => AgentId::A,
        }
    }

    pub fn index(self) -> usize {
        match self {
            AgentId::A => 0,
            AgentId::B => 1,
        }
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgentId::A => "a",
            AgentId::B => "b",
        })
    }
}

/// What a program asks its agent to do next.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    Move {
        direction: Direction,
        duration: Scalar,
    },
    Wait {
        duration: Scalar,
    },
    HaltForever,
}

impl Action {
    /// Panics on a non-positive duration; programs never produce one.
    pub fn go(direction: Direction, duration: Scalar) -> Action {
        assert!(
            duration.is_positive(),
            "move duration must be positive, got {duration}"
        );
        Action::Move {
            direction,
            duration,
        }
    }

    pub fn wait(duration: Scalar) -> Action {
        assert!(
            duration.is_positive(),
            "wait duration must be positive, got {duration}"
        );
        Action::Wait { duration }
    }

    pub fn duration(&self) -> Option<&Scalar> {
        match self {
            Action::Move { duration, .. } | Action::Wait { duration } => Some(duration),
            Action::HaltForever => None,
        }
    }

    pub fn velocity(&self) -> Velocity {
        match self {
            Action::Move { direction, .. } => Velocity::Cardinal(*direction),
            Action::Wait { .. } | Action::HaltForever => Velocity::Still,
        }
    }
}

/// How the current distance relates to the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Compare {
    Smaller,
    Equal,
    Larger,
}

/// Sensor level of the monotone model. Levels grow with distance and can
/// only be compared with each other.
#[derive(Clone, PartialEq, Eq)]
pub struct Level(Scalar);

impl Level {
    pub(crate) fn hidden(value: Scalar) -> Level {
        Level(value)
    }
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Level(..)")
    }
}

/// Result named after the current distance relative to the previous one:
/// `Larger` when `previous < current`.
pub fn compare_levels(previous: &Level, current: &Level) -> Compare {
    match previous.0.cmp(&current.0) {
        Ordering::Less => Compare::Larger,
        Ordering::Equal => Compare::Equal,
        Ordering::Greater => Compare::Smaller,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonotoneReading {
    Absent,
    Present(Level),
}

/// Binary-model reading. `Far` covers both an absent partner and a partner
/// at distance at least rho.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryReading {
    Near,
    Far,
}

impl BinaryReading {
    /// `Near` iff the partner is present and strictly closer than rho.
    pub fn sense(partner_present: bool, dist_sq: &Scalar, rho_sq: &Scalar) -> BinaryReading {
        if partner_present && dist_sq < rho_sq {
            BinaryReading::Near
        } else {
            BinaryReading::Far
        }
    }
}

/// Strictly increasing map applied to the squared distance before it
/// becomes a monotone level. Programs must behave identically under all of
/// them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelMap {
    #[default]
    Identity,
    /// `x + 7`
    Affine,
    /// `x^3`
    Cubic,
    /// Degree-8 Taylor polynomial of `2^x` with `ln 2 ~ 7/10`; all
    /// coefficients positive, so strictly increasing for `x >= 0`.
    Exp2,
}

impl LevelMap {
    pub fn apply(self, dist_sq: &Scalar) -> Scalar {
        match self {
            LevelMap::Identity => dist_sq.clone(),
            LevelMap::Affine => dist_sq + Scalar::from_int(7),
            LevelMap::Cubic => dist_sq.pow(3),
            LevelMap::Exp2 => {
                let u = dist_sq * Scalar::ratio(7, 10);
                let mut term = Scalar::one();
                let mut sum = Scalar::one();
                for k in 1..=8 {
                    term = term * &u / Scalar::from_int(k);
                    sum += &term;
                }
                sum
            }
        }
    }

    pub fn sense(self, partner_present: bool, dist_sq: &Scalar) -> MonotoneReading {
        if partner_present {
            MonotoneReading::Present(Level::hidden(self.apply(dist_sq)))
        } else {
            MonotoneReading::Absent
        }
    }
}

/// Procedure an agent is executing; used for time accounting and traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Appearance,
    VerticalApproach,
    Dance,
    HorizontalApproach,
    LoseContact,
    ReturnSouth,
    TriangleDescent,
    MidpointReturn,
    HorizontalLeaps,
    Finished,
    InertForever,
}

/// A resumable deterministic agent program.
pub trait AgentProgram {
    type Reading;

    /// Consume the reading taken at appearance or at the end of the previous
    /// action and choose the next action.
    fn step(&mut self, reading: Self::Reading) -> Result<Action, ProtocolViolation>;

    /// Procedure the most recently chosen action belongs to.
    fn phase(&self) -> Phase;

    /// Binary model only: the symmetry-breaking flag, once decided.
    fn leading(&self) -> Option<bool> {
        None
    }
}
