//! Exact simulation of two labelled agents that must meet in the plane
//! while sensing only a function of their distance.
//!
//! Times, positions and durations are exact rationals ([`Scalar`]). Agents
//! are reactive programs ([`AgentProgram`]) driven by an event-driven
//! executor ([`sim::Executor`]); an independent dense-sampling checker lives
//! in [`oracle`] and seeded experiment sweeps in [`harness`].

pub mod binary;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod kernel;
pub mod labels;
pub mod monotone;
pub mod oracle;
pub mod scalar;
pub mod sim;

pub use error::{Error, InputError, ProtocolViolation, SimulationError};
pub use geometry::{Direction, Point};
pub use kernel::{Action, AgentId, AgentProgram, LevelMap, Phase};
pub use labels::{LabelSpace, TransformedLabel};
pub use scalar::Scalar;
pub use sim::{run_scenario, MeetingReport, Model, Outcome, RunOutput, Scenario, TraceEvent};
