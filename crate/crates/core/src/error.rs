use thiserror::Error;

use crate::kernel::AgentId;
use crate::sim::trace::TraceEvent;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseScalarError {
    #[error("empty rational literal")]
    Empty,
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("denominator must be positive in {0:?}")]
    NegativeDenominator(String),
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
}

/// Bad input: out-of-range labels, invalid scenarios, unparsable files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("label space size must be at least 2, got {0}")]
    LabelSpaceTooSmall(u64),
    #[error("label {label} outside 0..{size}")]
    LabelOutOfRange { label: u64, size: u64 },
    #[error("labels are equal ({0}); agents must have distinct labels")]
    EqualLabels(u64),
    #[error("transformed labels have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sensing threshold rho must exceed 1, got {0}")]
    RhoTooSmall(String),
    #[error("binary model requires a sensing threshold rho")]
    MissingRho,
    #[error("start time must be non-negative, got {0}")]
    NegativeStart(String),
    #[error("time budget must be positive, got {0}")]
    NonPositiveBudget(String),
    #[error("sampling step must be positive, got {0}")]
    NonPositiveStep(String),
    #[error("level distortion only applies to the monotone model")]
    DistortionWithBinary,
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

/// A program reacted to a reading in a way the model rules out.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolViolation {
    #[error("sensor reported the other agent absent after it had been present")]
    AgentDisappeared,
    #[error("reading delivered to a program that has halted")]
    ReadingAfterHalt,
    #[error("symmetry not broken after processing all {0} label bits")]
    LabelsExhausted(usize),
    #[error(
        "label loop processes no bits (lambda = {0}); the agent would loop without time passing"
    )]
    EmptyLabelLoop(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimulationError {
    /// `trace` holds every event emitted before the violation.
    #[error("agent {agent}: {violation} (after {} trace events)", trace.len())]
    Protocol {
        agent: AgentId,
        violation: ProtocolViolation,
        trace: Vec<TraceEvent>,
    },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
