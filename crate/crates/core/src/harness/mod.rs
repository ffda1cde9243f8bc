//! Seeded scenario sweeps, bound aggregation and dual-engine verification.

pub mod generate;
pub mod spec;
pub mod sweep;
pub mod verify;

pub use generate::{scenario_at, sweep_scenarios, Generated, RunKind};
pub use spec::{Contract, DistanceRange, ProbeSpec, StartLaw, SweepSpec, GENERATOR};
pub use sweep::{aggregate, run_sweep, BoundReport, RunSummary, SweepOutput};
pub use verify::{check, run_verify, verify_scenarios, VerifyReport};
