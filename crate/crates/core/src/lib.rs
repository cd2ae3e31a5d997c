//! Compositional simulation of event-based and hybrid systems.
//!
//! Behaviors live on time windows `[0, ℓ]` and restrict/glue like sections of
//! a sheaf on intervals: event streams, continuous trajectories, and periodic
//! clocks, plus flat products of them. Machines are causal transducers between
//! behavior wires with series, parallel (tensor), and feedback (trace)
//! combinators; samplers, reconstructors, delays, and discrete/continuous
//! dynamical systems are provided as building blocks.
//!
//! The [`laws`] module turns the algebraic contracts (restriction
//! functoriality, gluing, zip/unzip, machine causality) into seeded randomized
//! suites, and [`demo`] assembles the neuromorphic heading-regulation loop:
//! an event camera watching a reflectance scene, an event-driven regulator,
//! and saturated body dynamics closed by a delayed feedback wire.

pub mod clock;
pub mod continuous;
pub mod demo;
pub mod error;
pub mod event;
pub mod laws;
pub mod machine;
pub mod section;
pub mod tensor;
pub mod textio;
pub mod time;
pub mod value;

pub use clock::ClockSection;
pub use continuous::{ContValue, ContinuousStream, Piece, PieceKind};
pub use error::{MachineError, SectionError};
pub use event::{unzip_events, zip_events, EventStream};
pub use machine::{
    cds_machine, compose_series, delay, dds_machine, filter, identity, level_crossing_sampler,
    lift_continuous, periodic_sampler, run, tensor_n, tensor_parallel, trace_feedback,
    zoh_reconstructor, Machine, Metric, Process, RunRecord,
};
pub use section::{BehaviorType, Section};
pub use tensor::TensorValue;
pub use time::{Duration, BOUNDARY_TOL};
pub use value::{Domain, Value};
