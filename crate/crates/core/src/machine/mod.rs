//! Machines: causal, deterministic, total transducers between behavior wires.
//!
//! A [`Machine`] couples input/output behavior types with a kernel that
//! spawns per-run [`Process`] state. A run feeds the input section to the
//! process in consecutive windows and splices the window outputs back
//! together; the window size (`step_hint`) controls internal chopping only,
//! never the semantics. Combinators compose machines in series, in parallel,
//! and through feedback loops.

mod cds;
mod combinators;
mod dds;
mod primitives;
mod samplers;

pub use cds::cds_machine;
pub use combinators::{
    compose_series, fan_out, tensor_n, tensor_parallel, trace_feedback, unzip_event_components,
    zip_event_components,
};
pub use dds::dds_machine;
pub use primitives::{delay, filter, identity, lift_continuous};
pub use samplers::{level_crossing_sampler, periodic_sampler, zoh_reconstructor, Metric};

use crate::error::MachineError;
use crate::event::EventStream;
use crate::section::{BehaviorType, Section};
use crate::time::Duration;
use std::sync::Arc;

/// Per-run transducer state.
///
/// `step` receives the input restricted to `[t0, t1]` (re-based to start at
/// 0) and must return the output section for the same window. Windows arrive
/// in order and tile the run; events landing exactly on a window boundary are
/// delivered with (and must be emitted with) the earlier window, so window
/// inputs partition the events of the run.
pub trait Process: Send {
    fn step(&mut self, input: &Section, t0: f64, last: bool) -> Result<Section, MachineError>;

    fn box_clone(&self) -> Box<dyn Process>;

    /// Report accumulated labeled wire sections (post-run).
    fn collect_taps(&self, _sink: &mut Vec<(String, Section)>) {}
}

impl Clone for Box<dyn Process> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

/// Spawns fresh process state for each run of a machine.
pub trait Kernel: Send + Sync {
    fn spawn(&self) -> Box<dyn Process>;
}

struct SpawnFn<F>(F);

impl<F: Fn() -> Box<dyn Process> + Send + Sync> Kernel for SpawnFn<F> {
    fn spawn(&self) -> Box<dyn Process> {
        (self.0)()
    }
}

/// A causal stateful transducer with declared wire types and an inertiality
/// budget ε: its output on `[t, t+ε]` is already determined by its state at
/// `t`.
#[derive(Clone)]
pub struct Machine {
    input_type: BehaviorType,
    output_type: BehaviorType,
    inertiality: f64,
    natural_grid: Option<f64>,
    kernel: Arc<dyn Kernel>,
}

impl std::fmt::Debug for Machine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Machine")
            .field("input", &self.input_type.describe())
            .field("output", &self.output_type.describe())
            .field("inertiality", &self.inertiality)
            .finish()
    }
}

impl Machine {
    pub fn new(
        input_type: BehaviorType,
        output_type: BehaviorType,
        inertiality: f64,
        kernel: impl Kernel + 'static,
    ) -> Machine {
        Machine {
            input_type,
            output_type,
            inertiality,
            natural_grid: None,
            kernel: Arc::new(kernel),
        }
    }

    pub fn from_spawner(
        input_type: BehaviorType,
        output_type: BehaviorType,
        inertiality: f64,
        spawn: impl Fn() -> Box<dyn Process> + Send + Sync + 'static,
    ) -> Machine {
        Machine::new(input_type, output_type, inertiality, SpawnFn(spawn))
    }

    pub fn input_type(&self) -> &BehaviorType {
        &self.input_type
    }

    pub fn output_type(&self) -> &BehaviorType {
        &self.output_type
    }

    pub fn inertiality(&self) -> f64 {
        self.inertiality
    }

    /// The intrinsic sampling grid of continuous outputs, when the machine
    /// has one (integrator step of an embedded dynamical system).
    pub fn natural_grid(&self) -> Option<f64> {
        self.natural_grid
    }

    pub fn with_natural_grid(mut self, h: f64) -> Machine {
        self.natural_grid = Some(h);
        self
    }

    pub(crate) fn with_natural_grid_opt(mut self, h: Option<f64>) -> Machine {
        self.natural_grid = h;
        self
    }

    /// Record this machine's output under `name` in every run record.
    pub fn labeled(self, name: &str) -> Machine {
        let name = name.to_string();
        let inner = self.kernel.clone();
        Machine {
            kernel: Arc::new(SpawnFn(move || {
                Box::new(TapProcess {
                    name: name.clone(),
                    inner: inner.spawn(),
                    acc: None,
                }) as Box<dyn Process>
            })),
            ..self
        }
    }

    pub fn spawn(&self) -> Box<dyn Process> {
        self.kernel.spawn()
    }
}

struct TapProcess {
    name: String,
    inner: Box<dyn Process>,
    acc: Option<Section>,
}

impl Process for TapProcess {
    fn step(&mut self, input: &Section, t0: f64, last: bool) -> Result<Section, MachineError> {
        let out = self.inner.step(input, t0, last)?;
        self.acc = Some(match self.acc.take() {
            None => out.clone(),
            Some(acc) => acc.splice(&out)?,
        });
        Ok(out)
    }

    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(TapProcess {
            name: self.name.clone(),
            inner: self.inner.box_clone(),
            acc: self.acc.clone(),
        })
    }

    fn collect_taps(&self, sink: &mut Vec<(String, Section)>) {
        self.inner.collect_taps(sink);
        if let Some(acc) = &self.acc {
            sink.push((self.name.clone(), acc.clone()));
        }
    }
}

/// The record of one run: the sections on the outer wires plus labeled
/// internal wires, which together summarize the consistent internal behavior.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub input: Section,
    pub output: Section,
    pub length: Duration,
    pub taps: Vec<(String, Section)>,
}

impl RunRecord {
    pub fn tap(&self, name: &str) -> Option<&Section> {
        self.taps
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }

    /// Restrict every recorded section to `[from, to]`.
    pub fn restrict(&self, from: f64, to: f64) -> Result<RunRecord, MachineError> {
        Ok(RunRecord {
            input: self.input.restrict(from, to)?,
            output: self.output.restrict(from, to)?,
            length: Duration::new(to - from).map_err(crate::error::SectionError::from)?,
            taps: self
                .taps
                .iter()
                .map(|(n, s)| Ok((n.clone(), s.restrict(from, to)?)))
                .collect::<Result<_, MachineError>>()?,
        })
    }
}

/// Remove events sitting exactly at local time 0; used when slicing windows
/// after the first, whose boundary events were already delivered.
pub(crate) fn drop_leading_events(s: &Section) -> Section {
    match s {
        Section::Event(e) => {
            if e.events().first().is_some_and(|(t, _)| *t == 0.0) {
                let events = e.events()[1..].to_vec();
                Section::Event(
                    EventStream::new(e.length(), events).expect("dropping an event keeps validity"),
                )
            } else {
                s.clone()
            }
        }
        Section::Product(parts) => Section::Product(parts.iter().map(drop_leading_events).collect()),
        _ => s.clone(),
    }
}

/// Slice `[a, b]` out of a run input, assigning boundary events to the
/// earlier window.
pub(crate) fn slice_window(
    input: &Section,
    a: f64,
    b: f64,
    first: bool,
) -> Result<Section, MachineError> {
    let w = input.restrict(a, b)?;
    Ok(if first { w } else { drop_leading_events(&w) })
}

/// Execute a machine on a type-correct input section.
///
/// `step_hint` bounds the internal window size; it never changes the result
/// beyond the stored-grid refinement of continuous outputs.
pub fn run(m: &Machine, input: &Section, step_hint: f64) -> Result<RunRecord, MachineError> {
    if !(step_hint.is_finite() && step_hint > 0.0) {
        return Err(MachineError::InvalidParameter(format!(
            "step hint must be positive, got {step_hint}"
        )));
    }
    input
        .check_type(&m.input_type)
        .map_err(|e| MachineError::TypeMismatch {
            expected: m.input_type.describe(),
            got: format!("{} ({e})", input.type_of().describe()),
        })?;
    if !input.is_finite() {
        return Err(MachineError::NonFinite { t: f64::NAN });
    }
    let total = input.length();
    let mut proc = m.kernel.spawn();
    let mut output: Option<Section> = None;
    if total == 0.0 {
        output = Some(proc.step(input, 0.0, true)?);
    } else {
        let mut k: u64 = 0;
        let mut t0 = 0.0;
        while t0 < total {
            let t1 = (((k + 1) as f64) * step_hint).min(total);
            let window = slice_window(input, t0, t1, k == 0)?;
            let out = proc.step(&window, t0, t1 == total)?;
            if out.length() != window.length() {
                return Err(MachineError::InvalidParameter(format!(
                    "kernel produced a window of length {} for a window of length {}",
                    out.length(),
                    window.length()
                )));
            }
            output = Some(match output.take() {
                None => out,
                Some(acc) => acc.splice(&out)?,
            });
            t0 = t1;
            k += 1;
        }
    }
    let output = output.expect("at least one window");
    output
        .check_type(&m.output_type)
        .map_err(|e| MachineError::TypeMismatch {
            expected: m.output_type.describe(),
            got: format!("{} ({e})", output.type_of().describe()),
        })?;
    let mut taps = Vec::new();
    proc.collect_taps(&mut taps);
    Ok(RunRecord {
        input: input.clone(),
        output,
        length: Duration::new(total).map_err(crate::error::SectionError::from)?,
        taps,
    })
}
