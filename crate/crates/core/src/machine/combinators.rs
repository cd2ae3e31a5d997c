//! Series, parallel, and feedback composition of machines.

use crate::error::MachineError;
use crate::event::EventStream;
use crate::machine::{slice_window, Machine, Process};
use crate::section::{BehaviorType, Section};
use crate::value::{Domain, Value};
use std::collections::BTreeMap;

/// Series composition: the output wire of `m1` feeds the input wire of `m2`.
/// Inertiality budgets add.
pub fn compose_series(m1: &Machine, m2: &Machine) -> Result<Machine, MachineError> {
    if !m1.output_type().compatible(m2.input_type()) {
        return Err(MachineError::TypeMismatch {
            expected: m2.input_type().describe(),
            got: m1.output_type().describe(),
        });
    }
    let (a, b) = (m1.clone(), m2.clone());
    let grid = m1.natural_grid().or(m2.natural_grid());
    Ok(Machine::from_spawner(
        m1.input_type().clone(),
        m2.output_type().clone(),
        m1.inertiality() + m2.inertiality(),
        move || {
            Box::new(SeriesProcess {
                p1: a.spawn(),
                p2: b.spawn(),
            })
        },
    )
    .with_natural_grid_opt(grid))
}

struct SeriesProcess {
    p1: Box<dyn Process>,
    p2: Box<dyn Process>,
}

impl Process for SeriesProcess {
    fn step(&mut self, input: &Section, t0: f64, last: bool) -> Result<Section, MachineError> {
        let mid = self.p1.step(input, t0, last)?;
        self.p2.step(&mid, t0, last)
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(SeriesProcess {
            p1: self.p1.box_clone(),
            p2: self.p2.box_clone(),
        })
    }
    fn collect_taps(&self, sink: &mut Vec<(String, Section)>) {
        self.p1.collect_taps(sink);
        self.p2.collect_taps(sink);
    }
}

/// Zip event streams over component wires into one stream of firing records:
/// the output time-stamps are the union of the component time-stamps, and
/// each event carries the non-empty partial map of components present.
pub fn zip_event_components(
    components: &[EventStream<Value>],
) -> Result<EventStream<Value>, MachineError> {
    let Some(first) = components.first() else {
        return Err(MachineError::InvalidParameter("no components to zip".into()));
    };
    let length = first.length();
    for c in components {
        if c.length() != length {
            return Err(MachineError::Section(
                crate::error::SectionError::LengthMismatch {
                    left: length,
                    right: c.length(),
                },
            ));
        }
    }
    let mut by_time: BTreeMap<u64, (f64, BTreeMap<usize, Value>)> = BTreeMap::new();
    for (i, c) in components.iter().enumerate() {
        for (t, v) in c.events() {
            by_time
                .entry(t.to_bits())
                .or_insert_with(|| (*t, BTreeMap::new()))
                .1
                .insert(i, v.clone());
        }
    }
    let mut events: Vec<(f64, Value)> = by_time
        .into_values()
        .map(|(t, rec)| (t, Value::Record(rec)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(EventStream::new(length, events)?)
}

/// Project a stream of firing records back onto its component wires.
pub fn unzip_event_components(
    e: &EventStream<Value>,
    n: usize,
) -> Result<Vec<EventStream<Value>>, MachineError> {
    let mut out: Vec<Vec<(f64, Value)>> = vec![Vec::new(); n];
    for (t, v) in e.events() {
        let Value::Record(rec) = v else {
            return Err(MachineError::TypeMismatch {
                expected: "event(record)".into(),
                got: format!("event value {v}"),
            });
        };
        for (i, comp) in rec {
            if *i >= n {
                return Err(MachineError::TypeMismatch {
                    expected: format!("record over {n} components"),
                    got: format!("component index {i}"),
                });
            }
            out[*i].push((*t, comp.clone()));
        }
    }
    out.into_iter()
        .map(|events| Ok(EventStream::new(e.length(), events)?))
        .collect()
}

/// Parallel composition of two machines; see [`tensor_n`].
pub fn tensor_parallel(m1: &Machine, m2: &Machine) -> Result<Machine, MachineError> {
    tensor_n(vec![m1.clone(), m2.clone()])
}

/// Parallel composition of a family of machines.
///
/// When every component wire on a side is event-typed, that side is a single
/// event wire of firing records (component events zipped by time-stamp);
/// otherwise the side is the product of the component wires. Components run
/// independently and outputs merge in component order.
pub fn tensor_n(ms: Vec<Machine>) -> Result<Machine, MachineError> {
    if ms.is_empty() {
        return Err(MachineError::InvalidParameter(
            "tensor of zero machines".into(),
        ));
    }
    for m in &ms {
        if matches!(m.input_type(), BehaviorType::Product(_))
            || matches!(m.output_type(), BehaviorType::Product(_))
        {
            return Err(MachineError::InvalidParameter(
                "tensor components must have non-product wire types".into(),
            ));
        }
    }
    let input_type = tensor_side(ms.iter().map(|m| m.input_type().clone()).collect())?;
    let output_type = tensor_side(ms.iter().map(|m| m.output_type().clone()).collect())?;
    let inertiality = ms
        .iter()
        .map(Machine::inertiality)
        .fold(f64::INFINITY, f64::min);
    let grid = ms.iter().find_map(Machine::natural_grid);
    let zip_in = matches!(input_type, BehaviorType::Event(_)) && ms.len() > 1;
    let zip_out = matches!(output_type, BehaviorType::Event(_)) && ms.len() > 1;
    let family = ms.clone();
    Ok(Machine::from_spawner(
        input_type,
        output_type,
        inertiality,
        move || {
            Box::new(TensorProcess {
                procs: family.iter().map(Machine::spawn).collect(),
                zip_in,
                zip_out,
            })
        },
    )
    .with_natural_grid_opt(grid))
}

fn tensor_side(tys: Vec<BehaviorType>) -> Result<BehaviorType, MachineError> {
    if tys.len() == 1 {
        return Ok(tys.into_iter().next().unwrap());
    }
    if tys.iter().all(|t| matches!(t, BehaviorType::Event(_))) {
        let domains = tys
            .into_iter()
            .map(|t| match t {
                BehaviorType::Event(d) => d,
                _ => unreachable!(),
            })
            .collect();
        Ok(BehaviorType::Event(Domain::Record(domains)))
    } else {
        Ok(BehaviorType::product(tys)?)
    }
}

struct TensorProcess {
    procs: Vec<Box<dyn Process>>,
    zip_in: bool,
    zip_out: bool,
}

impl Process for TensorProcess {
    fn step(&mut self, input: &Section, t0: f64, last: bool) -> Result<Section, MachineError> {
        let n = self.procs.len();
        let parts: Vec<Section> = if n == 1 {
            vec![input.clone()]
        } else if self.zip_in {
            unzip_event_components(input.as_event()?, n)?
                .into_iter()
                .map(Section::Event)
                .collect()
        } else {
            input.as_product()?.to_vec()
        };
        let mut outs = Vec::with_capacity(n);
        for (p, part) in self.procs.iter_mut().zip(&parts) {
            outs.push(p.step(part, t0, last)?);
        }
        if n == 1 {
            return Ok(outs.pop().unwrap());
        }
        if self.zip_out {
            let streams: Vec<EventStream<Value>> = outs
                .into_iter()
                .map(|s| Ok(s.as_event()?.clone()))
                .collect::<Result<_, MachineError>>()?;
            Ok(Section::Event(zip_event_components(&streams)?))
        } else {
            Ok(Section::product(outs)?)
        }
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(TensorProcess {
            procs: self.procs.iter().map(|p| p.box_clone()).collect(),
            zip_in: self.zip_in,
            zip_out: self.zip_out,
        })
    }
    fn collect_taps(&self, sink: &mut Vec<(String, Section)>) {
        for p in &self.procs {
            p.collect_taps(sink);
        }
    }
}

/// Copy one wire onto `n` identical output wires.
pub fn fan_out(ty: &BehaviorType, n: usize) -> Result<Machine, MachineError> {
    if n == 0 || matches!(ty, BehaviorType::Product(_)) {
        return Err(MachineError::InvalidParameter(
            "fan-out needs n >= 1 copies of a non-product wire".into(),
        ));
    }
    let out = if n == 1 {
        ty.clone()
    } else {
        BehaviorType::product(vec![ty.clone(); n])?
    };
    Ok(Machine::from_spawner(ty.clone(), out, 0.0, move || {
        Box::new(FanOutProcess { n })
    }))
}

struct FanOutProcess {
    n: usize,
}

impl Process for FanOutProcess {
    fn step(&mut self, input: &Section, _t0: f64, _last: bool) -> Result<Section, MachineError> {
        if self.n == 1 {
            Ok(input.clone())
        } else {
            Ok(Section::product(vec![input.clone(); self.n])?)
        }
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(FanOutProcess { n: self.n })
    }
}

/// How the looped wire sits inside the traced machine's wire bundle.
#[derive(Clone, Copy, PartialEq)]
enum LoopShape {
    /// The wire bundle is `Product([...rest, loop])`.
    Paired,
    /// The whole wire is the loop; the external side is unit.
    Whole,
}

/// Feedback: identify the last output wire with the last input wire.
///
/// The machine must be inertial along the loop with budget at least the
/// length of `loop_init` (ε_loop > 0): its loop output over `[t, t+ε_loop]`
/// may not depend on its loop input there. Execution advances in windows of
/// at most ε_loop; in each window the loop output is computed first (against
/// a neutral probe input — `loop_init` on the first window) and fed back as
/// the loop input on the same window, and the run fails loudly if the
/// re-played loop output disagrees, i.e. if the loop was not actually
/// inertial. The resulting sections satisfy the trace constraint: the loop
/// input section equals the loop output section over the whole length.
pub fn trace_feedback(
    m: &Machine,
    loop_type: &BehaviorType,
    loop_init: &Section,
) -> Result<Machine, MachineError> {
    let eps = loop_init.length();
    if eps <= 0.0 {
        return Err(MachineError::NonCausalLoop);
    }
    loop_init.check_type(loop_type)?;
    if loop_wire_unsupported(loop_type) {
        return Err(MachineError::InvalidParameter(
            "loop wires must be event, continuous, unit, or products of those".into(),
        ));
    }
    let (in_shape, external_in) = split_loop_shape(m.input_type(), loop_type)?;
    let (out_shape, external_out) = split_loop_shape(m.output_type(), loop_type)?;
    let inner = m.clone();
    let init = loop_init.clone();
    let lt = loop_type.clone();
    let grid = m.natural_grid();
    Ok(Machine::from_spawner(
        external_in,
        external_out,
        m.inertiality(),
        move || {
            Box::new(TraceProcess {
                inner: inner.spawn(),
                eps,
                loop_type: lt.clone(),
                init: init.clone(),
                in_shape,
                out_shape,
                loop_acc: None,
                out_acc_last: None,
            })
        },
    )
    .with_natural_grid_opt(grid))
}

fn loop_wire_unsupported(ty: &BehaviorType) -> bool {
    match ty {
        BehaviorType::Clock { .. } => true,
        BehaviorType::Product(parts) => parts.iter().any(loop_wire_unsupported),
        _ => false,
    }
}

fn split_loop_shape(
    ty: &BehaviorType,
    loop_type: &BehaviorType,
) -> Result<(LoopShape, BehaviorType), MachineError> {
    if let BehaviorType::Product(parts) = ty {
        if let Some((last, rest)) = parts.split_last() {
            if last.compatible(loop_type) {
                let external = match rest.len() {
                    0 => BehaviorType::Unit,
                    1 => rest[0].clone(),
                    _ => BehaviorType::Product(rest.to_vec()),
                };
                return Ok((LoopShape::Paired, external));
            }
        }
    }
    if ty.compatible(loop_type) {
        return Ok((LoopShape::Whole, BehaviorType::Unit));
    }
    Err(MachineError::TypeMismatch {
        expected: format!("a wire bundle ending in {}", loop_type.describe()),
        got: ty.describe(),
    })
}

struct TraceProcess {
    inner: Box<dyn Process>,
    eps: f64,
    loop_type: BehaviorType,
    init: Section,
    in_shape: LoopShape,
    out_shape: LoopShape,
    loop_acc: Option<Section>,
    /// Final loop value of the previous chunk, for continuous hold guesses.
    out_acc_last: Option<Section>,
}

impl TraceProcess {
    fn neutral_guess(&self, length: f64) -> Result<Section, MachineError> {
        neutral_section(
            &self.loop_type,
            length,
            self.out_acc_last.as_ref(),
        )
    }

    fn pair_input(&self, external: &Section, looped: Section) -> Result<Section, MachineError> {
        Ok(match self.in_shape {
            LoopShape::Whole => looped,
            LoopShape::Paired => match external {
                Section::Product(parts) => {
                    let mut all = parts.clone();
                    all.push(looped);
                    Section::Product(all)
                }
                other => Section::Product(vec![other.clone(), looped]),
            },
        })
    }

    fn split_output(&self, out: Section, len: f64) -> Result<(Section, Section), MachineError> {
        Ok(match self.out_shape {
            LoopShape::Whole => (Section::unit(len)?, out),
            LoopShape::Paired => {
                let Section::Product(mut parts) = out else {
                    return Err(MachineError::TypeMismatch {
                        expected: "a product output ending in the loop wire".into(),
                        got: out.type_of().describe(),
                    });
                };
                let looped = parts.pop().expect("non-empty product");
                let external = match parts.len() {
                    0 => Section::unit(len)?,
                    1 => parts.pop().unwrap(),
                    _ => Section::Product(parts),
                };
                (external, looped)
            }
        })
    }
}

/// The neutral stand-in fed to the probe run: empty event streams, held
/// continuous values, unit sections.
fn neutral_section(
    ty: &BehaviorType,
    length: f64,
    prev: Option<&Section>,
) -> Result<Section, MachineError> {
    Ok(match ty {
        BehaviorType::Unit => Section::unit(length)?,
        BehaviorType::Event(_) => Section::empty_event(length),
        BehaviorType::Continuous { .. } => {
            let hold = match prev {
                Some(Section::Continuous(c)) => c.eval(c.length())?,
                _ => 0.0,
            };
            Section::Continuous(crate::continuous::ContinuousStream::constant(length, hold))
        }
        BehaviorType::Product(parts) => {
            let prev_parts: Vec<Option<&Section>> = match prev {
                Some(Section::Product(ps)) => ps.iter().map(Some).collect(),
                _ => vec![None; parts.len()],
            };
            Section::Product(
                parts
                    .iter()
                    .zip(prev_parts)
                    .map(|(t, p)| neutral_section(t, length, p))
                    .collect::<Result<_, _>>()?,
            )
        }
        BehaviorType::Clock { .. } => {
            return Err(MachineError::InvalidParameter(
                "clock loop wires are not supported".into(),
            ))
        }
    })
}

impl Process for TraceProcess {
    fn step(&mut self, input: &Section, t0: f64, last: bool) -> Result<Section, MachineError> {
        let total = input.length();
        let mut produced: Option<Section> = None;
        let mut c0 = 0.0_f64; // window-local
        let mut first_chunk_of_window = true;
        if total == 0.0 {
            // degenerate point window
            let guess = self.neutral_guess(0.0)?;
            let probe_out = {
                let mut probe = self.inner.box_clone();
                probe.step(&self.pair_input(input, guess)?, t0, last)?
            };
            let (_, y) = self.split_output(probe_out, 0.0)?;
            let real = self
                .inner
                .step(&self.pair_input(input, y.clone())?, t0, last)?;
            let (b, y2) = self.split_output(real, 0.0)?;
            if y2 != y {
                return Err(MachineError::LoopConstraint { t0, t1: t0 });
            }
            self.note_loop(y)?;
            return Ok(b);
        }
        while c0 < total {
            let c1 = (c0 + self.eps).min(total);
            let a_chunk = slice_window(input, c0, c1, t0 == 0.0 && first_chunk_of_window)?;
            let chunk_last = last && c1 == total;
            let global_c0 = t0 + c0;
            let guess = if t0 == 0.0 && c0 == 0.0 {
                self.init.restrict(0.0, c1 - c0)?
            } else {
                self.neutral_guess(c1 - c0)?
            };
            let y = {
                let mut probe = self.inner.box_clone();
                let probe_out =
                    probe.step(&self.pair_input(&a_chunk, guess)?, global_c0, chunk_last)?;
                self.split_output(probe_out, c1 - c0)?.1
            };
            let real = self.inner.step(
                &self.pair_input(&a_chunk, y.clone())?,
                global_c0,
                chunk_last,
            )?;
            let (b, y2) = self.split_output(real, c1 - c0)?;
            if y2 != y {
                return Err(MachineError::LoopConstraint {
                    t0: global_c0,
                    t1: t0 + c1,
                });
            }
            self.note_loop(y)?;
            produced = Some(match produced.take() {
                None => b,
                Some(acc) => acc.splice(&b)?,
            });
            c0 = c1;
            first_chunk_of_window = false;
        }
        Ok(produced.expect("at least one chunk"))
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(TraceProcess {
            inner: self.inner.box_clone(),
            eps: self.eps,
            loop_type: self.loop_type.clone(),
            init: self.init.clone(),
            in_shape: self.in_shape,
            out_shape: self.out_shape,
            loop_acc: self.loop_acc.clone(),
            out_acc_last: self.out_acc_last.clone(),
        })
    }
    fn collect_taps(&self, sink: &mut Vec<(String, Section)>) {
        self.inner.collect_taps(sink);
        if let Some(acc) = &self.loop_acc {
            sink.push(("loop".to_string(), acc.clone()));
        }
    }
}

impl TraceProcess {
    fn note_loop(&mut self, y: Section) -> Result<(), MachineError> {
        self.out_acc_last = Some(y.clone());
        self.loop_acc = Some(match self.loop_acc.take() {
            None => y,
            Some(acc) => acc.splice(&y)?,
        });
        Ok(())
    }
}
