//! Pass-through, filter, delay, and pointwise continuous machines.

use crate::continuous::{ContinuousStream, Piece, PieceKind};
use crate::error::MachineError;
use crate::event::EventStream;
use crate::machine::{drop_leading_events, Machine, Process};
use crate::section::{BehaviorType, Section};
use crate::value::{Domain, Value};
use std::sync::Arc;

/// The trivial machine: every window passes through unchanged.
pub fn identity(ty: &BehaviorType) -> Machine {
    Machine::from_spawner(ty.clone(), ty.clone(), 0.0, || {
        Box::new(IdentityProcess)
    })
}

#[derive(Clone)]
struct IdentityProcess;

impl Process for IdentityProcess {
    fn step(&mut self, input: &Section, _t0: f64, _last: bool) -> Result<Section, MachineError> {
        Ok(input.clone())
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(self.clone())
    }
}

/// Keep exactly the events whose values satisfy the predicate; time-stamps
/// are preserved.
pub fn filter(
    domain: Domain,
    pred: impl Fn(&Value) -> bool + Send + Sync + 'static,
) -> Machine {
    let pred = Arc::new(pred);
    Machine::from_spawner(
        BehaviorType::Event(domain),
        BehaviorType::event_any(),
        0.0,
        move || {
            let pred = pred.clone();
            Box::new(FilterProcess { pred })
        },
    )
}

struct FilterProcess {
    pred: Arc<dyn Fn(&Value) -> bool + Send + Sync>,
}

impl Process for FilterProcess {
    fn step(&mut self, input: &Section, _t0: f64, _last: bool) -> Result<Section, MachineError> {
        let e = input.as_event()?;
        let events = e
            .events()
            .iter()
            .filter(|(_, v)| (self.pred)(v))
            .cloned()
            .collect();
        Ok(Section::Event(EventStream::new(e.length(), events)?))
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(FilterProcess {
            pred: self.pred.clone(),
        })
    }
}

/// The ε-delay: output on `[0, ε]` is the supplied prefix, and from then on
/// the input replayed ε later. The prefix length is the machine's
/// inertiality.
pub fn delay(epsilon: f64, ty: &BehaviorType, init_prefix: &Section) -> Result<Machine, MachineError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(MachineError::InvalidParameter(format!(
            "delay needs a positive epsilon, got {epsilon}"
        )));
    }
    if init_prefix.length() != epsilon {
        return Err(MachineError::InvalidParameter(format!(
            "init prefix has length {}, expected {epsilon}",
            init_prefix.length()
        )));
    }
    init_prefix
        .check_type(ty)
        .map_err(MachineError::Section)?;
    if prefix_has_boundary_event(init_prefix, epsilon) {
        return Err(MachineError::InvalidParameter(
            "delay init prefix may not carry an event at its right endpoint".into(),
        ));
    }
    let init = init_prefix.clone();
    Ok(Machine::from_spawner(ty.clone(), ty.clone(), epsilon, move || {
        Box::new(DelayProcess {
            buffer: init.clone(),
        })
    }))
}

fn prefix_has_boundary_event(s: &Section, at: f64) -> bool {
    match s {
        Section::Event(e) => e.events().last().is_some_and(|(t, _)| *t == at),
        Section::Product(parts) => parts.iter().any(|p| prefix_has_boundary_event(p, at)),
        _ => false,
    }
}

struct DelayProcess {
    /// The extended behavior seen so far: init prefix followed by all input
    /// windows, living on `[0, ε + t_received]`.
    buffer: Section,
}

impl Process for DelayProcess {
    fn step(&mut self, input: &Section, t0: f64, _last: bool) -> Result<Section, MachineError> {
        self.buffer = append_window(&self.buffer, input)?;
        let t1 = t0 + input.length();
        let out = self.buffer.restrict(t0, t1)?;
        Ok(if t0 > 0.0 { drop_leading_events(&out) } else { out })
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(DelayProcess {
            buffer: self.buffer.clone(),
        })
    }
}

/// Concatenate a window onto a buffer, permitting a value jump at the seam
/// (the delay's prefix does not have to flow into the input continuously).
pub(crate) fn append_window(buffer: &Section, window: &Section) -> Result<Section, MachineError> {
    Ok(match (buffer, window) {
        (Section::Continuous(a), Section::Continuous(b)) => {
            if a.eval(a.length()).ok() == b.eval(0.0).ok() {
                Section::Continuous(a.glue(b)?)
            } else {
                Section::Continuous(concat_jump(a, b)?)
            }
        }
        (Section::Product(xs), Section::Product(ys)) if xs.len() == ys.len() => Section::Product(
            xs.iter()
                .zip(ys)
                .map(|(x, y)| append_window(x, y))
                .collect::<Result<_, _>>()?,
        ),
        _ => buffer.splice(window)?,
    })
}

fn concat_jump(
    a: &ContinuousStream<f64>,
    b: &ContinuousStream<f64>,
) -> Result<ContinuousStream<f64>, MachineError> {
    if b.length() == 0.0 {
        // keep the jump value as a trailing point piece
        let spike = Piece {
            start: a.length(),
            end: a.length(),
            kind: PieceKind::Constant(b.eval(0.0)?),
        };
        let mut pieces: Vec<Piece<f64>> = a
            .pieces()
            .iter()
            .filter(|p| !(p.start == p.end && p.start == a.length()))
            .cloned()
            .collect();
        pieces.push(spike);
        return Ok(ContinuousStream::from_pieces(pieces, None, true)?);
    }
    let mut pieces: Vec<Piece<f64>> = a
        .pieces()
        .iter()
        .filter(|p| !(p.start == p.end && p.start == a.length()))
        .cloned()
        .collect();
    for p in b.pieces() {
        let mut q = shift_piece(p, a.length());
        if let Some(prev) = pieces.last() {
            if q.start != prev.end {
                pin_piece_start(&mut q, prev.end);
            }
        }
        pieces.push(q);
    }
    Ok(ContinuousStream::from_pieces(pieces, None, true)?)
}

fn shift_piece(p: &Piece<f64>, by: f64) -> Piece<f64> {
    let kind = match &p.kind {
        PieceKind::Sampled(g) => PieceKind::Sampled(g.iter().map(|(t, v)| (t + by, *v)).collect()),
        k => k.clone(),
    };
    Piece {
        start: p.start + by,
        end: p.end + by,
        kind,
    }
}

fn pin_piece_start(p: &mut Piece<f64>, at: f64) {
    if let PieceKind::Sampled(g) = &mut p.kind {
        g[0].0 = at;
    }
    p.start = at;
}

/// Pointwise map on continuous streams.
///
/// Constant pieces map exactly; linear pieces are re-sampled on the global
/// `grid` (the image of a line is generally curved); sampled pieces map
/// sample-by-sample. The output Lipschitz bound is the input bound scaled by
/// `lipschitz_factor`; `domain_floor` rejects stored input values below it.
pub fn lift_continuous(
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    grid: f64,
    lipschitz_factor: Option<f64>,
    domain_floor: Option<f64>,
) -> Machine {
    let f = Arc::new(f);
    let out_ty = BehaviorType::continuous();
    Machine::from_spawner(BehaviorType::continuous(), out_ty, 0.0, move || {
        Box::new(LiftProcess {
            f: f.clone(),
            grid,
            lipschitz_factor,
            domain_floor,
        })
    })
}

struct LiftProcess {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    grid: f64,
    lipschitz_factor: Option<f64>,
    domain_floor: Option<f64>,
}

impl Process for LiftProcess {
    fn step(&mut self, input: &Section, t0: f64, _last: bool) -> Result<Section, MachineError> {
        let c = input.as_continuous()?;
        if let Some(floor) = self.domain_floor {
            for v in c.stored_values() {
                if *v < floor {
                    return Err(MachineError::DomainViolation {
                        t: t0,
                        what: format!("value {v} below the domain floor {floor}"),
                    });
                }
            }
        }
        let f = &*self.f;
        let mut pieces = Vec::with_capacity(c.pieces().len());
        for p in c.pieces() {
            let kind = match &p.kind {
                PieceKind::Constant(v) => PieceKind::Constant(f(*v)),
                PieceKind::Linear { .. } => {
                    let mut g: Vec<(f64, f64)> = Vec::new();
                    g.push((p.start, f(p.eval(p.start))));
                    // interior points of the global grid, in run time
                    let mut k = ((t0 + p.start) / self.grid).floor() as i64;
                    loop {
                        let tg = (k as f64) * self.grid - t0;
                        if tg >= p.end {
                            break;
                        }
                        if tg > p.start {
                            g.push((tg, f(p.eval(tg))));
                        }
                        k += 1;
                    }
                    g.push((p.end, f(p.eval(p.end))));
                    PieceKind::Sampled(g)
                }
                PieceKind::Sampled(g) => {
                    PieceKind::Sampled(g.iter().map(|(t, v)| (*t, f(*v))).collect())
                }
            };
            pieces.push(Piece {
                start: p.start,
                end: p.end,
                kind,
            });
        }
        let lipschitz = match (c.lipschitz(), self.lipschitz_factor) {
            (Some(k), Some(s)) => Some(k * s),
            _ => None,
        };
        let out = ContinuousStream::from_pieces(pieces, lipschitz, c.codiscrete())?;
        Ok(Section::Continuous(out))
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(LiftProcess {
            f: self.f.clone(),
            grid: self.grid,
            lipschitz_factor: self.lipschitz_factor,
            domain_floor: self.domain_floor,
        })
    }
}

