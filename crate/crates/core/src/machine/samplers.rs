//! Samplers and reconstructor: the bridges between continuous and
//! event-based wires.

use crate::continuous::{ContinuousStream, Piece, PieceKind};
use crate::error::MachineError;
use crate::event::EventStream;
use crate::machine::{Machine, Process};
use crate::section::{BehaviorType, Section};
use crate::value::{Domain, Value};

/// Metric on the sampled value space. Streams carry scalar reals here, so
/// the absolute difference is the only instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Abs,
}

impl Metric {
    pub fn dist(self, a: f64, b: f64) -> f64 {
        match self {
            Metric::Abs => (a - b).abs(),
        }
    }
}

/// Sample a continuous stream at the ticks of a period-`d` clock with the
/// given phase; each tick emits the value of the input at that instant.
pub fn periodic_sampler(d: f64, phase: f64) -> Result<Machine, MachineError> {
    if !(d.is_finite() && d > 0.0) {
        return Err(MachineError::InvalidParameter(format!(
            "sampler period must be positive, got {d}"
        )));
    }
    if !(phase.is_finite() && (0.0..d).contains(&phase)) {
        return Err(MachineError::InvalidParameter(format!(
            "sampler phase must lie in [0, {d}), got {phase}"
        )));
    }
    Ok(Machine::from_spawner(
        BehaviorType::continuous(),
        BehaviorType::Event(Domain::Real),
        0.0,
        move || Box::new(PeriodicProcess { d, phase, next: 0 }),
    ))
}

struct PeriodicProcess {
    d: f64,
    phase: f64,
    /// Index of the next unemitted tick; tick k sits at `phase + k·d`.
    next: u64,
}

impl Process for PeriodicProcess {
    fn step(&mut self, input: &Section, t0: f64, last: bool) -> Result<Section, MachineError> {
        let c = input.as_continuous()?;
        let t1 = t0 + c.length();
        let mut events = Vec::new();
        loop {
            let tick = self.phase + (self.next as f64) * self.d;
            let due = if last { tick <= t1 } else { tick < t1 };
            if !due {
                break;
            }
            if tick >= t0 {
                let local = (tick - t0).min(c.length());
                events.push((local, Value::Real(c.eval(local)?)));
            }
            self.next += 1;
        }
        Ok(Section::Event(EventStream::new(c.length(), events)?))
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(PeriodicProcess {
            d: self.d,
            phase: self.phase,
            next: self.next,
        })
    }
}

/// The send-on-delta sampler: starting from anchor `a₀`, emit an event at the
/// least time where the input has moved `level` away from the current anchor,
/// then re-anchor at the emitted value and repeat.
///
/// The input must carry a Lipschitz certificate `K`; the crossing search
/// probes the stride grid `level/(2K)` together with every stored breakpoint
/// (between probes the trajectory is affine, so its distance from the anchor
/// is convex and a crossing cannot hide), then bisects the bracket. Each
/// reported time lies within `tol` of the true crossing and its value is at
/// or beyond the level.
pub fn level_crossing_sampler(
    level: f64,
    a0: f64,
    metric: Metric,
    tol: f64,
) -> Result<Machine, MachineError> {
    if !(level.is_finite() && level > 0.0) {
        return Err(MachineError::InvalidParameter(format!(
            "crossing level must be positive, got {level}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(MachineError::InvalidParameter(format!(
            "time tolerance must be positive, got {tol}"
        )));
    }
    Ok(Machine::from_spawner(
        BehaviorType::continuous(),
        BehaviorType::Event(Domain::Real),
        0.0,
        move || {
            Box::new(LevelCrossingProcess {
                level,
                metric,
                tol_bis: tol.min(1e-9),
                anchor: a0,
                anchor_t: 0.0,
                started: false,
            })
        },
    ))
}

struct LevelCrossingProcess {
    level: f64,
    metric: Metric,
    tol_bis: f64,
    anchor: f64,
    /// Time of the last anchor update; the stride grid hangs off it.
    anchor_t: f64,
    started: bool,
}

impl Process for LevelCrossingProcess {
    fn step(&mut self, input: &Section, t0: f64, _last: bool) -> Result<Section, MachineError> {
        let c = input.as_continuous()?;
        let t1 = t0 + c.length();
        let k = c.lipschitz().ok_or_else(|| {
            MachineError::InvalidParameter(
                "level-crossing sampler requires an input with a Lipschitz bound".into(),
            )
        })?;
        let level = self.level;
        let metric = self.metric;
        let eval_at = |t: f64| -> Result<f64, MachineError> {
            Ok(c.eval((t - t0).clamp(0.0, c.length()))?)
        };
        let mut anchor = self.anchor;
        let mut anchor_t = self.anchor_t;
        let mut events: Vec<(f64, Value)> = Vec::new();

        // an initial value already at or beyond the level fires at t = 0
        if !self.started {
            self.started = true;
            let v = eval_at(t0)?;
            if metric.dist(v, anchor) >= level {
                events.push((0.0, Value::Real(v)));
                anchor = v;
                anchor_t = t0;
            }
        }

        let mut scan_from = t0.max(anchor_t);
        loop {
            let stride = if k > 0.0 {
                level / (2.0 * k)
            } else {
                f64::INFINITY
            };
            let mut probes: Vec<f64> = c
                .breakpoints()
                .into_iter()
                .map(|b| t0 + b)
                .filter(|t| *t > scan_from && *t <= t1)
                .collect();
            if stride.is_finite() {
                let mut j = ((scan_from - anchor_t) / stride).floor().max(0.0) as u64;
                loop {
                    let p = anchor_t + (j as f64) * stride;
                    if p > t1 {
                        break;
                    }
                    if p > scan_from {
                        probes.push(p);
                    }
                    j += 1;
                }
            }
            probes.push(t1);
            probes.sort_by(f64::total_cmp);
            probes.dedup();

            let mut crossing: Option<(f64, f64)> = None; // bracket (lo, hi]
            let mut lo = scan_from;
            for p in probes {
                if metric.dist(eval_at(p)?, anchor) >= level {
                    crossing = Some((lo, p));
                    break;
                }
                lo = p;
            }
            match crossing {
                None => break, // clear up to t1
                Some((mut lo, mut hi)) => {
                    while hi - lo > self.tol_bis {
                        let mid = lo + (hi - lo) / 2.0;
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if metric.dist(eval_at(mid)?, anchor) >= level {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    let v = eval_at(hi)?;
                    events.push(((hi - t0).min(c.length()), Value::Real(v)));
                    anchor = v;
                    anchor_t = hi;
                    scan_from = hi;
                }
            }
        }
        self.anchor = anchor;
        self.anchor_t = anchor_t;
        Ok(Section::Event(EventStream::new(c.length(), events)?))
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(LevelCrossingProcess {
            level: self.level,
            metric: self.metric,
            tol_bis: self.tol_bis,
            anchor: self.anchor,
            anchor_t: self.anchor_t,
            started: self.started,
        })
    }
}

/// The zero-order hold: events become a piecewise-constant trajectory that
/// holds `a0` before the first event and each event's value until the next.
/// The output is continuous into the codiscrete value space and takes the
/// right limit at each jump.
pub fn zoh_reconstructor(a0: f64) -> Machine {
    Machine::from_spawner(
        BehaviorType::Event(Domain::Real),
        BehaviorType::continuous(),
        0.0,
        move || Box::new(ZohProcess { hold: a0 }),
    )
}

struct ZohProcess {
    hold: f64,
}

impl Process for ZohProcess {
    fn step(&mut self, input: &Section, _t0: f64, _last: bool) -> Result<Section, MachineError> {
        let e = input.as_event()?;
        let len = e.length();
        let mut pieces: Vec<Piece<f64>> = Vec::new();
        let mut pos = 0.0;
        for (t, v) in e.events() {
            let v = v.as_real().ok_or_else(|| MachineError::TypeMismatch {
                expected: "event(real)".into(),
                got: format!("event value {v}"),
            })?;
            if *t > pos {
                pieces.push(Piece {
                    start: pos,
                    end: *t,
                    kind: PieceKind::Constant(self.hold),
                });
            }
            self.hold = v;
            pos = *t;
        }
        if pos < len || pieces.is_empty() {
            pieces.push(Piece {
                start: pos,
                end: len,
                kind: PieceKind::Constant(self.hold),
            });
        } else if pos == len {
            // event exactly at the window edge: the new value holds from here
            pieces.push(Piece {
                start: len,
                end: len,
                kind: PieceKind::Constant(self.hold),
            });
        }
        Ok(Section::Continuous(ContinuousStream::from_pieces(
            pieces, None, true,
        )?))
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(ZohProcess { hold: self.hold })
    }
}
