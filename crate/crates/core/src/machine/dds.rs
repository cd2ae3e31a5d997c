//! Discrete dynamical systems lifted to event-based machines.

use crate::error::MachineError;
use crate::event::EventStream;
use crate::machine::{Machine, Process};
use crate::section::{BehaviorType, Section};
use crate::value::{Domain, Value};
use std::sync::Arc;

pub type UpdateFn = Arc<dyn Fn(&Value, &Value) -> Value + Send + Sync>;
pub type ReadoutFn = Arc<dyn Fn(&Value) -> Value + Send + Sync>;

/// Event machine driven by an update/readout pair: each input event `(t, a)`
/// advances the state with `f_upd(a, s)` and emits `(t, f_rdt(s'))`, so the
/// output time-stamps equal the input time-stamps.
pub fn dds_machine(
    f_upd: UpdateFn,
    f_rdt: ReadoutFn,
    s0: Value,
    in_domain: Domain,
    out_domain: Domain,
) -> Machine {
    Machine::from_spawner(
        BehaviorType::Event(in_domain),
        BehaviorType::Event(out_domain),
        0.0,
        move || {
            Box::new(DdsProcess {
                upd: f_upd.clone(),
                rdt: f_rdt.clone(),
                state: s0.clone(),
            })
        },
    )
}

struct DdsProcess {
    upd: UpdateFn,
    rdt: ReadoutFn,
    state: Value,
}

impl Process for DdsProcess {
    fn step(&mut self, input: &Section, _t0: f64, _last: bool) -> Result<Section, MachineError> {
        let e = input.as_event()?;
        let mut events = Vec::with_capacity(e.len());
        for (t, a) in e.events() {
            self.state = (self.upd)(a, &self.state);
            events.push((*t, (self.rdt)(&self.state)));
        }
        Ok(Section::Event(EventStream::new(e.length(), events)?))
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(DdsProcess {
            upd: self.upd.clone(),
            rdt: self.rdt.clone(),
            state: self.state.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::run;

    #[test]
    fn counter_unrolls_by_hand() {
        let m = dds_machine(
            Arc::new(|_a, s: &Value| Value::Int(s.as_int().unwrap() + 1)),
            Arc::new(|s: &Value| s.clone()),
            Value::Int(0),
            Domain::Any,
            Domain::Any,
        );
        let input = Section::Event(
            EventStream::new(
                4.0,
                vec![
                    (0.5, Value::Unit),
                    (1.5, Value::Unit),
                    (3.0, Value::Unit),
                ],
            )
            .unwrap(),
        );
        let rec = run(&m, &input, 1.0).unwrap();
        let out = rec.output.as_event().unwrap();
        assert_eq!(
            out.events(),
            &[
                (0.5, Value::Int(1)),
                (1.5, Value::Int(2)),
                (3.0, Value::Int(3)),
            ]
        );
    }

    #[test]
    fn frozen_state_reads_out_constantly() {
        let m = dds_machine(
            Arc::new(|_a, s: &Value| s.clone()),
            Arc::new(|_s| Value::sym("c")),
            Value::Unit,
            Domain::Any,
            Domain::Sym,
        );
        let input = Section::Event(
            EventStream::new(2.0, vec![(0.25, Value::Int(9)), (1.0, Value::Int(7))]).unwrap(),
        );
        let rec = run(&m, &input, 10.0).unwrap();
        let out = rec.output.as_event().unwrap();
        assert_eq!(out.events(), &[(0.25, Value::sym("c")), (1.0, Value::sym("c"))]);
    }
}
