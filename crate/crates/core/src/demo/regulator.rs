//! The event-driven heading regulator.

use crate::demo::{CameraGeometry, RegulatorParams, RegulatorState};
use crate::error::MachineError;
use crate::event::EventStream;
use crate::machine::{Machine, Process};
use crate::section::{BehaviorType, Section};
use crate::value::{Domain, Value};
use std::sync::Arc;

/// On each camera event `(t, (S, q))` the statistic decays by
/// `e^{-a·(t - t_prev)}` and every firing pixel contributes
/// `-(κ/a)·f(dir(s))`; the updated statistic is emitted as the control
/// value. Polarities are ignored.
pub fn heading_regulator(
    geom: &CameraGeometry,
    params: RegulatorParams,
    x0: RegulatorState,
) -> Result<Machine, MachineError> {
    params.validate()?;
    let geom = Arc::new(geom.clone());
    let in_domain = Domain::Record(vec![Domain::Polarity; geom.len()]);
    Ok(Machine::from_spawner(
        BehaviorType::Event(in_domain),
        BehaviorType::Event(Domain::Real),
        0.0,
        move || {
            Box::new(RegulatorProcess {
                geom: geom.clone(),
                params: params.clone(),
                state: x0,
            })
        },
    ))
}

struct RegulatorProcess {
    geom: Arc<CameraGeometry>,
    params: RegulatorParams,
    state: RegulatorState,
}

impl Process for RegulatorProcess {
    fn step(&mut self, input: &Section, t0: f64, _last: bool) -> Result<Section, MachineError> {
        let e = input.as_event()?;
        let a = self.params.decay;
        let kappa = self.params.gain;
        let mut events = Vec::with_capacity(e.len());
        for (t_local, v) in e.events() {
            let Value::Record(firing) = v else {
                return Err(MachineError::TypeMismatch {
                    expected: "event(firing record)".into(),
                    got: format!("event value {v}"),
                });
            };
            let t = t0 + t_local;
            let mut s = (-a * (t - self.state.last_time)).exp() * self.state.statistic;
            for pixel in firing.keys() {
                s -= kappa / a * self.params.estimator.eval(self.geom.dir(*pixel));
            }
            self.state = RegulatorState {
                last_time: t,
                statistic: s,
            };
            events.push((*t_local, Value::Real(s)));
        }
        Ok(Section::Event(EventStream::new(e.length(), events)?))
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(RegulatorProcess {
            geom: self.geom.clone(),
            params: self.params.clone(),
            state: self.state,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::Estimator;
    use crate::machine::run;

    fn single_pixel_regulator(a: f64, kappa: f64, f_value: f64, x0: RegulatorState) -> Machine {
        // one pixel at direction 0 with f(0) = f_value
        let geom = CameraGeometry::new(vec![0.0]).unwrap();
        let params = RegulatorParams {
            decay: a,
            gain: kappa,
            estimator: Estimator::GoalRelative {
                theta_goal: f_value,
            },
        };
        // wrap(theta_goal - 0) = f_value for small values
        heading_regulator(&geom, params, x0).unwrap()
    }

    fn firing(pixels: &[usize]) -> Value {
        Value::record(pixels.iter().map(|p| (*p, Value::Int(1))))
    }

    #[test]
    fn no_events_no_output() {
        let m = single_pixel_regulator(1.0, 2.0, 0.5, RegulatorState::default());
        let rec = run(&m, &Section::empty_event(3.0), 1.0).unwrap();
        assert!(rec.output.as_event().unwrap().is_empty());
    }

    #[test]
    fn single_event_matches_update_formula() {
        // e^{-1}·0 - (2/1)·0.5 = -1
        let m = single_pixel_regulator(1.0, 2.0, 0.5, RegulatorState::default());
        let input = Section::Event(EventStream::new(2.0, vec![(1.0, firing(&[0]))]).unwrap());
        let rec = run(&m, &input, 5.0).unwrap();
        let out = rec.output.as_event().unwrap();
        assert_eq!(out.events().len(), 1);
        assert_eq!(out.events()[0].0, 1.0);
        assert!((out.events()[0].1.as_real().unwrap() - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn pure_decay_between_events() {
        // f ≡ 0 (goal 0, pixel dir 0): S decays from 4 as 4e^{-t}
        let m = single_pixel_regulator(
            1.0,
            1.0,
            0.0,
            RegulatorState {
                last_time: 0.0,
                statistic: 4.0,
            },
        );
        let input = Section::Event(
            EventStream::new(3.0, vec![(1.0, firing(&[0])), (2.0, firing(&[0]))]).unwrap(),
        );
        let rec = run(&m, &input, 0.7).unwrap();
        let out = rec.output.as_event().unwrap();
        let s1 = out.events()[0].1.as_real().unwrap();
        let s2 = out.events()[1].1.as_real().unwrap();
        assert!((s1 - 4.0 * (-1.0f64).exp()).abs() < 1e-12);
        assert!((s2 - 4.0 * (-2.0f64).exp()).abs() < 1e-12);
    }
}
