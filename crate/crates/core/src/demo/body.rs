//! Body dynamics: control events reconstructed by zero-order hold, then a
//! saturated integrator.

use crate::demo::BodyParams;
use crate::error::MachineError;
use crate::machine::{cds_machine, compose_series, zoh_reconstructor, Machine};
use std::sync::Arc;

/// Clamp a control to the actuator range `[-b, b]`.
pub fn saturate(b: f64, r: f64) -> f64 {
    r.clamp(-b, b)
}

/// `dθ = sat_b(u)·dt` driven by a held control signal. Input is the control
/// event wire, output the heading trajectory, Lipschitz with bound `b`.
pub fn body_dynamics(params: &BodyParams, u0: f64, h: f64) -> Result<Machine, MachineError> {
    params.validate()?;
    let b = params.saturation;
    let hold = zoh_reconstructor(u0).labeled("u_zoh");
    let integrator = cds_machine(
        Arc::new(move |_s: &[f64], u: f64, out: &mut [f64]| out[0] = saturate(b, u)),
        Arc::new(|s: &[f64]| s[0]),
        vec![params.theta0],
        h,
        Some(b),
    )?;
    compose_series(&hold, &integrator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::EventStream;
    use crate::machine::run;
    use crate::section::Section;
    use crate::value::Value;

    fn params(b: f64, theta0: f64) -> BodyParams {
        BodyParams {
            saturation: b,
            theta0,
            theta_goal: 0.0,
            band: 0.05,
        }
    }

    #[test]
    fn no_control_holds_heading() {
        let m = body_dynamics(&params(1.0, 0.7), 0.0, 1e-3).unwrap();
        let rec = run(&m, &Section::empty_event(2.0), 0.5).unwrap();
        let out = rec.output.as_continuous().unwrap();
        assert_eq!(out.eval(0.0).unwrap(), 0.7);
        assert_eq!(out.eval(2.0).unwrap(), 0.7);
    }

    #[test]
    fn saturated_ramp_is_exact() {
        // sat_1(2) = 1, so θ(t) = t
        let m = body_dynamics(&params(1.0, 0.0), 0.0, 1e-3).unwrap();
        let input = Section::Event(EventStream::new(3.0, vec![(0.0, Value::Real(2.0))]).unwrap());
        let rec = run(&m, &input, 0.7).unwrap();
        let out = rec.output.as_continuous().unwrap();
        assert!((out.eval(3.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((out.eval(1.5).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn piecewise_control_traces_a_tent() {
        let m = body_dynamics(&params(1.0, 0.0), 0.0, 1e-3).unwrap();
        let input = Section::Event(
            EventStream::new(
                2.0,
                vec![(0.0, Value::Real(0.5)), (1.0, Value::Real(-0.5))],
            )
            .unwrap(),
        );
        let rec = run(&m, &input, 0.3).unwrap();
        let out = rec.output.as_continuous().unwrap();
        assert!((out.eval(1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((out.eval(2.0).unwrap() - 0.0).abs() < 1e-12);
        let u = rec.tap("u_zoh").unwrap().as_continuous().unwrap();
        assert_eq!(u.eval(0.5).unwrap(), 0.5);
        assert_eq!(u.eval(1.5).unwrap(), -0.5);
    }
}
