//! The traced closed loop: body ⨟ scene ⨟ camera ⨟ regulator ⨟ delay, with
//! the control wire fed back.

use crate::demo::{
    body_dynamics, event_camera, heading_regulator, observed_scene, BodyParams, CameraGeometry,
    ReflectanceMap, RegulatorParams, RegulatorState,
};
use crate::error::MachineError;
use crate::machine::{compose_series, delay, trace_feedback, Machine};
use crate::section::{BehaviorType, Section};
use crate::value::Domain;

/// Build the closed-loop machine. It has unit outer wires; a run of length
/// `T` carries the whole experiment in its taps: `theta` (heading), `u_zoh`
/// (held control), `intensity`, `events`, `control` (regulator output), and
/// `loop` (the delayed control wire fed back to the body).
///
/// Pixel anchors initialize to the log of each pixel's initial intensity, so
/// a camera starting at rest sees no spurious events.
#[allow(clippy::too_many_arguments)]
pub fn closed_loop(
    geom: &CameraGeometry,
    m: &ReflectanceMap,
    contrast: f64,
    reg: RegulatorParams,
    x0: RegulatorState,
    body: &BodyParams,
    u0: f64,
    loop_delay: f64,
    h: f64,
    grid: f64,
    tol: f64,
) -> Result<Machine, MachineError> {
    if !(loop_delay.is_finite() && loop_delay > 0.0) {
        return Err(MachineError::InvalidParameter(format!(
            "loop delay must be positive, got {loop_delay}"
        )));
    }
    let body_m = body_dynamics(body, u0, h)?.labeled("theta");
    let scene_m = observed_scene(geom, m, grid)?.labeled("intensity");
    let anchors: Vec<f64> = geom
        .dirs()
        .iter()
        .map(|dir| m.eval(body.theta0 + dir).ln())
        .collect();
    let camera_m = event_camera(geom, contrast, &anchors, m.floor(), grid, tol)?.labeled("events");
    let reg_m = heading_regulator(geom, reg, x0)?.labeled("control");
    let loop_ty = BehaviorType::Event(Domain::Real);
    let del_m = delay(loop_delay, &loop_ty, &Section::empty_event(loop_delay))?;
    let composite = compose_series(
        &compose_series(
            &compose_series(&compose_series(&body_m, &scene_m)?, &camera_m)?,
            &reg_m,
        )?,
        &del_m,
    )?;
    trace_feedback(&composite, &loop_ty, &Section::empty_event(loop_delay))
}
