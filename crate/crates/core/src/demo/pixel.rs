//! Event-camera pixels: log brightness, level crossing, polarity readout.

use crate::demo::CameraGeometry;
use crate::error::MachineError;
use crate::machine::{
    compose_series, dds_machine, level_crossing_sampler, lift_continuous, tensor_n, Machine,
    Metric,
};
use crate::value::{Domain, Value};
use std::sync::Arc;

/// Pointwise natural log on a positive Lipschitz stream. The output carries
/// bound `K_in / floor`.
pub fn log_machine(floor: f64, grid: f64) -> Machine {
    lift_continuous(|x: f64| x.ln(), grid, Some(1.0 / floor), Some(floor))
}

/// One event-camera pixel with contrast sensitivity `c` and initial
/// log-brightness anchor `r0`: log, then a `c`-level-crossing sampler, then
/// the polarity readout.
///
/// The polarity stage keeps state `(r, q)`: on a crossing value `r'` it
/// emits `+1` when `r' − r >= c`, `-1` when `r' − r <= −c`, and otherwise
/// (unreachable behind the sampler) keeps `r'` and re-emits the previous
/// polarity.
pub fn pixel_machine(
    c: f64,
    r0: f64,
    floor: f64,
    grid: f64,
    tol: f64,
) -> Result<Machine, MachineError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(MachineError::InvalidParameter(format!(
            "contrast sensitivity must be positive, got {c}"
        )));
    }
    let p1 = log_machine(floor, grid);
    let p2 = level_crossing_sampler(c, r0, Metric::Abs, tol)?;
    let p3 = polarity_readout(c, r0);
    compose_series(&compose_series(&p1, &p2)?, &p3)
}

/// The DDS stage of the pixel: state `(r, q)`, readout `q`.
pub fn polarity_readout(c: f64, r0: f64) -> Machine {
    let upd = Arc::new(move |a: &Value, s: &Value| -> Value {
        let r_new = a.as_real().expect("level-crossing emits reals");
        let (r_prev, q_prev) = match s {
            Value::Pair(r, q) => (r.as_real().unwrap(), q.as_int().unwrap()),
            _ => unreachable!("polarity state is a pair"),
        };
        let q = if r_new - r_prev >= c {
            1
        } else if r_new - r_prev <= -c {
            -1
        } else {
            q_prev
        };
        Value::Pair(Box::new(Value::Real(r_new)), Box::new(Value::Int(q)))
    });
    let rdt = Arc::new(|s: &Value| -> Value {
        match s {
            Value::Pair(_, q) => (**q).clone(),
            _ => unreachable!(),
        }
    });
    dds_machine(
        upd,
        rdt,
        Value::Pair(Box::new(Value::Real(r0)), Box::new(Value::Int(1))),
        Domain::Real,
        Domain::Polarity,
    )
}

/// An event camera: the parallel composition of one pixel machine per pixel.
/// Input is the per-pixel intensity tuple; output events carry firing
/// records (a non-empty map pixel → polarity).
pub fn event_camera(
    geom: &CameraGeometry,
    c: f64,
    anchors: &[f64],
    floor: f64,
    grid: f64,
    tol: f64,
) -> Result<Machine, MachineError> {
    if geom.is_empty() {
        return Err(MachineError::InvalidParameter(
            "a camera needs at least one pixel".into(),
        ));
    }
    if anchors.len() != geom.len() {
        return Err(MachineError::InvalidParameter(format!(
            "{} anchors for {} pixels",
            anchors.len(),
            geom.len()
        )));
    }
    let pixels = anchors
        .iter()
        .map(|r0| pixel_machine(c, *r0, floor, grid, tol))
        .collect::<Result<Vec<_>, _>>()?;
    tensor_n(pixels)
}
