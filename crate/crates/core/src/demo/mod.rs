//! The neuromorphic heading-regulation loop: an event camera watching a
//! reflectance scene, an event-driven heading regulator, and saturated body
//! dynamics, closed through a delayed feedback wire.

mod body;
mod closed_loop;
mod pixel;
mod regulator;
mod scene;

pub use body::{body_dynamics, saturate};
pub use closed_loop::closed_loop;
pub use pixel::{event_camera, log_machine, pixel_machine};
pub use regulator::heading_regulator;
pub use scene::observed_scene;

use crate::error::MachineError;

pub const TAU: f64 = std::f64::consts::TAU;

/// Wrap an angle to `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > std::f64::consts::PI {
        y - TAU
    } else {
        y
    }
}

/// The pixel set of an event camera and the viewing direction of each pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraGeometry {
    dirs: Vec<f64>,
}

impl CameraGeometry {
    pub fn new(dirs: Vec<f64>) -> Result<Self, MachineError> {
        if dirs.is_empty() {
            return Err(MachineError::InvalidParameter(
                "a camera needs at least one pixel".into(),
            ));
        }
        if dirs.iter().any(|d| !d.is_finite() || *d < 0.0 || *d >= TAU) {
            return Err(MachineError::InvalidParameter(
                "pixel directions must be finite angles in [0, 2π)".into(),
            ));
        }
        Ok(CameraGeometry { dirs })
    }

    /// `n` pixels spread uniformly on the circle.
    pub fn uniform(n: usize) -> Result<Self, MachineError> {
        if n == 0 {
            return Err(MachineError::InvalidParameter(
                "a camera needs at least one pixel".into(),
            ));
        }
        CameraGeometry::new((0..n).map(|i| TAU * (i as f64) / (n as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn dir(&self, pixel: usize) -> f64 {
        self.dirs[pixel]
    }

    pub fn dirs(&self) -> &[f64] {
        &self.dirs
    }
}

/// Event polarity: the sign of the brightness change that fired a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Neg,
    Pos,
}

impl Polarity {
    pub fn sign(self) -> i64 {
        match self {
            Polarity::Neg => -1,
            Polarity::Pos => 1,
        }
    }

    pub fn from_sign(s: i64) -> Option<Polarity> {
        match s {
            1 => Some(Polarity::Pos),
            -1 => Some(Polarity::Neg),
            _ => None,
        }
    }
}

/// Scene reflectance around the circle.
#[derive(Debug, Clone, PartialEq)]
pub enum ReflectanceSpec {
    /// `dc + Σₖ aₖ·cos(kα) + bₖ·sin(kα)`, harmonics listed from k = 1.
    Fourier { dc: f64, harmonics: Vec<(f64, f64)> },
    /// Periodic piecewise-linear lookup table of `(angle, value)` vertices
    /// with angles strictly increasing in `[0, 2π)`.
    Table { points: Vec<(f64, f64)> },
}

/// A validated reflectance map: strictly positive (at least `floor`
/// everywhere, so its log is defined) and Lipschitz with a computed bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectanceMap {
    spec: ReflectanceSpec,
    floor: f64,
    lipschitz: f64,
}

impl ReflectanceMap {
    pub fn new(spec: ReflectanceSpec, floor: f64) -> Result<Self, MachineError> {
        if !(floor.is_finite() && floor > 0.0) {
            return Err(MachineError::InvalidParameter(format!(
                "reflectance floor must be positive, got {floor}"
            )));
        }
        let lipschitz = match &spec {
            ReflectanceSpec::Fourier { dc, harmonics } => {
                if !dc.is_finite()
                    || harmonics.iter().any(|(a, b)| !a.is_finite() || !b.is_finite())
                {
                    return Err(MachineError::InvalidParameter(
                        "reflectance coefficients must be finite".into(),
                    ));
                }
                harmonics
                    .iter()
                    .enumerate()
                    .map(|(i, (a, b))| ((i + 1) as f64) * a.hypot(*b))
                    .sum()
            }
            ReflectanceSpec::Table { points } => {
                if points.is_empty() {
                    return Err(MachineError::InvalidParameter(
                        "reflectance table needs at least one vertex".into(),
                    ));
                }
                let ok = points.iter().all(|(a, v)| {
                    a.is_finite() && v.is_finite() && (0.0..TAU).contains(a)
                }) && points.windows(2).all(|w| w[0].0 < w[1].0);
                if !ok {
                    return Err(MachineError::InvalidParameter(
                        "reflectance table angles must be strictly increasing in [0, 2π)".into(),
                    ));
                }
                let mut k: f64 = 0.0;
                for w in points.windows(2) {
                    k = k.max(((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs());
                }
                let (a0, v0) = points[0];
                let (an, vn) = points[points.len() - 1];
                let gap = a0 + TAU - an;
                if gap > 0.0 {
                    k = k.max(((v0 - vn) / gap).abs());
                }
                k
            }
        };
        let map = ReflectanceMap {
            spec,
            floor,
            lipschitz,
        };
        // certify positivity on a grid dense enough for the Lipschitz bound
        let n = 4096;
        let guard = map.lipschitz * (TAU / n as f64) / 2.0;
        for i in 0..n {
            let alpha = TAU * (i as f64) / (n as f64);
            if map.eval(alpha) - guard < map.floor {
                return Err(MachineError::InvalidParameter(format!(
                    "reflectance cannot be certified >= {} near angle {alpha:.4}",
                    map.floor
                )));
            }
        }
        Ok(map)
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        let a = alpha.rem_euclid(TAU);
        match &self.spec {
            ReflectanceSpec::Fourier { dc, harmonics } => {
                let mut v = *dc;
                for (i, (ak, bk)) in harmonics.iter().enumerate() {
                    let k = (i + 1) as f64;
                    v += ak * (k * a).cos() + bk * (k * a).sin();
                }
                v
            }
            ReflectanceSpec::Table { points } => {
                let i = points.partition_point(|(x, _)| *x <= a);
                if i == 0 || i == points.len() {
                    // between the last vertex and the first, across the wrap
                    let (a0, v0) = points[points.len() - 1];
                    let (a1, v1) = points[0];
                    let span = a1 + TAU - a0;
                    if span == 0.0 {
                        return v0;
                    }
                    let x = if i == 0 { a + TAU - a0 } else { a - a0 };
                    v0 + (v1 - v0) * (x / span)
                } else {
                    let (a0, v0) = points[i - 1];
                    let (a1, v1) = points[i];
                    v0 + (v1 - v0) * ((a - a0) / (a1 - a0))
                }
            }
        }
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Bound on `|m'|`, from the coefficients or the table slopes.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Estimator `f`: maps a pixel direction to a heading contribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Estimator {
    /// `f(dir) = wrap(θ_goal − dir)`: the event-rate-weighted mean of `f`
    /// over firing pixels tracks the heading error for symmetric scenes.
    GoalRelative { theta_goal: f64 },
}

impl Estimator {
    pub fn eval(&self, dir: f64) -> f64 {
        match self {
            Estimator::GoalRelative { theta_goal } => wrap_angle(theta_goal - dir),
        }
    }
}

/// Regulator tuning: decay `a`, gain `κ`, and the estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulatorParams {
    pub decay: f64,
    pub gain: f64,
    pub estimator: Estimator,
}

impl RegulatorParams {
    pub fn validate(&self) -> Result<(), MachineError> {
        if !(self.decay.is_finite() && self.decay > 0.0) {
            return Err(MachineError::InvalidParameter(format!(
                "regulator decay must be positive, got {}",
                self.decay
            )));
        }
        if !(self.gain.is_finite() && self.gain > 0.0) {
            return Err(MachineError::InvalidParameter(format!(
                "regulator gain must be positive, got {}",
                self.gain
            )));
        }
        Ok(())
    }
}

/// Regulator state: the time of the last processed event and the running
/// statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegulatorState {
    pub last_time: f64,
    pub statistic: f64,
}

impl Default for RegulatorState {
    fn default() -> Self {
        RegulatorState {
            last_time: 0.0,
            statistic: 0.0,
        }
    }
}

/// Body dynamics parameters: actuator saturation, initial and goal heading,
/// and the acceptance band around the goal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyParams {
    pub saturation: f64,
    pub theta0: f64,
    pub theta_goal: f64,
    pub band: f64,
}

impl BodyParams {
    pub fn validate(&self) -> Result<(), MachineError> {
        if !(self.saturation.is_finite() && self.saturation > 0.0) {
            return Err(MachineError::InvalidParameter(format!(
                "saturation bound must be positive, got {}",
                self.saturation
            )));
        }
        if !(self.band.is_finite() && self.band > 0.0) {
            return Err(MachineError::InvalidParameter(format!(
                "goal band must be positive, got {}",
                self.band
            )));
        }
        if !self.theta0.is_finite() || !self.theta_goal.is_finite() {
            return Err(MachineError::InvalidParameter(
                "headings must be finite".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(wrap_angle(0.0), 0.0);
        assert!(wrap_angle(-0.1) < 0.0);
        assert!((wrap_angle(TAU + 0.25) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fourier_reflectance() {
        let m = ReflectanceMap::new(
            ReflectanceSpec::Fourier {
                dc: 2.0,
                harmonics: vec![(1.0, 0.0)],
            },
            1e-6,
        )
        .unwrap();
        assert!((m.eval(0.0) - 3.0).abs() < 1e-12);
        assert!((m.eval(std::f64::consts::PI) - 1.0).abs() < 1e-12);
        assert!((m.lipschitz() - 1.0).abs() < 1e-12);
        // dips to zero: cannot be certified positive
        assert!(ReflectanceMap::new(
            ReflectanceSpec::Fourier {
                dc: 1.0,
                harmonics: vec![(1.0, 0.0)],
            },
            1e-6,
        )
        .is_err());
    }

    #[test]
    fn table_reflectance_wraps() {
        let m = ReflectanceMap::new(
            ReflectanceSpec::Table {
                points: vec![(0.0, 1.0), (std::f64::consts::PI, 2.0)],
            },
            0.5,
        )
        .unwrap();
        assert!((m.eval(0.0) - 1.0).abs() < 1e-12);
        assert!((m.eval(std::f64::consts::PI) - 2.0).abs() < 1e-12);
        // halfway down the wrap side
        let mid = 1.5 * std::f64::consts::PI;
        assert!((m.eval(mid) - 1.5).abs() < 1e-12);
    }
}
