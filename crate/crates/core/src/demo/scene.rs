//! The scene observed by the camera: heading in, per-pixel intensities out.

use crate::demo::{CameraGeometry, ReflectanceMap};
use crate::error::MachineError;
use crate::machine::{compose_series, fan_out, lift_continuous, tensor_n, Machine};
use crate::section::BehaviorType;
use std::sync::Arc;

/// Each pixel `s` sees intensity `m(θ(t) + dir(s))`; the machine fans the
/// heading out to every pixel and applies the per-pixel reflectance lift.
/// Output trajectories are Lipschitz with bound `K_m · K_θ`.
pub fn observed_scene(
    geom: &CameraGeometry,
    m: &ReflectanceMap,
    grid: f64,
) -> Result<Machine, MachineError> {
    let m = Arc::new(m.clone());
    let lifts = geom
        .dirs()
        .iter()
        .map(|dir| {
            let map = m.clone();
            let dir = *dir;
            lift_continuous(
                move |theta: f64| map.eval(theta + dir),
                grid,
                Some(m.lipschitz()),
                None,
            )
        })
        .collect::<Vec<_>>();
    let copies = fan_out(&BehaviorType::continuous(), geom.len())?;
    compose_series(&copies, &tensor_n(lifts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuous::ContinuousStream;
    use crate::demo::ReflectanceSpec;
    use crate::machine::run;
    use crate::section::Section;

    fn cos_map() -> ReflectanceMap {
        ReflectanceMap::new(
            ReflectanceSpec::Fourier {
                dc: 2.0,
                harmonics: vec![(1.0, 0.0)],
            },
            1e-6,
        )
        .unwrap()
    }

    #[test]
    fn constant_heading_gives_constant_intensities() {
        let geom = CameraGeometry::uniform(4).unwrap();
        let m = cos_map();
        let scene = observed_scene(&geom, &m, 1e-3).unwrap();
        let rec = run(
            &scene,
            &Section::Continuous(ContinuousStream::constant(1.0, 0.25).with_lipschitz(0.0)),
            0.5,
        )
        .unwrap();
        let parts = rec.output.as_product().unwrap();
        for (i, p) in parts.iter().enumerate() {
            let c = p.as_continuous().unwrap();
            let expect = m.eval(0.25 + geom.dir(i));
            assert_eq!(c.eval(0.0).unwrap(), expect);
            assert_eq!(c.eval(0.77).unwrap(), expect);
        }
    }

    #[test]
    fn single_pixel_tracks_reflectance_pointwise() {
        let geom = CameraGeometry::new(vec![0.0]).unwrap();
        let m = cos_map();
        let scene = observed_scene(&geom, &m, 1e-3).unwrap();
        let theta = ContinuousStream::linear(std::f64::consts::PI, 0.0, std::f64::consts::PI)
            .unwrap()
            .with_lipschitz(1.0);
        let rec = run(&scene, &Section::Continuous(theta), 10.0).unwrap();
        let out = rec.output.as_continuous().unwrap();
        for t in out.breakpoints() {
            assert!((out.eval(t).unwrap() - (2.0 + t.cos())).abs() < 1e-12);
        }
        assert_eq!(out.lipschitz(), Some(1.0));
    }

    #[test]
    fn opposite_pixels_reflect_for_even_maps() {
        let geom = CameraGeometry::new(vec![0.0, std::f64::consts::PI]).unwrap();
        let m = cos_map();
        let scene = observed_scene(&geom, &m, 1e-3).unwrap();
        let theta = ContinuousStream::linear(1.0, -0.5, 0.5)
            .unwrap()
            .with_lipschitz(1.0);
        let rec = run(&scene, &Section::Continuous(theta), 10.0).unwrap();
        let parts = rec.output.as_product().unwrap();
        let a = parts[0].as_continuous().unwrap();
        let b = parts[1].as_continuous().unwrap();
        // cos(x + π) = -cos(x), so the two intensities sum to 2·dc
        for t in a.breakpoints() {
            let va = a.eval(t).unwrap();
            let vb = b.eval(t).unwrap();
            assert!((va + vb - 4.0).abs() < 1e-12, "t={t}: {va} + {vb}");
        }
    }
}
