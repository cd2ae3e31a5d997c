//! Continuous dynamical systems integrated with fixed-step RK4.

use crate::continuous::{ContinuousStream, Piece, PieceKind};
use crate::error::MachineError;
use crate::machine::{Machine, Process};
use crate::section::{BehaviorType, Section};
use std::sync::Arc;

pub type DynamicsFn = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;
pub type StateReadoutFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Machine integrating `ṡ = f_dyn(s, a)` with readout `b = f_rdt(s)`.
///
/// Integration runs on the fixed global grid `0, h, 2h, …`, splitting every
/// step at stored input breakpoints so RK4 never straddles a jump of a
/// piecewise input. The output is sampled on that grid plus the input
/// breakpoints; values at window edges come from a partial step off the last
/// grid state, so refining the window chopping never moves values at shared
/// sample points.
pub fn cds_machine(
    f_dyn: DynamicsFn,
    f_rdt: StateReadoutFn,
    s0: Vec<f64>,
    h: f64,
    out_lipschitz: Option<f64>,
) -> Result<Machine, MachineError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(MachineError::InvalidParameter(format!(
            "integrator step must be positive, got {h}"
        )));
    }
    if s0.is_empty() || s0.iter().any(|x| !x.is_finite()) {
        return Err(MachineError::InvalidParameter(
            "initial state must be non-empty and finite".into(),
        ));
    }
    Ok(Machine::from_spawner(
        BehaviorType::continuous(),
        BehaviorType::Continuous {
            lipschitz: out_lipschitz,
        },
        0.0,
        move || {
            Box::new(CdsProcess {
                f_dyn: f_dyn.clone(),
                f_rdt: f_rdt.clone(),
                h,
                out_lipschitz,
                state: s0.clone(),
                t_state: 0.0,
                grid_k: 1,
                buf: None,
                bps: Vec::new(),
            })
        },
    )
    .with_natural_grid(h))
}

struct CdsProcess {
    f_dyn: DynamicsFn,
    f_rdt: StateReadoutFn,
    h: f64,
    out_lipschitz: Option<f64>,
    /// Canonical state, pinned to the last completed grid point.
    state: Vec<f64>,
    t_state: f64,
    /// Index of the next grid point, at time `grid_k · h`.
    grid_k: u64,
    /// Input accumulated since t = 0, in run time.
    buf: Option<ContinuousStream<f64>>,
    /// Sorted stored breakpoints of `buf`.
    bps: Vec<f64>,
}

impl CdsProcess {
    fn rk4(&self, s: &mut Vec<f64>, a: f64, b: f64, buf: &ContinuousStream<f64>) {
        let dt = b - a;
        if dt == 0.0 {
            return;
        }
        let n = s.len();
        let u_a = buf.eval(a).expect("cell inside buffer");
        let u_mid = buf.eval(a + dt / 2.0).expect("cell inside buffer");
        let u_b = buf.eval_left(b);
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        (self.f_dyn)(s, u_a, &mut k1);
        for i in 0..n {
            tmp[i] = s[i] + dt / 2.0 * k1[i];
        }
        (self.f_dyn)(&tmp, u_mid, &mut k2);
        for i in 0..n {
            tmp[i] = s[i] + dt / 2.0 * k2[i];
        }
        (self.f_dyn)(&tmp, u_mid, &mut k3);
        for i in 0..n {
            tmp[i] = s[i] + dt * k3[i];
        }
        (self.f_dyn)(&tmp, u_b, &mut k4);
        for i in 0..n {
            s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    /// Advance a copy of `s` from `a` to `b`, splitting at stored breakpoints.
    fn advance(&self, s: &mut Vec<f64>, a: f64, b: f64, buf: &ContinuousStream<f64>) {
        let lo = self.bps.partition_point(|t| *t <= a);
        let hi = self.bps.partition_point(|t| *t < b);
        let mut cur = a;
        for idx in lo..hi {
            let bp = self.bps[idx];
            self.rk4(s, cur, bp, buf);
            cur = bp;
        }
        self.rk4(s, cur, b, buf);
    }

    /// Readout at `tq` from the canonical state, without moving it.
    fn dense(&self, tq: f64, buf: &ContinuousStream<f64>) -> f64 {
        let mut s = self.state.clone();
        self.advance(&mut s, self.t_state, tq, buf);
        (self.f_rdt)(&s)
    }
}

impl Process for CdsProcess {
    fn step(&mut self, input: &Section, _t0: f64, _last: bool) -> Result<Section, MachineError> {
        let win = input.as_continuous()?;
        let w0 = self.buf.as_ref().map_or(0.0, |b| b.length());
        let buf = match self.buf.take() {
            None => win.clone(),
            Some(b) => b.splice(win)?,
        };
        let w1 = buf.length();
        for b in win.breakpoints() {
            let t = w0 + b;
            if self.bps.last().is_none_or(|last| *last < t) {
                self.bps.push(t);
            }
        }

        let mut samples: Vec<(f64, f64)> = Vec::new();
        let push = |samples: &mut Vec<(f64, f64)>, t: f64, v: f64| {
            if samples.last().is_none_or(|(lt, _)| *lt < t) {
                samples.push((t, v));
            }
        };

        push(&mut samples, w0, self.dense(w0, &buf));
        loop {
            let t_next = (self.grid_k as f64) * self.h;
            if t_next > w1 {
                break;
            }
            // stored breakpoints interior to this cell become output samples
            let lo = self.bps.partition_point(|t| *t <= self.t_state.max(w0));
            let hi = self.bps.partition_point(|t| *t < t_next);
            for idx in lo..hi {
                let bp = self.bps[idx];
                if bp > w0 {
                    push(&mut samples, bp, self.dense(bp, &buf));
                }
            }
            let mut s = self.state.clone();
            self.advance(&mut s, self.t_state, t_next, &buf);
            if s.iter().any(|x| !x.is_finite()) {
                return Err(MachineError::Divergence { t: t_next });
            }
            self.state = s;
            self.t_state = t_next;
            self.grid_k += 1;
            if t_next > w0 {
                push(&mut samples, t_next, (self.f_rdt)(&self.state));
            }
        }
        // tail: breakpoints past the last completed cell, then the window end
        let lo = self.bps.partition_point(|t| *t <= self.t_state.max(w0));
        let hi = self.bps.partition_point(|t| *t < w1);
        for idx in lo..hi {
            let bp = self.bps[idx];
            if bp > w0 {
                push(&mut samples, bp, self.dense(bp, &buf));
            }
        }
        push(&mut samples, w1, self.dense(w1, &buf));
        self.buf = Some(buf);

        let len = win.length();
        let out = if len == 0.0 {
            ContinuousStream::constant(0.0, samples[0].1)
        } else {
            let n = samples.len();
            let grid: Vec<(f64, f64)> = samples
                .into_iter()
                .enumerate()
                .map(|(i, (t, v))| {
                    // pin the edges; interior re-basing is exact on this scale
                    let local = if i == 0 {
                        0.0
                    } else if i == n - 1 {
                        len
                    } else {
                        t - w0
                    };
                    (local, v)
                })
                .collect();
            if grid.iter().any(|(_, v)| !v.is_finite()) {
                return Err(MachineError::Divergence { t: w1 });
            }
            ContinuousStream::from_pieces(
                vec![Piece {
                    start: 0.0,
                    end: len,
                    kind: PieceKind::Sampled(grid),
                }],
                self.out_lipschitz,
                false,
            )?
        };
        Ok(Section::Continuous(out))
    }
    fn box_clone(&self) -> Box<dyn Process> {
        Box::new(CdsProcess {
            f_dyn: self.f_dyn.clone(),
            f_rdt: self.f_rdt.clone(),
            h: self.h,
            out_lipschitz: self.out_lipschitz,
            state: self.state.clone(),
            t_state: self.t_state,
            grid_k: self.grid_k,
            buf: self.buf.clone(),
            bps: self.bps.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::run;

    fn scalar_cds(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, s0: f64, h: f64) -> Machine {
        cds_machine(
            Arc::new(move |s: &[f64], u: f64, out: &mut [f64]| out[0] = f(s[0], u)),
            Arc::new(|s: &[f64]| s[0]),
            vec![s0],
            h,
            None,
        )
        .unwrap()
    }

    #[test]
    fn zero_dynamics_holds_state() {
        let m = scalar_cds(|_s, _u| 0.0, 3.5, 1e-2);
        let input = Section::Continuous(ContinuousStream::constant(2.0, 0.0));
        let rec = run(&m, &input, 0.5).unwrap();
        let out = rec.output.as_continuous().unwrap();
        assert_eq!(out.eval(0.0).unwrap(), 3.5);
        assert_eq!(out.eval(1.37).unwrap(), 3.5);
        assert_eq!(out.eval(2.0).unwrap(), 3.5);
    }

    #[test]
    fn integrates_constant_input_exactly() {
        // ṡ = a with a = 1: s(2) = 2 (RK4 exact on this)
        let m = scalar_cds(|_s, u| u, 0.0, 1e-3);
        let input = Section::Continuous(ContinuousStream::constant(2.0, 1.0));
        let rec = run(&m, &input, 2.0).unwrap();
        let out = rec.output.as_continuous().unwrap();
        assert!((out.eval(2.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_decay_matches_analytic() {
        let m = scalar_cds(|s, _u| -s, 1.0, 1e-3);
        let input = Section::Continuous(ContinuousStream::constant(1.0, 0.0));
        let rec = run(&m, &input, 0.25).unwrap();
        let out = rec.output.as_continuous().unwrap();
        assert!((out.eval(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn divergence_is_reported_with_time() {
        let m = scalar_cds(|s, _u| s * s, 10.0, 1e-2);
        let input = Section::Continuous(ContinuousStream::constant(5.0, 0.0));
        match run(&m, &input, 5.0) {
            Err(MachineError::Divergence { t }) => assert!(t > 0.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
