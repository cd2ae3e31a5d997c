//! Machine contract checks: determinism, totality, inertiality, causality.

use crate::laws::gen::{dyadic, perturb_after, Q};
use crate::machine::{run, Machine};
use crate::section::Section;
use rand::Rng;

/// Run the four machine-contract checks on one generated input.
///
/// Cut points snap to the machine's natural grid when it has one, so the
/// comparison probes stored sample points of integrator outputs rather than
/// interpolation between them.
pub fn check_contract_case(
    m: &Machine,
    input: &Section,
    hint: f64,
    rng: &mut impl Rng,
) -> Option<String> {
    let length = input.length();
    // totality: every type-correct input runs
    let rec = match run(m, input, hint) {
        Ok(r) => r,
        Err(e) => return Some(format!("totality: run rejected a valid input: {e}")),
    };
    // determinism: a repeat run reproduces the record bitwise
    match run(m, input, hint) {
        Err(e) => return Some(format!("determinism: second run failed: {e}")),
        Ok(r2) => {
            if r2.output != rec.output {
                return Some("determinism: repeat run produced a different output".into());
            }
            if r2.taps != rec.taps {
                return Some("determinism: repeat run produced different internal wires".into());
            }
        }
    }
    // causality: a prefix of the input yields the prefix of the output
    let tc = draw_cut(m, length, rng);
    let prefix_in = match input.restrict(0.0, tc) {
        Ok(p) => p,
        Err(e) => return Some(format!("causality: prefix restriction failed: {e}")),
    };
    match run(m, &prefix_in, hint) {
        Err(e) => return Some(format!("causality: prefix run failed: {e}")),
        Ok(short) => match rec.output.restrict(0.0, tc) {
            Err(e) => return Some(format!("causality: output restriction failed: {e}")),
            Ok(full_prefix) => {
                if short.output != full_prefix {
                    return Some(format!(
                        "causality: output on [0, {tc}] depends on later input"
                    ));
                }
            }
        },
    }
    // inertiality: with budget ε, changing the input after tc cannot move
    // the output before tc + ε
    let eps = m.inertiality();
    if eps > 0.0 {
        let tc = draw_cut(m, length, rng);
        let horizon = (tc + eps).min(length);
        let swapped = perturb_after(input, tc, rng);
        match run(m, &swapped, hint) {
            Err(e) => return Some(format!("inertiality: perturbed run failed: {e}")),
            Ok(other) => {
                let a = rec.output.restrict(0.0, horizon);
                let b = other.output.restrict(0.0, horizon);
                match (a, b) {
                    (Ok(a), Ok(b)) => {
                        if a != b {
                            return Some(format!(
                                "inertiality: output on [0, {horizon}] saw input after {tc}"
                            ));
                        }
                    }
                    _ => return Some("inertiality: output restriction failed".into()),
                }
            }
        }
    }
    None
}

/// A cut point in `[0, ℓ]`: a dyadic position, snapped to the machine's
/// natural grid when one exists.
fn draw_cut(m: &Machine, length: f64, rng: &mut impl Rng) -> f64 {
    let raw = dyadic(rng.random_range(0..=((length / Q).floor() as u64)));
    match m.natural_grid() {
        None => raw,
        Some(h) => {
            let k = (raw / h).round();
            (k * h).clamp(0.0, length)
        }
    }
}
