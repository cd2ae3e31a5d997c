//! Deterministic random section generators.
//!
//! All times live on the dyadic grid `k·2⁻¹⁰`, so window arithmetic in the
//! law checks is exact and equality of round-tripped sections is bitwise.
//! Generators mix generic positions with adversarial ones (0, the length,
//! and the split point used by gluing checks).

use crate::clock::ClockSection;
use crate::continuous::{ContinuousStream, Piece, PieceKind};
use crate::event::EventStream;
use crate::section::Section;
use crate::value::Value;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dyadic quantum for generated times.
pub const Q: f64 = 1.0 / 1024.0;

/// Maximum generated length, in quanta.
const MAX_TICKS: u64 = 8 * 1024;

pub fn rng_for(seed: u64, case: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

pub fn dyadic(ticks: u64) -> f64 {
    (ticks as f64) * Q
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Event,
    Continuous,
    Clock,
}

impl GenKind {
    pub fn name(self) -> &'static str {
        match self {
            GenKind::Event => "event",
            GenKind::Continuous => "continuous",
            GenKind::Clock => "clock",
        }
    }
}

/// A generated section together with an interior split point on the dyadic
/// grid (used for gluing and restriction checks).
#[derive(Debug, Clone)]
pub struct GeneratedCase {
    pub section: Section,
    pub split: f64,
    pub length_ticks: u64,
}

pub fn gen_case(kind: GenKind, rng: &mut impl Rng) -> GeneratedCase {
    let length_ticks = rng.random_range(0..=MAX_TICKS);
    let split_ticks = rng.random_range(0..=length_ticks);
    let section = match kind {
        GenKind::Event => gen_event(length_ticks, split_ticks, rng),
        GenKind::Continuous => gen_continuous(length_ticks, rng),
        GenKind::Clock => gen_clock(length_ticks, rng),
    };
    GeneratedCase {
        section,
        split: dyadic(split_ticks),
        length_ticks,
    }
}

pub fn small_value(rng: &mut impl Rng) -> Value {
    match rng.random_range(0..5) {
        0 => Value::Int(0),
        1 => Value::Int(1),
        2 => Value::Int(2),
        3 => Value::sym("a"),
        _ => Value::sym("b"),
    }
}

fn gen_event(length_ticks: u64, split_ticks: u64, rng: &mut impl Rng) -> Section {
    let n = rng.random_range(0..=8usize);
    let mut ticks: Vec<u64> = Vec::new();
    for _ in 0..n {
        // adversarial boundary and split positions, then generic ones
        let t = match rng.random_range(0..6) {
            0 => 0,
            1 => length_ticks,
            2 => split_ticks,
            _ => rng.random_range(0..=length_ticks),
        };
        ticks.push(t);
    }
    ticks.sort_unstable();
    ticks.dedup();
    let events = ticks
        .into_iter()
        .map(|t| (dyadic(t), small_value(rng)))
        .collect();
    Section::Event(EventStream::new(dyadic(length_ticks), events).expect("generated stream"))
}

pub fn gen_event_stream(length_ticks: u64, rng: &mut impl Rng) -> EventStream<Value> {
    match gen_event(length_ticks, length_ticks / 2, rng) {
        Section::Event(e) => e,
        _ => unreachable!(),
    }
}

fn gen_continuous(length_ticks: u64, rng: &mut impl Rng) -> Section {
    if length_ticks == 0 {
        let v = rng.random_range(-8..=8) as f64 * 0.5;
        return Section::Continuous(
            ContinuousStream::constant(0.0, v).with_computed_lipschitz(),
        );
    }
    let zoh_style = rng.random_bool(0.3);
    let pieces = rng.random_range(1..=5usize);
    let mut cuts: Vec<u64> = (0..pieces - 1)
        .map(|_| rng.random_range(0..=length_ticks))
        .collect();
    cuts.push(0);
    cuts.push(length_ticks);
    cuts.sort_unstable();
    cuts.dedup();
    let mut out: Vec<Piece<f64>> = Vec::new();
    let mut v = rng.random_range(-8..=8) as f64 * 0.5;
    for w in cuts.windows(2) {
        let (a, b) = (dyadic(w[0]), dyadic(w[1]));
        if zoh_style {
            out.push(Piece {
                start: a,
                end: b,
                kind: PieceKind::Constant(v),
            });
            v = rng.random_range(-8..=8) as f64 * 0.5;
        } else {
            // slope bounded by K <= 10
            let dv_max = (10.0 * (b - a)).min(4.0);
            let dv = rng.random_range(-16..=16) as f64 / 16.0 * dv_max;
            let to = v + dv;
            out.push(Piece {
                start: a,
                end: b,
                kind: PieceKind::Linear { from: v, to },
            });
            v = to;
        }
    }
    let stream = ContinuousStream::from_pieces(out, None, zoh_style).expect("generated pieces");
    Section::Continuous(if zoh_style {
        stream
    } else {
        stream.with_computed_lipschitz()
    })
}

/// A Lipschitz piecewise-linear stream with bound at most `k_max`, length in
/// `[min_len, max_len]` seconds (dyadic), carrying its measured bound.
pub fn gen_lipschitz_stream(
    rng: &mut impl Rng,
    k_max: f64,
    min_len: f64,
    max_len: f64,
) -> ContinuousStream<f64> {
    let lo = (min_len / Q).ceil() as u64;
    let hi = (max_len / Q).floor() as u64;
    let length_ticks = rng.random_range(lo..=hi);
    let pieces = rng.random_range(1..=6usize);
    let mut cuts: Vec<u64> = (0..pieces - 1)
        .map(|_| rng.random_range(0..=length_ticks))
        .collect();
    cuts.push(0);
    cuts.push(length_ticks);
    cuts.sort_unstable();
    cuts.dedup();
    let mut out: Vec<Piece<f64>> = Vec::new();
    let mut v = rng.random_range(-8..=8) as f64 * 0.25;
    for w in cuts.windows(2) {
        let (a, b) = (dyadic(w[0]), dyadic(w[1]));
        let dv_max = k_max * (b - a);
        let dv = rng.random_range(-16..=16) as f64 / 16.0 * dv_max;
        let to = v + dv;
        out.push(Piece {
            start: a,
            end: b,
            kind: PieceKind::Linear { from: v, to },
        });
        v = to;
    }
    if out.is_empty() {
        out.push(Piece {
            start: 0.0,
            end: 0.0,
            kind: PieceKind::Constant(v),
        });
    }
    ContinuousStream::from_pieces(out, None, false)
        .expect("generated pieces")
        .with_computed_lipschitz()
}

fn gen_clock(length_ticks: u64, rng: &mut impl Rng) -> Section {
    let period_ticks = rng.random_range(1..=2048u64);
    let d = dyadic(period_ticks);
    let max_first = period_ticks.saturating_sub(1).min(length_ticks);
    let first = if rng.random_bool(0.85) {
        Some(dyadic(rng.random_range(0..=max_first)))
    } else {
        None
    };
    Section::Clock(ClockSection::new(dyadic(length_ticks), d, first).expect("generated clock"))
}

/// A cheap deterministic RNG forked from a master stream, for helpers that
/// should not disturb the master sequence.
pub fn fork(rng: &mut impl Rng) -> SmallRng {
    SmallRng::seed_from_u64(rng.random())
}

/// A structured perturbation of a section: add, remove, or move one event,
/// bump one value, shift a clock phase, or tilt a continuous piece. Returns
/// `None` when the section admits no perturbation of the drawn kind.
pub fn perturb_section(x: &Section, rng: &mut impl Rng) -> Option<Section> {
    match x {
        Section::Event(e) => {
            let length = e.length();
            let mut events: Vec<(f64, Value)> = e.events().to_vec();
            match rng.random_range(0..4) {
                0 => {
                    // add an event at an unoccupied dyadic time
                    let max_tick = (length / Q).floor() as u64;
                    for _ in 0..32 {
                        let t = dyadic(rng.random_range(0..=max_tick));
                        if events.iter().all(|(s, _)| *s != t) {
                            events.push((t, small_value(rng)));
                            events.sort_by(|a, b| a.0.total_cmp(&b.0));
                            return Some(Section::Event(
                                EventStream::new(length, events).expect("perturbed stream"),
                            ));
                        }
                    }
                    None
                }
                1 => {
                    if events.is_empty() {
                        return None;
                    }
                    let i = rng.random_range(0..events.len());
                    events.remove(i);
                    Some(Section::Event(
                        EventStream::new(length, events).expect("perturbed stream"),
                    ))
                }
                2 => {
                    if events.is_empty() {
                        return None;
                    }
                    let i = rng.random_range(0..events.len());
                    let max_tick = (length / Q).floor() as u64;
                    for _ in 0..32 {
                        let t = dyadic(rng.random_range(0..=max_tick));
                        if events.iter().all(|(s, _)| *s != t) {
                            events[i].0 = t;
                            events.sort_by(|a, b| a.0.total_cmp(&b.0));
                            return Some(Section::Event(
                                EventStream::new(length, events).expect("perturbed stream"),
                            ));
                        }
                    }
                    None
                }
                _ => {
                    if events.is_empty() {
                        return None;
                    }
                    let i = rng.random_range(0..events.len());
                    let old = events[i].1.clone();
                    for _ in 0..8 {
                        let v = small_value(rng);
                        if v != old {
                            events[i].1 = v;
                            return Some(Section::Event(
                                EventStream::new(length, events).expect("perturbed stream"),
                            ));
                        }
                    }
                    None
                }
            }
        }
        Section::Continuous(c) => {
            let mut pieces: Vec<Piece<f64>> = c.pieces().to_vec();
            let i = rng.random_range(0..pieces.len());
            let bump = 0.5 + rng.random_range(0..4) as f64 * 0.25;
            match &mut pieces[i].kind {
                PieceKind::Constant(v) => *v += bump,
                PieceKind::Linear { to, .. } => *to += bump,
                PieceKind::Sampled(g) => {
                    let j = rng.random_range(0..g.len());
                    g[j].1 += bump;
                }
            }
            Some(Section::Continuous(
                ContinuousStream::from_pieces(pieces, None, c.codiscrete()).expect("perturbed"),
            ))
        }
        Section::Clock(c) => {
            let cand = match c.first_tick() {
                Some(t) => t + Q,
                None => 0.0,
            };
            if cand < c.period() && cand <= c.length() {
                Some(Section::Clock(
                    ClockSection::new(c.length(), c.period(), Some(cand))
                        .expect("perturbed clock"),
                ))
            } else {
                None
            }
        }
        Section::Product(parts) => {
            let i = rng.random_range(0..parts.len());
            let mut parts = parts.clone();
            parts[i] = perturb_section(&parts[i], rng)?;
            Some(Section::Product(parts))
        }
        Section::Unit(_) => None,
    }
}

/// Keep `x` on `[0, tc]` and substitute fresh content after `tc`; used by
/// the inertiality check. `tc` must be a valid restriction point of `x`.
pub fn perturb_after(x: &Section, tc: f64, rng: &mut impl Rng) -> Section {
    let length = x.length();
    match x {
        Section::Unit(_) => x.clone(),
        Section::Event(e) => {
            let mut events: Vec<(f64, Value)> = e
                .events()
                .iter()
                .filter(|(t, _)| *t <= tc)
                .cloned()
                .collect();
            let lo_tick = (tc / Q).floor() as u64 + 1;
            let hi_tick = (length / Q).floor() as u64;
            let mut ticks: Vec<u64> = (0..rng.random_range(0..=4usize))
                .filter_map(|_| (lo_tick <= hi_tick).then(|| rng.random_range(lo_tick..=hi_tick)))
                .collect();
            ticks.sort_unstable();
            ticks.dedup();
            for t in ticks {
                events.push((dyadic(t), small_value(rng)));
            }
            Section::Event(EventStream::new(length, events).expect("suffix swap"))
        }
        Section::Continuous(c) => {
            if tc >= length {
                return x.clone();
            }
            let prefix = c.restrict(0.0, tc).expect("prefix");
            let boundary = c.eval(tc).expect("boundary value");
            let k = c.lipschitz().unwrap_or(10.0).min(10.0);
            let dv = rng.random_range(-16..=16) as f64 / 16.0 * k * (length - tc);
            let tail = ContinuousStream::linear(length - tc, boundary, boundary + dv)
                .unwrap_or_else(|_| ContinuousStream::constant(length - tc, boundary));
            let glued = prefix.glue(&tail).expect("compatible by construction");
            Section::Continuous(if c.lipschitz().is_some() {
                glued.with_computed_lipschitz()
            } else {
                glued
            })
        }
        Section::Clock(_) => x.clone(),
        Section::Product(parts) => Section::Product(
            parts.iter().map(|p| perturb_after(p, tc, rng)).collect(),
        ),
    }
}
