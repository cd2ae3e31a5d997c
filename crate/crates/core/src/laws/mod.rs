//! Seeded randomized law suites with shrinking counterexamples.
//!
//! Each suite draws `N` cases from a deterministic generator (the pair
//! `(seed, N)` fully determines every case), checks a law predicate, and on
//! the first failure greedily shrinks the case before reporting it. Failures
//! are reported, never raised.

mod checks;
mod contract;
pub mod gen;

pub use checks::{
    check_gluing_case, check_monoidal_case, check_presheaf_case, GluingCase, GlueImpl,
    MonoidalCase, PresheafCase, RestrictImpl, UnzipImpl, ZipImpl,
};
pub use contract::check_contract_case;

use crate::demo;
use crate::error::SectionError;
use crate::event::{unzip_events, zip_events, EventStream};
use crate::laws::gen::{gen_case, rng_for, GenKind};
use crate::machine::{self, Machine};
use crate::section::{BehaviorType, Section};
use crate::textio::section_to_text;
use crate::value::{Domain, Value};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Description of one suite run: the generator, the case count, the seed,
/// and the law predicate it drives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawSuite {
    pub name: String,
    pub generator: String,
    pub cases: u32,
    pub seed: u64,
    pub law: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedSection {
    pub name: String,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    pub case_index: u32,
    pub message: String,
    pub sections: Vec<NamedSection>,
}

/// The outcome of a suite: pass/fail, cases executed, and a replayable
/// minimal counterexample when failing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawReport {
    pub suite: LawSuite,
    pub passed: bool,
    pub cases_executed: u32,
    pub counterexample: Option<Counterexample>,
}

impl LawReport {
    fn pass(suite: LawSuite, executed: u32) -> LawReport {
        LawReport {
            suite,
            passed: true,
            cases_executed: executed,
            counterexample: None,
        }
    }

    pub fn summary_line(&self) -> String {
        let status = if self.passed { "pass" } else { "FAIL" };
        let extra = match &self.counterexample {
            None => String::new(),
            Some(ce) => format!(" (case {}: {})", ce.case_index, ce.message),
        };
        format!(
            "{:<28} {:>5} cases  seed {:>3}  {}{}",
            self.suite.name, self.cases_executed, self.suite.seed, status, extra
        )
    }
}

/// Greedy shrink: repeatedly take the first reduction that still fails.
fn shrink<T: Clone>(
    initial: T,
    message: String,
    fails: &dyn Fn(&T) -> Option<String>,
    reductions: &dyn Fn(&T) -> Vec<T>,
) -> (T, String) {
    let mut cur = initial;
    let mut msg = message;
    let mut budget = 4000usize;
    'outer: while budget > 0 {
        for cand in reductions(&cur) {
            budget = budget.saturating_sub(1);
            if let Some(m) = fails(&cand) {
                cur = cand;
                msg = m;
                continue 'outer;
            }
            if budget == 0 {
                break;
            }
        }
        break;
    }
    (cur, msg)
}

/// Single-step reductions of a section: drop one event, flatten one value,
/// simplify one component.
fn section_reductions(s: &Section) -> Vec<Section> {
    match s {
        Section::Event(e) => {
            let mut out = Vec::new();
            for i in 0..e.len() {
                let mut events = e.events().to_vec();
                events.remove(i);
                out.push(Section::Event(
                    EventStream::new(e.length(), events).expect("removal keeps validity"),
                ));
            }
            for i in 0..e.len() {
                if e.events()[i].1 != Value::Int(0) {
                    let mut events = e.events().to_vec();
                    events[i].1 = Value::Int(0);
                    out.push(Section::Event(
                        EventStream::new(e.length(), events).expect("simplified"),
                    ));
                }
            }
            out
        }
        Section::Continuous(c) => {
            let flat = Section::Continuous(crate::continuous::ContinuousStream::constant(
                c.length(),
                c.eval(0.0).unwrap_or(0.0),
            ));
            if &flat == s {
                vec![]
            } else {
                vec![flat]
            }
        }
        Section::Clock(c) => match c.first_tick() {
            Some(_) => vec![Section::Clock(
                crate::clock::ClockSection::new(c.length(), c.period(), None).expect("tickless"),
            )],
            None => vec![],
        },
        Section::Product(parts) => {
            let mut out = Vec::new();
            for (i, p) in parts.iter().enumerate() {
                for r in section_reductions(p) {
                    let mut ps = parts.clone();
                    ps[i] = r;
                    out.push(Section::Product(ps));
                }
            }
            out
        }
        Section::Unit(_) => vec![],
    }
}

fn ce(case_index: u32, message: String, sections: Vec<(&str, &Section)>) -> Counterexample {
    Counterexample {
        case_index,
        message,
        sections: sections
            .into_iter()
            .map(|(name, s)| NamedSection {
                name: name.to_string(),
                text: section_to_text(s),
            })
            .collect(),
    }
}

fn real_restrict(s: &Section, a: f64, b: f64) -> Result<Section, SectionError> {
    s.restrict(a, b)
}

fn real_glue(a: &Section, b: &Section) -> Result<Section, SectionError> {
    a.glue(b)
}

/// Identity and composite restriction laws over one generator.
pub fn check_presheaf_laws(kind: GenKind, n: u32, seed: u64) -> LawReport {
    check_presheaf_laws_with(kind, n, seed, &real_restrict)
}

pub fn check_presheaf_laws_with(
    kind: GenKind,
    n: u32,
    seed: u64,
    restrict: RestrictImpl,
) -> LawReport {
    let suite = LawSuite {
        name: format!("presheaf/{}", kind.name()),
        generator: format!("random {} sections on the dyadic grid", kind.name()),
        cases: n,
        seed,
        law: "restrict(x,0,ℓ)=x and nested windows compose".into(),
    };
    for i in 0..n {
        let mut rng = rng_for(seed, i);
        let g = gen_case(kind, &mut rng);
        let case = PresheafCase::draw(g.section, g.length_ticks, &mut rng);
        if let Some(msg) = check_presheaf_case(&case, restrict) {
            let fails = |c: &PresheafCase| check_presheaf_case(c, restrict);
            let reductions = |c: &PresheafCase| {
                let mut out: Vec<PresheafCase> = section_reductions(&c.x)
                    .into_iter()
                    .map(|x| PresheafCase { x, ..c.clone() })
                    .collect();
                if c.l2 > 0 {
                    out.push(PresheafCase {
                        l2: c.l2 / 2,
                        ..c.clone()
                    });
                }
                if c.b > 0 {
                    out.push(PresheafCase {
                        b: c.b / 2,
                        ..c.clone()
                    });
                }
                if c.a > 0 {
                    out.push(PresheafCase {
                        a: c.a / 2,
                        ..c.clone()
                    });
                }
                out
            };
            let (min_case, msg) = shrink(case, msg, &fails, &reductions);
            return LawReport {
                suite,
                passed: false,
                cases_executed: i + 1,
                counterexample: Some(ce(i, msg, vec![("x", &min_case.x)])),
            };
        }
    }
    LawReport::pass(suite, n)
}

/// Split-then-glue round trip plus contrapositive uniqueness probing.
pub fn check_gluing(kind: GenKind, n: u32, seed: u64) -> LawReport {
    check_gluing_with(kind, n, seed, &real_restrict, &real_glue)
}

pub fn check_gluing_with(
    kind: GenKind,
    n: u32,
    seed: u64,
    restrict: RestrictImpl,
    glue: GlueImpl,
) -> LawReport {
    let suite = LawSuite {
        name: format!("gluing/{}", kind.name()),
        generator: format!(
            "random {} sections, adversarial boundary events at split points",
            kind.name()
        ),
        cases: n,
        seed,
        law: "compatible halves glue uniquely back to the whole".into(),
    };
    for i in 0..n {
        let mut rng = rng_for(seed, i);
        let g = gen_case(kind, &mut rng);
        let y = gen::perturb_section(&g.section, &mut rng);
        let case = GluingCase {
            x: g.section,
            split: g.split,
            y,
        };
        if let Some(msg) = check_gluing_case(&case, restrict, glue) {
            let fails = |c: &GluingCase| check_gluing_case(c, restrict, glue);
            let reductions = |c: &GluingCase| {
                section_reductions(&c.x)
                    .into_iter()
                    .map(|x| GluingCase {
                        x,
                        split: c.split,
                        y: None,
                    })
                    .collect::<Vec<_>>()
            };
            let (min_case, msg) = shrink(case, msg, &fails, &reductions);
            let mut sections = vec![("x", &min_case.x)];
            if let Some(y) = &min_case.y {
                sections.push(("perturbed", y));
            }
            return LawReport {
                suite,
                passed: false,
                cases_executed: i + 1,
                counterexample: Some(ce(i, msg, sections)),
            };
        }
    }
    LawReport::pass(suite, n)
}

fn real_zip(
    a: &EventStream<Value>,
    b: &EventStream<Value>,
) -> Result<EventStream<crate::tensor::TensorValue<Value, Value>>, SectionError> {
    zip_events(a, b)
}

fn real_unzip(
    e: &EventStream<crate::tensor::TensorValue<Value, Value>>,
) -> (EventStream<Value>, EventStream<Value>) {
    unzip_events(e)
}

/// Zip/unzip round trips, restriction commutation, and the value-map
/// functor laws.
pub fn check_monoidal(n: u32, seed: u64) -> LawReport {
    check_monoidal_with(n, seed, &real_zip, &real_unzip)
}

pub fn check_monoidal_with(n: u32, seed: u64, zip: ZipImpl, unzip: UnzipImpl) -> LawReport {
    let suite = LawSuite {
        name: "monoidal/event".into(),
        generator: "paired random event streams of one length".into(),
        cases: n,
        seed,
        law: "zip/unzip are inverse, commute with restriction; map is functorial".into(),
    };
    for i in 0..n {
        let mut rng = rng_for(seed, i);
        let length_ticks = rng.random_range(0..=8 * 1024u64);
        let ea = gen::gen_event_stream(length_ticks, &mut rng);
        let eb = gen::gen_event_stream(length_ticks, &mut rng);
        let from = rng.random_range(0..=length_ticks);
        let to = rng.random_range(from..=length_ticks);
        let case = MonoidalCase { ea, eb, from, to };
        if let Some(msg) = check_monoidal_case(&case, zip, unzip) {
            let fails = |c: &MonoidalCase| check_monoidal_case(c, zip, unzip);
            let reductions = |c: &MonoidalCase| {
                let mut out = Vec::new();
                for i in 0..c.ea.len() {
                    let mut events = c.ea.events().to_vec();
                    events.remove(i);
                    out.push(MonoidalCase {
                        ea: EventStream::new(c.ea.length(), events).expect("valid"),
                        ..c.clone()
                    });
                }
                for i in 0..c.eb.len() {
                    let mut events = c.eb.events().to_vec();
                    events.remove(i);
                    out.push(MonoidalCase {
                        eb: EventStream::new(c.eb.length(), events).expect("valid"),
                        ..c.clone()
                    });
                }
                out
            };
            let (min_case, msg) = shrink(case, msg, &fails, &reductions);
            let sa = Section::Event(min_case.ea.clone());
            let sb = Section::Event(min_case.eb.clone());
            return LawReport {
                suite,
                passed: false,
                cases_executed: i + 1,
                counterexample: Some(ce(i, msg, vec![("left", &sa), ("right", &sb)])),
            };
        }
    }
    LawReport::pass(suite, n)
}

pub type InputGen = Arc<dyn Fn(&mut rand_chacha::ChaCha8Rng) -> Section + Send + Sync>;

/// A machine under contract test: how to build inputs for it and whether
/// its outputs reproduce bitwise across window chops (machines that locate
/// crossings by bracketing report times only to tolerance).
#[derive(Clone)]
pub struct MachineSpec {
    pub name: String,
    pub machine: Machine,
    pub gen: InputGen,
    pub hint: f64,
}

/// Determinism, totality, inertiality, and causality over generated inputs.
pub fn check_machine_contract(spec: &MachineSpec, n: u32, seed: u64) -> LawReport {
    let suite = LawSuite {
        name: format!("machines/{}", spec.name),
        generator: "random type-correct inputs, lengths down to zero".into(),
        cases: n,
        seed,
        law: "deterministic, total, inertial, causal".into(),
    };
    for i in 0..n {
        let mut rng = rng_for(seed, i);
        let input = (spec.gen)(&mut rng);
        if let Some(msg) = check_contract_case(&spec.machine, &input, spec.hint, &mut rng) {
            let fails = |s: &Section| {
                let mut r = rng_for(seed, i);
                let _ = (spec.gen)(&mut r); // advance identically
                check_contract_case(&spec.machine, s, spec.hint, &mut r)
            };
            let (min_input, msg) = shrink(input, msg, &fails, &section_reductions);
            return LawReport {
                suite,
                passed: false,
                cases_executed: i + 1,
                counterexample: Some(ce(i, msg, vec![("input", &min_input)])),
            };
        }
    }
    LawReport::pass(suite, n)
}

/// The machines exercised by the `machines` suite: every primitive plus the
/// heading-regulation stages.
pub fn builtin_machine_suite() -> Vec<MachineSpec> {
    let mut out: Vec<MachineSpec> = Vec::new();

    let gen_events: InputGen = Arc::new(|rng| {
        let ticks = rng.random_range(0..=4 * 1024u64);
        Section::Event(gen::gen_event_stream(ticks, rng))
    });
    let gen_real_events: InputGen = Arc::new(|rng| {
        let ticks = rng.random_range(0..=4 * 1024u64);
        let e = gen::gen_event_stream(ticks, rng);
        let vals: Vec<(f64, Value)> = e
            .events()
            .iter()
            .map(|(t, _)| (*t, Value::Real(rng.random_range(-8..=8) as f64 * 0.25)))
            .collect();
        Section::Event(EventStream::new(e.length(), vals).expect("valid"))
    });
    let gen_lipschitz: InputGen = Arc::new(|rng| {
        Section::Continuous(gen::gen_lipschitz_stream(rng, 8.0, 0.0, 4.0))
    });
    let gen_positive: InputGen = Arc::new(|rng| {
        Section::Continuous(positive_stream(rng))
    });

    out.push(MachineSpec {
        name: "delay-event".into(),
        machine: machine::delay(
            0.5,
            &BehaviorType::event_any(),
            &Section::empty_event(0.5),
        )
        .expect("valid delay"),
        gen: gen_events.clone(),
        hint: 0.75,
    });
    out.push(MachineSpec {
        name: "delay-continuous".into(),
        machine: machine::delay(
            0.25,
            &BehaviorType::continuous(),
            &Section::Continuous(crate::continuous::ContinuousStream::constant(0.25, 1.0)),
        )
        .expect("valid delay"),
        gen: gen_lipschitz.clone(),
        hint: 0.75,
    });
    out.push(MachineSpec {
        name: "filter-positive-polarity".into(),
        machine: machine::filter(Domain::Any, |v| v.as_int() == Some(1)),
        gen: gen_events.clone(),
        hint: 0.75,
    });
    out.push(MachineSpec {
        name: "periodic-sampler".into(),
        machine: machine::periodic_sampler(0.5, 0.125).expect("valid sampler"),
        gen: gen_lipschitz.clone(),
        hint: 0.75,
    });
    out.push(MachineSpec {
        name: "level-crossing".into(),
        machine: machine::level_crossing_sampler(0.5, 0.0, machine::Metric::Abs, 1e-6)
            .expect("valid sampler"),
        gen: gen_lipschitz.clone(),
        hint: 0.75,
    });
    out.push(MachineSpec {
        name: "zoh".into(),
        machine: machine::zoh_reconstructor(0.0),
        gen: gen_real_events.clone(),
        hint: 0.75,
    });
    out.push(MachineSpec {
        name: "dds-counter".into(),
        machine: machine::dds_machine(
            Arc::new(|_a, s: &Value| Value::Int(s.as_int().unwrap_or(0) + 1)),
            Arc::new(|s: &Value| s.clone()),
            Value::Int(0),
            Domain::Any,
            Domain::Any,
        ),
        gen: gen_events.clone(),
        hint: 0.75,
    });
    out.push(MachineSpec {
        name: "cds-decay".into(),
        machine: machine::cds_machine(
            Arc::new(|s: &[f64], _u: f64, out: &mut [f64]| out[0] = -s[0]),
            Arc::new(|s: &[f64]| s[0]),
            vec![1.0],
            1e-2,
            None,
        )
        .expect("valid cds"),
        gen: gen_lipschitz.clone(),
        hint: 0.75,
    });

    // §4 stages
    out.push(MachineSpec {
        name: "log".into(),
        machine: demo::log_machine(1e-6, 1e-2),
        gen: gen_positive.clone(),
        hint: 0.75,
    });
    out.push(MachineSpec {
        name: "pixel".into(),
        machine: demo::pixel_machine(0.3, 2.0f64.ln(), 1e-6, 1e-2, 1e-6).expect("valid pixel"),
        gen: gen_positive.clone(),
        hint: 0.75,
    });
    let geom = demo::CameraGeometry::uniform(4).expect("4 pixels");
    let anchors = vec![2.0f64.ln(); 4];
    out.push(MachineSpec {
        name: "camera".into(),
        machine: demo::event_camera(&geom, 0.3, &anchors, 1e-6, 1e-2, 1e-6).expect("valid camera"),
        gen: Arc::new(|rng| {
            let len_ticks = rng.random_range(0..=4 * 1024u64);
            let parts = (0..4)
                .map(|_| Section::Continuous(positive_stream_with_len(rng, len_ticks)))
                .collect();
            Section::product(parts).expect("equal lengths")
        }),
        hint: 0.75,
    });
    out.push(MachineSpec {
        name: "heading-regulator".into(),
        machine: demo::heading_regulator(
            &geom,
            demo::RegulatorParams {
                decay: 1.0,
                gain: 1.0,
                estimator: demo::Estimator::GoalRelative { theta_goal: 0.0 },
            },
            demo::RegulatorState::default(),
        )
        .expect("valid regulator"),
        gen: Arc::new(|rng| {
            let ticks = rng.random_range(0..=4 * 1024u64);
            let e = gen::gen_event_stream(ticks, rng);
            let vals: Vec<(f64, Value)> = e
                .events()
                .iter()
                .map(|(t, _)| {
                    let n = rng.random_range(1..=4usize);
                    let mut pixels: Vec<usize> =
                        (0..n).map(|_| rng.random_range(0..4usize)).collect();
                    pixels.sort_unstable();
                    pixels.dedup();
                    (
                        *t,
                        Value::record(pixels.into_iter().map(|p| {
                            (p, Value::Int(if rng.random_bool(0.5) { 1 } else { -1 }))
                        })),
                    )
                })
                .collect();
            Section::Event(EventStream::new(e.length(), vals).expect("valid"))
        }),
        hint: 0.75,
    });
    out.push(MachineSpec {
        name: "body-dynamics".into(),
        machine: demo::body_dynamics(
            &demo::BodyParams {
                saturation: 1.0,
                theta0: 0.0,
                theta_goal: 0.0,
                band: 0.05,
            },
            0.0,
            1e-2,
        )
        .expect("valid body"),
        gen: gen_real_events.clone(),
        hint: 0.75,
    });
    let m = demo::ReflectanceMap::new(
        demo::ReflectanceSpec::Fourier {
            dc: 2.0,
            harmonics: vec![(1.0, 0.0)],
        },
        1e-6,
    )
    .expect("valid reflectance");
    out.push(MachineSpec {
        name: "observed-scene".into(),
        machine: demo::observed_scene(&geom, &m, 1e-2).expect("valid scene"),
        gen: gen_lipschitz.clone(),
        hint: 0.75,
    });
    out
}

fn positive_stream(rng: &mut impl Rng) -> crate::continuous::ContinuousStream<f64> {
    let ticks = rng.random_range(0..=8 * 1024u64);
    positive_stream_with_len(rng, ticks)
}

fn positive_stream_with_len(
    rng: &mut impl Rng,
    length_ticks: u64,
) -> crate::continuous::ContinuousStream<f64> {
    use crate::continuous::{ContinuousStream, Piece, PieceKind};
    if length_ticks == 0 {
        return ContinuousStream::constant(0.0, 2.0).with_computed_lipschitz();
    }
    let pieces = rng.random_range(1..=5usize);
    let mut cuts: Vec<u64> = (0..pieces - 1)
        .map(|_| rng.random_range(0..=length_ticks))
        .collect();
    cuts.push(0);
    cuts.push(length_ticks);
    cuts.sort_unstable();
    cuts.dedup();
    let mut out: Vec<Piece<f64>> = Vec::new();
    let mut v = 1.0 + rng.random_range(0..=8) as f64 * 0.25;
    for w in cuts.windows(2) {
        let (a, b) = (gen::dyadic(w[0]), gen::dyadic(w[1]));
        let dv_max = (0.4 * (b - a)).min(1.5);
        let dv = rng.random_range(-16..=16) as f64 / 16.0 * dv_max;
        let to = (v + dv).max(0.5);
        out.push(Piece {
            start: a,
            end: b,
            kind: PieceKind::Linear { from: v, to },
        });
        v = to;
    }
    ContinuousStream::from_pieces(out, None, false)
        .expect("generated pieces")
        .with_computed_lipschitz()
}

/// Which suites to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteSelector {
    Presheaf,
    Gluing,
    Monoidal,
    Machines,
    All,
}

impl SuiteSelector {
    pub fn parse(s: &str) -> Option<SuiteSelector> {
        match s {
            "presheaf" => Some(SuiteSelector::Presheaf),
            "gluing" => Some(SuiteSelector::Gluing),
            "monoidal" => Some(SuiteSelector::Monoidal),
            "machines" => Some(SuiteSelector::Machines),
            "all" => Some(SuiteSelector::All),
            _ => None,
        }
    }
}

/// Run the selected suites and collect their reports.
pub fn run_suites(selector: SuiteSelector, n: u32, seed: u64) -> Vec<LawReport> {
    let mut reports = Vec::new();
    let kinds = [GenKind::Event, GenKind::Continuous, GenKind::Clock];
    if matches!(selector, SuiteSelector::Presheaf | SuiteSelector::All) {
        for kind in kinds {
            reports.push(check_presheaf_laws(kind, n, seed));
        }
    }
    if matches!(selector, SuiteSelector::Gluing | SuiteSelector::All) {
        for kind in kinds {
            reports.push(check_gluing(kind, n, seed));
        }
    }
    if matches!(selector, SuiteSelector::Monoidal | SuiteSelector::All) {
        reports.push(check_monoidal(n, seed));
    }
    if matches!(selector, SuiteSelector::Machines | SuiteSelector::All) {
        for spec in builtin_machine_suite() {
            reports.push(check_machine_contract(&spec, n, seed));
        }
    }
    reports
}
