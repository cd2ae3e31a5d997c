//! The law predicates, parametrized over the operations they check so tests
//! can aim them at deliberately broken implementations.

use crate::error::SectionError;
use crate::event::EventStream;
use crate::laws::gen::dyadic;
use crate::section::Section;
use crate::tensor::TensorValue;
use crate::value::Value;

pub type RestrictImpl<'a> = &'a dyn Fn(&Section, f64, f64) -> Result<Section, SectionError>;
pub type GlueImpl<'a> = &'a dyn Fn(&Section, &Section) -> Result<Section, SectionError>;
pub type ZipImpl<'a> = &'a dyn Fn(
    &EventStream<Value>,
    &EventStream<Value>,
) -> Result<EventStream<TensorValue<Value, Value>>, SectionError>;
pub type UnzipImpl<'a> = &'a dyn Fn(
    &EventStream<TensorValue<Value, Value>>,
) -> (EventStream<Value>, EventStream<Value>);

/// A restriction-law case: the ambient window `[a, a+l1] ⊆ [0, ℓ]` and the
/// nested window `[b, b+l2] ⊆ [0, l1]`, all in dyadic ticks.
#[derive(Debug, Clone)]
pub struct PresheafCase {
    pub x: Section,
    pub a: u64,
    pub l1: u64,
    pub b: u64,
    pub l2: u64,
}

impl PresheafCase {
    pub fn draw(x: Section, length_ticks: u64, rng: &mut impl rand::Rng) -> PresheafCase {
        let a = rng.random_range(0..=length_ticks);
        let l1 = rng.random_range(0..=length_ticks - a);
        let b = rng.random_range(0..=l1);
        let l2 = rng.random_range(0..=l1 - b);
        PresheafCase { x, a, l1, b, l2 }
    }
}

/// Identity and composite restriction laws.
pub fn check_presheaf_case(c: &PresheafCase, restrict: RestrictImpl) -> Option<String> {
    let length = c.x.length();
    match restrict(&c.x, 0.0, length) {
        Err(e) => return Some(format!("identity restriction failed: {e}")),
        Ok(r) => {
            if r != c.x {
                return Some("restrict(x, 0, ℓ) differs from x".into());
            }
        }
    }
    let (a, l1, b, l2) = (dyadic(c.a), dyadic(c.l1), dyadic(c.b), dyadic(c.l2));
    let outer = match restrict(&c.x, a, a + l1) {
        Ok(r) => r,
        Err(e) => return Some(format!("outer restriction failed: {e}")),
    };
    let nested = match restrict(&outer, b, b + l2) {
        Ok(r) => r,
        Err(e) => return Some(format!("nested restriction failed: {e}")),
    };
    let direct = match restrict(&c.x, a + b, a + b + l2) {
        Ok(r) => r,
        Err(e) => return Some(format!("direct restriction failed: {e}")),
    };
    if nested != direct {
        return Some(format!(
            "restriction does not compose: windows [{a}, {}] then [{b}, {}]",
            a + l1,
            b + l2
        ));
    }
    None
}

/// A gluing case: split `x` at an interior point; `y` is an optional
/// structured perturbation for the uniqueness probe.
#[derive(Debug, Clone)]
pub struct GluingCase {
    pub x: Section,
    pub split: f64,
    pub y: Option<Section>,
}

/// Split-then-glue existence plus contrapositive uniqueness probing.
pub fn check_gluing_case(
    c: &GluingCase,
    restrict: RestrictImpl,
    glue: GlueImpl,
) -> Option<String> {
    let length = c.x.length();
    let left = match restrict(&c.x, 0.0, c.split) {
        Ok(r) => r,
        Err(e) => return Some(format!("left restriction failed: {e}")),
    };
    let right = match restrict(&c.x, c.split, length) {
        Ok(r) => r,
        Err(e) => return Some(format!("right restriction failed: {e}")),
    };
    match glue(&left, &right) {
        Err(e) => return Some(format!("gluing compatible halves failed: {e}")),
        Ok(glued) => {
            if glued != c.x {
                return Some(format!("glue(x|[0,{0}], x|[{0},ℓ]) differs from x", c.split));
            }
        }
    }
    if let Some(y) = &c.y {
        if *y != c.x {
            let yl = restrict(y, 0.0, c.split);
            let yr = restrict(y, c.split, length);
            if let (Ok(yl), Ok(yr)) = (yl, yr) {
                if yl == left && yr == right {
                    return Some(
                        "uniqueness violated: a distinct section has the same two restrictions"
                            .into(),
                    );
                }
            }
        }
    }
    None
}

/// A monoidal-structure case over two equal-length event streams and a
/// restriction window (in ticks).
#[derive(Debug, Clone)]
pub struct MonoidalCase {
    pub ea: EventStream<Value>,
    pub eb: EventStream<Value>,
    pub from: u64,
    pub to: u64,
}

pub fn check_monoidal_case(
    c: &MonoidalCase,
    zip: ZipImpl,
    unzip: UnzipImpl,
) -> Option<String> {
    let z = match zip(&c.ea, &c.eb) {
        Ok(z) => z,
        Err(e) => return Some(format!("zip failed: {e}")),
    };
    let (ua, ub) = unzip(&z);
    if ua != c.ea || ub != c.eb {
        return Some("unzip ∘ zip is not the identity".into());
    }
    match zip(&ua, &ub) {
        Err(e) => return Some(format!("re-zip failed: {e}")),
        Ok(z2) => {
            if z2 != z {
                return Some("zip ∘ unzip is not the identity".into());
            }
        }
    }
    let (from, to) = (dyadic(c.from), dyadic(c.to));
    let lhs = match z.restrict(from, to) {
        Ok(r) => r,
        Err(e) => return Some(format!("restricting the zipped stream failed: {e}")),
    };
    let (ra, rb) = match (c.ea.restrict(from, to), c.eb.restrict(from, to)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Some("restricting the components failed".into()),
    };
    match zip(&ra, &rb) {
        Err(e) => return Some(format!("zip of restrictions failed: {e}")),
        Ok(rhs) => {
            if lhs != rhs {
                return Some(format!(
                    "zip does not commute with restriction on [{from}, {to}]"
                ));
            }
        }
    }
    // functor laws for the value map
    let f = |v: &Value| -> Value {
        match v {
            Value::Int(n) => Value::Int(n + 1),
            other => other.clone(),
        }
    };
    let g = |v: &Value| -> Value {
        match v {
            Value::Int(n) => Value::Int(2 * n),
            Value::Sym(_) => Value::Int(0),
            other => other.clone(),
        }
    };
    if c.ea.map(|v| v.clone()) != c.ea {
        return Some("map(id) is not the identity".into());
    }
    let composed = c.ea.map(|v| g(&f(v)));
    let staged = c.ea.map(f).map(|v| g(v));
    if composed != staged {
        return Some("map does not respect composition".into());
    }
    None
}
