//! Behavior types and their sections: the values machines exchange.

use crate::clock::ClockSection;
use crate::continuous::ContinuousStream;
use crate::error::SectionError;
use crate::event::EventStream;
use crate::time::Duration;
use crate::value::{Domain, Value};

/// Runtime tag for the behavior a wire carries.
#[derive(Debug, Clone, PartialEq)]
pub enum BehaviorType {
    /// The terminal behavior: exactly one section per length.
    Unit,
    Event(Domain),
    /// Continuous trajectories; `lipschitz` documents a bound when the
    /// constructor knows one (sections carry their own certificates).
    Continuous { lipschitz: Option<f64> },
    Clock { period: f64 },
    /// Flat tuple of wires (no nested products).
    Product(Vec<BehaviorType>),
}

impl BehaviorType {
    pub fn continuous() -> Self {
        BehaviorType::Continuous { lipschitz: None }
    }

    pub fn continuous_with_bound(k: f64) -> Self {
        BehaviorType::Continuous { lipschitz: Some(k) }
    }

    pub fn event_any() -> Self {
        BehaviorType::Event(Domain::Any)
    }

    pub fn product(items: Vec<BehaviorType>) -> Result<Self, SectionError> {
        if items.is_empty() {
            return Err(SectionError::InvalidSection("empty product type".into()));
        }
        if items.iter().any(|t| matches!(t, BehaviorType::Product(_))) {
            return Err(SectionError::InvalidSection(
                "product types must be flat".into(),
            ));
        }
        Ok(BehaviorType::Product(items))
    }

    /// Structural compatibility for wiring; `Domain::Any` is a wildcard and
    /// Lipschitz annotations are informative only.
    pub fn compatible(&self, other: &BehaviorType) -> bool {
        match (self, other) {
            (BehaviorType::Unit, BehaviorType::Unit) => true,
            (BehaviorType::Event(a), BehaviorType::Event(b)) => a.compatible(b),
            (BehaviorType::Continuous { .. }, BehaviorType::Continuous { .. }) => true,
            (BehaviorType::Clock { period: a }, BehaviorType::Clock { period: b }) => a == b,
            (BehaviorType::Product(a), BehaviorType::Product(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.compatible(y))
            }
            _ => false,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            BehaviorType::Unit => "unit".into(),
            BehaviorType::Event(_) => "event".into(),
            BehaviorType::Continuous { .. } => "continuous".into(),
            BehaviorType::Clock { period } => format!("clock(d={period})"),
            BehaviorType::Product(items) => {
                let inner: Vec<String> = items.iter().map(|t| t.describe()).collect();
                format!("product[{}]", inner.join(", "))
            }
        }
    }
}

/// A behavior of some type over a window `[0, ℓ]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    Unit(Duration),
    Event(EventStream<Value>),
    Continuous(ContinuousStream<f64>),
    Clock(ClockSection),
    Product(Vec<Section>),
}

impl Section {
    pub fn unit(length: f64) -> Result<Self, SectionError> {
        Ok(Section::Unit(Duration::new(length)?))
    }

    pub fn empty_event(length: f64) -> Self {
        Section::Event(EventStream::empty(length))
    }

    pub fn product(parts: Vec<Section>) -> Result<Self, SectionError> {
        let Some(first) = parts.first() else {
            return Err(SectionError::InvalidSection("empty product section".into()));
        };
        let l = first.length();
        if parts.iter().any(|p| p.length() != l) {
            return Err(SectionError::InvalidSection(
                "product components must share one length".into(),
            ));
        }
        Ok(Section::Product(parts))
    }

    pub fn length(&self) -> f64 {
        match self {
            Section::Unit(d) => d.seconds(),
            Section::Event(e) => e.length(),
            Section::Continuous(c) => c.length(),
            Section::Clock(c) => c.length(),
            Section::Product(parts) => parts[0].length(),
        }
    }

    pub fn restrict(&self, from: f64, to: f64) -> Result<Section, SectionError> {
        Ok(match self {
            Section::Unit(_) => {
                if !(0.0 <= from && from <= to && to <= self.length()) {
                    return Err(SectionError::WindowOutOfBounds {
                        from,
                        to,
                        length: self.length(),
                    });
                }
                Section::Unit(Duration::new(to - from)?)
            }
            Section::Event(e) => Section::Event(e.restrict(from, to)?),
            Section::Continuous(c) => Section::Continuous(c.restrict(from, to)?),
            Section::Clock(c) => Section::Clock(c.restrict(from, to)?),
            Section::Product(parts) => Section::Product(
                parts
                    .iter()
                    .map(|p| p.restrict(from, to))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    /// Sheaf gluing along a shared endpoint.
    pub fn glue(&self, other: &Section) -> Result<Section, SectionError> {
        self.join(other, false)
    }

    /// Driver-level concatenation of consecutive windows of one run.
    pub fn splice(&self, other: &Section) -> Result<Section, SectionError> {
        self.join(other, true)
    }

    fn join(&self, other: &Section, driver: bool) -> Result<Section, SectionError> {
        Ok(match (self, other) {
            (Section::Unit(a), Section::Unit(b)) => {
                Section::Unit(Duration::new(a.seconds() + b.seconds())?)
            }
            (Section::Event(a), Section::Event(b)) => Section::Event(if driver {
                a.splice(b)?
            } else {
                a.glue(b)?
            }),
            (Section::Continuous(a), Section::Continuous(b)) => Section::Continuous(a.glue(b)?),
            (Section::Clock(a), Section::Clock(b)) => Section::Clock(a.glue(b)?),
            (Section::Product(a), Section::Product(b)) if a.len() == b.len() => Section::Product(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.join(y, driver))
                    .collect::<Result<_, _>>()?,
            ),
            _ => {
                return Err(SectionError::Incompatible(
                    "sections of different behavior types".into(),
                ))
            }
        })
    }

    /// The most specific type this section evidently has.
    pub fn type_of(&self) -> BehaviorType {
        match self {
            Section::Unit(_) => BehaviorType::Unit,
            Section::Event(_) => BehaviorType::Event(Domain::Any),
            Section::Continuous(c) => BehaviorType::Continuous {
                lipschitz: c.lipschitz(),
            },
            Section::Clock(c) => BehaviorType::Clock { period: c.period() },
            Section::Product(parts) => {
                BehaviorType::Product(parts.iter().map(|p| p.type_of()).collect())
            }
        }
    }

    pub fn check_type(&self, ty: &BehaviorType) -> Result<(), SectionError> {
        let fail = || {
            Err(SectionError::InvalidSection(format!(
                "section of type {} does not inhabit {}",
                self.type_of().describe(),
                ty.describe()
            )))
        };
        match (self, ty) {
            (Section::Unit(_), BehaviorType::Unit) => Ok(()),
            (Section::Event(e), BehaviorType::Event(dom)) => {
                for (t, v) in e.events() {
                    if !dom.contains(v) {
                        return Err(SectionError::InvalidSection(format!(
                            "event value {v} at t = {t} outside wire domain"
                        )));
                    }
                }
                Ok(())
            }
            (Section::Continuous(_), BehaviorType::Continuous { .. }) => Ok(()),
            (Section::Clock(c), BehaviorType::Clock { period }) => {
                if c.period() == *period {
                    Ok(())
                } else {
                    fail()
                }
            }
            (Section::Product(parts), BehaviorType::Product(tys)) if parts.len() == tys.len() => {
                parts
                    .iter()
                    .zip(tys)
                    .try_for_each(|(p, t)| p.check_type(t))
            }
            _ => fail(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Section::Unit(_) => true,
            Section::Event(e) => e.events().iter().all(|(t, v)| t.is_finite() && v.is_finite()),
            Section::Continuous(c) => c.is_finite(),
            Section::Clock(_) => true,
            Section::Product(parts) => parts.iter().all(Section::is_finite),
        }
    }

    pub fn as_event(&self) -> Result<&EventStream<Value>, SectionError> {
        match self {
            Section::Event(e) => Ok(e),
            _ => Err(SectionError::InvalidSection(format!(
                "expected an event section, got {}",
                self.type_of().describe()
            ))),
        }
    }

    pub fn as_continuous(&self) -> Result<&ContinuousStream<f64>, SectionError> {
        match self {
            Section::Continuous(c) => Ok(c),
            _ => Err(SectionError::InvalidSection(format!(
                "expected a continuous section, got {}",
                self.type_of().describe()
            ))),
        }
    }

    pub fn as_product(&self) -> Result<&[Section], SectionError> {
        match self {
            Section::Product(parts) => Ok(parts),
            _ => Err(SectionError::InvalidSection(format!(
                "expected a product section, got {}",
                self.type_of().describe()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_algebra() {
        let u = Section::unit(5.0).unwrap();
        assert_eq!(u.length(), 5.0);
        let r = u.restrict(1.0, 3.0).unwrap();
        assert_eq!(r.length(), 2.0);
        let g = r.glue(&Section::unit(4.0).unwrap()).unwrap();
        assert_eq!(g.length(), 6.0);
    }

    #[test]
    fn product_restrict_and_glue() {
        let e = Section::Event(
            EventStream::new(4.0, vec![(1.0, Value::Int(1)), (3.0, Value::Int(2))]).unwrap(),
        );
        let c = Section::Continuous(ContinuousStream::linear(4.0, 0.0, 4.0).unwrap());
        let p = Section::product(vec![e, c]).unwrap();
        let left = p.restrict(0.0, 2.0).unwrap();
        let right = p.restrict(2.0, 4.0).unwrap();
        assert_eq!(left.glue(&right).unwrap(), p);
    }

    #[test]
    fn type_checks() {
        let e = Section::Event(EventStream::new(1.0, vec![(0.5, Value::Int(1))]).unwrap());
        assert!(e.check_type(&BehaviorType::Event(Domain::Polarity)).is_ok());
        let bad = Section::Event(EventStream::new(1.0, vec![(0.5, Value::Int(2))]).unwrap());
        assert!(bad
            .check_type(&BehaviorType::Event(Domain::Polarity))
            .is_err());
        assert!(e.check_type(&BehaviorType::continuous()).is_err());
    }

    #[test]
    fn mismatched_glue_rejected() {
        let e = Section::empty_event(1.0);
        let u = Section::unit(1.0).unwrap();
        assert!(e.glue(&u).is_err());
    }
}
