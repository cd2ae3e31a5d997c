//! Event streams: finite sets of time-stamped values on a window `[0, ℓ]`.

use crate::error::SectionError;
use crate::tensor::TensorValue;
use crate::time::{times_close, Duration};

/// A length-`ℓ` event stream: strictly increasing time-stamps in `[0, ℓ]`,
/// each carrying a value.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStream<V> {
    length: f64,
    events: Vec<(f64, V)>,
}

impl<V: Clone + PartialEq + std::fmt::Debug> EventStream<V> {
    pub fn new(length: f64, events: Vec<(f64, V)>) -> Result<Self, SectionError> {
        let length = Duration::new(length)?.seconds();
        let mut prev: Option<f64> = None;
        for (t, _) in &events {
            if !t.is_finite() || *t < 0.0 || *t > length {
                return Err(SectionError::InvalidSection(format!(
                    "event time {t} outside [0, {length}]"
                )));
            }
            if let Some(p) = prev {
                if *t <= p {
                    return Err(SectionError::InvalidSection(format!(
                        "time-stamps not strictly increasing at {t}"
                    )));
                }
            }
            prev = Some(*t);
        }
        Ok(EventStream { length, events })
    }

    pub fn empty(length: f64) -> Self {
        EventStream {
            length: Duration::new(length).expect("valid length").seconds(),
            events: Vec::new(),
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn events(&self) -> &[(f64, V)] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// Restriction along `[from, to]`, inclusive at both ends. Surviving
    /// events are re-based to the new window.
    pub fn restrict(&self, from: f64, to: f64) -> Result<Self, SectionError> {
        if !(0.0 <= from && from <= to && to <= self.length) {
            return Err(SectionError::WindowOutOfBounds {
                from,
                to,
                length: self.length,
            });
        }
        let events = self
            .events
            .iter()
            .filter(|(t, _)| from <= *t && *t <= to)
            .map(|(t, v)| (t - from, v.clone()))
            .collect();
        Ok(EventStream {
            length: to - from,
            events,
        })
    }

    /// Sheaf gluing: `self` on `[0, ℓ₁]` pasted with `other` on `[ℓ₁, ℓ₁+ℓ₂]`.
    ///
    /// Compatibility requires the two boundary restrictions to agree: `self`
    /// has an event at its right endpoint iff `other` has one at time 0, with
    /// equal values. A shared boundary event is stored once.
    pub fn glue(&self, other: &Self) -> Result<Self, SectionError> {
        let l1 = self.length;
        let left_boundary = self
            .events
            .last()
            .filter(|(t, _)| times_close(*t, l1))
            .map(|(_, v)| v);
        let right_boundary = other
            .events
            .first()
            .filter(|(t, _)| times_close(*t, 0.0))
            .map(|(_, v)| v);
        match (left_boundary, right_boundary) {
            (None, None) => {}
            (Some(a), Some(b)) if a == b => {}
            (a, b) => {
                return Err(SectionError::Incompatible(format!(
                    "boundary events disagree: {a:?} vs {b:?}"
                )))
            }
        }
        let mut events = self.events.clone();
        for (t, v) in &other.events {
            if times_close(*t, 0.0) && left_boundary.is_some() {
                continue; // stored once, from the left section
            }
            events.push((l1 + t, v.clone()));
        }
        EventStream::new(l1 + other.length, events)
    }

    /// Driver-level concatenation: like [`glue`](Self::glue) but a boundary
    /// event present on only one side is kept rather than rejected. Used to
    /// reassemble windows of a single run, where both sides come from the
    /// same underlying stream.
    pub fn splice(&self, other: &Self) -> Result<Self, SectionError> {
        let l1 = self.length;
        let left_boundary = self
            .events
            .last()
            .filter(|(t, _)| times_close(*t, l1))
            .map(|(_, v)| v);
        let mut events = self.events.clone();
        for (t, v) in &other.events {
            if times_close(*t, 0.0) {
                if let Some(a) = left_boundary {
                    if a != v {
                        return Err(SectionError::Incompatible(format!(
                            "splice boundary values disagree: {a:?} vs {v:?}"
                        )));
                    }
                    continue;
                }
            }
            events.push((l1 + t, v.clone()));
        }
        EventStream::new(l1 + other.length, events)
    }

    /// Pointwise value map; time-stamps are unchanged.
    pub fn map<W: Clone + PartialEq + std::fmt::Debug>(
        &self,
        f: impl Fn(&V) -> W,
    ) -> EventStream<W> {
        EventStream {
            length: self.length,
            events: self.events.iter().map(|(t, v)| (*t, f(v))).collect(),
        }
    }
}

/// Zip two equal-length streams into one stream over the tensor domain.
/// The output time-stamp set is the union of the input time-stamp sets.
pub fn zip_events<A, B>(
    ea: &EventStream<A>,
    eb: &EventStream<B>,
) -> Result<EventStream<TensorValue<A, B>>, SectionError>
where
    A: Clone + PartialEq + std::fmt::Debug,
    B: Clone + PartialEq + std::fmt::Debug,
{
    if ea.length() != eb.length() {
        return Err(SectionError::LengthMismatch {
            left: ea.length(),
            right: eb.length(),
        });
    }
    let (xs, ys) = (ea.events(), eb.events());
    let mut events = Vec::with_capacity(xs.len() + ys.len());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() || j < ys.len() {
        match (xs.get(i), ys.get(j)) {
            (Some((ta, a)), Some((tb, b))) if ta == tb => {
                events.push((*ta, TensorValue::Both(a.clone(), b.clone())));
                i += 1;
                j += 1;
            }
            (Some((ta, a)), Some((tb, _))) if ta < tb => {
                events.push((*ta, TensorValue::Left(a.clone())));
                i += 1;
            }
            (Some(_), Some((tb, b))) => {
                events.push((*tb, TensorValue::Right(b.clone())));
                j += 1;
            }
            (Some((ta, a)), None) => {
                events.push((*ta, TensorValue::Left(a.clone())));
                i += 1;
            }
            (None, Some((tb, b))) => {
                events.push((*tb, TensorValue::Right(b.clone())));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    EventStream::new(ea.length(), events)
}

/// Exact inverse of [`zip_events`].
pub fn unzip_events<A, B>(
    e: &EventStream<TensorValue<A, B>>,
) -> (EventStream<A>, EventStream<B>)
where
    A: Clone + PartialEq + std::fmt::Debug,
    B: Clone + PartialEq + std::fmt::Debug,
{
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (t, v) in e.events() {
        if let Some(a) = v.left() {
            left.push((*t, a.clone()));
        }
        if let Some(b) = v.right() {
            right.push((*t, b.clone()));
        }
    }
    (
        EventStream {
            length: e.length(),
            events: left,
        },
        EventStream {
            length: e.length(),
            events: right,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traffic_light() -> EventStream<&'static str> {
        EventStream::new(
            60.0,
            vec![
                (20.0, "redToOrange"),
                (25.0, "orangeToGreen"),
                (45.0, "greenToOrange"),
                (50.0, "orangeToRed"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn restrict_traffic_light_window() {
        let e = traffic_light();
        let r = e.restrict(15.0, 30.0).unwrap();
        assert_eq!(r.length(), 15.0);
        assert_eq!(r.events(), &[(5.0, "redToOrange"), (10.0, "orangeToGreen")]);
    }

    #[test]
    fn restrict_identity() {
        let e = traffic_light();
        assert_eq!(e.restrict(0.0, e.length()).unwrap(), e);
    }

    #[test]
    fn restrict_to_point_keeps_boundary_event() {
        let e = traffic_light();
        let r = e.restrict(20.0, 20.0).unwrap();
        assert_eq!(r.length(), 0.0);
        assert_eq!(r.events(), &[(0.0, "redToOrange")]);
    }

    #[test]
    fn restrict_rejects_bad_window() {
        let e = traffic_light();
        assert!(e.restrict(-1.0, 5.0).is_err());
        assert!(e.restrict(10.0, 61.0).is_err());
        assert!(e.restrict(30.0, 20.0).is_err());
    }

    #[test]
    fn length_zero_stream_admits_one_event() {
        assert!(EventStream::new(0.0, vec![(0.0, 'x')]).is_ok());
        assert!(EventStream::new(0.0, vec![(0.0, 'x'), (0.0, 'y')]).is_err());
    }

    #[test]
    fn glue_empty_streams() {
        let a = EventStream::<char>::empty(2.0);
        let b = EventStream::<char>::empty(3.0);
        let g = a.glue(&b).unwrap();
        assert_eq!(g.length(), 5.0);
        assert!(g.is_empty());
    }

    #[test]
    fn glue_shared_boundary_event_stored_once() {
        let a = EventStream::new(2.0, vec![(2.0, 'x')]).unwrap();
        let b = EventStream::new(3.0, vec![(0.0, 'x'), (1.0, 'y')]).unwrap();
        let g = a.glue(&b).unwrap();
        assert_eq!(g.events(), &[(2.0, 'x'), (3.0, 'y')]);
        // both restrictions recover the inputs
        assert_eq!(g.restrict(0.0, 2.0).unwrap(), a);
        assert_eq!(g.restrict(2.0, 5.0).unwrap(), b);
    }

    #[test]
    fn glue_boundary_mismatch_rejected() {
        let a = EventStream::new(2.0, vec![(2.0, 'x')]).unwrap();
        let b = EventStream::<char>::empty(3.0);
        assert!(a.glue(&b).is_err());
        let b2 = EventStream::new(3.0, vec![(0.0, 'z')]).unwrap();
        assert!(a.glue(&b2).is_err());
    }

    #[test]
    fn map_examples() {
        let e = EventStream::new(4.0, vec![(1.0, 2i64), (3.0, -3i64)]).unwrap();
        assert_eq!(e.map(|v| *v), e);
        let sq = e.map(|v| v * v);
        assert_eq!(sq.events(), &[(1.0, 4), (3.0, 9)]);
        let c = e.map(|_| 'c');
        assert_eq!(c.events(), &[(1.0, 'c'), (3.0, 'c')]);
    }

    #[test]
    fn zip_disjoint_and_coincident() {
        let ea = EventStream::new(3.0, vec![(1.0, 'x')]).unwrap();
        let eb = EventStream::new(3.0, vec![(2.0, 'y')]).unwrap();
        let z = zip_events(&ea, &eb).unwrap();
        assert_eq!(
            z.events(),
            &[
                (1.0, TensorValue::Left('x')),
                (2.0, TensorValue::Right('y'))
            ]
        );
        let eb2 = EventStream::new(3.0, vec![(1.0, 'y')]).unwrap();
        let z2 = zip_events(&ea, &eb2).unwrap();
        assert_eq!(z2.events(), &[(1.0, TensorValue::Both('x', 'y'))]);
    }

    #[test]
    fn zip_unit_case_and_mismatch() {
        let ea = EventStream::<char>::empty(2.0);
        let eb = EventStream::<char>::empty(2.0);
        assert!(zip_events(&ea, &eb).unwrap().is_empty());
        let ec = EventStream::<char>::empty(3.0);
        assert!(zip_events(&ea, &ec).is_err());
    }

    #[test]
    fn unzip_inverts_zip() {
        let e = EventStream::new(3.0, vec![(1.0, TensorValue::Both('x', 'y'))]).unwrap();
        let (a, b) = unzip_events(&e);
        assert_eq!(a.events(), &[(1.0, 'x')]);
        assert_eq!(b.events(), &[(1.0, 'y')]);
    }
}
