//! Dynamic event values carried on machine wires.

use std::collections::BTreeMap;
use std::fmt;

/// A value carried by one event on a machine wire.
///
/// `Record` is the n-ary tensor value: a non-empty partial map from component
/// index to component value. An event of a product of event wires carries the
/// components that fired at that instant (one or more of them).
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Unit,
    Bool(bool),
    Int(i64),
    Real(f64),
    Sym(String),
    Pair(Box<Value>, Box<Value>),
    Record(BTreeMap<usize, Value>),
}

impl Value {
    pub fn sym(s: &str) -> Value {
        Value::Sym(s.to_string())
    }

    pub fn record(entries: impl IntoIterator<Item = (usize, Value)>) -> Value {
        Value::Record(entries.into_iter().collect())
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Value::Real(x) => x.is_finite(),
            Value::Pair(a, b) => a.is_finite() && b.is_finite(),
            Value::Record(m) => m.values().all(Value::is_finite),
            _ => true,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "()"),
            Value::Bool(b) => write!(f, "{}", if *b { "#t" } else { "#f" }),
            Value::Int(n) => write!(f, "i:{n}"),
            Value::Real(x) => write!(f, "r:{x}"),
            Value::Sym(s) => write!(f, "s:{s}"),
            Value::Pair(a, b) => write!(f, "({a},{b})"),
            Value::Record(m) => {
                write!(f, "{{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{k}:{v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Runtime value domain of an event wire, used for type tagging and checks.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Any value.
    Any,
    Real,
    Sym,
    /// The two polarities, encoded as `Int(-1)` and `Int(1)`.
    Polarity,
    /// Non-empty partial map over the listed component domains.
    Record(Vec<Domain>),
}

impl Domain {
    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Domain::Any, _) => true,
            (Domain::Real, Value::Real(_)) => true,
            (Domain::Sym, Value::Sym(_)) => true,
            (Domain::Polarity, Value::Int(n)) => *n == 1 || *n == -1,
            (Domain::Record(doms), Value::Record(m)) => {
                !m.is_empty()
                    && m.iter()
                        .all(|(k, v)| doms.get(*k).is_some_and(|d| d.contains(v)))
            }
            _ => false,
        }
    }

    /// Structural compatibility, with `Any` acting as a wildcard on either side.
    pub fn compatible(&self, other: &Domain) -> bool {
        match (self, other) {
            (Domain::Any, _) | (_, Domain::Any) => true,
            (Domain::Record(a), Domain::Record(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.compatible(y))
            }
            (a, b) => a == b,
        }
    }
}
