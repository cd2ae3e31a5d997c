//! Time representation: finite nonnegative `f64` seconds.

use crate::error::SectionError;
use serde::{Deserialize, Serialize};

/// Absolute time tolerance (seconds) used only for boundary matching when
/// gluing sections. Restriction windows always compare exactly.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// A duration: the length of a time window, in seconds.
///
/// Always finite and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Duration(f64);

impl Duration {
    pub const ZERO: Duration = Duration(0.0);

    pub fn new(seconds: f64) -> Result<Self, SectionError> {
        if !seconds.is_finite() || seconds < 0.0 {
            return Err(SectionError::InvalidDuration(seconds));
        }
        Ok(Duration(seconds))
    }

    pub fn seconds(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Duration {
    type Error = SectionError;
    fn try_from(v: f64) -> Result<Self, SectionError> {
        Duration::new(v)
    }
}

/// True when `a` and `b` agree within [`BOUNDARY_TOL`].
pub fn times_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_non_finite() {
        assert!(Duration::new(-1.0).is_err());
        assert!(Duration::new(f64::NAN).is_err());
        assert!(Duration::new(f64::INFINITY).is_err());
        assert_eq!(Duration::new(2.5).unwrap().seconds(), 2.5);
    }
}
