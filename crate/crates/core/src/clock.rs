//! Period-`d` clock sections: tick sets spaced exactly `d` apart.

use crate::error::SectionError;
use crate::time::{times_close, Duration};

/// A section of the period-`d` clock: the ticks `{t₁, t₁+d, …} ∩ [0, ℓ]`.
///
/// The defining conditions are `t₁ < d`, `ℓ − tₙ < d`, and exact spacing `d`;
/// the first two hold by the stored invariants (`t₁ < d`, `t₁ ≤ ℓ`) and the
/// last by derivation. An empty tick set satisfies the conditions vacuously.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockSection {
    length: f64,
    period: f64,
    first_tick: Option<f64>,
}

impl ClockSection {
    pub fn new(length: f64, period: f64, first_tick: Option<f64>) -> Result<Self, SectionError> {
        let length = Duration::new(length)?.seconds();
        if !(period.is_finite() && period > 0.0) {
            return Err(SectionError::InvalidSection(format!(
                "clock period must be positive, got {period}"
            )));
        }
        if let Some(t1) = first_tick {
            if !(t1.is_finite() && 0.0 <= t1 && t1 < period && t1 <= length) {
                return Err(SectionError::InvalidSection(format!(
                    "first tick {t1} must satisfy 0 <= t1 < {period} and t1 <= {length}"
                )));
            }
        }
        Ok(ClockSection {
            length,
            period,
            first_tick,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn first_tick(&self) -> Option<f64> {
        self.first_tick
    }

    /// The derived tick set, in ascending order.
    pub fn ticks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some(t1) = self.first_tick {
            let mut k = 0u64;
            loop {
                let t = t1 + (k as f64) * self.period;
                if t > self.length {
                    break;
                }
                out.push(t);
                k += 1;
            }
        }
        out
    }

    /// Ticks inside the window, re-based.
    pub fn restrict(&self, from: f64, to: f64) -> Result<Self, SectionError> {
        if !(0.0 <= from && from <= to && to <= self.length) {
            return Err(SectionError::WindowOutOfBounds {
                from,
                to,
                length: self.length,
            });
        }
        let first = self
            .ticks()
            .into_iter()
            .find(|t| from <= *t && *t <= to)
            .map(|t| t - from);
        ClockSection::new(to - from, self.period, first)
    }

    /// Union of tick sets; the merged set must still be spaced exactly `d`
    /// (boundary spacing checked within the glue tolerance).
    pub fn glue(&self, other: &Self) -> Result<Self, SectionError> {
        if self.period != other.period {
            return Err(SectionError::Incompatible(format!(
                "clock periods disagree: {} vs {}",
                self.period, other.period
            )));
        }
        let d = self.period;
        let l1 = self.length;
        let total = l1 + other.length;
        let merged_first = match (self.ticks().last(), other.first_tick) {
            (Some(last1), Some(t1b)) => {
                let gap = (l1 + t1b) - last1;
                if !times_close(gap, d) {
                    return Err(SectionError::Incompatible(format!(
                        "tick spacing across the splice is {gap}, expected {d}"
                    )));
                }
                self.first_tick
            }
            (Some(last1), None) => {
                if total - last1 >= d {
                    return Err(SectionError::Incompatible(format!(
                        "gap after last tick would be {} >= period {d}",
                        total - last1
                    )));
                }
                self.first_tick
            }
            (None, Some(t1b)) => {
                let t1 = l1 + t1b;
                if t1 >= d {
                    return Err(SectionError::Incompatible(format!(
                        "first merged tick at {t1} >= period {d}"
                    )));
                }
                Some(t1)
            }
            (None, None) => None,
        };
        ClockSection::new(total, d, merged_first)
    }

    pub fn splice(&self, other: &Self) -> Result<Self, SectionError> {
        self.glue(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_enumeration() {
        let c = ClockSection::new(6.0, 2.0, Some(0.5)).unwrap();
        assert_eq!(c.ticks(), vec![0.5, 2.5, 4.5]);
    }

    #[test]
    fn restrict_rebases_ticks() {
        let c = ClockSection::new(6.0, 2.0, Some(0.5)).unwrap();
        let r = c.restrict(2.0, 6.0).unwrap();
        assert_eq!(r.first_tick(), Some(0.5));
        assert_eq!(r.ticks(), vec![0.5, 2.5]);
    }

    #[test]
    fn restrict_to_tickless_window() {
        let c = ClockSection::new(6.0, 2.0, Some(0.5)).unwrap();
        let r = c.restrict(0.6, 2.4).unwrap();
        assert_eq!(r.first_tick(), None);
        assert!(r.ticks().is_empty());
    }

    #[test]
    fn glue_compatible_phases() {
        let a = ClockSection::new(4.0, 2.0, Some(0.5)).unwrap();
        let b = ClockSection::new(4.0, 2.0, Some(0.5)).unwrap();
        let g = a.glue(&b).unwrap();
        assert_eq!(g.ticks(), vec![0.5, 2.5, 4.5, 6.5]);
    }

    #[test]
    fn glue_phase_mismatch() {
        let a = ClockSection::new(4.0, 2.0, Some(0.5)).unwrap();
        let b = ClockSection::new(4.0, 2.0, Some(1.0)).unwrap();
        assert!(a.glue(&b).is_err());
        // a tickless right part would leave a gap longer than the period
        let empty = ClockSection::new(4.0, 2.0, None).unwrap();
        assert!(a.glue(&empty).is_err());
    }

    #[test]
    fn invalid_first_tick() {
        assert!(ClockSection::new(6.0, 2.0, Some(2.0)).is_err());
        assert!(ClockSection::new(1.0, 2.0, Some(1.5)).is_err());
        assert!(ClockSection::new(6.0, 0.0, None).is_err());
    }
}
