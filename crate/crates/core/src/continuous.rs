//! Continuous streams: piecewise trajectories on `[0, ℓ]`, evaluable at any
//! point of the window.
//!
//! Pieces are constant, linear, or sampled grids with linear interpolation,
//! so restriction, gluing, and equality are all decidable on the stored
//! representation. Streams into a codiscrete value space (zero-order-hold
//! outputs) may jump at breakpoints; the value at a jump is the right limit,
//! matching the half-open pieces of the reconstructor formula.

use crate::error::SectionError;
use crate::time::Duration;

/// Values a continuous stream can carry: linear interpolation plus a metric.
pub trait ContValue: Clone + PartialEq + std::fmt::Debug {
    /// `a + (b - a) * w` for `w` in `[0, 1]`.
    fn lerp(a: &Self, b: &Self, w: f64) -> Self;
    fn dist(a: &Self, b: &Self) -> f64;
    fn is_finite(&self) -> bool;
}

impl ContValue for f64 {
    fn lerp(a: &Self, b: &Self, w: f64) -> f64 {
        a + (b - a) * w
    }
    fn dist(a: &Self, b: &Self) -> f64 {
        (a - b).abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PieceKind<V> {
    Constant(V),
    Linear { from: V, to: V },
    /// Absolute-time samples with linear interpolation between them.
    /// First and last sample times coincide with the piece boundaries.
    Sampled(Vec<(f64, V)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece<V> {
    pub start: f64,
    pub end: f64,
    pub kind: PieceKind<V>,
}

impl<V: ContValue> Piece<V> {
    fn validate(&self) -> Result<(), SectionError> {
        let bad = |msg: String| Err(SectionError::InvalidSection(msg));
        if !self.start.is_finite() || !self.end.is_finite() || self.start > self.end {
            return bad(format!("piece bounds [{}, {}]", self.start, self.end));
        }
        match &self.kind {
            PieceKind::Constant(_) => Ok(()),
            PieceKind::Linear { .. } => {
                if self.start == self.end {
                    bad("zero-width linear piece".into())
                } else {
                    Ok(())
                }
            }
            PieceKind::Sampled(g) => {
                if g.len() < 2 {
                    return bad("sampled piece needs at least two samples".into());
                }
                if g[0].0 != self.start || g[g.len() - 1].0 != self.end {
                    return bad("sample grid must span the piece exactly".into());
                }
                if g.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return bad("sample times not strictly increasing".into());
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, t: f64) -> V {
        match &self.kind {
            PieceKind::Constant(v) => v.clone(),
            PieceKind::Linear { from, to } => {
                if t == self.start {
                    from.clone()
                } else if t == self.end {
                    to.clone()
                } else {
                    V::lerp(from, to, (t - self.start) / (self.end - self.start))
                }
            }
            PieceKind::Sampled(g) => {
                // last sample with time <= t
                let i = g.partition_point(|(st, _)| *st <= t).saturating_sub(1);
                if g[i].0 == t || i + 1 == g.len() {
                    g[i].1.clone()
                } else {
                    let (t0, v0) = &g[i];
                    let (t1, v1) = &g[i + 1];
                    V::lerp(v0, v1, (t - t0) / (t1 - t0))
                }
            }
        }
    }

    fn shift(&self, by: f64) -> Piece<V> {
        let kind = match &self.kind {
            PieceKind::Sampled(g) => {
                PieceKind::Sampled(g.iter().map(|(t, v)| (t + by, v.clone())).collect())
            }
            k => k.clone(),
        };
        Piece {
            start: self.start + by,
            end: self.end + by,
            kind,
        }
    }

    /// Clip to `[a, b]` (must intersect with positive width unless the piece
    /// itself is zero-width). Keeps original endpoint values when the cut
    /// lands exactly on an existing boundary or sample.
    fn clip(&self, a: f64, b: f64) -> Piece<V> {
        debug_assert!(a >= self.start && b <= self.end && a <= b);
        if a == self.start && b == self.end {
            return self.clone();
        }
        let kind = match &self.kind {
            PieceKind::Constant(v) => PieceKind::Constant(v.clone()),
            PieceKind::Linear { .. } => {
                if a == b {
                    PieceKind::Constant(self.eval(a))
                } else {
                    PieceKind::Linear {
                        from: self.eval(a),
                        to: self.eval(b),
                    }
                }
            }
            PieceKind::Sampled(g) => {
                if a == b {
                    PieceKind::Constant(self.eval(a))
                } else {
                    let mut out: Vec<(f64, V)> = Vec::new();
                    if g.iter().all(|(t, _)| *t != a) {
                        out.push((a, self.eval(a)));
                    }
                    out.extend(g.iter().filter(|(t, _)| a <= *t && *t <= b).cloned());
                    if g.iter().all(|(t, _)| *t != b) {
                        out.push((b, self.eval(b)));
                    }
                    if out.len() == 1 {
                        PieceKind::Constant(out.pop().unwrap().1)
                    } else {
                        PieceKind::Sampled(out)
                    }
                }
            }
        };
        Piece { start: a, end: b, kind }
    }
}

/// A piecewise trajectory over `[0, ℓ]`.
///
/// Equality is semantic: two streams are equal when they have the same length
/// and the same values (and left limits) at every breakpoint of either, which
/// for piecewise-linear data decides pointwise equality. The Lipschitz bound
/// and codiscrete flag are metadata and do not participate in equality.
#[derive(Debug, Clone)]
pub struct ContinuousStream<V> {
    length: f64,
    pieces: Vec<Piece<V>>,
    lipschitz: Option<f64>,
    codiscrete: bool,
}

impl<V: ContValue> ContinuousStream<V> {
    pub fn constant(length: f64, v: V) -> Self {
        let length = Duration::new(length).expect("valid length").seconds();
        ContinuousStream {
            length,
            pieces: vec![Piece {
                start: 0.0,
                end: length,
                kind: PieceKind::Constant(v),
            }],
            lipschitz: Some(0.0),
            codiscrete: false,
        }
    }

    pub fn linear(length: f64, from: V, to: V) -> Result<Self, SectionError> {
        let length = Duration::new(length)?.seconds();
        if length == 0.0 {
            return Err(SectionError::InvalidSection(
                "linear stream needs positive length".into(),
            ));
        }
        let k = V::dist(&from, &to) / length;
        Ok(ContinuousStream {
            length,
            pieces: vec![Piece {
                start: 0.0,
                end: length,
                kind: PieceKind::Linear { from, to },
            }],
            lipschitz: Some(k),
            codiscrete: false,
        })
    }

    /// Build from a sample grid starting at time 0; the stream length is the
    /// last sample time.
    pub fn sampled(samples: Vec<(f64, V)>) -> Result<Self, SectionError> {
        if samples.is_empty() || samples[0].0 != 0.0 {
            return Err(SectionError::InvalidSection(
                "sample grid must start at t = 0".into(),
            ));
        }
        let length = samples[samples.len() - 1].0;
        let piece = if samples.len() == 1 {
            Piece {
                start: 0.0,
                end: 0.0,
                kind: PieceKind::Constant(samples.into_iter().next().unwrap().1),
            }
        } else {
            Piece {
                start: 0.0,
                end: length,
                kind: PieceKind::Sampled(samples),
            }
        };
        piece.validate()?;
        Ok(ContinuousStream {
            length,
            pieces: vec![piece],
            lipschitz: None,
            codiscrete: false,
        })
    }

    pub fn from_pieces(
        pieces: Vec<Piece<V>>,
        lipschitz: Option<f64>,
        codiscrete: bool,
    ) -> Result<Self, SectionError> {
        if pieces.is_empty() {
            return Err(SectionError::InvalidSection("no pieces".into()));
        }
        if pieces[0].start != 0.0 {
            return Err(SectionError::InvalidSection("pieces must start at 0".into()));
        }
        let length = pieces[pieces.len() - 1].end;
        for (i, p) in pieces.iter().enumerate() {
            p.validate()?;
            if i > 0 && p.start != pieces[i - 1].end {
                return Err(SectionError::InvalidSection(format!(
                    "gap between pieces at t = {}",
                    p.start
                )));
            }
            // zero-width pieces only as a point stream or a trailing spike
            if p.start == p.end && !(pieces.len() == 1 || (i == pieces.len() - 1)) {
                return Err(SectionError::InvalidSection(
                    "interior zero-width piece".into(),
                ));
            }
        }
        Duration::new(length)?;
        Ok(ContinuousStream {
            length,
            pieces,
            lipschitz,
            codiscrete,
        })
    }

    pub fn with_lipschitz(mut self, k: f64) -> Self {
        self.lipschitz = Some(k);
        self
    }

    pub fn without_lipschitz(mut self) -> Self {
        self.lipschitz = None;
        self
    }

    pub fn as_codiscrete(mut self) -> Self {
        self.codiscrete = true;
        self
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn pieces(&self) -> &[Piece<V>] {
        &self.pieces
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn codiscrete(&self) -> bool {
        self.codiscrete
    }

    /// Value at `t`. At an interior jump this is the right limit.
    pub fn eval(&self, t: f64) -> Result<V, SectionError> {
        if !(0.0 <= t && t <= self.length) {
            return Err(SectionError::EvalOutOfRange {
                t,
                length: self.length,
            });
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> V {
        // last piece with start <= t
        let i = self
            .pieces
            .partition_point(|p| p.start <= t)
            .saturating_sub(1);
        self.pieces[i].eval(t)
    }

    /// Left limit at `t` (equals `eval(t)` away from jumps and at `t = 0`).
    pub fn eval_left(&self, t: f64) -> V {
        let i = self.pieces.partition_point(|p| p.end < t);
        let i = i.min(self.pieces.len() - 1);
        self.pieces[i].eval(t)
    }

    /// All stored time points: piece boundaries plus sample grids.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for p in &self.pieces {
            out.push(p.start);
            if let PieceKind::Sampled(g) = &p.kind {
                out.extend(g.iter().map(|(t, _)| *t));
            }
            out.push(p.end);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn stored_values(&self) -> Vec<&V> {
        let mut out = Vec::new();
        for p in &self.pieces {
            match &p.kind {
                PieceKind::Constant(v) => out.push(v),
                PieceKind::Linear { from, to } => {
                    out.push(from);
                    out.push(to);
                }
                PieceKind::Sampled(g) => out.extend(g.iter().map(|(_, v)| v)),
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.stored_values().iter().all(|v| v.is_finite())
    }

    /// Restriction along `[from, to]`, re-based to start at 0.
    pub fn restrict(&self, from: f64, to: f64) -> Result<Self, SectionError> {
        if !(0.0 <= from && from <= to && to <= self.length) {
            return Err(SectionError::WindowOutOfBounds {
                from,
                to,
                length: self.length,
            });
        }
        if from == to {
            let mut s = ContinuousStream::constant(0.0, self.eval_unchecked(from));
            s.lipschitz = self.lipschitz;
            s.codiscrete = self.codiscrete;
            return Ok(s);
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let a = p.start.max(from);
            let b = p.end.min(to);
            if a < b {
                pieces.push(p.clip(a, b).shift(-from));
            }
        }
        // a jump exactly at the right edge is kept as a trailing point piece
        let right = self.eval_unchecked(to);
        if right != self.eval_left(to) {
            pieces.push(Piece {
                start: to - from,
                end: to - from,
                kind: PieceKind::Constant(right),
            });
        }
        // re-based arithmetic can wobble in the last bits; pin the cover
        if let Some(first) = pieces.first_mut() {
            pin_start(first, 0.0);
        }
        let target = to - from;
        if let Some(last) = pieces.last_mut() {
            pin_end(last, target);
        }
        for i in 1..pieces.len() {
            let prev_end = pieces[i - 1].end;
            pin_start(&mut pieces[i], prev_end);
        }
        Ok(ContinuousStream {
            length: target,
            pieces,
            lipschitz: self.lipschitz,
            codiscrete: self.codiscrete,
        })
    }

    /// Sheaf gluing; requires the stored boundary values to agree exactly.
    pub fn glue(&self, other: &Self) -> Result<Self, SectionError> {
        let left_end = self.eval_unchecked(self.length);
        let right_start = other.eval_unchecked(0.0);
        if left_end != right_start {
            return Err(SectionError::Incompatible(format!(
                "continuous endpoints disagree: {left_end:?} vs {right_start:?}"
            )));
        }
        if other.length == 0.0 {
            return Ok(self.clone());
        }
        if self.length == 0.0 {
            return Ok(other.clone());
        }
        let jump_at_boundary = self.eval_left(self.length) != left_end;
        let mut pieces: Vec<Piece<V>> = self
            .pieces
            .iter()
            .filter(|p| !(p.start == p.end && p.start == self.length))
            .cloned()
            .collect();
        for p in &other.pieces {
            let mut q = p.shift(self.length);
            let prev_end = pieces.last().map(|x| x.end).unwrap_or(0.0);
            pin_start(&mut q, prev_end);
            pieces.push(q);
        }
        let lipschitz = match (self.lipschitz, other.lipschitz) {
            (Some(a), Some(b)) if !jump_at_boundary => Some(a.max(b)),
            _ => None,
        };
        ContinuousStream::from_pieces(pieces, lipschitz, self.codiscrete || other.codiscrete)
    }

    /// Driver-level concatenation; identical to [`glue`](Self::glue) for
    /// continuous streams.
    pub fn splice(&self, other: &Self) -> Result<Self, SectionError> {
        self.glue(other)
    }

    /// Verify the declared Lipschitz certificate on the stored representation.
    pub fn check_lipschitz(&self) -> Result<(), SectionError> {
        let Some(k) = self.lipschitz else {
            return Ok(());
        };
        let slack = 1e-9;
        let bound = |d: f64, dt: f64| d <= k * dt + slack * (1.0 + k * dt);
        for p in &self.pieces {
            match &p.kind {
                PieceKind::Constant(_) => {}
                PieceKind::Linear { from, to } => {
                    if !bound(V::dist(from, to), p.end - p.start) {
                        return Err(SectionError::InvalidSection(format!(
                            "Lipschitz certificate K = {k} violated on [{}, {}]",
                            p.start, p.end
                        )));
                    }
                }
                PieceKind::Sampled(g) => {
                    for w in g.windows(2) {
                        if !bound(V::dist(&w[0].1, &w[1].1), w[1].0 - w[0].0) {
                            return Err(SectionError::InvalidSection(format!(
                                "Lipschitz certificate K = {k} violated at t = {}",
                                w[0].0
                            )));
                        }
                    }
                }
            }
        }
        for w in self.pieces.windows(2) {
            let at = w[1].start;
            if V::dist(&w[0].eval(at), &w[1].eval(at)) != 0.0 {
                return Err(SectionError::InvalidSection(format!(
                    "jump at t = {at} under a Lipschitz certificate"
                )));
            }
        }
        Ok(())
    }

    /// Largest slope between adjacent stored points; infinite at a jump.
    pub fn max_slope(&self) -> f64 {
        let mut k: f64 = 0.0;
        for p in &self.pieces {
            match &p.kind {
                PieceKind::Constant(_) => {}
                PieceKind::Linear { from, to } => {
                    if p.end > p.start {
                        k = k.max(V::dist(from, to) / (p.end - p.start));
                    }
                }
                PieceKind::Sampled(g) => {
                    for w in g.windows(2) {
                        k = k.max(V::dist(&w[0].1, &w[1].1) / (w[1].0 - w[0].0));
                    }
                }
            }
        }
        for w in self.pieces.windows(2) {
            let at = w[1].start;
            if V::dist(&w[0].eval(at), &w[1].eval(at)) != 0.0 {
                return f64::INFINITY;
            }
        }
        k
    }

    /// Attach the bound measured on the stored representation.
    pub fn with_computed_lipschitz(self) -> Self {
        let k = self.max_slope();
        if k.is_finite() {
            self.with_lipschitz(k)
        } else {
            self.without_lipschitz()
        }
    }

    /// True when both streams have bitwise-equal values at every time point
    /// stored by both. This is the refinement-rule comparison for integrator
    /// outputs: a finer run may add grid points but must not move shared ones.
    pub fn agrees_on_shared_grid(&self, other: &Self) -> bool {
        if self.length != other.length {
            return false;
        }
        let a = self.breakpoints();
        let b = other.breakpoints();
        let shared = a.iter().filter(|t| b.binary_search_by(|x| x.total_cmp(t)).is_ok());
        for t in shared {
            if self.eval_unchecked(*t) != other.eval_unchecked(*t) {
                return false;
            }
        }
        true
    }
}

/// Force a piece to begin exactly at `at`, absorbing last-bit drift from
/// re-based time arithmetic. Values are untouched.
fn pin_start<V: ContValue>(p: &mut Piece<V>, at: f64) {
    if p.start != at {
        if let PieceKind::Sampled(g) = &mut p.kind {
            g[0].0 = at;
        }
        p.start = at;
        if p.end < at {
            p.end = at;
        }
    }
}

fn pin_end<V: ContValue>(p: &mut Piece<V>, at: f64) {
    if p.end != at {
        if let PieceKind::Sampled(g) = &mut p.kind {
            let n = g.len();
            g[n - 1].0 = at;
        }
        p.end = at;
    }
}

impl<V: ContValue> PartialEq for ContinuousStream<V> {
    fn eq(&self, other: &Self) -> bool {
        if self.length != other.length {
            return false;
        }
        let mut points = self.breakpoints();
        points.extend(other.breakpoints());
        points.sort_by(f64::total_cmp);
        points.dedup();
        points.into_iter().all(|t| {
            self.eval_unchecked(t) == other.eval_unchecked(t)
                && self.eval_left(t) == other.eval_left(t)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_eval_and_restrict() {
        let c = ContinuousStream::constant(10.0, 5.0);
        assert_eq!(c.eval(0.0).unwrap(), 5.0);
        assert_eq!(c.eval(7.3).unwrap(), 5.0);
        let r = c.restrict(3.0, 7.0).unwrap();
        assert_eq!(r.length(), 4.0);
        assert_eq!(r, ContinuousStream::constant(4.0, 5.0));
        assert!(c.eval(10.5).is_err());
    }

    #[test]
    fn linear_interpolation() {
        let c = ContinuousStream::linear(2.0, 0.0, 2.0).unwrap();
        assert_eq!(c.eval(0.5).unwrap(), 0.5);
        assert_eq!(c.eval(2.0).unwrap(), 2.0);
    }

    #[test]
    fn tent_glue() {
        let up = ContinuousStream::linear(2.0, 0.0, 2.0).unwrap();
        let down = ContinuousStream::linear(2.0, 2.0, 0.0).unwrap();
        let tent = up.glue(&down).unwrap();
        assert_eq!(tent.length(), 4.0);
        assert_eq!(tent.eval(2.0).unwrap(), 2.0);
        for i in 0..=16 {
            let t = i as f64 * 0.25;
            let expect = if t <= 2.0 { t } else { 4.0 - t };
            assert!((tent.eval(t).unwrap() - expect).abs() < 1e-15);
        }
        assert_eq!(tent.restrict(0.0, 2.0).unwrap(), up);
        assert_eq!(tent.restrict(2.0, 4.0).unwrap(), down);
    }

    #[test]
    fn glue_endpoint_mismatch() {
        let a = ContinuousStream::constant(2.0, 2.0);
        let b = ContinuousStream::constant(2.0, 3.0);
        assert!(a.glue(&b).is_err());
    }

    #[test]
    fn zoh_shape_right_limits() {
        // 0 on [0,1), 5 on [1,2), 7 on [2,3]
        let c = ContinuousStream::from_pieces(
            vec![
                Piece { start: 0.0, end: 1.0, kind: PieceKind::Constant(0.0) },
                Piece { start: 1.0, end: 2.0, kind: PieceKind::Constant(5.0) },
                Piece { start: 2.0, end: 3.0, kind: PieceKind::Constant(7.0) },
            ],
            None,
            true,
        )
        .unwrap();
        assert_eq!(c.eval(1.0).unwrap(), 5.0);
        assert_eq!(c.eval_left(1.0), 0.0);
        assert_eq!(c.eval(0.999).unwrap(), 0.0);
        assert_eq!(c.eval(3.0).unwrap(), 7.0);
    }

    #[test]
    fn restrict_at_jump_keeps_point_value() {
        let c = ContinuousStream::from_pieces(
            vec![
                Piece { start: 0.0, end: 1.0, kind: PieceKind::Constant(0.0) },
                Piece { start: 1.0, end: 2.0, kind: PieceKind::Constant(5.0) },
            ],
            None,
            true,
        )
        .unwrap();
        let left = c.restrict(0.0, 1.0).unwrap();
        assert_eq!(left.eval(1.0).unwrap(), 5.0); // right limit survives
        assert_eq!(left.eval_left(1.0), 0.0);
        let back = left.glue(&c.restrict(1.0, 2.0).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn sampled_roundtrip_and_split() {
        let c = ContinuousStream::sampled(vec![(0.0, 1.0), (1.0, 3.0), (2.0, 2.0)]).unwrap();
        assert_eq!(c.eval(0.5).unwrap(), 2.0);
        assert_eq!(c.eval(1.0).unwrap(), 3.0);
        let a = c.restrict(0.0, 0.75).unwrap();
        let b = c.restrict(0.75, 2.0).unwrap();
        assert_eq!(a.glue(&b).unwrap(), c);
    }

    #[test]
    fn lipschitz_certificate() {
        let ok = ContinuousStream::linear(2.0, 0.0, 2.0).unwrap().with_lipschitz(1.0);
        assert!(ok.check_lipschitz().is_ok());
        let bad = ContinuousStream::linear(2.0, 0.0, 10.0).unwrap().with_lipschitz(1.0);
        assert!(bad.check_lipschitz().is_err());
    }

    #[test]
    fn point_glue_identities() {
        let c = ContinuousStream::linear(2.0, 0.0, 2.0).unwrap();
        let p = c.restrict(2.0, 2.0).unwrap();
        assert_eq!(p.length(), 0.0);
        assert_eq!(p.eval(0.0).unwrap(), 2.0);
        assert_eq!(c.glue(&p).unwrap(), c);
        let p0 = c.restrict(0.0, 0.0).unwrap();
        assert_eq!(p0.glue(&c).unwrap(), c);
    }
}
