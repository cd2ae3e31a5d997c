//! Line-oriented text format for sections, used by golden tests and law
//! counterexample reports.
//!
//! A section is a `section …` header line, body lines, and `end`:
//!
//! ```text
//! section kind=event length=60
//! 20,s:redToOrange
//! 25,s:orangeToGreen
//! end
//! ```
//!
//! Event rows are `t,value` in ascending time order. Continuous bodies list
//! piece descriptors (`piece constant|linear|sampled …`), clocks and unit
//! sections have empty bodies, and products nest their component blocks.
//! Floats print in shortest round-trip form, so output is byte-stable.
//! Values are tagged literals: `()`, `#t`, `#f`, `i:<int>`, `r:<float>`,
//! `s:<symbol>`, pairs `(<v>,<v>)`, and records `{<idx>:<v>;…}`.

use crate::clock::ClockSection;
use crate::continuous::{ContinuousStream, Piece, PieceKind};
use crate::error::SectionError;
use crate::event::EventStream;
use crate::section::Section;
use crate::value::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub fn section_to_text(s: &Section) -> String {
    let mut out = String::new();
    write_section(&mut out, s);
    out
}

fn write_section(out: &mut String, s: &Section) {
    match s {
        Section::Unit(d) => {
            let _ = writeln!(out, "section kind=unit length={}", d.seconds());
            out.push_str("end\n");
        }
        Section::Event(e) => {
            let _ = writeln!(out, "section kind=event length={}", e.length());
            for (t, v) in e.events() {
                let _ = writeln!(out, "{t},{v}");
            }
            out.push_str("end\n");
        }
        Section::Continuous(c) => {
            let lip = c
                .lipschitz()
                .map(|k| k.to_string())
                .unwrap_or_else(|| "none".into());
            let _ = writeln!(
                out,
                "section kind=continuous length={} lipschitz={} codiscrete={}",
                c.length(),
                lip,
                u8::from(c.codiscrete())
            );
            for p in c.pieces() {
                match &p.kind {
                    PieceKind::Constant(v) => {
                        let _ = writeln!(out, "piece constant {} {} {}", p.start, p.end, v);
                    }
                    PieceKind::Linear { from, to } => {
                        let _ =
                            writeln!(out, "piece linear {} {} {} {}", p.start, p.end, from, to);
                    }
                    PieceKind::Sampled(g) => {
                        let _ = write!(out, "piece sampled {} {}", p.start, p.end);
                        for (t, v) in g {
                            let _ = write!(out, " {t}:{v}");
                        }
                        out.push('\n');
                    }
                }
            }
            out.push_str("end\n");
        }
        Section::Clock(c) => {
            let first = c
                .first_tick()
                .map(|t| t.to_string())
                .unwrap_or_else(|| "none".into());
            let _ = writeln!(
                out,
                "section kind=clock length={} period={} first={}",
                c.length(),
                c.period(),
                first
            );
            out.push_str("end\n");
        }
        Section::Product(parts) => {
            let _ = writeln!(
                out,
                "section kind=product n={} length={}",
                parts.len(),
                s.length()
            );
            for p in parts {
                write_section(out, p);
            }
            out.push_str("end\n");
        }
    }
}

pub fn section_from_text(text: &str) -> Result<Section, SectionError> {
    let mut lines = text.lines().peekable();
    let s = parse_section(&mut lines)?;
    Ok(s)
}

type Lines<'a> = std::iter::Peekable<std::str::Lines<'a>>;

fn bad(msg: impl Into<String>) -> SectionError {
    SectionError::InvalidSection(msg.into())
}

fn parse_f64(s: &str) -> Result<f64, SectionError> {
    s.parse::<f64>().map_err(|_| bad(format!("bad float `{s}`")))
}

fn header_fields(line: &str) -> Result<BTreeMap<String, String>, SectionError> {
    let mut map = BTreeMap::new();
    for part in line.split_whitespace().skip(1) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("bad header field `{part}`")))?;
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

fn parse_section(lines: &mut Lines) -> Result<Section, SectionError> {
    let header = lines.next().ok_or_else(|| bad("missing section header"))?;
    if !header.starts_with("section ") {
        return Err(bad(format!("expected section header, got `{header}`")));
    }
    let fields = header_fields(header)?;
    let kind = fields.get("kind").ok_or_else(|| bad("missing kind"))?;
    let length = parse_f64(fields.get("length").ok_or_else(|| bad("missing length"))?)?;
    let section = match kind.as_str() {
        "unit" => {
            expect_end(lines)?;
            Section::unit(length)?
        }
        "event" => {
            let mut events = Vec::new();
            loop {
                let line = lines.next().ok_or_else(|| bad("unterminated event body"))?;
                if line == "end" {
                    break;
                }
                let (t, v) = line
                    .split_once(',')
                    .ok_or_else(|| bad(format!("bad event row `{line}`")))?;
                events.push((parse_f64(t)?, parse_value(v)?));
            }
            Section::Event(EventStream::new(length, events)?)
        }
        "continuous" => {
            let lipschitz = match fields.get("lipschitz").map(String::as_str) {
                Some("none") | None => None,
                Some(s) => Some(parse_f64(s)?),
            };
            let codiscrete = fields.get("codiscrete").map(String::as_str) == Some("1");
            let mut pieces = Vec::new();
            loop {
                let line = lines.next().ok_or_else(|| bad("unterminated body"))?;
                if line == "end" {
                    break;
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.first() != Some(&"piece") || toks.len() < 4 {
                    return Err(bad(format!("bad piece row `{line}`")));
                }
                let start = parse_f64(toks[2])?;
                let end = parse_f64(toks[3])?;
                let kind = match toks[1] {
                    "constant" => PieceKind::Constant(parse_f64(toks[4])?),
                    "linear" => PieceKind::Linear {
                        from: parse_f64(toks[4])?,
                        to: parse_f64(toks[5])?,
                    },
                    "sampled" => {
                        let mut g = Vec::new();
                        for tok in &toks[4..] {
                            let (t, v) = tok
                                .split_once(':')
                                .ok_or_else(|| bad(format!("bad sample `{tok}`")))?;
                            g.push((parse_f64(t)?, parse_f64(v)?));
                        }
                        PieceKind::Sampled(g)
                    }
                    other => return Err(bad(format!("unknown piece kind `{other}`"))),
                };
                pieces.push(Piece { start, end, kind });
            }
            Section::Continuous(ContinuousStream::from_pieces(pieces, lipschitz, codiscrete)?)
        }
        "clock" => {
            let period = parse_f64(fields.get("period").ok_or_else(|| bad("missing period"))?)?;
            let first = match fields.get("first").map(String::as_str) {
                Some("none") | None => None,
                Some(s) => Some(parse_f64(s)?),
            };
            expect_end(lines)?;
            Section::Clock(ClockSection::new(length, period, first)?)
        }
        "product" => {
            let n: usize = fields
                .get("n")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("missing product arity"))?;
            let mut parts = Vec::with_capacity(n);
            for _ in 0..n {
                parts.push(parse_section(lines)?);
            }
            expect_end(lines)?;
            Section::product(parts)?
        }
        other => return Err(bad(format!("unknown section kind `{other}`"))),
    };
    Ok(section)
}

fn expect_end(lines: &mut Lines) -> Result<(), SectionError> {
    match lines.next() {
        Some("end") => Ok(()),
        other => Err(bad(format!("expected end, got {other:?}"))),
    }
}

pub fn parse_value(s: &str) -> Result<Value, SectionError> {
    let (v, rest) = parse_value_inner(s.trim())?;
    if !rest.is_empty() {
        return Err(bad(format!("trailing characters after value: `{rest}`")));
    }
    Ok(v)
}

fn parse_value_inner(s: &str) -> Result<(Value, &str), SectionError> {
    if let Some(rest) = s.strip_prefix("()") {
        return Ok((Value::Unit, rest));
    }
    if let Some(rest) = s.strip_prefix("#t") {
        return Ok((Value::Bool(true), rest));
    }
    if let Some(rest) = s.strip_prefix("#f") {
        return Ok((Value::Bool(false), rest));
    }
    if let Some(body) = s.strip_prefix("i:") {
        let end = scan_atom(body);
        let n = body[..end]
            .parse::<i64>()
            .map_err(|_| bad(format!("bad int `{}`", &body[..end])))?;
        return Ok((Value::Int(n), &body[end..]));
    }
    if let Some(body) = s.strip_prefix("r:") {
        let end = scan_atom(body);
        return Ok((Value::Real(parse_f64(&body[..end])?), &body[end..]));
    }
    if let Some(body) = s.strip_prefix("s:") {
        let end = body
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(body.len());
        if end == 0 {
            return Err(bad("empty symbol"));
        }
        return Ok((Value::Sym(body[..end].to_string()), &body[end..]));
    }
    if let Some(body) = s.strip_prefix('(') {
        let (a, rest) = parse_value_inner(body)?;
        let rest = rest
            .strip_prefix(',')
            .ok_or_else(|| bad("pair missing comma"))?;
        let (b, rest) = parse_value_inner(rest)?;
        let rest = rest
            .strip_prefix(')')
            .ok_or_else(|| bad("pair missing close paren"))?;
        return Ok((Value::Pair(Box::new(a), Box::new(b)), rest));
    }
    if let Some(mut body) = s.strip_prefix('{') {
        let mut map = BTreeMap::new();
        loop {
            let colon = body.find(':').ok_or_else(|| bad("record missing colon"))?;
            let idx: usize = body[..colon]
                .parse()
                .map_err(|_| bad(format!("bad record index `{}`", &body[..colon])))?;
            let (v, rest) = parse_value_inner(&body[colon + 1..])?;
            map.insert(idx, v);
            if let Some(rest) = rest.strip_prefix(';') {
                body = rest;
            } else if let Some(rest) = rest.strip_prefix('}') {
                return Ok((Value::Record(map), rest));
            } else {
                return Err(bad("record missing separator"));
            }
        }
    }
    Err(bad(format!("unrecognized value `{s}`")))
}

/// Length of a numeric atom prefix (digits, sign, dot, exponent).
fn scan_atom(s: &str) -> usize {
    s.find(|c: char| !(c.is_ascii_digit() || "+-.eE".contains(c)))
        .unwrap_or(s.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Value;

    #[test]
    fn event_roundtrip() {
        let s = Section::Event(
            EventStream::new(
                60.0,
                vec![
                    (20.0, Value::sym("redToOrange")),
                    (25.5, Value::Real(0.1 + 0.2)),
                    (50.0, Value::record([(0, Value::Int(-1)), (3, Value::Int(1))])),
                ],
            )
            .unwrap(),
        );
        let text = section_to_text(&s);
        assert_eq!(section_from_text(&text).unwrap(), s);
        assert_eq!(section_to_text(&section_from_text(&text).unwrap()), text);
    }

    #[test]
    fn continuous_roundtrip() {
        let c = ContinuousStream::sampled(vec![(0.0, 1.0), (0.5, -2.25), (2.0, 0.3)])
            .unwrap()
            .with_computed_lipschitz();
        let s = Section::Continuous(c);
        let text = section_to_text(&s);
        assert_eq!(section_from_text(&text).unwrap(), s);
    }

    #[test]
    fn product_roundtrip() {
        let s = Section::product(vec![
            Section::empty_event(2.0),
            Section::Clock(ClockSection::new(2.0, 0.5, Some(0.25)).unwrap()),
            Section::unit(2.0).unwrap(),
        ])
        .unwrap();
        let text = section_to_text(&s);
        assert_eq!(section_from_text(&text).unwrap(), s);
    }

    #[test]
    fn pair_value_roundtrip() {
        let v = Value::Pair(
            Box::new(Value::Real(1.5)),
            Box::new(Value::Pair(Box::new(Value::Int(3)), Box::new(Value::Bool(false)))),
        );
        assert_eq!(parse_value(&v.to_string()).unwrap(), v);
    }
}
