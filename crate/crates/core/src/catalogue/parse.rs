//! Text form `name:key=val,key=val` for catalogue functions.
//!
//! Vector values are bracketed and separated by spaces or `;`, for example
//! `onenorm:center=[4.5],weight=1,offset=0.5` or `box:lo=[0;0],hi=[1;2]`.
//! A scalar or a one-element vector is broadcast to the target dimension.
//! `maxaffine` takes repeated `piece=[a_1 .. a_n b]` entries, the last number
//! being the offset.

use std::fmt;

use super::{AffinePiece, ConvexFunctionSpec};
use crate::error::{Error, Result};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Splits on commas that are not inside brackets.
fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(parse_err("unbalanced ']'"));
                }
            }
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(parse_err("unbalanced '['"));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn parse_number(key: &str, text: &str) -> Result<f64> {
    let t = text.trim();
    let v: f64 = match t {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => t
            .parse()
            .map_err(|_| parse_err(format!("key '{key}': cannot parse number '{t}'")))?,
    };
    if !v.is_finite() {
        return Err(parse_err(format!("key '{key}': value must be finite")));
    }
    Ok(v)
}

fn parse_list(key: &str, text: &str) -> Result<Vec<f64>> {
    let t = text.trim();
    let inner = match (t.strip_prefix('['), t.ends_with(']')) {
        (Some(rest), true) => &rest[..rest.len() - 1],
        (None, false) => return Ok(vec![parse_number(key, t)?]),
        _ => return Err(parse_err(format!("key '{key}': malformed vector '{t}'"))),
    };
    let values: Vec<f64> = inner
        .split(|c: char| c.is_whitespace() || c == ';' || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| parse_number(key, s))
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(parse_err(format!("key '{key}': empty vector")));
    }
    Ok(values)
}

fn broadcast(key: &str, values: Vec<f64>, dim: usize) -> Result<Vec<f64>> {
    match values.len() {
        n if n == dim => Ok(values),
        1 => Ok(vec![values[0]; dim]),
        n => Err(parse_err(format!("key '{key}': expected {dim} entries, found {n}"))),
    }
}

/// Parses a point such as `[1 2]`, `[1,2]` or a scalar broadcast to `dim`.
pub fn parse_vector(text: &str, dim: usize) -> Result<Vec<f64>> {
    let values = parse_list("x", text)?;
    broadcast("x", values, dim)
}

struct Fields<'a> {
    name: &'a str,
    entries: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (key, _) in &self.entries {
            if !allowed.contains(key) {
                return Err(parse_err(format!(
                    "unknown key '{key}' for '{}' (expected one of: {})",
                    self.name,
                    allowed.join(", ")
                )));
            }
        }
        for key in allowed.iter().filter(|k| **k != "piece") {
            if self.entries.iter().filter(|(k, _)| k == key).count() > 1 {
                return Err(parse_err(format!("key '{key}' given more than once")));
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.entries.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn scalar(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match (self.raw(key), default) {
            (Some(v), _) => parse_number(key, v),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(parse_err(format!("'{}' requires key '{key}'", self.name))),
        }
    }

    fn vector(&self, key: &str, dim: usize, default: Option<f64>) -> Result<Vec<f64>> {
        match (self.raw(key), default) {
            (Some(v), _) => broadcast(key, parse_list(key, v)?, dim),
            (None, Some(d)) => Ok(vec![d; dim]),
            (None, None) => Err(parse_err(format!("'{}' requires key '{key}'", self.name))),
        }
    }
}

/// Parses a function spec for `R^dim`.
///
/// Unknown names and keys are reported by name. Parameter constraints
/// (positivity, `lo <= hi`, ...) are validated before returning.
pub fn parse_function_spec(text: &str, dim: usize) -> Result<ConvexFunctionSpec> {
    if dim == 0 {
        return Err(parse_err("dimension must be positive"));
    }
    let text = text.trim();
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (text, ""),
    };
    let mut entries = Vec::new();
    if !rest.is_empty() {
        for part in split_top_level(rest)? {
            let part = part.trim();
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, found '{part}'")))?;
            entries.push((k.trim(), v.trim()));
        }
    }
    let fields = Fields { name, entries };
    let spec = match name {
        "zero" => {
            fields.check_keys(&[])?;
            ConvexFunctionSpec::Zero
        }
        "affine" => {
            fields.check_keys(&["slope", "offset"])?;
            ConvexFunctionSpec::Affine {
                slope: fields.vector("slope", dim, None)?,
                offset: fields.scalar("offset", Some(0.0))?,
            }
        }
        "quadratic" => {
            fields.check_keys(&["weights", "center"])?;
            ConvexFunctionSpec::QuadraticDiag {
                weights: fields.vector("weights", dim, Some(1.0))?,
                center: fields.vector("center", dim, Some(0.0))?,
            }
        }
        "normpower" => {
            fields.check_keys(&["q", "center", "weight", "offset"])?;
            ConvexFunctionSpec::NormPower {
                q: fields.scalar("q", None)?,
                center: fields.vector("center", dim, Some(0.0))?,
                weight: fields.scalar("weight", Some(1.0))?,
                offset: fields.scalar("offset", Some(0.0))?,
            }
        }
        "onenorm" => {
            fields.check_keys(&["center", "weight", "offset"])?;
            ConvexFunctionSpec::OneNorm {
                center: fields.vector("center", dim, Some(0.0))?,
                weight: fields.scalar("weight", Some(1.0))?,
                offset: fields.scalar("offset", Some(0.0))?,
            }
        }
        "box" => {
            fields.check_keys(&["lo", "hi"])?;
            ConvexFunctionSpec::BoxIndicator {
                lo: fields.vector("lo", dim, None)?,
                hi: fields.vector("hi", dim, None)?,
            }
        }
        "maxaffine" => {
            fields.check_keys(&["piece"])?;
            let mut pieces = Vec::new();
            for (_, raw) in fields.entries.iter().filter(|(k, _)| *k == "piece") {
                let mut values = parse_list("piece", raw)?;
                if values.len() != dim + 1 {
                    return Err(parse_err(format!(
                        "key 'piece': expected {} entries (slope then offset), found {}",
                        dim + 1,
                        values.len()
                    )));
                }
                let offset = values.pop().expect("non-empty");
                pieces.push(AffinePiece { slope: values, offset });
            }
            if pieces.is_empty() {
                return Err(parse_err("'maxaffine' requires at least one 'piece'"));
            }
            ConvexFunctionSpec::MaxAffine { pieces }
        }
        other => {
            return Err(parse_err(format!(
                "unknown function '{other}' (expected zero, affine, quadratic, normpower, onenorm, box, maxaffine)"
            )))
        }
    };
    spec.validate()?;
    Ok(spec)
}

struct Vector<'a>(&'a [f64]);

impl fmt::Display for Vector<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for ConvexFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("zero"),
            Self::Affine { slope, offset } => write!(f, "affine:slope={},offset={offset}", Vector(slope)),
            Self::QuadraticDiag { weights, center } => {
                write!(f, "quadratic:weights={},center={}", Vector(weights), Vector(center))
            }
            Self::NormPower {
                q,
                center,
                weight,
                offset,
            } => write!(
                f,
                "normpower:q={q},center={},weight={weight},offset={offset}",
                Vector(center)
            ),
            Self::OneNorm { center, weight, offset } => {
                write!(f, "onenorm:center={},weight={weight},offset={offset}", Vector(center))
            }
            Self::BoxIndicator { lo, hi } => write!(f, "box:lo={},hi={}", Vector(lo), Vector(hi)),
            Self::MaxAffine { pieces } => {
                f.write_str("maxaffine:")?;
                for (i, piece) in pieces.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    let mut all = piece.slope.clone();
                    all.push(piece.offset);
                    write!(f, "piece={}", Vector(&all))?;
                }
                Ok(())
            }
        }
    }
}
