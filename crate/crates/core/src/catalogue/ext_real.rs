use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A value in `R ∪ {+inf}`. `-inf` is never produced: every catalogue
/// function is proper.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// 17 significant digits in `{:.16e}` form, or `+inf`.
    pub fn to_string_exact(self) -> String {
        match self {
            ExtReal::Finite(v) => format!("{v:.16e}"),
            ExtReal::PosInf => "+inf".into(),
        }
    }

    /// Lossy conversion for plotting and reporting.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

impl From<f64> for ExtReal {
    /// Maps `+inf` to [`ExtReal::PosInf`]; callers must not pass NaN or `-inf`.
    fn from(v: f64) -> Self {
        debug_assert!(!v.is_nan() && v != f64::NEG_INFINITY);
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::Finite(rhs)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

// Serialized as a JSON number, or the string "+inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::PosInf => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(ExtReal::Finite(v)),
            Repr::Str(s) if s == "+inf" || s == "inf" => Ok(ExtReal::PosInf),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected number or \"+inf\", got {s:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_addition() {
        assert!(ExtReal::Finite(1e300) < ExtReal::PosInf);
        assert_eq!(ExtReal::Finite(1.0) + ExtReal::Finite(2.0), ExtReal::Finite(3.0));
        assert_eq!(ExtReal::PosInf + 3.0, ExtReal::PosInf);
        assert_eq!(ExtReal::from(f64::INFINITY), ExtReal::PosInf);
    }

    #[test]
    fn json_representation() {
        let v = vec![ExtReal::Finite(0.5), ExtReal::PosInf];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[0.5,"+inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
