use std::fmt;

use serde::Serialize;

use super::FmiType;

/// A typed FMI variable value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int8(i8),
    UInt8(u8),
    Int16(i16),
    UInt16(u16),
    Int32(i32),
    UInt32(u32),
    Int64(i64),
    UInt64(u64),
    Float32(f32),
    Float64(f64),
    Binary(Vec<u8>),
}

impl Value {
    /// FMI type of the value; a Binary reports its current length.
    pub fn fmi_type(&self) -> FmiType {
        match self {
            Self::Bool(_) => FmiType::Bool,
            Self::Int8(_) => FmiType::Int8,
            Self::UInt8(_) => FmiType::UInt8,
            Self::Int16(_) => FmiType::Int16,
            Self::UInt16(_) => FmiType::UInt16,
            Self::Int32(_) => FmiType::Int32,
            Self::UInt32(_) => FmiType::UInt32,
            Self::Int64(_) => FmiType::Int64,
            Self::UInt64(_) => FmiType::UInt64,
            Self::Float32(_) => FmiType::Float32,
            Self::Float64(_) => FmiType::Float64,
            Self::Binary(b) => FmiType::Binary { size_bytes: b.len() as u32 },
        }
    }

    /// Whether the value can be stored in a variable of type `ty`. A Binary
    /// may be shorter than the variable's declared maximum size.
    pub fn fits(&self, ty: FmiType) -> bool {
        match (self, ty) {
            (Self::Binary(b), FmiType::Binary { size_bytes }) => b.len() <= size_bytes as usize,
            _ => self.fmi_type() == ty,
        }
    }

    /// Parses an XML start literal. Binary literals are hex octets.
    pub fn parse_literal(ty: FmiType, literal: &str) -> Option<Value> {
        let s = literal.trim();
        let v = match ty {
            FmiType::Bool => match s {
                "true" | "1" => Self::Bool(true),
                "false" | "0" => Self::Bool(false),
                _ => return None,
            },
            FmiType::Int8 => Self::Int8(s.parse().ok()?),
            FmiType::UInt8 => Self::UInt8(s.parse().ok()?),
            FmiType::Int16 => Self::Int16(s.parse().ok()?),
            FmiType::UInt16 => Self::UInt16(s.parse().ok()?),
            FmiType::Int32 => Self::Int32(s.parse().ok()?),
            FmiType::UInt32 => Self::UInt32(s.parse().ok()?),
            FmiType::Int64 => Self::Int64(s.parse().ok()?),
            FmiType::UInt64 => Self::UInt64(s.parse().ok()?),
            FmiType::Float32 => Self::Float32(s.parse().ok()?),
            FmiType::Float64 => Self::Float64(s.parse().ok()?),
            FmiType::Binary { size_bytes } => {
                let bytes = hex::decode(s).ok()?;
                if bytes.len() > size_bytes as usize {
                    return None;
                }
                Self::Binary(bytes)
            }
        };
        Some(v)
    }

    pub fn as_f64(&self) -> Option<f64> {
        Some(match *self {
            Self::Bool(b) => f64::from(u8::from(b)),
            Self::Int8(v) => v.into(),
            Self::UInt8(v) => v.into(),
            Self::Int16(v) => v.into(),
            Self::UInt16(v) => v.into(),
            Self::Int32(v) => v.into(),
            Self::UInt32(v) => v.into(),
            Self::Int64(v) => v as f64,
            Self::UInt64(v) => v as f64,
            Self::Float32(v) => v.into(),
            Self::Float64(v) => v,
            Self::Binary(_) => return None,
        })
    }
}

/// Renders the value as an XML / CSV literal.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bool(v) => write!(f, "{v}"),
            Self::Int8(v) => write!(f, "{v}"),
            Self::UInt8(v) => write!(f, "{v}"),
            Self::Int16(v) => write!(f, "{v}"),
            Self::UInt16(v) => write!(f, "{v}"),
            Self::Int32(v) => write!(f, "{v}"),
            Self::UInt32(v) => write!(f, "{v}"),
            Self::Int64(v) => write!(f, "{v}"),
            Self::UInt64(v) => write!(f, "{v}"),
            Self::Float32(v) => write!(f, "{v}"),
            Self::Float64(v) => write!(f, "{v}"),
            Self::Binary(b) => f.write_str(&hex::encode(b)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        let cases = [
            (FmiType::Bool, "true"),
            (FmiType::Int8, "-128"),
            (FmiType::UInt64, "18446744073709551615"),
            (FmiType::Float64, "0.1"),
            (FmiType::Binary { size_bytes: 2 }, "a55a"),
        ];
        for (ty, lit) in cases {
            let v = Value::parse_literal(ty, lit).unwrap();
            assert!(v.fits(ty));
            assert_eq!(v.to_string(), lit);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert_eq!(Value::parse_literal(FmiType::UInt8, "256"), None);
        assert_eq!(Value::parse_literal(FmiType::Bool, "yes"), None);
        assert_eq!(Value::parse_literal(FmiType::Binary { size_bytes: 1 }, "0000"), None);
        assert_eq!(Value::parse_literal(FmiType::Binary { size_bytes: 1 }, "0g"), None);
    }

    #[test]
    fn fits_checks_kind() {
        assert!(!Value::Int32(5).fits(FmiType::UInt8));
        assert!(Value::Binary(vec![1]).fits(FmiType::Binary { size_bytes: 2 }));
        assert!(!Value::Binary(vec![1, 2, 3]).fits(FmiType::Binary { size_bytes: 2 }));
    }
}
