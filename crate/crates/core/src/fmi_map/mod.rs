//! SystemC-to-FMI 3.0 type mapping and the `modelDescription.xml` model.
//!
//! [`map_type`] buckets each payload field type into an FMI type,
//! [`build_model_description`] turns a classified [`PayloadSpec`] into a
//! [`ModelDescription`], and [`emit_xml`] / [`parse_xml`] convert between the
//! model and its XML form.

mod model;
mod value;
mod xml;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::tlm_scan::{PayloadSpec, SourceType};

pub use model::{build_model_description, instantiation_token, Causality, FmiVariable, ModelDescription};
pub use value::Value;
pub use xml::{emit_xml, parse_xml, parse_xml_with_warnings};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FmiMapError {
    #[error("unsupported source type '{0}'")]
    UnsupportedType(String),
    #[error("malformed model description: {0}")]
    MalformedXml(String),
    #[error("unsupported FMI version '{0}', expected 3.0")]
    UnsupportedFmiVersion(String),
    #[error("value reference {0} is used by more than one variable")]
    DuplicateValueReference(u32),
    #[error("<{element}> is missing attribute '{attribute}'")]
    MissingAttribute { element: String, attribute: String },
    #[error("<{element}> has invalid {attribute}=\"{value}\"")]
    InvalidAttribute { element: String, attribute: String, value: String },
    #[error("start value override names unknown field '{0}'")]
    UnknownOverride(String),
    #[error("variable '{variable}': '{literal}' is not a valid {fmi_type} literal")]
    InvalidStart { variable: String, fmi_type: FmiType, literal: String },
    #[error("variable '{0}' is an input without a start value")]
    MissingStart(String),
    #[error("model '{0}' needs at least one input and one output variable")]
    MissingDirection(String),
    #[error("value reference 0 is reserved for the independent variable, found on '{0}'")]
    ReservedValueReference(String),
}

/// An FMI 3.0 variable type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FmiType {
    Bool,
    Binary { size_bytes: u32 },
    Int8,
    UInt8,
    Int16,
    UInt16,
    Int32,
    UInt32,
    Int64,
    UInt64,
    Float32,
    Float64,
}

impl FmiType {
    /// Element name inside `<ModelVariables>`; also the suffix of the
    /// `fmi3Get*` / `fmi3Set*` functions.
    pub fn element_name(self) -> &'static str {
        match self {
            Self::Bool => "Boolean",
            Self::Binary { .. } => "Binary",
            Self::Int8 => "Int8",
            Self::UInt8 => "UInt8",
            Self::Int16 => "Int16",
            Self::UInt16 => "UInt16",
            Self::Int32 => "Int32",
            Self::UInt32 => "UInt32",
            Self::Int64 => "Int64",
            Self::UInt64 => "UInt64",
            Self::Float32 => "Float32",
            Self::Float64 => "Float64",
        }
    }

    /// C type used for this variable in the generated wrapper.
    pub fn c_type(self) -> &'static str {
        match self {
            Self::Bool => "fmi3Boolean",
            Self::Binary { .. } => "fmi3Byte",
            Self::Int8 => "fmi3Int8",
            Self::UInt8 => "fmi3UInt8",
            Self::Int16 => "fmi3Int16",
            Self::UInt16 => "fmi3UInt16",
            Self::Int32 => "fmi3Int32",
            Self::UInt32 => "fmi3UInt32",
            Self::Int64 => "fmi3Int64",
            Self::UInt64 => "fmi3UInt64",
            Self::Float32 => "fmi3Float32",
            Self::Float64 => "fmi3Float64",
        }
    }

    pub fn binary_size_bytes(self) -> Option<u32> {
        match self {
            Self::Binary { size_bytes } => Some(size_bytes),
            _ => None,
        }
    }

    pub fn default_start(self) -> String {
        match self {
            Self::Bool => "false".into(),
            Self::Binary { size_bytes } => "00".repeat(size_bytes as usize),
            _ => "0".into(),
        }
    }

    /// Same type ignoring the size of a Binary.
    pub fn same_kind(self, other: FmiType) -> bool {
        std::mem::discriminant(&self) == std::mem::discriminant(&other)
    }
}

impl fmt::Display for FmiType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bool => f.write_str("Bool"),
            Self::Binary { size_bytes } => write!(f, "Binary[{size_bytes}]"),
            other => f.write_str(other.element_name()),
        }
    }
}

impl Serialize for FmiType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn int_bucket(width: u32, signed: bool, token: &SourceType) -> Result<FmiType, FmiMapError> {
    let ty = match (width, signed) {
        (1..=8, true) => FmiType::Int8,
        (9..=16, true) => FmiType::Int16,
        (17..=32, true) => FmiType::Int32,
        (33..=64, true) => FmiType::Int64,
        (1..=8, false) => FmiType::UInt8,
        (9..=16, false) => FmiType::UInt16,
        (17..=32, false) => FmiType::UInt32,
        (33..=64, false) => FmiType::UInt64,
        _ => return Err(FmiMapError::UnsupportedType(token.to_string())),
    };
    Ok(ty)
}

/// Maps a payload field type to its FMI type.
///
/// Enumerations travel as `Int32` holding the underlying value; `bool` and
/// `sc_logic` both become `Bool`.
pub fn map_type(source_type: &SourceType) -> Result<FmiType, FmiMapError> {
    match source_type {
        SourceType::ScInt(w) => int_bucket(*w, true, source_type),
        SourceType::ScUint(w) => int_bucket(*w, false, source_type),
        SourceType::ScBv(0) => Err(FmiMapError::UnsupportedType(source_type.to_string())),
        SourceType::ScBv(w) => Ok(FmiType::Binary { size_bytes: w.div_ceil(8) }),
        SourceType::ScLogic | SourceType::Bool => Ok(FmiType::Bool),
        SourceType::Float { .. } => Ok(FmiType::Float32),
        SourceType::Double { .. } => Ok(FmiType::Float64),
        SourceType::Enum(_) => Ok(FmiType::Int32),
        SourceType::Other(token) => Err(FmiMapError::UnsupportedType(token.clone())),
    }
}

/// Maps every field of `spec`, failing on the first unsupported type.
pub fn map_fields(spec: &PayloadSpec) -> Result<Vec<FmiType>, FmiMapError> {
    spec.fields.iter().map(|f| map_type(&f.source_type)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(token: &str) -> SourceType {
        SourceType::classify(token, &["Mode".to_string()])
    }

    #[test]
    fn bucket_boundaries() {
        let cases = [
            ("sc_int<1>", FmiType::Int8),
            ("sc_int<8>", FmiType::Int8),
            ("sc_int<9>", FmiType::Int16),
            ("sc_int<16>", FmiType::Int16),
            ("sc_int<17>", FmiType::Int32),
            ("sc_int<32>", FmiType::Int32),
            ("sc_int<33>", FmiType::Int64),
            ("sc_int<64>", FmiType::Int64),
            ("sc_uint<8>", FmiType::UInt8),
            ("sc_uint<9>", FmiType::UInt16),
            ("sc_uint<32>", FmiType::UInt32),
            ("sc_uint<64>", FmiType::UInt64),
            ("sc_logic", FmiType::Bool),
            ("bool", FmiType::Bool),
            ("float", FmiType::Float32),
            ("sc_double", FmiType::Float64),
            ("Mode", FmiType::Int32),
            ("sc_bv<12>", FmiType::Binary { size_bytes: 2 }),
        ];
        for (token, expected) in cases {
            assert_eq!(map_type(&classify(token)).unwrap(), expected, "{token}");
        }
    }

    #[test]
    fn rejects_out_of_range_and_unknown() {
        for token in ["sc_int<0>", "sc_uint<65>", "sc_bv<0>", "sc_dt::sc_bigint<128>", "sc_fixed<8,4>", "int"] {
            assert!(matches!(map_type(&classify(token)), Err(FmiMapError::UnsupportedType(_))), "{token}");
        }
    }

    #[test]
    fn binary_size_is_ceiling_of_bytes() {
        for w in 1..=256u32 {
            let mut bytes = 0;
            while bytes * 8 < w {
                bytes += 1;
            }
            assert_eq!(map_type(&SourceType::ScBv(w)).unwrap(), FmiType::Binary { size_bytes: bytes });
        }
    }

    #[test]
    fn display_and_defaults() {
        assert_eq!(FmiType::Binary { size_bytes: 2 }.to_string(), "Binary[2]");
        assert_eq!(FmiType::Binary { size_bytes: 2 }.default_start(), "0000");
        assert_eq!(FmiType::Bool.default_start(), "false");
        assert_eq!(FmiType::UInt16.default_start(), "0");
        assert_eq!(FmiType::Bool.element_name(), "Boolean");
    }
}
