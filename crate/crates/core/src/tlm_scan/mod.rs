//! Scanner for SystemC TLM target-module sources.
//!
//! Locates the payload record exchanged through the target socket, finds the
//! `b_transport` / `nb_transport_fw` implementations, and classifies every
//! payload field as an input (only read by the target) or an output
//! (assigned by the target).
//!
//! Matching is token-level: comments and literals are blanked first, then
//! regular expressions pick out records, enums and transport bodies. No C++
//! semantic analysis is attempted.

mod direction;
mod header;
mod records;
mod strip;
mod transport;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::diag::{Diagnostic, Location};

pub use direction::infer_directions;
pub use header::extract_header;
pub use records::{parse_enums, parse_records, RecordDecl};
pub use strip::strip_comments_and_literals;
pub use transport::{find_transport_functions, scan_sources};

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("no source units given")]
    NoUnits,
    #[error("{0}: source unit is empty")]
    EmptyUnit(PathBuf),
    #[error("{0}: extension does not denote a C++ header or implementation file")]
    UnknownExtension(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}: source is not valid UTF-8")]
    NotUtf8(PathBuf),
    #[error("no b_transport or nb_transport_fw implementation found")]
    NoTransportFunction,
    #[error("no payload record found in transport functions")]
    NoPayloadRecord,
    #[error("record '{0}' named as payload hint is not declared in any source unit")]
    RecordHintNotFound(String),
    #[error("ambiguous payload: transport functions reference records {}; pass a record hint", .0.join(", "))]
    AmbiguousPayload(Vec<String>),
    #[error("{path}:{}:{}: field '{field}' of record '{record}' is a nested record; only flat payloads are supported", .location.line, .location.column, path = .path.display())]
    NestedRecord { record: String, field: String, path: PathBuf, location: Location },
    #[error("{path}:{}:{}: field '{field}' of record '{record}' is an array; only scalar fields are supported", .location.line, .location.column, path = .path.display())]
    ArrayField { record: String, field: String, path: PathBuf, location: Location },
    #[error("{path}:{}:{}: field '{field}' of record '{record}' is a pointer or reference", .location.line, .location.column, path = .path.display())]
    IndirectField { record: String, field: String, path: PathBuf, location: Location },
    #[error("record '{record}' declares field '{field}' twice")]
    DuplicateField { record: String, field: String },
    #[error("record '{0}' has no data fields")]
    EmptyRecord(String),
    #[error("field '{field}' of record '{record}' is never referenced by a transport function")]
    UnreferencedField { record: String, field: String },
    #[error("every interface field of record '{record}' is an {direction}; a payload needs at least one input and one output")]
    AllFieldsOneDirection { record: String, direction: Direction },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Header,
    Implementation,
}

impl SourceKind {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "h" | "hh" | "hpp" | "hxx" => Some(Self::Header),
            "c" | "cc" | "cpp" | "cxx" => Some(Self::Implementation),
            _ => None,
        }
    }
}

/// One C++/SystemC file handed to the scanner.
#[derive(Debug, Clone)]
pub struct SourceUnit {
    path: PathBuf,
    text: String,
    kind: SourceKind,
}

impl SourceUnit {
    pub fn new(path: impl Into<PathBuf>, text: impl Into<String>) -> Result<Self, ScanError> {
        let path = path.into();
        let text = text.into();
        let kind = SourceKind::from_path(&path).ok_or_else(|| ScanError::UnknownExtension(path.clone()))?;
        if text.trim().is_empty() {
            return Err(ScanError::EmptyUnit(path));
        }
        Ok(Self { path, text, kind })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScanError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| ScanError::Io { path: path.to_path_buf(), source })?;
        let text = String::from_utf8(bytes).map_err(|_| ScanError::NotUtf8(path.to_path_buf()))?;
        Self::new(path, text)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Input,
    Output,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Input => "input",
            Direction::Output => "output",
        })
    }
}

/// SystemC / C++ type of a payload field.
///
/// `Display` yields the canonical token; SystemC datatypes are always
/// rendered with the `sc_dt::` qualifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SourceType {
    ScInt(u32),
    ScUint(u32),
    ScBv(u32),
    ScLogic,
    Bool,
    /// `float`, or the `sc_float` spelling some designs use.
    Float { spelling: String },
    /// `double`, or `sc_double`.
    Double { spelling: String },
    Enum(String),
    Other(String),
}

impl SourceType {
    /// Classifies a whitespace-normalised type token. `enums` lists enum
    /// names declared in the scanned units.
    pub fn classify(token: &str, enums: &[String]) -> Self {
        let bare = token.strip_prefix("sc_dt::").unwrap_or(token);
        let width = |prefix: &str| -> Option<u32> {
            bare.strip_prefix(prefix)?.strip_prefix('<')?.strip_suffix('>')?.trim().parse().ok()
        };
        if let Some(w) = width("sc_int") {
            return Self::ScInt(w);
        }
        if let Some(w) = width("sc_uint") {
            return Self::ScUint(w);
        }
        if let Some(w) = width("sc_bv") {
            return Self::ScBv(w);
        }
        match bare {
            "sc_logic" => return Self::ScLogic,
            "bool" => return Self::Bool,
            "float" | "sc_float" => return Self::Float { spelling: bare.to_string() },
            "double" | "sc_double" => return Self::Double { spelling: bare.to_string() },
            _ => {}
        }
        let last = token.rsplit("::").next().unwrap_or(token);
        if enums.iter().any(|e| e == last) {
            return Self::Enum(last.to_string());
        }
        Self::Other(token.to_string())
    }

    pub fn bit_width(&self) -> Option<u32> {
        match self {
            Self::ScInt(w) | Self::ScUint(w) | Self::ScBv(w) => Some(*w),
            _ => None,
        }
    }
}

impl fmt::Display for SourceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ScInt(w) => write!(f, "sc_dt::sc_int<{w}>"),
            Self::ScUint(w) => write!(f, "sc_dt::sc_uint<{w}>"),
            Self::ScBv(w) => write!(f, "sc_dt::sc_bv<{w}>"),
            Self::ScLogic => f.write_str("sc_dt::sc_logic"),
            Self::Bool => f.write_str("bool"),
            Self::Float { spelling } | Self::Double { spelling } => f.write_str(spelling),
            Self::Enum(name) | Self::Other(name) => f.write_str(name),
        }
    }
}

impl Serialize for SourceType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayloadField {
    pub name: String,
    pub source_type: SourceType,
    /// `None` until [`infer_directions`] has run.
    pub direction: Option<Direction>,
    pub declaration_index: usize,
    #[serde(skip)]
    pub location: Location,
}

impl PayloadField {
    pub fn bit_width(&self) -> Option<u32> {
        self.source_type.bit_width()
    }
}

/// An `enum` declaration a payload field refers to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumDecl {
    pub name: String,
    pub scoped: bool,
    pub underlying: Option<String>,
    pub enumerators: Vec<(String, Option<String>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayloadSpec {
    pub record_name: String,
    pub fields: Vec<PayloadField>,
    pub header_origin: PathBuf,
    /// Enums used by field types, in declaration order.
    pub enums: Vec<EnumDecl>,
}

impl PayloadSpec {
    pub fn inputs(&self) -> impl Iterator<Item = &PayloadField> {
        self.fields.iter().filter(|f| f.direction == Some(Direction::Input))
    }

    pub fn outputs(&self) -> impl Iterator<Item = &PayloadField> {
        self.fields.iter().filter(|f| f.direction == Some(Direction::Output))
    }

    /// Checks the post-inference invariants: every field has a direction,
    /// names are unique, and both directions are represented.
    pub fn validate(&self) -> Result<(), ScanError> {
        if self.fields.is_empty() {
            return Err(ScanError::EmptyRecord(self.record_name.clone()));
        }
        let mut seen = std::collections::HashSet::new();
        for field in &self.fields {
            if !seen.insert(field.name.as_str()) {
                return Err(ScanError::DuplicateField { record: self.record_name.clone(), field: field.name.clone() });
            }
            if field.direction.is_none() {
                return Err(ScanError::UnreferencedField {
                    record: self.record_name.clone(),
                    field: field.name.clone(),
                });
            }
        }
        if self.inputs().next().is_none() {
            return Err(ScanError::AllFieldsOneDirection { record: self.record_name.clone(), direction: Direction::Output });
        }
        if self.outputs().next().is_none() {
            return Err(ScanError::AllFieldsOneDirection { record: self.record_name.clone(), direction: Direction::Input });
        }
        Ok(())
    }
}

/// A transport function definition found in a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportFunction {
    pub name: String,
    /// Class qualifier of an out-of-line definition, or the enclosing class.
    pub owner: Option<String>,
    pub path: PathBuf,
    /// Body text (comment-stripped) between the braces.
    pub body: String,
    /// Byte offset of `body` inside the stripped unit text.
    pub body_offset: usize,
    /// Position of the first body character.
    pub body_location: Location,
}

impl TransportFunction {
    /// Maps a byte offset inside `body` to a position in the unit.
    pub fn location_of(&self, body_offset: usize) -> Location {
        let rel = Location::from_offset(&self.body, body_offset);
        if rel.line == 1 {
            Location { line: self.body_location.line, column: self.body_location.column + rel.column - 1 }
        } else {
            Location { line: self.body_location.line + rel.line - 1, column: rel.column }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransportSurface {
    pub has_blocking: bool,
    pub has_nonblocking: bool,
    pub functions: Vec<TransportFunction>,
    /// Target module class implementing the transport interface.
    pub module_name: Option<String>,
    /// Unit declaring `module_name`, when found.
    pub module_file: Option<PathBuf>,
    /// `module_file` when it is a header.
    pub module_header: Option<PathBuf>,
    /// Name of the target socket member.
    pub socket_name: Option<String>,
}

impl TransportSurface {
    /// Function name → concatenated bodies of every definition with that name.
    pub fn function_bodies(&self) -> BTreeMap<String, String> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for f in &self.functions {
            let entry = map.entry(f.name.clone()).or_default();
            if !entry.is_empty() {
                entry.push('\n');
            }
            entry.push_str(&f.body);
        }
        map
    }
}

/// Result of the full scan: record, transport surface and any warnings.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub spec: PayloadSpec,
    pub surface: TransportSurface,
    pub diagnostics: Vec<Diagnostic>,
}

/// Runs [`scan_sources`] followed by [`infer_directions`].
pub fn analyze(units: &[SourceUnit], record_hint: Option<&str>) -> Result<Analysis, ScanError> {
    let (spec, surface, mut diagnostics) = scan_sources(units, record_hint)?;
    let (spec, more) = infer_directions(&spec, &surface)?;
    diagnostics.extend(more);
    Ok(Analysis { spec, surface, diagnostics })
}

/// Normalises whitespace inside a type token: `sc_dt :: sc_int < 32 >` → `sc_dt::sc_int<32>`.
pub(crate) fn normalize_type(token: &str) -> String {
    let words: Vec<&str> = token.split_whitespace().collect();
    let mut out = String::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            let prev = out.chars().last().unwrap_or(' ');
            let next = w.chars().next().unwrap_or(' ');
            let word_boundary = (prev.is_alphanumeric() || prev == '_') && (next.is_alphanumeric() || next == '_');
            if word_boundary {
                out.push(' ');
            }
        }
        out.push_str(w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_type_tokens() {
        let enums = vec!["BusState".to_string()];
        assert_eq!(SourceType::classify("sc_dt::sc_int<32>", &enums), SourceType::ScInt(32));
        assert_eq!(SourceType::classify("sc_uint<9>", &enums), SourceType::ScUint(9));
        assert_eq!(SourceType::classify("sc_bv<12>", &enums), SourceType::ScBv(12));
        assert_eq!(SourceType::classify("sc_dt::sc_logic", &enums), SourceType::ScLogic);
        assert_eq!(SourceType::classify("bool", &enums), SourceType::Bool);
        assert_eq!(SourceType::classify("sc_float", &enums), SourceType::Float { spelling: "sc_float".into() });
        assert_eq!(SourceType::classify("ns::BusState", &enums), SourceType::Enum("BusState".into()));
        assert_eq!(
            SourceType::classify("sc_dt::sc_bigint<128>", &enums),
            SourceType::Other("sc_dt::sc_bigint<128>".into())
        );
        assert_eq!(SourceType::classify("sc_int<W>", &enums), SourceType::Other("sc_int<W>".into()));
    }

    #[test]
    fn bit_width_only_for_parameterized_types() {
        assert_eq!(SourceType::ScBv(12).bit_width(), Some(12));
        assert_eq!(SourceType::ScLogic.bit_width(), None);
        assert_eq!(SourceType::Enum("E".into()).bit_width(), None);
    }

    #[test]
    fn canonical_display_is_qualified() {
        assert_eq!(SourceType::classify("sc_int<32>", &[]).to_string(), "sc_dt::sc_int<32>");
    }

    #[test]
    fn normalize_type_tokens() {
        assert_eq!(normalize_type("sc_dt :: sc_int < 32 >"), "sc_dt::sc_int<32>");
        assert_eq!(normalize_type("unsigned   int"), "unsigned int");
    }

    #[test]
    fn source_unit_checks() {
        assert!(matches!(SourceUnit::new("a.txt", "x"), Err(ScanError::UnknownExtension(_))));
        assert!(matches!(SourceUnit::new("a.h", "  \n"), Err(ScanError::EmptyUnit(_))));
        assert_eq!(SourceUnit::new("a.cpp", "int x;").unwrap().kind(), SourceKind::Implementation);
        assert_eq!(SourceUnit::new("a.hpp", "int x;").unwrap().kind(), SourceKind::Header);
    }
}
