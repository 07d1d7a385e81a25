use std::fmt;
use std::fs;
use std::io::{Cursor, Read};
use std::path::Path;

use serde::Serialize;
use zip::ZipArchive;

use super::{PackageError, PlatformTuple};
use crate::codegen::MODEL_DESCRIPTION;
use crate::fmi_map::{parse_xml_with_warnings, FmiMapError, ModelDescription};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub description_only: bool,
}

impl ValidationReport {
    fn push(&mut self, name: &'static str, status: CheckStatus, message: impl Into<String>) {
        self.checks.push(Check { name, status, message: message.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Error)
    }

    pub fn worst(&self) -> CheckStatus {
        self.checks.iter().map(|c| c.status).max().unwrap_or(CheckStatus::Pass)
    }

    /// 0 when every check passes, 1 with warnings only, 2 with any error.
    pub fn exit_code(&self) -> i32 {
        match self.worst() {
            CheckStatus::Pass => 0,
            CheckStatus::Warning => 1,
            CheckStatus::Error => 2,
        }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Error)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match c.status {
                CheckStatus::Pass => "ok",
                CheckStatus::Warning => "warning",
                CheckStatus::Error => "error",
            };
            writeln!(f, "{tag:>7}  {:<18} {}", c.name, c.message)?;
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict}")
    }
}

pub fn validate(archive: &Path) -> Result<ValidationReport, PackageError> {
    let bytes = fs::read(archive).map_err(|source| PackageError::Io { path: archive.to_path_buf(), source })?;
    validate_bytes(&bytes)
}

fn check_description(report: &mut ValidationReport, text: &str) -> Option<ModelDescription> {
    let (md, warnings) = match parse_xml_with_warnings(text) {
        Ok(ok) => ok,
        Err(FmiMapError::UnsupportedFmiVersion(v)) => {
            report.push("xml", CheckStatus::Pass, "well-formed");
            report.push("fmi_version", CheckStatus::Error, format!("fmiVersion is '{v}', expected 3.0"));
            return None;
        }
        Err(FmiMapError::DuplicateValueReference(vr)) => {
            report.push("xml", CheckStatus::Pass, "well-formed");
            report.push("fmi_version", CheckStatus::Pass, "3.0");
            report.push("value_references", CheckStatus::Error, format!("value reference {vr} is used more than once"));
            return None;
        }
        Err(e) => {
            report.push("xml", CheckStatus::Error, e.to_string());
            return None;
        }
    };
    if warnings.is_empty() {
        report.push("xml", CheckStatus::Pass, "well-formed");
    } else {
        for w in warnings {
            let at = w.location.map(|l| format!("line {}: ", l.line)).unwrap_or_default();
            report.push("xml", CheckStatus::Warning, format!("{at}{}", w.message));
        }
    }
    report.push("fmi_version", CheckStatus::Pass, "3.0");
    report.push("value_references", CheckStatus::Pass, format!("{} unique", md.variables.len()));
    match md.validate() {
        Ok(()) => report.push("causality_start", CheckStatus::Pass, "start values consistent with causality"),
        Err(e) => report.push("causality_start", CheckStatus::Error, e.to_string()),
    }
    Some(md)
}

fn check_binaries(report: &mut ValidationReport, names: &[String], md: Option<&ModelDescription>) {
    let binaries: Vec<&String> = names.iter().filter(|n| n.starts_with("binaries/")).collect();
    if binaries.is_empty() {
        report.description_only = true;
        report.push("binary_layout", CheckStatus::Warning, "no binaries; archive is description-only");
        return;
    }
    let mut layout_ok = true;
    let mut ext_ok = true;
    for name in binaries {
        let parts: Vec<&str> = name.split('/').collect();
        if parts.len() != 3 || parts[2].is_empty() {
            layout_ok = false;
            report.push("binary_layout", CheckStatus::Error, format!("'{name}' is not binaries/<platform>/<file>"));
            continue;
        }
        let Ok(platform) = parts[1].parse::<PlatformTuple>() else {
            report.push("binary_layout", CheckStatus::Warning, format!("unknown platform directory '{}'", parts[1]));
            continue;
        };
        let file = parts[2];
        let (stem, ext) = file.rsplit_once('.').unwrap_or((file, ""));
        if ext != platform.extension() {
            ext_ok = false;
            report.push(
                "library_extension",
                CheckStatus::Error,
                format!("'{name}' should have extension .{} for {platform}", platform.extension()),
            );
        }
        if let Some(md) = md {
            if stem != md.model_identifier {
                layout_ok = false;
                report.push(
                    "binary_layout",
                    CheckStatus::Error,
                    format!("'{name}' does not match model identifier '{}'", md.model_identifier),
                );
            }
        }
    }
    if layout_ok {
        report.push("binary_layout", CheckStatus::Pass, "binaries/<platform>/<modelIdentifier>.<ext>");
    }
    if ext_ok {
        report.push("library_extension", CheckStatus::Pass, "extensions match platforms");
    }
}

/// Validates archive bytes. Problems with the content are reported as
/// checks; only input that is not a zip file at all is an error.
pub fn validate_bytes(bytes: &[u8]) -> Result<ValidationReport, PackageError> {
    let mut zip = ZipArchive::new(Cursor::new(bytes)).map_err(|e| PackageError::NotAZipFile(e.to_string()))?;
    let mut report = ValidationReport { checks: Vec::new(), description_only: false };
    let names: Vec<String> = zip.file_names().map(|n| n.map(|n| n.into_owned())).collect::<Result<_, _>>()?;

    let mut text = None;
    if names.iter().any(|n| n == MODEL_DESCRIPTION) {
        let mut file = zip.by_name(MODEL_DESCRIPTION)?;
        let mut s = String::new();
        match file.read_to_string(&mut s) {
            Ok(_) => text = Some(s),
            Err(e) => report.push("xml", CheckStatus::Error, format!("cannot read modelDescription.xml: {e}")),
        }
        report.push("layout", CheckStatus::Pass, "modelDescription.xml at archive root");
    } else {
        match names.iter().find(|n| n.ends_with(&format!("/{MODEL_DESCRIPTION}"))) {
            Some(nested) => report.push(
                "layout",
                CheckStatus::Error,
                format!("modelDescription.xml found at '{nested}', expected at the archive root"),
            ),
            None => report.push("layout", CheckStatus::Error, "modelDescription.xml is missing"),
        }
    }

    let md = text.as_deref().and_then(|t| check_description(&mut report, t));
    check_binaries(&mut report, &names, md.as_ref());
    Ok(report)
}
