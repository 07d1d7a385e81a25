//! Wrapper generation.
//!
//! A [`WrapperPlan`] fixes everything the templates need; [`generate`] renders
//! the payload header, the initiator and top-level modules, the FMI wrapper,
//! the model description and a build script into a [`GeneratedTree`]. The
//! target module's own sources are never modified.

mod build;
mod initiator;
mod top;
mod wrapper;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fmi_map::{build_model_description, emit_xml, FmiMapError, FmiType, ModelDescription};
use crate::time::RationalTime;
use crate::tlm_scan::{extract_header, Analysis, Direction, PayloadField, PayloadSpec, SourceKind, SourceType};

pub use build::render_build;
pub use initiator::render_initiator;
pub use top::render_top;
pub use wrapper::render_wrapper;

pub const PAYLOAD_HEADER: &str = "payload.h";
pub const INITIATOR_HEADER: &str = "initiator.h";
pub const TOP_HEADER: &str = "top.h";
pub const WRAPPER_SOURCE: &str = "fmu_wrapper.cpp";
pub const MODEL_DESCRIPTION: &str = "modelDescription.xml";

#[derive(Debug, Error)]
pub enum CodegenError {
    #[error(transparent)]
    FmiMap(#[from] FmiMapError),
    #[error("no target module class found for the transport functions")]
    NoTargetModule,
    #[error("no target socket member found in module '{0}'")]
    NoTargetSocket(String),
    #[error("transport '{0:?}' is not implemented by the target")]
    TransportUnavailable(Transport),
    #[error("model description does not match the payload: {0}")]
    DescriptionMismatch(String),
    #[error("'{0}' is not a valid C identifier")]
    InvalidIdentifier(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transport {
    Blocking,
    Nonblocking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildFlavor {
    ShellScript,
    #[default]
    Cmake,
}

impl BuildFlavor {
    pub fn file_name(self) -> &'static str {
        match self {
            Self::ShellScript => "build.sh",
            Self::Cmake => "CMakeLists.txt",
        }
    }
}

/// Inputs to [`WrapperPlan::from_analysis`] that do not come from the scan.
#[derive(Debug, Clone)]
pub struct PlanOptions {
    pub model_name: String,
    pub step_size: RationalTime,
    pub start_overrides: BTreeMap<String, String>,
    pub output_dir: PathBuf,
    pub build_flavor: BuildFlavor,
    /// Every scanned source unit, headers included.
    pub sources: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WrapperPlan {
    pub model_name: String,
    pub target_module_name: String,
    pub spec: PayloadSpec,
    pub md: ModelDescription,
    pub transport: Transport,
    pub default_step_size: RationalTime,
    pub output_dir: PathBuf,
    pub build_flavor: BuildFlavor,
    pub socket_name: String,
    /// File that makes the target module class visible to `top.h`.
    pub target_include: PathBuf,
    /// File that declares the payload record for `initiator.h`.
    pub payload_include: PathBuf,
    /// Implementation units compiled next to the wrapper.
    pub target_sources: Vec<PathBuf>,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl WrapperPlan {
    pub fn from_analysis(analysis: &Analysis, options: &PlanOptions) -> Result<Self, CodegenError> {
        let surface = &analysis.surface;
        let target_module_name = surface.module_name.clone().ok_or(CodegenError::NoTargetModule)?;
        let socket_name =
            surface.socket_name.clone().ok_or_else(|| CodegenError::NoTargetSocket(target_module_name.clone()))?;
        let transport = if surface.has_blocking { Transport::Blocking } else { Transport::Nonblocking };
        let md = build_model_description(
            &analysis.spec,
            &options.model_name,
            options.step_size,
            &options.start_overrides,
        )?;

        let module_file = surface.module_file.clone().unwrap_or_else(|| surface.functions[0].path.clone());
        let target_include = surface.module_header.clone().unwrap_or_else(|| module_file.clone());
        let origin = &analysis.spec.header_origin;
        let payload_include = if SourceKind::from_path(origin) == Some(SourceKind::Header) || *origin == target_include
        {
            origin.clone()
        } else {
            options.output_dir.join(PAYLOAD_HEADER)
        };
        let target_sources = options
            .sources
            .iter()
            .filter(|p| SourceKind::from_path(p) == Some(SourceKind::Implementation))
            .filter(|p| **p != target_include)
            .cloned()
            .collect();

        let plan = Self {
            model_name: options.model_name.clone(),
            target_module_name,
            spec: analysis.spec.clone(),
            md,
            transport,
            default_step_size: options.step_size,
            output_dir: options.output_dir.clone(),
            build_flavor: options.build_flavor,
            socket_name,
            target_include,
            payload_include,
            target_sources,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Checks that `md` was derived from `spec` and that every name is usable in C++.
    pub fn validate(&self) -> Result<(), CodegenError> {
        for name in [&self.model_name, &self.target_module_name, &self.socket_name, &self.spec.record_name] {
            if !is_identifier(name) {
                return Err(CodegenError::InvalidIdentifier(name.clone()));
            }
        }
        if self.md.variables.len() != self.spec.fields.len() {
            return Err(CodegenError::DescriptionMismatch(format!(
                "{} variables for {} fields",
                self.md.variables.len(),
                self.spec.fields.len()
            )));
        }
        for (field, var) in self.spec.fields.iter().zip(&self.md.variables) {
            if var.name != format!("fmi_{}", field.name) {
                return Err(CodegenError::DescriptionMismatch(format!("'{}' does not match field '{}'", var.name, field.name)));
            }
            let expected = crate::fmi_map::map_type(&field.source_type)?;
            if var.fmi_type != expected {
                return Err(CodegenError::DescriptionMismatch(format!("'{}' is {} not {expected}", var.name, var.fmi_type)));
            }
        }
        Ok(())
    }

    pub(crate) fn inputs(&self) -> impl Iterator<Item = &PayloadField> {
        self.spec.fields.iter().filter(|f| f.direction == Some(Direction::Input))
    }

    pub(crate) fn outputs(&self) -> impl Iterator<Item = &PayloadField> {
        self.spec.fields.iter().filter(|f| f.direction == Some(Direction::Output))
    }

    pub(crate) fn fmi_type_of(&self, field: &PayloadField) -> FmiType {
        self.md.variable(&format!("fmi_{}", field.name)).map(|v| v.fmi_type).unwrap_or(FmiType::Int32)
    }

    /// Path of `path` relative to the output directory, with `/` separators.
    pub(crate) fn relative(&self, path: &Path) -> String {
        let rel = pathdiff::diff_paths(path, &self.output_dir).unwrap_or_else(|| path.to_path_buf());
        rel.to_string_lossy().replace('\\', "/")
    }

    /// Directories of the target sources, relative to the output directory.
    pub(crate) fn include_dirs(&self) -> Vec<String> {
        let mut dirs = BTreeSet::new();
        for path in self.target_sources.iter().chain([&self.target_include, &self.payload_include]) {
            let dir = path.parent().unwrap_or(Path::new(""));
            let rel = self.relative(dir);
            if !rel.is_empty() {
                dirs.insert(rel);
            }
        }
        dirs.into_iter().collect()
    }

    pub(crate) fn include_name(path: &Path) -> String {
        path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
    }
}

/// C integer type matching an FMI integer bucket.
pub(crate) fn c_int_type(ty: FmiType) -> &'static str {
    match ty {
        FmiType::Int8 => "int8_t",
        FmiType::UInt8 => "uint8_t",
        FmiType::Int16 => "int16_t",
        FmiType::UInt16 => "uint16_t",
        FmiType::Int32 => "int32_t",
        FmiType::UInt32 => "uint32_t",
        FmiType::Int64 => "int64_t",
        _ => "uint64_t",
    }
}

pub(crate) fn source_type_name(ty: &SourceType) -> String {
    ty.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedTree {
    pub files: BTreeMap<PathBuf, String>,
    pub entry_points: Vec<String>,
}

impl GeneratedTree {
    /// Text of the generated file with the given name.
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(p, _)| p.file_name().is_some_and(|n| n == name)).map(|(_, t)| t.as_str())
    }

    pub fn write(&self) -> Result<(), CodegenError> {
        for (path, text) in &self.files {
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir).map_err(|source| CodegenError::Io { path: dir.to_path_buf(), source })?;
            }
            fs::write(path, text).map_err(|source| CodegenError::Io { path: path.clone(), source })?;
            #[cfg(unix)]
            if path.extension().is_some_and(|e| e == "sh") {
                use std::os::unix::fs::PermissionsExt;
                let _ = fs::set_permissions(path, fs::Permissions::from_mode(0o755));
            }
        }
        Ok(())
    }
}

/// FMI functions the generated wrapper exports for `md`.
pub fn entry_points(md: &ModelDescription) -> Vec<String> {
    let mut names: Vec<String> = [
        "fmi3GetVersion",
        "fmi3InstantiateCoSimulation",
        "fmi3EnterInitializationMode",
        "fmi3ExitInitializationMode",
        "fmi3DoStep",
        "fmi3Terminate",
        "fmi3FreeInstance",
    ]
    .map(String::from)
    .to_vec();
    for ty in md.types_used() {
        names.push(format!("fmi3Get{ty}"));
        names.push(format!("fmi3Set{ty}"));
    }
    names
}

pub fn generate(plan: &WrapperPlan) -> Result<GeneratedTree, CodegenError> {
    plan.validate()?;
    let mut files = BTreeMap::new();
    let mut put = |name: &str, text: String| {
        files.insert(plan.output_dir.join(name), text);
    };
    put(PAYLOAD_HEADER, extract_header(&plan.spec));
    put(INITIATOR_HEADER, render_initiator(plan));
    put(TOP_HEADER, render_top(plan));
    put(WRAPPER_SOURCE, render_wrapper(plan));
    put(MODEL_DESCRIPTION, emit_xml(&plan.md));
    put(plan.build_flavor.file_name(), render_build(plan));
    Ok(GeneratedTree { files, entry_points: entry_points(&plan.md) })
}
