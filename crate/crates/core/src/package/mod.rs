//! FMU archives: packing, unpacking and validation.
//!
//! Archives are written deterministically: `modelDescription.xml` first, every
//! other entry in byte order of its path, a fixed 1980-01-01 timestamp and
//! `0644` permissions. Packing the same inputs twice gives identical bytes.

mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Cursor, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, DateTime, ZipArchive, ZipWriter};

use crate::codegen::{GeneratedTree, MODEL_DESCRIPTION};
use crate::fmi_map::{parse_xml, FmiMapError};

pub use validate::{validate, validate_bytes, Check, CheckStatus, ValidationReport};

#[derive(Debug, Error)]
pub enum PackageError {
    #[error("I/O failure on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("no modelDescription.xml at the archive root")]
    MissingModelDescription,
    #[error("not a zip file: {0}")]
    NotAZipFile(String),
    #[error("unknown platform tuple '{0}'")]
    UnknownPlatform(String),
    #[error(transparent)]
    ModelDescription(#[from] FmiMapError),
    #[error("zip error: {0}")]
    Zip(#[from] zip::result::ZipError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PlatformTuple {
    X86_64Linux,
    X86_64Windows,
    Aarch64Darwin,
    X86_64Darwin,
    Aarch64Linux,
}

impl PlatformTuple {
    pub const ALL: [PlatformTuple; 5] =
        [Self::X86_64Linux, Self::X86_64Windows, Self::Aarch64Darwin, Self::X86_64Darwin, Self::Aarch64Linux];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::X86_64Linux => "x86_64-linux",
            Self::X86_64Windows => "x86_64-windows",
            Self::Aarch64Darwin => "aarch64-darwin",
            Self::X86_64Darwin => "x86_64-darwin",
            Self::Aarch64Linux => "aarch64-linux",
        }
    }

    /// Shared library extension, without the dot.
    pub fn extension(self) -> &'static str {
        match self {
            Self::X86_64Linux | Self::Aarch64Linux => "so",
            Self::X86_64Windows => "dll",
            Self::Aarch64Darwin | Self::X86_64Darwin => "dylib",
        }
    }

    /// The platform this program was compiled for, if it is one of the supported tuples.
    pub fn host() -> Option<Self> {
        match (std::env::consts::ARCH, std::env::consts::OS) {
            ("x86_64", "linux") => Some(Self::X86_64Linux),
            ("x86_64", "windows") => Some(Self::X86_64Windows),
            ("aarch64", "macos") => Some(Self::Aarch64Darwin),
            ("x86_64", "macos") => Some(Self::X86_64Darwin),
            ("aarch64", "linux") => Some(Self::Aarch64Linux),
            _ => None,
        }
    }

    /// Archive path of the library for a model identifier.
    pub fn binary_path(self, model_identifier: &str) -> String {
        format!("binaries/{}/{model_identifier}.{}", self.as_str(), self.extension())
    }
}

impl fmt::Display for PlatformTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlatformTuple {
    type Err = PackageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| PackageError::UnknownPlatform(s.into()))
    }
}

impl TryFrom<String> for PlatformTuple {
    type Error = PackageError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PlatformTuple> for String {
    fn from(p: PlatformTuple) -> String {
        p.as_str().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FmuArchive {
    pub model_description: String,
    pub binaries: BTreeMap<PlatformTuple, Vec<u8>>,
    /// Keyed by path below `resources/`.
    pub resources: BTreeMap<String, Vec<u8>>,
    /// Keyed by path below `documentation/`.
    pub documentation: BTreeMap<String, Vec<u8>>,
    /// Entries outside the known directories, kept so repacking is lossless.
    pub extra: BTreeMap<String, Vec<u8>>,
}

fn options() -> SimpleFileOptions {
    SimpleFileOptions::default()
        .compression_method(CompressionMethod::Deflated)
        .last_modified_time(DateTime::default())
        .unix_permissions(0o644)
}

impl FmuArchive {
    pub fn from_tree(tree: &GeneratedTree, binaries: BTreeMap<PlatformTuple, Vec<u8>>) -> Result<Self, PackageError> {
        let model_description = tree.file(MODEL_DESCRIPTION).ok_or(PackageError::MissingModelDescription)?;
        Ok(Self { model_description: model_description.to_string(), binaries, ..Self::default() })
    }

    /// An archive without any platform binary can only be inspected, not simulated.
    pub fn is_description_only(&self) -> bool {
        self.binaries.is_empty()
    }

    pub fn model_identifier(&self) -> Result<String, PackageError> {
        Ok(parse_xml(&self.model_description)?.model_identifier)
    }

    /// Entry paths in archive order.
    pub fn entries(&self) -> Result<Vec<String>, PackageError> {
        Ok(self.layout()?.into_iter().map(|(name, _)| name).collect())
    }

    fn layout(&self) -> Result<Vec<(String, &[u8])>, PackageError> {
        let id = self.model_identifier()?;
        let mut rest: Vec<(String, &[u8])> = Vec::new();
        for (platform, bytes) in &self.binaries {
            rest.push((platform.binary_path(&id), bytes));
        }
        for (path, bytes) in &self.resources {
            rest.push((format!("resources/{path}"), bytes));
        }
        for (path, bytes) in &self.documentation {
            rest.push((format!("documentation/{path}"), bytes));
        }
        for (path, bytes) in &self.extra {
            rest.push((path.clone(), bytes));
        }
        rest.sort_by(|a, b| a.0.cmp(&b.0));
        let mut all = vec![(MODEL_DESCRIPTION.to_string(), self.model_description.as_bytes())];
        all.extend(rest);
        Ok(all)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, PackageError> {
        let mut writer = ZipWriter::new(Cursor::new(Vec::new()));
        for (name, bytes) in self.layout()? {
            writer.start_file(name.as_str(), options())?;
            writer.write_all(bytes).map_err(|source| PackageError::Io { path: name.into(), source })?;
        }
        Ok(writer.finish()?.into_inner())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PackageError> {
        let mut zip = ZipArchive::new(Cursor::new(bytes)).map_err(|e| PackageError::NotAZipFile(e.to_string()))?;
        let mut archive = Self::default();
        let mut model_description = None;
        for i in 0..zip.len() {
            let mut file = zip.by_index(i)?;
            if file.is_dir() {
                continue;
            }
            let name = file.name()?.into_owned();
            let mut data = Vec::new();
            file.read_to_end(&mut data).map_err(|source| PackageError::Io { path: name.clone().into(), source })?;
            if name == MODEL_DESCRIPTION {
                model_description =
                    Some(String::from_utf8(data).map_err(|_| PackageError::NotAZipFile("modelDescription.xml is not UTF-8".into()))?);
            } else if let Some(rest) = name.strip_prefix("binaries/") {
                let tuple = rest.split('/').next().unwrap_or_default();
                archive.binaries.insert(tuple.parse()?, data);
            } else if let Some(rest) = name.strip_prefix("resources/") {
                archive.resources.insert(rest.to_string(), data);
            } else if let Some(rest) = name.strip_prefix("documentation/") {
                archive.documentation.insert(rest.to_string(), data);
            } else {
                archive.extra.insert(name, data);
            }
        }
        archive.model_description = model_description.ok_or(PackageError::MissingModelDescription)?;
        Ok(archive)
    }

    pub fn write(&self, out: &Path) -> Result<(), PackageError> {
        let bytes = self.to_bytes()?;
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|source| PackageError::Io { path: dir.to_path_buf(), source })?;
        }
        fs::write(out, bytes).map_err(|source| PackageError::Io { path: out.to_path_buf(), source })
    }

    pub fn read(path: &Path) -> Result<Self, PackageError> {
        let bytes = fs::read(path).map_err(|source| PackageError::Io { path: path.to_path_buf(), source })?;
        Self::from_bytes(&bytes)
    }
}

/// Writes the archive for `tree` to `out` and returns it.
pub fn pack(
    tree: &GeneratedTree,
    binaries: BTreeMap<PlatformTuple, Vec<u8>>,
    out: &Path,
) -> Result<FmuArchive, PackageError> {
    let archive = FmuArchive::from_tree(tree, binaries)?;
    archive.write(out)?;
    Ok(archive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::{generate, test_support::echo_plan};

    fn linux_bin() -> BTreeMap<PlatformTuple, Vec<u8>> {
        BTreeMap::from([(PlatformTuple::X86_64Linux, b"\x7fELF fake".to_vec())])
    }

    #[test]
    fn entries_follow_the_layout() {
        let tree = generate(&echo_plan()).unwrap();
        let archive = FmuArchive::from_tree(&tree, linux_bin()).unwrap();
        assert_eq!(archive.entries().unwrap(), ["modelDescription.xml", "binaries/x86_64-linux/tlm.so"]);
        assert!(!archive.is_description_only());
        assert!(FmuArchive::from_tree(&tree, BTreeMap::new()).unwrap().is_description_only());
    }

    #[test]
    fn bytes_are_deterministic_and_round_trip() {
        let tree = generate(&echo_plan()).unwrap();
        let mut archive = FmuArchive::from_tree(&tree, linux_bin()).unwrap();
        archive.resources.insert("config/params.txt".into(), b"gain=2\n".to_vec());
        let a = archive.to_bytes().unwrap();
        assert_eq!(a, archive.to_bytes().unwrap());
        let back = FmuArchive::from_bytes(&a).unwrap();
        assert_eq!(back, archive);
        assert_eq!(back.to_bytes().unwrap(), a);
    }

    #[test]
    fn platform_tuples() {
        for p in PlatformTuple::ALL {
            assert_eq!(p.as_str().parse::<PlatformTuple>().unwrap(), p);
        }
        assert_eq!(PlatformTuple::X86_64Windows.binary_path("m"), "binaries/x86_64-windows/m.dll");
        assert_eq!(PlatformTuple::Aarch64Darwin.extension(), "dylib");
        assert!("riscv64-linux".parse::<PlatformTuple>().is_err());
    }

    #[test]
    fn garbage_is_not_a_zip() {
        assert!(matches!(FmuArchive::from_bytes(b"hello"), Err(PackageError::NotAZipFile(_))));
    }
}
