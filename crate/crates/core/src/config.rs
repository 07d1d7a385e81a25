//! Tool configuration, read from YAML or JSON.
//!
//! Relative paths are resolved against the directory holding the config file.
//! Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer};
use thiserror::Error;

use crate::codegen::BuildFlavor;
use crate::cosim::{Connection, PortRef};
use crate::package::PlatformTuple;
use crate::time::RationalTime;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: '{field}' must be positive")]
    NotPositive { path: PathBuf, field: String },
    #[error("{path}: {what} '{missing}' does not exist")]
    MissingPath { path: PathBuf, what: &'static str, missing: PathBuf },
    #[error("{path}: instance '{id}' needs exactly one of 'model' and 'fmu'")]
    InstanceKind { path: PathBuf, id: String },
    #[error("{path}: no '{section}' section")]
    MissingSection { path: PathBuf, section: &'static str },
}

/// A scalar literal written as a string, number or boolean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal(pub String);

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Bool(bool),
            Int(i64),
            UInt(u64),
            Float(f64),
            Text(String),
        }
        Ok(Literal(match Repr::deserialize(deserializer)? {
            Repr::Bool(b) => b.to_string(),
            Repr::Int(n) => n.to_string(),
            Repr::UInt(n) => n.to_string(),
            Repr::Float(x) => x.to_string(),
            Repr::Text(s) => s,
        }))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn default_step() -> RationalTime {
    RationalTime::new(1, 10).expect("nonzero")
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolConfig {
    #[serde(default)]
    pub sources: Vec<PathBuf>,
    #[serde(default)]
    pub record_hint: Option<String>,
    #[serde(default)]
    pub model_name: Option<String>,
    #[serde(default = "default_step")]
    pub communication_step_size: RationalTime,
    /// Start-value overrides keyed by payload field.
    #[serde(default)]
    pub start_values: BTreeMap<String, Literal>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub build_flavor: BuildFlavor,
    /// Prebuilt shared libraries to package, per platform.
    #[serde(default)]
    pub binaries: BTreeMap<PlatformTuple, PathBuf>,
    /// Archive written by `package`.
    #[serde(default)]
    pub fmu: Option<PathBuf>,
    #[serde(default)]
    pub cosim: Option<CosimConfig>,
    #[serde(default)]
    pub bench: Option<BenchConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosimConfig {
    pub stop_time: RationalTime,
    pub instances: Vec<InstanceConfig>,
    #[serde(default)]
    pub connections: Vec<Connection>,
    #[serde(default)]
    pub record: Vec<PortRef>,
    /// CSV trace path; defaults to `trace.csv` in the output directory.
    #[serde(default)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub id: String,
    /// Name of a built-in behavioral model.
    #[serde(default)]
    pub model: Option<String>,
    /// Path of an FMU archive.
    #[serde(default)]
    pub fmu: Option<PathBuf>,
    pub step: RationalTime,
    #[serde(default)]
    pub parameters: BTreeMap<String, Literal>,
}

fn default_bench_model() -> String {
    "i2c".into()
}

fn default_bench_steps() -> Vec<u64> {
    vec![250, 1000, 10_000]
}

fn default_bench_repeats() -> u32 {
    5
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default = "default_bench_model")]
    pub model: String,
    #[serde(default = "default_step")]
    pub step: RationalTime,
    #[serde(default = "default_bench_steps")]
    pub steps: Vec<u64>,
    /// Runs per step count; the fastest is reported.
    #[serde(default = "default_bench_repeats")]
    pub repeats: u32,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { model: default_bench_model(), step: default_step(), steps: default_bench_steps(), repeats: default_bench_repeats() }
    }
}

impl ToolConfig {
    /// Parses YAML, or JSON when the file name ends in `.json`, and resolves paths.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, is_json, base).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse { path: path.to_path_buf(), message },
            ConfigError::NotPositive { field, .. } => ConfigError::NotPositive { path: path.to_path_buf(), field },
            ConfigError::MissingPath { what, missing, .. } => {
                ConfigError::MissingPath { path: path.to_path_buf(), what, missing }
            }
            ConfigError::InstanceKind { id, .. } => ConfigError::InstanceKind { path: path.to_path_buf(), id },
            other => other,
        })
    }

    pub fn parse(text: &str, json: bool, base: &Path) -> Result<Self, ConfigError> {
        let parse_error = |message: String| ConfigError::Parse { path: PathBuf::new(), message };
        let mut config: ToolConfig = if json {
            serde_json::from_str(text).map_err(|e| parse_error(e.to_string()))?
        } else {
            serde_yaml::from_str(text).map_err(|e| parse_error(e.to_string()))?
        };
        config.resolve(base);
        config.check()?;
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.sources.iter_mut().for_each(join);
        self.output_dir.iter_mut().for_each(join);
        self.binaries.values_mut().for_each(join);
        self.fmu.iter_mut().for_each(join);
        if let Some(cosim) = &mut self.cosim {
            cosim.trace.iter_mut().for_each(join);
            for inst in &mut cosim.instances {
                inst.fmu.iter_mut().for_each(join);
            }
        }
    }

    fn check(&self) -> Result<(), ConfigError> {
        let positive = |t: RationalTime, field: &str| {
            if t.is_zero() {
                Err(ConfigError::NotPositive { path: PathBuf::new(), field: field.to_string() })
            } else {
                Ok(())
            }
        };
        let exists = |p: &Path, what: &'static str| {
            if p.exists() {
                Ok(())
            } else {
                Err(ConfigError::MissingPath { path: PathBuf::new(), what, missing: p.to_path_buf() })
            }
        };
        positive(self.communication_step_size, "communication_step_size")?;
        for s in &self.sources {
            exists(s, "source")?;
        }
        for b in self.binaries.values() {
            exists(b, "binary")?;
        }
        if let Some(cosim) = &self.cosim {
            positive(cosim.stop_time, "cosim.stop_time")?;
            for inst in &cosim.instances {
                positive(inst.step, &format!("cosim.instances.{}.step", inst.id))?;
                match (&inst.model, &inst.fmu) {
                    (Some(_), None) => {}
                    (None, Some(fmu)) => exists(fmu, "fmu")?,
                    _ => return Err(ConfigError::InstanceKind { path: PathBuf::new(), id: inst.id.clone() }),
                }
            }
        }
        if let Some(bench) = &self.bench {
            positive(bench.step, "bench.step")?;
            if bench.repeats == 0 {
                return Err(ConfigError::NotPositive { path: PathBuf::new(), field: "bench.repeats".into() });
            }
        }
        Ok(())
    }

    pub fn start_overrides(&self) -> BTreeMap<String, String> {
        self.start_values.iter().map(|(k, v)| (k.clone(), v.0.clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const YAML: &str = "
model_name: drive
communication_step_size: 0.1
start_values: {data_in: 5, enable: true}
cosim:
  stop_time: 35
  instances:
    - {id: ecu, model: ecu, step: 0.1}
    - {id: vehicle, model: vehicle, step: 1, parameters: {Mass: 1800}}
  connections:
    - {source: ecu.fmi_torque_request, sink: vehicle.Torque_Request}
  trace: out/trace.csv
";

    #[test]
    fn yaml_and_json_agree() {
        let base = Path::new("/cfg");
        let yaml = ToolConfig::parse(YAML, false, base).unwrap();
        let as_json: serde_json::Value = serde_yaml::from_str(YAML).unwrap();
        let json = ToolConfig::parse(&as_json.to_string(), true, base).unwrap();
        assert_eq!(yaml, json);
        assert_eq!(yaml.start_overrides()["data_in"], "5");
        assert_eq!(yaml.start_overrides()["enable"], "true");
        let cosim = yaml.cosim.unwrap();
        assert_eq!(cosim.stop_time, RationalTime::from_secs(35));
        assert_eq!(cosim.connections[0].sink, PortRef::new("vehicle", "Torque_Request"));
        assert_eq!(cosim.trace.unwrap(), Path::new("/cfg/out/trace.csv"));
        assert_eq!(cosim.instances[1].parameters["Mass"].0, "1800");
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = ToolConfig::parse("model_nme: x\n", false, Path::new("")).unwrap_err();
        assert!(err.to_string().contains("model_nme"), "{err}");
        let err = ToolConfig::parse(r#"{"cosim": {"stop_time": 1, "instances": [], "stepsize": 1}}"#, true, Path::new(""))
            .unwrap_err();
        assert!(err.to_string().contains("stepsize"), "{err}");
    }

    #[test]
    fn checks() {
        let zero = "communication_step_size: 0\n";
        assert!(matches!(ToolConfig::parse(zero, false, Path::new("")), Err(ConfigError::NotPositive { .. })));
        let missing = "sources: [nope/never.cpp]\n";
        assert!(matches!(ToolConfig::parse(missing, false, Path::new("/")), Err(ConfigError::MissingPath { .. })));
        let both = "cosim: {stop_time: 1, instances: [{id: a, step: 1}]}\n";
        assert!(matches!(ToolConfig::parse(both, false, Path::new("")), Err(ConfigError::InstanceKind { .. })));
    }
}
