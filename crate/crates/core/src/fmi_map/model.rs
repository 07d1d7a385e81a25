use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::xml::model_variables_xml;
use super::{map_type, FmiMapError, FmiType, Value};
use crate::time::RationalTime;
use crate::tlm_scan::{Direction, PayloadSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Causality {
    Input,
    Output,
    Parameter,
    /// Only found in third-party descriptions.
    CalculatedParameter,
    Independent,
    Local,
}

impl Causality {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Input => "input",
            Self::Output => "output",
            Self::Parameter => "parameter",
            Self::CalculatedParameter => "calculatedParameter",
            Self::Independent => "independent",
            Self::Local => "local",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "input" => Self::Input,
            "output" => Self::Output,
            "parameter" => Self::Parameter,
            "calculatedParameter" => Self::CalculatedParameter,
            "independent" => Self::Independent,
            "local" => Self::Local,
            _ => return None,
        })
    }

    /// Whether the FMI standard requires a start value for this causality.
    pub fn requires_start(self) -> bool {
        matches!(self, Self::Input | Self::Parameter)
    }
}

impl fmt::Display for Causality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FmiVariable {
    pub name: String,
    pub value_reference: u32,
    pub fmi_type: FmiType,
    pub causality: Causality,
    pub start: Option<String>,
}

impl FmiVariable {
    pub fn start_value(&self) -> Option<Value> {
        self.start.as_deref().and_then(|s| Value::parse_literal(self.fmi_type, s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelDescription {
    pub fmi_version: String,
    pub model_name: String,
    pub model_identifier: String,
    pub instantiation_token: String,
    pub variables: Vec<FmiVariable>,
    pub default_step_size: Option<RationalTime>,
}

impl ModelDescription {
    pub fn variable(&self, name: &str) -> Option<&FmiVariable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn by_value_reference(&self, vr: u32) -> Option<&FmiVariable> {
        self.variables.iter().find(|v| v.value_reference == vr)
    }

    pub fn with_causality(&self, causality: Causality) -> impl Iterator<Item = &FmiVariable> {
        self.variables.iter().filter(move |v| v.causality == causality)
    }

    pub fn inputs(&self) -> impl Iterator<Item = &FmiVariable> {
        self.with_causality(Causality::Input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &FmiVariable> {
        self.with_causality(Causality::Output)
    }

    /// FMI types used by the model, in a stable order.
    pub fn types_used(&self) -> BTreeSet<&'static str> {
        self.variables.iter().map(|v| v.fmi_type.element_name()).collect()
    }

    /// Checks the structural rules every description must satisfy.
    pub fn validate(&self) -> Result<(), FmiMapError> {
        if self.fmi_version != "3.0" {
            return Err(FmiMapError::UnsupportedFmiVersion(self.fmi_version.clone()));
        }
        let mut seen = BTreeSet::new();
        for v in &self.variables {
            if !seen.insert(v.value_reference) {
                return Err(FmiMapError::DuplicateValueReference(v.value_reference));
            }
            if v.value_reference == 0 && v.causality != Causality::Independent {
                return Err(FmiMapError::ReservedValueReference(v.name.clone()));
            }
            match &v.start {
                None if v.causality.requires_start() => return Err(FmiMapError::MissingStart(v.name.clone())),
                Some(lit) if Value::parse_literal(v.fmi_type, lit).is_none() => {
                    return Err(FmiMapError::InvalidStart {
                        variable: v.name.clone(),
                        fmi_type: v.fmi_type,
                        literal: lit.clone(),
                    })
                }
                _ => {}
            }
        }
        if self.inputs().next().is_none() || self.outputs().next().is_none() {
            return Err(FmiMapError::MissingDirection(self.model_name.clone()));
        }
        Ok(())
    }
}

/// Content hash of the `<ModelVariables>` section, formatted as a GUID.
pub fn instantiation_token(variables: &[FmiVariable]) -> String {
    let digest = Sha256::digest(model_variables_xml(variables).as_bytes());
    let h = hex::encode(&digest[..16]);
    format!("{{{}-{}-{}-{}-{}}}", &h[..8], &h[8..12], &h[12..16], &h[16..20], &h[20..32])
}

/// Builds the interface model of a classified payload.
///
/// Each field becomes `fmi_<field>` with value references `1..=N` in
/// declaration order. `start_overrides` is keyed by field name (with or
/// without the `fmi_` prefix) and replaces the default input start value.
pub fn build_model_description(
    spec: &PayloadSpec,
    model_name: &str,
    step_size: RationalTime,
    start_overrides: &BTreeMap<String, String>,
) -> Result<ModelDescription, FmiMapError> {
    for key in start_overrides.keys() {
        let bare = key.strip_prefix("fmi_").unwrap_or(key);
        if !spec.fields.iter().any(|f| f.name == bare || f.name == *key) {
            return Err(FmiMapError::UnknownOverride(key.clone()));
        }
    }

    let mut variables = Vec::with_capacity(spec.fields.len());
    for field in spec.fields.iter().filter(|f| f.direction.is_some()) {
        let fmi_type = map_type(&field.source_type)?;
        let name = format!("fmi_{}", field.name);
        let causality = match field.direction {
            Some(Direction::Input) => Causality::Input,
            _ => Causality::Output,
        };
        let start = match causality {
            Causality::Input => {
                let over = start_overrides.get(&field.name).or_else(|| start_overrides.get(&name));
                Some(over.cloned().unwrap_or_else(|| fmi_type.default_start()))
            }
            _ => None,
        };
        variables.push(FmiVariable {
            name,
            value_reference: variables.len() as u32 + 1,
            fmi_type,
            causality,
            start,
        });
    }

    let md = ModelDescription {
        fmi_version: "3.0".into(),
        model_name: model_name.into(),
        model_identifier: model_name.into(),
        instantiation_token: instantiation_token(&variables),
        variables,
        default_step_size: Some(step_size),
    };
    md.validate()?;
    Ok(md)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tlm_scan::{analyze, SourceUnit};

    fn echo_spec() -> PayloadSpec {
        let src = "struct payload { sc_dt::sc_int<32> data_in; sc_dt::sc_int<32> data_out; };\n\
                   void b_transport(tlm::tlm_generic_payload& t, sc_core::sc_time& d) {\n\
                   payload* p = reinterpret_cast<payload*>(t.get_data_ptr()); p->data_out = p->data_in; }";
        analyze(&[SourceUnit::new("echo.cpp", src).unwrap()], None).unwrap().spec
    }

    fn step() -> RationalTime {
        RationalTime::new(1, 10).unwrap()
    }

    #[test]
    fn echo_variables() {
        let md = build_model_description(&echo_spec(), "tlm", step(), &BTreeMap::new()).unwrap();
        let rows: Vec<_> = md
            .variables
            .iter()
            .map(|v| (v.name.as_str(), v.value_reference, v.fmi_type, v.causality, v.start.as_deref()))
            .collect();
        assert_eq!(
            rows,
            [
                ("fmi_data_in", 1, FmiType::Int32, Causality::Input, Some("0")),
                ("fmi_data_out", 2, FmiType::Int32, Causality::Output, None),
            ]
        );
        assert_eq!(md.instantiation_token.len(), 38);
        assert_eq!(md, build_model_description(&echo_spec(), "tlm", step(), &BTreeMap::new()).unwrap());
    }

    #[test]
    fn overrides_apply_and_are_checked() {
        let mut over = BTreeMap::from([("data_in".to_string(), "-7".to_string())]);
        let md = build_model_description(&echo_spec(), "tlm", step(), &over).unwrap();
        assert_eq!(md.variables[0].start.as_deref(), Some("-7"));

        over.insert("fmi_data_in".into(), "x".into());
        over.remove("data_in");
        assert!(matches!(
            build_model_description(&echo_spec(), "tlm", step(), &over),
            Err(FmiMapError::InvalidStart { .. })
        ));
        let bad = BTreeMap::from([("nope".to_string(), "1".to_string())]);
        assert_eq!(
            build_model_description(&echo_spec(), "tlm", step(), &bad),
            Err(FmiMapError::UnknownOverride("nope".into()))
        );
    }

    #[test]
    fn token_tracks_variables() {
        let md = build_model_description(&echo_spec(), "tlm", step(), &BTreeMap::new()).unwrap();
        let mut vars = md.variables.clone();
        vars[0].start = Some("1".into());
        assert_ne!(instantiation_token(&vars), md.instantiation_token);
    }

    #[test]
    fn validate_rules() {
        let mut md = build_model_description(&echo_spec(), "tlm", step(), &BTreeMap::new()).unwrap();
        md.variables[1].value_reference = 1;
        assert_eq!(md.validate(), Err(FmiMapError::DuplicateValueReference(1)));
        md.variables[1].value_reference = 0;
        assert!(matches!(md.validate(), Err(FmiMapError::ReservedValueReference(_))));
        md.variables[1].value_reference = 2;
        md.variables[0].start = None;
        assert!(matches!(md.validate(), Err(FmiMapError::MissingStart(_))));
        md.variables[0].start = Some("0".into());
        md.variables.pop();
        assert!(matches!(md.validate(), Err(FmiMapError::MissingDirection(_))));
    }
}
