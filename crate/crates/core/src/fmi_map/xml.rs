use std::collections::BTreeSet;
use std::fmt::Write;

use roxmltree::{Document, Node};

use super::{Causality, FmiMapError, FmiType, FmiVariable, ModelDescription};
use crate::diag::{Diagnostic, Location};
use crate::time::RationalTime;

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// The `<ModelVariables>` element, indented by two spaces, without a trailing newline.
pub(crate) fn model_variables_xml(variables: &[FmiVariable]) -> String {
    let mut sorted: Vec<&FmiVariable> = variables.iter().collect();
    sorted.sort_by_key(|v| v.value_reference);
    let mut out = String::from("  <ModelVariables>\n");
    for v in sorted {
        let tag = v.fmi_type.element_name();
        write!(
            out,
            "    <{tag} name=\"{}\" valueReference=\"{}\" causality=\"{}\"",
            escape(&v.name),
            v.value_reference,
            v.causality
        )
        .unwrap();
        match (v.fmi_type, &v.start) {
            (FmiType::Binary { size_bytes }, Some(start)) => {
                writeln!(out, " maxSize=\"{size_bytes}\">").unwrap();
                writeln!(out, "      <Start value=\"{}\"/>", escape(start)).unwrap();
                writeln!(out, "    </{tag}>").unwrap();
            }
            (FmiType::Binary { size_bytes }, None) => writeln!(out, " maxSize=\"{size_bytes}\"/>").unwrap(),
            (_, Some(start)) => writeln!(out, " start=\"{}\"/>", escape(start)).unwrap(),
            (_, None) => out.push_str("/>\n"),
        }
    }
    out.push_str("  </ModelVariables>");
    out
}

/// Serialises a model description. The output depends only on `md`.
pub fn emit_xml(md: &ModelDescription) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<fmiModelDescription fmiVersion=\"{}\" modelName=\"{}\" instantiationToken=\"{}\">",
        escape(&md.fmi_version),
        escape(&md.model_name),
        escape(&md.instantiation_token)
    )
    .unwrap();
    writeln!(out, "  <CoSimulation modelIdentifier=\"{}\"/>", escape(&md.model_identifier)).unwrap();
    if let Some(step) = md.default_step_size {
        writeln!(out, "  <DefaultExperiment stepSize=\"{step}\"/>").unwrap();
    }
    out.push_str(&model_variables_xml(&md.variables));
    out.push('\n');
    let mut outputs: Vec<u32> = md.outputs().map(|v| v.value_reference).collect();
    outputs.sort_unstable();
    if outputs.is_empty() {
        out.push_str("  <ModelStructure/>\n");
    } else {
        out.push_str("  <ModelStructure>\n");
        for vr in outputs {
            writeln!(out, "    <Output valueReference=\"{vr}\"/>").unwrap();
        }
        out.push_str("  </ModelStructure>\n");
    }
    out.push_str("</fmiModelDescription>\n");
    out
}

struct Parser<'a> {
    doc: &'a Document<'a>,
    warnings: Vec<Diagnostic>,
}

impl<'a> Parser<'a> {
    fn warn(&mut self, node: Node, message: String) {
        let pos = self.doc.text_pos_at(node.range().start);
        let mut d = Diagnostic::warning(message);
        d.location = Some(Location { line: pos.row as usize, column: pos.col as usize });
        self.warnings.push(d);
    }

    fn ignore_attributes(&mut self, node: Node, known: &[&str], owner: &str) {
        for attr in node.attributes() {
            if !known.contains(&attr.name()) {
                self.warn(node, format!("ignored attribute '{}' on {owner}", attr.name()));
            }
        }
    }

    fn required(node: Node, attribute: &str) -> Result<String, FmiMapError> {
        node.attribute(attribute).map(str::to_string).ok_or_else(|| FmiMapError::MissingAttribute {
            element: node.tag_name().name().into(),
            attribute: attribute.into(),
        })
    }

    fn parsed<T: std::str::FromStr>(node: Node, attribute: &str) -> Result<T, FmiMapError> {
        let raw = Self::required(node, attribute)?;
        raw.trim().parse().map_err(|_| FmiMapError::InvalidAttribute {
            element: node.tag_name().name().into(),
            attribute: attribute.into(),
            value: raw,
        })
    }

    fn variable(&mut self, node: Node) -> Result<Option<FmiVariable>, FmiMapError> {
        let tag = node.tag_name().name();
        let scalar = match tag {
            "Boolean" => Some(FmiType::Bool),
            "Int8" => Some(FmiType::Int8),
            "UInt8" => Some(FmiType::UInt8),
            "Int16" => Some(FmiType::Int16),
            "UInt16" => Some(FmiType::UInt16),
            "Int32" => Some(FmiType::Int32),
            "UInt32" => Some(FmiType::UInt32),
            "Int64" => Some(FmiType::Int64),
            "UInt64" => Some(FmiType::UInt64),
            "Float32" => Some(FmiType::Float32),
            "Float64" => Some(FmiType::Float64),
            _ => None,
        };
        let name = Self::required(node, "name")?;
        let value_reference: u32 = Self::parsed(node, "valueReference")?;
        let causality = match node.attribute("causality") {
            None => Causality::Local,
            Some(raw) => Causality::parse(raw).ok_or_else(|| FmiMapError::InvalidAttribute {
                element: tag.into(),
                attribute: "causality".into(),
                value: raw.into(),
            })?,
        };
        let owner = format!("variable '{name}'");

        let (fmi_type, start) = if let Some(ty) = scalar {
            self.ignore_attributes(node, &["name", "valueReference", "causality", "start"], &owner);
            for child in node.children().filter(Node::is_element) {
                self.warn(child, format!("ignored element <{}> in {owner}", child.tag_name().name()));
            }
            (ty, node.attribute("start").map(str::to_string))
        } else if tag == "Binary" {
            self.ignore_attributes(node, &["name", "valueReference", "causality", "maxSize"], &owner);
            let size_bytes: u32 = Self::parsed(node, "maxSize")?;
            let mut start = None;
            for child in node.children().filter(Node::is_element) {
                if child.tag_name().name() == "Start" && start.is_none() {
                    start = Some(Self::required(child, "value")?);
                } else {
                    self.warn(child, format!("ignored element <{}> in {owner}", child.tag_name().name()));
                }
            }
            (FmiType::Binary { size_bytes }, start)
        } else {
            self.warn(node, format!("unsupported variable type <{tag}> for '{name}'; variable ignored"));
            return Ok(None);
        };
        Ok(Some(FmiVariable { name, value_reference, fmi_type, causality, start }))
    }

    fn parse(&mut self) -> Result<ModelDescription, FmiMapError> {
        let root = self.doc.root_element();
        if root.tag_name().name() != "fmiModelDescription" {
            return Err(FmiMapError::MalformedXml(format!(
                "root element is <{}>, expected <fmiModelDescription>",
                root.tag_name().name()
            )));
        }
        let fmi_version = Self::required(root, "fmiVersion")?;
        if fmi_version != "3.0" {
            return Err(FmiMapError::UnsupportedFmiVersion(fmi_version));
        }
        let model_name = Self::required(root, "modelName")?;
        let instantiation_token = Self::required(root, "instantiationToken")?;
        self.ignore_attributes(root, &["fmiVersion", "modelName", "instantiationToken"], "<fmiModelDescription>");

        let mut model_identifier = None;
        let mut default_step_size = None;
        let mut variables = Vec::new();
        for child in root.children().filter(Node::is_element) {
            match child.tag_name().name() {
                "CoSimulation" => {
                    model_identifier = Some(Self::required(child, "modelIdentifier")?);
                    self.ignore_attributes(child, &["modelIdentifier"], "<CoSimulation>");
                }
                "DefaultExperiment" => {
                    if child.attribute("stepSize").is_some() {
                        default_step_size = Some(Self::parsed::<RationalTime>(child, "stepSize")?);
                    }
                    self.ignore_attributes(child, &["stepSize"], "<DefaultExperiment>");
                }
                "ModelVariables" => {
                    for var in child.children().filter(Node::is_element) {
                        if let Some(v) = self.variable(var)? {
                            variables.push(v);
                        }
                    }
                }
                "ModelStructure" => {}
                other => self.warn(child, format!("ignored element <{other}>")),
            }
        }
        let model_identifier = model_identifier
            .ok_or_else(|| FmiMapError::MalformedXml("no <CoSimulation> element".into()))?;

        let mut seen = BTreeSet::new();
        for v in &variables {
            if !seen.insert(v.value_reference) {
                return Err(FmiMapError::DuplicateValueReference(v.value_reference));
            }
        }
        variables.sort_by_key(|v| v.value_reference);

        Ok(ModelDescription {
            fmi_version,
            model_name,
            model_identifier,
            instantiation_token,
            variables,
            default_step_size,
        })
    }
}

/// Parses a model description, also returning warnings for anything that was ignored.
pub fn parse_xml_with_warnings(text: &str) -> Result<(ModelDescription, Vec<Diagnostic>), FmiMapError> {
    let doc = Document::parse(text).map_err(|e| FmiMapError::MalformedXml(e.to_string()))?;
    let mut parser = Parser { doc: &doc, warnings: Vec::new() };
    let md = parser.parse()?;
    Ok((md, parser.warnings))
}

pub fn parse_xml(text: &str) -> Result<ModelDescription, FmiMapError> {
    parse_xml_with_warnings(text).map(|(md, _)| md)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fmi_map::instantiation_token;

    fn var(name: &str, vr: u32, fmi_type: FmiType, causality: Causality, start: Option<&str>) -> FmiVariable {
        FmiVariable { name: name.into(), value_reference: vr, fmi_type, causality, start: start.map(Into::into) }
    }

    fn sample() -> ModelDescription {
        let variables = vec![
            var("fmi_enable", 1, FmiType::Bool, Causality::Input, Some("false")),
            var("fmi_data_in", 2, FmiType::Binary { size_bytes: 2 }, Causality::Input, Some("0000")),
            var("fmi_data_out", 3, FmiType::Binary { size_bytes: 2 }, Causality::Output, None),
            var("fmi_count", 4, FmiType::UInt8, Causality::Output, None),
        ];
        ModelDescription {
            fmi_version: "3.0".into(),
            model_name: "ecc & co".into(),
            model_identifier: "ecc".into(),
            instantiation_token: instantiation_token(&variables),
            variables,
            default_step_size: Some(RationalTime::new(1, 10).unwrap()),
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let md = sample();
        let xml = emit_xml(&md);
        let (back, warnings) = parse_xml_with_warnings(&xml).unwrap();
        assert_eq!(back, md);
        assert!(warnings.is_empty());
        assert_eq!(emit_xml(&back), xml);
    }

    #[test]
    fn binary_carries_size_and_start() {
        let xml = emit_xml(&sample());
        assert!(xml.contains("<Binary name=\"fmi_data_in\" valueReference=\"2\" causality=\"input\" maxSize=\"2\">"));
        assert!(xml.contains("<Start value=\"0000\"/>"));
        assert!(xml.contains("modelName=\"ecc &amp; co\""));
        assert!(xml.contains("<Output valueReference=\"3\"/>"));
    }

    #[test]
    fn version_and_duplicates() {
        let xml = emit_xml(&sample());
        let v2 = xml.replace("fmiVersion=\"3.0\"", "fmiVersion=\"2.0\"");
        assert_eq!(parse_xml(&v2), Err(FmiMapError::UnsupportedFmiVersion("2.0".into())));
        let dup = xml.replace("valueReference=\"4\"", "valueReference=\"1\"");
        assert_eq!(parse_xml(&dup), Err(FmiMapError::DuplicateValueReference(1)));
        assert!(matches!(parse_xml("<fmiModelDescription"), Err(FmiMapError::MalformedXml(_))));
    }

    #[test]
    fn unknown_content_warns() {
        let xml = emit_xml(&sample())
            .replace("<CoSimulation ", "<CoSimulation canGetAndSetFMUState=\"false\" ")
            .replace("  <ModelVariables>", "  <UnitDefinitions/>\n  <ModelVariables>\n    <String name=\"s\" valueReference=\"9\"/>");
        let (md, warnings) = parse_xml_with_warnings(&xml).unwrap();
        assert_eq!(md.variables.len(), 4);
        let messages: Vec<_> = warnings.iter().map(|w| w.message.as_str()).collect();
        assert_eq!(messages.len(), 3, "{messages:?}");
        assert!(messages[0].contains("canGetAndSetFMUState"));
        assert!(warnings[1].location.unwrap().line > 1);
    }
}
