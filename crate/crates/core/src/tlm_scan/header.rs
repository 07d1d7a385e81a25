use std::fmt::Write;

use super::{PayloadSpec, SourceType};

/// Renders a self-contained header declaring the payload record (and any
/// enums its fields use), fields in declaration order.
pub fn extract_header(spec: &PayloadSpec) -> String {
    let guard = format!("{}_H", spec.record_name.to_ascii_uppercase());
    let origin = spec.header_origin.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut out = String::new();
    writeln!(out, "// Payload record '{}' extracted from {origin}.", spec.record_name).unwrap();
    writeln!(out, "#ifndef {guard}").unwrap();
    writeln!(out, "#define {guard}").unwrap();
    out.push('\n');
    let needs_systemc = spec.fields.iter().any(|f| {
        matches!(f.source_type, SourceType::ScInt(_) | SourceType::ScUint(_) | SourceType::ScBv(_) | SourceType::ScLogic)
    });
    if needs_systemc {
        out.push_str("#include <systemc>\n\n");
    }
    for e in &spec.enums {
        let kind = if e.scoped { "enum class" } else { "enum" };
        match &e.underlying {
            Some(u) => writeln!(out, "{kind} {} : {u} {{", e.name).unwrap(),
            None => writeln!(out, "{kind} {} {{", e.name).unwrap(),
        }
        for (name, value) in &e.enumerators {
            match value {
                Some(v) => writeln!(out, "    {name} = {v},").unwrap(),
                None => writeln!(out, "    {name},").unwrap(),
            }
        }
        out.push_str("};\n\n");
    }
    writeln!(out, "struct {} {{", spec.record_name).unwrap();
    for f in &spec.fields {
        writeln!(out, "    {} {};", f.source_type, f.name).unwrap();
    }
    out.push_str("};\n\n");
    writeln!(out, "#endif // {guard}").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tlm_scan::{parse_enums, parse_records, strip_comments_and_literals, PayloadField};
    use std::path::PathBuf;

    fn echo_spec() -> PayloadSpec {
        let field = |name: &str, i| PayloadField {
            name: name.into(),
            source_type: SourceType::ScInt(32),
            direction: None,
            declaration_index: i,
            location: Default::default(),
        };
        PayloadSpec {
            record_name: "payload".into(),
            fields: vec![field("data_in", 0), field("data_out", 1)],
            header_origin: PathBuf::from("fixtures/echo/echo_target.h"),
            enums: vec![],
        }
    }

    #[test]
    fn echo_header() {
        let text = extract_header(&echo_spec());
        assert!(text.contains("struct payload {\n    sc_dt::sc_int<32> data_in;\n    sc_dt::sc_int<32> data_out;\n};"));
        assert!(text.contains("#include <systemc>"));
        assert!(text.starts_with("// Payload record 'payload' extracted from echo_target.h."));
        assert_eq!(text, extract_header(&echo_spec()));
    }

    #[test]
    fn header_parses_back() {
        let text = extract_header(&echo_spec());
        let stripped = strip_comments_and_literals(&text);
        let recs = parse_records(&stripped);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].name, "payload");
        assert!(parse_enums(&stripped).is_empty());
    }
}
