use std::sync::LazyLock;

use regex::Regex;

use super::{Diagnostic, Direction, PayloadSpec, ScanError, SourceType, TransportFunction, TransportSurface};

const COMPOUND_ASSIGN: &[&str] = &["<<=", ">>=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "++", "--"];

static OBJECT_CHAIN_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?:\(\s*\*\s*[A-Za-z_]\w*\s*\)|(?:[A-Za-z_]\w*\s*(?:->|\.)\s*)*[A-Za-z_]\w*)\s*$").unwrap()
});
static UNKNOWN_LOGIC_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"SC_LOGIC_[XZ]\b|'[XxZz]'").unwrap());

#[derive(Debug, Clone, Copy)]
struct Access {
    offset: usize,
    write: bool,
    rhs_end: usize,
}

fn skip_balanced(text: &str, open: char, close: char) -> usize {
    let mut depth = 0i32;
    for (i, c) in text.char_indices() {
        if c == open {
            depth += 1;
        } else if c == close {
            depth -= 1;
            if depth == 0 {
                return i + 1;
            }
        }
    }
    text.len()
}

/// Skips bit/part selects such as `[3]`, `.range(7, 0)`, `.bit(2)` after a member name.
fn skip_selectors(mut rest: &str) -> &str {
    loop {
        let trimmed = rest.trim_start();
        if trimmed.starts_with('[') {
            rest = &trimmed[skip_balanced(trimmed, '[', ']')..];
            continue;
        }
        let selector = [".range", ".bit"].iter().find_map(|s| trimmed.strip_prefix(s));
        match selector {
            Some(after) if after.trim_start().starts_with('(') => {
                let after = after.trim_start();
                rest = &after[skip_balanced(after, '(', ')')..];
            }
            _ => return trimmed,
        }
    }
}

fn is_write_suffix(rest: &str) -> bool {
    if COMPOUND_ASSIGN.iter().any(|op| rest.starts_with(op)) {
        return true;
    }
    rest.starts_with('=') && !rest.starts_with("==")
}

fn is_write_prefix(before: &str) -> bool {
    let without_object = match OBJECT_CHAIN_RE.find(before) {
        Some(m) => &before[..m.start()],
        None => before,
    };
    let trimmed = without_object.trim_end();
    trimmed.ends_with("++") || trimmed.ends_with("--")
}

fn accesses(function: &TransportFunction, field: &str) -> Vec<Access> {
    let re = Regex::new(&format!(r"(?:\.|->)\s*({})\b", regex::escape(field))).unwrap();
    let body = &function.body;
    re.captures_iter(body)
        .map(|caps| {
            let whole = caps.get(0).unwrap();
            let name = caps.get(1).unwrap();
            let rest = skip_selectors(&body[name.end()..]);
            let write = is_write_suffix(rest) || is_write_prefix(&body[..whole.start()]);
            let rhs_start = body.len() - rest.len();
            let rhs_end = body[rhs_start..].find(';').map(|n| rhs_start + n).unwrap_or(body.len());
            Access { offset: name.start(), write, rhs_end }
        })
        .collect()
}

/// Classifies every payload field by how the transport functions use it.
///
/// A field assigned anywhere is an output, even when it is also read; a field
/// that is only read is an input. Fields that are never referenced produce a
/// warning and are dropped from the returned spec.
pub fn infer_directions(
    spec: &PayloadSpec,
    surface: &TransportSurface,
) -> Result<(PayloadSpec, Vec<Diagnostic>), ScanError> {
    let mut diagnostics = Vec::new();
    let mut out = spec.clone();
    out.fields.clear();

    for field in &spec.fields {
        let mut referenced = false;
        let mut written = false;
        for function in &surface.functions {
            for access in accesses(function, &field.name) {
                referenced = true;
                written |= access.write;
                let logic = matches!(field.source_type, SourceType::ScLogic | SourceType::Bool);
                if access.write && logic {
                    let rhs = &function.body[access.offset..access.rhs_end];
                    if UNKNOWN_LOGIC_RE.is_match(rhs) {
                        diagnostics.push(
                            Diagnostic::warning(format!(
                                "field '{}' may carry an X/Z logic value; it reads as false through the FMI interface",
                                field.name
                            ))
                            .at(&function.path, function.location_of(access.offset)),
                        );
                    }
                }
            }
        }
        if !referenced {
            diagnostics.push(
                Diagnostic::warning(format!(
                    "field '{}' of record '{}' is never referenced by a transport function; excluded from the FMI interface",
                    field.name, spec.record_name
                ))
                .at(&spec.header_origin, field.location),
            );
            continue;
        }
        let mut classified = field.clone();
        classified.direction = Some(if written { Direction::Output } else { Direction::Input });
        out.fields.push(classified);
    }

    if out.fields.is_empty() {
        return Err(ScanError::UnreferencedField {
            record: spec.record_name.clone(),
            field: spec.fields.first().map(|f| f.name.clone()).unwrap_or_default(),
        });
    }
    out.validate()?;
    Ok((out, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tlm_scan::{scan_sources, SourceUnit};

    fn run(record: &str, body: &str) -> Result<(PayloadSpec, Vec<Diagnostic>), ScanError> {
        let src = format!("{record}\nvoid b_transport(tlm::tlm_generic_payload& t, sc_core::sc_time& d) {{\n{body}\n}}\n");
        let unit = SourceUnit::new("t.cpp", src).unwrap();
        let (spec, surface, _) = scan_sources(&[unit], None)?;
        infer_directions(&spec, &surface)
    }

    fn directions(spec: &PayloadSpec) -> Vec<(&str, Direction)> {
        spec.fields.iter().map(|f| (f.name.as_str(), f.direction.unwrap())).collect()
    }

    const ECHO_PAYLOAD: &str = "struct payload { sc_dt::sc_int<32> data_in; sc_dt::sc_int<32> data_out; };";

    #[test]
    fn read_is_input_assign_is_output() {
        let (spec, diags) =
            run(ECHO_PAYLOAD, "payload* p = reinterpret_cast<payload*>(t.get_data_ptr());\np->data_out = p->data_in;").unwrap();
        assert_eq!(directions(&spec), [("data_in", Direction::Input), ("data_out", Direction::Output)]);
        assert!(diags.is_empty());
    }

    #[test]
    fn read_write_conflict_is_output() {
        let record = "struct s { int a; int acc; };";
        let (spec, _) = run(record, "s* p = (s*) t.get_data_ptr(); p->acc += p->a; if (p->acc == 0) {}").unwrap();
        assert_eq!(directions(&spec), [("a", Direction::Input), ("acc", Direction::Output)]);
    }

    #[test]
    fn write_forms() {
        let record = "struct s { int i; int a; int b; int c; int d; int e; };";
        let body = "s& r = *reinterpret_cast<s*>(t.get_data_ptr());\n\
                    r.a++; ++r.b; r.c[3] = r.i; r.d.range(7, 0) = 1; (*q).e <<= 2;";
        let (spec, _) = run(record, body).unwrap();
        let outs: Vec<_> = spec.outputs().map(|f| f.name.as_str()).collect();
        assert_eq!(outs, ["a", "b", "c", "d", "e"]);
        assert_eq!(spec.inputs().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["i"]);
    }

    #[test]
    fn comparison_is_a_read() {
        let record = "struct s { int a; int b; };";
        let (spec, _) = run(record, "s* p = (s*) t.get_data_ptr(); if (p->a == 3) p->b = 1;").unwrap();
        assert_eq!(directions(&spec), [("a", Direction::Input), ("b", Direction::Output)]);
    }

    #[test]
    fn unreferenced_field_is_warned_and_excluded() {
        let record = "struct s { int a; int unused; int b; };";
        let (spec, diags) = run(record, "s* p = (s*) t.get_data_ptr(); p->b = p->a;").unwrap();
        assert_eq!(spec.fields.len(), 2);
        assert_eq!(spec.fields[1].declaration_index, 2);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("'unused'"));
        assert_eq!(diags[0].location.unwrap().line, 1);
    }

    #[test]
    fn all_inputs_is_an_error() {
        let record = "struct s { int a; int b; };";
        let err = run(record, "s* p = (s*) t.get_data_ptr(); int x = p->a + p->b;").unwrap_err();
        assert!(matches!(err, ScanError::AllFieldsOneDirection { direction: Direction::Input, .. }));
    }

    #[test]
    fn unknown_logic_values_warn() {
        let record = "struct s { sc_dt::sc_logic en; sc_dt::sc_logic q; };";
        let (_, diags) =
            run(record, "s* p = (s*) t.get_data_ptr();\nif (p->en == '1') p->q = 'Z'; else p->q = sc_dt::SC_LOGIC_X;")
                .unwrap();
        assert_eq!(diags.len(), 2);
        assert!(diags.iter().all(|d| d.message.contains("X/Z")));
        assert_eq!(diags[0].location.unwrap().line, 4);
    }

    #[test]
    fn classification_is_deterministic() {
        let body = "payload* p = reinterpret_cast<payload*>(t.get_data_ptr());\np->data_out = p->data_in;";
        assert_eq!(run(ECHO_PAYLOAD, body).unwrap().0, run(ECHO_PAYLOAD, body).unwrap().0);
    }
}
