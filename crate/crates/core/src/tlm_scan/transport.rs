use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use regex::Regex;

use crate::diag::Location;

use super::records::{matching_brace, parse_enums, parse_fields, parse_records, FieldContext, RecordDecl};
use super::{
    strip_comments_and_literals, Diagnostic, EnumDecl, PayloadSpec, ScanError, SourceKind, SourceType, SourceUnit,
    TransportFunction, TransportSurface,
};

static TRANSPORT_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(?:([A-Za-z_]\w*)\s*::\s*)?(b_transport|nb_transport_fw)\s*\(").unwrap()
});
static SOCKET_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"\b(?:simple_target_socket|tlm_target_socket|passthrough_target_socket|multi_passthrough_target_socket)\s*(?:<[^;{}]*>)?\s+([A-Za-z_]\w*)\s*[;{(]",
    )
    .unwrap()
});
const QUALIFIERS: &[&str] = &["const", "override", "final", "noexcept", "volatile"];

fn matching_paren(text: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in text[open..].char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(open + i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Finds `b_transport` / `nb_transport_fw` definitions (not calls or
/// declarations) in comment-stripped text.
pub fn find_transport_functions(stripped: &str, path: &Path, records: &[RecordDecl]) -> Vec<TransportFunction> {
    let mut out = Vec::new();
    for caps in TRANSPORT_RE.captures_iter(stripped) {
        let whole = caps.get(0).unwrap();
        let before = stripped[..whole.start()].trim_end();
        if before.ends_with("->") || before.ends_with('.') || before.ends_with('&') {
            continue;
        }
        let Some(close) = matching_paren(stripped, whole.end() - 1) else { continue };
        let mut rest = &stripped[close + 1..];
        loop {
            let trimmed = rest.trim_start();
            match QUALIFIERS.iter().find(|q| {
                trimmed.starts_with(**q) && !trimmed[q.len()..].starts_with(|c: char| c.is_alphanumeric() || c == '_')
            }) {
                Some(q) => rest = &trimmed[q.len()..],
                None => {
                    rest = trimmed;
                    break;
                }
            }
        }
        if !rest.starts_with('{') {
            continue;
        }
        let open = stripped.len() - rest.len();
        let Some(end) = matching_brace(stripped, open) else { continue };
        let owner = caps.get(1).map(|m| m.as_str().to_string()).or_else(|| {
            records
                .iter()
                .filter(|r| r.body_start <= whole.start() && whole.start() < r.body_end)
                .max_by_key(|r| r.body_start)
                .map(|r| r.name.clone())
        });
        out.push(TransportFunction {
            name: caps[2].to_string(),
            owner,
            path: path.to_path_buf(),
            body: stripped[open + 1..end].to_string(),
            body_offset: open + 1,
            body_location: Location::from_offset(stripped, open + 1),
        });
    }
    out
}

struct StrippedUnit<'a> {
    unit: &'a SourceUnit,
    text: String,
    records: Vec<RecordDecl>,
}

/// Locates the payload record and the transport functions across `units`.
///
/// The returned [`PayloadSpec`] has no directions yet; run
/// [`infer_directions`](super::infer_directions) next.
pub fn scan_sources(
    units: &[SourceUnit],
    record_hint: Option<&str>,
) -> Result<(PayloadSpec, TransportSurface, Vec<Diagnostic>), ScanError> {
    if units.is_empty() {
        return Err(ScanError::NoUnits);
    }
    let stripped: Vec<StrippedUnit<'_>> = units
        .iter()
        .map(|unit| {
            let text = strip_comments_and_literals(unit.text());
            let records = parse_records(&text);
            StrippedUnit { unit, text, records }
        })
        .collect();

    let functions: Vec<TransportFunction> = stripped
        .iter()
        .flat_map(|s| find_transport_functions(&s.text, s.unit.path(), &s.records))
        .collect();
    if functions.is_empty() {
        return Err(ScanError::NoTransportFunction);
    }

    let enums: Vec<EnumDecl> = stripped.iter().flat_map(|s| parse_enums(&s.text)).collect();
    let enum_names: Vec<String> = enums.iter().map(|e| e.name.clone()).collect();
    let record_names: Vec<String> =
        stripped.iter().flat_map(|s| s.records.iter().filter(|r| !r.is_module).map(|r| r.name.clone())).collect();

    let find_record = |name: &str| {
        stripped.iter().find_map(|s| s.records.iter().find(|r| !r.is_module && r.name == name).map(|r| (s, r)))
    };
    let field_ctx = |s: &'_ StrippedUnit<'_>, r: &RecordDecl| {
        let ctx = FieldContext {
            record: &r.name,
            path: s.unit.path(),
            full_text: &s.text,
            enum_names: &enum_names,
            record_names: &record_names,
        };
        parse_fields(&ctx, &s.text[r.body_start..r.body_end], r.body_start)
    };

    let chosen = match record_hint {
        Some(hint) => find_record(hint).ok_or_else(|| ScanError::RecordHintNotFound(hint.to_string()))?,
        None => {
            let mut candidates = cast_candidates(&functions, &record_names);
            if candidates.is_empty() {
                candidates = record_names
                    .iter()
                    .filter(|name| {
                        let Some((s, r)) = find_record(name) else { return false };
                        let Ok(fields) = field_ctx(s, r) else { return false };
                        fields.iter().any(|f| functions.iter().any(|t| mentions_member(&t.body, &f.name)))
                    })
                    .cloned()
                    .collect();
                dedup_in_order(&mut candidates);
            }
            match candidates.len() {
                0 => return Err(ScanError::NoPayloadRecord),
                1 => find_record(&candidates[0]).expect("candidate was found among records"),
                _ => return Err(ScanError::AmbiguousPayload(candidates)),
            }
        }
    };

    let (unit, record) = chosen;
    let fields = field_ctx(unit, record)?;
    if fields.is_empty() {
        return Err(ScanError::EmptyRecord(record.name.clone()));
    }
    let mut seen = HashSet::new();
    for f in &fields {
        if !seen.insert(f.name.clone()) {
            return Err(ScanError::DuplicateField { record: record.name.clone(), field: f.name.clone() });
        }
    }

    let mut used_enums: Vec<EnumDecl> = Vec::new();
    for e in &enums {
        let used = fields.iter().any(|f| f.source_type == SourceType::Enum(e.name.clone()));
        if used && !used_enums.iter().any(|u| u.name == e.name) {
            used_enums.push(e.clone());
        }
    }

    let mut diagnostics = Vec::new();
    for f in &fields {
        if let SourceType::Other(token) = &f.source_type {
            diagnostics.push(
                Diagnostic::warning(format!("field '{}' has type '{token}' with no FMI mapping", f.name))
                    .at(unit.unit.path(), f.location),
            );
        }
    }

    let spec = PayloadSpec {
        record_name: record.name.clone(),
        fields,
        header_origin: unit.unit.path().to_path_buf(),
        enums: used_enums,
    };
    let surface = build_surface(functions, &stripped);
    Ok((spec, surface, diagnostics))
}

fn build_surface(functions: Vec<TransportFunction>, units: &[StrippedUnit<'_>]) -> TransportSurface {
    let module_name = functions.iter().find_map(|f| f.owner.clone());
    let module_decl = module_name.as_ref().and_then(|name| {
        units.iter().find_map(|s| s.records.iter().find(|r| &r.name == name).map(|r| (s, r)))
    });
    let module_file: Option<PathBuf> = module_decl.map(|(s, _)| s.unit.path().to_path_buf());
    let module_header = module_decl
        .filter(|(s, _)| s.unit.kind() == SourceKind::Header)
        .map(|(s, _)| s.unit.path().to_path_buf());
    let socket_name = module_decl
        .and_then(|(s, r)| SOCKET_RE.captures(&s.text[r.body_start..r.body_end]).map(|c| c[1].to_string()))
        .or_else(|| units.iter().find_map(|s| SOCKET_RE.captures(&s.text).map(|c| c[1].to_string())));
    TransportSurface {
        has_blocking: functions.iter().any(|f| f.name == "b_transport"),
        has_nonblocking: functions.iter().any(|f| f.name == "nb_transport_fw"),
        functions,
        module_name,
        module_file,
        module_header,
        socket_name,
    }
}

/// Records whose pointer type appears in a statement that touches the data
/// pointer of the generic payload, in order of first appearance.
fn cast_candidates(functions: &[TransportFunction], record_names: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for f in functions {
        for stmt in f.body.split([';', '{', '}']) {
            if !(stmt.contains("get_data_ptr") || stmt.contains("set_data_ptr")) {
                continue;
            }
            for name in record_names {
                let re = Regex::new(&format!(r"\b{}\s*\*", regex::escape(name))).unwrap();
                if re.is_match(stmt) {
                    out.push(name.clone());
                }
            }
        }
    }
    dedup_in_order(&mut out);
    out
}

fn dedup_in_order(items: &mut Vec<String>) {
    let mut seen = HashSet::new();
    items.retain(|x| seen.insert(x.clone()));
}

pub(crate) fn mentions_member(body: &str, field: &str) -> bool {
    Regex::new(&format!(r"(?:\.|->)\s*{}\b", regex::escape(field))).unwrap().is_match(body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(path: &str, text: &str) -> SourceUnit {
        SourceUnit::new(path, text).unwrap()
    }

    const ECHO_PAYLOAD: &str = "struct payload {\n    sc_dt::sc_int<32> data_in;\n    sc_dt::sc_int<32> data_out;\n};\n";

    #[test]
    fn definitions_not_calls() {
        let src = "class T : public sc_core::sc_module {\n void b_transport(tlm::tlm_generic_payload& t, sc_time& d);\n \
                   tlm::tlm_sync_enum nb_transport_fw(tlm::tlm_generic_payload& t, tlm::tlm_phase& p, sc_time& d) override { return tlm::TLM_COMPLETED; }\n};\n\
                   void T::b_transport(tlm::tlm_generic_payload& t, sc_time& d) { sock->b_transport(t, d); }\n\
                   void reg() { s.register_b_transport(this, &T::b_transport); }";
        let stripped = strip_comments_and_literals(src);
        let recs = parse_records(&stripped);
        let fns = find_transport_functions(&stripped, Path::new("t.cpp"), &recs);
        let summary: Vec<_> = fns.iter().map(|f| (f.name.as_str(), f.owner.as_deref())).collect();
        assert_eq!(summary, [("nb_transport_fw", Some("T")), ("b_transport", Some("T"))]);
    }

    #[test]
    fn no_transport_function() {
        let err = scan_sources(&[unit("p.h", ECHO_PAYLOAD)], None).unwrap_err();
        assert!(matches!(err, ScanError::NoTransportFunction));
    }

    #[test]
    fn transport_names_in_comments_do_not_count() {
        let src = format!("{ECHO_PAYLOAD}// void b_transport(int x) {{ }}\n/* nb_transport_fw(){{}} */\n");
        let err = scan_sources(&[unit("p.h", &src)], None).unwrap_err();
        assert!(matches!(err, ScanError::NoTransportFunction));
    }

    #[test]
    fn hint_must_exist() {
        let src = format!("{ECHO_PAYLOAD}void b_transport(tlm::tlm_generic_payload& t, sc_time& d) {{ }}");
        let err = scan_sources(&[unit("p.cpp", &src)], Some("nope")).unwrap_err();
        assert!(matches!(err, ScanError::RecordHintNotFound(h) if h == "nope"));
    }

    #[test]
    fn ambiguous_without_cast() {
        let src = "struct a { int x; int y; }; struct b { int u; int v; };\n\
                   void b_transport(tlm::tlm_generic_payload& t, sc_time& d) { p->y = q->x; r->v = s->u; }";
        let err = scan_sources(&[unit("p.cpp", src)], None).unwrap_err();
        assert!(matches!(err, ScanError::AmbiguousPayload(ref c) if c == &["a".to_string(), "b".to_string()]));
        let (spec, _, _) = scan_sources(&[unit("p.cpp", src)], Some("b")).unwrap();
        assert_eq!(spec.record_name, "b");
    }

    #[test]
    fn no_payload_when_nothing_is_referenced() {
        let src = "struct a { int x; };\nvoid b_transport(tlm::tlm_generic_payload& t, sc_time& d) { t.set_response_status(tlm::TLM_OK_RESPONSE); }";
        let err = scan_sources(&[unit("p.cpp", src)], None).unwrap_err();
        assert!(matches!(err, ScanError::NoPayloadRecord));
    }

    #[test]
    fn socket_and_module_header() {
        let header = "class Echo : public sc_core::sc_module {\npublic:\n tlm_utils::simple_target_socket<Echo> tsock;\n \
                      void b_transport(tlm::tlm_generic_payload& t, sc_core::sc_time& d);\n};\n";
        let body = format!(
            "{ECHO_PAYLOAD}void Echo::b_transport(tlm::tlm_generic_payload& t, sc_core::sc_time& d) {{\n payload* p = reinterpret_cast<payload*>(t.get_data_ptr());\n p->data_out = p->data_in;\n}}\n"
        );
        let (spec, surface, _) = scan_sources(&[unit("echo.h", header), unit("echo.cpp", &body)], None).unwrap();
        assert_eq!(spec.record_name, "payload");
        assert_eq!(surface.module_name.as_deref(), Some("Echo"));
        assert_eq!(surface.module_header.as_deref(), Some(Path::new("echo.h")));
        assert_eq!(surface.socket_name.as_deref(), Some("tsock"));
        assert!(surface.has_blocking && !surface.has_nonblocking);
    }
}
