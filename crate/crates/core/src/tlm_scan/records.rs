use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;

use super::{normalize_type, EnumDecl, PayloadField, ScanError, SourceType};
use crate::diag::Location;

static RECORD_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(struct|class)\s+([A-Za-z_]\w*)\s*(?:final\s*)?(:[^{;()]*)?\{").unwrap()
});
static SC_MODULE_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\bSC_MODULE\s*\(\s*([A-Za-z_]\w*)\s*\)\s*\{").unwrap());
static TYPEDEF_STRUCT_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\btypedef\s+struct\s*(?:[A-Za-z_]\w*\s*)?\{").unwrap());
static TYPEDEF_NAME_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s*([A-Za-z_]\w*)\s*;").unwrap());
static ENUM_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\benum\s+(?:(class|struct)\s+)?([A-Za-z_]\w*)\s*(?::\s*([^{;]+?)\s*)?\{").unwrap()
});
static ACCESS_LABEL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*(?:public|private|protected)\s*:(?:[^:]|$)").unwrap());
static DECLARATOR_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?s)^(.*?)([*&\s]*)\b([A-Za-z_]\w*)\s*(\[[^\]]*\])?\s*$").unwrap());

/// A `struct`/`class` found in a unit (stripped text coordinates).
#[derive(Debug, Clone)]
pub struct RecordDecl {
    pub name: String,
    /// Derives from `sc_module` or is declared with `SC_MODULE`.
    pub is_module: bool,
    pub body_start: usize,
    pub body_end: usize,
    /// Offset of the record keyword, used for diagnostics.
    pub offset: usize,
}

/// Finds the index of the `}` matching the `{` at `open`.
pub(crate) fn matching_brace(text: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in text[open..].char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
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

/// Lists every record declared in a comment-stripped unit, in textual order.
pub fn parse_records(stripped: &str) -> Vec<RecordDecl> {
    let mut out = Vec::new();
    for caps in RECORD_RE.captures_iter(stripped) {
        let whole = caps.get(0).unwrap();
        let before = stripped[..whole.start()].trim_end();
        if before.ends_with("enum") || before.ends_with("typedef") {
            continue;
        }
        let open = whole.end() - 1;
        let Some(close) = matching_brace(stripped, open) else { continue };
        let bases = caps.get(3).map(|m| m.as_str()).unwrap_or("");
        out.push(RecordDecl {
            name: caps[2].to_string(),
            is_module: bases.contains("sc_module"),
            body_start: open + 1,
            body_end: close,
            offset: whole.start(),
        });
    }
    for caps in SC_MODULE_RE.captures_iter(stripped) {
        let whole = caps.get(0).unwrap();
        let open = whole.end() - 1;
        let Some(close) = matching_brace(stripped, open) else { continue };
        out.push(RecordDecl {
            name: caps[1].to_string(),
            is_module: true,
            body_start: open + 1,
            body_end: close,
            offset: whole.start(),
        });
    }
    for m in TYPEDEF_STRUCT_RE.find_iter(stripped) {
        let open = m.end() - 1;
        let Some(close) = matching_brace(stripped, open) else { continue };
        let Some(caps) = TYPEDEF_NAME_RE.captures(&stripped[close + 1..]) else { continue };
        out.push(RecordDecl {
            name: caps[1].to_string(),
            is_module: false,
            body_start: open + 1,
            body_end: close,
            offset: m.start(),
        });
    }
    out.sort_by_key(|r| r.offset);
    out
}

/// Lists every enum declared in a comment-stripped unit.
pub fn parse_enums(stripped: &str) -> Vec<EnumDecl> {
    let mut out = Vec::new();
    for caps in ENUM_RE.captures_iter(stripped) {
        let whole = caps.get(0).unwrap();
        let open = whole.end() - 1;
        let Some(close) = matching_brace(stripped, open) else { continue };
        let enumerators = stripped[open + 1..close]
            .split(',')
            .map(str::trim)
            .filter(|e| !e.is_empty())
            .map(|e| match e.split_once('=') {
                Some((name, value)) => (name.trim().to_string(), Some(normalize_type(value))),
                None => (e.to_string(), None),
            })
            .collect();
        out.push(EnumDecl {
            name: caps[2].to_string(),
            scoped: caps.get(1).is_some(),
            underlying: caps.get(3).map(|m| normalize_type(m.as_str())),
            enumerators,
        });
    }
    out
}

struct Statement<'a> {
    text: &'a str,
    offset: usize,
}

/// Splits a record body into top-level member declarations.
fn split_statements(body: &str, base: usize) -> Vec<Statement<'_>> {
    let mut out = Vec::new();
    let (mut paren, mut brace) = (0i32, 0i32);
    let mut start = 0usize;
    let mut function_like = false;
    let bytes = body.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                if brace == 0 && paren == 0 {
                    function_like = true;
                }
                paren += 1;
            }
            b')' => paren -= 1,
            b'{' => brace += 1,
            b'}' => {
                brace -= 1;
                if brace == 0 && paren == 0 && function_like {
                    out.push(Statement { text: &body[start..=i], offset: base + start });
                    start = i + 1;
                    function_like = false;
                }
            }
            b';' if brace == 0 && paren == 0 => {
                out.push(Statement { text: &body[start..i], offset: base + start });
                start = i + 1;
                function_like = false;
            }
            _ => {}
        }
        i += 1;
    }
    out
}

/// Splits on commas outside `<>`, `()`, `{}`.
fn split_declarators(text: &str) -> Vec<(usize, &str)> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '<' | '(' | '{' | '[' => depth += 1,
            '>' | ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((start, &text[start..]));
    parts
}

/// Drops a `= init` or `{init}` initializer from a declarator.
fn strip_initializer(decl: &str) -> &str {
    let mut depth = 0i32;
    for (i, c) in decl.char_indices() {
        match c {
            '<' | '(' | '[' => depth += 1,
            '>' | ')' | ']' => depth -= 1,
            '=' | '{' if depth == 0 => return &decl[..i],
            _ => {}
        }
    }
    decl
}

pub(crate) struct FieldContext<'a> {
    pub record: &'a str,
    pub path: &'a Path,
    pub full_text: &'a str,
    pub enum_names: &'a [String],
    pub record_names: &'a [String],
}

/// Extracts the data members of a flat record body.
pub(crate) fn parse_fields(ctx: &FieldContext<'_>, body: &str, body_offset: usize) -> Result<Vec<PayloadField>, ScanError> {
    let mut fields = Vec::new();
    let loc = |offset: usize| Location::from_offset(ctx.full_text, offset);

    for stmt in split_statements(body, body_offset) {
        let mut text = stmt.text;
        let mut offset = stmt.offset;
        while let Some(m) = ACCESS_LABEL_RE.find(text) {
            // keep the character following the colon
            let cut = text[..m.end()].rfind(':').unwrap() + 1;
            offset += cut;
            text = &text[cut..];
        }
        let lead = text.len() - text.trim_start().len();
        offset += lead;
        let trimmed = text.trim();
        if trimmed.is_empty() {
            continue;
        }
        let first_word = trimmed.split(|c: char| !(c.is_alphanumeric() || c == '_')).next().unwrap_or("");
        match first_word {
            "typedef" | "using" | "friend" | "static_assert" | "template" | "static" | "SC_HAS_PROCESS"
            | "SC_CTOR" | "enum" => continue,
            "struct" | "class" | "union" if trimmed.contains('{') => {
                let after = &trimmed[trimmed.rfind('}').map(|i| i + 1).unwrap_or(trimmed.len())..];
                let field = after.trim().trim_end_matches(';').trim();
                let field = if field.is_empty() { first_word } else { field };
                return Err(ScanError::NestedRecord {
                    record: ctx.record.to_string(),
                    field: field.to_string(),
                    path: ctx.path.to_path_buf(),
                    location: loc(offset),
                });
            }
            _ => {}
        }

        let declarators = split_declarators(trimmed);
        let (_, first) = declarators[0];
        if strip_initializer(first).contains('(') {
            continue;
        }

        let mut type_token: Option<String> = None;
        for (rel, decl) in declarators {
            let decl_text = strip_initializer(decl);
            let Some(caps) = DECLARATOR_RE.captures(decl_text) else { continue };
            let name = caps.get(3).unwrap();
            let name_offset = offset + rel + name.start();
            let name = name.as_str().to_string();
            let ty_part = caps.get(1).unwrap().as_str();
            let indirection = caps.get(2).unwrap().as_str();
            if type_token.is_none() {
                let ty = ty_part
                    .split_whitespace()
                    .filter(|w| !matches!(*w, "mutable" | "volatile" | "const"))
                    .collect::<Vec<_>>()
                    .join(" ");
                if ty.is_empty() {
                    break;
                }
                type_token = Some(normalize_type(&ty));
            }
            if indirection.contains('*') || indirection.contains('&') {
                return Err(ScanError::IndirectField {
                    record: ctx.record.to_string(),
                    field: name,
                    path: ctx.path.to_path_buf(),
                    location: loc(name_offset),
                });
            }
            if caps.get(4).is_some() {
                return Err(ScanError::ArrayField {
                    record: ctx.record.to_string(),
                    field: name,
                    path: ctx.path.to_path_buf(),
                    location: loc(name_offset),
                });
            }
            let token = type_token.clone().unwrap();
            let source_type = SourceType::classify(&token, ctx.enum_names);
            if let SourceType::Other(t) = &source_type {
                let bare = t.trim_start_matches("struct ").rsplit("::").next().unwrap_or(t);
                if ctx.record_names.iter().any(|r| r == bare) {
                    return Err(ScanError::NestedRecord {
                        record: ctx.record.to_string(),
                        field: name,
                        path: ctx.path.to_path_buf(),
                        location: loc(name_offset),
                    });
                }
            }
            fields.push(PayloadField {
                name,
                source_type,
                direction: None,
                declaration_index: fields.len(),
                location: loc(name_offset),
            });
        }
    }
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn fields_of(src: &str, record: &str) -> Result<Vec<PayloadField>, ScanError> {
        let recs = parse_records(src);
        let enums: Vec<String> = parse_enums(src).into_iter().map(|e| e.name).collect();
        let names: Vec<String> = recs.iter().map(|r| r.name.clone()).collect();
        let rec = recs.iter().find(|r| r.name == record).expect("record");
        let path = PathBuf::from("t.h");
        let ctx = FieldContext { record, path: &path, full_text: src, enum_names: &enums, record_names: &names };
        parse_fields(&ctx, &src[rec.body_start..rec.body_end], rec.body_start)
    }

    #[test]
    fn flat_record_fields_in_order() {
        let src = "struct payload {\n    sc_dt::sc_int<32> data_in;\n    sc_dt::sc_int<32> data_out;\n};\n";
        let fields = fields_of(src, "payload").unwrap();
        assert_eq!(fields.len(), 2);
        assert_eq!(fields[0].name, "data_in");
        assert_eq!(fields[0].source_type, SourceType::ScInt(32));
        assert_eq!(fields[0].location, Location { line: 2, column: 23 });
        assert_eq!(fields[1].declaration_index, 1);
    }

    #[test]
    fn multi_declarators_initializers_and_methods() {
        let src = "struct p { public: sc_uint<8> a = 0, b{1}; bool ok() const { return a == b; } \
                   sc_dt::sc_fixed<8, 4> fx; p() : a(0) {} };";
        let fields = fields_of(src, "p").unwrap();
        let names: Vec<_> = fields.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["a", "b", "fx"]);
        assert_eq!(fields[1].source_type, SourceType::ScUint(8));
        assert_eq!(fields[2].source_type, SourceType::Other("sc_dt::sc_fixed<8,4>".into()));
    }

    #[test]
    fn arrays_are_rejected() {
        let err = fields_of("struct p { sc_int<8> buf[4]; bool b; };", "p").unwrap_err();
        assert!(matches!(err, ScanError::ArrayField { ref field, .. } if field == "buf"));
    }

    #[test]
    fn nested_records_are_rejected() {
        let err = fields_of("struct inner { bool x; }; struct p { inner i; bool b; };", "p").unwrap_err();
        assert!(matches!(err, ScanError::NestedRecord { ref field, .. } if field == "i"));
        let err = fields_of("struct p { struct { bool x; } anon; bool b; };", "p").unwrap_err();
        assert!(matches!(err, ScanError::NestedRecord { ref field, .. } if field == "anon"));
    }

    #[test]
    fn pointers_are_rejected() {
        let err = fields_of("struct p { int* q; };", "p").unwrap_err();
        assert!(matches!(err, ScanError::IndirectField { .. }));
    }

    #[test]
    fn modules_and_typedef_structs_are_found() {
        let src = "class T : public sc_core::sc_module { }; SC_MODULE(U) { }; typedef struct { bool a; } raw_t; enum class E : int { A, B = 3 };";
        let recs = parse_records(src);
        let summary: Vec<_> = recs.iter().map(|r| (r.name.as_str(), r.is_module)).collect();
        assert_eq!(summary, [("T", true), ("U", true), ("raw_t", false)]);
        let enums = parse_enums(src);
        assert_eq!(enums.len(), 1);
        assert!(enums[0].scoped);
        assert_eq!(enums[0].underlying.as_deref(), Some("int"));
        assert_eq!(enums[0].enumerators, vec![("A".into(), None), ("B".into(), Some("3".into()))]);
    }
}
