//! Blanks out comments and literals so that pattern matching only sees code.
//!
//! Every removed byte is replaced by a space (newlines are kept), so byte
//! offsets and line/column positions in the stripped text match the original.

pub fn strip_comments_and_literals(src: &str) -> String {
    let bytes = src.as_bytes();
    let mut out = bytes.to_vec();
    let mut i = 0;
    let blank = |out: &mut Vec<u8>, from: usize, to: usize| {
        for b in &mut out[from..to] {
            if *b != b'\n' {
                *b = b' ';
            }
        }
    };

    while i < bytes.len() {
        match bytes[i] {
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                let end = src[i..].find('\n').map(|n| i + n).unwrap_or(bytes.len());
                blank(&mut out, i, end);
                i = end;
            }
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                let end = src[i + 2..].find("*/").map(|n| i + 2 + n + 2).unwrap_or(bytes.len());
                blank(&mut out, i, end);
                i = end;
            }
            b'R' if bytes.get(i + 1) == Some(&b'"') && !is_ident_byte(prev(bytes, i)) => {
                let open = i + 2;
                let paren = src[open..].find('(').map(|n| open + n);
                let end = paren.and_then(|p| {
                    let closing = format!("){}\"", &src[open..p]);
                    src[p..].find(&closing).map(|n| p + n + closing.len())
                });
                let end = end.unwrap_or(bytes.len());
                blank(&mut out, i + 1, end);
                i = end;
            }
            b'"' => {
                let end = literal_end(bytes, i, b'"');
                blank(&mut out, i, end);
                i = end;
            }
            b'\'' if !bytes.get(i.wrapping_sub(1)).is_some_and(|b| b.is_ascii_hexdigit()) || i == 0 => {
                let end = literal_end(bytes, i, b'\'');
                // Single alphanumeric character literals such as 'X' or '1' carry
                // logic values the scanner cares about; everything else is noise.
                let keep = end == i + 3 && bytes[i + 1].is_ascii_alphanumeric();
                if !keep {
                    blank(&mut out, i, end);
                }
                i = end;
            }
            _ => i += 1,
        }
    }
    String::from_utf8(out).expect("only ASCII bytes were replaced")
}

fn prev(bytes: &[u8], i: usize) -> u8 {
    if i == 0 {
        b' '
    } else {
        bytes[i - 1]
    }
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn literal_end(bytes: &[u8], start: usize, quote: u8) -> usize {
    let mut j = start + 1;
    while j < bytes.len() {
        match bytes[j] {
            b'\\' => j += 2,
            b'\n' => return j,
            b if b == quote => return j + 1,
            _ => j += 1,
        }
    }
    bytes.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_become_spaces() {
        let src = "a = 1; // b_transport\n/* nb_transport_fw\n */ c;";
        let out = strip_comments_and_literals(src);
        assert_eq!(out.len(), src.len());
        assert!(!out.contains("b_transport"));
        assert!(!out.contains("nb_transport_fw"));
        assert_eq!(out.matches('\n').count(), 2);
        assert!(out.ends_with(" c;"));
    }

    #[test]
    fn strings_are_blanked_but_logic_chars_survive() {
        let src = r#"puts("p->data_out = 1"); x = 'X'; y = ';'; z = '\n';"#;
        let out = strip_comments_and_literals(src);
        assert!(!out.contains("data_out"));
        assert!(out.contains("'X'"));
        assert!(!out.contains("';'"));
        assert_eq!(out.len(), src.len());
    }

    #[test]
    fn escaped_quotes_stay_inside_literal() {
        let out = strip_comments_and_literals(r#"s = "a\"b_transport"; t;"#);
        assert!(!out.contains("b_transport"));
        assert!(out.ends_with(" t;"));
    }

    #[test]
    fn raw_strings() {
        let out = strip_comments_and_literals(r#"auto s = R"x(b_transport ")" )x"; done;"#);
        assert!(!out.contains("b_transport"));
        assert!(out.ends_with(" done;"));
    }

    #[test]
    fn digit_separators_are_not_literals() {
        let out = strip_comments_and_literals("int n = 1'000'000; int m;");
        assert!(out.contains("int m;"));
    }
}
