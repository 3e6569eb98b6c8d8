//! Line lookup for semantic errors found after `serde_json` has parsed a document.

/// 1-based line of the `index`-th element of the top-level array stored under `key`,
/// or the line of the key itself when the element cannot be found.
pub(crate) fn array_element_line(text: &str, key: &str, index: usize) -> usize {
    let needle = format!("\"{key}\"");
    let Some(start) = text.find(&needle) else {
        return 1;
    };
    let mut line = 1 + text[..start].matches('\n').count();
    let key_line = line;
    let mut depth = 0usize;
    let mut seen = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for ch in text[start + needle.len()..].chars() {
        if ch == '\n' {
            line += 1;
        }
        if in_string {
            match (escaped, ch) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => {}
            }
            continue;
        }
        match ch {
            '"' if depth >= 1 => {
                in_string = true;
            }
            '[' | '{' => {
                depth += 1;
                if depth == 2 {
                    if seen == index {
                        return line;
                    }
                    seen += 1;
                }
            }
            ']' | '}' => {
                if depth <= 1 {
                    break;
                }
                depth -= 1;
            }
            _ => {}
        }
    }
    key_line
}
