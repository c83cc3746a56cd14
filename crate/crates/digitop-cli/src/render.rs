//! Human rendering of the machine output: the same JSON value, printed as
//! indented `key: value` lines so the two formats stay field-for-field
//! equivalent.

use serde_json::Value;

enum Rendered {
    Inline(String),
    Block(Vec<String>),
}

fn all_numbers(values: &[Value]) -> bool {
    values.iter().all(|v| matches!(v, Value::Number(_)))
}

fn render(value: &Value) -> Rendered {
    match value {
        Value::Null => Rendered::Inline("null".into()),
        Value::Bool(b) => Rendered::Inline(b.to_string()),
        Value::Number(n) => Rendered::Inline(n.to_string()),
        Value::String(s) => Rendered::Inline(s.clone()),
        Value::Array(xs) if xs.is_empty() => Rendered::Inline("(empty)".into()),
        Value::Array(xs) if all_numbers(xs) => Rendered::Inline(
            xs.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        ),
        Value::Array(xs) => {
            let mut lines = Vec::new();
            for x in xs {
                match render(x) {
                    Rendered::Inline(s) => lines.push(format!("- {s}")),
                    Rendered::Block(inner) => {
                        for (i, line) in inner.iter().enumerate() {
                            if i == 0 {
                                lines.push(format!("- {line}"));
                            } else {
                                lines.push(format!("  {line}"));
                            }
                        }
                    }
                }
            }
            Rendered::Block(lines)
        }
        Value::Object(map) if map.is_empty() => Rendered::Inline("(empty)".into()),
        Value::Object(map) => {
            let mut lines = Vec::new();
            for (key, v) in map {
                match render(v) {
                    Rendered::Inline(s) => lines.push(format!("{key}: {s}")),
                    Rendered::Block(inner) => {
                        lines.push(format!("{key}:"));
                        for line in inner {
                            lines.push(format!("  {line}"));
                        }
                    }
                }
            }
            Rendered::Block(lines)
        }
    }
}

/// The whole value as human-readable text (with trailing newline).
pub fn human(value: &Value) -> String {
    let mut out = match render(value) {
        Rendered::Inline(s) => s,
        Rendered::Block(lines) => lines.join("\n"),
    };
    out.push('\n');
    out
}
